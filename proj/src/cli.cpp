#include "treereg/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "treereg/datagen.hpp"
#include "treereg/harness.hpp"
#include "treereg/verify.hpp"

namespace treereg::cli {
namespace {

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

const LearnerSpec& find_learner(const ExperimentConfig& cfg, const std::string& name) {
  if (name.empty()) return cfg.learners.front();
  for (const auto& l : cfg.learners) {
    if (l.name == name) return l;
  }
  throw ConfigError("no learner named " + name);
}

/// Per-step rows for one learner, starting at 1-based step t0.
struct Trace {
  std::size_t t0 = 1;
  std::vector<double> e2;
  double cum_before = 0.0;
};

Trace continue_run(SequentialRegressor& learner, const std::vector<Sample>& samples, std::size_t from, std::size_t to,
                   double cum_before) {
  Trace trace{from + 1, {}, cum_before};
  for (std::size_t t = from; t < to; ++t) {
    learner.predict(samples[t].x_ext);
    const double e = learner.learn(samples[t].d);
    trace.e2.push_back(e * e);
  }
  return trace;
}

void write_trace(std::ostream& out, const std::string& name, const Trace& trace) {
  out << "t,learner,e2,cum_e2,norm_err\n";
  out.precision(17);
  double cum = trace.cum_before;
  for (std::size_t i = 0; i < trace.e2.size(); ++i) {
    cum += trace.e2[i];
    const std::size_t t = trace.t0 + i;
    out << t << ',' << name << ',' << trace.e2[i] << ',' << cum << ',' << cum / static_cast<double>(t) << '\n';
  }
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Online piecewise-linear regression with decision trees"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  std::string config_path;
  std::string output_override;
  run_cmd->add_option("config", config_path, "Experiment JSON")->required();
  run_cmd->add_option("--output", output_override, "Output prefix (overrides the config)");

  auto* verify_cmd = app.add_subcommand("verify", "Check DFT/DAT against the direct mixture in lockstep");
  VerifyOptions vopt;
  std::string mode = "dft";
  verify_cmd->add_option("--depth", vopt.depth)->required();
  verify_cmd->add_option("--steps", vopt.steps)->required();
  verify_cmd->add_option("--mode", mode)->check(CLI::IsMember({"dft", "dat"}))->required();
  verify_cmd->add_option("--seed", vopt.seed);
  verify_cmd->add_option("--mu", vopt.mu);
  verify_cmd->add_option("--tolerance", vopt.tolerance);

  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic stream as CSV");
  std::string stream_kind;
  std::size_t gen_n = 1000;
  std::optional<std::uint64_t> gen_seed;
  double noise_var = 0.1;
  std::size_t burn_in = 0;
  std::string gen_out;
  gen_cmd->add_option("stream", stream_kind, "matched|mismatched|first_order|third_order|henon|lorenz")->required();
  gen_cmd->add_option("--n", gen_n);
  gen_cmd->add_option("--seed", gen_seed);
  gen_cmd->add_option("--noise-var", noise_var);
  gen_cmd->add_option("--burn-in", burn_in);
  gen_cmd->add_option("--out", gen_out, "CSV path; standard output when omitted");

  auto* snap_cmd = app.add_subcommand("snapshot", "Run trial 0 of a config for some steps and save one learner");
  std::string snap_config;
  std::string snap_learner;
  std::size_t snap_steps = 0;
  std::string snap_out;
  snap_cmd->add_option("config", snap_config)->required();
  snap_cmd->add_option("--learner", snap_learner, "Learner name (first when omitted)");
  snap_cmd->add_option("--steps", snap_steps)->required();
  snap_cmd->add_option("--out", snap_out)->required();

  auto* restore_cmd = app.add_subcommand("restore", "Resume a saved learner on its stream");
  std::string state_path;
  std::optional<std::size_t> restore_steps;
  std::string restore_metrics;
  std::string restore_snapshot;
  restore_cmd->add_option("state", state_path)->required();
  restore_cmd->add_option("--steps", restore_steps, "Steps to continue (to the end when omitted)");
  restore_cmd->add_option("--metrics", restore_metrics, "CSV of the continued steps");
  restore_cmd->add_option("--snapshot-out", restore_snapshot, "Save the learner state afterwards");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) {
      ExperimentConfig cfg = load_experiment_config(config_path);
      cfg.stream.seed = seed_from_environment(cfg.stream.seed);
      if (!output_override.empty()) cfg.output = output_override;
      const ExperimentResult result = run_experiment(cfg);
      const Json summary = summary_json(cfg, result);
      if (!cfg.output.empty()) {
        std::ofstream csv(cfg.output + "_metrics.csv");
        if (!csv) throw ConfigError("cannot write " + cfg.output + "_metrics.csv");
        write_metrics_csv(csv, result, cfg.stride);
        write_file(cfg.output + "_summary.json", summary.dump(2) + "\n");
      }
      for (const auto& l : result.learners) {
        out << l.name << ": final normalized error " << l.final_norm_err();
        if (l.failed_trials > 0) out << " (" << l.failed_trials << " failed trials)";
        out << '\n';
        for (const auto& f : l.failures) err << "warning: " << l.name << ": " << f << '\n';
      }
      return kExitOk;
    }

    if (*verify_cmd) {
      vopt.mode = verify_mode_from_string(mode);
      const VerifyReport r = verify_equivalence(vopt);
      out << "mode " << mode << " depth " << vopt.depth << " steps " << r.steps << ": max gap " << r.max_gap;
      if (r.worst_step > 0) out << " at t = " << r.worst_step;
      out << (r.passed ? " (ok)\n" : " (FAILED)\n");
      if (!r.passed) {
        err << "verification failed: gap " << r.max_gap << " exceeds " << vopt.tolerance << '\n';
        return kExitVerify;
      }
      return kExitOk;
    }

    if (*gen_cmd) {
      StreamSpec spec;
      spec.kind = stream_kind_from_string(stream_kind);
      if (spec.kind == StreamKind::csv) throw ConfigError("gen: csv is not a synthetic stream");
      spec.n = gen_n;
      spec.seed = gen_seed ? *gen_seed : seed_from_environment(1);
      spec.noise_var = noise_var;
      spec.burn_in = burn_in;
      const std::vector<Sample> samples = generate(spec);
      if (gen_out.empty()) {
        write_stream_csv(out, samples);
      } else {
        std::ofstream f(gen_out);
        if (!f) throw ConfigError("cannot write " + gen_out);
        write_stream_csv(f, samples);
      }
      return kExitOk;
    }

    if (*snap_cmd) {
      ExperimentConfig cfg = load_experiment_config(snap_config);
      cfg.stream.seed = seed_from_environment(cfg.stream.seed);
      const LearnerSpec& spec = find_learner(cfg, snap_learner);
      const std::vector<Sample> samples = generate(cfg.stream);
      if (snap_steps > samples.size()) throw ConfigError("snapshot: --steps exceeds the stream length");
      auto learner = make_regressor(spec.params, static_cast<int>(samples.front().x_ext.size()) - 1);
      const Trace trace = continue_run(*learner, samples, 0, snap_steps, 0.0);
      const Json state{{"version", kConfigVersion},
                       {"stream", stream_spec_to_json(cfg.stream)},
                       {"position", snap_steps},
                       {"cum_e2", sum(trace.e2)},
                       {"learner", {{"name", spec.name}, {"state", learner->snapshot()}}}};
      write_file(snap_out, state.dump() + "\n");
      return kExitOk;
    }

    if (*restore_cmd) {
      const Json state = read_json(state_path);
      const StreamSpec stream = stream_spec_from_json(state.at("stream"));
      const std::size_t position = state.at("position").get<std::size_t>();
      const std::vector<Sample> samples = generate(stream);
      if (position > samples.size()) throw ConfigError("restore: position beyond the stream");
      auto learner = restore_regressor(state.at("learner").at("state"));
      const std::size_t end = restore_steps ? std::min(samples.size(), position + *restore_steps) : samples.size();
      const std::string name = state.at("learner").at("name").get<std::string>();
      const Trace trace = continue_run(*learner, samples, position, end, state.at("cum_e2").get<double>());
      if (!restore_metrics.empty()) {
        std::ofstream f(restore_metrics);
        if (!f) throw ConfigError("cannot write " + restore_metrics);
        write_trace(f, name, trace);
      }
      if (!restore_snapshot.empty()) {
        Json next = state;
        next["position"] = end;
        next["cum_e2"] = trace.cum_before + sum(trace.e2);
        next["learner"]["state"] = learner->snapshot();
        write_file(restore_snapshot, next.dump() + "\n");
      }
      out << name << ": resumed at t = " << position + 1 << ", ran " << trace.e2.size() << " steps\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace treereg::cli
