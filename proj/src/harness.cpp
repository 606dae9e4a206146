#include "treereg/harness.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <ostream>

#include "treereg/dataset.hpp"

namespace treereg {

ExperimentConfig experiment_config_from_json(const Json& j) {
  try {
    ExperimentConfig cfg;
    cfg.version = j.at("version").get<int>();
    if (cfg.version != kConfigVersion) throw ConfigError("unsupported config version " + std::to_string(cfg.version));
    cfg.stream = stream_spec_from_json(j.at("stream"));
    cfg.trials = j.at("trials").get<int>();
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    cfg.output = j.value("output", std::string{});
    cfg.stride = j.value("stride", std::size_t{1});
    if (cfg.stride < 1) throw ConfigError("stride must be >= 1");
    cfg.parallel = j.value("parallel", false);
    cfg.scale_back = j.value("scale_back", true);
    const Json& learners = j.at("learners");
    if (!learners.is_array() || learners.empty()) throw ConfigError("learners must be a non-empty array");
    for (const Json& l : learners) {
      LearnerSpec spec{l.at("name").get<std::string>(), l};
      spec.params.erase("name");
      for (const auto& other : cfg.learners) {
        if (other.name == spec.name) throw ConfigError("duplicate learner name: " + spec.name);
      }
      cfg.learners.push_back(std::move(spec));
    }
    return cfg;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

Json experiment_config_to_json(const ExperimentConfig& cfg) {
  Json learners = Json::array();
  for (const auto& l : cfg.learners) {
    Json entry = l.params;
    entry["name"] = l.name;
    learners.push_back(std::move(entry));
  }
  return Json{{"version", cfg.version},   {"stream", stream_spec_to_json(cfg.stream)},
              {"trials", cfg.trials},     {"output", cfg.output},
              {"stride", cfg.stride},     {"parallel", cfg.parallel},
              {"scale_back", cfg.scale_back}, {"learners", std::move(learners)}};
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return experiment_config_from_json(j);
}

std::uint64_t seed_from_environment(std::uint64_t fallback) {
  const char* raw = std::getenv("TREEREG_SEED");
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (*end != '\0') throw ConfigError(std::string("TREEREG_SEED is not an unsigned integer: ") + raw);
  return v;
}

namespace {

/// One learner's view of the stream: raw or normalized samples, and the
/// factor taking its errors back to the reported units.
struct Feed {
  const std::vector<Sample>* samples;
  double error_scale;
};

std::vector<TrialMetrics> run_feeds(const std::vector<Feed>& feeds,
                                    std::vector<std::unique_ptr<SequentialRegressor>>& learners) {
  const std::size_t n = feeds.empty() ? 0 : feeds.front().samples->size();
  std::vector<TrialMetrics> out(learners.size());
  for (auto& m : out) m.e2.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < learners.size(); ++k) {
      TrialMetrics& m = out[k];
      if (m.failed) continue;
      const Sample& s = (*feeds[k].samples)[t];
      learners[k]->predict(s.x_ext);
      const double e = learners[k]->learn(s.d) * feeds[k].error_scale;
      if (!std::isfinite(e)) {
        m.failed = true;
        m.failure = learners[k]->kind() + ": non-finite error at t = " + std::to_string(t + 1);
        continue;
      }
      m.e2.push_back(e * e);
      const WorkCounters w = learners[k]->last_work();
      m.regressor_evaluations += static_cast<double>(w.regressor_evaluations);
      m.kappa_accumulations += static_cast<double>(w.kappa_accumulations);
    }
  }
  for (std::size_t k = 0; k < learners.size(); ++k) {
    if (!out[k].failed) out[k].final_snapshot = learners[k]->snapshot();
  }
  return out;
}

}  // namespace

std::vector<TrialMetrics> run_trial(const std::vector<Sample>& samples,
                                    std::vector<std::unique_ptr<SequentialRegressor>>& learners,
                                    double error_scale) {
  return run_feeds(std::vector<Feed>(learners.size(), Feed{&samples, error_scale}), learners);
}

LearnerMetrics aggregate(const std::string& name, const std::string& kind, const std::vector<TrialMetrics>& trials) {
  LearnerMetrics m;
  m.name = name;
  m.kind = kind;
  std::size_t ok = 0;
  for (const TrialMetrics& t : trials) {
    m.final_snapshots.push_back(t.final_snapshot);
    if (t.failed) {
      ++m.failed_trials;
      m.failures.push_back(t.failure);
      continue;
    }
    if (m.e2.empty()) m.e2.assign(t.e2.size(), 0.0);
    for (std::size_t i = 0; i < t.e2.size(); ++i) m.e2[i] += t.e2[i];
    m.mean_regressor_evaluations += t.regressor_evaluations / static_cast<double>(t.e2.size());
    m.mean_kappa_accumulations += t.kappa_accumulations / static_cast<double>(t.e2.size());
    ++ok;
  }
  if (ok == 0) return m;
  const double inv = 1.0 / static_cast<double>(ok);
  for (double& v : m.e2) v *= inv;
  m.mean_regressor_evaluations *= inv;
  m.mean_kappa_accumulations *= inv;
  m.cum_e2.resize(m.e2.size());
  m.norm_err.resize(m.e2.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < m.e2.size(); ++i) {
    cum += m.e2[i];
    m.cum_e2[i] = cum;
    m.norm_err[i] = cum / static_cast<double>(i + 1);
  }
  return m;
}

const LearnerMetrics& ExperimentResult::at(const std::string& name) const {
  for (const auto& l : learners) {
    if (l.name == name) return l;
  }
  throw std::out_of_range("no learner named " + name);
}

namespace {

std::vector<TrialMetrics> run_one(const ExperimentConfig& cfg, int trial) {
  StreamSpec spec = cfg.stream;
  spec.seed = cfg.stream.seed + static_cast<std::uint64_t>(trial);
  double error_scale = 1.0;
  std::vector<Sample> samples;
  if (spec.kind == StreamKind::csv) {
    Dataset data = load_csv_dataset(spec.csv_path, spec.target_column);
    samples = std::move(data.samples);
    if (samples.size() > spec.n) samples.resize(spec.n);
    if (cfg.scale_back) error_scale = data.scale.target.error_scale();
  } else {
    const bool normalize = spec.normalize;
    spec.normalize = false;
    samples = generate(spec);
    if (normalize) {
      const Normalization scale = normalize_stream(samples);
      if (cfg.scale_back) error_scale = scale.target.error_scale();
    }
  }

  // Learners with "normalize": true see a [-1, 1] copy of the stream; their
  // errors are scaled back by the target's range.
  std::vector<Sample> normalized;
  double normalized_scale = error_scale;
  for (const auto& l : cfg.learners) {
    if (l.params.value("normalize", false) && normalized.empty()) {
      normalized = samples;
      normalized_scale = error_scale * normalize_stream(normalized).target.error_scale();
    }
  }

  const int input_dim = static_cast<int>(samples.front().x_ext.size()) - 1;
  std::vector<std::unique_ptr<SequentialRegressor>> learners;
  std::vector<Feed> feeds;
  for (const auto& l : cfg.learners) {
    learners.push_back(make_regressor(l.params, input_dim));
    feeds.push_back(l.params.value("normalize", false) ? Feed{&normalized, normalized_scale}
                                                       : Feed{&samples, error_scale});
  }
  return run_feeds(feeds, learners);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  // Fail on bad learner configs before any trial starts.
  for (const auto& l : cfg.learners) {
    if (!l.params.contains("kind")) throw ConfigError("learner '" + l.name + "' has no kind");
  }
  std::vector<std::vector<TrialMetrics>> per_trial(static_cast<std::size_t>(cfg.trials));
  if (cfg.parallel && cfg.trials > 1) {
    std::vector<std::future<std::vector<TrialMetrics>>> jobs;
    for (int k = 0; k < cfg.trials; ++k) jobs.push_back(std::async(std::launch::async, run_one, std::cref(cfg), k));
    for (int k = 0; k < cfg.trials; ++k) per_trial[static_cast<std::size_t>(k)] = jobs[static_cast<std::size_t>(k)].get();
  } else {
    for (int k = 0; k < cfg.trials; ++k) per_trial[static_cast<std::size_t>(k)] = run_one(cfg, k);
  }

  ExperimentResult result;
  result.trials = cfg.trials;
  for (std::size_t i = 0; i < cfg.learners.size(); ++i) {
    std::vector<TrialMetrics> trials;
    for (auto& t : per_trial) trials.push_back(std::move(t[i]));
    result.learners.push_back(aggregate(cfg.learners[i].name, cfg.learners[i].params.at("kind").get<std::string>(), trials));
    result.n = std::max(result.n, result.learners.back().e2.size());
  }
  return result;
}

void write_metrics_csv(std::ostream& out, const ExperimentResult& result, std::size_t stride) {
  if (stride == 0) stride = 1;
  out << "t,learner,e2,cum_e2,norm_err\n";
  out.precision(17);
  for (const auto& l : result.learners) {
    const std::size_t n = l.e2.size();
    for (std::size_t i = 0; i < n; ++i) {
      if ((i + 1) % stride != 0 && i + 1 != n) continue;
      out << (i + 1) << ',' << l.name << ',' << l.e2[i] << ',' << l.cum_e2[i] << ',' << l.norm_err[i] << '\n';
    }
  }
}

Json summary_json(const ExperimentConfig& cfg, const ExperimentResult& result) {
  Json learners = Json::object();
  for (const auto& l : result.learners) {
    Json entry{{"kind", l.kind},
               {"failed_trials", l.failed_trials},
               {"failures", l.failures},
               {"mean_regressor_evaluations_per_step", l.mean_regressor_evaluations},
               {"mean_kappa_accumulations_per_step", l.mean_kappa_accumulations}};
    if (!l.norm_err.empty()) {
      entry["final_norm_err"] = l.norm_err.back();
      entry["final_cum_e2"] = l.cum_e2.back();
    } else {
      entry["final_norm_err"] = nullptr;
      entry["final_cum_e2"] = nullptr;
    }
    learners[l.name] = std::move(entry);
  }
  return Json{{"n", result.n}, {"trials", result.trials}, {"learners", std::move(learners)},
              {"config", experiment_config_to_json(cfg)}};
}

}  // namespace treereg
