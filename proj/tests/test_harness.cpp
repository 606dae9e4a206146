#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "treereg/cli.hpp"
#include "treereg/dataset.hpp"
#include "treereg/harness.hpp"

using namespace treereg;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

/// Records the order of calls and what each call could see.
class Spy final : public SequentialRegressor {
 public:
  std::vector<std::string> events;
  std::vector<double> seen_desired;

  std::string kind() const override { return "spy"; }
  Json snapshot() const override { return Json{{"kind", "spy"}}; }

 protected:
  double do_predict(const Vector& x_ext) override {
    events.push_back("predict " + std::to_string(x_ext[0]));
    return 0.0;
  }
  void do_learn(const Vector& x_ext, double desired) override {
    events.push_back("learn " + std::to_string(x_ext[0]));
    seen_desired.push_back(desired);
  }
};

std::vector<Sample> ramp(std::size_t n) {
  std::vector<Sample> s;
  for (std::size_t t = 0; t < n; ++t) {
    const double x = static_cast<double>(t);
    s.push_back({Vector{{x, 1.0, 1.0}}, 10.0 * x});
  }
  return s;
}

Json config_json(const std::string& kind, std::size_t n, int trials, Json learners) {
  return Json{{"version", kConfigVersion},
              {"stream", {{"kind", kind}, {"n", n}, {"seed", 1}}},
              {"trials", trials},
              {"learners", std::move(learners)}};
}

Json lf(const std::string& name, double step) { return Json{{"name", name}, {"kind", "lf"}, {"step", step}}; }

std::string temp_path(const std::string& name) { return (fs::temp_directory_path() / ("treereg_" + name)).string(); }

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "treereg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("a learner sees x_t, commits, and only then sees d_t") {
  std::vector<std::unique_ptr<SequentialRegressor>> learners;
  learners.push_back(std::make_unique<Spy>());
  const auto samples = ramp(4);
  run_trial(samples, learners);
  const Spy& spy = static_cast<const Spy&>(*learners[0]);
  REQUIRE(spy.events.size() == 8);
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK(spy.events[2 * t] == "predict " + std::to_string(double(t)));
    CHECK(spy.events[2 * t + 1] == "learn " + std::to_string(double(t)));
    CHECK(spy.seen_desired[t] == samples[t].d);
  }
}

TEST_CASE("the interface rejects out-of-order calls") {
  Spy spy;
  CHECK_THROWS_AS(spy.learn(1.0), std::logic_error);
  spy.predict(Vector::Ones(3));
  CHECK(spy.pending());
  CHECK_THROWS_AS(spy.predict(Vector::Ones(3)), std::logic_error);
  CHECK(spy.learn(2.5) == 2.5);
  CHECK_FALSE(spy.pending());
}

TEST_CASE("LF on a noiseless linear stream drives the normalized error to zero") {
  std::vector<Sample> s;
  for (int t = 0; t < 100000; ++t) {
    const double a = std::sin(0.37 * t), b = std::cos(1.3 * t);
    s.push_back({Vector{{a, b, 1.0}}, 2.0 * a - b + 0.5});
  }
  std::vector<std::unique_ptr<SequentialRegressor>> learners;
  learners.push_back(make_regressor(Json{{"kind", "lf"}, {"step", 0.05}}, 2));
  const auto m = aggregate("LF", "lf", run_trial(s, learners));
  CHECK(m.norm_err.back() < 1e-3);
  CHECK(m.e2.back() < 1e-20);
}

TEST_CASE("averaging identical trials is the identity") {
  TrialMetrics t;
  t.e2 = {4.0, 1.0, 0.25, 9.0};
  t.regressor_evaluations = 12.0;
  const LearnerMetrics one = aggregate("x", "lf", {t});
  const LearnerMetrics three = aggregate("x", "lf", {t, t, t});
  CHECK(one.e2 == three.e2);
  CHECK(one.cum_e2 == three.cum_e2);
  CHECK(one.norm_err == three.norm_err);
  CHECK(three.cum_e2 == std::vector<double>{4.0, 5.0, 5.25, 14.25});
  CHECK(three.norm_err.back() == Approx(14.25 / 4.0));
  CHECK(three.mean_regressor_evaluations == 3.0);
}

TEST_CASE("failed trials are excluded from the mean") {
  TrialMetrics good, bad;
  good.e2 = {1.0, 1.0};
  bad.failed = true;
  bad.failure = "lf: non-finite error at t = 2";
  const LearnerMetrics m = aggregate("x", "lf", {good, bad});
  CHECK(m.failed_trials == 1);
  CHECK(m.e2 == good.e2);
  REQUIRE(m.failures.size() == 1);
}

TEST_CASE("a diverging learner is dropped, the others finish") {
  const ExperimentConfig cfg =
      experiment_config_from_json(config_json("matched", 2000, 1, Json::array({lf("ok", 0.005), lf("wild", 50.0)})));
  const ExperimentResult r = run_experiment(cfg);
  CHECK(r.at("ok").failed_trials == 0);
  CHECK(r.at("ok").e2.size() == 2000);
  CHECK(r.at("wild").failed_trials == 1);
  CHECK(std::isnan(r.at("wild").final_norm_err()));
  CHECK_THROWS_AS(r.at("missing"), std::out_of_range);
}

TEST_CASE("trial k uses seed base + k") {
  const ExperimentResult two =
      run_experiment(experiment_config_from_json(config_json("matched", 500, 2, Json::array({lf("LF", 0.01)}))));
  Json j = config_json("matched", 500, 1, Json::array({lf("LF", 0.01)}));
  const ExperimentResult a = run_experiment(experiment_config_from_json(j));
  j["stream"]["seed"] = 2;
  const ExperimentResult b = run_experiment(experiment_config_from_json(j));
  for (std::size_t t = 0; t < 500; ++t) {
    CHECK(two.at("LF").e2[t] == Approx((a.at("LF").e2[t] + b.at("LF").e2[t]) / 2.0).epsilon(1e-14));
  }
}

TEST_CASE("parallel and serial trials agree bit for bit") {
  Json j = config_json("mismatched", 1000, 4, Json::array({lf("LF", 0.01)}));
  const ExperimentResult serial = run_experiment(experiment_config_from_json(j));
  j["parallel"] = true;
  const ExperimentResult parallel = run_experiment(experiment_config_from_json(j));
  CHECK(serial.at("LF").e2 == parallel.at("LF").e2);
}

TEST_CASE("a normalized learner reports errors in original units") {
  Json learner{{"name", "VF"}, {"kind", "vf"}, {"order", 2}, {"step", 0.05}, {"normalize", true}};
  const ExperimentResult r =
      run_experiment(experiment_config_from_json(config_json("matched", 300, 1, Json::array({learner}))));

  StreamSpec spec;
  spec.kind = StreamKind::matched;
  spec.n = 300;
  spec.seed = 1;
  std::vector<Sample> s = generate(spec);
  const Normalization scale = normalize_stream(s);
  learner.erase("name");
  std::vector<std::unique_ptr<SequentialRegressor>> manual;
  manual.push_back(make_regressor(learner, 2));
  const auto expected = run_trial(s, manual, scale.target.error_scale());
  CHECK(r.at("VF").e2 == expected[0].e2);
}

TEST_CASE("config validation") {
  const Json good = config_json("matched", 10, 1, Json::array({lf("LF", 0.01)}));
  CHECK_NOTHROW(experiment_config_from_json(good));

  Json j = good;
  j["version"] = 99;
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigError);
  j = good;
  j.erase("trials");
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigError);
  j = good;
  j["learners"] = Json::array({lf("A", 0.1), lf("A", 0.2)});
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigError);
  j = good;
  j["learners"] = Json::array();
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigError);

  const ExperimentConfig back = experiment_config_from_json(experiment_config_to_json(experiment_config_from_json(good)));
  CHECK(back.learners.size() == 1);
  CHECK(back.learners[0].name == "LF");
  CHECK_THROWS_AS(load_experiment_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("learner factory requires every hyperparameter") {
  CHECK_THROWS_AS(make_regressor(Json{{"kind", "lf"}}, 2), ConfigError);
  CHECK_THROWS_AS(make_regressor(Json{{"kind", "dft"}, {"depth", 2}, {"step", 0.01}}, 2), ConfigError);
  CHECK_THROWS_AS(make_regressor(Json{{"kind", "dat"}, {"depth", 2}, {"step", 0.01}, {"directions", "axis"}}, 2),
                  ConfigError);
  CHECK_THROWS_AS(make_regressor(Json{{"kind", "vf"}, {"order", 5}, {"step", 0.01}}, 2), ConfigError);
  CHECK_THROWS_AS(make_regressor(Json{{"kind", "ctw"}}, 2), ConfigError);
  CHECK_NOTHROW(make_regressor(Json{{"kind", "dft"}, {"depth", 2}, {"step", 0.01}, {"directions", "axis"}}, 2));
}

TEST_CASE("every learner kind resumes from its snapshot") {
  const std::vector<Json> specs{
      {{"kind", "dft"}, {"depth", 2}, {"step", 0.01}, {"directions", "axis"}},
      {{"kind", "dat"}, {"depth", 2}, {"step", 0.01}, {"s_plus", 0.05}, {"directions", "axis"}},
      {{"kind", "direct"}, {"depth", 2}, {"mode", "soft"}, {"s_plus", 0.05}, {"step", 0.01}, {"directions", "axis"}},
      {{"kind", "lf"}, {"step", 0.01}},
      {{"kind", "vf"}, {"order", 2}, {"step", 0.01}},
      {{"kind", "gkr"}, {"step", 0.5}, {"centers", Json::array({{{"mean", {1.0, 1.0}}, {"covariance", 1.2}}})}},
  };
  StreamSpec spec;
  spec.kind = StreamKind::mismatched;
  spec.n = 400;
  const auto s = generate(spec);
  for (const Json& j : specs) {
    auto a = make_regressor(j, 2);
    for (std::size_t t = 0; t < 200; ++t) {
      a->predict(s[t].x_ext);
      a->learn(s[t].d);
    }
    auto b = restore_regressor(Json::parse(a->snapshot().dump()));
    CHECK(b->kind() == a->kind());
    for (std::size_t t = 200; t < 400; ++t) {
      CHECK(a->predict(s[t].x_ext) == b->predict(s[t].x_ext));
      CHECK(a->learn(s[t].d) == b->learn(s[t].d));
    }
  }
}

TEST_CASE("metrics CSV and summary") {
  const ExperimentConfig cfg =
      experiment_config_from_json(config_json("matched", 250, 1, Json::array({lf("A", 0.01), lf("B", 0.02)})));
  const ExperimentResult r = run_experiment(cfg);
  std::ostringstream out;
  write_metrics_csv(out, r, 100);
  std::istringstream in(out.str());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  REQUIRE(lines.size() == 1 + 2 * 3);
  CHECK(lines[0] == "t,learner,e2,cum_e2,norm_err");
  CHECK(lines[1].rfind("100,A,", 0) == 0);
  CHECK(lines[3].rfind("250,A,", 0) == 0);
  CHECK(lines[6].rfind("250,B,", 0) == 0);

  const Json summary = summary_json(cfg, r);
  CHECK(summary.at("n") == 250);
  CHECK(summary.at("learners").at("A").at("final_norm_err").get<double>() == r.at("A").final_norm_err());
  CHECK(summary.at("config").at("learners").size() == 2);

  for (const auto& l : r.learners) {
    for (std::size_t t = 1; t < l.cum_e2.size(); ++t) CHECK(l.cum_e2[t] >= l.cum_e2[t - 1]);
    for (double v : l.norm_err) CHECK(v >= 0.0);
  }
}

TEST_CASE("seed override from the environment") {
  ::unsetenv("TREEREG_SEED");
  CHECK(seed_from_environment(7) == 7);
  ::setenv("TREEREG_SEED", "123", 1);
  CHECK(seed_from_environment(7) == 123);
  ::setenv("TREEREG_SEED", "12x", 1);
  CHECK_THROWS_AS(seed_from_environment(7), ConfigError);
  ::unsetenv("TREEREG_SEED");
}

TEST_CASE("cli exit codes") {
  std::string out, err;
  CHECK(run_cli({"run", "/nonexistent/config.json"}, &out, &err) == cli::kExitConfig);
  CHECK(err.find("error") != std::string::npos);

  CHECK(run_cli({"verify", "--depth", "2", "--steps", "1000", "--mode", "dft"}, &out) == cli::kExitOk);
  CHECK(out.find("max gap") != std::string::npos);
  CHECK(run_cli({"verify", "--depth", "2", "--steps", "200", "--mode", "dat", "--tolerance", "-1"}, &out, &err) ==
        cli::kExitVerify);
  CHECK(run_cli({"verify", "--depth", "2", "--steps", "10", "--mode", "ctw"}) == cli::kExitConfig);
  CHECK(run_cli({}) == cli::kExitConfig);
}

TEST_CASE("cli gen henon") {
  std::string out;
  REQUIRE(run_cli({"gen", "henon", "--n", "1000"}, &out) == cli::kExitOk);
  std::istringstream in(out);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  REQUIRE(lines.size() == 1001);
  CHECK(lines[0] == "x1,x2,d");
  CHECK(lines[1] == "0,0,1");
  CHECK(std::stod(lines[3].substr(lines[3].rfind(',') + 1)) == Approx(1.076).epsilon(1e-15));
  CHECK(run_cli({"gen", "csv"}) == cli::kExitConfig);
}

TEST_CASE("cli run, snapshot and restore") {
  const std::string config = temp_path("cli_config.json");
  Json j = config_json("mismatched", 300, 1,
                       Json::array({Json{{"name", "DAT"}, {"kind", "dat"}, {"depth", 2}, {"step", 0.01}, {"s_plus", 0.05},
                                         {"directions", "axis"}}}));
  std::ofstream(config) << j.dump();

  const std::string prefix = temp_path("cli_run");
  CHECK(run_cli({"run", config, "--output", prefix}) == cli::kExitOk);
  CHECK(fs::exists(prefix + "_metrics.csv"));
  CHECK(fs::exists(prefix + "_summary.json"));

  const std::string s50 = temp_path("s50.json"), s100 = temp_path("s100.json"), resumed = temp_path("r100.json");
  REQUIRE(run_cli({"snapshot", config, "--steps", "50", "--out", s50}) == cli::kExitOk);
  REQUIRE(run_cli({"snapshot", config, "--steps", "100", "--out", s100}) == cli::kExitOk);
  REQUIRE(run_cli({"restore", s50, "--steps", "50", "--snapshot-out", resumed}) == cli::kExitOk);
  Json direct, via_restore;
  std::ifstream(s100) >> direct;
  std::ifstream(resumed) >> via_restore;
  CHECK(direct.at("learner") == via_restore.at("learner"));
  CHECK(direct.at("position") == via_restore.at("position"));
  // Summed in two pieces, so only equal up to rounding.
  CHECK(direct.at("cum_e2").get<double>() == Approx(via_restore.at("cum_e2").get<double>()).epsilon(1e-12));
  CHECK(run_cli({"snapshot", config, "--steps", "100000", "--out", s50}) == cli::kExitConfig);
}
