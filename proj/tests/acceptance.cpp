// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "treereg/combinatorics.hpp"
#include "treereg/dat.hpp"
#include "treereg/datagen.hpp"
#include "treereg/dft.hpp"
#include "treereg/direct_mixture.hpp"
#include "treereg/harness.hpp"
#include "treereg/regressor.hpp"
#include "treereg/rng.hpp"
#include "treereg/verify.hpp"

using namespace treereg;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome combinatorics_vs_enumeration() {
  std::size_t checks = 0;
  for (int d = 1; d <= 3; ++d) {
    const std::vector<Partition> parts = enumerate_partitions(d);
    if (parts.size() != beta(d)) return {false, fmt("d=%d: %zu partitions, beta=%llu", d, parts.size(), (unsigned long long)beta(d))};
    const std::vector<NodeLabel> nodes = TreeShape(d).nodes();
    for (NodeLabel p : nodes) {
      Count member = 0;
      for (const auto& m : parts) member += m.contains(p) ? 1 : 0;
      if (member != gamma(d, p.length())) return {false, fmt("d=%d gamma mismatch at %s", d, p.to_string().c_str())};
      for (NodeLabel q : nodes) {
        Count both = 0;
        for (const auto& m : parts) both += (m.contains(p) && m.contains(q)) ? 1 : 0;
        if (both != rho(p, q, d)) {
          return {false, fmt("d=%d rho(%s,%s)=%llu, enumeration %llu", d, p.to_string().c_str(), q.to_string().c_str(),
                             (unsigned long long)rho(p, q, d), (unsigned long long)both)};
        }
        ++checks;
      }
    }
  }
  return {true, fmt("beta = 2, 5, 26; %zu rho pairs and all gamma exact", checks)};
}

// ---------------------------------------------------------------- 2, 3

Outcome exactness(VerifyMode mode, std::initializer_list<int> depths) {
  double worst = 0.0;
  std::string parts;
  for (int d : depths) {
    VerifyOptions o;
    o.mode = mode;
    o.depth = d;
    o.steps = 1000;
    o.mu = 0.01;
    o.s_plus = 0.01;
    o.seed = 11 + static_cast<std::uint64_t>(d);
    const VerifyReport r = verify_equivalence(o);
    worst = std::max(worst, r.max_gap);
    parts += fmt(" d=%d:%.2e", d, r.max_gap);
    if (!r.passed) return {false, fmt("max relative gap %.3e at t=%zu (d=%d)", r.max_gap, r.worst_step, d)};
  }
  return {worst <= 1e-9, "max relative gap" + parts};
}

// ---------------------------------------------------------------- 4

Vector random_vector(SplitMix64& rng, Eigen::Index n, double scale) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

Outcome boundary_gradient() {
  SplitMix64 rng(404);
  const double h = 1e-6;
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const int d = 1 + c % 2;
    DatConfig cfg;
    cfg.depth = d;
    cfg.input_dim = 2;
    cfg.s_plus = 0.01;
    cfg.cap_enabled = false;
    cfg.gradient = GradientForm::exact;
    DatLearner dat(cfg);
    const TreeShape shape(d);
    for (NodeLabel p : shape.nodes()) {
      dat.set_weight(p, rng.normal());
      dat.set_regressor(p, random_vector(rng, 3, 1.0));
      if (!shape.is_leaf(p)) dat.set_direction(p, random_vector(rng, 3, 1.0));
    }
    Vector xe(3);
    xe << rng.normal(), rng.normal(), 1.0;
    const double desired = rng.normal();

    const DatPrediction pred = dat.predict(xe);
    const std::vector<Vector> grads = dat.boundary_loss_gradients(xe, desired - pred.y_hat, pred);
    for (std::size_t k = 0; k < shape.internal_count(); ++k) {
      const NodeLabel p = NodeLabel::from_index(k);
      const Vector theta = dat.node(p).sep->theta;
      for (Eigen::Index i = 0; i < theta.size(); ++i) {
        Vector tp = theta, tm = theta;
        tp[i] += h;
        tm[i] -= h;
        dat.set_direction(p, tp);
        const double ep = desired - dat.predict(xe).y_hat;
        dat.set_direction(p, tm);
        const double em = desired - dat.predict(xe).y_hat;
        dat.set_direction(p, theta);
        const double fd = (ep * ep - em * em) / (2.0 * h);
        const double g = grads[k][i];
        const double rel = std::abs(g - fd) / std::max({std::abs(fd), std::abs(g), 1e-4});
        worst = std::max(worst, rel);
      }
    }
  }
  return {worst <= 1e-5, fmt("worst relative error %.3e over 100 configurations", worst)};
}

// ---------------------------------------------------------------- 5

struct RegretTrace {
  std::vector<double> ratio;  // R_n / (1 + ln n) at each checkpoint
};

RegretTrace regret_run(std::uint64_t seed, const std::vector<std::size_t>& checkpoints) {
  const std::size_t warmup = 20000;
  const std::size_t horizon = checkpoints.back();
  const std::vector<Sample> stream = gen_matched(warmup + horizon, seed);

  // Warm-up with a constant step learns the node regressors.
  DftConfig warm_cfg;
  warm_cfg.depth = 2;
  warm_cfg.input_dim = 2;
  warm_cfg.step = StepSchedule::constant(0.005);
  DftLearner warm(warm_cfg);
  for (std::size_t t = 0; t < warmup; ++t) warm.step(stream[t].x_ext, stream[t].d);

  // Frozen regressors: model-space features f_t through the direct mixture.
  DirectConfig dc;
  dc.depth = 2;
  dc.input_dim = 2;
  dc.mode = SeparatorMode::hard;
  DirectLearner features_of(dc);
  for (NodeLabel p : TreeShape(2).nodes()) features_of.set_regressor(p, warm.node(p).reg.v);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(5, 5);
  double peak = 0.0;
  for (std::size_t t = 0; t < warmup; ++t) {
    const Vector f = features_of.predict(stream[t].x_ext).model_estimates;
    second += f * f.transpose();
    peak = std::max(peak, f.squaredNorm());
  }
  second /= static_cast<double>(warmup);
  // With hard splits some model features coincide on every region, so the
  // second moment is singular; the curvature that matters is the smallest
  // eigenvalue on its range.
  const Vector eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(second).eigenvalues();
  double lambda = eig.maxCoeff();
  for (double v : eig) {
    if (v > 1e-9 * eig.maxCoeff()) lambda = std::min(lambda, v);
  }
  // The offset keeps the first steps inside the LMS stability range
  // mu ||f||^2 < 2 for every feature vector seen during warm-up.
  const double offset = std::ceil(2.0 * peak / lambda);

  DftConfig cfg = warm_cfg;
  cfg.step = StepSchedule::inverse_time(lambda, offset);
  cfg.regressor_step = StepSchedule::constant(0.0);
  DftLearner learner(cfg);
  for (NodeLabel p : TreeShape(2).nodes()) learner.set_regressor(p, warm.node(p).reg.v);

  std::vector<Vector> feats;
  std::vector<double> desired;
  feats.reserve(horizon);
  desired.reserve(horizon);
  double loss = 0.0;
  RegretTrace out;
  std::size_t next = 0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const Sample& s = stream[warmup + t];
    feats.push_back(features_of.predict(s.x_ext).model_estimates);
    desired.push_back(s.d);
    const double e = learner.step(s.x_ext, s.d).error;
    loss += e * e;
    if (t + 1 == checkpoints[next]) {
      const Vector best = batch_best_weights(feats, desired);
      const double regret = loss - cumulative_loss(feats, desired, best);
      out.ratio.push_back(regret / (1.0 + std::log(static_cast<double>(t + 1))));
      ++next;
    }
  }
  return out;
}

Outcome empirical_regret() {
  const std::vector<std::size_t> grid{1000, 10000, 100000};
  std::vector<double> mean(grid.size(), 0.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const RegretTrace r = regret_run(seed, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) mean[i] += r.ratio[i] / 5.0;
  }
  bool pass = true;
  for (std::size_t i = 1; i < grid.size(); ++i) pass = pass && mean[i] <= 2.0 * mean[i - 1];
  return {pass, fmt("R_n/(1+ln n) = %.4g, %.4g, %.4g at n = 1e3, 1e4, 1e5", mean[0], mean[1], mean[2])};
}

// ---------------------------------------------------------------- experiments

Json gkr_learner(const char* name, const std::vector<std::array<double, 2>>& means, double step) {
  Json centers = Json::array();
  for (const auto& m : means) centers.push_back({{"mean", {m[0], m[1]}}, {"covariance", 1.2}});
  return {{"name", name}, {"kind", "gkr"}, {"step", step}, {"centers", centers}};
}

ExperimentConfig experiment(const std::string& kind, std::size_t n, int trials, Json learners, std::size_t burn_in = 0,
                            bool normalize = false) {
  Json j{{"version", kConfigVersion},
         {"stream",
          {{"kind", kind}, {"n", n}, {"seed", 1}, {"noise_var", 0.1}, {"burn_in", burn_in}, {"normalize", normalize}}},
         {"trials", trials},
         {"parallel", true},
         {"learners", std::move(learners)}};
  return experiment_config_from_json(j);
}

Json dft_learner(int depth, double step) {
  return {{"name", "DFT"}, {"kind", "dft"}, {"depth", depth}, {"step", step}, {"directions", "axis"}};
}
Json dat_learner(int depth, double step) {
  return {{"name", "DAT"}, {"kind", "dat"}, {"depth", depth}, {"step", step}, {"s_plus", 0.01}, {"directions", "axis"}};
}

// ---------------------------------------------------------------- 6, 12

ExperimentResult& matched_run() {
  static ExperimentResult result = run_experiment(experiment("matched", 20000, 10, Json::array({dft_learner(2, 0.005)})));
  return result;
}

Outcome noise_floor() {
  const double e = matched_run().at("DFT").final_norm_err();
  return {e >= 0.10 && e <= 0.13, fmt("DFT final normalized error %.4f (band [0.10, 0.13])", e)};
}

Outcome no_simplex() {
  const std::vector<Partition> parts = enumerate_partitions(2);
  int off_one = 0;
  int with_negative = 0;
  std::string sums;
  for (const Json& snap : matched_run().at("DFT").final_snapshots) {
    std::vector<double> w(TreeShape(2).node_count());
    for (const Json& n : snap.at("nodes")) w[NodeLabel::parse(n.at("label").get<std::string>()).index()] = n.at("w").get<double>();
    const Vector mw = model_weights_from_nodes(parts, w);
    if (std::abs(mw.sum() - 1.0) > 0.1) ++off_one;
    if (mw.minCoeff() < 0.0) ++with_negative;
    sums += fmt(" %.2f", mw.sum());
  }
  return {off_one >= 8 && with_negative >= 1,
          fmt("|sum-1|>0.1 in %d/10, negative weight in %d/10; sums", off_one, with_negative) + sums};
}

// ---------------------------------------------------------------- 7

Outcome adaptation_ordering() {
  const ExperimentConfig cfg = experiment(
      "mismatched", 50000, 10,
      Json::array({dat_learner(2, 0.005), dft_learner(2, 0.005), {{"name", "LF"}, {"kind", "lf"}, {"step", 0.005}}}));
  const ExperimentResult r = run_experiment(cfg);
  const double dat = r.at("DAT").final_norm_err();
  const double dft = r.at("DFT").final_norm_err();
  const double lf = r.at("LF").final_norm_err();
  Eigen::Vector2d p0(4.0, -1.0);
  p0.normalize();
  auto alignment = [&](int node) {
    double sum = 0.0, low = 1.0;
    for (const Json& snap : r.at("DAT").final_snapshots) {
      const Vector theta = vector_from_json(snap.at("nodes").at(node).at("theta"));
      const double c = std::abs(theta.head(2).normalized().dot(p0));
      sum += c;
      low = std::min(low, c);
    }
    return std::pair{sum / static_cast<double>(r.trials), low};
  };
  // Only the root is gated; the depth-1 nodes are reported for context.
  const auto [root_mean, root_min] = alignment(0);
  const double left = alignment(1).first;
  const double right = alignment(2).first;
  return {dat < dft && dat < lf && root_mean >= 0.9,
          fmt("DAT %.4f, DFT %.4f, LF %.4f; |cos| to p0 root mean %.3f (min %.3f), nodes 0/1 mean %.3f/%.3f", dat, dft,
              lf, root_mean, root_min, left, right)};
}

// ---------------------------------------------------------------- 8

Outcome fitting_robustness() {
  std::string detail;
  bool pass = true;
  for (const char* kind : {"first_order", "third_order"}) {
    const ExperimentResult r =
        run_experiment(experiment(kind, 50000, 10, Json::array({dat_learner(2, 0.005), dft_learner(2, 0.005)})));
    const double dat = r.at("DAT").final_norm_err();
    const double dft = r.at("DFT").final_norm_err();
    pass = pass && dat <= dft;
    detail += fmt("%s: DAT %.4f vs DFT %.4f; ", kind, dat, dft);
  }
  return {pass, detail};
}

// ---------------------------------------------------------------- 9

Outcome henon_parity() {
  const ExperimentResult r = run_experiment(experiment(
      "henon", 100000, 1,
      Json::array({dat_learner(2, 0.05), {{"name", "VF"}, {"kind", "vf"}, {"order", 2}, {"step", 0.05}}}), 100, true));
  const double dat = r.at("DAT").final_norm_err();
  const double vf = r.at("VF").final_norm_err();
  return {dat <= 1.2 * vf, fmt("DAT %.4g vs VF %.4g (ratio %.3f)", dat, vf, dat / vf)};
}

// ---------------------------------------------------------------- 10

Outcome complexity_counters() {
  std::string detail;
  for (int d = 1; d <= 3; ++d) {
    const std::vector<Sample> s = gen_matched(300, 7);
    DftConfig fc;
    fc.depth = d;
    fc.input_dim = 2;
    DftLearner dft(fc);
    DatConfig ac;
    ac.depth = d;
    ac.input_dim = 2;
    DatLearner dat(ac);
    const std::size_t nodes = (std::size_t{2} << d) - 1;
    std::size_t max_kappa = 0;
    for (const Sample& x : s) {
      dft.step(x.x_ext, x.d);
      dat.step(x.x_ext, x.d);
      if (dft.last_work().regressor_evaluations != static_cast<std::size_t>(d + 1)) {
        return {false, fmt("d=%d: DFT evaluated %zu regressors", d, dft.last_work().regressor_evaluations)};
      }
      if (dat.last_work().regressor_evaluations != nodes) {
        return {false, fmt("d=%d: DAT evaluated %zu regressors", d, dat.last_work().regressor_evaluations)};
      }
      if (dat.last_work().kappa_accumulations > nodes * nodes) {
        return {false, fmt("d=%d: DAT %zu kappa accumulations", d, dat.last_work().kappa_accumulations)};
      }
      max_kappa = std::max(max_kappa, dat.last_work().kappa_accumulations);
    }
    detail += fmt("d=%d: DFT %d, DAT %zu evals, DAT kappa <= %zu (bound %zu); ", d, d + 1, nodes, max_kappa, nodes * nodes);
  }
  return {true, detail};
}

// ---------------------------------------------------------------- 11

Outcome determinism_and_serialization() {
  const ExperimentConfig cfg = experiment(
      "mismatched", 3000, 3,
      Json::array({dat_learner(2, 0.005), dft_learner(2, 0.005), {{"name", "VF"}, {"kind", "vf"}, {"order", 2}, {"step", 0.05}}}));
  std::ostringstream a, b;
  write_metrics_csv(a, run_experiment(cfg), 1);
  write_metrics_csv(b, run_experiment(cfg), 1);
  if (a.str() != b.str()) return {false, "metric CSVs differ between identical runs"};

  const std::vector<Sample> s = gen_mismatched(2000, 3);
  const Json learners = Json::array(
      {dft_learner(2, 0.005), dat_learner(2, 0.005), {{"name", "LF"}, {"kind", "lf"}, {"step", 0.005}},
       {{"name", "VF"}, {"kind", "vf"}, {"order", 2}, {"step", 0.05}}, gkr_learner("GKR", {{1.2, -1.2}, {-1.2, 1.2}}, 1.0),
       {{"name", "DIRECT"}, {"kind", "direct"}, {"depth", 2}, {"mode", "soft"}, {"s_plus", 0.01}, {"step", 0.005},
        {"directions", "axis"}}});
  for (const Json& spec : learners) {
    auto original = make_regressor(spec, 2);
    for (std::size_t t = 0; t < 1000; ++t) {
      original->predict(s[t].x_ext);
      original->learn(s[t].d);
    }
    auto resumed = restore_regressor(Json::parse(original->snapshot().dump()));
    for (std::size_t t = 1000; t < s.size(); ++t) {
      const double y1 = original->predict(s[t].x_ext);
      const double y2 = resumed->predict(s[t].x_ext);
      if (std::memcmp(&y1, &y2, sizeof y1) != 0) {
        return {false, fmt("%s diverged after restore at t=%zu", spec.at("kind").get<std::string>().c_str(), t + 1)};
      }
      original->learn(s[t].d);
      resumed->learn(s[t].d);
    }
  }
  return {true, fmt("identical metric CSVs (%zu bytes); 6 learner kinds resume bit-identically", a.str().size())};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"combinatorics vs enumeration", 1, combinatorics_vs_enumeration},
      {"DFT exactness vs direct mixture", 10, [] { return exactness(VerifyMode::dft, {1, 2, 3}); }},
      {"DAT exactness vs direct mixture", 30, [] { return exactness(VerifyMode::dat, {1, 2}); }},
      {"boundary gradient vs finite differences", 60, boundary_gradient},
      {"empirical regret growth", 120, empirical_regret},
      {"noise floor (matched, DFT)", 60, noise_floor},
      {"adaptation ordering (mismatched)", 180, adaptation_ordering},
      {"over/underfit robustness", 180, fitting_robustness},
      {"Henon parity with VF", 120, henon_parity},
      {"complexity counters", 60, complexity_counters},
      {"determinism and serialization", 60, determinism_and_serialization},
      {"no simplex constraint on model weights", 60, no_simplex},
  };
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("[%s] %2d %s: %s (%.2fs%s)\n", pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(), secs,
                in_time ? "" : ", over time budget");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
