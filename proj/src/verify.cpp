#include "treereg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "treereg/dat.hpp"
#include "treereg/datagen.hpp"
#include "treereg/dft.hpp"
#include "treereg/direct_mixture.hpp"

namespace treereg {

VerifyMode verify_mode_from_string(const std::string& s) {
  if (s == "dft") return VerifyMode::dft;
  if (s == "dat") return VerifyMode::dat;
  throw std::invalid_argument("verify mode must be dft or dat, got " + s);
}

double prediction_gap(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

VerifyReport verify_equivalence(const VerifyOptions& o) {
  if (o.depth < 0 || o.depth > kMaxDirectDepth) throw std::invalid_argument("verify: depth out of range");
  const std::vector<Sample> stream = gen_matched(o.steps, o.seed);

  DirectConfig dc;
  dc.depth = o.depth;
  dc.input_dim = 2;
  dc.mode = o.mode == VerifyMode::dft ? SeparatorMode::hard : SeparatorMode::soft;
  dc.s_plus = o.s_plus;
  dc.step = StepSchedule::constant(o.mu);
  DirectLearner direct(dc);

  VerifyReport report;
  report.steps = o.steps;
  auto record = [&](std::size_t t, double a, double b) {
    const double gap = prediction_gap(a, b);
    if (!(gap <= report.max_gap)) {  // NaN propagates as a failure
      report.max_gap = std::isnan(gap) ? INFINITY : gap;
      report.worst_step = t + 1;
    }
  };

  if (o.mode == VerifyMode::dft) {
    DftConfig c;
    c.depth = o.depth;
    c.input_dim = 2;
    c.step = StepSchedule::constant(o.mu);
    DftLearner tree(c);
    for (std::size_t t = 0; t < stream.size(); ++t) {
      const double y_tree = tree.step(stream[t].x_ext, stream[t].d).y_hat;
      const double y_direct = direct.step(stream[t].x_ext, stream[t].d);
      record(t, y_tree, y_direct);
    }
  } else {
    DatConfig c;
    c.depth = o.depth;
    c.input_dim = 2;
    c.s_plus = o.s_plus;
    c.step = StepSchedule::constant(o.mu);
    DatLearner tree(c);
    for (std::size_t t = 0; t < stream.size(); ++t) {
      const double y_tree = tree.step(stream[t].x_ext, stream[t].d).y_hat;
      const double y_direct = direct.step(stream[t].x_ext, stream[t].d);
      record(t, y_tree, y_direct);
    }
  }
  report.passed = report.max_gap <= o.tolerance;
  return report;
}

}  // namespace treereg
