#pragma once

// Lockstep equivalence check of the collapsed learners against the direct
// mixture over all partitions. Both start from zero weights and regressors
// and see the same matched-model stream with Gaussian inputs.

#include <cstdint>
#include <string>

namespace treereg {

enum class VerifyMode { dft, dat };

VerifyMode verify_mode_from_string(const std::string& s);

struct VerifyOptions {
  VerifyMode mode = VerifyMode::dft;
  int depth = 2;
  std::size_t steps = 1000;
  std::uint64_t seed = 1;
  double mu = 0.01;
  double s_plus = 0.01;
  double tolerance = 1e-9;
};

struct VerifyReport {
  double max_gap = 0.0;
  std::size_t worst_step = 0;  // 1-based
  std::size_t steps = 0;
  bool passed = false;
};

/// |a - b| / max(1, |a|, |b|): relative for large predictions, absolute near 0.
double prediction_gap(double a, double b);

VerifyReport verify_equivalence(const VerifyOptions& options);

}  // namespace treereg
