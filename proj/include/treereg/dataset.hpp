#pragma once

#include <string>
#include <vector>

#include "treereg/datagen.hpp"

namespace treereg {

/// Affine map of [lo, hi] onto [-1, 1]. A constant column (lo == hi) maps
/// to 0 and inverts to lo.
struct AffineScale {
  double lo = -1.0;
  double hi = 1.0;

  bool constant() const { return !(hi > lo); }
  double forward(double v) const { return constant() ? 0.0 : 2.0 * (v - lo) / (hi - lo) - 1.0; }
  double inverse(double u) const { return constant() ? lo : lo + (u + 1.0) * (hi - lo) / 2.0; }
  /// Factor taking an error in normalized units back to original units.
  double error_scale() const { return constant() ? 0.0 : (hi - lo) / 2.0; }
};

struct Normalization {
  std::vector<AffineScale> inputs;
  AffineScale target;
};

struct Dataset {
  std::vector<std::string> columns;  // header, target last
  std::vector<Sample> samples;       // normalized, x_ext has the trailing 1
  Normalization scale;
  std::vector<std::string> warnings;
};

/// Reads a comma-separated file with a header row. `target_column` is a
/// 0-based column index, -1 for the last column. Every other column becomes
/// a regressor entry. Throws std::runtime_error on a missing file, ragged
/// rows or a non-numeric cell.
Dataset load_csv_dataset(const std::string& path, int target_column = -1);

/// Column min/max over a stream (ignores the trailing 1 of x_ext).
Normalization fit_normalization(const std::vector<Sample>& samples);

/// In-place map onto [-1, 1]; returns the scales used.
Normalization normalize_stream(std::vector<Sample>& samples);

}  // namespace treereg
