#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "treereg/common.hpp"
#include "treereg/json_io.hpp"

namespace treereg {

struct Sample {
  Vector x_ext;  // [x; 1]
  double d = 0.0;
};

enum class StreamKind { matched, mismatched, first_order, third_order, henon, lorenz, csv };

const char* to_string(StreamKind k);
StreamKind stream_kind_from_string(const std::string& s);

struct HenonParams {
  double zeta = 1.4;
  double eta = 0.3;
  std::array<double, 2> init{0.0, 0.0};  // (d_0, d_-1)
};

struct LorenzParams {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
  double dt = 0.01;
  std::array<double, 3> init{1.0, 1.0, 1.0};
};

struct StreamSpec {
  StreamKind kind = StreamKind::matched;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  double noise_var = 0.1;
  /// Samples generated and dropped before the first returned one.
  std::size_t burn_in = 0;
  HenonParams henon;
  LorenzParams lorenz;
  std::string csv_path;
  int target_column = -1;  // -1: last column
  /// Map regressors and target onto [-1, 1] using the min/max of the stream.
  bool normalize = false;

  void validate() const;
};

StreamSpec stream_spec_from_json(const Json& j);
Json stream_spec_to_json(const StreamSpec& spec);

/// Sign of the piecewise models at a noiseless input: +1 when d = w^T x,
/// -1 when d = -w^T x.
int matched_sign(double x1, double x2);
int mismatched_sign(double x1, double x2);
int first_order_sign(double x1, double x2);
int third_order_sign(double x1, double x2);

/// Piecewise streams: x ~ N(0, I_2), d = sign(x) * (x1 + x2) + noise. Per
/// step the draws are x1, x2, then the noise.
std::vector<Sample> gen_matched(std::size_t n, std::uint64_t seed, double noise_var = 0.1);
std::vector<Sample> gen_mismatched(std::size_t n, std::uint64_t seed, double noise_var = 0.1);
std::vector<Sample> gen_first_order(std::size_t n, std::uint64_t seed, double noise_var = 0.1);
std::vector<Sample> gen_third_order(std::size_t n, std::uint64_t seed, double noise_var = 0.1);

/// d_t = 1 - zeta d_{t-1}^2 + eta d_{t-2}, x_t = [d_{t-1}, d_{t-2}, 1].
/// Throws std::runtime_error once |d| exceeds 1e10.
std::vector<Sample> gen_henon(std::size_t n, const HenonParams& params = {});

/// Forward Euler on the Lorenz system; sample t is ([y_t, z_t, 1], x_t),
/// starting with the state after one step.
std::vector<Sample> gen_lorenz(std::size_t n, const LorenzParams& params = {});

/// Dispatches on spec.kind, applies burn-in and optional normalization.
std::vector<Sample> generate(const StreamSpec& spec);

/// One row per sample: x1..xm,d with a header.
void write_stream_csv(std::ostream& out, const std::vector<Sample>& samples);

}  // namespace treereg
