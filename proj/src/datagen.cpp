#include "treereg/datagen.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "treereg/dataset.hpp"
#include "treereg/rng.hpp"

namespace treereg {

const char* to_string(StreamKind k) {
  switch (k) {
    case StreamKind::matched: return "matched";
    case StreamKind::mismatched: return "mismatched";
    case StreamKind::first_order: return "first_order";
    case StreamKind::third_order: return "third_order";
    case StreamKind::henon: return "henon";
    case StreamKind::lorenz: return "lorenz";
    case StreamKind::csv: return "csv";
  }
  return "?";
}

StreamKind stream_kind_from_string(const std::string& s) {
  for (StreamKind k : {StreamKind::matched, StreamKind::mismatched, StreamKind::first_order, StreamKind::third_order,
                       StreamKind::henon, StreamKind::lorenz, StreamKind::csv}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown stream kind: " + s);
}

void StreamSpec::validate() const {
  if (n < 1) throw std::invalid_argument("stream: n must be >= 1");
  if (!(noise_var >= 0.0)) throw std::invalid_argument("stream: noise_var must be >= 0");
  if (kind == StreamKind::csv && csv_path.empty()) throw std::invalid_argument("stream: csv kind needs a path");
}

StreamSpec stream_spec_from_json(const Json& j) {
  StreamSpec s;
  s.kind = stream_kind_from_string(j.at("kind").get<std::string>());
  s.n = j.at("n").get<std::size_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.noise_var = j.value("noise_var", 0.1);
  s.burn_in = j.value("burn_in", std::size_t{0});
  s.normalize = j.value("normalize", false);
  if (j.contains("henon")) {
    const Json& h = j.at("henon");
    s.henon.zeta = h.value("zeta", s.henon.zeta);
    s.henon.eta = h.value("eta", s.henon.eta);
    if (h.contains("init")) s.henon.init = h.at("init").get<std::array<double, 2>>();
  }
  if (j.contains("lorenz")) {
    const Json& l = j.at("lorenz");
    s.lorenz.sigma = l.value("sigma", s.lorenz.sigma);
    s.lorenz.rho = l.value("rho", s.lorenz.rho);
    s.lorenz.beta = l.value("beta", s.lorenz.beta);
    s.lorenz.dt = l.value("dt", s.lorenz.dt);
    if (l.contains("init")) s.lorenz.init = l.at("init").get<std::array<double, 3>>();
  }
  s.csv_path = j.value("path", std::string{});
  s.target_column = j.value("target_column", -1);
  s.validate();
  return s;
}

Json stream_spec_to_json(const StreamSpec& s) {
  Json j{{"kind", to_string(s.kind)}, {"n", s.n},       {"seed", s.seed},
         {"noise_var", s.noise_var},  {"burn_in", s.burn_in}, {"normalize", s.normalize}};
  if (s.kind == StreamKind::henon) j["henon"] = {{"zeta", s.henon.zeta}, {"eta", s.henon.eta}, {"init", s.henon.init}};
  if (s.kind == StreamKind::lorenz) {
    j["lorenz"] = {{"sigma", s.lorenz.sigma}, {"rho", s.lorenz.rho}, {"beta", s.lorenz.beta},
                   {"dt", s.lorenz.dt},       {"init", s.lorenz.init}};
  }
  if (s.kind == StreamKind::csv) {
    j["path"] = s.csv_path;
    j["target_column"] = s.target_column;
  }
  return j;
}

int matched_sign(double x1, double x2) {
  // p0 = [1, 0], p1 = [0, 1]
  return (x1 >= 0.0) == (x2 >= 0.0) ? 1 : -1;
}

int mismatched_sign(double x1, double x2) {
  // p0 = [4, -1], p1 = [1, 1], p2 = [1, 2]
  if (4.0 * x1 - x2 >= 0.5) return x1 + x2 >= 1.0 ? 1 : -1;
  return x1 + 2.0 * x2 >= -1.0 ? -1 : 1;
}

int first_order_sign(double x1, double x2) { return 4.0 * x1 - x2 >= 0.5 ? 1 : -1; }

int third_order_sign(double x1, double x2) {
  // p0 = [4, -1], p1 = [1, 1], p2 = [-1, -2], p3 = [0, 1], p4 = [1, 0],
  // p5 = [-1, 0], p6 = [0, -1]
  if (4.0 * x1 - x2 >= 0.5) {
    if (x1 + x2 >= 1.0) return x2 >= 0.5 ? 1 : -1;
    return x1 >= 0.5 ? 1 : -1;
  }
  if (-x1 - 2.0 * x2 < 0.5) return -x1 < 0.5 ? 1 : -1;
  return -x2 < 0.5 ? 1 : -1;
}

namespace {

template <typename SignFn>
std::vector<Sample> gen_piecewise(std::size_t n, std::uint64_t seed, double noise_var, SignFn sign) {
  if (!(noise_var >= 0.0)) throw std::invalid_argument("noise_var must be >= 0");
  SplitMix64 rng(seed);
  const double noise_sd = std::sqrt(noise_var);
  std::vector<Sample> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double x1 = rng.normal();
    const double x2 = rng.normal();
    const double noise = noise_sd * rng.normal();
    Vector x(3);
    x << x1, x2, 1.0;
    out.push_back({std::move(x), sign(x1, x2) * (x1 + x2) + noise});
  }
  return out;
}

}  // namespace

std::vector<Sample> gen_matched(std::size_t n, std::uint64_t seed, double noise_var) {
  return gen_piecewise(n, seed, noise_var, matched_sign);
}
std::vector<Sample> gen_mismatched(std::size_t n, std::uint64_t seed, double noise_var) {
  return gen_piecewise(n, seed, noise_var, mismatched_sign);
}
std::vector<Sample> gen_first_order(std::size_t n, std::uint64_t seed, double noise_var) {
  return gen_piecewise(n, seed, noise_var, first_order_sign);
}
std::vector<Sample> gen_third_order(std::size_t n, std::uint64_t seed, double noise_var) {
  return gen_piecewise(n, seed, noise_var, third_order_sign);
}

std::vector<Sample> gen_henon(std::size_t n, const HenonParams& p) {
  double prev = p.init[0];
  double prev2 = p.init[1];
  if (!std::isfinite(prev) || !std::isfinite(prev2)) throw std::invalid_argument("henon: non-finite initial state");
  std::vector<Sample> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double d = 1.0 - p.zeta * prev * prev + p.eta * prev2;
    if (!(std::abs(d) <= 1e10)) throw std::runtime_error("henon: orbit diverged at t = " + std::to_string(t + 1));
    Vector x(3);
    x << prev, prev2, 1.0;
    out.push_back({std::move(x), d});
    prev2 = prev;
    prev = d;
  }
  return out;
}

std::vector<Sample> gen_lorenz(std::size_t n, const LorenzParams& p) {
  double x = p.init[0], y = p.init[1], z = p.init[2];
  std::vector<Sample> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double nx = x + p.sigma * (y - x) * p.dt;
    const double ny = y + (x * (p.rho - z) - y) * p.dt;
    const double nz = z + (x * y - p.beta * z) * p.dt;
    x = nx;
    y = ny;
    z = nz;
    Vector reg(3);
    reg << y, z, 1.0;
    out.push_back({std::move(reg), x});
  }
  return out;
}

std::vector<Sample> generate(const StreamSpec& spec) {
  spec.validate();
  const std::size_t total = spec.n + spec.burn_in;
  std::vector<Sample> s;
  switch (spec.kind) {
    case StreamKind::matched: s = gen_matched(total, spec.seed, spec.noise_var); break;
    case StreamKind::mismatched: s = gen_mismatched(total, spec.seed, spec.noise_var); break;
    case StreamKind::first_order: s = gen_first_order(total, spec.seed, spec.noise_var); break;
    case StreamKind::third_order: s = gen_third_order(total, spec.seed, spec.noise_var); break;
    case StreamKind::henon: s = gen_henon(total, spec.henon); break;
    case StreamKind::lorenz: s = gen_lorenz(total, spec.lorenz); break;
    case StreamKind::csv: {
      // Already normalized by the loader; n caps the row count.
      Dataset data = load_csv_dataset(spec.csv_path, spec.target_column);
      s = std::move(data.samples);
      if (s.size() > total) s.resize(total);
      break;
    }
  }
  s.erase(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(std::min(spec.burn_in, s.size())));
  if (spec.normalize && spec.kind != StreamKind::csv) normalize_stream(s);
  return s;
}

void write_stream_csv(std::ostream& out, const std::vector<Sample>& samples) {
  if (samples.empty()) return;
  const Eigen::Index m = samples.front().x_ext.size() - 1;
  for (Eigen::Index i = 0; i < m; ++i) out << 'x' << (i + 1) << ',';
  out << "d\n";
  out.precision(17);
  for (const Sample& s : samples) {
    for (Eigen::Index i = 0; i < m; ++i) out << s.x_ext[i] << ',';
    out << s.d << '\n';
  }
}

}  // namespace treereg
