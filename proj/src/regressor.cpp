#include "treereg/regressor.hpp"

#include <optional>

#include "treereg/baselines.hpp"
#include "treereg/dat.hpp"
#include "treereg/dft.hpp"
#include "treereg/direct_mixture.hpp"
#include "treereg/separator.hpp"

namespace treereg {

double SequentialRegressor::predict(const Vector& x_ext) {
  if (pending_) throw std::logic_error(kind() + ": predict called twice without learn");
  y_hat_ = do_predict(x_ext);
  x_ = x_ext;
  pending_ = true;
  return y_hat_;
}

double SequentialRegressor::learn(double desired) {
  if (!pending_) throw std::logic_error(kind() + ": learn called without a pending prediction");
  pending_ = false;
  do_learn(x_, desired);
  return desired - y_hat_;
}

namespace {

class DftRegressor final : public SequentialRegressor {
 public:
  explicit DftRegressor(DftLearner learner) : learner_(std::move(learner)) {}
  std::string kind() const override { return "dft"; }
  WorkCounters last_work() const override { return learner_.last_work(); }
  Json snapshot() const override { return learner_.snapshot(); }

 protected:
  double do_predict(const Vector& x) override {
    prediction_ = learner_.predict(x);
    return prediction_->y_hat;
  }
  void do_learn(const Vector& x, double d) override { learner_.update(x, d, *prediction_); }

 private:
  DftLearner learner_;
  std::optional<DftPrediction> prediction_;
};

class DatRegressor final : public SequentialRegressor {
 public:
  explicit DatRegressor(DatLearner learner) : learner_(std::move(learner)) {}
  std::string kind() const override { return "dat"; }
  WorkCounters last_work() const override { return learner_.last_work(); }
  Json snapshot() const override { return learner_.snapshot(); }

 protected:
  double do_predict(const Vector& x) override {
    prediction_ = learner_.predict(x);
    return prediction_->y_hat;
  }
  void do_learn(const Vector& x, double d) override { learner_.update(x, d, *prediction_); }

 private:
  DatLearner learner_;
  std::optional<DatPrediction> prediction_;
};

Json direct_snapshot(const DirectLearner& l) {
  const DirectConfig& c = l.config();
  const TreeShape shape(c.depth);
  Json nodes = Json::array();
  for (NodeLabel p : shape.nodes()) {
    Json n{{"label", p.to_string()}, {"v", vector_to_json(l.regressor(p).v)}};
    if (!shape.is_leaf(p)) n["theta"] = vector_to_json(l.direction(p));
    nodes.push_back(std::move(n));
  }
  Json out{{"kind", "direct"},
           {"depth", c.depth},
           {"input_dim", c.input_dim},
           {"mode", c.mode == SeparatorMode::hard ? "hard" : "soft"},
           {"s_plus", c.s_plus},
           {"t", l.steps()},
           {"step", schedule_to_json(c.step)},
           {"cap_enabled", c.cap_enabled},
           {"gradient", to_string(c.gradient)},
           {"regressor_update", to_string(c.regressor_update)},
           {"model_weights", vector_to_json(l.model_weights())},
           {"nodes", std::move(nodes)}};
  if (c.regressor_step) out["regressor_step"] = schedule_to_json(*c.regressor_step);
  if (c.boundary_step) out["boundary_step"] = schedule_to_json(*c.boundary_step);
  if (c.step_cap) out["step_cap"] = *c.step_cap;
  return out;
}

class DirectRegressor final : public SequentialRegressor {
 public:
  explicit DirectRegressor(DirectLearner learner) : learner_(std::move(learner)) {}
  std::string kind() const override { return "direct"; }
  Json snapshot() const override { return direct_snapshot(learner_); }
  DirectLearner& learner() { return learner_; }

 protected:
  double do_predict(const Vector& x) override {
    prediction_ = learner_.predict(x);
    return prediction_->y_hat;
  }
  void do_learn(const Vector& x, double d) override { learner_.update(x, d, *prediction_); }

 private:
  DirectLearner learner_;
  std::optional<DirectPrediction> prediction_;
};

template <typename Filter>
class FilterRegressor final : public SequentialRegressor {
 public:
  FilterRegressor(std::string kind, Filter filter) : kind_(std::move(kind)), filter_(std::move(filter)) {}
  std::string kind() const override { return kind_; }
  Json snapshot() const override { return filter_.snapshot(); }

 protected:
  double do_predict(const Vector& x) override {
    y_ = filter_.predict(x);
    return y_;
  }
  void do_learn(const Vector& x, double d) override { filter_.update(x, d - y_); }

 private:
  std::string kind_;
  Filter filter_;
  double y_ = 0.0;
};

const Json& required(const Json& spec, const char* key) {
  if (!spec.contains(key)) {
    throw ConfigError("learner '" + spec.value("kind", std::string("?")) + "' is missing required key '" + key + "'");
  }
  return spec.at(key);
}

std::optional<StepSchedule> optional_schedule(const Json& spec, const char* key) {
  if (!spec.contains(key)) return std::nullopt;
  return schedule_from_json(spec.at(key));
}

/// "axis" selects initial_directions(); otherwise an array of direction vectors.
std::vector<Vector> directions_from_json(const Json& j, int depth, int input_dim) {
  if (j.is_string()) {
    if (j.get<std::string>() != "axis") throw ConfigError("directions: expected \"axis\" or an array");
    return initial_directions(depth, input_dim);
  }
  std::vector<Vector> out;
  for (const Json& d : j) out.push_back(vector_from_json(d));
  return out;
}

std::vector<GaussianCenter> centers_from_json(const Json& j) {
  std::vector<GaussianCenter> out;
  for (const Json& c : j) {
    GaussianCenter g;
    g.mean = vector_from_json(c.at("mean"));
    const Eigen::Index m = g.mean.size();
    const Json& cov = c.at("covariance");
    if (cov.is_number()) {
      g.covariance = cov.get<double>() * Eigen::MatrixXd::Identity(m, m);
    } else {
      g.covariance.resize(m, m);
      for (Eigen::Index r = 0; r < m; ++r) g.covariance.row(r) = vector_from_json(cov.at(r)).transpose();
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::unique_ptr<SequentialRegressor> build(const Json& spec, int input_dim) {
  const std::string kind = required(spec, "kind").get<std::string>();
  if (kind == "dft") {
    DftConfig c;
    c.depth = required(spec, "depth").get<int>();
    c.input_dim = input_dim;
    c.step = schedule_from_json(required(spec, "step"));
    c.regressor_step = optional_schedule(spec, "regressor_step");
    c.regressor_update = regressor_update_from_string(spec.value("regressor_update", "plain"));
    c.boundaries = directions_from_json(required(spec, "directions"), c.depth, input_dim);
    return std::make_unique<DftRegressor>(DftLearner(std::move(c)));
  }
  if (kind == "dat") {
    DatConfig c;
    c.depth = required(spec, "depth").get<int>();
    c.input_dim = input_dim;
    c.s_plus = required(spec, "s_plus").get<double>();
    c.step = schedule_from_json(required(spec, "step"));
    c.regressor_step = optional_schedule(spec, "regressor_step");
    c.boundary_step = optional_schedule(spec, "boundary_step");
    c.cap_enabled = spec.value("cap_enabled", true);
    if (spec.contains("step_cap")) c.step_cap = spec.at("step_cap").get<double>();
    c.gradient = gradient_form_from_string(spec.value("gradient", "exact"));
    c.regressor_update = regressor_update_from_string(spec.value("regressor_update", "plain"));
    const std::string scope = spec.value("scope", "all_nodes");
    if (scope != "all_nodes" && scope != "leaves_only") throw ConfigError("unknown DAT scope: " + scope);
    c.scope = scope == "all_nodes" ? DatScope::all_nodes : DatScope::leaves_only;
    c.directions = directions_from_json(required(spec, "directions"), c.depth, input_dim);
    return std::make_unique<DatRegressor>(DatLearner(std::move(c)));
  }
  if (kind == "direct") {
    DirectConfig c;
    c.depth = required(spec, "depth").get<int>();
    c.input_dim = input_dim;
    const std::string mode = required(spec, "mode").get<std::string>();
    if (mode != "hard" && mode != "soft") throw ConfigError("direct: mode must be hard or soft");
    c.mode = mode == "hard" ? SeparatorMode::hard : SeparatorMode::soft;
    if (c.mode == SeparatorMode::soft) c.s_plus = required(spec, "s_plus").get<double>();
    c.step = schedule_from_json(required(spec, "step"));
    c.regressor_step = optional_schedule(spec, "regressor_step");
    c.boundary_step = optional_schedule(spec, "boundary_step");
    c.cap_enabled = spec.value("cap_enabled", true);
    if (spec.contains("step_cap")) c.step_cap = spec.at("step_cap").get<double>();
    c.gradient = gradient_form_from_string(spec.value("gradient", "exact"));
    c.regressor_update = regressor_update_from_string(spec.value("regressor_update", "plain"));
    c.directions = directions_from_json(required(spec, "directions"), c.depth, input_dim);
    return std::make_unique<DirectRegressor>(DirectLearner(std::move(c)));
  }
  if (kind == "lf") {
    return std::make_unique<FilterRegressor<LinearFilter>>(
        "lf", LinearFilter(input_dim, required(spec, "step").get<double>()));
  }
  if (kind == "vf") {
    return std::make_unique<FilterRegressor<VolterraFilter>>(
        "vf", VolterraFilter(input_dim, required(spec, "order").get<int>(), required(spec, "step").get<double>()));
  }
  if (kind == "gkr") {
    return std::make_unique<FilterRegressor<GaussianKernelRegressor>>(
        "gkr",
        GaussianKernelRegressor(centers_from_json(required(spec, "centers")), required(spec, "step").get<double>()));
  }
  throw ConfigError("unknown learner kind: " + kind);
}

}  // namespace

std::unique_ptr<SequentialRegressor> make_regressor(const Json& spec, int input_dim) {
  try {
    return build(spec, input_dim);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("learner config: ") + e.what());
  }
}

std::unique_ptr<SequentialRegressor> restore_regressor(const Json& s) {
  const std::string kind = s.at("kind").get<std::string>();
  if (kind == "dft") return std::make_unique<DftRegressor>(DftLearner::restore(s));
  if (kind == "dat") return std::make_unique<DatRegressor>(DatLearner::restore(s));
  if (kind == "lf") return std::make_unique<FilterRegressor<LinearFilter>>("lf", LinearFilter::restore(s));
  if (kind == "vf") return std::make_unique<FilterRegressor<VolterraFilter>>("vf", VolterraFilter::restore(s));
  if (kind == "gkr") {
    return std::make_unique<FilterRegressor<GaussianKernelRegressor>>("gkr", GaussianKernelRegressor::restore(s));
  }
  if (kind == "direct") {
    DirectConfig c;
    c.depth = s.at("depth").get<int>();
    c.input_dim = s.at("input_dim").get<int>();
    c.mode = s.at("mode").get<std::string>() == "hard" ? SeparatorMode::hard : SeparatorMode::soft;
    c.s_plus = s.at("s_plus").get<double>();
    c.step = schedule_from_json(s.at("step"));
    if (s.contains("regressor_step")) c.regressor_step = schedule_from_json(s.at("regressor_step"));
    if (s.contains("boundary_step")) c.boundary_step = schedule_from_json(s.at("boundary_step"));
    c.cap_enabled = s.at("cap_enabled").get<bool>();
    if (s.contains("step_cap")) c.step_cap = s.at("step_cap").get<double>();
    c.gradient = gradient_form_from_string(s.at("gradient").get<std::string>());
    c.regressor_update = regressor_update_from_string(s.at("regressor_update").get<std::string>());
    const TreeShape shape(c.depth);
    c.directions.resize(shape.internal_count());
    for (const Json& n : s.at("nodes")) {
      const NodeLabel p = NodeLabel::parse(n.at("label").get<std::string>());
      if (!shape.is_leaf(p)) c.directions.at(p.index()) = vector_from_json(n.at("theta"));
    }
    DirectLearner learner(std::move(c));
    learner.set_model_weights(vector_from_json(s.at("model_weights")));
    for (const Json& n : s.at("nodes")) {
      learner.set_regressor(NodeLabel::parse(n.at("label").get<std::string>()), vector_from_json(n.at("v")));
    }
    learner.set_steps(s.at("t").get<std::uint64_t>());
    return std::make_unique<DirectRegressor>(std::move(learner));
  }
  throw std::invalid_argument("unknown snapshot kind: " + kind);
}

}  // namespace treereg
