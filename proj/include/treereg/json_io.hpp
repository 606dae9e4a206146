#pragma once

// JSON helpers shared by the learner snapshots and experiment configs.
// Doubles are written by nlohmann::json in shortest round-trip form, so a
// dump/parse cycle reproduces every value bit for bit.

#include <string>

#include <json.hpp>

#include "treereg/common.hpp"
#include "treereg/node_regressor.hpp"
#include "treereg/separator.hpp"

namespace treereg {

using Json = nlohmann::json;

inline Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a numeric array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

inline Json schedule_to_json(const StepSchedule& s) {
  if (s.kind == StepSchedule::Kind::constant) return Json{{"kind", "constant"}, {"mu", s.mu}};
  return Json{{"kind", "inverse_time"}, {"lambda", s.lambda}, {"offset", s.offset}};
}

/// Accepts a bare number (constant step) or {"kind": ..., ...}.
inline StepSchedule schedule_from_json(const Json& j) {
  if (j.is_number()) return StepSchedule::constant(j.get<double>());
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return StepSchedule::constant(j.at("mu").get<double>());
  if (kind == "inverse_time") return StepSchedule::inverse_time(j.at("lambda").get<double>(), j.value("offset", 0.0));
  throw std::invalid_argument("unknown step schedule kind: " + kind);
}

inline const char* to_string(GradientForm f) { return f == GradientForm::exact ? "exact" : "clamped_product"; }

inline GradientForm gradient_form_from_string(const std::string& s) {
  if (s == "exact") return GradientForm::exact;
  if (s == "clamped_product") return GradientForm::clamped_product;
  throw std::invalid_argument("unknown gradient form: " + s);
}

inline const char* to_string(RegressorUpdate u) { return u == RegressorUpdate::plain ? "plain" : "kappa_weighted"; }

inline RegressorUpdate regressor_update_from_string(const std::string& s) {
  if (s == "plain") return RegressorUpdate::plain;
  if (s == "kappa_weighted") return RegressorUpdate::kappa_weighted;
  throw std::invalid_argument("unknown regressor update: " + s);
}

}  // namespace treereg
