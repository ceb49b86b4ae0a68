#include "scvi/stepsize.hpp"

#include <cmath>

#include "scvi/error.hpp"

namespace scvi {

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Harmonic: return "harmonic";
    case ScheduleKind::InverseSqrt: return "inverse_sqrt";
    case ScheduleKind::Constant: return "constant";
  }
  return "unknown";
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
  if (name == "harmonic") return ScheduleKind::Harmonic;
  if (name == "inverse_sqrt") return ScheduleKind::InverseSqrt;
  if (name == "constant") return ScheduleKind::Constant;
  throw ConfigError("unknown_schedule", "schedule '" + name + "' is not recognized");
}

StepsizeSchedule::StepsizeSchedule(ScheduleKind kind, double gamma0) : kind_(kind), gamma0_(gamma0) {
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0))
    throw ConfigError("stepsize_not_positive", "gamma0 must be positive and finite");
}

StepsizeSchedule StepsizeSchedule::harmonic(double gamma0) {
  return StepsizeSchedule(ScheduleKind::Harmonic, gamma0);
}

StepsizeSchedule StepsizeSchedule::inverse_sqrt(double gamma0) {
  return StepsizeSchedule(ScheduleKind::InverseSqrt, gamma0);
}

StepsizeSchedule StepsizeSchedule::constant(double gamma) {
  return StepsizeSchedule(ScheduleKind::Constant, gamma);
}

double StepsizeSchedule::operator()(std::uint64_t k) const {
  switch (kind_) {
    case ScheduleKind::Harmonic:
      return k == 0 ? gamma0_ : gamma0_ / static_cast<double>(k);
    case ScheduleKind::InverseSqrt:
      return gamma0_ / std::sqrt(static_cast<double>(k) + 1.0);
    case ScheduleKind::Constant:
      return gamma0_;
  }
  return gamma0_;
}

nlohmann::json StepsizeSchedule::to_json() const {
  return {{"kind", to_string(kind_)}, {"gamma0", gamma0_}};
}

StepsizeSchedule StepsizeSchedule::from_json(const nlohmann::json& j) {
  return StepsizeSchedule(schedule_kind_from_string(j.at("kind").get<std::string>()),
                          j.at("gamma0").get<double>());
}

}  // namespace scvi
