#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace scvi {

enum class ScheduleKind { Harmonic, InverseSqrt, Constant };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& name);

class StepsizeSchedule {
 public:
  // γ_0 = γ₀, γ_k = γ₀/k for k ≥ 1
  static StepsizeSchedule harmonic(double gamma0);
  // γ_k = γ₀/√(k+1)
  static StepsizeSchedule inverse_sqrt(double gamma0);
  static StepsizeSchedule constant(double gamma);

  double operator()(std::uint64_t k) const;
  ScheduleKind kind() const { return kind_; }
  double gamma0() const { return gamma0_; }

  nlohmann::json to_json() const;
  static StepsizeSchedule from_json(const nlohmann::json& j);

 private:
  StepsizeSchedule(ScheduleKind kind, double gamma0);
  ScheduleKind kind_;
  double gamma0_;
};

}  // namespace scvi
