#include "dqhe/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dqhe {

double field_amplitude(const FieldRule& rule, double jbar) {
  return std::visit(
      [jbar](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantField>) {
          return r.h;
        } else {
          const double h_mhz = r.a * units::rad_per_ns_to_mhz(jbar) + r.b;
          if (h_mhz < 0.0) throw std::domain_error("linear field rule gives a negative amplitude");
          return units::mhz_to_rad_per_ns(h_mhz);
        }
      },
      rule);
}

RampProtocol RampProtocol::from_ramp_time(double t_ramp, FieldRule rule, double theta_final) {
  if (!(t_ramp > 0.0)) throw std::invalid_argument("ramp time must be positive");
  RampProtocol p;
  p.v = units::pi / t_ramp;
  p.field_rule = rule;
  p.theta_final = theta_final;
  return p;
}

void RampProtocol::validate() const {
  if (!(v > 0.0)) throw std::invalid_argument("ramp velocity must be positive");
  if (!(theta_final > 0.0) || theta_final > units::pi + 1e-15) {
    throw std::invalid_argument("theta_final must lie in (0, pi]");
  }
  if (t_meas < 0.0) throw std::invalid_argument("measurement window must be non-negative");
  if (!(field_scale > 0.0)) throw std::invalid_argument("field scale must be positive");
}

double RampProtocol::theta_at(double t) const {
  const double theta = v * v * t * t / (2.0 * units::pi);
  return std::min(theta, theta_final);
}

double RampProtocol::v_theta_at(double t) const {
  return v * v * std::min(t, end_time()) / units::pi;
}

double RampProtocol::time_at_theta(double theta) const {
  return std::sqrt(2.0 * units::pi * theta) / v;
}

double RampProtocol::end_time() const { return time_at_theta(theta_final); }

DriveSample sample(const RampProtocol& p, double jbar, double t) {
  if (t < 0.0) throw std::invalid_argument("drive sampled at negative time");
  DriveSample s;
  s.t = t;
  const double t_end = p.end_time();
  s.in_measurement_window = t > t_end;
  s.field.h = p.field_for(jbar);
  s.field.theta = s.in_measurement_window ? p.theta_final : p.theta_at(t);
  s.field.phi = p.phi;
  s.v_theta = p.v_theta_at(t);
  return s;
}

}  // namespace dqhe
