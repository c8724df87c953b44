#pragma once

// Quadratic polar-angle ramp theta(t) = v^2 t^2 / (2 pi) at fixed azimuth,
// followed by an optional measurement window.

#include <variant>

#include "dqhe/spin_chain.hpp"
#include "dqhe/units.hpp"

namespace dqhe {

struct ConstantField {
  double h = 0.0;  // rad/ns
};

/// h = a * Jbar + b with Jbar and h in MHz (ordinary frequency).
struct LinearFieldRule {
  double a = -85.0;
  double b = 3400.0;  // MHz
};

using FieldRule = std::variant<ConstantField, LinearFieldRule>;

/// Field amplitude in rad/ns for a chain whose isotropic proxy is jbar (rad/ns).
double field_amplitude(const FieldRule& rule, double jbar);

enum class MeasurementDrive {
  Off,     // H = 0 during the window, only dissipators act
  Frozen,  // H held at its end-of-ramp value
};

struct RampProtocol {
  double v = units::pi / 100.0;         // rad/ns
  double theta_final = units::pi / 2.0;  // in (0, pi]
  double phi = 0.0;
  FieldRule field_rule = ConstantField{};
  double field_scale = 1.0;  // multiplicative field disorder
  double t_meas = 10.0;      // ns, open-system evolution only
  MeasurementDrive measurement_drive = MeasurementDrive::Off;

  /// Ramp that reaches theta = pi/2 at t_ramp (v = pi / t_ramp).
  static RampProtocol from_ramp_time(double t_ramp, FieldRule rule, double theta_final = units::pi / 2.0);

  void validate() const;

  double theta_at(double t) const;
  double v_theta_at(double t) const;
  /// Time at which theta reaches theta_final.
  double end_time() const;
  /// Time at which the quadratic ramp passes the given angle.
  double time_at_theta(double theta) const;
  /// Ramp time of the pi/2 reference ramp, pi / v.
  double ramp_time() const { return units::pi / v; }
  double field_for(double jbar) const { return field_scale * field_amplitude(field_rule, jbar); }
};

struct DriveSample {
  double t = 0.0;
  MagneticField field;
  double v_theta = 0.0;
  bool in_measurement_window = false;
};

/// Drive seen by a chain with isotropic proxy jbar at time t >= 0. Inside the
/// measurement window theta and v_theta are held at their end-of-ramp values.
DriveSample sample(const RampProtocol& p, double jbar, double t);

}  // namespace dqhe
