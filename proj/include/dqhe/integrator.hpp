#pragma once

// Explicit Runge-Kutta integration of complex linear ODEs dy/dt = f(t, y) for
// Eigen vectors and matrices: adaptive Dormand-Prince 5(4) with embedded
// error control, and classical fixed-step RK4 as a fallback.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dqhe {

enum class IntegrationMethod { DormandPrince45, ClassicalRK4 };

struct EvolverConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  // 0 selects the automatic bound: one tenth of the shortest period of the
  // Hamiltonian at the ramp endpoints.
  double max_step = 0.0;
  IntegrationMethod method = IntegrationMethod::DormandPrince45;
  double fixed_step = 1e-3;  // ns, RK4 only

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (max_step < 0.0) throw std::invalid_argument("max_step must be non-negative");
    if (method == IntegrationMethod::ClassicalRK4 && !(fixed_step > 0.0)) {
      throw std::invalid_argument("fixed step must be positive");
    }
  }
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class State>
class RungeKuttaIntegrator {
 public:
  RungeKuttaIntegrator(const EvolverConfig& cfg, double max_step) : cfg_(cfg), max_step_(max_step) {
    cfg_.validate();
    if (!(max_step_ > 0.0)) max_step_ = std::numeric_limits<double>::infinity();
  }

  const IntegrationStats& stats() const { return stats_; }

  /// Advances y from t0 to t1 (t1 >= t0) exactly. f(t, y, dydt) writes the
  /// derivative into dydt.
  template <class Rhs>
  void advance(Rhs&& f, State& y, double t0, double t1) {
    if (t1 < t0) throw std::invalid_argument("integration interval reversed");
    if (t1 == t0) return;
    if (cfg_.method == IntegrationMethod::ClassicalRK4) {
      advance_rk4(f, y, t0, t1);
    } else {
      advance_dopri(f, y, t0, t1);
    }
  }

 private:
  static double error_norm(const State& err, const State& y0, const State& y1, double atol, double rtol) {
    const auto scale = (atol + rtol * y0.cwiseAbs().array().max(y1.cwiseAbs().array()));
    return std::sqrt((err.cwiseAbs().array() / scale).square().mean());
  }

  template <class Rhs>
  void advance_rk4(Rhs& f, State& y, double t0, double t1) {
    const double span = t1 - t0;
    const double target = std::min(cfg_.fixed_step, max_step_);
    const long steps = std::max(1L, static_cast<long>(std::ceil(span / target - 1e-12)));
    const double h = span / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) {
      const double t = t0 + static_cast<double>(s) * h;
      f(t, y, k1_);
      tmp_ = y + 0.5 * h * k1_;
      f(t + 0.5 * h, tmp_, k2_);
      tmp_ = y + 0.5 * h * k2_;
      f(t + 0.5 * h, tmp_, k3_);
      tmp_ = y + h * k3_;
      f(t + h, tmp_, k4_);
      y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
      stats_.evaluations += 4;
      ++stats_.accepted;
    }
  }

  template <class Rhs>
  void advance_dopri(Rhs& f, State& y, double t0, double t1) {
    // Dormand & Prince (1980) tableau.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    double t = t0;
    double h = step_ > 0.0 ? step_ : initial_step(f, y, t0);
    f(t, y, k1_);
    ++stats_.evaluations;

    while (t < t1) {
      bool last = false;
      h = std::min(h, max_step_);
      const double h_free = h;
      if (t + h >= t1 || t1 - (t + h) < 1e-12 * std::max(1.0, std::abs(t1))) {
        h = t1 - t;
        last = true;
      }
      if (h < 1e-14 * std::max(1.0, std::abs(t))) {
        throw IntegrationError("step size underflow at t = " + std::to_string(t) +
                               " ns (h = " + std::to_string(h) + " ns)");
      }

      tmp_ = y + h * (a21 * k1_);
      f(t + c2 * h, tmp_, k2_);
      tmp_ = y + h * (a31 * k1_ + a32 * k2_);
      f(t + c3 * h, tmp_, k3_);
      tmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
      f(t + c4 * h, tmp_, k4_);
      tmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
      f(t + c5 * h, tmp_, k5_);
      tmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
      const double t_new = last ? t1 : t + h;
      f(t_new, tmp_, k6_);
      y_new_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
      f(t_new, y_new_, k7_);
      stats_.evaluations += 6;

      err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
      const double err = error_norm(err_, y, y_new_, cfg_.abs_tol, cfg_.rel_tol);

      if (err <= 1.0) {
        ++stats_.accepted;
        t = t_new;
        y.swap(y_new_);
        k1_.swap(k7_);
        const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h = (last ? h_free : h) * std::clamp(grow, 0.2, 5.0);
        step_ = h;
      } else {
        ++stats_.rejected;
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      }
    }
  }

  template <class Rhs>
  double initial_step(Rhs& f, const State& y, double t) {
    f(t, y, k1_);
    ++stats_.evaluations;
    const double d0 = y.norm();
    const double d1 = k1_.norm();
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    return std::min(h, max_step_);
  }

  EvolverConfig cfg_;
  double max_step_;
  double step_ = 0.0;
  IntegrationStats stats_;
  State k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y_new_, err_;
};

}  // namespace dqhe
