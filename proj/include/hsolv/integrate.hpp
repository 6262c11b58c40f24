#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "hsolv/config.hpp"

namespace hsolv {

// One accepted integrator step: state and derivative at the node, enough for
// cubic Hermite evaluation anywhere inside the covered span.
struct OdeSample {
  double t;
  Eigen::VectorXcd y;
  Eigen::VectorXcd dy;
};

// Piecewise cubic Hermite interpolant over accepted integrator steps.
// Samples must be stored in the order the integration produced them
// (monotone t, either direction).
class HermiteTrajectory {
 public:
  void reserve(std::size_t k) { samples_.reserve(k); }
  void push(OdeSample s) { samples_.push_back(std::move(s)); }
  bool empty() const { return samples_.empty(); }
  const std::vector<OdeSample>& samples() const { return samples_; }

  Eigen::VectorXcd value(double t) const {
    auto [lo, hi, u] = bracket(t);
    if (lo == hi) return samples_[lo].y;
    const auto& a = samples_[lo];
    const auto& b = samples_[hi];
    double h = b.t - a.t;
    double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * a.y + (u3 - 2 * u2 + u) * h * a.dy +
           (-2 * u3 + 3 * u2) * b.y + (u3 - u2) * h * b.dy;
  }

 private:
  std::tuple<std::size_t, std::size_t, double> bracket(double t) const {
    if (samples_.size() == 1) return {0, 0, 0.0};
    bool increasing = samples_.back().t > samples_.front().t;
    std::size_t lo = 0, hi = samples_.size() - 1;
    double tlo = samples_.front().t, thi = samples_.back().t;
    if (increasing ? (t <= tlo) : (t >= tlo)) return {0, 0, 0.0};
    if (increasing ? (t >= thi) : (t <= thi)) {
      return {samples_.size() - 1, samples_.size() - 1, 0.0};
    }
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      bool left = increasing ? (samples_[mid].t <= t) : (samples_[mid].t >= t);
      (left ? lo : hi) = mid;
    }
    double h = samples_[hi].t - samples_[lo].t;
    return {lo, hi, (t - samples_[lo].t) / h};
  }

  std::vector<OdeSample> samples_;
};

// Embedded Dormand-Prince 5(4) pair with PI step control for complex-valued
// linear systems.  Integrates from t0 to t1 in either direction; every
// accepted step lands in `out` when a trajectory is requested.
class Dopri5 {
 public:
  using Rhs = std::function<Eigen::VectorXcd(double, const Eigen::VectorXcd&)>;

  Dopri5(double rel_tol, double abs_tol) : rel_(rel_tol), abs_(abs_tol) {}

  Eigen::VectorXcd integrate(const Rhs& f, double t0, double t1, Eigen::VectorXcd y,
                             HermiteTrajectory* out = nullptr) const {
    if (t0 == t1) {
      if (out) out->push({t0, y, f(t0, y)});
      return y;
    }
    const double dir = (t1 > t0) ? 1.0 : -1.0;
    double t = t0;
    double h = dir * std::min(0.1 * std::abs(t1 - t0), 0.5);
    Eigen::VectorXcd k1 = f(t, y);
    if (out) out->push({t, y, k1});
    double err_prev = 1.0;
    int rejected_in_a_row = 0;
    const int max_steps = 1000000;
    for (int step = 0; step < max_steps; ++step) {
      if (dir * (t + h - t1) > 0) h = t1 - t;
      Eigen::VectorXcd k2 = f(t + c2 * h, y + h * (a21 * k1));
      Eigen::VectorXcd k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      Eigen::VectorXcd k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      Eigen::VectorXcd k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      Eigen::VectorXcd k6 =
          f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      Eigen::VectorXcd y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      Eigen::VectorXcd k7 = f(t + h, y5);
      Eigen::VectorXcd err_vec =
          h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err = 0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        double scale = abs_ + rel_ * std::max(std::abs(y(i)), std::abs(y5(i)));
        err = std::max(err, std::abs(err_vec(i)) / scale);
      }
      if (err <= 1.0) {
        t += h;
        y = std::move(y5);
        k1 = std::move(k7);  // FSAL
        if (out) out->push({t, y, k1});
        if (t == t1) return y;
        double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) *
                      std::pow(err_prev, 0.4 / 5.0);
        h *= std::clamp(grow, 0.2, 5.0);
        err_prev = std::max(err, 1e-10);
        rejected_in_a_row = 0;
      } else {
        h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 5.0));
        if (++rejected_in_a_row > 60) {
          throw NumericalError("Dopri5: repeated step rejection near t = " + std::to_string(t));
        }
      }
      if (std::abs(h) < 1e-14 * (1.0 + std::abs(t))) {
        throw NumericalError("Dopri5: step size underflow at t = " + std::to_string(t));
      }
    }
    throw NumericalError("Dopri5: step budget exhausted");
  }

 private:
  double rel_, abs_;

  // Dormand-Prince tableau
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double d1 = 5179.0 / 57600, d3 = 7571.0 / 16695, d4 = 393.0 / 640,
                          d5 = -92097.0 / 339200, d6 = 187.0 / 2100, d7 = 1.0 / 40;
  static constexpr double e1 = b1 - d1, e3 = b3 - d3, e4 = b4 - d4, e5 = b5 - d5, e6 = b6 - d6,
                          e7 = -d7;
};

// Adaptive Simpson quadrature for real integrands.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-11, int max_depth = 40) {
  struct Impl {
    const std::function<double(double)>& f;
    int max_depth;
    double recurse(double a, double m, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) const {
      double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      double flm = f(lm), frm = f(rm);
      double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
      double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
      if (depth >= max_depth || std::abs(left + right - whole) <= 15 * tol) {
        return left + right + (left + right - whole) / 15.0;
      }
      return recurse(a, lm, m, fa, flm, fm, left, tol / 2, depth + 1) +
             recurse(m, rm, b, fm, frm, fb, right, tol / 2, depth + 1);
    }
  };
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  return Impl{f, max_depth}.recurse(a, m, b, fa, fm, fb, whole, tol, 0);
}

}  // namespace hsolv
