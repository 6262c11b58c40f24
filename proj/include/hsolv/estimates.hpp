#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hsolv/kernel_basis.hpp"
#include "hsolv/wronskian.hpp"

namespace hsolv {

// Quadrature harness for the weighted Gaussian integral bounds
//   int_0^t exp(g s^2 + a s)(1+s)^p ds <~ exp(g t^2 + a t)(1+t)^{p+1}
//   int_t^inf exp(-g s^2 + a s)(1+s)^p ds <~ exp(-g t^2 + a t)(1+t)^p.
// Everything is computed through exponent differences so no intermediate
// value leaves double range.
struct IntegralBoundReport {
  double growth_sup = 0;     // sup over the t-grid of lhs/rhs, growth bound
  double decay_sup = 0;      // same for the decay bound
  double growth_argmax = 0;
  double decay_argmax = 0;
};

namespace detail {

// lhs/rhs for the growth bound at fixed t: substitute u = t - s so the mass
// sits near u = 0 and the integrand is exp(negative).
inline double growth_ratio(double t, double g, double a, double p) {
  if (t <= 0) return 0;
  auto f = [&](double u) {
    double s = t - u;
    double expo = (g * s * s + a * s) - (g * t * t + a * t);
    return std::exp(expo) * std::pow((1 + s) / (1 + t), p) / (1 + t);
  };
  return adaptive_simpson(f, 0.0, t, 1e-12);
}

inline double decay_ratio(double t, double g, double a, double p) {
  // u = s - t; cut the tail where the exponent falls below -60
  auto exponent = [&](double u) { return -g * u * u - (2 * g * t - a) * u; };
  double hi = 1.0;
  while (exponent(hi) > -60 && hi < 1e6) hi *= 2;
  auto f = [&](double u) {
    double s = t + u;
    return std::exp(exponent(u)) * std::pow((1 + s) / (1 + t), p);
  };
  return adaptive_simpson(f, 0.0, hi, 1e-12);
}

}  // namespace detail

inline IntegralBoundReport integral_bound_harness(double g, double a, double p, double t_max,
                                                  int t_samples = 81) {
  if (!(g > 0)) throw std::invalid_argument("integral_bound_harness: gamma must be positive");
  IntegralBoundReport rep;
  for (int i = 0; i < t_samples; ++i) {
    double t = t_max * i / (t_samples - 1);
    double gr = detail::growth_ratio(t, g, a, p);
    double dr = detail::decay_ratio(t, g, a, p);
    if (gr > rep.growth_sup) {
      rep.growth_sup = gr;
      rep.growth_argmax = t;
    }
    if (dr > rep.decay_sup) {
      rep.decay_sup = dr;
      rep.decay_argmax = t;
    }
  }
  return rep;
}

// Sweep over the drift parameter: sup over |a| <= a0 with the a = 0 baseline.
struct SweepReport {
  double base_growth_sup = 0;  // a = 0
  double base_decay_sup = 0;
  double sweep_growth_sup = 0;
  double sweep_decay_sup = 0;
  double growth_arg_a = 0;
  double decay_arg_a = 0;
};

inline SweepReport integral_bound_sweep(double g, double a0, double p, double t_max,
                                        int a_samples = 17) {
  SweepReport rep;
  for (int i = 0; i < a_samples; ++i) {
    double a = -a0 + 2 * a0 * i / (a_samples - 1);
    auto r = integral_bound_harness(g, a, p, t_max);
    if (std::abs(a) < 1e-12) {
      rep.base_growth_sup = r.growth_sup;
      rep.base_decay_sup = r.decay_sup;
    }
    if (r.growth_sup > rep.sweep_growth_sup) {
      rep.sweep_growth_sup = r.growth_sup;
      rep.growth_arg_a = a;
    }
    if (r.decay_sup > rep.sweep_decay_sup) {
      rep.sweep_decay_sup = r.decay_sup;
      rep.decay_arg_a = a;
    }
  }
  return rep;
}

// Envelope report for a built basis: for each solution k and derivative
// order j the sup over the grid of |psi_k^(j)| (1+t)^{-j} exp(-Re Phi_k),
// plus the quotient envelopes from the Wronskian data.
struct EnvelopeEntry {
  int k = 0;
  int j = 0;
  double sup = 0;
  double sup_inner = 0;  // same sup restricted to the lower 80% of the window
  bool stable = false;   // window extension changed the sup by < 25%
};

struct EstimateReport {
  std::vector<EnvelopeEntry> psi_envelopes;
  std::vector<EnvelopeEntry> quotient_envelopes;  // h_j against exp(-Re(g t^2/2 + beta t))
  bool all_stable = true;
};

inline EstimateReport estimate_report(const BasisJet& basis) {
  EstimateReport rep;
  const int n = basis.n;
  const auto& expo = basis.expo();
  const std::size_t cut = (basis.grid.size() * 4) / 5;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      EnvelopeEntry e;
      e.k = k;
      e.j = j;
      for (std::size_t i = 0; i < basis.grid.size(); ++i) {
        double t = basis.grid[i];
        double v = std::abs(basis.scaled[static_cast<std::size_t>(k)](
                       j, static_cast<Eigen::Index>(i))) /
                   std::pow(1 + t, j);
        e.sup = std::max(e.sup, v);
        if (i < cut) e.sup_inner = std::max(e.sup_inner, v);
      }
      e.stable = e.sup <= 1.25 * e.sup_inner + 1e-300;
      rep.all_stable = rep.all_stable && e.stable;
      rep.psi_envelopes.push_back(e);
    }
  }
  auto w = wronskians(basis);
  for (int j = 0; j < n; ++j) {
    EnvelopeEntry e;
    e.k = j;
    e.j = 0;
    for (std::size_t i = 0; i < basis.grid.size(); ++i) {
      double t = basis.grid[i];
      // |h_j| e^{+Re(g t^2/2 + beta t)} = |h_scaled| t^{-Re rho_j}
      double v = std::abs(w.h_scaled[0](j, static_cast<Eigen::Index>(i))) *
                 std::pow(t, -expo.rho(j).real());
      e.sup = std::max(e.sup, v);
      if (i < cut) e.sup_inner = std::max(e.sup_inner, v);
    }
    e.stable = e.sup <= 1.25 * e.sup_inner + 1e-300;
    rep.all_stable = rep.all_stable && e.stable;
    rep.quotient_envelopes.push_back(e);
  }
  return rep;
}

}  // namespace hsolv
