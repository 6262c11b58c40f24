#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <vector>

#include "hsolv/config.hpp"
#include "hsolv/diagonalization.hpp"
#include "hsolv/integrate.hpp"

namespace hsolv {

// Canonical kernel basis sampled on a t-grid.  All stored jets carry the
// scaling exp(-Re Phi_k(t)); raw magnitudes would overflow doubles on the
// default window, so nothing downstream ever reconstructs them except under
// a known-small exponent.
struct BasisJet {
  int n = 0;
  int sign = +1;
  Cplx gamma_param = 1;
  std::vector<double> grid;
  // scaled[k] is an n x grid matrix; entry (i, m) holds
  // (d/dt)^i psi_k(t_m) * exp(-Re Phi_k(t_m)).
  std::vector<Eigen::MatrixXcd> scaled;
  std::shared_ptr<const DiagonalizedSystem> system;
  // Per solution k: the backward-integrated state [w~; g-lift scalars].
  std::vector<HermiteTrajectory> depth_states;

  const ExponentData& expo() const { return system->expo(); }
  double log_scale(int k, double t) const { return system->expo().phi(k, t).real(); }
};

namespace detail {

// Reduced system matrices B^(0..depth) at time t.  B^(m) acts on slots m..n-1
// and is obtained from B^(m-1) by the rank-one update that eliminates the
// dominant solution of level m-1.
inline std::vector<Eigen::MatrixXcd> reduced_matrices(
    const DiagonalizedSystem& sys, const std::vector<HermiteTrajectory>& prev, int depth,
    double t) {
  const int n = sys.size();
  std::vector<Eigen::MatrixXcd> b;
  b.reserve(static_cast<std::size_t>(depth) + 1);
  b.push_back(sys.B(t));
  for (int m = 1; m <= depth; ++m) {
    const auto& w_state = prev[static_cast<std::size_t>(m - 1)];
    Eigen::VectorXcd w = w_state.value(t).head(n - (m - 1));
    Cplx neutral = w(0);
    if (std::abs(neutral) < 0.1) {
      throw NumericalError("reduction_of_order: neutral component vanishes near t = " +
                           std::to_string(t));
    }
    Eigen::MatrixXcd next = b.back();
    for (int i = m; i < n; ++i) {
      Cplx ratio = w(i - (m - 1)) / neutral;
      for (int j = m; j < n; ++j) next(i, j) -= ratio * b.back()(m - 1, j);
    }
    b.push_back(std::move(next));
  }
  return b;
}

// Full w-gauge vector X^(0) (relative to exponent Phi_k) reconstructed from
// the depth-k state and the stored lower-depth trajectories.
inline Eigen::VectorXcd lifted_vector(const DiagonalizedSystem& sys,
                                      const std::vector<HermiteTrajectory>& prev, int k,
                                      double t, const Eigen::VectorXcd& state) {
  const int n = sys.size();
  Eigen::VectorXcd x = state.head(n - k);
  for (int m = k - 1; m >= 0; --m) {
    Cplx g = state(n - k + (k - 1 - m));
    Eigen::VectorXcd w_prev = prev[static_cast<std::size_t>(m)].value(t).head(n - m);
    Eigen::VectorXcd lifted = g * w_prev;
    lifted.tail(x.size()) += x;
    x = std::move(lifted);
  }
  return x;
}

}  // namespace detail

// Builds the canonical basis one solution at a time.  Depth k integrates the
// k-fold reduced w-system backward from T with terminal value e_k, together
// with the chain of lift scalars that re-embed the reduced solution into the
// full system.
class BasisBuilder {
 public:
  BasisBuilder(std::shared_ptr<const DiagonalizedSystem> sys, const Config& cfg)
      : sys_(std::move(sys)), cfg_(cfg) {
    validate_ordering(sys_->expo(), cfg_.window_t0, cfg_.window_T);
  }

  int depth_built() const { return static_cast<int>(trajectories_.size()); }

  // Integrates the next solution; returns the stored trajectory.
  const HermiteTrajectory& build_next() {
    const int n = sys_->size();
    const int k = depth_built();
    if (k >= n) throw std::logic_error("BasisBuilder: basis already complete");
    const auto& expo = sys_->expo();

    auto rhs = [this, n, k, &expo](double t, const Eigen::VectorXcd& z) {
      auto b = detail::reduced_matrices(*sys_, trajectories_, k, t);
      Eigen::VectorXcd dz = Eigen::VectorXcd::Zero(z.size());
      Cplx phik = expo.phi_prime(k, t);
      // reduced w-part on slots k..n-1
      for (int i = k; i < n; ++i) {
        Cplx acc = 0;
        for (int j = k; j < n; ++j) {
          Cplx m = b[static_cast<std::size_t>(k)](i, j);
          if (i == j) m -= phik;
          acc += m * z(j - k);
        }
        dz(i - k) = acc;
      }
      // lift scalars, outermost last
      Eigen::VectorXcd x = z.head(n - k);
      for (int m = k - 1; m >= 0; --m) {
        Eigen::VectorXcd w_prev = trajectories_[static_cast<std::size_t>(m)].value(t).head(n - m);
        Cplx neutral = w_prev(0);
        Cplx source = 0;
        for (int j = m + 1; j < n; ++j) {
          // x currently covers slots m+1..n-1
          source += b[static_cast<std::size_t>(m)](m, j) * x(j - (m + 1));
        }
        int idx = (n - k) + (k - 1 - m);
        Cplx g = z(idx);
        dz(idx) = (expo.phi_prime(m, t) - phik) * g + source / neutral;
        Eigen::VectorXcd lifted = g * w_prev;
        lifted.tail(x.size()) += x;
        x = std::move(lifted);
      }
      return dz;
    };

    // state = [w~ over slots k..n-1; lift scalars g_{k-1}, ..., g_0]
    Eigen::VectorXcd terminal = Eigen::VectorXcd::Zero(n);
    terminal(0) = 1.0;  // neutral slot of the reduced system
    Dopri5 stepper(cfg_.rk_rel_tol, cfg_.rk_abs_tol);
    HermiteTrajectory traj;
    stepper.integrate(rhs, cfg_.window_T, cfg_.window_t0, terminal, &traj);
    trajectories_.push_back(std::move(traj));
    return trajectories_.back();
  }

  const std::vector<HermiteTrajectory>& trajectories() const { return trajectories_; }

  // Full w-gauge vector of solution k at time t.
  Eigen::VectorXcd lifted(int k, double t) const {
    return detail::lifted_vector(*sys_, trajectories_, k,
                                 t, trajectories_[static_cast<std::size_t>(k)].value(t));
  }

  const DiagonalizedSystem& system() const { return *sys_; }

 private:
  std::shared_ptr<const DiagonalizedSystem> sys_;
  Config cfg_;
  std::vector<HermiteTrajectory> trajectories_;
};

// Plain backward integration of the w-equation for leading index k (no
// reduction).  Checks the Gronwall-type norm bound along the way.
struct WIntegration {
  HermiteTrajectory trajectory;
  double bound_margin = 0;  // max over nodes of |w| / exp(int 2|R|)
};

inline WIntegration integrate_w(const DiagonalizedSystem& sys, int k, double from_t, double to_t,
                                Eigen::VectorXcd init, const Config& cfg) {
  if (!(from_t > to_t) || !(to_t > 0)) {
    throw std::invalid_argument("integrate_w: need from_t > to_t > 0");
  }
  const auto& expo = sys.expo();
  auto rhs = [&sys, &expo, k](double t, const Eigen::VectorXcd& w) {
    Eigen::MatrixXcd m = sys.B(t);
    Cplx phik = expo.phi_prime(k, t);
    for (int i = 0; i < sys.size(); ++i) m(i, i) -= phik;
    return Eigen::VectorXcd(m * w);
  };
  Dopri5 stepper(cfg.rk_rel_tol, cfg.rk_abs_tol);
  WIntegration out;
  stepper.integrate(rhs, from_t, to_t, std::move(init), &out.trajectory);

  // |w(t)| <= |w(y)| exp(int_t^y 2 |R(s)| ds), with configurable slack
  double acc = 0;
  const auto& samples = out.trajectory.samples();
  double w0 = samples.front().y.norm();
  for (std::size_t s = 1; s < samples.size(); ++s) {
    double t1 = samples[s - 1].t, t2 = samples[s].t;
    double r1 = sys.R(t1).norm(), r2 = sys.R(t2).norm();
    acc += std::abs(t1 - t2) * (r1 + r2);  // trapezoid of 2|R|
    double bound = w0 * std::exp(acc);
    double margin = samples[s].y.norm() / bound;
    out.bound_margin = std::max(out.bound_margin, margin);
  }
  if (out.bound_margin > cfg.wbound_slack) {
    throw NumericalError("integrate_w: norm bound violated, margin " +
                         std::to_string(out.bound_margin));
  }
  return out;
}

// Builds the full canonical basis on the configured window.
inline BasisJet canonical_basis(const CoeffTable& table, const std::vector<Cplx>& roots,
                                Cplx gamma, const Config& cfg) {
  auto [ordered, perm] = order_roots(roots);
  auto sys = std::make_shared<const DiagonalizedSystem>(table, Frame(ordered, cfg.root_gap_min),
                                                        gamma, cfg.root_gap_min);
  BasisBuilder builder(sys, cfg);
  const int n = sys->size();
  for (int k = 0; k < n; ++k) builder.build_next();

  BasisJet basis;
  basis.n = n;
  basis.sign = table.sign;
  basis.gamma_param = gamma;
  basis.grid.resize(static_cast<std::size_t>(cfg.grid_points));
  for (int i = 0; i < cfg.grid_points; ++i) {
    basis.grid[static_cast<std::size_t>(i)] =
        cfg.window_t0 + (cfg.window_T - cfg.window_t0) * i / (cfg.grid_points - 1);
  }
  basis.system = sys;
  basis.scaled.assign(static_cast<std::size_t>(n),
                      Eigen::MatrixXcd::Zero(n, cfg.grid_points));
  const auto& expo = sys->expo();
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < cfg.grid_points; ++i) {
      double t = basis.grid[static_cast<std::size_t>(i)];
      Eigen::VectorXcd x = builder.lifted(k, t);
      Cplx phase = std::exp(Cplx(0, expo.phi(k, t).imag()));
      basis.scaled[static_cast<std::size_t>(k)].col(i) = phase * (sys->S(t) * x);
    }
  }
  basis.depth_states = builder.trajectories();

  // independence certificate: scaled Wronskian stays away from zero
  for (int i : {0, cfg.grid_points / 2, cfg.grid_points - 1}) {
    Eigen::MatrixXcd m(n, n);
    double colnorm = 1;
    for (int k = 0; k < n; ++k) m.col(k) = basis.scaled[static_cast<std::size_t>(k)].col(i);
    for (int k = 0; k < n; ++k) colnorm *= m.col(k).norm();
    double det = std::abs(Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant());
    if (!(det > 1e-10 * colnorm)) {
      throw NumericalError("canonical_basis: Wronskian collapse at node " + std::to_string(i));
    }
  }
  return basis;
}

inline BasisJet canonical_basis(const NcPolynomial& p, int sign, Cplx gamma, const Config& cfg) {
  auto rep = check_generic(p, cfg);
  if (!rep.is_generic) throw NumericalError("canonical_basis: operator is not generic");
  if (std::abs(gamma) < cfg.gamma_min) {
    throw NumericalError("canonical_basis: |gamma| below validated region");
  }
  auto table = to_numeric(coefficient_table(realize(p, sign)));
  return canonical_basis(table, rep.roots, gamma, cfg);
}

// Worst cubic-Hermite collocation defect of the stored jets, relative to the
// local solution scale.  An exact solution of u' = A u gives zero up to
// interpolation error; integration error surfaces here.
inline double max_ode_defect(const BasisJet& basis) {
  const auto& sys = *basis.system;
  const auto& expo = basis.expo();
  const int n = basis.n;
  double worst = 0;
  for (int k = 0; k < n; ++k) {
    const auto& jets = basis.scaled[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i + 1 < basis.grid.size(); i += 7) {
      double ta = basis.grid[i], tb = basis.grid[i + 1];
      double h = tb - ta;
      Eigen::VectorXcd ya = jets.col(static_cast<Eigen::Index>(i));
      Eigen::VectorXcd yb = jets.col(static_cast<Eigen::Index>(i + 1));
      auto scaled_rhs = [&](double t, const Eigen::VectorXcd& y) {
        Eigen::MatrixXcd a = sys.companion().A(t);
        double re_phi_prime = expo.phi_prime(k, t).real();
        return Eigen::VectorXcd(a * y - re_phi_prime * y);
      };
      Eigen::VectorXcd da = scaled_rhs(ta, ya);
      Eigen::VectorXcd db = scaled_rhs(tb, yb);
      double tm = 0.5 * (ta + tb);
      // cubic Hermite value and slope at the midpoint
      Eigen::VectorXcd hm = 0.5 * (ya + yb) + 0.125 * h * (da - db);
      Eigen::VectorXcd hs = 1.5 * (yb - ya) / h - 0.25 * (da + db);
      Eigen::MatrixXcd am = sys.companion().A(tm);
      double re_phi = expo.phi_prime(k, tm).real();
      Eigen::VectorXcd want = am * hm - re_phi * hm;
      double scale = want.norm() + hm.norm() * (am.norm() + std::abs(re_phi)) + 1e-300;
      worst = std::max(worst, (hs - want).norm() / scale);
    }
  }
  return worst;
}

}  // namespace hsolv
