#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "hsolv/wronskian.hpp"

namespace hsolv {

// Jet-matching report at t = 0: p (resp. q) adjoint-kernel directions decay
// at +inf (resp. -inf); sigma_min near zero flags a nontrivial intersection,
// i.e. a Schwartz adjoint-kernel candidate.
struct MatchReport {
  int p = 0;
  int q = 0;
  Eigen::MatrixXcd jets_at_zero;  // n x (p+q), columns normalized
  double sigma_min = 0;
  Cplx gamma = 0;
};

namespace detail {

// Integrates the adjoint companion system from t0 down to 0 for every
// decaying quotient of the basis; returns unit-normalized jet columns.
inline std::vector<Eigen::VectorXcd> adjoint_jets_at_zero(const BasisJet& basis,
                                                          const Config& cfg) {
  const auto& sys = *basis.system;
  const auto& expo = basis.expo();
  const int n = basis.n;
  auto w = wronskians(basis);
  auto adj = adjoint_assembled_polys(sys.table(), sys.gamma());
  auto rhs = [&adj](double t, const Eigen::VectorXcd& y) {
    return Eigen::VectorXcd(adjoint_companion_at(adj, t) * y);
  };
  Dopri5 stepper(cfg.rk_rel_tol, cfg.rk_abs_tol);
  std::vector<Eigen::VectorXcd> jets;
  for (int j = 0; j < n; ++j) {
    if (!(expo.gammas[static_cast<std::size_t>(j)].real() > cfg.re_thresh)) continue;
    Eigen::VectorXcd init(n);
    for (int m = 0; m < n; ++m) init(m) = std::conj(h_jet_raw(basis, w, j, m, 0));
    double norm = init.norm();
    if (!(norm > 0)) throw NumericalError("schwartz_match: degenerate adjoint seed");
    init /= norm;
    jets.push_back(stepper.integrate(rhs, basis.grid.front(), 0.0, init));
  }
  return jets;
}

inline double padded_sigma_min(const Eigen::MatrixXcd& m) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  if (cols <= rows) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
  }
  Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(cols, cols);
  padded.topRows(rows) = m;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(padded);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace detail

// Schwartz-matching scan at one parameter value.  The minus side of the real
// line maps to the same realization at parameter -gamma via t -> -t, so both
// sides reuse one basis pipeline.
inline MatchReport schwartz_match(const CoeffTable& table, const std::vector<Cplx>& roots,
                                  Cplx gamma, const Config& cfg) {
  for (const auto& r : roots) {
    if (std::abs(r.real()) <= cfg.re_thresh) {
      throw NumericalError("schwartz_match: root with vanishing real part");
    }
  }
  BasisJet plus = canonical_basis(table, roots, gamma, cfg);
  BasisJet minus = canonical_basis(table, roots, -gamma, cfg);
  auto plus_jets = detail::adjoint_jets_at_zero(plus, cfg);
  auto minus_jets = detail::adjoint_jets_at_zero(minus, cfg);

  MatchReport rep;
  rep.gamma = gamma;
  rep.p = static_cast<int>(plus_jets.size());
  rep.q = static_cast<int>(minus_jets.size());
  const int n = table.n;
  rep.jets_at_zero = Eigen::MatrixXcd::Zero(n, rep.p + rep.q);
  for (int c = 0; c < rep.p; ++c) {
    rep.jets_at_zero.col(c) = plus_jets[static_cast<std::size_t>(c)].normalized();
  }
  for (int c = 0; c < rep.q; ++c) {
    Eigen::VectorXcd jet = minus_jets[static_cast<std::size_t>(c)];
    for (int m = 1; m < n; m += 2) jet(m) = -jet(m);  // d/dt = -d/ds at t = 0
    rep.jets_at_zero.col(rep.p + c) = jet.normalized();
  }
  rep.sigma_min = detail::padded_sigma_min(rep.jets_at_zero);
  return rep;
}

inline MatchReport schwartz_match(const NcPolynomial& p, int sign, Cplx gamma,
                                  const Config& cfg) {
  auto rep = check_generic(p, cfg);
  if (!rep.is_generic) throw NumericalError("schwartz_match: operator is not generic");
  auto table = to_numeric(coefficient_table(realize(p, sign)));
  return schwartz_match(table, rep.roots, gamma, cfg);
}

// One row of a parameter scan.
struct ScanRow {
  double gamma;
  double sigma_min;
  int p;
  int q;
};

struct ScanResult {
  std::vector<ScanRow> rows;          // base grid, ascending gamma
  std::vector<ScanRow> refined_rows;  // extra samples taken around dips
  bool limit_point_flag = false;
  int base_dips = 0;
  int refined_dips = 0;
};

namespace detail {

inline int count_dip_clusters(const std::vector<ScanRow>& rows, double tol) {
  int clusters = 0;
  bool inside = false;
  for (const auto& r : rows) {
    bool low = r.sigma_min < tol;
    if (low && !inside) ++clusters;
    inside = low;
  }
  return clusters;
}

}  // namespace detail

// Scans sigma_min over a gamma interval with local refinement around dips.
// The accumulation flag is evidence, never proof: it fires when refinement
// keeps producing sub-tolerance dips (or when the dip set saturates the
// interval).
inline ScanResult gamma_scan(const CoeffTable& table, const std::vector<Cplx>& roots,
                             double lo, double hi, int points, const Config& cfg) {
  if (!(lo > 0) || !(hi > lo) || points < 2) {
    throw std::invalid_argument("gamma_scan: invalid interval");
  }
  ScanResult result;
  auto eval = [&](double g) {
    auto rep = schwartz_match(table, roots, Cplx(g, 0), cfg);
    return ScanRow{g, rep.sigma_min, rep.p, rep.q};
  };
  for (int i = 0; i < points; ++i) {
    double g = lo + (hi - lo) * i / (points - 1);
    result.rows.push_back(eval(g));
  }
  result.base_dips = detail::count_dip_clusters(result.rows, cfg.sigma_tol);
  int low_count = static_cast<int>(std::count_if(
      result.rows.begin(), result.rows.end(),
      [&](const ScanRow& r) { return r.sigma_min < cfg.sigma_tol; }));

  // Saturated scans (every sample deficient) are already conclusive evidence.
  if (low_count == points) {
    result.refined_rows = result.rows;
    result.refined_dips = result.base_dips;
    result.limit_point_flag = true;
    return result;
  }
  if (result.base_dips == 0) {
    result.limit_point_flag = false;
    return result;
  }
  // refine around each dip cluster with double resolution
  double step = (hi - lo) / (points - 1);
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    if (result.rows[i].sigma_min >= cfg.sigma_tol) continue;
    double g0 = std::max(lo, result.rows[i].gamma - step);
    double g1 = std::min(hi, result.rows[i].gamma + step);
    for (int k = 0; k < 5; ++k) {
      double g = g0 + (g1 - g0) * (k + 0.5) / 5.0;
      result.refined_rows.push_back(eval(g));
    }
  }
  std::sort(result.refined_rows.begin(), result.refined_rows.end(),
            [](const ScanRow& a, const ScanRow& b) { return a.gamma < b.gamma; });
  result.refined_dips = detail::count_dip_clusters(result.refined_rows, cfg.sigma_tol);
  result.limit_point_flag = result.refined_dips > result.base_dips;
  return result;
}

// Transition matrix A with phi_minus = A phi_plus at t = 0, both bases
// continued inward from their window anchors.
struct TransitionReport {
  Eigen::MatrixXcd a;
  std::vector<int> degenerate_rows;  // rows whose leading entries decay along a gamma sequence
};

namespace detail {

inline Eigen::MatrixXcd basis_jets_at_zero(const BasisJet& basis, const Config& cfg,
                                           bool flip_odd) {
  const auto& sys = *basis.system;
  const int n = basis.n;
  auto rhs = [&sys](double t, const Eigen::VectorXcd& y) {
    return Eigen::VectorXcd(sys.companion().A(t) * y);
  };
  Dopri5 stepper(cfg.rk_rel_tol, cfg.rk_abs_tol);
  Eigen::MatrixXcd jets(n, n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXcd init = basis.scaled[static_cast<std::size_t>(k)].col(0);
    Eigen::VectorXcd at0 = stepper.integrate(rhs, basis.grid.front(), 0.0, init);
    if (flip_odd) {
      for (int m = 1; m < n; m += 2) at0(m) = -at0(m);
    }
    jets.col(k) = at0;
  }
  return jets;
}

}  // namespace detail

// Solves the jet-matching system between two bases evaluated at t = 0.  The
// bases enter in scaled form; the log factors exp(Re Phi_k(t0)) reattach as
// explicit exponent differences.
inline TransitionReport transition_matrix(const BasisJet& plus, const BasisJet& minus,
                                          const Config& cfg) {
  if (plus.n != minus.n) throw std::invalid_argument("transition_matrix: size mismatch");
  const int n = plus.n;
  Eigen::MatrixXcd zp = detail::basis_jets_at_zero(plus, cfg, false);
  Eigen::MatrixXcd zm = detail::basis_jets_at_zero(minus, cfg, true);
  Eigen::MatrixXcd at = zp.partialPivLu().solve(zm);  // A^T in scaled normalization
  TransitionReport rep;
  rep.a = Eigen::MatrixXcd(n, n);
  double t0p = plus.grid.front(), t0m = minus.grid.front();
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      double expo_diff = minus.log_scale(i, t0m) - plus.log_scale(k, t0p);
      rep.a(i, k) = at(k, i) * std::exp(expo_diff);
    }
  }
  return rep;
}

// Geometric-decay heuristic on rows of a transition-matrix family sampled
// along an increasing gamma sequence ("srd" rows).
inline std::vector<int> degenerate_rows(const std::vector<Eigen::MatrixXcd>& family,
                                        int leading_cols, double decay_ratio = 0.5) {
  if (family.empty() || leading_cols <= 0) return {};
  const int n = static_cast<int>(family.front().rows());
  std::vector<int> rows;
  for (int r = 0; r < n; ++r) {
    bool decays = true;
    for (int c = 0; c < leading_cols && decays; ++c) {
      for (std::size_t s = 1; s < family.size(); ++s) {
        double prev = std::abs(family[s - 1](r, c));
        double cur = std::abs(family[s](r, c));
        if (!(cur <= decay_ratio * prev + 1e-300)) {
          decays = false;
          break;
        }
      }
    }
    if (decays) rows.push_back(r);
  }
  return rows;
}

}  // namespace hsolv
