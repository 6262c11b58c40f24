#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "hsolv/config.hpp"
#include "hsolv/nc_polynomial.hpp"

namespace hsolv {

// Horner evaluation of p(z) = sum coeffs[k] z^k and its derivative.
inline std::pair<Cplx, Cplx> poly_eval(const std::vector<Cplx>& coeffs, Cplx z) {
  Cplx p = 0, dp = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    dp = dp * z + p;
    p = p * z + *it;
  }
  return {p, dp};
}

// Aberth-Ehrlich simultaneous iteration.  Seeds sit on a circle of radius
// 1 + max|coeff| with an angular offset that breaks axis symmetry.
inline std::vector<Cplx> aberth_roots(const std::vector<Cplx>& coeffs, int max_iter = 200,
                                      double tol = 1e-14) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n < 1) return {};
  double maxc = 0;
  for (const auto& c : coeffs) maxc = std::max(maxc, std::abs(c));
  const double radius = 1.0 + maxc / std::abs(coeffs.back());
  std::vector<Cplx> z(static_cast<std::size_t>(n));
  const double two_pi = 2.0 * 3.14159265358979323846;
  for (int k = 0; k < n; ++k) {
    double angle = two_pi * k / n + 0.4;
    z[static_cast<std::size_t>(k)] = radius * Cplx(std::cos(angle), std::sin(angle));
  }
  for (int iter = 0; iter < max_iter; ++iter) {
    double worst = 0;
    for (int k = 0; k < n; ++k) {
      auto [p, dp] = poly_eval(coeffs, z[static_cast<std::size_t>(k)]);
      if (p == Cplx(0)) continue;
      Cplx newton = (dp == Cplx(0)) ? Cplx(1) : p / dp;
      Cplx repulse = 0;
      for (int j = 0; j < n; ++j) {
        if (j == k) continue;
        Cplx diff = z[static_cast<std::size_t>(k)] - z[static_cast<std::size_t>(j)];
        if (std::abs(diff) < 1e-300) diff = Cplx(1e-300, 0);
        repulse += Cplx(1) / diff;
      }
      Cplx denom = Cplx(1) - newton * repulse;
      Cplx step = (std::abs(denom) < 1e-300) ? newton : newton / denom;
      z[static_cast<std::size_t>(k)] -= step;
      worst = std::max(worst, std::abs(step) / (1.0 + std::abs(z[static_cast<std::size_t>(k)])));
    }
    if (worst < tol) return z;
  }
  throw NumericalError("aberth_roots: no convergence after max iterations");
}

// Eigenvalues of the monic companion matrix, the independent cross-check.
inline std::vector<Cplx> companion_roots(const std::vector<Cplx>& coeffs) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n < 1) return {};
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  const Cplx lead = coeffs.back();
  for (int j = 0; j < n; ++j) {
    comp(n - 1, j) = -coeffs[static_cast<std::size_t>(j)] / lead;
    if (j + 1 < n) comp(j + 1, j) = 1.0;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
  if (es.info() != Eigen::Success) {
    throw NumericalError("companion_roots: eigensolver failed");
  }
  std::vector<Cplx> roots(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) roots[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
  return roots;
}

// Greedy nearest matching between two root lists; returns the worst paired
// distance, infinity when the lists cannot be matched.
inline double root_set_distance(std::vector<Cplx> a, std::vector<Cplx> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0;
  for (const auto& ra : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      double d = std::abs(ra - b[j]);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    worst = std::max(worst, best);
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(arg));
  }
  return worst;
}

// Roots of z -> P_n(iz, 1), computed by simultaneous iteration and by
// companion eigenvalues; disagreement beyond tolerance is an error.
inline std::vector<Cplx> characteristic_roots(const NcPolynomial& p_top,
                                              const Config& cfg = {}) {
  auto exact = symbol_coefficients(p_top);
  std::vector<Cplx> coeffs(exact.size());
  for (std::size_t k = 0; k < exact.size(); ++k) coeffs[k] = exact[k].to_complex();
  if (coeffs.size() < 2) {
    throw NumericalError("characteristic_roots: symbol is constant");
  }
  auto r1 = aberth_roots(coeffs);
  auto r2 = companion_roots(coeffs);
  double scale = 0;
  for (const auto& r : r1) scale = std::max(scale, std::abs(r));
  double dist = root_set_distance(r1, r2);
  if (dist > cfg.root_xcheck_tol * std::max(1.0, scale)) {
    throw NumericalError("characteristic_roots: methods disagree by " + std::to_string(dist));
  }
  for (std::size_t i = 0; i < r1.size(); ++i) {
    for (std::size_t j = i + 1; j < r1.size(); ++j) {
      if (std::abs(r1[i] - r1[j]) <= cfg.root_gap_min) {
        throw NumericalError("characteristic_roots: repeated roots");
      }
    }
  }
  return r1;
}

// Sort so that for j < l: Re(g_j - g_l) >= 0, with real-part ties broken by
// Im(g_j - g_l) > 0.  Also returns the permutation applied.
inline std::pair<std::vector<Cplx>, std::vector<int>> order_roots(const std::vector<Cplx>& roots,
                                                                  double gap_tol = 1e-12) {
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (std::abs(roots[i] - roots[j]) <= gap_tol) {
        throw NumericalError("order_roots: duplicate roots");
      }
    }
  }
  std::vector<int> perm(roots.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](int a, int b) {
    const Cplx& ra = roots[static_cast<std::size_t>(a)];
    const Cplx& rb = roots[static_cast<std::size_t>(b)];
    if (ra.real() != rb.real()) return ra.real() > rb.real();
    return ra.imag() > rb.imag();
  });
  std::vector<Cplx> sorted(roots.size());
  for (std::size_t k = 0; k < roots.size(); ++k) sorted[k] = roots[static_cast<std::size_t>(perm[k])];
  return {sorted, perm};
}

struct GenericityReport {
  bool is_generic = false;
  Cplx monic_defect = 0;    // coefficient of z^n in P_n(iz, 0), minus one
  double min_root_gap = 0;  // minimum pairwise root distance
  std::vector<Cplx> roots;  // roots of P_n(iz, 1), unordered
};

// Verifies P_n(iz,0) = z^n and distinctness of the roots of P_n(iz,1).
inline GenericityReport check_generic(const NcPolynomial& p, const Config& cfg = {}) {
  const int n = p.degree();
  if (n < 2) throw std::invalid_argument("check_generic: operator degree must be >= 2");
  NcPolynomial top = homogeneous_part(p, n);

  GenericityReport rep;
  // P_n(iz, 0) retains only the all-X word, so the defect is i^n c_{X^n} - 1.
  GRational lead = top.coeff(NcWord(static_cast<std::size_t>(n), 'X'));
  const GRational i = GRational::i_unit();
  for (int k = 0; k < n; ++k) lead *= i;
  rep.monic_defect = lead.to_complex() - Cplx(1);

  auto coeffs = symbol_coefficients(top);
  bool monic = std::abs(rep.monic_defect) <= cfg.monic_defect_tol;
  if (monic && static_cast<int>(coeffs.size()) == n + 1) {
    try {
      rep.roots = characteristic_roots(top, cfg);
    } catch (const NumericalError&) {
      rep.roots.clear();
    }
  }
  if (rep.roots.size() >= 2) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < rep.roots.size(); ++a) {
      for (std::size_t b = a + 1; b < rep.roots.size(); ++b) {
        gap = std::min(gap, std::abs(rep.roots[a] - rep.roots[b]));
      }
    }
    rep.min_root_gap = gap;
  }
  rep.is_generic = monic && static_cast<int>(rep.roots.size()) == n &&
                   rep.min_root_gap > cfg.root_gap_min;
  return rep;
}

}  // namespace hsolv
