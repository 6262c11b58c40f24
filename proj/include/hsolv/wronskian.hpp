#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

#include "hsolv/kernel_basis.hpp"

namespace hsolv {

// Adjoint operator coefficients at fixed gamma: for L = sum c_j(t) d^j the
// adjoint is L* = sum_j (-1)^j d^j (conj(c_j) .); expanding gives
// c*_m(t) = sum_{j>=m} (-1)^j C(j, j-m) (d/dt)^{j-m} conj(c_j)(t).
inline std::vector<std::vector<Cplx>> adjoint_assembled_polys(const CoeffTable& table,
                                                              Cplx gamma) {
  const int n = table.n;
  std::vector<std::vector<Cplx>> c(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) {
    if (j == n) {
      c[static_cast<std::size_t>(j)] = {Cplx(1)};
    } else {
      c[static_cast<std::size_t>(j)] = assembled_coefficient_poly(table, j, gamma);
    }
    for (auto& coeff : c[static_cast<std::size_t>(j)]) coeff = std::conj(coeff);
  }
  std::vector<std::vector<Cplx>> adj(static_cast<std::size_t>(n) + 1, std::vector<Cplx>{Cplx(0)});
  for (int j = 0; j <= n; ++j) {
    double sign = (j % 2 == 0) ? 1.0 : -1.0;
    std::vector<Cplx> deriv = c[static_cast<std::size_t>(j)];
    double binom = 1;  // C(j, j-m) accumulated from m = j downwards
    for (int m = j; m >= 0; --m) {
      auto& slot = adj[static_cast<std::size_t>(m)];
      if (slot.size() < deriv.size()) slot.resize(deriv.size(), Cplx(0));
      for (std::size_t i = 0; i < deriv.size(); ++i) slot[i] += sign * binom * deriv[i];
      binom = binom * m / (j - m + 1.0);
      deriv = poly_derivative(deriv);
    }
  }
  return adj;
}

// Companion matrix of the adjoint operator (monic after dividing by (-1)^n).
inline Eigen::MatrixXcd adjoint_companion_at(const std::vector<std::vector<Cplx>>& adj, Cplx t) {
  const int n = static_cast<int>(adj.size()) - 1;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) a(k, k + 1) = 1.0;
  Cplx lead = adj.back()[0];  // (-1)^n
  for (int j = 0; j < n; ++j) {
    a(n - 1, j) = -eval_poly(adj[static_cast<std::size_t>(j)], t) / lead;
  }
  return a;
}

// Wronskian data on the basis grid: the log of W with the exponential bulk
// split off, plus jets of the quotients h_j = W_j / W to order n.
struct WronskianData {
  std::vector<double> grid;
  // log W(t) = phi_sum(t) + slow(t); slow is continuous in t (arg unwrapped).
  std::vector<Cplx> slow_log;
  std::vector<Cplx> phi_sum;
  // h_scaled[m] holds at column node the vector (over j) of
  // h_j^(m)(t) * exp(+Re Phi_j(t)); raw jets reattach the factor.
  std::vector<Eigen::MatrixXcd> h_scaled;  // m = 0..n, each n x grid
};

inline WronskianData wronskians(const BasisJet& basis) {
  const int n = basis.n;
  const auto& sys = *basis.system;
  const auto& expo = basis.expo();
  WronskianData out;
  out.grid = basis.grid;
  out.slow_log.resize(basis.grid.size());
  out.phi_sum.resize(basis.grid.size());
  out.h_scaled.assign(static_cast<std::size_t>(n) + 1,
                      Eigen::MatrixXcd::Zero(n, static_cast<Eigen::Index>(basis.grid.size())));
  double prev_arg = 0;
  double arg_shift = 0;
  for (std::size_t node = 0; node < basis.grid.size(); ++node) {
    double t = basis.grid[node];
    Eigen::MatrixXcd m(n, n);
    for (int k = 0; k < n; ++k) m.col(k) = basis.scaled[static_cast<std::size_t>(k)].col(
        static_cast<Eigen::Index>(node));
    Cplx det = Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
    double ln_abs = std::log(std::abs(det));
    double arg = std::arg(det);
    if (node > 0) {
      double delta = arg - prev_arg;
      while (delta > 3.14159265358979323846) {
        arg_shift -= 2 * 3.14159265358979323846;
        delta -= 2 * 3.14159265358979323846;
      }
      while (delta < -3.14159265358979323846) {
        arg_shift += 2 * 3.14159265358979323846;
        delta += 2 * 3.14159265358979323846;
      }
    }
    prev_arg = arg;
    out.slow_log[node] = Cplx(ln_abs, arg + arg_shift);
    Cplx phis = 0;
    for (int k = 0; k < n; ++k) phis += expo.phi(k, t);
    // The scaled determinant absorbed exp(i Im Phi) per column already; keep
    // only the real part of the phi bulk to avoid double counting.
    out.phi_sum[node] = Cplx(phis.real(), 0.0);

    // V~ = (scaled M)^{-1}; rows carry exp(+Re Phi_j) relative to M^{-1}.
    Eigen::MatrixXcd v = m.inverse();
    std::vector<Eigen::MatrixXcd> v_derivs;
    v_derivs.push_back(v);
    std::vector<Eigen::MatrixXcd> a_derivs;
    for (int d = 0; d < n; ++d) a_derivs.push_back(sys.companion().A_derivative(t, d));
    for (int m_ord = 0; m_ord < n; ++m_ord) {
      Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(n, n);
      double binom = 1;
      for (int i = m_ord; i >= 0; --i) {
        next -= binom * v_derivs[static_cast<std::size_t>(i)] *
                a_derivs[static_cast<std::size_t>(m_ord - i)];
        binom = binom * i / (m_ord - i + 1.0);
      }
      v_derivs.push_back(std::move(next));
    }
    for (int m_ord = 0; m_ord <= n; ++m_ord) {
      out.h_scaled[static_cast<std::size_t>(m_ord)].col(static_cast<Eigen::Index>(node)) =
          v_derivs[static_cast<std::size_t>(m_ord)].col(n - 1);
    }
  }
  return out;
}

// Raw h_j jet at a grid node; only safe when Re Phi_j stays within double
// range, which callers guarantee on desk-scale windows.
inline Cplx h_jet_raw(const BasisJet& basis, const WronskianData& w, int j, int order,
                      std::size_t node) {
  double t = w.grid[node];
  double l = basis.log_scale(j, t);
  return w.h_scaled[static_cast<std::size_t>(order)](j, static_cast<Eigen::Index>(node)) *
         std::exp(-l);
}

// Central-difference Abel check: d/dt log W vs trace A; returns worst
// absolute deviation relative to 1 + |trace|.
inline double abel_defect(const BasisJet& basis, const WronskianData& w) {
  const auto& sys = *basis.system;
  double worst = 0;
  for (std::size_t i = 1; i + 1 < w.grid.size(); ++i) {
    double h = w.grid[i + 1] - w.grid[i - 1];
    // slow_log carries the Im Phi phases, phi_sum the Re Phi bulk; their sum
    // differentiates to d/dt log W.
    Cplx dlog = (w.slow_log[i + 1] + w.phi_sum[i + 1] - w.slow_log[i - 1] - w.phi_sum[i - 1]) /
                Cplx(h);
    Cplx want = sys.companion().trace_A(w.grid[i]);
    double dev = std::abs(dlog - want) / (1.0 + std::abs(want));
    worst = std::max(worst, dev);
  }
  return worst;
}

// Residual of the adjoint operator applied to the conjugated quotients,
// relative to the local term scale; computed entirely in scaled space.
inline double adjoint_kernel_residual(const BasisJet& basis, const WronskianData& w) {
  const auto& sys = *basis.system;
  auto adj = adjoint_assembled_polys(sys.table(), sys.gamma());
  const int n = basis.n;
  double worst = 0;
  for (std::size_t node = 0; node < w.grid.size(); node += 5) {
    double t = w.grid[node];
    for (int j = 0; j < n; ++j) {
      Cplx acc = 0;
      double scale = 1e-300;
      for (int m = 0; m <= n; ++m) {
        Cplx cm = eval_poly(adj[static_cast<std::size_t>(m)], t);
        Cplx term = cm * std::conj(w.h_scaled[static_cast<std::size_t>(m)](
                             j, static_cast<Eigen::Index>(node)));
        acc += term;
        scale = std::max(scale, std::abs(term));
      }
      worst = std::max(worst, std::abs(acc) / scale);
    }
  }
  return worst;
}

}  // namespace hsolv
