#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

#include "hsolv/config.hpp"
#include "hsolv/ode_realization.hpp"
#include "hsolv/roots.hpp"

namespace hsolv {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Vandermonde frame S0 diagonalizing the principal companion part:
// A0 S0 = S0 Lambda0 with [S0(t)]_{i,j} = (g_j t)^i.  Row scaling gives
// S0(t) = diag(t^i) S0(1), so one cached inverse at t = 1 serves every t.
class Frame {
 public:
  explicit Frame(std::vector<Cplx> ordered_roots, double gap_floor = 1e-8)
      : roots_(std::move(ordered_roots)) {
    const int n = static_cast<int>(roots_.size());
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (std::abs(roots_[static_cast<std::size_t>(a)] - roots_[static_cast<std::size_t>(b)]) <
            gap_floor) {
          throw NumericalError("Frame: root gap below floor");
        }
      }
    }
    s0_one_ = MatrixXcd(n, n);
    for (int j = 0; j < n; ++j) {
      Cplx p = 1;
      for (int i = 0; i < n; ++i) {
        s0_one_(i, j) = p;
        p *= roots_[static_cast<std::size_t>(j)];
      }
    }
    // Row j of the inverse holds the coefficients of the Lagrange basis
    // polynomial for node g_j; exact up to roundoff and well conditioned
    // for the desk-scale degrees used here.
    s0_inv_one_ = MatrixXcd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      std::vector<Cplx> num{1.0};
      Cplx den = 1;
      for (int k = 0; k < n; ++k) {
        if (k == j) continue;
        std::vector<Cplx> next(num.size() + 1, Cplx(0));
        for (std::size_t m = 0; m < num.size(); ++m) {
          next[m + 1] += num[m];
          next[m] -= num[m] * roots_[static_cast<std::size_t>(k)];
        }
        num = std::move(next);
        den *= roots_[static_cast<std::size_t>(j)] - roots_[static_cast<std::size_t>(k)];
      }
      for (int i = 0; i < n; ++i) s0_inv_one_(j, i) = num[static_cast<std::size_t>(i)] / den;
    }
  }

  int size() const { return static_cast<int>(roots_.size()); }
  const std::vector<Cplx>& roots() const { return roots_; }
  Cplx root(int j) const { return roots_[static_cast<std::size_t>(j)]; }

  const MatrixXcd& s0_one() const { return s0_one_; }
  const MatrixXcd& s0_inv_one() const { return s0_inv_one_; }

  MatrixXcd s0(Cplx t) const {
    MatrixXcd m = s0_one_;
    Cplx p = 1;
    for (int i = 0; i < size(); ++i) {
      m.row(i) *= p;
      p *= t;
    }
    return m;
  }

  // Column scaling identity: [S0^{-1}(t)]_{:,j} = t^{-j} [S0^{-1}(1)]_{:,j}.
  MatrixXcd s0_inv(Cplx t) const {
    MatrixXcd m = s0_inv_one_;
    Cplx q = 1;
    for (int j = 0; j < size(); ++j) {
      m.col(j) = s0_inv_one_.col(j) / q;
      q *= t;
    }
    return m;
  }

  MatrixXcd s0_prime(Cplx t) const {
    MatrixXcd m = s0_one_;
    Cplx p = 1;  // t^{i-1}
    for (int i = 0; i < size(); ++i) {
      if (i == 0) {
        m.row(i).setZero();
      } else {
        m.row(i) *= static_cast<double>(i) * p;
        p *= t;
      }
    }
    return m;
  }

  MatrixXcd lambda0(Cplx t) const {
    MatrixXcd m = MatrixXcd::Zero(size(), size());
    for (int j = 0; j < size(); ++j) m(j, j) = roots_[static_cast<std::size_t>(j)] * t;
    return m;
  }

  // (1/t) * this matrix equals S0^{-1} S0'.
  MatrixXcd s0inv_s0prime_scaled() const {
    const int n = size();
    MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Cplx acc = 0;
        Cplx p = 1;  // g_j^k
        for (int k = 0; k < n; ++k) {
          acc += static_cast<double>(k) * s0_inv_one_(i, k) * p;
          p *= roots_[static_cast<std::size_t>(j)];
        }
        m(i, j) = acc;
      }
    }
    return m;
  }

  Cplx det_s0_one() const { return s0_one_.partialPivLu().determinant(); }

 private:
  std::vector<Cplx> roots_;
  MatrixXcd s0_one_;
  MatrixXcd s0_inv_one_;
};

inline Frame build_frame(const std::vector<Cplx>& ordered_roots, double gap_floor = 1e-8) {
  return Frame(ordered_roots, gap_floor);
}

// Constant data of the last-row error blocks E1, E2 and their conjugated
// forms D_i = S0^{-1} E_i S0.
struct ErrorBlocks {
  VectorXcd a;     // a_k = -d_{n-1,k} / gamma            (k = derivative order)
  VectorXcd b;     // b_k = -(e_{n,k,1} + d_{n-2,k}/gamma^2)
  MatrixXcd d1;    // D1, constant in t
  MatrixXcd d2c;   // t * D2, constant in t
};

inline ErrorBlocks error_blocks(const CoeffTable& table, const Frame& frame, Cplx gamma) {
  const int n = table.n;
  ErrorBlocks blocks;
  blocks.a = VectorXcd::Zero(n);
  blocks.b = VectorXcd::Zero(n);
  for (int k = 0; k < n; ++k) {
    blocks.a(k) = -table.d_at(n - 1, k) / gamma;
    blocks.b(k) = -(table.e_at(n, k, 1) + table.d_at(n - 2, k) / (gamma * gamma));
  }
  blocks.d1 = MatrixXcd::Zero(n, n);
  blocks.d2c = MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Cplx sum_a = 0, sum_b = 0;
      Cplx p = 1;
      for (int k = 0; k < n; ++k) {
        sum_a += blocks.a(k) * p;
        sum_b += blocks.b(k) * p;
        p *= frame.root(j);
      }
      blocks.d1(i, j) = frame.s0_inv_one()(i, n - 1) * sum_a;
      blocks.d2c(i, j) = frame.s0_inv_one()(i, n - 1) * sum_b;
    }
  }
  return blocks;
}

// Correction matrices of the near-diagonalizing gauge S = S0 (I + A/t + D/t^2).
struct GaugeData {
  MatrixXcd alpha;  // zero diagonal
  MatrixXcd delta;  // zero diagonal
  MatrixXcd d1;
  MatrixXcd d2c;
  MatrixXcd r2c;    // t * (D2 + [D1,A] + A[A,L0] - S0^{-1}S0'); rho sits on its diagonal
};

inline GaugeData solve_gauge(const Frame& frame, const ErrorBlocks& blocks,
                             double gap_floor = 1e-8) {
  const int n = frame.size();
  GaugeData g;
  g.d1 = blocks.d1;
  g.d2c = blocks.d2c;
  g.alpha = MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Cplx gap = frame.root(j) - frame.root(i);
      if (std::abs(gap) < gap_floor) throw NumericalError("solve_gauge: root gap below floor");
      g.alpha(i, j) = blocks.d1(i, j) / gap;
    }
  }
  // Full commutator [A, L0] (scaled by t cancels): entries alpha_ij (g_j - g_i).
  MatrixXcd comm = MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) comm(i, j) = g.alpha(i, j) * (frame.root(j) - frame.root(i));
    }
  }
  g.r2c = blocks.d2c + (blocks.d1 * g.alpha - g.alpha * blocks.d1) + g.alpha * comm -
          frame.s0inv_s0prime_scaled();
  g.delta = MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      g.delta(i, j) = g.r2c(i, j) / (frame.root(j) - frame.root(i));
    }
  }
  return g;
}

// Per-root exponent data: Phi_j(t) = g_j t^2/2 + beta_j t + rho_j log t.
struct ExponentData {
  std::vector<Cplx> gammas;
  VectorXcd beta;
  VectorXcd rho;
  VectorXcd rho_limit;  // gamma -> infinity limit, depends only on the top grade
  Cplx gamma_param = 1;

  int size() const { return static_cast<int>(gammas.size()); }

  Cplx phi(int j, Cplx t) const {
    return gammas[static_cast<std::size_t>(j)] * t * t / 2.0 + beta(j) * t + rho(j) * std::log(t);
  }
  Cplx phi_prime(int j, Cplx t) const {
    return gammas[static_cast<std::size_t>(j)] * t + beta(j) + rho(j) / t;
  }
  Cplx phi_second(int j, Cplx t) const {
    return gammas[static_cast<std::size_t>(j)] - rho(j) / (t * t);
  }
};

inline ExponentData exponents(const CoeffTable& table, const Frame& frame, Cplx gamma,
                              double gap_floor = 1e-8) {
  auto blocks = error_blocks(table, frame, gamma);
  auto gauge = solve_gauge(frame, blocks, gap_floor);
  ExponentData e;
  e.gammas = frame.roots();
  e.gamma_param = gamma;
  e.beta = gauge.d1.diagonal();
  e.rho = gauge.r2c.diagonal();

  // Limit frame: a = 0 kills D1 (and with it alpha), b keeps only e_{n,k,1}.
  ErrorBlocks limit;
  const int n = table.n;
  limit.a = VectorXcd::Zero(n);
  limit.b = VectorXcd::Zero(n);
  for (int k = 0; k < n; ++k) limit.b(k) = -table.e_at(n, k, 1);
  limit.d1 = MatrixXcd::Zero(n, n);
  limit.d2c = MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Cplx sum_b = 0;
      Cplx p = 1;
      for (int k = 0; k < n; ++k) {
        sum_b += limit.b(k) * p;
        p *= frame.root(j);
      }
      limit.d2c(i, j) = frame.s0_inv_one()(i, n - 1) * sum_b;
    }
  }
  auto gauge_limit = solve_gauge(frame, limit, gap_floor);
  e.rho_limit = gauge_limit.r2c.diagonal();
  return e;
}

// Full diagonalized system: S = S0 (I + A/t + D/t^2), B = S^{-1}(A S - S'),
// B = Lambda + R with R = O(t^-2).
class DiagonalizedSystem {
 public:
  DiagonalizedSystem(CoeffTable table, Frame frame, Cplx gamma, double gap_floor = 1e-8)
      : table_(std::move(table)),
        frame_(std::move(frame)),
        companion_(table_, gamma),
        blocks_(error_blocks(table_, frame_, gamma)),
        gauge_(solve_gauge(frame_, blocks_, gap_floor)),
        expo_(exponents(table_, frame_, gamma, gap_floor)) {}

  const CoeffTable& table() const { return table_; }
  const Frame& frame() const { return frame_; }
  const Companion& companion() const { return companion_; }
  const ErrorBlocks& blocks() const { return blocks_; }
  const GaugeData& gauge() const { return gauge_; }
  const ExponentData& expo() const { return expo_; }
  int size() const { return frame_.size(); }
  Cplx gamma() const { return expo_.gamma_param; }

  MatrixXcd S(Cplx t) const {
    return frame_.s0(t) * correction(t);
  }

  MatrixXcd S_prime(Cplx t) const {
    MatrixXcd corr_prime = -gauge_.alpha / (t * t) - 2.0 * gauge_.delta / (t * t * t);
    return frame_.s0_prime(t) * correction(t) + frame_.s0(t) * corr_prime;
  }

  MatrixXcd B(Cplx t) const {
    MatrixXcd s = S(t);
    return s.partialPivLu().solve(companion_.A(t) * s - S_prime(t));
  }

  MatrixXcd Lambda(Cplx t) const {
    MatrixXcd m = MatrixXcd::Zero(size(), size());
    for (int j = 0; j < size(); ++j) m(j, j) = expo_.phi_prime(j, t);
    return m;
  }

  MatrixXcd R(Cplx t) const { return B(t) - Lambda(t); }

 private:
  MatrixXcd correction(Cplx t) const {
    const int n = size();
    return MatrixXcd::Identity(n, n) + gauge_.alpha / t + gauge_.delta / (t * t);
  }

  CoeffTable table_;
  Frame frame_;
  Companion companion_;
  ErrorBlocks blocks_;
  GaugeData gauge_;
  ExponentData expo_;
};

// Reduced diagonal of the w-equation relative to leading index k:
// [Lambda~]_jj = -(Phi_k' - Phi_j').
inline Cplx lambda_tilde(const ExponentData& e, int k, int j, Cplx t) {
  return e.phi_prime(j, t) - e.phi_prime(k, t);
}

// Checks the ordering hypothesis Re(Phi_j - Phi_l) >= 0 and eventual
// monotonicity for j < l on a sampled window.
inline void validate_ordering(const ExponentData& e, double t0, double T,
                              double slack = 1e-9) {
  const int samples = 33;
  for (int j = 0; j + 1 < e.size(); ++j) {
    for (int l = j + 1; l < e.size(); ++l) {
      double first = 0, last = 0;
      for (int s = 0; s < samples; ++s) {
        double t = t0 + (T - t0) * s / (samples - 1);
        double diff = (e.phi(j, t) - e.phi(l, t)).real();
        if (diff < -slack * (1.0 + std::abs(diff))) {
          throw NumericalError("ordering violated: Re(Phi_" + std::to_string(j) + " - Phi_" +
                               std::to_string(l) + ") < 0 at t = " + std::to_string(t));
        }
        if (s == 0) first = diff;
        if (s == samples - 1) last = diff;
      }
      if (last < first - slack * (1.0 + std::abs(first))) {
        throw NumericalError("ordering not eventually monotone for pair (" + std::to_string(j) +
                             ", " + std::to_string(l) + ")");
      }
    }
  }
}

// Sector rotation: the conjugated operator obtains table entries scaled by
// exp(2 i alpha * Y-count) and the parameter gamma * exp(-i alpha); the
// characteristic roots rotate by exp(2 i alpha).
struct RotatedSystem {
  CoeffTable table;
  std::vector<Cplx> roots;       // rotated and reordered
  std::vector<int> permutation;  // applied by the reordering
  Cplx param_factor;             // multiply gamma by this
};

inline RotatedSystem rotate(const CoeffTable& table, const std::vector<Cplx>& roots,
                            double alpha) {
  RotatedSystem out;
  out.table = table;
  const Cplx phase = std::exp(Cplx(0, 2.0 * alpha));
  for (int l = 0; l <= table.n; ++l) {
    for (int j = 0; j <= l; ++j) {
      out.table.d[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)] *=
          std::pow(phase, l - j);
    }
  }
  for (auto& [key, c] : out.table.e) {
    c *= std::pow(phase, key[0] - key[1] - key[2]);
  }
  std::vector<Cplx> rotated(roots.size());
  for (std::size_t j = 0; j < roots.size(); ++j) rotated[j] = roots[j] * phase;
  auto [sorted, perm] = order_roots(rotated);
  out.roots = sorted;
  out.permutation = perm;
  out.param_factor = std::exp(Cplx(0, -alpha));
  return out;
}

}  // namespace hsolv
