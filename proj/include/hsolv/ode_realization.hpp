#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "hsolv/nc_polynomial.hpp"
#include "hsolv/rational.hpp"

namespace hsolv {

// Normal-ordered operator in one variable: sum of coeff * t^a * d^b with all
// derivatives to the right of all multiplications.
template <class S>
using MonomialMap = std::map<std::pair<int, int>, S>;

template <class S>
inline void add_monomial(MonomialMap<S>& m, int a, int b, const S& c) {
  auto key = std::make_pair(a, b);
  auto it = m.find(key);
  if (it == m.end()) {
    m.emplace(key, c);
  } else {
    it->second += c;
    bool zero;
    if constexpr (std::is_same_v<S, GRational>) {
      zero = it->second.is_zero();
    } else {
      zero = it->second == S(0);
    }
    if (zero) m.erase(it);
  }
}

// Compose op with a right factor of t (multiplication) using d^b t = t d^b + b d^{b-1}.
template <class S>
inline MonomialMap<S> compose_right_t(const MonomialMap<S>& op, const S& scale) {
  MonomialMap<S> out;
  for (const auto& [key, c] : op) {
    auto [a, b] = key;
    add_monomial(out, a + 1, b, c * scale);
    if (b > 0) add_monomial(out, a, b - 1, c * scale * S(b));
  }
  return out;
}

// Compose op with a right factor of i*d.
template <class S>
inline MonomialMap<S> compose_right_id(const MonomialMap<S>& op, const S& i_unit) {
  MonomialMap<S> out;
  for (const auto& [key, c] : op) {
    auto [a, b] = key;
    add_monomial(out, a, b + 1, c * i_unit);
  }
  return out;
}

// 𝖫 realized grade by grade: grade l holds P_l(i d/dt, sign*t) normal-ordered;
// the assembled operator weights grade l by gamma^-(n-l).  The (-i gamma)^n
// prefactor of the representation is recorded, not multiplied in.
struct OdeRealization {
  int n = 0;
  int sign = +1;  // sign of the t-substitution for Y
  std::vector<MonomialMap<GRational>> grades;  // index l = 0..n
  int prefactor_power = 0;                     // (-i*gamma)^prefactor_power, bookkeeping only

  const MonomialMap<GRational>& grade(int l) const { return grades[static_cast<std::size_t>(l)]; }
};

inline MonomialMap<GRational> realize_word(const NcWord& word, int sign) {
  const GRational i = GRational::i_unit();
  const GRational t_scale = GRational(sign);
  MonomialMap<GRational> acc;
  acc.emplace(std::make_pair(0, 0), GRational(1));
  for (char letter : word) {
    acc = (letter == 'X') ? compose_right_id(acc, i) : compose_right_t(acc, t_scale);
  }
  return acc;
}

// X -> i d/dt, Y -> sign * t (word order preserved), then normal ordering.
inline OdeRealization realize(const NcPolynomial& p, int sign = +1) {
  OdeRealization r;
  r.n = p.degree();
  r.sign = sign;
  r.prefactor_power = r.n;
  r.grades.assign(static_cast<std::size_t>(r.n) + 1, {});
  for (const auto& [word, coeff] : p.terms()) {
    auto mono = realize_word(word, sign);
    auto& grade = r.grades[word.size()];
    for (const auto& [key, c] : mono) add_monomial(grade, key.first, key.second, coeff * c);
  }
  return r;
}

// Coefficient tables of the realized operator: per grade l and derivative
// order j the t-coefficient matches t^{l-j} (d_{l,j} + sum_m e_{l,j,m} t^{-2m}).
template <class S>
struct CoeffTableT {
  int n = 0;
  int sign = +1;
  std::vector<std::vector<S>> d;       // d[l][j], j <= l
  std::map<std::array<int, 3>, S> e;   // {l, j, m} -> e_{l,j,m}, m >= 1

  S d_at(int l, int j) const {
    if (l < 0 || l > n || j < 0 || j > l) return S(0);
    return d[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
  }
  S e_at(int l, int j, int m) const {
    auto it = e.find({l, j, m});
    return it == e.end() ? S(0) : it->second;
  }
};

using CoeffTableExact = CoeffTableT<GRational>;
using CoeffTable = CoeffTableT<Cplx>;

// Exact slot matching; a monomial that fits no (d, e) slot indicates a
// realization bug and is an error.
inline CoeffTableExact coefficient_table(const OdeRealization& r) {
  CoeffTableExact table;
  table.n = r.n;
  table.sign = r.sign;
  table.d.assign(static_cast<std::size_t>(r.n) + 1, {});
  for (int l = 0; l <= r.n; ++l) {
    table.d[static_cast<std::size_t>(l)].assign(static_cast<std::size_t>(l) + 1, GRational{});
    for (const auto& [key, c] : r.grade(l)) {
      auto [a, j] = key;
      if (j > l || a > l - j || (l - j - a) % 2 != 0) {
        throw NumericalError("coefficient_table: residual monomial t^" + std::to_string(a) +
                             " d^" + std::to_string(j) + " in grade " + std::to_string(l));
      }
      int m = (l - j - a) / 2;
      if (m == 0) {
        table.d[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)] = c;
      } else {
        table.e[{l, j, m}] = c;
      }
    }
  }
  return table;
}

inline CoeffTable to_numeric(const CoeffTableExact& t) {
  CoeffTable out;
  out.n = t.n;
  out.sign = t.sign;
  out.d.resize(t.d.size());
  for (std::size_t l = 0; l < t.d.size(); ++l) {
    out.d[l].resize(t.d[l].size());
    for (std::size_t j = 0; j < t.d[l].size(); ++j) out.d[l][j] = t.d[l][j].to_complex();
  }
  for (const auto& [key, c] : t.e) out.e[key] = c.to_complex();
  return out;
}

// Keep only the top grade: the gamma -> infinity limit operator.
template <class S>
inline CoeffTableT<S> truncate_to_top_grade(const CoeffTableT<S>& t) {
  CoeffTableT<S> out;
  out.n = t.n;
  out.sign = t.sign;
  out.d.assign(static_cast<std::size_t>(t.n) + 1, {});
  for (int l = 0; l <= t.n; ++l) {
    out.d[static_cast<std::size_t>(l)].assign(static_cast<std::size_t>(l) + 1, S(0));
  }
  out.d[static_cast<std::size_t>(t.n)] = t.d[static_cast<std::size_t>(t.n)];
  for (const auto& [key, c] : t.e) {
    if (key[0] == t.n) out.e[key] = c;
  }
  return out;
}

// Q_j(t, gamma) = q_{n,j}(t) + sum_{l=1}^{n-j} (gamma t)^{-l} q_{n-l,j}(t).
inline Cplx eval_Q(const CoeffTable& table, int j, Cplx t, Cplx gamma) {
  if (t == Cplx(0)) throw std::invalid_argument("eval_Q: t = 0");
  Cplx acc = 0;
  Cplx gt_pow = 1;
  for (int l = 0; l <= table.n - j; ++l) {
    Cplx q = table.d_at(table.n - l, j);
    for (int m = 1; 2 * m <= table.n - j; ++m) {
      Cplx em = table.e_at(table.n - l, j, m);
      if (em != Cplx(0)) q += em * std::pow(t, -2 * m);
    }
    acc += q / gt_pow;
    gt_pow *= gamma * t;
  }
  return acc;
}

// The explicit low-order decomposition of Q_j from the rearranged operator.
struct QDecomposition {
  Cplx constant;      // d_{n,j}
  Cplx first_order;   // d_{n-1,j} / (gamma t)
  Cplx second_order;  // (e_{n,j,1} + d_{n-2,j}/gamma^2) / t^2
  Cplx epsilon;       // everything of order t^-3 and beyond
};

inline QDecomposition eval_Q_decomposition(const CoeffTable& table, int j, Cplx t, Cplx gamma) {
  if (t == Cplx(0)) throw std::invalid_argument("eval_Q_decomposition: t = 0");
  QDecomposition q;
  q.constant = table.d_at(table.n, j);
  q.first_order = table.d_at(table.n - 1, j) / (gamma * t);
  q.second_order = (table.e_at(table.n, j, 1) + table.d_at(table.n - 2, j) / (gamma * gamma)) / (t * t);
  q.epsilon = eval_Q(table, j, t, gamma) - q.constant - q.first_order - q.second_order;
  return q;
}

// Polynomial coefficient list (in t) of t^{n-j} Q_j(t, gamma); these are the
// scalar coefficients of the assembled operator, entire in t.
inline std::vector<Cplx> assembled_coefficient_poly(const CoeffTable& table, int j, Cplx gamma) {
  std::vector<Cplx> poly(static_cast<std::size_t>(table.n - j) + 1, Cplx(0));
  Cplx g_pow = 1;
  for (int l = 0; l <= table.n - j; ++l) {
    int base = table.n - j - l;  // t-power of the d-term
    poly[static_cast<std::size_t>(base)] += table.d_at(table.n - l, j) / g_pow;
    for (int m = 1; 2 * m <= base; ++m) {
      Cplx em = table.e_at(table.n - l, j, m);
      if (em != Cplx(0)) poly[static_cast<std::size_t>(base - 2 * m)] += em / g_pow;
    }
    g_pow *= gamma;
  }
  return poly;
}

inline Cplx eval_poly(const std::vector<Cplx>& poly, Cplx t) {
  Cplx acc = 0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * t + *it;
  return acc;
}

inline std::vector<Cplx> poly_derivative(const std::vector<Cplx>& poly) {
  if (poly.size() <= 1) return {Cplx(0)};
  std::vector<Cplx> out(poly.size() - 1);
  for (std::size_t k = 1; k < poly.size(); ++k) out[k - 1] = static_cast<double>(k) * poly[k];
  return out;
}

// First-order companion form of the assembled operator: u' = A u for
// u = (f, f', ..., f^(n-1)).  All entries are polynomials in t.
class Companion {
 public:
  Companion(const CoeffTable& table, Cplx gamma) : n_(table.n), gamma_(gamma) {
    last_row_.reserve(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) last_row_.push_back(assembled_coefficient_poly(table, j, gamma));
    top_row_.reserve(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) {
      std::vector<Cplx> poly(static_cast<std::size_t>(n_ - j) + 1, Cplx(0));
      poly[static_cast<std::size_t>(n_ - j)] = table.d_at(n_, j);
      top_row_.push_back(std::move(poly));
    }
  }

  int order() const { return n_; }
  Cplx gamma() const { return gamma_; }

  Eigen::MatrixXcd A(Cplx t) const { return assemble(last_row_, t, 0); }
  Eigen::MatrixXcd A0(Cplx t) const { return assemble(top_row_, t, 0); }

  // m-th t-derivative of A; superdiagonal ones vanish for m >= 1.
  Eigen::MatrixXcd A_derivative(Cplx t, int m) const { return assemble(last_row_, t, m); }

  Cplx trace_A(Cplx t) const { return -eval_poly(last_row_.back(), t); }

 private:
  Eigen::MatrixXcd assemble(const std::vector<std::vector<Cplx>>& row, Cplx t, int deriv) const {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_, n_);
    if (deriv == 0) {
      for (int k = 0; k + 1 < n_; ++k) a(k, k + 1) = 1.0;
    }
    for (int j = 0; j < n_; ++j) {
      std::vector<Cplx> poly = row[static_cast<std::size_t>(j)];
      for (int m = 0; m < deriv; ++m) poly = poly_derivative(poly);
      a(n_ - 1, j) = -eval_poly(poly, t);
    }
    return a;
  }

  int n_;
  Cplx gamma_;
  std::vector<std::vector<Cplx>> last_row_;
  std::vector<std::vector<Cplx>> top_row_;
};

// Formal adjoint, grade by grade: coeff * t^a d^b maps to
// conj(coeff) (-1)^b d^b (t^a .), normal-ordered via
// d^b t^a = sum_k C(b,k) a!/(a-k)! t^{a-k} d^{b-k}.
inline OdeRealization formal_adjoint(const OdeRealization& r) {
  OdeRealization out;
  out.n = r.n;
  out.sign = r.sign;
  out.prefactor_power = r.prefactor_power;
  out.grades.assign(r.grades.size(), {});
  for (int l = 0; l <= r.n; ++l) {
    for (const auto& [key, c] : r.grade(l)) {
      auto [a, b] = key;
      GRational base = c.conj();
      if (b % 2 != 0) base = -base;
      Rational factor = 1;  // C(b,k) * a! / (a-k)!
      for (int k = 0; k <= std::min(a, b); ++k) {
        add_monomial(out.grades[static_cast<std::size_t>(l)], a - k, b - k,
                     base * GRational(factor));
        factor = factor * Rational(b - k) / Rational(k + 1) * Rational(a - k);
      }
    }
  }
  return out;
}

// Coefficient flip of t -> -t on a normal-ordered operator.
inline OdeRealization parity_in_t(const OdeRealization& r) {
  OdeRealization out;
  out.n = r.n;
  out.sign = -r.sign;
  out.prefactor_power = r.prefactor_power;
  out.grades.assign(r.grades.size(), {});
  for (std::size_t l = 0; l < r.grades.size(); ++l) {
    for (const auto& [key, c] : r.grades[l]) {
      auto [a, b] = key;
      GRational v = ((a + b) % 2 == 0) ? c : -c;
      add_monomial(out.grades[l], a, b, v);
    }
  }
  return out;
}

}  // namespace hsolv
