#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdint>
#include <ostream>
#include <string>

namespace hsolv {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Complex number with exact rational parts.  The operator grammar only
// admits decimal literals, so every parsed coefficient lives here; the
// realization and coefficient-table algebra stay exact and the numeric
// lane converts at the boundary.
struct GRational {
  Rational re;
  Rational im;

  GRational() = default;
  GRational(int v) : re(v), im(0) {}  // NOLINT(google-explicit-constructor)
  GRational(Rational r) : re(std::move(r)), im(0) {}  // NOLINT
  GRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static GRational i_unit() { return GRational{Rational(0), Rational(1)}; }

  bool is_zero() const { return re == 0 && im == 0; }

  GRational conj() const { return GRational{re, -im}; }

  std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }

  friend GRational operator+(const GRational& a, const GRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GRational operator-(const GRational& a, const GRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GRational operator-(const GRational& a) { return {-a.re, -a.im}; }
  friend GRational operator*(const GRational& a, const GRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  GRational& operator+=(const GRational& o) { return *this = *this + o; }
  GRational& operator-=(const GRational& o) { return *this = *this - o; }
  GRational& operator*=(const GRational& o) { return *this = *this * o; }

  friend bool operator==(const GRational& a, const GRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GRational& a, const GRational& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const GRational& v) {
    os << v.re.str();
    if (v.im != 0) {
      os << (v.im > 0 ? "+" : "") << v.im.str() << "i";
    }
    return os;
  }
};

// Exact value of a decimal literal such as "2", "0.25", "12.5".
inline Rational rational_from_decimal(const std::string& digits) {
  auto dot = digits.find('.');
  if (dot == std::string::npos) {
    return Rational(boost::multiprecision::cpp_int(digits));
  }
  std::string whole = digits.substr(0, dot);
  std::string frac = digits.substr(dot + 1);
  boost::multiprecision::cpp_int num(whole + frac);
  boost::multiprecision::cpp_int den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  return Rational(num, den);
}

}  // namespace hsolv
