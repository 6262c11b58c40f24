#pragma once

#include <algorithm>
#include <cctype>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "hsolv/config.hpp"
#include "hsolv/rational.hpp"

namespace hsolv {

using Cplx = std::complex<double>;

// A word over the alphabet {X, Y}; the empty word is the identity operator.
// Stored as a plain string, e.g. "XXY" for X*X*Y.
using NcWord = std::string;

inline int count_letter(const NcWord& w, char c) {
  return static_cast<int>(std::count(w.begin(), w.end(), c));
}

// Graded polynomial in the noncommuting letters X, Y with exact complex
// coefficients.  Zero coefficients are never stored.
class NcPolynomial {
 public:
  using TermMap = std::map<NcWord, GRational>;

  NcPolynomial() = default;

  void add_term(const NcWord& word, const GRational& coeff) {
    if (coeff.is_zero()) return;
    auto it = terms_.find(word);
    if (it == terms_.end()) {
      terms_.emplace(word, coeff);
    } else {
      it->second += coeff;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  int degree() const {
    int n = 0;
    for (const auto& [w, c] : terms_) n = std::max<int>(n, static_cast<int>(w.size()));
    return n;
  }

  GRational coeff(const NcWord& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? GRational{} : it->second;
  }

  friend NcPolynomial operator+(const NcPolynomial& a, const NcPolynomial& b) {
    NcPolynomial r = a;
    for (const auto& [w, c] : b.terms_) r.add_term(w, c);
    return r;
  }

  friend NcPolynomial operator*(const GRational& s, const NcPolynomial& p) {
    NcPolynomial r;
    for (const auto& [w, c] : p.terms_) r.add_term(w, s * c);
    return r;
  }

  bool operator==(const NcPolynomial& o) const { return terms_ == o.terms_; }

 private:
  TermMap terms_;
};

// Restriction of P to words of length l.  Summing the parts over
// l = 0..degree reassembles P exactly.
inline NcPolynomial homogeneous_part(const NcPolynomial& p, int l) {
  if (l < 0 || l > p.degree()) {
    throw std::out_of_range("homogeneous_part: grade " + std::to_string(l) +
                            " out of range for degree " + std::to_string(p.degree()));
  }
  NcPolynomial r;
  for (const auto& [w, c] : p.terms()) {
    if (static_cast<int>(w.size()) == l) r.add_term(w, c);
  }
  return r;
}

// Commutative substitution X -> i*z, Y -> y, applied term-wise; word order
// inside each term is irrelevant to the result.
inline Cplx commutative_symbol(const NcPolynomial& p, Cplx z, Cplx y) {
  const Cplx iz = Cplx(0, 1) * z;
  Cplx acc = 0;
  for (const auto& [w, c] : p.terms()) {
    Cplx term = c.to_complex();
    for (int k = 0; k < count_letter(w, 'X'); ++k) term *= iz;
    for (int k = 0; k < count_letter(w, 'Y'); ++k) term *= y;
    acc += term;
  }
  return acc;
}

// Exact coefficients of z^j in P(iz, 1) for homogeneous or general P.
// The j-th entry collects i^{#X} over words with #X = j.
inline std::vector<GRational> symbol_coefficients(const NcPolynomial& p) {
  std::vector<GRational> coeffs(static_cast<std::size_t>(p.degree()) + 1);
  const GRational i = GRational::i_unit();
  for (const auto& [w, c] : p.terms()) {
    int nx = count_letter(w, 'X');
    GRational v = c;
    for (int k = 0; k < nx; ++k) v *= i;
    coeffs[static_cast<std::size_t>(nx)] += v;
  }
  while (coeffs.size() > 1 && coeffs.back().is_zero()) coeffs.pop_back();
  return coeffs;
}

// ---------------------------------------------------------------------------
// Parser for the operator grammar:
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := coeff '*' word | coeff | word
//   coeff  := decimal | 'i' | decimal 'i' | '(' decimal ('+'|'-') decimal 'i' ')'
//   word   := factor (['*'] factor)*
//   factor := ('X'|'Y') ('^' uint)?
// The leading sign is the one extension beyond the written grammar; the
// canonical inputs start with a negated term.
// ---------------------------------------------------------------------------
namespace detail {

class OperatorParser {
 public:
  explicit OperatorParser(std::string text) : text_(std::move(text)) {}

  NcPolynomial parse() {
    skip_ws();
    if (eof()) throw ParseError("empty operator expression", 0);
    NcPolynomial poly;
    bool negative = consume_sign();
    parse_term(poly, negative);
    skip_ws();
    while (!eof()) {
      char c = peek();
      if (c != '+' && c != '-') {
        throw ParseError(std::string("expected '+' or '-' before '") + c + "'", pos_);
      }
      ++pos_;
      skip_ws();
      parse_term(poly, c == '-');
      skip_ws();
    }
    return poly;
  }

 private:
  bool consume_sign() {
    if (!eof() && (peek() == '+' || peek() == '-')) {
      bool neg = peek() == '-';
      ++pos_;
      skip_ws();
      return neg;
    }
    return false;
  }

  void parse_term(NcPolynomial& poly, bool negative) {
    skip_ws();
    if (eof()) throw ParseError("expected a term", pos_);
    GRational coeff(1);
    bool have_coeff = false;
    if (starts_coeff()) {
      coeff = parse_coeff();
      have_coeff = true;
      skip_ws();
      if (!eof() && peek() == '*') {
        ++pos_;
        skip_ws();
        if (eof() || (peek() != 'X' && peek() != 'Y')) {
          throw ParseError("expected a word after '*'", pos_);
        }
      } else if (!eof() && (peek() == 'X' || peek() == 'Y')) {
        throw ParseError("missing '*' between coefficient and word", pos_);
      }
    }
    NcWord word;
    if (!eof() && (peek() == 'X' || peek() == 'Y')) {
      word = parse_word();
    } else if (!have_coeff) {
      throw ParseError(std::string("unexpected character '") + peek() + "'", pos_);
    }
    if (negative) coeff = -coeff;
    poly.add_term(word, coeff);
  }

  bool starts_coeff() {
    if (eof()) return false;
    char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == 'i' || c == '(';
  }

  GRational parse_coeff() {
    char c = peek();
    if (c == 'i') {
      ++pos_;
      return GRational::i_unit();
    }
    if (c == '(') {
      std::size_t open = pos_;
      ++pos_;
      skip_ws();
      Rational re = parse_decimal();
      skip_ws();
      if (eof() || (peek() != '+' && peek() != '-')) {
        throw ParseError("expected '+' or '-' inside complex literal", pos_);
      }
      bool neg = peek() == '-';
      ++pos_;
      skip_ws();
      Rational im = parse_decimal();
      if (neg) im = -im;
      skip_ws();
      if (eof() || peek() != 'i') throw ParseError("expected 'i' in complex literal", pos_);
      ++pos_;
      skip_ws();
      if (eof() || peek() != ')') {
        throw ParseError("unterminated complex literal opened here", open);
      }
      ++pos_;
      return GRational{re, im};
    }
    Rational value = parse_decimal();
    if (!eof() && peek() == 'i') {
      ++pos_;
      return GRational{Rational(0), value};
    }
    return GRational{value};
  }

  Rational parse_decimal() {
    std::size_t start = pos_;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (pos_ == start) throw ParseError("expected a decimal number", pos_);
    if (!eof() && peek() == '.') {
      ++pos_;
      std::size_t frac = pos_;
      while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      if (pos_ == frac) throw ParseError("expected digits after '.'", pos_);
    }
    return rational_from_decimal(text_.substr(start, pos_ - start));
  }

  NcWord parse_word() {
    NcWord word;
    while (true) {
      char letter = peek();
      ++pos_;
      int power = 1;
      if (!eof() && peek() == '^') {
        ++pos_;
        std::size_t start = pos_;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (pos_ == start) throw ParseError("expected an exponent after '^'", pos_);
        power = std::stoi(text_.substr(start, pos_ - start));
      }
      word.append(static_cast<std::size_t>(power), letter);
      skip_ws();
      std::size_t mark = pos_;
      if (!eof() && peek() == '*') {
        ++pos_;
        skip_ws();
        if (!eof() && (peek() == 'X' || peek() == 'Y')) continue;
        pos_ = mark;  // the '*' belonged to something else (error surfaces upstream)
        break;
      }
      if (!eof() && (peek() == 'X' || peek() == 'Y')) continue;
      break;
    }
    return word;
  }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  std::string text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline NcPolynomial parse_operator(const std::string& text) {
  return detail::OperatorParser(text).parse();
}

}  // namespace hsolv
