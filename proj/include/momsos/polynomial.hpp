#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "momsos/error.hpp"
#include "momsos/rational.hpp"

namespace momsos {

/// Exponent vector alpha in N^n, ordered graded-lexicographically: total
/// degree first, then by the first differing coordinate, larger first
/// (so x1 precedes x2 within a degree).
class ExponentVec {
 public:
  ExponentVec() = default;
  explicit ExponentVec(std::size_t n) : exps_(n, 0) {}
  ExponentVec(std::initializer_list<unsigned> e) : exps_(e) {}
  explicit ExponentVec(std::vector<unsigned> e) : exps_(std::move(e)) {}

  static ExponentVec unit(std::size_t n, std::size_t i) {
    ExponentVec e(n);
    e.exps_[i] = 1;
    return e;
  }

  std::size_t size() const noexcept { return exps_.size(); }
  unsigned operator[](std::size_t i) const { return exps_[i]; }
  unsigned& operator[](std::size_t i) { return exps_[i]; }
  const std::vector<unsigned>& values() const noexcept { return exps_; }

  unsigned degree() const {
    return std::accumulate(exps_.begin(), exps_.end(), 0u);
  }

  bool all_even() const {
    return std::all_of(exps_.begin(), exps_.end(), [](unsigned a) { return a % 2 == 0; });
  }

  /// Componentwise <=.
  bool divides(const ExponentVec& other) const {
    for (std::size_t i = 0; i < exps_.size(); ++i)
      if (exps_[i] > other.exps_[i]) return false;
    return true;
  }

  friend ExponentVec operator+(const ExponentVec& a, const ExponentVec& b) {
    if (a.size() != b.size()) throw Error(ErrorKind::dimension, "exponent vectors of different length");
    ExponentVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r.exps_[i] = a.exps_[i] + b.exps_[i];
    return r;
  }

  friend ExponentVec operator-(const ExponentVec& a, const ExponentVec& b) {
    if (a.size() != b.size() || !b.divides(a))
      throw Error(ErrorKind::invalid_argument, "exponent subtraction would go negative");
    ExponentVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r.exps_[i] = a.exps_[i] - b.exps_[i];
    return r;
  }

  friend ExponentVec operator*(unsigned k, const ExponentVec& a) {
    ExponentVec r(a);
    for (auto& e : r.exps_) e *= k;
    return r;
  }

  friend bool operator==(const ExponentVec&, const ExponentVec&) = default;

  friend bool operator<(const ExponentVec& a, const ExponentVec& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    unsigned da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a.exps_[i] != b.exps_[i]) return a.exps_[i] > b.exps_[i];
    return false;
  }

 private:
  std::vector<unsigned> exps_;
};

/// C(n, k) with a capacity guard.
inline std::size_t binomial(std::size_t n, std::size_t k, std::size_t cap = static_cast<std::size_t>(-1)) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  Integer r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  if (r > Integer(cap)) throw Error(ErrorKind::capacity, "binomial C(" + std::to_string(n) + "," + std::to_string(k) + ") exceeds capacity");
  return r.convert_to<std::size_t>();
}

namespace detail {
inline void fill_degree(std::size_t n, unsigned d, std::size_t pos, std::vector<unsigned>& cur,
                        std::vector<ExponentVec>& out) {
  if (pos + 1 == n) {
    cur[pos] = d;
    out.emplace_back(cur);
    return;
  }
  for (unsigned a = d + 1; a-- > 0;) {
    cur[pos] = a;
    fill_degree(n, d - a, pos + 1, cur, out);
  }
  cur[pos] = 0;
}
}  // namespace detail

/// All exponents with |alpha| <= d, in graded lexicographic order.
inline std::vector<ExponentVec> monomials_up_to(std::size_t n, unsigned d, std::size_t cap = kDefaultCapacity) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "monomials_up_to needs n >= 1");
  std::size_t count = binomial(n + d, d, cap);
  std::vector<ExponentVec> out;
  out.reserve(count);
  std::vector<unsigned> cur(n, 0);
  for (unsigned k = 0; k <= d; ++k) detail::fill_degree(n, k, 0, cur, out);
  return out;
}

/// Sparse n-variate polynomial with exact rational coefficients. Zero
/// coefficients are never stored.
class Polynomial {
 public:
  using Terms = std::map<ExponentVec, Rational>;

  Polynomial() = default;
  explicit Polynomial(std::size_t n) : n_(n) {}

  static Polynomial constant(std::size_t n, const Rational& c) {
    Polynomial p(n);
    p.add_term(ExponentVec(n), c);
    return p;
  }

  /// x_{i+1} (zero-based index).
  static Polynomial variable(std::size_t n, std::size_t i, const Rational& c = 1) {
    if (i >= n) throw Error(ErrorKind::dimension, "variable index out of range");
    Polynomial p(n);
    p.add_term(ExponentVec::unit(n, i), c);
    return p;
  }

  static Polynomial monomial(const ExponentVec& alpha, const Rational& c = 1) {
    Polynomial p(alpha.size());
    p.add_term(alpha, c);
    return p;
  }

  std::size_t dim() const noexcept { return n_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t term_count() const noexcept { return terms_.size(); }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [a, c] : terms_) d = std::max(d, a.degree());
    return d;
  }

  Rational coefficient(const ExponentVec& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void add_term(const ExponentVec& alpha, const Rational& c) {
    if (alpha.size() != n_) throw Error(ErrorKind::dimension, "exponent length does not match polynomial dimension");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(alpha, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_dim(o);
    for (const auto& [a, c] : o.terms_) add_term(a, c);
    return *this;
  }

  Polynomial& operator-=(const Polynomial& o) {
    check_dim(o);
    for (const auto& [a, c] : o.terms_) add_term(a, -c);
    return *this;
  }

  Polynomial& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [a, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= Rational(-1); }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_dim(b);
    Polynomial r(a.n_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) r.add_term(ea + eb, ca * cb);
    return r;
  }

  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

  /// Partial derivative with respect to x_{k+1}.
  Polynomial derivative(std::size_t k) const {
    if (k >= n_) throw Error(ErrorKind::dimension, "derivative index out of range");
    Polynomial r(n_);
    for (const auto& [a, c] : terms_) {
      if (a[k] == 0) continue;
      ExponentVec b = a;
      b[k] -= 1;
      r.add_term(b, c * a[k]);
    }
    return r;
  }

 private:
  void check_dim(const Polynomial& o) const {
    if (o.n_ != n_)
      throw Error(ErrorKind::dimension, "polynomial dimension mismatch (" + std::to_string(n_) + " vs " + std::to_string(o.n_) + ")");
  }

  std::size_t n_ = 0;
  Terms terms_;
};

enum class ArithKind { add, sub, mul };

inline Polynomial poly_arith(const Polynomial& a, const Polynomial& b, ArithKind kind) {
  switch (kind) {
    case ArithKind::add: return a + b;
    case ArithKind::sub: return a - b;
    case ArithKind::mul: return a * b;
  }
  return a;
}

inline Polynomial poly_scale(const Polynomial& a, const Rational& s) { return a * s; }

inline Polynomial square(const Polynomial& p) { return p * p; }

inline Rational monomial_value(const ExponentVec& alpha, std::span<const Rational> point) {
  Rational v(1);
  for (std::size_t i = 0; i < alpha.size(); ++i)
    for (unsigned k = 0; k < alpha[i]; ++k) v *= point[i];
  return v;
}

inline Rational poly_eval(const Polynomial& p, std::span<const Rational> point) {
  if (point.size() != p.dim()) throw Error(ErrorKind::dimension, "evaluation point has wrong length");
  Rational v(0);
  for (const auto& [a, c] : p.terms()) v += c * monomial_value(a, point);
  return v;
}

struct PolyNorms {
  Rational l1;
  Rational linf;
};

inline PolyNorms poly_norms(const Polynomial& p) {
  PolyNorms r{0, 0};
  for (const auto& [a, c] : p.terms()) {
    Rational m = abs(c);
    r.l1 += m;
    if (m > r.linf) r.linf = m;
  }
  return r;
}

inline Rational l1_norm(const Polynomial& p) { return poly_norms(p).l1; }

// ---------------------------------------------------------------------------
// Text form: terms `coef * x1^a1 x2^a2 ...` joined by ` + ` / ` - `.

inline std::string monomial_to_string(const ExponentVec& alpha) {
  std::string s;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0) continue;
    if (!s.empty()) s += ' ';
    s += 'x' + std::to_string(i + 1);
    if (alpha[i] > 1) s += '^' + std::to_string(alpha[i]);
  }
  return s;
}

inline std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [a, c] : p.terms()) {
    Rational m = abs(c);
    if (first) {
      if (c < 0) s += '-';
    } else {
      s += c < 0 ? " - " : " + ";
    }
    first = false;
    s += to_string(m);
    if (a.degree() > 0) s += " * " + monomial_to_string(a);
  }
  return s;
}

namespace detail {

class PolyParser {
 public:
  PolyParser(std::string_view text, std::size_t n) : text_(text), n_(n) {}

  Polynomial parse() {
    Polynomial p(n_);
    skip_ws();
    if (at_end()) fail("empty polynomial");
    bool first = true;
    while (!at_end()) {
      Rational sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
        skip_ws();
      } else if (!first) {
        fail("expected '+' or '-' between terms");
      }
      first = false;
      auto [alpha, c] = parse_term();
      p.add_term(alpha, sign * c);
      skip_ws();
    }
    return p;
  }

 private:
  std::pair<ExponentVec, Rational> parse_term() {
    ExponentVec alpha(n_);
    Rational c = 1;
    bool any = false;
    while (true) {
      skip_ws();
      if (at_end() || peek() == '+' || peek() == '-') break;
      if (any && peek() == '*') {
        ++pos_;
        skip_ws();
      }
      if (at_end()) fail("dangling '*'");
      char ch = peek();
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        c *= parse_number();
      } else if (ch == 'x') {
        ++pos_;
        std::size_t idx = 1;
        if (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
          idx = parse_uint();
        } else if (n_ != 1) {
          fail("bare 'x' is only allowed for univariate instances");
        }
        if (idx < 1 || idx > n_) fail("variable x" + std::to_string(idx) + " outside dimension " + std::to_string(n_));
        unsigned e = 1;
        if (!at_end() && peek() == '^') {
          ++pos_;
          if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) fail("expected exponent after '^'");
          e = static_cast<unsigned>(parse_uint());
        }
        alpha[idx - 1] += e;
      } else {
        fail(std::string("unexpected character '") + ch + "'");
      }
      any = true;
    }
    if (!any) fail("expected a term");
    return {alpha, c};
  }

  Rational parse_number() {
    std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    std::string whole(text_.substr(start, pos_ - start));
    if (!at_end() && peek() == '/') {
      ++pos_;
      std::size_t ds = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      if (ds == pos_) fail("expected denominator after '/'");
      Integer d = decimal_integer(text_.substr(ds, pos_ - ds));
      if (d == 0) fail("zero denominator");
      return Rational(decimal_integer(whole), d);
    }
    if (!at_end() && peek() == '.') {
      ++pos_;
      std::size_t fs = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      std::string frac(text_.substr(fs, pos_ - fs));
      Integer scale = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
      return Rational(decimal_integer(whole + frac), scale);
    }
    return Rational(decimal_integer(whole));
  }

  std::size_t parse_uint() {
    std::size_t v = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + static_cast<std::size_t>(peek() - '0');
      if (v > 1000000) fail("integer too large");
      ++pos_;
    }
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::parse, "column " + std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  std::string_view text_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the text form produced by to_string (and a few lenient variants:
/// optional `*`, decimals, bare `x` for n = 1). Errors carry the column.
inline Polynomial parse_polynomial(std::string_view text, std::size_t n) {
  return detail::PolyParser(text, n).parse();
}

}  // namespace momsos
