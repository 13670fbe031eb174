#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "momsos/error.hpp"
#include "momsos/polynomial.hpp"
#include "momsos/rational.hpp"

namespace momsos {

/// Truncated linear functional L on R[x]_{order}, stored by its values on
/// the monomial basis.
struct MomentFunctional {
  std::size_t n = 0;
  unsigned order = 0;
  std::map<ExponentVec, Rational> values;

  const Rational& operator()(const ExponentVec& alpha) const {
    auto it = values.find(alpha);
    if (it == values.end())
      throw Error(ErrorKind::degree, "moment of degree " + std::to_string(alpha.degree()) + " not available (order " + std::to_string(order) + ")");
    return it->second;
  }

  /// L(p) = sum_alpha p_alpha L(x^alpha).
  Rational apply(const Polynomial& p) const {
    if (p.dim() != n) throw Error(ErrorKind::dimension, "functional and polynomial dimensions differ");
    if (p.degree() > order) throw Error(ErrorKind::degree, "polynomial degree exceeds functional order");
    Rational v(0);
    for (const auto& [a, c] : p.terms()) v += c * (*this)(a);
    return v;
  }
};

/// Dense symmetric rational matrix whose rows and columns are labelled by
/// monomials.
class SymMatrixQ {
 public:
  SymMatrixQ() = default;
  explicit SymMatrixQ(std::vector<ExponentVec> index)
      : index_(std::move(index)), entries_(index_.size() * index_.size(), Rational(0)) {}

  std::size_t size() const noexcept { return index_.size(); }
  const std::vector<ExponentVec>& row_index() const noexcept { return index_; }

  const Rational& operator()(std::size_t r, std::size_t c) const { return entries_[r * size() + c]; }

  void set(std::size_t r, std::size_t c, const Rational& v) {
    entries_[r * size() + c] = v;
    entries_[c * size() + r] = v;
  }

  Eigen::MatrixXd to_double() const {
    Eigen::MatrixXd m(size(), size());
    for (std::size_t r = 0; r < size(); ++r)
      for (std::size_t c = 0; c < size(); ++c) m(r, c) = momsos::to_double((*this)(r, c));
    return m;
  }

  static SymMatrixQ from_rows(const std::vector<std::vector<Rational>>& rows) {
    std::vector<ExponentVec> idx;
    for (std::size_t i = 0; i < rows.size(); ++i) idx.push_back(ExponentVec{static_cast<unsigned>(i)});
    SymMatrixQ m(std::move(idx));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = r; c < rows.size(); ++c) m.set(r, c, rows[r][c]);
    return m;
  }

  friend bool operator==(const SymMatrixQ&, const SymMatrixQ&) = default;

 private:
  std::vector<ExponentVec> index_;
  std::vector<Rational> entries_;
};

/// Moment x^gamma of the uniform probability measure on [-r, r]^n.
inline Rational centered_box_moment(const Rational& r, const ExponentVec& gamma) {
  Rational v(1);
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (gamma[i] % 2 != 0) return Rational(0);
    v *= pow(r, gamma[i]) / Rational(gamma[i] + 1);
  }
  return v;
}

/// Moment x^alpha of the uniform probability measure on [-r, r]^n + z,
/// obtained by expanding (y + z)^alpha into centered moments.
inline Rational box_moment(const Rational& r, std::span<const Rational> z, const ExponentVec& alpha) {
  if (r <= 0) throw Error(ErrorKind::invalid_argument, "box half-width must be positive");
  if (z.size() != alpha.size()) throw Error(ErrorKind::dimension, "box center has wrong length");
  const std::size_t n = alpha.size();
  // Per coordinate: sum_k C(a, k) z^{a-k} E[y^k]; the measure is a product.
  Rational total(1);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned a = alpha[i];
    Rational coord(0);
    Integer binom = 1;
    for (unsigned k = 0; k <= a; ++k) {
      if (k > 0) binom = binom * (a - k + 1) / k;
      if (k % 2 == 0) coord += Rational(binom) * pow(z[i], a - k) * pow(r, k) / Rational(k + 1);
    }
    total *= coord;
    if (total == 0) break;
  }
  return total;
}

inline MomentFunctional box_functional(const Rational& r, std::span<const Rational> z, unsigned two_t,
                                       std::size_t cap = kDefaultCapacity) {
  MomentFunctional L{z.size(), two_t, {}};
  for (const auto& alpha : monomials_up_to(z.size(), two_t, cap)) L.values.emplace(alpha, box_moment(r, z, alpha));
  return L;
}

/// Point evaluation at x: L(p) = p(x).
inline MomentFunctional dirac_functional(std::span<const Rational> x, unsigned order,
                                         std::size_t cap = kDefaultCapacity) {
  MomentFunctional L{x.size(), order, {}};
  for (const auto& alpha : monomials_up_to(x.size(), order, cap)) L.values.emplace(alpha, monomial_value(alpha, x));
  return L;
}

/// M_t(L)_{a,b} = L(x^{a+b}) over |a|, |b| <= t.
inline SymMatrixQ assemble_moment_matrix(const MomentFunctional& L, unsigned t) {
  if (L.order < 2 * t) throw Error(ErrorKind::degree, "functional order " + std::to_string(L.order) + " < 2t = " + std::to_string(2 * t));
  SymMatrixQ m(monomials_up_to(L.n, t));
  const auto& idx = m.row_index();
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = r; c < idx.size(); ++c) m.set(r, c, L(idx[r] + idx[c]));
  return m;
}

/// Half-degree of a localizing block: t - ceil(deg(g)/2).
inline unsigned localizing_order(const Polynomial& g, unsigned t) {
  unsigned half = (g.degree() + 1) / 2;
  if (half > t) throw Error(ErrorKind::degree, "constraint degree " + std::to_string(g.degree()) + " exceeds 2t = " + std::to_string(2 * t));
  return t - half;
}

/// M_t(gL)_{a,b} = sum_c g_c L(x^{a+b+c}) over |a|, |b| <= t - ceil(deg(g)/2).
inline SymMatrixQ assemble_localizing_matrix(const MomentFunctional& L, const Polynomial& g, unsigned t) {
  if (L.order < 2 * t) throw Error(ErrorKind::degree, "functional order " + std::to_string(L.order) + " < 2t = " + std::to_string(2 * t));
  if (g.dim() != L.n) throw Error(ErrorKind::dimension, "constraint and functional dimensions differ");
  SymMatrixQ m(monomials_up_to(L.n, localizing_order(g, t)));
  const auto& idx = m.row_index();
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = r; c < idx.size(); ++c) {
      Rational v(0);
      ExponentVec base = idx[r] + idx[c];
      for (const auto& [gamma, coef] : g.terms()) v += coef * L(base + gamma);
      m.set(r, c, v);
    }
  return m;
}

/// Text table, one line per moment: `a1 ... an  p/q`.
inline std::string format_moments(const MomentFunctional& L) {
  std::string s;
  for (const auto& [alpha, v] : L.values) {
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (i > 0) s += ' ';
      s += std::to_string(alpha[i]);
    }
    s += "  " + to_string(v) + "\n";
  }
  return s;
}

}  // namespace momsos
