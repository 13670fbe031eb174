#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "momsos/error.hpp"
#include "momsos/measures.hpp"
#include "momsos/polynomial.hpp"
#include "momsos/pop.hpp"
#include "momsos/rational.hpp"

namespace momsos {

/// Upper-triangular position (row <= col) inside one diagonal block.
struct Position {
  std::size_t block = 0;
  std::size_t row = 0;
  std::size_t col = 0;

  friend auto operator<=>(const Position&, const Position&) = default;
};

/// One term coef * X[block](row, col) of a linear form <A, X>, stated on the
/// upper triangle. For row != col the symmetric matrix A carries coef/2 at
/// both (row, col) and (col, row).
struct SdpTerm {
  Position pos;
  Rational coef;
};

enum class ConstraintKind { normalization, consistency, localizing, equality };

inline std::string_view to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::normalization: return "normalization";
    case ConstraintKind::consistency: return "consistency";
    case ConstraintKind::localizing: return "localizing";
    case ConstraintKind::equality: return "equality";
  }
  return "?";
}

struct SdpConstraint {
  ConstraintKind kind;
  std::vector<SdpTerm> terms;
  Rational rhs;
  // equality rows: index j of h_j and the shift alpha of L(h_j x^alpha) = 0
  std::size_t source = 0;
  ExponentVec shift;
};

/// min <C, X>  s.t.  <A_k, X> = b_k,  X = M_t(L) (+) M_t(g_1 L) (+) ... PSD.
struct StandardFormSDP {
  std::size_t n = 0;
  unsigned t = 0;
  std::vector<std::size_t> block_dims;
  std::vector<std::vector<ExponentVec>> block_basis;
  // 0 for the moment block, i for the localizing block of inequality i (1-based)
  std::vector<std::size_t> block_constraint;
  std::vector<SdpConstraint> constraints;
  std::vector<SdpTerm> cost;
  // Moment-block positions carrying L(x^alpha). Localizing-block entries are
  // pinned by localizing rows instead.
  std::map<ExponentVec, std::vector<Position>> var_map;
  std::map<ExponentVec, Position> representative;
  std::size_t normalization_row = 0;
  // per equality h_j: constraint indices of its rows, with the shift alpha
  std::vector<std::vector<std::pair<std::size_t, ExponentVec>>> equality_rows;

  std::size_t constraint_count() const noexcept { return constraints.size(); }

  std::size_t total_dim() const {
    std::size_t s = 0;
    for (auto d : block_dims) s += d;
    return s;
  }

  std::map<ConstraintKind, std::size_t> constraint_census() const {
    std::map<ConstraintKind, std::size_t> out;
    for (const auto& c : constraints) ++out[c.kind];
    return out;
  }
};

inline StandardFormSDP build_mom_sdp(const POPInstance& inst, unsigned t, std::size_t cap = kDefaultCapacity) {
  inst.validate();
  const std::size_t n = inst.n;
  if ((inst.objective.degree() + 1) / 2 > t)
    throw Error(ErrorKind::degree, "relaxation order t = " + std::to_string(t) + " is below ceil(deg(f)/2)");
  for (const auto& g : inst.inequalities)
    if (g.degree() > 2 * t) throw Error(ErrorKind::degree, "inequality of degree " + std::to_string(g.degree()) + " exceeds 2t");
  for (const auto& h : inst.equalities)
    if (h.degree() > 2 * t) throw Error(ErrorKind::degree, "equality of degree " + std::to_string(h.degree()) + " exceeds 2t");
  // Fails early with a capacity error on oversized bases.
  binomial(n + 2 * t, 2 * t, cap);

  StandardFormSDP sdp;
  sdp.n = n;
  sdp.t = t;
  sdp.block_basis.push_back(monomials_up_to(n, t, cap));
  sdp.block_constraint.push_back(0);
  for (std::size_t i = 0; i < inst.inequalities.size(); ++i) {
    sdp.block_basis.push_back(monomials_up_to(n, localizing_order(inst.inequalities[i], t), cap));
    sdp.block_constraint.push_back(i + 1);
  }
  for (const auto& b : sdp.block_basis) sdp.block_dims.push_back(b.size());

  // Representatives: first upper-triangular moment-block position per monomial.
  const auto& basis = sdp.block_basis[0];
  for (std::size_t r = 0; r < basis.size(); ++r)
    for (std::size_t c = r; c < basis.size(); ++c) {
      ExponentVec a = basis[r] + basis[c];
      Position p{0, r, c};
      sdp.var_map[a].push_back(p);
      sdp.representative.try_emplace(a, p);
    }
  auto rep = [&](const ExponentVec& a) -> const Position& { return sdp.representative.at(a); };

  // (a) L(1) = 1
  sdp.normalization_row = 0;
  sdp.constraints.push_back({ConstraintKind::normalization, {{rep(ExponentVec(n)), 1}}, 1, 0, ExponentVec(n)});

  // (b) every other position tied to its representative
  for (const auto& [alpha, positions] : sdp.var_map) {
    const Position& p0 = positions.front();
    for (std::size_t k = 1; k < positions.size(); ++k)
      sdp.constraints.push_back({ConstraintKind::consistency, {{positions[k], 1}, {p0, -1}}, 0, 0, alpha});
  }

  // (c) localizing entries: sum_gamma g_gamma L(x^{a+b+gamma}) - X_i(a, b) = 0
  for (std::size_t blk = 1; blk < sdp.block_basis.size(); ++blk) {
    const Polynomial& g = inst.inequalities[blk - 1];
    const auto& lb = sdp.block_basis[blk];
    for (std::size_t r = 0; r < lb.size(); ++r)
      for (std::size_t c = r; c < lb.size(); ++c) {
        SdpConstraint row{ConstraintKind::localizing, {}, 0, blk, lb[r] + lb[c]};
        for (const auto& [gamma, coef] : g.terms()) row.terms.push_back({rep(lb[r] + lb[c] + gamma), coef});
        row.terms.push_back({Position{blk, r, c}, -1});
        sdp.constraints.push_back(std::move(row));
      }
  }

  // (d) L(h_j x^alpha) = 0 for |alpha| <= 2t - deg(h_j)
  sdp.equality_rows.resize(inst.equalities.size());
  for (std::size_t j = 0; j < inst.equalities.size(); ++j) {
    const Polynomial& h = inst.equalities[j];
    for (const auto& alpha : monomials_up_to(n, 2 * t - h.degree(), cap)) {
      SdpConstraint row{ConstraintKind::equality, {}, 0, j, alpha};
      for (const auto& [gamma, coef] : h.terms()) row.terms.push_back({rep(alpha + gamma), coef});
      if (row.terms.empty()) continue;
      sdp.equality_rows[j].emplace_back(sdp.constraints.size(), alpha);
      sdp.constraints.push_back(std::move(row));
    }
  }

  for (const auto& [alpha, coef] : inst.objective.terms()) sdp.cost.push_back({rep(alpha), coef});
  return sdp;
}

inline Rational objective_value(const MomentFunctional& L, const Polynomial& f) { return L.apply(f); }

/// X = M_t(L) (+) M_t(g_i L) laid out to match `sdp`.
inline std::vector<SymMatrixQ> block_matrix(const StandardFormSDP& sdp, const POPInstance& inst,
                                            const MomentFunctional& L) {
  std::vector<SymMatrixQ> blocks;
  blocks.push_back(assemble_moment_matrix(L, sdp.t));
  for (const auto& g : inst.inequalities) blocks.push_back(assemble_localizing_matrix(L, g, sdp.t));
  return blocks;
}

inline Rational evaluate_form(const std::vector<SdpTerm>& terms, const std::vector<SymMatrixQ>& blocks) {
  Rational v(0);
  for (const auto& term : terms) v += term.coef * blocks.at(term.pos.block)(term.pos.row, term.pos.col);
  return v;
}

/// SDPA sparse text. The standard form min <C,X>, <A_k,X> = b_k is written as
/// SDPA's dual side: c-vector = b, F_0 = -C, F_k = A_k (so the SDPA objective
/// value is -mom). Values are decimals with `digits` places.
inline std::string export_sdpa(const StandardFormSDP& sdp, unsigned digits = 17) {
  std::string s = "\"moment relaxation, order " + std::to_string(sdp.t) + "\"\n";
  s += std::to_string(sdp.constraints.size()) + "\n";
  s += std::to_string(sdp.block_dims.size()) + "\n";
  for (std::size_t i = 0; i < sdp.block_dims.size(); ++i) s += (i ? " " : "") + std::to_string(sdp.block_dims[i]);
  s += "\n";
  for (std::size_t k = 0; k < sdp.constraints.size(); ++k) s += (k ? " " : "") + to_decimal(sdp.constraints[k].rhs, digits);
  s += "\n";
  auto emit = [&](std::size_t mat, const std::vector<SdpTerm>& terms, const Rational& sign) {
    std::map<Position, Rational> merged;
    for (const auto& t : terms) merged[t.pos] += t.coef;
    for (const auto& [p, c] : merged) {
      if (c == 0) continue;
      Rational v = p.row == p.col ? c : Rational(c / 2);
      s += std::to_string(mat) + " " + std::to_string(p.block + 1) + " " + std::to_string(p.row + 1) + " " +
           std::to_string(p.col + 1) + " " + to_decimal(sign * v, digits) + "\n";
    }
  };
  emit(0, sdp.cost, Rational(-1));
  for (std::size_t k = 0; k < sdp.constraints.size(); ++k) emit(k + 1, sdp.constraints[k].terms, Rational(1));
  return s;
}

}  // namespace momsos
