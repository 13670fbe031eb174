#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "momsos/error.hpp"
#include "momsos/polynomial.hpp"
#include "momsos/rational.hpp"

namespace momsos {

/// minimize f(x) subject to g_i(x) >= 0, h_j(x) = 0. The constraint g_0 = 1
/// is implicit and never stored.
struct POPInstance {
  std::size_t n = 0;
  Polynomial objective;
  std::vector<Polynomial> inequalities;
  std::vector<Polynomial> equalities;

  void validate() const {
    if (n < 1) throw Error(ErrorKind::invalid_argument, "instance dimension must be >= 1");
    auto check = [&](const Polynomial& p, const char* what) {
      if (p.dim() != n) throw Error(ErrorKind::dimension, std::string(what) + " has dimension " + std::to_string(p.dim()) + ", expected " + std::to_string(n));
    };
    check(objective, "objective");
    for (const auto& g : inequalities) check(g, "inequality");
    for (const auto& h : equalities) check(h, "equality");
  }

  bool feasible_at(std::span<const Rational> x) const {
    for (const auto& g : inequalities)
      if (poly_eval(g, x) < 0) return false;
    for (const auto& h : equalities)
      if (poly_eval(h, x) != 0) return false;
    return true;
  }
};

/// R^2 - sum_i x_i^2.
inline Polynomial ball_polynomial(std::size_t n, const Rational& r_squared) {
  Polynomial p = Polynomial::constant(n, r_squared);
  for (std::size_t i = 0; i < n; ++i) p.add_term(2 * ExponentVec::unit(n, i), -1);
  return p;
}

/// Copy of `inst` with R^2 - |x|^2 >= 0 prepended to the inequalities.
inline POPInstance with_ball(POPInstance inst, const Rational& r_squared) {
  if (r_squared <= 0) throw Error(ErrorKind::invalid_argument, "ball radius squared must be positive");
  inst.inequalities.insert(inst.inequalities.begin(), ball_polynomial(inst.n, r_squared));
  return inst;
}

struct BoundReport {
  bool explicitly_bounded = false;
  Rational r_squared;         // c in c - |x|^2, meaningful iff bounded
  Rational radius;            // sqrt(c) if rational, else smallest power of two >= sqrt(c)
  bool radius_exact = false;  // radius^2 == r_squared
  std::size_t witness_index = 0;
};

namespace detail {
inline std::optional<Rational> ball_constant(const Polynomial& g) {
  const std::size_t n = g.dim();
  if (g.term_count() != n + 1) return std::nullopt;
  Rational c = g.coefficient(ExponentVec(n));
  if (c <= 0) return std::nullopt;
  for (std::size_t i = 0; i < n; ++i)
    if (g.coefficient(2 * ExponentVec::unit(n, i)) != -1) return std::nullopt;
  return c;
}
}  // namespace detail

/// Looks for an inequality of the exact form c - sum_i x_i^2 with c > 0.
inline BoundReport detect_explicit_bound(const POPInstance& inst) {
  BoundReport rep;
  for (std::size_t i = 0; i < inst.inequalities.size(); ++i) {
    auto c = detail::ball_constant(inst.inequalities[i]);
    if (!c) continue;
    rep.explicitly_bounded = true;
    rep.r_squared = *c;
    rep.witness_index = i;
    if (auto s = exact_sqrt(*c)) {
      rep.radius = *s;
      rep.radius_exact = true;
    } else {
      rep.radius = pow2_sqrt_upper(*c);
    }
    break;
  }
  return rep;
}

inline std::size_t bit_complexity(const Polynomial& p) {
  std::size_t m = 0;
  for (const auto& [a, c] : p.terms()) m = std::max(m, bit_complexity(c));
  return m + bit_length(Integer(p.term_count()));
}

inline std::size_t bit_complexity(const POPInstance& inst) {
  std::size_t m = bit_complexity(inst.objective);
  for (const auto& g : inst.inequalities) m = std::max(m, bit_complexity(g));
  for (const auto& h : inst.equalities) m = std::max(m, bit_complexity(h));
  return m;
}

// ---------------------------------------------------------------------------
// Instance files:
//   n <int>
//   minimize <polynomial>
//   ineq <polynomial>      # g(x) >= 0
//   eq <polynomial>        # h(x) = 0

inline POPInstance parse_instance(std::istream& in) {
  POPInstance inst;
  bool have_n = false, have_obj = false;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw Error(ErrorKind::parse, "line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    std::size_t kw_end = line.find_first_of(" \t", start);
    std::string keyword = line.substr(start, kw_end == std::string::npos ? std::string::npos : kw_end - start);
    std::string rest = kw_end == std::string::npos ? std::string() : line.substr(kw_end);
    std::size_t rest_col = kw_end == std::string::npos ? line.size() : kw_end;
    if (keyword == "n") {
      if (have_n) fail("duplicate 'n'");
      std::istringstream ss(rest);
      long v = 0;
      std::string extra;
      if (!(ss >> v) || v < 1 || (ss >> extra)) fail("expected a positive integer after 'n'");
      inst.n = static_cast<std::size_t>(v);
      have_n = true;
      continue;
    }
    if (keyword != "minimize" && keyword != "ineq" && keyword != "eq") fail("unknown keyword '" + keyword + "'");
    if (!have_n) fail("'n' must come before polynomials");
    Polynomial p;
    try {
      p = parse_polynomial(rest, inst.n);
    } catch (const Error& e) {
      // Shift the column reported by the polynomial parser to a line column.
      std::string msg = e.what();
      if (msg.rfind("column ", 0) == 0) {
        std::size_t colon = msg.find(':');
        std::size_t col = std::stoul(msg.substr(7, colon - 7)) + rest_col;
        msg = "column " + std::to_string(col) + msg.substr(colon);
      }
      fail(msg);
    }
    if (keyword == "minimize") {
      if (have_obj) fail("duplicate 'minimize'");
      inst.objective = std::move(p);
      have_obj = true;
    } else if (keyword == "ineq") {
      inst.inequalities.push_back(std::move(p));
    } else {
      inst.equalities.push_back(std::move(p));
    }
  }
  if (!have_n) throw Error(ErrorKind::parse, "missing 'n' line");
  if (!have_obj) throw Error(ErrorKind::parse, "missing 'minimize' line");
  inst.validate();
  return inst;
}

inline POPInstance parse_instance(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

inline std::string format_instance(const POPInstance& inst) {
  std::string s = "n " + std::to_string(inst.n) + "\n";
  s += "minimize " + to_string(inst.objective) + "\n";
  for (const auto& g : inst.inequalities) s += "ineq " + to_string(g) + "\n";
  for (const auto& h : inst.equalities) s += "eq " + to_string(h) + "\n";
  return s;
}

}  // namespace momsos
