#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "momsos/error.hpp"
#include "momsos/moment_sdp.hpp"
#include "momsos/polynomial.hpp"
#include "momsos/pop.hpp"
#include "momsos/rational.hpp"
#include "momsos/sdp_solver.hpp"

namespace momsos {

/// f - lambda = sum_i g_i sum_k s_{i,k}^2 + sum_j h_j p_j, with g_0 = 1.
/// Coefficients are the exact values of the floating-point data they came
/// from, so the identity only holds approximately.
struct Certificate {
  Rational lambda;
  std::vector<std::vector<Polynomial>> squares;  // index 0 .. m
  std::vector<Polynomial> ideal_mults;           // index 0 .. l-1
};

/// weight * q^2 * g_index, or weight * g_index when q is absent. The
/// weight is a nonnegative rational, so nonnegativity on S is syntactic.
struct QMTerm {
  std::size_t index = 0;  // 0 = the implicit constraint 1
  Rational weight;
  std::optional<Polynomial> base;

  Polynomial expand(const POPInstance& inst) const {
    Polynomial p = base ? square(*base) : Polynomial::constant(inst.n, 1);
    p *= weight;
    if (index > 0) p = p * inst.inequalities.at(index - 1);
    return p;
  }
};

struct RoundingDiagnostics {
  // Exact defect of the unrounded certificate: f - lambda - sum g sigma - sum h p.
  Rational defect_l1;
  Rational lambda_shift;       // lambda - lambda_rounded >= 0
  Rational squares_term;       // sum_i |g_i|_1 sum_k |s~^2 - s^2|_1
  Rational ideal_term;         // sum_j |h_j|_1 |p~_j - p_j|_1
  Rational product_term;       // squares term with |s~-s|_1 (2|s|_1 + |s~-s|_1)
  Rational coefficient_term;   // product term with |s~-s|_1 <= N eps / 2
  Rational textbook_bound;     // eps (sum_i |g_i|_1 sum_k (2|s|_1 + eps C(n+2t,2t)) + sum_j |h_j|_1 eps)
};

struct RoundedCertificate {
  Certificate base;
  Rational eps;
  unsigned t = 0;
  std::size_t ball_index = 0;  // 1-based index of the R^2 - |x|^2 constraint
  Rational radius;             // rational R >= 1 used in the membership proof
  Polynomial residual;         // E
  Rational l1_residual;
  Rational adjusted_bound;     // lambda - R^{2t} |E|_1
  std::vector<QMTerm> membership_proof;  // sums to R^{2t} |E|_1 - E
  std::optional<RoundingDiagnostics> diagnostics;
};

// ---------------------------------------------------------------------------
// Extraction

/// Spectral factors of a Gram matrix: s_k = sqrt(lambda_k) * v_k in the
/// monomial basis, skipping eigenvalues at or below rank_tol * max(1, lmax).
/// Negative eigenvalues are clipped.
inline std::vector<Polynomial> gram_to_squares(const Eigen::MatrixXd& gram, const std::vector<ExponentVec>& basis,
                                               std::size_t n, double rank_tol = 1e-9) {
  std::vector<Polynomial> out;
  if (gram.size() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (gram + gram.transpose()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  double cutoff = rank_tol * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index k = ev.size(); k-- > 0;) {
    if (ev(k) <= cutoff) continue;
    double scale = std::sqrt(ev(k));
    Polynomial s(n);
    for (std::size_t r = 0; r < basis.size(); ++r)
      s.add_term(basis[r], from_double(scale * es.eigenvectors()(static_cast<Eigen::Index>(r), k)));
    if (!s.is_zero()) out.push_back(std::move(s));
  }
  return out;
}

inline Certificate extract_sos(const SDPSolution& sol, const StandardFormSDP& sdp, const POPInstance& inst,
                               double rank_tol = 1e-9) {
  if (static_cast<std::size_t>(sol.dual_y.size()) != sdp.constraints.size())
    throw Error(ErrorKind::invalid_argument, "solution carries no dual vector for this SDP");
  if (sdp.block_dims.size() != inst.inequalities.size() + 1)
    throw Error(ErrorKind::invalid_argument, "SDP does not match the instance");
  SdpData data = to_sdp_data(sdp);
  BlockMatrix z = dual_slack_from_y(data, sol.dual_y);

  Certificate cert;
  cert.lambda = from_double(sol.dual_y(static_cast<Eigen::Index>(sdp.normalization_row)));
  for (std::size_t b = 0; b < z.size(); ++b) cert.squares.push_back(gram_to_squares(z[b], sdp.block_basis[b], inst.n, rank_tol));
  for (std::size_t j = 0; j < inst.equalities.size(); ++j) {
    Polynomial p(inst.n);
    for (const auto& [row, alpha] : sdp.equality_rows[j])
      p.add_term(alpha, from_double(sol.dual_y(static_cast<Eigen::Index>(row))));
    cert.ideal_mults.push_back(std::move(p));
  }
  return cert;
}

/// sum_i g_i sigma_i + sum_j h_j p_j with g_0 = 1.
inline Polynomial certificate_rhs(const Certificate& c, const POPInstance& inst) {
  Polynomial rhs(inst.n);
  for (std::size_t i = 0; i < c.squares.size(); ++i) {
    Polynomial sigma(inst.n);
    for (const auto& s : c.squares[i]) sigma += square(s);
    rhs += i == 0 ? sigma : sigma * inst.inequalities.at(i - 1);
  }
  for (std::size_t j = 0; j < c.ideal_mults.size(); ++j) rhs += c.ideal_mults[j] * inst.equalities.at(j);
  return rhs;
}

// ---------------------------------------------------------------------------
// Membership of R^{|gamma|} -/+ x^gamma in the quadratic module

enum class MonomialSign { minus, plus };

/// Context for the decomposition: the rational radius R (>= 1) and the ball
/// constraint c - |x|^2 it relies on, with c <= R^2.
struct BallContext {
  std::size_t n = 0;
  Rational radius;
  std::size_t ball_index = 1;
  Rational ball_constant;
};

namespace detail {

inline QMTerm times_variable(QMTerm term, std::size_t n, std::size_t j) {
  Polynomial xj = Polynomial::variable(n, j);
  term.base = term.base ? *term.base * xj : xj;
  return term;
}

inline void append_scaled(std::vector<QMTerm>& out, std::vector<QMTerm> terms, const Rational& w) {
  for (auto& t : terms) {
    t.weight *= w;
    if (t.weight != 0) out.push_back(std::move(t));
  }
}

/// R^2 - x_j^2 = (R^2 - c) * 1 + (c - |x|^2) + sum_{i != j} x_i^2.
inline std::vector<QMTerm> ball_base_case(const BallContext& ctx, std::size_t j) {
  std::vector<QMTerm> out;
  Rational gap = ctx.radius * ctx.radius - ctx.ball_constant;
  if (gap < 0) throw Error(ErrorKind::invalid_argument, "radius below the ball constraint's own radius");
  if (gap > 0) out.push_back({0, gap, std::nullopt});
  out.push_back({ctx.ball_index, 1, std::nullopt});
  for (std::size_t i = 0; i < ctx.n; ++i)
    if (i != j) out.push_back({0, 1, Polynomial::variable(ctx.n, i)});
  return out;
}

/// R^{2|a|} - x^{2a} by induction on |a|:
/// R^{2|a|-2} (R^2 - x_j^2) + x_j^2 (R^{2|a|-2} - x^{2(a - e_j)}).
inline std::vector<QMTerm> even_power_terms(const BallContext& ctx, ExponentVec a) {
  std::vector<QMTerm> out;
  Rational scale(1);
  const Rational r2 = ctx.radius * ctx.radius;
  std::vector<std::size_t> prefix;  // variables multiplied in so far
  while (a.degree() > 0) {
    std::size_t j = 0;
    while (a[j] == 0) ++j;
    a[j] -= 1;
    Rational w = pow(r2, a.degree());
    for (auto t : ball_base_case(ctx, j)) {
      for (std::size_t v : prefix) t = times_variable(std::move(t), ctx.n, v);
      t.weight *= w;
      out.push_back(std::move(t));
    }
    prefix.push_back(j);
  }
  return out;
}

inline ExponentVec split_prefix(const ExponentVec& gamma, unsigned k) {
  ExponentVec a(gamma.size());
  for (std::size_t i = 0; i < gamma.size() && k > 0; ++i) {
    unsigned take = std::min(gamma[i], k);
    a[i] = take;
    k -= take;
  }
  return a;
}

}  // namespace detail

/// QMTerms summing exactly to R^{|gamma|} - x^gamma (minus) or
/// R^{|gamma|} + x^gamma (plus), with every term of degree at most |gamma|
/// rounded up to even.
inline std::vector<QMTerm> monomial_membership(const ExponentVec& gamma, const BallContext& ctx, unsigned t,
                                            MonomialSign sign) {
  using namespace detail;
  if (gamma.degree() > 2 * t) throw Error(ErrorKind::degree, "monomial degree exceeds 2t");
  if (ctx.radius < 1) throw Error(ErrorKind::invalid_argument, "decomposition needs R >= 1");
  if (gamma.size() != ctx.n) throw Error(ErrorKind::dimension, "exponent length differs from dimension");
  const std::size_t n = ctx.n;
  const unsigned d = gamma.degree();
  const Rational& r = ctx.radius;
  std::vector<QMTerm> out;

  if (d == 0) {
    if (sign == MonomialSign::plus) out.push_back({0, 2, std::nullopt});
    return out;
  }
  if (gamma.all_even()) {
    ExponentVec half(n);
    for (std::size_t i = 0; i < n; ++i) half[i] = gamma[i] / 2;
    if (sign == MonomialSign::minus) return even_power_terms(ctx, half);
    out.push_back({0, pow(r, d), std::nullopt});
    out.push_back({0, 1, Polynomial::monomial(half)});
    return out;
  }
  const Rational s = sign == MonomialSign::minus ? Rational(-1) : Rational(1);
  if (d % 2 == 0) {
    // ((x^a -/+ x^b)^2 + (R^{2|a|} - x^{2a}) + (R^{2|b|} - x^{2b})) / 2
    ExponentVec a = split_prefix(gamma, d / 2);
    ExponentVec b = gamma - a;
    Polynomial q = Polynomial::monomial(a) + Polynomial::monomial(b, s);
    out.push_back({0, Rational(1, 2), q});
    append_scaled(out, even_power_terms(ctx, a), Rational(1, 2));
    append_scaled(out, even_power_terms(ctx, b), Rational(1, 2));
    return out;
  }
  // ((R x^a -/+ x^b)^2 + R^2 (R^{2|a|} - x^{2a}) + (R^{2|b|} - x^{2b})) / 2R
  ExponentVec a = split_prefix(gamma, d / 2);
  ExponentVec b = gamma - a;
  Polynomial q = Polynomial::monomial(a, r) + Polynomial::monomial(b, s);
  out.push_back({0, 1 / (2 * r), q});
  append_scaled(out, even_power_terms(ctx, a), r / 2);
  append_scaled(out, even_power_terms(ctx, b), 1 / (2 * r));
  return out;
}

/// Convenience form with R given through R^2, which must be a rational
/// square and at least 1; the ball constraint is assumed to be R^2 - |x|^2.
inline std::vector<QMTerm> monomial_membership(const ExponentVec& gamma, const Rational& r_squared, unsigned t,
                                            MonomialSign sign, std::size_t ball_index = 1) {
  auto r = exact_sqrt(r_squared);
  if (!r) throw Error(ErrorKind::invalid_argument, "R^2 is not the square of a rational");
  return monomial_membership(gamma, BallContext{gamma.size(), *r, ball_index, r_squared}, t, sign);
}

inline Polynomial sum_terms(const std::vector<QMTerm>& terms, const POPInstance& inst) {
  Polynomial p(inst.n);
  for (const auto& t : terms) p += t.expand(inst);
  return p;
}

/// Rational R >= 1 for the membership proof: sqrt(c) when rational, else the
/// smallest power of two above it.
inline BallContext ball_context(const POPInstance& inst) {
  BoundReport b = detect_explicit_bound(inst);
  if (!b.explicitly_bounded)
    throw Error(ErrorKind::unbounded, "certificate rounding needs an explicit R^2 - |x|^2 >= 0 constraint");
  return BallContext{inst.n, std::max(Rational(1), b.radius), b.witness_index + 1, b.r_squared};
}

/// R^{2t} |E|_1 - E = sum_gamma |E_gamma| ((R^{2t} - R^{|gamma|}) + (R^{|gamma|} -/+ x^gamma)).
inline std::vector<QMTerm> residual_membership(const Polynomial& e, const BallContext& ctx, unsigned t) {
  std::vector<QMTerm> out;
  const Rational r2t = pow(ctx.radius, 2 * t);
  for (const auto& [gamma, c] : e.terms()) {
    Rational w = abs(c);
    Rational gap = r2t - pow(ctx.radius, gamma.degree());
    if (gap > 0) out.push_back({0, w * gap, std::nullopt});
    detail::append_scaled(out, monomial_membership(gamma, ctx, t, c > 0 ? MonomialSign::minus : MonomialSign::plus), w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rounding

inline Polynomial round_coefficients(const Polynomial& p, const Rational& eps) {
  Polynomial r(p.dim());
  for (const auto& [a, c] : p.terms()) r.add_term(a, round_to_multiple(c, eps));
  return r;
}

inline RoundedCertificate round_certificate(const Certificate& cert, const Rational& eps, const POPInstance& inst,
                                            unsigned t) {
  if (eps <= 0) throw Error(ErrorKind::invalid_argument, "rounding step must be positive");
  BallContext ctx = ball_context(inst);
  const std::size_t n = inst.n;

  RoundedCertificate rc;
  rc.eps = eps;
  rc.t = t;
  rc.ball_index = ctx.ball_index;
  rc.radius = ctx.radius;
  rc.base.lambda = floor_to_multiple(cert.lambda, eps);
  for (const auto& list : cert.squares) {
    std::vector<Polynomial> rounded;
    for (const auto& s : list) {
      Polynomial r = round_coefficients(s, eps);
      if (!r.is_zero()) rounded.push_back(std::move(r));
    }
    rc.base.squares.push_back(std::move(rounded));
  }
  for (const auto& p : cert.ideal_mults) rc.base.ideal_mults.push_back(round_coefficients(p, eps));

  Polynomial f_minus_lambda = inst.objective - Polynomial::constant(n, rc.base.lambda);
  rc.residual = certificate_rhs(rc.base, inst) - f_minus_lambda;
  rc.l1_residual = l1_norm(rc.residual);
  rc.adjusted_bound = rc.base.lambda - pow(rc.radius, 2 * t) * rc.l1_residual;
  rc.membership_proof = residual_membership(rc.residual, ctx, t);

  RoundingDiagnostics dg;
  Polynomial defect = inst.objective - Polynomial::constant(n, cert.lambda) - certificate_rhs(cert, inst);
  dg.defect_l1 = l1_norm(defect);
  dg.lambda_shift = cert.lambda - rc.base.lambda;
  const Rational big = Rational(binomial(n + 2 * t, 2 * t));
  for (std::size_t i = 0; i < cert.squares.size(); ++i) {
    Rational gnorm = i == 0 ? Rational(1) : l1_norm(inst.inequalities[i - 1]);
    for (const auto& s : cert.squares[i]) {
      Polynomial sr = round_coefficients(s, eps);
      Polynomial diff = sr - s;
      Rational dl1 = l1_norm(diff);
      Rational sl1 = l1_norm(s);
      dg.squares_term += gnorm * l1_norm(square(sr) - square(s));
      dg.product_term += gnorm * dl1 * (2 * sl1 + dl1);
      Rational coeff_bound = Rational(s.term_count()) * eps / 2;
      dg.coefficient_term += gnorm * coeff_bound * (2 * sl1 + coeff_bound);
      dg.textbook_bound += gnorm * eps * (2 * sl1 + eps * big);
    }
  }
  for (std::size_t j = 0; j < cert.ideal_mults.size(); ++j) {
    Rational hnorm = l1_norm(inst.equalities[j]);
    dg.ideal_term += hnorm * l1_norm(round_coefficients(cert.ideal_mults[j], eps) - cert.ideal_mults[j]);
    dg.textbook_bound += hnorm * eps * eps;
  }
  rc.diagnostics = dg;
  return rc;
}

// ---------------------------------------------------------------------------
// Verification

struct VerificationReport {
  bool identity_ok = false;
  std::vector<std::pair<ExponentVec, Rational>> identity_mismatch;  // monomial, lhs - rhs
  bool degrees_ok = false;
  std::vector<std::string> degree_violations;
  bool membership_ok = false;
  std::vector<std::pair<ExponentVec, Rational>> membership_mismatch;
  std::vector<std::string> notes;
  Rational certified_bound;

  bool passed() const { return identity_ok && degrees_ok && membership_ok; }
};

/// Exact re-check of
///   (a) f - lambda + E = sigma_0 + sum g_i sigma_i + sum h_j p_j,
///   (b) degree bounds of every product,
///   (c) the membership proof sums to R^{2t} |E|_1 - E with stated |E|_1 and
///       bound consistent.
/// When all pass, f >= certified_bound on the feasible set.
inline VerificationReport verify_certificate(const RoundedCertificate& rc, const POPInstance& inst) {
  VerificationReport rep;
  const std::size_t n = inst.n;
  const unsigned two_t = 2 * rc.t;

  // (a)
  Polynomial lhs = inst.objective - Polynomial::constant(n, rc.base.lambda) + rc.residual;
  bool shape_ok = rc.base.squares.size() <= inst.inequalities.size() + 1 &&
                  rc.base.ideal_mults.size() <= inst.equalities.size();
  if (!shape_ok) rep.notes.push_back("certificate references constraints the instance does not have");
  Polynomial rhs = shape_ok ? certificate_rhs(rc.base, inst) : Polynomial(n);
  Polynomial diff = lhs - rhs;
  for (const auto& [a, c] : diff.terms()) rep.identity_mismatch.emplace_back(a, c);
  rep.identity_ok = shape_ok && diff.is_zero();

  // (b)
  for (std::size_t i = 0; shape_ok && i < rc.base.squares.size(); ++i) {
    unsigned gdeg = i == 0 ? 0 : inst.inequalities[i - 1].degree();
    for (std::size_t k = 0; k < rc.base.squares[i].size(); ++k)
      if (gdeg + 2 * rc.base.squares[i][k].degree() > two_t)
        rep.degree_violations.push_back("square " + std::to_string(i) + " " + std::to_string(k + 1));
  }
  for (std::size_t j = 0; shape_ok && j < rc.base.ideal_mults.size(); ++j)
    if (!rc.base.ideal_mults[j].is_zero() && inst.equalities[j].degree() + rc.base.ideal_mults[j].degree() > two_t)
      rep.degree_violations.push_back("ideal " + std::to_string(j));
  for (std::size_t q = 0; q < rc.membership_proof.size(); ++q) {
    const auto& term = rc.membership_proof[q];
    if (term.index > inst.inequalities.size()) {
      rep.degree_violations.push_back("qmterm " + std::to_string(q) + " references a missing constraint");
      continue;
    }
    unsigned gdeg = term.index == 0 ? 0 : inst.inequalities[term.index - 1].degree();
    unsigned qdeg = term.base ? 2 * term.base->degree() : 0;
    if (gdeg + qdeg > two_t) rep.degree_violations.push_back("qmterm " + std::to_string(q));
  }
  if (rc.residual.degree() > two_t) rep.degree_violations.push_back("residual");
  rep.degrees_ok = rep.degree_violations.empty();

  // (c)
  bool weights_ok = true;
  for (const auto& term : rc.membership_proof)
    if (term.weight < 0 || term.index > inst.inequalities.size()) weights_ok = false;
  if (!weights_ok) rep.notes.push_back("membership proof has a negative weight or bad index");
  const Rational l1 = l1_norm(rc.residual);
  if (l1 != rc.l1_residual) rep.notes.push_back("stated |E|_1 differs from the residual");
  const Rational r2t = pow(rc.radius, two_t);
  Polynomial target = Polynomial::constant(n, r2t * l1) - rc.residual;
  Polynomial proof = weights_ok ? sum_terms(rc.membership_proof, inst) : Polynomial(n);
  Polynomial mdiff = proof - target;
  for (const auto& [a, c] : mdiff.terms()) rep.membership_mismatch.emplace_back(a, c);
  rep.certified_bound = rc.base.lambda - r2t * l1;
  bool bound_ok = rep.certified_bound == rc.adjusted_bound;
  if (!bound_ok) rep.notes.push_back("stated bound differs from lambda - R^{2t} |E|_1");
  rep.membership_ok = weights_ok && mdiff.is_zero() && l1 == rc.l1_residual && bound_ok;
  return rep;
}

inline std::string format_verification(const VerificationReport& rep) {
  std::string s;
  s += std::string("identity: ") + (rep.identity_ok ? "pass" : "FAIL") + "\n";
  for (const auto& [a, c] : rep.identity_mismatch)
    s += "  mismatch at [" + monomial_to_string(a) + "]: " + to_string(c) + "\n";
  s += std::string("degrees: ") + (rep.degrees_ok ? "pass" : "FAIL") + "\n";
  for (const auto& v : rep.degree_violations) s += "  violation: " + v + "\n";
  s += std::string("membership: ") + (rep.membership_ok ? "pass" : "FAIL") + "\n";
  for (const auto& [a, c] : rep.membership_mismatch)
    s += "  mismatch at [" + monomial_to_string(a) + "]: " + to_string(c) + "\n";
  for (const auto& note : rep.notes) s += "  note: " + note + "\n";
  s += "certified bound: " + to_string(rep.certified_bound) + "  (~" + std::to_string(to_double(rep.certified_bound)) + ")\n";
  return s;
}

// ---------------------------------------------------------------------------
// Certificate files

inline std::string format_certificate(const RoundedCertificate& rc) {
  std::string s = "lambda " + to_string(rc.base.lambda) + "\n";
  s += "t " + std::to_string(rc.t) + "\n";
  s += "eps " + to_string(rc.eps) + "\n";
  s += "radius " + to_string(rc.radius) + "\n";
  s += "l1 " + to_string(rc.l1_residual) + "\n";
  s += "bound " + to_string(rc.adjusted_bound) + "\n";
  for (std::size_t i = 0; i < rc.base.squares.size(); ++i)
    for (std::size_t k = 0; k < rc.base.squares[i].size(); ++k)
      s += "square " + std::to_string(i) + " " + std::to_string(k + 1) + " : " + to_string(rc.base.squares[i][k]) + "\n";
  for (std::size_t j = 0; j < rc.base.ideal_mults.size(); ++j)
    s += "ideal " + std::to_string(j + 1) + " : " + to_string(rc.base.ideal_mults[j]) + "\n";
  s += "residual : " + to_string(rc.residual) + "\n";
  for (const auto& q : rc.membership_proof) {
    s += "qmterm " + std::to_string(q.index) + " : " + to_string(q.weight);
    if (q.base) s += " * ( " + to_string(*q.base) + " )^2";
    s += "\n";
  }
  return s;
}

inline RoundedCertificate parse_certificate(std::istream& in, const POPInstance& inst) {
  RoundedCertificate rc;
  rc.base.squares.resize(inst.inequalities.size() + 1);
  rc.base.ideal_mults.assign(inst.equalities.size(), Polynomial(inst.n));
  rc.residual = Polynomial(inst.n);
  bool have_lambda = false, have_t = false, have_radius = false, have_l1 = false, have_bound = false;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::parse, "certificate line " + std::to_string(lineno) + ": " + msg);
  };
  auto index_of = [&](const std::string& tok) -> std::size_t {
    try {
      std::size_t pos = 0;
      unsigned long v = std::stoul(tok, &pos);
      if (pos != tok.size()) fail("bad index '" + tok + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("bad index '" + tok + "'");
    }
    return 0;
  };
  auto poly = [&](const std::string& text) {
    try {
      return parse_polynomial(text, inst.n);
    } catch (const Error& e) {
      fail(e.what());
    }
    return Polynomial(inst.n);
  };
  auto rational = [&](const std::string& text) {
    auto r = try_parse_rational(text);
    if (!r) fail("bad rational '" + text + "'");
    return *r;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string head, body;
    auto colon = line.find(':');
    if (colon != std::string::npos) {
      head = line.substr(0, colon);
      body = line.substr(colon + 1);
    }
    std::istringstream hs(head);
    std::vector<std::string> toks;
    for (std::string tok; hs >> tok;) toks.push_back(tok);

    if (key == "lambda" || key == "t" || key == "eps" || key == "radius" || key == "l1" || key == "bound") {
      std::string val, extra;
      if (!(ls >> val) || (ls >> extra)) fail("expected one value after '" + key + "'");
      if (key == "t") {
        rc.t = static_cast<unsigned>(index_of(val));
        have_t = true;
      } else if (key == "lambda") {
        rc.base.lambda = rational(val);
        have_lambda = true;
      } else if (key == "eps") {
        rc.eps = rational(val);
      } else if (key == "radius") {
        rc.radius = rational(val);
        have_radius = true;
      } else if (key == "l1") {
        rc.l1_residual = rational(val);
        have_l1 = true;
      } else {
        rc.adjusted_bound = rational(val);
        have_bound = true;
      }
    } else if (key == "square") {
      if (toks.size() != 3) fail("expected 'square i k : <polynomial>'");
      std::size_t i = index_of(toks[1]);
      if (i >= rc.base.squares.size()) fail("square index " + toks[1] + " exceeds the instance's constraints");
      rc.base.squares[i].push_back(poly(body));
    } else if (key == "ideal") {
      if (toks.size() != 2) fail("expected 'ideal j : <polynomial>'");
      std::size_t j = index_of(toks[1]);
      if (j < 1 || j > rc.base.ideal_mults.size()) fail("ideal index " + toks[1] + " out of range");
      rc.base.ideal_mults[j - 1] = poly(body);
    } else if (key == "residual") {
      if (toks.size() != 1) fail("expected 'residual : <polynomial>'");
      rc.residual = poly(body);
    } else if (key == "qmterm") {
      if (toks.size() != 2) fail("expected 'qmterm i : <weight> [* ( <polynomial> )^2]'");
      QMTerm q;
      q.index = index_of(toks[1]);
      auto star = body.find('*');
      std::string wtext = body.substr(0, star);
      wtext.erase(0, wtext.find_first_not_of(" \t"));
      wtext.erase(wtext.find_last_not_of(" \t\r") + 1);
      q.weight = rational(wtext);
      if (star != std::string::npos) {
        auto open = body.find('(', star);
        auto close = body.rfind(")^2");
        if (open == std::string::npos || close == std::string::npos || close < open) fail("expected '( <polynomial> )^2'");
        q.base = poly(body.substr(open + 1, close - open - 1));
      }
      rc.membership_proof.push_back(std::move(q));
    } else {
      fail("unknown keyword '" + key + "'");
    }
  }
  if (!have_lambda || !have_t || !have_radius || !have_l1 || !have_bound)
    throw Error(ErrorKind::parse, "certificate header incomplete (need lambda, t, radius, l1, bound)");
  BoundReport b = detect_explicit_bound(inst);
  rc.ball_index = b.explicitly_bounded ? b.witness_index + 1 : 0;
  return rc;
}

inline RoundedCertificate parse_certificate(const std::string& text, const POPInstance& inst) {
  std::istringstream in(text);
  return parse_certificate(in, inst);
}

// ---------------------------------------------------------------------------
// Pipeline

struct CertifyResult {
  StandardFormSDP sdp;
  SDPSolution solution;
  Certificate raw;
  RoundedCertificate rounded;
  VerificationReport verification;
};

inline CertifyResult certify(const POPInstance& inst, unsigned t, const SolverConfig& cfg, const Rational& round_eps,
                             double rank_tol = 1e-9) {
  ball_context(inst);  // fail before solving when there is no ball constraint
  CertifyResult r;
  r.sdp = build_mom_sdp(inst, t);
  r.solution = solve_sdp(r.sdp, cfg);
  if (r.solution.status == SolveStatus::infeasible)
    throw Error(ErrorKind::infeasible, "moment relaxation detected as infeasible");
  r.raw = extract_sos(r.solution, r.sdp, inst, rank_tol);
  r.rounded = round_certificate(r.raw, round_eps, inst, t);
  r.verification = verify_certificate(r.rounded, inst);
  return r;
}

}  // namespace momsos
