#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <boost/integer/common_factor_rt.hpp>
#include <Eigen/Dense>

#include "momsos/error.hpp"
#include "momsos/measures.hpp"
#include "momsos/pop.hpp"
#include "momsos/rational.hpp"

namespace momsos {

/// (B N)^{-N}: every nonzero eigenvalue of a symmetric integer N x N matrix
/// with entries bounded by B in absolute value is at least this large.
inline Rational integer_eig_lower_bound(const Integer& b, std::size_t n) {
  if (b < 1 || n < 1) throw Error(ErrorKind::invalid_argument, "integer_eig_lower_bound needs B >= 1 and N >= 1");
  Integer bn = b * n;
  Integer p = 1;
  for (std::size_t i = 0; i < n; ++i) p *= bn;
  return Rational(Integer(1), p);
}

struct ScaledEigBound {
  Integer common_denominator;  // C: lcm of entry denominators
  Integer entry_bound;         // B: max |entry| of C * M (at least 1)
  Rational bound;              // integer_eig_lower_bound(B, N) / C
};

inline ScaledEigBound scaled_eig_bound(const SymMatrixQ& m) {
  const std::size_t n = m.size();
  if (n == 0) throw Error(ErrorKind::invalid_argument, "empty matrix");
  Integer c = 1;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = r; k < n; ++k) c = boost::multiprecision::lcm(c, den(m(r, k)));
  Integer b = 0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = r; k < n; ++k) {
      Integer e = num(Rational(abs(m(r, k)) * c));
      if (e > b) b = e;
    }
  if (b == 0) b = 1;
  return {c, b, integer_eig_lower_bound(b, n) / Rational(c)};
}

struct NonzeroEig {
  double value;  // +infinity when every eigenvalue is numerically zero
  std::size_t rank;
};

/// Floating-point diagnostic: eigenvalues with |lambda| <= rank_tol *
/// max(1, |lambda|_max) count as zero.
inline NonzeroEig min_nonzero_eig(const Eigen::MatrixXd& m, double rank_tol = 1e-9) {
  if (rank_tol <= 0) throw Error(ErrorKind::invalid_argument, "rank tolerance must be positive");
  Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
  double lmax = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  double cutoff = rank_tol * std::max(1.0, lmax);
  NonzeroEig out{std::numeric_limits<double>::infinity(), 0};
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double a = std::abs(ev(i));
    if (a <= cutoff) continue;
    ++out.rank;
    out.value = std::min(out.value, a);
  }
  return out;
}

inline NonzeroEig min_nonzero_eig(const SymMatrixQ& m, double rank_tol = 1e-9) {
  return min_nonzero_eig(m.to_double(), rank_tol);
}

struct ConditioningRecord {
  std::string label;
  std::size_t size = 0;
  Integer common_denominator;
  Integer entry_bound;
  Rational eig_bound;
  double measured_min_nonzero_eig = 0;
  std::size_t numerical_rank = 0;
  bool violated = false;
};

struct ConditioningReport {
  std::vector<ConditioningRecord> records;
  std::size_t moment_bit_complexity = 0;
  std::string kernel_analysis;
  std::size_t violations = 0;
};

/// Assembles M_t(L) and every M_t(g_i L), bounds their smallest nonzero
/// eigenvalues through the integer scaling, and compares with the measured
/// spectrum. A violation means the certified bound exceeds a measured
/// nonzero eigenvalue.
inline ConditioningReport check_conditioning(const MomentFunctional& L, const POPInstance& inst, unsigned t,
                                         double rank_tol = 1e-9) {
  ConditioningReport rep;
  for (const auto& [alpha, v] : L.values)
    if (alpha.degree() <= 2 * t) rep.moment_bit_complexity = std::max(rep.moment_bit_complexity, bit_complexity(v));
  rep.kernel_analysis = inst.equalities.empty() ? "not needed (no equality constraints)" : "not certified";

  auto analyse = [&](std::string label, const SymMatrixQ& m) {
    ConditioningRecord rec;
    rec.label = std::move(label);
    rec.size = m.size();
    auto sb = scaled_eig_bound(m);
    rec.common_denominator = sb.common_denominator;
    rec.entry_bound = sb.entry_bound;
    rec.eig_bound = sb.bound;
    auto me = min_nonzero_eig(m, rank_tol);
    rec.measured_min_nonzero_eig = me.value;
    rec.numerical_rank = me.rank;
    // Slack for the double rounding of the measured value.
    double slack = 1e-12 * std::max(1.0, me.value);
    rec.violated = me.rank > 0 && me.value + slack < to_double(sb.bound);
    if (rec.violated) ++rep.violations;
    rep.records.push_back(std::move(rec));
  };

  analyse("M_" + std::to_string(t) + "(L)", assemble_moment_matrix(L, t));
  for (std::size_t i = 0; i < inst.inequalities.size(); ++i)
    analyse("M_" + std::to_string(t) + "(g" + std::to_string(i + 1) + " L)",
            assemble_localizing_matrix(L, inst.inequalities[i], t));
  return rep;
}

namespace detail {
inline std::string fmt_double(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

inline std::string fmt_bound(const Rational& q) {
  // Bounds can be astronomically small; show the exact value when short.
  std::string exact = to_string(q);
  if (exact.size() <= 24) return exact;
  return fmt_double(to_double(q)) + " (2^" + std::to_string(-static_cast<long>(bit_length(den(q)) - 1)) + ")";
}
}  // namespace detail

inline std::string format_conditioning(const ConditioningReport& rep, bool csv) {
  std::string s;
  if (csv) {
    s = "label,N,C,B,bound,measured,rank\n";
    for (const auto& r : rep.records)
      s += r.label + "," + std::to_string(r.size) + "," + r.common_denominator.str() + "," + r.entry_bound.str() + "," +
           to_string(r.eig_bound) + "," + detail::fmt_double(r.measured_min_nonzero_eig) + "," +
           std::to_string(r.numerical_rank) + "\n";
    return s;
  }
  s += "moment bit-complexity: " + std::to_string(rep.moment_bit_complexity) + "\n";
  s += "kernel analysis: " + rep.kernel_analysis + "\n";
  for (const auto& r : rep.records) {
    s += r.label + ": N=" + std::to_string(r.size) + " C=" + r.common_denominator.str() + " B=" + r.entry_bound.str() +
         " bound=" + detail::fmt_bound(r.eig_bound) + " measured=" + detail::fmt_double(r.measured_min_nonzero_eig) +
         " rank=" + std::to_string(r.numerical_rank) + (r.violated ? " VIOLATED" : "") + "\n";
  }
  s += "violations: " + std::to_string(rep.violations) + "\n";
  return s;
}

}  // namespace momsos
