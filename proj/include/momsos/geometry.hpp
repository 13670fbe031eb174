#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "momsos/error.hpp"
#include "momsos/polynomial.hpp"
#include "momsos/pop.hpp"
#include "momsos/rational.hpp"

namespace momsos {

enum class BallMethod { strict_point, john_formula, volume_formula, user_supplied };

inline std::string_view to_string(BallMethod m) {
  switch (m) {
    case BallMethod::strict_point: return "strict-point";
    case BallMethod::john_formula: return "john-formula";
    case BallMethod::volume_formula: return "volume-formula";
    case BallMethod::user_supplied: return "user-supplied";
  }
  return "?";
}

struct BallCertificate {
  std::vector<Rational> center;
  Rational radius;
  BallMethod method = BallMethod::user_supplied;
  bool checked = false;
};

inline std::string format_ball(const BallCertificate& b) {
  std::string s = "center";
  for (const auto& c : b.center) s += " " + to_string(c);
  s += "\nradius " + to_string(b.radius) + "  (~" + std::to_string(to_double(b.radius)) + ")";
  s += "\nmethod " + std::string(to_string(b.method));
  s += "\nchecked " + std::string(b.checked ? "true" : "false") + "\n";
  return s;
}

/// Certified Lipschitz constant of g on B(0, R):
/// sqrt(n) * max_k sum_alpha |(d_k g)_alpha| R^{|alpha|}, with sqrt(n)
/// replaced by a rational upper bound.
inline Rational lipschitz_bound(const Polynomial& g, const Rational& radius) {
  const std::size_t n = g.dim();
  Rational worst(0);
  for (std::size_t k = 0; k < n; ++k) {
    Rational s(0);
    Polynomial dk = g.derivative(k);
    for (const auto& [a, c] : dk.terms()) s += abs(c) * pow(radius, a.degree());
    worst = std::max(worst, s);
  }
  return sqrt_upper(Rational(n)) * worst;
}

namespace detail {

/// Dyadic rational uniform in [-1, 1] with `bits` random bits.
inline Rational random_unit(std::mt19937_64& rng, unsigned bits) {
  const std::int64_t scale = std::int64_t{1} << bits;
  std::uniform_int_distribution<std::int64_t> dist(-scale, scale);
  return Rational(dist(rng), scale);
}

}  // namespace detail

/// `count` rational points drawn uniformly (on a dyadic grid) from B(z, r).
inline std::vector<std::vector<Rational>> sample_ball(std::span<const Rational> center, const Rational& radius,
                                                      std::size_t count, std::uint64_t seed, unsigned bits = 20) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Rational>> pts;
  const std::size_t n = center.size();
  while (pts.size() < count) {
    std::vector<Rational> u(n);
    Rational norm2(0);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = detail::random_unit(rng, bits);
      norm2 += u[i] * u[i];
    }
    if (norm2 > 1) continue;
    for (std::size_t i = 0; i < n; ++i) u[i] = center[i] + radius * u[i];
    pts.push_back(std::move(u));
  }
  return pts;
}

/// Sampling check: every sample of B(center, radius) satisfies all g_i >= 0
/// in exact arithmetic. Sets `checked` on success.
inline bool validate_ball(const POPInstance& inst, BallCertificate& cert, std::size_t samples = 1000,
                          std::uint64_t seed = 1) {
  for (const auto& p : sample_ball(cert.center, cert.radius, samples, seed)) {
    for (const auto& g : inst.inequalities)
      if (poly_eval(g, p) < 0) {
        cert.checked = false;
        return false;
      }
  }
  cert.checked = true;
  return true;
}

/// Radius of a ball around a strictly feasible point: min_i g_i(x) / Lip_i,
/// capped so that the ball stays inside B(0, R) where the Lipschitz bounds
/// hold.
inline BallCertificate inner_ball_from_strict_point(const POPInstance& inst, std::span<const Rational> x,
                                                    bool validate = true, std::uint64_t seed = 1) {
  inst.validate();
  if (x.size() != inst.n) throw Error(ErrorKind::dimension, "strict point has wrong length");
  if (!inst.equalities.empty())
    throw Error(ErrorKind::invalid_argument, "equality constraints leave no full-dimensional ball");
  BoundReport bound = detect_explicit_bound(inst);
  if (!bound.explicitly_bounded)
    throw Error(ErrorKind::unbounded, "instance is not explicitly bounded (no R^2 - |x|^2 constraint)");

  std::optional<Rational> r;
  for (std::size_t i = 0; i < inst.inequalities.size(); ++i) {
    Rational v = poly_eval(inst.inequalities[i], x);
    if (v <= 0)
      throw Error(ErrorKind::invalid_argument,
                  "point is not strictly feasible: inequality " + std::to_string(i + 1) + " evaluates to " + to_string(v));
    Rational lip = lipschitz_bound(inst.inequalities[i], bound.radius);
    if (lip == 0) continue;
    Rational cand = v / lip;
    if (!r || cand < *r) r = cand;
  }
  Rational norm2(0);
  for (const auto& xi : x) norm2 += xi * xi;
  Rational cap = sqrt_lower(bound.r_squared) - sqrt_upper(norm2);
  if (cap <= 0) throw Error(ErrorKind::invalid_argument, "point does not lie inside the bounding ball");
  if (!r || cap < *r) r = cap;

  BallCertificate cert{std::vector<Rational>(x.begin(), x.end()), *r, BallMethod::strict_point, false};
  if (validate) validate_ball(inst, cert, 1000, seed);
  return cert;
}

inline double unit_ball_volume(std::size_t n) {
  const double h = static_cast<double>(n) / 2.0;
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

/// sqrt(vol(S) / (n^n R^{2(n-1)} vol(B(0,1)))) for convex S inside B(0, R).
inline double john_ball_radius(double vol_s, std::size_t n, double radius) {
  if (vol_s < 0 || radius <= 0 || n < 1) throw Error(ErrorKind::invalid_argument, "john_ball_radius: bad arguments");
  const double nd = static_cast<double>(n);
  return std::sqrt(vol_s / (std::pow(nd, nd) * std::pow(radius, 2.0 * (nd - 1.0)) * unit_ball_volume(n)));
}

/// Upper bound on vol(V(G) + B(0, delta)):
/// 4 sum_{i=1}^n C(n,i) (4 D delta / R)^i (1 + delta/R)^{n-i} vol(B(0, R)).
inline double tubular_volume_bound(std::size_t n, double degree_product, double radius, double delta) {
  if (n < 1 || degree_product <= 0 || radius <= 0 || delta < 0)
    throw Error(ErrorKind::invalid_argument, "tubular_volume_bound: bad arguments");
  double sum = 0;
  double binom = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    binom = binom * static_cast<double>(n - i + 1) / static_cast<double>(i);
    sum += binom * std::pow(4.0 * degree_product * delta / radius, static_cast<double>(i)) *
           std::pow(1.0 + delta / radius, static_cast<double>(n - i));
  }
  return 4.0 * sum * unit_ball_volume(n) * std::pow(radius, static_cast<double>(n));
}

/// Product of the inequality degrees.
inline double degree_product(const POPInstance& inst) {
  double d = 1;
  for (const auto& g : inst.inequalities) d *= std::max(1u, g.degree());
  return d;
}

/// Largest delta in (0, R] with tubular_volume_bound(delta) < vol(S), found by
/// bisection. A set of that volume contains a ball of radius delta.
inline double ball_radius_from_volume(const POPInstance& inst, double vol_s) {
  BoundReport bound = detect_explicit_bound(inst);
  if (!bound.explicitly_bounded) throw Error(ErrorKind::unbounded, "instance is not explicitly bounded");
  if (vol_s <= 0) throw Error(ErrorKind::invalid_argument, "volume must be positive");
  const double radius = to_double(bound.radius);
  const double d = degree_product(inst);
  if (tubular_volume_bound(inst.n, d, radius, radius) < vol_s) return radius;
  double lo = 0, hi = radius;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (tubular_volume_bound(inst.n, d, radius, mid) < vol_s)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

/// Repeated squaring: x_i >= 0, x_{i+1}^2 - x_i >= 0, 1/2 - x_n >= 0, and
/// minimize -x_1. Every feasible point has x_1 <= 2^{-2^{n-1}}.
inline POPInstance gen_squaring_counterexample(std::size_t n) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "counterexample needs n >= 1");
  POPInstance inst;
  inst.n = n;
  inst.objective = Polynomial::variable(n, 0, -1);
  for (std::size_t i = 0; i < n; ++i) inst.inequalities.push_back(Polynomial::variable(n, i));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Polynomial g = Polynomial::monomial(2 * ExponentVec::unit(n, i + 1));
    g.add_term(ExponentVec::unit(n, i), -1);
    inst.inequalities.push_back(std::move(g));
  }
  Polynomial last = Polynomial::constant(n, Rational(1, 2));
  last.add_term(ExponentVec::unit(n, n - 1), -1);
  inst.inequalities.push_back(std::move(last));
  return inst;
}

/// 2^{-2^{n-1}}.
inline Rational squaring_threshold(std::size_t n) {
  Rational v(1, 2);
  for (std::size_t i = 1; i < n; ++i) v *= v;
  return v;
}

/// (2^{-2^{n-1}}, ..., 2^{-2}, 2^{-1}): feasible, x_1 at its maximum, every
/// squaring constraint tight.
inline std::vector<Rational> squaring_chain_point(std::size_t n) {
  std::vector<Rational> x(n);
  x[n - 1] = Rational(1, 2);
  for (std::size_t i = n - 1; i-- > 0;) x[i] = x[i + 1] * x[i + 1];
  return x;
}

/// Strictly feasible companion of the chain point: x_n = 1/4 and
/// x_i = x_{i+1}^2 / 2.
inline std::vector<Rational> squaring_strict_point(std::size_t n) {
  std::vector<Rational> x(n);
  x[n - 1] = Rational(1, 4);
  for (std::size_t i = n - 1; i-- > 0;) x[i] = x[i + 1] * x[i + 1] / 2;
  return x;
}

/// Feasible points of the squaring system, drawn top-down: x_n uniform in
/// [0, 1/2], then x_i uniform in [0, x_{i+1}^2].
inline std::vector<std::vector<Rational>> sample_squaring_feasible(std::size_t n, std::size_t count,
                                                                   std::uint64_t seed, unsigned bits = 8) {
  std::mt19937_64 rng(seed);
  const std::int64_t scale = std::int64_t{1} << bits;
  std::uniform_int_distribution<std::int64_t> dist(0, scale);
  std::vector<std::vector<Rational>> pts;
  pts.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<Rational> x(n);
    x[n - 1] = Rational(dist(rng), 2 * scale);
    for (std::size_t i = n - 1; i-- > 0;) x[i] = x[i + 1] * x[i + 1] * Rational(dist(rng), scale);
    pts.push_back(std::move(x));
  }
  return pts;
}

/// Rejection sampling of feasible points from the bounding box [-R, R]^n.
/// Instances with equality constraints are rejected up front.
inline std::vector<std::vector<Rational>> sample_feasible(const POPInstance& inst, std::size_t count,
                                                          std::uint64_t seed, std::size_t max_tries = 10000000,
                                                          unsigned bits = 16) {
  if (!inst.equalities.empty())
    throw Error(ErrorKind::invalid_argument, "rejection sampling cannot hit equality constraints");
  BoundReport bound = detect_explicit_bound(inst);
  if (!bound.explicitly_bounded) throw Error(ErrorKind::unbounded, "instance is not explicitly bounded");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Rational>> pts;
  for (std::size_t tries = 0; pts.size() < count && tries < max_tries; ++tries) {
    std::vector<Rational> x(inst.n);
    for (auto& xi : x) xi = bound.radius * detail::random_unit(rng, bits);
    if (inst.feasible_at(x)) pts.push_back(std::move(x));
  }
  return pts;
}

}  // namespace momsos
