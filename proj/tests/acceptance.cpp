// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "momsos/momsos.hpp"
#include "oracles.hpp"

using namespace momsos;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct CorpusEntry {
  std::string name;
  POPInstance inst;
  unsigned t;
  std::vector<Rational> strict_point;
  std::function<std::vector<std::vector<Rational>>(std::size_t)> sampler;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

POPInstance dense_quadratic(std::size_t n, const Rational& r2, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coef(-6, 6);
  POPInstance inst;
  inst.n = n;
  inst.objective = Polynomial(n);
  for (const auto& a : monomials_up_to(n, 2)) {
    int c = coef(rng);
    inst.objective.add_term(a, Rational(c == 0 ? 1 : c, 2));
  }
  inst.inequalities.push_back(ball_polynomial(n, r2));
  return inst;
}

std::vector<CorpusEntry> corpus() {
  std::vector<CorpusEntry> c;
  auto rejection = [](const POPInstance& inst, std::uint64_t seed) {
    return [inst, seed](std::size_t count) { return sample_feasible(inst, count, seed); };
  };
  auto add = [&](std::string name, POPInstance inst, unsigned t, std::vector<Rational> x) {
    auto sampler = rejection(inst, 1000 + c.size());
    c.push_back({std::move(name), std::move(inst), t, std::move(x), std::move(sampler)});
  };
  auto zero = [](std::size_t n) { return std::vector<Rational>(n, Rational(0)); };

  add("ball-min-x t=1", parse_instance(std::string("n 1\nminimize x1\nineq 1 - x1^2\n")), 1, zero(1));
  add("ball-min-x t=2", parse_instance(std::string("n 1\nminimize x1\nineq 1 - x1^2\n")), 2, zero(1));
  add("disc-linear", parse_instance(std::string("n 2\nminimize x1 + x2\nineq 1 - x1^2 - x2^2\n")), 1, zero(2));
  add("box-in-ball",
      parse_instance(std::string("n 2\nminimize x1 x2\nineq 2 - x1^2 - x2^2\nineq 1 - x1^2\nineq 1 - x2^2\n")), 1,
      zero(2));
  add("simplex-in-ball",
      parse_instance(std::string("n 2\nminimize x1 - x2\nineq 1 - x1^2 - x2^2\nineq x1\nineq x2\nineq 1 - x1 - x2\n")),
      1, {Rational(1, 4), Rational(1, 4)});
  for (std::size_t n : {2u, 3u}) {
    POPInstance inst = with_ball(gen_squaring_counterexample(n), 1);
    CorpusEntry e{"counterexample n=" + std::to_string(n), inst, 1, squaring_strict_point(n),
                  [n](std::size_t count) { return sample_squaring_feasible(n, count, 77 + n); }};
    c.push_back(std::move(e));
  }
  add("dense-quadratic n=2", dense_quadratic(2, 1, 11), 1, zero(2));
  add("dense-quadratic n=3", dense_quadratic(3, 4, 12), 2, zero(3));
  add("cubic-disc", parse_instance(std::string("n 2\nminimize x1^2 x2 - x2\nineq 4 - x1^2 - x2^2\n")), 2, zero(2));
  return c;
}

// 1 -------------------------------------------------------------------------

Outcome box_moments() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> num(-12, 12), rnum(1, 12), den(1, 4);
  double worst = 0;
  std::size_t checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 1 + trial % 3;
    Rational r(rnum(rng), 4 * den(rng));
    std::vector<Rational> z(n);
    std::vector<double> zd(n);
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = Rational(num(rng), 4 * den(rng));
      zd[i] = to_double(z[i]);
    }
    for (const auto& a : monomials_up_to(n, 6)) {
      double exact = to_double(box_moment(r, z, a));
      double quad = oracle::box_moment_quadrature(to_double(r), zd, a.values());
      double scale = std::max(std::abs(exact), oracle::box_abs_moment(to_double(r), zd, a.values()));
      double rel = std::abs(quad - exact) / scale;
      worst = std::max(worst, rel);
      if (rel > 1e-9) o.pass = false;
      ++checked;
    }
    // Centered box: prod r^{a_i} / (a_i + 1) for even a_i, zero otherwise.
    std::vector<Rational> origin(n, Rational(0));
    for (const auto& a : monomials_up_to(n, 6)) {
      Rational expect(1);
      for (unsigned ai : a.values()) expect *= ai % 2 ? Rational(0) : pow(r, ai) / Rational(ai + 1);
      if (box_moment(r, origin, a) != expect) o.pass = false;
    }
  }
  o.detail = std::to_string(checked) + " moments, worst relative error " + fmt(worst);
  return o;
}

// 2 -------------------------------------------------------------------------

Outcome integer_eigenvalues() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> entry(-10, 10), size(1, 6);
  std::size_t failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = size(rng);
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
    Integer b = 1;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = r; c < n; ++c) {
        int v = entry(rng);
        a[r][c] = a[c][r] = v;
        if (Integer(std::abs(v)) > b) b = std::abs(v);
      }
    if (!oracle::nonzero_eigs_at_least(a, integer_eig_lower_bound(b, n))) ++failures;
  }
  o.pass = failures == 0;
  o.detail = "200 matrices, " + std::to_string(failures) + " with an eigenvalue below (BN)^-N";
  return o;
}

// 3 -------------------------------------------------------------------------

Outcome canonical_solves() {
  Outcome o;
  auto value = [](const std::string& obj) {
    auto inst = parse_instance("n 1\nminimize " + obj + "\nineq 1 - x1^2\n");
    auto sol = solve_sdp(build_mom_sdp(inst, 1), SolverConfig{});
    return sol.primal_value;
  };
  double a = value("x1"), b = value("x1^2");
  o.pass = std::abs(a + 1) <= 1e-6 && std::abs(b) <= 1e-6;
  o.detail = "mom(x) = " + fmt(a) + ", mom(x^2) = " + fmt(b);
  return o;
}

// 4 and 5 -------------------------------------------------------------------

Outcome certificate_roundtrip(const std::vector<CorpusEntry>& entries) {
  Outcome o;
  std::size_t verified = 0, sound = 0;
  for (const auto& e : entries) {
    auto res = certify(e.inst, e.t, SolverConfig{}, Rational(1, 1 << 20));
    bool ok = res.verification.passed();
    // The certificate file must reproduce the same verdict.
    auto reparsed = parse_certificate(format_certificate(res.rounded), e.inst);
    ok = ok && verify_certificate(reparsed, e.inst).passed();
    if (ok) ++verified;

    auto pts = e.sampler(10000);
    Rational best;
    bool have = false;
    bool all_feasible = pts.size() == 10000;
    for (const auto& x : pts) {
      if (!e.inst.feasible_at(x)) all_feasible = false;
      Rational v = poly_eval(e.inst.objective, x);
      if (!have || v < best) best = v, have = true;
    }
    bool below = all_feasible && have && res.rounded.adjusted_bound <= best;
    if (below) ++sound;
    if (!ok || !below) {
      o.pass = false;
      o.detail += "[" + e.name + (ok ? "" : " verify-failed") + (below ? "" : " bound-above-sample") + "] ";
    }
  }
  o.detail += std::to_string(entries.size()) + " instances, " + std::to_string(verified) + " verified, " +
              std::to_string(sound) + " below the sample minimum";
  return o;
}

Outcome rounding_error_law(const std::vector<CorpusEntry>& entries) {
  Outcome o;
  const Rational eps(1, 1 << 16), half(1, 1 << 17);
  std::size_t chain_ok = 0, literal_ok = 0, halving_ok = 0;
  std::string halving_misses;
  for (const auto& e : entries) {
    auto sdp = build_mom_sdp(e.inst, e.t);
    auto sol = solve_sdp(sdp, SolverConfig{});
    auto raw = extract_sos(sol, sdp, e.inst, 1e-9);
    auto a = round_certificate(raw, eps, e.inst, e.t);
    auto b = round_certificate(raw, half, e.inst, e.t);
    bool chain = true, literal = true;
    for (const auto* rc : {&a, &b}) {
      const auto& d = *rc->diagnostics;
      chain = chain && rc->l1_residual <= d.defect_l1 + d.lambda_shift + d.squares_term + d.ideal_term &&
              d.squares_term <= d.product_term && d.product_term <= d.coefficient_term;
      literal = literal && rc->l1_residual <= d.textbook_bound;
    }
    chain_ok += chain;
    literal_ok += literal;
    if (2 * b.l1_residual <= a.l1_residual) {
      ++halving_ok;
    } else {
      halving_misses += " " + e.name + " (ratio " + fmt(to_double(b.l1_residual / a.l1_residual)) + ")";
    }
  }
  const std::size_t n = entries.size();
  o.pass = chain_ok == n && literal_ok == n && halving_ok == n;
  o.detail = "chain " + std::to_string(chain_ok) + "/" + std::to_string(n) + ", textbook bound " +
             std::to_string(literal_ok) + "/" + std::to_string(n) + ", halving " + std::to_string(halving_ok) + "/" +
             std::to_string(n);
  if (!halving_misses.empty()) o.detail += "; not halved:" + halving_misses;
  return o;
}

// 6 -------------------------------------------------------------------------

Outcome membership_exhaustive() {
  Outcome o;
  std::size_t cases = 0, passed = 0;
  for (std::size_t n = 1; n <= 3; ++n)
    for (Rational r2 : {Rational(1), Rational(4)}) {
      POPInstance inst;
      inst.n = n;
      inst.objective = Polynomial(n);
      inst.inequalities.push_back(ball_polynomial(n, r2));
      Rational radius = r2 == 1 ? Rational(1) : Rational(2);
      for (const auto& gamma : monomials_up_to(n, 6))
        for (auto sign : {MonomialSign::minus, MonomialSign::plus}) {
          ++cases;
          auto terms = monomial_membership(gamma, r2, 3, sign);
          Polynomial target = Polynomial::constant(n, pow(radius, gamma.degree()));
          target.add_term(gamma, sign == MonomialSign::minus ? -1 : 1);
          bool ok = sum_terms(terms, inst) == target;
          for (const auto& t : terms) {
            unsigned deg = (t.index ? 2 : 0) + (t.base ? 2 * t.base->degree() : 0);
            ok = ok && t.weight >= 0 && deg <= 6;
          }
          passed += ok;
        }
    }
  o.pass = passed == cases;
  o.detail = std::to_string(passed) + "/" + std::to_string(cases) + " decompositions exact";
  return o;
}

// 7 -------------------------------------------------------------------------

Outcome counterexample_law() {
  Outcome o;
  for (std::size_t n = 1; n <= 6; ++n) {
    // 2^{-2^{n-1}}, computed here rather than taken from the library.
    const Rational threshold = pow(Rational(1, 2), 1u << (n - 1));

    auto inst = gen_squaring_counterexample(n);
    Rational max_x1(0);
    bool feasible = true;
    for (const auto& x : sample_squaring_feasible(n, 10000, 500 + n)) {
      feasible = feasible && inst.feasible_at(x);
      if (x[0] > max_x1) max_x1 = x[0];
    }
    auto ball = inner_ball_from_strict_point(with_ball(inst, 1), squaring_strict_point(n), true, 7);
    bool ok = feasible && max_x1 <= threshold && ball.checked && ball.radius <= threshold;
    if (!ok) o.pass = false;
    o.detail += "n=" + std::to_string(n) + " r~" + fmt(to_double(ball.radius)) + (ok ? "" : " FAIL") + " ";
  }
  return o;
}

// 8 -------------------------------------------------------------------------

Outcome conditioning(const std::vector<CorpusEntry>& entries) {
  Outcome o;
  std::size_t matrices = 0, violations = 0;
  for (const auto& e : entries) {
    auto ball = inner_ball_from_strict_point(e.inst, e.strict_point, true, 5);
    Rational limit = ball.radius / sqrt_upper(Rational(e.inst.n));
    Rational half(1);
    while (half > limit) half /= 2;
    std::vector<MomentFunctional> functionals{box_functional(half, e.strict_point, 2 * e.t),
                                              dirac_functional(e.strict_point, 2 * e.t)};
    for (const auto& L : functionals) {
      auto rep = check_conditioning(L, e.inst, e.t);
      matrices += rep.records.size();
      violations += rep.violations;
    }
  }
  o.pass = violations == 0;
  o.detail = std::to_string(matrices) + " matrices, " + std::to_string(violations) + " violations";
  return o;
}

// 9 -------------------------------------------------------------------------

Outcome geometry_pins() {
  Outcome o;
  const double pi = std::numbers::pi;
  struct Pin {
    const char* what;
    double got, expect;
  };
  auto interval = parse_instance(std::string("n 1\nminimize x1\nineq 1 - x1^2\n"));
  std::vector<Pin> pins{
      {"john(2,1,1)", john_ball_radius(2, 1, 1), std::sqrt(2.0 / (1 * 1 * 2))},
      {"john(pi,2,1)", john_ball_radius(pi, 2, 1), std::sqrt(pi / (4 * pi))},
      {"tube(1,1,1,1/8)", tubular_volume_bound(1, 1, 1, 0.125), 4 * (4 * 0.125) * 2},
      {"tube(2,2,1,1/100)", tubular_volume_bound(2, 2, 1, 0.01), 4 * (2 * 0.08 * 1.01 + 0.08 * 0.08) * pi},
      {"tube(2,2,1,0)", tubular_volume_bound(2, 2, 1, 0), 0},
      // 4 * (4 * 2 * delta) * 2 < 2 exactly when delta < 1/32.
      {"volume-radius interval", ball_radius_from_volume(interval, 2), 1.0 / 32},
  };
  for (const auto& p : pins) {
    double err = std::abs(p.got - p.expect);
    if (err > 1e-12) {
      o.pass = false;
      o.detail += std::string(p.what) + " off by " + fmt(err) + " ";
    }
  }
  o.detail += std::to_string(pins.size()) + " pinned values";
  return o;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  std::vector<CorpusEntry> entries = corpus();
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0: no runtime bound
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria{
      {1, "box-moment exactness", 10, box_moments},
      {2, "integer-eigenvalue bound", 10, integer_eigenvalues},
      {3, "canonical solves", 5, canonical_solves},
      {4, "certificate roundtrip", 120, [&] { return certificate_roundtrip(entries); }},
      {5, "rounding error law", 60, [&] { return rounding_error_law(entries); }},
      {6, "constructive membership", 0, membership_exhaustive},
      {7, "counterexample law", 0, counterexample_law},
      {8, "conditioning soundness", 0, [&] { return conditioning(entries); }},
      {9, "geometry formulas", 0, geometry_pins},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(clock::now() - start).count();
    if (c.limit_s > 0 && secs >= c.limit_s) {
      out.pass = false;
      out.detail += " (over the " + fmt(c.limit_s) + " s limit)";
    }
    std::printf("criterion %d %-26s %s  %6.2fs  %s\n", c.id, c.name, out.pass ? "PASS" : "FAIL", secs,
                out.detail.c_str());
    std::fflush(stdout);
    failed += !out.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
