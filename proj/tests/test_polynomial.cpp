#include <gtest/gtest.h>

#include <random>

#include "momsos/polynomial.hpp"

using namespace momsos;

namespace {

ExponentVec ev(std::vector<unsigned> e) { return ExponentVec(std::move(e)); }

Polynomial px(const std::string& s, std::size_t n = 1) { return parse_polynomial(s, n); }

Polynomial random_poly(std::mt19937_64& rng, std::size_t n, unsigned d) {
  std::uniform_int_distribution<int> coef(-5, 5), den(1, 4);
  Polynomial p(n);
  for (const auto& a : monomials_up_to(n, d))
    if (rng() % 2) p.add_term(a, Rational(coef(rng), den(rng)));
  return p;
}

}  // namespace

TEST(Monomials, UnivariateDegreeTwo) {
  auto m = monomials_up_to(1, 2);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0], ev({0}));
  EXPECT_EQ(m[1], ev({1}));
  EXPECT_EQ(m[2], ev({2}));
}

TEST(Monomials, GradedLexOrderInTwoVariables) {
  auto m = monomials_up_to(2, 1);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0], ev({0, 0}));
  EXPECT_EQ(m[1], ev({1, 0}));
  EXPECT_EQ(m[2], ev({0, 1}));
}

TEST(Monomials, CountMatchesBinomial) {
  EXPECT_EQ(monomials_up_to(3, 2).size(), 10u);
  for (std::size_t n = 1; n <= 4; ++n)
    for (unsigned d = 0; d <= 5; ++d) EXPECT_EQ(monomials_up_to(n, d).size(), binomial(n + d, d));
}

TEST(Monomials, SortedAndUnique) {
  auto m = monomials_up_to(3, 4);
  for (std::size_t i = 1; i < m.size(); ++i) {
    EXPECT_TRUE(m[i - 1] < m[i]);
    EXPECT_LE(m[i - 1].degree(), m[i].degree());
  }
}

TEST(Monomials, CapacityError) {
  try {
    monomials_up_to(20, 10, 1000);
    FAIL() << "expected capacity error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::capacity);
  }
}

TEST(Arithmetic, DifferenceOfSquares) {
  EXPECT_EQ(poly_arith(px("x + 1"), px("x - 1"), ArithKind::mul), px("x^2 - 1"));
}

TEST(Arithmetic, CancellationDropsTerm) {
  Polynomial s = poly_arith(px("1 - x^2"), px("x^2"), ArithKind::add);
  EXPECT_EQ(s, Polynomial::constant(1, 1));
  EXPECT_EQ(s.term_count(), 1u);
  EXPECT_TRUE(poly_arith(s, s, ArithKind::sub).is_zero());
}

TEST(Arithmetic, Scale) { EXPECT_EQ(poly_scale(px("x^2"), Rational(1, 3)), px("1/3 x^2")); }

TEST(Arithmetic, DimensionMismatchThrows) {
  EXPECT_THROW(px("x1", 1) + px("x1", 2), Error);
}

TEST(Arithmetic, RingLawsOnRandomPolynomials) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    Polynomial a = random_poly(rng, 2, 3), b = random_poly(rng, 2, 3), c = random_poly(rng, 2, 2);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ((a + b) - b, a);
    EXPECT_EQ((a * b) * c, a * (b * c));
    Polynomial prod = a * b;
    for (const auto& [alpha, coef] : prod.terms()) EXPECT_NE(coef, 0);
  }
}

TEST(Arithmetic, EvaluationIsRingHomomorphism) {
  std::mt19937_64 rng(11);
  std::vector<Rational> pt{Rational(1, 3), Rational(-2, 5)};
  for (int trial = 0; trial < 20; ++trial) {
    Polynomial a = random_poly(rng, 2, 3), b = random_poly(rng, 2, 3);
    EXPECT_EQ(poly_eval(a * b, pt), poly_eval(a, pt) * poly_eval(b, pt));
    EXPECT_EQ(poly_eval(a + b, pt), poly_eval(a, pt) + poly_eval(b, pt));
  }
}

TEST(Evaluate, Examples) {
  std::vector<Rational> half{Rational(1, 2)};
  EXPECT_EQ(poly_eval(px("1 - x^2"), half), Rational(3, 4));
  std::vector<Rational> pt{Rational(1, 4), Rational(1, 2)};
  EXPECT_EQ(poly_eval(px("x1 - x2^2", 2), pt), 0);
  EXPECT_EQ(poly_eval(Polynomial(2), pt), 0);
}

TEST(Evaluate, WrongPointLengthThrows) {
  std::vector<Rational> pt{Rational(1)};
  EXPECT_THROW(poly_eval(px("x1 + x2", 2), pt), Error);
}

TEST(Norms, Examples) {
  auto a = poly_norms(px("x^2 - 2x + 1"));
  EXPECT_EQ(a.l1, 4);
  EXPECT_EQ(a.linf, 2);
  auto z = poly_norms(Polynomial(1));
  EXPECT_EQ(z.l1, 0);
  EXPECT_EQ(z.linf, 0);
  auto c = poly_norms(px("1/3 x + 1/6"));
  EXPECT_EQ(c.l1, Rational(1, 2));
  EXPECT_EQ(c.linf, Rational(1, 3));
}

TEST(Derivative, PowerRule) {
  Polynomial p = px("x1^3 x2 - 2 x1 + 5", 2);
  EXPECT_EQ(p.derivative(0), px("3 x1^2 x2 - 2", 2));
  EXPECT_EQ(p.derivative(1), px("x1^3", 2));
}

TEST(TextFormat, RoundTrip) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    Polynomial p = random_poly(rng, 3, 3);
    EXPECT_EQ(parse_polynomial(to_string(p), 3), p) << to_string(p);
  }
  EXPECT_EQ(to_string(Polynomial(2)), "0");
}

TEST(TextFormat, AcceptsDecimalsAndStars) {
  EXPECT_EQ(px("0.25 * x^2 + 1.5"), px("1/4 x^2 + 3/2"));
  EXPECT_EQ(px("-x1*x2 + x2^2", 2), px("x2^2 - x1 x2", 2));
}

TEST(TextFormat, LeadingZerosAreDecimal) {
  EXPECT_EQ(try_parse_rational("010"), Rational(10));
  EXPECT_EQ(try_parse_rational("007/010"), Rational(7, 10));
  EXPECT_EQ(try_parse_rational("0.05"), Rational(1, 20));
  EXPECT_EQ(try_parse_rational("-.5"), Rational(-1, 2));
  EXPECT_FALSE(try_parse_rational("."));
  EXPECT_FALSE(try_parse_rational("1.2.3"));
}

TEST(TextFormat, ErrorsCarryColumn) {
  try {
    px("x1 + x3", 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse);
    EXPECT_NE(std::string(e.what()).find("column"), std::string::npos);
  }
  EXPECT_THROW(px("x^"), Error);
  EXPECT_THROW(px("1/0 x"), Error);
}

TEST(Rationals, RoundingHelpers) {
  EXPECT_EQ(round_to_multiple(Rational(1, 3), Rational(1, 4)), Rational(1, 4));
  EXPECT_EQ(round_to_multiple(Rational(3, 8), Rational(1, 4)), Rational(1, 2));
  EXPECT_EQ(round_to_multiple(Rational(-3, 8), Rational(1, 4)), Rational(-1, 2));
  EXPECT_EQ(floor_to_multiple(Rational(-1, 3), Rational(1, 4)), Rational(-1, 2));
  EXPECT_EQ(bit_complexity(Rational(1, 3)), 3u);
  EXPECT_EQ(bit_complexity(Rational(1, 65536)), 18u);
}

TEST(Rationals, SquareRootBrackets) {
  for (int k = 1; k < 50; ++k) {
    Rational q(k, 7);
    Rational lo = sqrt_lower(q), hi = sqrt_upper(q);
    EXPECT_LE(lo * lo, q);
    EXPECT_GE(hi * hi, q);
    EXPECT_LT(to_double(hi - lo), 1e-11);
  }
  EXPECT_EQ(sqrt_upper(Rational(9, 4)), Rational(3, 2));
  EXPECT_EQ(pow2_sqrt_upper(Rational(2)), 2);
  EXPECT_EQ(pow2_sqrt_upper(Rational(1, 8)), Rational(1, 2));
}
