#include <random>

#include <gtest/gtest.h>

#include "pseudospec/poly.h"
#include "support.h"

namespace pseudospec {
namespace {

const std::vector<std::string> kXY = {"x1", "x2"};

TEST(Parse, ReadsTermsDirectly) {
  const Polynomial p = parse_poly("x1^2*x2 - 1", kXY);
  ASSERT_EQ(p.terms().size(), 2u);
  EXPECT_EQ(p.coefficient({2, 1}), 1.0);
  EXPECT_EQ(p.coefficient({0, 0}), -1.0);
}

TEST(Parse, ZeroIsEmpty) {
  EXPECT_TRUE(parse_poly("0", kXY).is_zero());
  EXPECT_TRUE(parse_poly("x1 - x1", kXY).is_zero());
}

TEST(Parse, MergesLikeTerms) {
  const Polynomial p = parse_poly("x1 + x1", kXY);
  ASSERT_EQ(p.terms().size(), 1u);
  EXPECT_EQ(p.coefficient({1, 0}), 2.0);
}

TEST(Parse, ParenthesesPowersAndScientific) {
  const Polynomial p = parse_poly("(x1 + 1)^2 - 2.5e-1*x2", kXY);
  EXPECT_EQ(p.coefficient({2, 0}), 1.0);
  EXPECT_EQ(p.coefficient({1, 0}), 2.0);
  EXPECT_EQ(p.coefficient({0, 0}), 1.0);
  EXPECT_EQ(p.coefficient({0, 1}), -0.25);
}

TEST(Parse, ErrorsCarryPosition) {
  try {
    parse_poly("x1 + * 2", kXY);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 5u);
  }
  EXPECT_THROW(parse_poly("x1 + q", kXY), ParseError);
  EXPECT_THROW(parse_poly("x1^-1", kXY), ParseError);
  EXPECT_THROW(parse_poly("(x1", kXY), ParseError);
}

TEST(Eval, CircleBoundaryPoint) {
  const Polynomial p = parse_poly("x*(1 - x) - y^2", std::vector<std::string>{"x", "y"});
  EXPECT_EQ(p.eval(std::vector<double>{0.5, 0.5}), 0.0);
}

TEST(Eval, ZeroPointGivesConstantTerm) {
  const Polynomial p = parse_poly("3*x1^2*x2 - 4*x2 + 7", kXY);
  EXPECT_EQ(p.eval(std::vector<double>{0.0, 0.0}), 7.0);
}

TEST(Eval, KnownRoot) {
  EXPECT_EQ(parse_poly("x1^2*x2 - 1", kXY).eval(std::vector<double>{1.0, 1.0}), 0.0);
}

TEST(Eval, DimensionMismatchThrows) {
  EXPECT_THROW(parse_poly("x1", kXY).eval(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(QuadCoeffs, AffineCase) {
  const auto q = quad_coeffs(parse_poly("x1 - 1", std::vector<std::string>{"x1"}));
  EXPECT_EQ(q.entries.size(), 2u);
  EXPECT_EQ(q.at(0, 0), -1.0);
  EXPECT_EQ(q.at(1, 0), 1.0);
}

TEST(QuadCoeffs, PureSquare) {
  const auto q = quad_coeffs(parse_poly("x1^2", std::vector<std::string>{"x1"}));
  EXPECT_EQ(q.entries.size(), 1u);
  EXPECT_EQ(q.at(1, 1), 1.0);
}

TEST(QuadCoeffs, CrossTermStoredOnce) {
  const auto q = quad_coeffs(parse_poly("x1*x2 + 3", kXY));
  EXPECT_EQ(q.entries.size(), 2u);
  EXPECT_EQ(q.at(0, 0), 3.0);
  EXPECT_EQ(q.at(2, 1), 1.0);
}

TEST(QuadCoeffs, RejectsCubic) {
  EXPECT_THROW(quad_coeffs(parse_poly("x1^3", kXY)), std::domain_error);
}

TEST(Relations, ParseAndSatisfy) {
  EXPECT_EQ(parse_relation(">="), Relation::kGe);
  EXPECT_EQ(parse_relation("=="), Relation::kEq);
  EXPECT_THROW(parse_relation("=>"), std::invalid_argument);
  EXPECT_TRUE(satisfies(1e-12, Relation::kEq, 1e-9));
  EXPECT_FALSE(satisfies(0.0, Relation::kGt, 1.0));
  EXPECT_TRUE(satisfies(-1e-12, Relation::kGe, 1e-9));
}

class PolyProperties : public ::testing::TestWithParam<int> {};

TEST_P(PolyProperties, RingHomomorphismAndRoundTrips) {
  std::mt19937_64 rng(GetParam());
  const auto a = testing::random_system(rng, 3, 4, 2);
  const int n = a.sys.nvars;
  const Polynomial& p = a.sys.constraints[0].poly;
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  Polynomial q = Polynomial::constant(n, coef(rng));
  for (int i = 0; i < n; ++i) q += Polynomial::variable(n, i, coef(rng));
  q = q * q;

  for (const auto& v : testing::uniform_samples(rng, n, 20, -2.0, 2.0)) {
    const double pv = p.eval(v);
    const double qv = q.eval(v);
    EXPECT_NEAR((p + q).eval(v), pv + qv, 1e-12 * (1.0 + p.abs_eval(v) + q.abs_eval(v)));
    EXPECT_NEAR((p * q).eval(v), pv * qv, 1e-12 * (1.0 + p.abs_eval(v) * q.abs_eval(v)));
  }

  EXPECT_EQ(parse_poly(to_string(p, a.sys.var_names), a.sys.var_names), p);
  EXPECT_EQ(from_quad_coeffs(quad_coeffs(q)), q);
}

INSTANTIATE_TEST_SUITE_P(Seeds, PolyProperties, ::testing::Range(1, 31));

TEST(PolySystem, ContainsUsesRelations) {
  const PolySystem sys = make_system({"x", "y"}, {{"x^2 + y^2 - 1", Relation::kEq},
                                                  {"x", Relation::kGt}});
  EXPECT_TRUE(sys.contains(std::vector<double>{1.0, 0.0}, 1e-12));
  EXPECT_FALSE(sys.contains(std::vector<double>{-1.0, 0.0}, 1e-12));
  EXPECT_FALSE(sys.contains(std::vector<double>{0.5, 0.0}, 1e-12));
  EXPECT_EQ(sys.max_degree(), 2);
}

}  // namespace
}  // namespace pseudospec
