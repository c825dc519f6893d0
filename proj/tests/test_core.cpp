#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "posgame/core.hpp"
#include "posgame/sampling.hpp"

using namespace posgame;

namespace {

errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected posgame::error";
  return errc::config;
}

}  // namespace

TEST(GameSpec, AcceptsValidGame) {
  const auto spec = make_game({0.2, 0.3, 0.5}, 5.0);
  EXPECT_EQ(spec.n, 3u);
  EXPECT_DOUBLE_EQ(spec.kappa, 5.0);
}

TEST(GameSpec, RejectsEmpty) { EXPECT_EQ(code_of([] { make_game({}, 1.0); }), errc::empty_game); }

TEST(GameSpec, RejectsCountMismatch) {
  EXPECT_EQ(code_of([] { validate_spec(GameSpec{3, {0.5, 0.5}, 1.0}); }), errc::empty_game);
}

TEST(GameSpec, RejectsNonPositiveLambda) {
  EXPECT_EQ(code_of([] { make_game({1.2, -0.2}, 1.0); }), errc::non_positive_lambda);
  EXPECT_EQ(code_of([] { make_game({1.0, 0.0}, 1.0); }), errc::non_positive_lambda);
}

TEST(GameSpec, RejectsSumMismatch) {
  EXPECT_EQ(code_of([] { make_game({0.5, 0.6}, 1.0); }), errc::lambda_sum_mismatch);
  // just outside the 1e-12 tolerance
  EXPECT_EQ(code_of([] { make_game({0.5, 0.5 + 1e-11}, 1.0); }), errc::lambda_sum_mismatch);
  EXPECT_NO_THROW(make_game({0.5, 0.5 + 1e-13}, 1.0));
}

TEST(GameSpec, RejectsNegativeOrNonFiniteKappa) {
  EXPECT_EQ(code_of([] { make_game({1.0}, -0.1); }), errc::negative_kappa);
  EXPECT_EQ(code_of([] { make_game({1.0}, NAN); }), errc::negative_kappa);
  EXPECT_EQ(code_of([] { make_game({1.0}, INFINITY); }), errc::negative_kappa);
}

TEST(GameSpec, SymmetricGame) {
  const auto spec = make_symmetric_game(7, 2.0);
  for (double l : spec.lambdas) EXPECT_DOUBLE_EQ(l, 1.0 / 7.0);
}

TEST(GameSpec, RenormalizeOnlyOnRequest) {
  const auto l = renormalized({2.0, 3.0, 5.0});
  EXPECT_DOUBLE_EQ(l[0], 0.2);
  EXPECT_DOUBLE_EQ(l[1], 0.3);
  EXPECT_DOUBLE_EQ(l[2], 0.5);
  EXPECT_EQ(code_of([] { renormalized({0.0, 0.0}); }), errc::non_positive_lambda);
}

TEST(Errors, NamesMatchCodes) {
  EXPECT_STREQ(to_string(errc::degenerate_alpha), "DegenerateAlpha");
  EXPECT_STREQ(to_string(errc::no_convergence), "NoConvergence");
  EXPECT_STREQ(to_string(errc::representation_too_small), "RepresentationTooSmall");
  const error e(errc::grid_mismatch, "x");
  EXPECT_EQ(e.code(), errc::grid_mismatch);
  EXPECT_NE(std::string(e.what()).find("GridMismatch"), std::string::npos);
}

TEST(Numerics, ExpRatiosAreContinuousAtZero) {
  EXPECT_EQ(x_over_expm1(0.0), 1.0);
  EXPECT_EQ(x_over_one_minus_exp_neg(0.0), 1.0);
  EXPECT_NEAR(x_over_expm1(1e-10), 1.0 - 5e-11, 1e-15);
  EXPECT_NEAR(x_over_one_minus_exp_neg(1e-10), 1.0 + 5e-11, 1e-15);
  EXPECT_NEAR(x_over_expm1(1.0), 1.0 / (std::exp(1.0) - 1.0), 1e-15);
}

TEST(Grid, UniformGridEndpointsExact) {
  const auto g = uniform_grid(101);
  ASSERT_EQ(g.size(), 101u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_NEAR(g[50], 0.5, 1e-15);
  EXPECT_EQ(code_of([] { uniform_grid(1); }), errc::grid_too_small);
}

TEST(Sampling, SimplexDrawsAreValidAndSeeded) {
  std::mt19937_64 a(42), b(42);
  for (int k = 0; k < 200; ++k) {
    const auto x = random_simplex(5, a, 0.05);
    const auto y = random_simplex(5, b, 0.05);
    EXPECT_EQ(x, y);
    EXPECT_NO_THROW(make_game(x, 1.0));
    for (double l : x) EXPECT_GE(l, 0.05 - 1e-15);
  }
}

TEST(Sampling, RejectsImpossibleFloor) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(random_simplex(5, rng, 0.2), error);
  EXPECT_THROW(random_simplex(0, rng), error);
}
