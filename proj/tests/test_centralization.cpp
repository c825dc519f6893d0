#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "posgame/centralization.hpp"
#include "posgame/costs.hpp"

using namespace posgame;

TEST(Scenario, Validation) {
  EXPECT_THROW(make_scenario(0, 3, 0.5, 1.0), error);
  EXPECT_THROW(make_scenario(3, 0, 0.5, 1.0), error);
  EXPECT_THROW(make_scenario(3, 3, 1.0, 1.0), error);
  EXPECT_THROW(make_scenario(3, 3, 0.5, -1.0), error);
  const auto sc = make_scenario(4, 8, 0.3, 2.0);
  EXPECT_EQ(sc.n(), 12u);
  EXPECT_DOUBLE_EQ(sc.lambda_nonfirm, 0.7);
}

TEST(Naive, FirmCostMatchesQuadrature) {
  // integral of the cost functional with the firm's 0.5 split evenly over 4 traders
  EXPECT_NEAR(firm_cost_no_centralization(make_scenario(4, 8, 0.5, 1.0)), 0.783317665419105539, 1e-12);
}

TEST(Naive, FirmCostIsSumOfMemberCosts) {
  const auto sc = make_scenario(3, 5, 0.36, 4.0);
  std::vector<double> l(8, 0.64 / 5.0);
  for (int i = 0; i < 3; ++i) l[i] = 0.12;
  const auto spec = make_game(l, 4.0);
  double firm = 0.0, rest = 0.0;
  for (std::size_t i = 0; i < 8; ++i) (i < 3 ? firm : rest) += trader_cost(spec, i);
  EXPECT_NEAR(firm_cost_no_centralization(sc), firm, 1e-12);
  EXPECT_NEAR(nonfirm_cost_no_centralization(sc), rest, 1e-12);
}

TEST(Naive, PartitionsEqualAggregates) {
  for (std::size_t n1 : {1u, 3u, 10u})
    for (std::size_t n2 : {1u, 4u, 30u})
      for (double kappa : {0.5, 5.0, 25.0})
        for (double lam : {0.07, 0.4, 0.82}) {
          const auto sc = make_scenario(n1, n2, lam, kappa);
          EXPECT_NEAR(firm_cost_no_centralization(sc) + nonfirm_cost_no_centralization(sc),
                      aggregate_cost(sc.n(), kappa), 1e-9);
          EXPECT_NEAR(firm_cost_centralized(sc) + nonfirm_cost_centralized(sc), aggregate_cost(n2 + 1, kappa), 1e-9);
        }
}

TEST(Naive, CentralizedAlphaUsesGameSize) {
  EXPECT_DOUBLE_EQ(centralized_alpha(make_scenario(4, 8, 0.5, 1.0)), 0.8);
  EXPECT_DOUBLE_EQ(centralized_alpha(make_scenario(4, 8, 0.5, 1.0)), compute_alpha(9, 1.0).value);
}

TEST(Naive, RequiresPositiveKappa) {
  const auto sc = make_scenario(2, 2, 0.5, 0.0);
  EXPECT_THROW(firm_cost_no_centralization(sc), error);
  EXPECT_THROW(firm_cost_centralized(sc), error);
}

TEST(Naive, TableRowMean) {
  const std::vector<std::size_t> ns{20, 21, 22}, n1s{3, 4, 5};
  const auto r = table_row_mean(0.40, 5.0, ns, n1s);
  EXPECT_NEAR(r.pct_change_firm, 1.36, 0.01);
  EXPECT_NEAR(r.pct_change_nonfirm, -2.12, 0.01);
  EXPECT_NEAR(r.pct_change_total, -0.70, 0.01);
  EXPECT_NEAR(r.firm_cost_no_central, 1.97, 0.03 * 1.97);
  EXPECT_NEAR(r.total_no_central(), r.firm_cost_no_central + r.nonfirm_cost_no_central, 1e-15);
  EXPECT_THROW(table_row_mean(0.4, 5.0, std::vector<std::size_t>{4}, n1s), error);
}

TEST(Naive, SampledRowIsSeededAndNearMean) {
  const std::vector<std::size_t> ns{20, 21, 22}, n1s{3, 4, 5};
  const auto a = table_row_sampled(0.4, 5.0, ns, n1s, 400, 99);
  const auto b = table_row_sampled(0.4, 5.0, ns, n1s, 400, 99);
  EXPECT_EQ(a.pct_change_firm, b.pct_change_firm);
  const auto mean = table_row_mean(0.4, 5.0, ns, n1s);
  EXPECT_NEAR(a.pct_change_firm, mean.pct_change_firm, 0.2);
  EXPECT_THROW(table_row_sampled(0.4, 5.0, ns, n1s, 0, 1), error);
}

TEST(Strategic, Identities) {
  for (std::size_t n1 : {1u, 2u, 7u})
    for (std::size_t n2 : {1u, 5u, 40u})
      for (double kappa : {0.5, 1.0, 25.0}) {
        const auto sc = make_scenario(n1, n2, 0.333, kappa);
        EXPECT_NEAR(strategic_cost(sc, 0), firm_cost_no_centralization(sc), 1e-12);
        EXPECT_NEAR(strategic_cost(sc, 1 - static_cast<long>(n1)), firm_cost_centralized(sc), 1e-12);
      }
}

TEST(Strategic, RepresentationFloor) {
  const auto sc = make_scenario(3, 5, 0.5, 1.0);
  EXPECT_NO_THROW(strategic_cost(sc, -2));
  try {
    strategic_cost(sc, -3);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::representation_too_small);
  }
  EXPECT_THROW(strategic_cost_approx(sc, -3), error);
}

TEST(Strategic, ContinuousOptimum) {
  EXPECT_NEAR(continuous_optimal_delta(make_scenario(4, 8, 0.5, 1.0)), 4.485281374238570293, 1e-12);
  const auto a = make_scenario(4, 8, 0.1, 0.5);
  const auto b = make_scenario(4, 8, 0.9, 25.0);
  EXPECT_EQ(continuous_optimal_delta(a), continuous_optimal_delta(b));
}

TEST(Strategic, ApproximateArgminBracketsContinuousOptimum) {
  for (std::size_t n1 = 1; n1 <= 50; n1 += 7)
    for (std::size_t n2 = 1; n2 <= 50; n2 += 3)
      for (double kappa : {0.5, 1.0, 5.0, 25.0})
        for (double lam : {0.1, 0.333, 0.666}) {
          const auto sc = make_scenario(n1, n2, lam, kappa);
          const auto c = optimal_representation(sc);
          const double ds = c.continuous_opt;
          EXPECT_TRUE(c.argmin_approx == static_cast<long>(std::floor(ds)) ||
                      c.argmin_approx == static_cast<long>(std::ceil(ds)))
              << n1 << " " << n2 << " " << kappa << " " << lam;
          EXPECT_LE(std::abs(static_cast<double>(c.argmin_exact) - ds), 1.0 + 1e-12);
        }
}

TEST(Strategic, CurveShape) {
  // one firm trader among ten: pretending to be more lowers cost
  const auto sc = make_scenario(1, 9, 0.1, 1.0);
  EXPECT_LT(strategic_cost(sc, 3), strategic_cost(sc, 0));
  // a firm with most of the traders gains by consolidating
  const auto big = make_scenario(7, 3, 0.7, 1.0);
  EXPECT_LT(strategic_cost(big, -3), strategic_cost(big, 0));
  const auto c = optimal_representation(big, DeltaRange{2, -6});
  EXPECT_EQ(c.delta_range.front(), -6);
  EXPECT_EQ(c.delta_range.back(), 2);
  EXPECT_LT(c.argmin_exact, 0);
  EXPECT_NEAR(c.represented_opt(big), std::sqrt(12.0), 1e-12);
  EXPECT_THROW(optimal_representation(big, DeltaRange{-20, -10}), error);
}

TEST(Strategic, LimitingCosts) {
  const auto sc = make_scenario(4, 8, 0.5, 1.0);
  const auto lim = limiting_costs(sc);
  EXPECT_NEAR(lim.firm, 0.790988353434663212, 1e-12);
  EXPECT_NEAR(strategic_cost(sc, 200000), lim.firm, 1e-5);
  EXPECT_NEAR(lim.firm + lim.nonfirm, aggregate_cost_limit(1.0), 1e-14);
}
