#pragma once

#include <algorithm>
#include <cstddef>
#include <random>
#include <vector>

#include "posgame/core.hpp"

namespace posgame {

/// Uniform draw from the probability simplex (Dirichlet(1, ..., 1)),
/// redrawn until every component is at least min_lambda.
inline std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng, double min_lambda = 0.0) {
  if (n == 0) throw error(errc::empty_game, "random_simplex needs n >= 1");
  if (min_lambda * static_cast<double>(n) >= 1.0)
    throw error(errc::non_positive_lambda, "min_lambda too large for n");
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> v(n);
  for (;;) {
    double sum = 0.0;
    for (auto& x : v) sum += (x = expo(rng));
    for (auto& x : v) x /= sum;
    if (*std::min_element(v.begin(), v.end()) >= min_lambda) break;
  }
  // push the rounding residue into the largest entry so the sum is 1 to the last bit or two
  double sum = 0.0;
  for (double x : v) sum += x;
  *std::max_element(v.begin(), v.end()) += 1.0 - sum;
  return v;
}

}  // namespace posgame
