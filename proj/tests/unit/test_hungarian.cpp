#include <random>
#include <set>

#include "doctest.h"
#include "hoiforge/error.hpp"
#include "hoiforge/hungarian.hpp"
#include "support/oracles.hpp"

using namespace hoiforge;

namespace {

void check_valid(const Assignment& a, std::size_t n, std::size_t m) {
  CHECK(a.pairs.size() == std::min(n, m));
  std::set<std::size_t> rows, cols;
  for (const auto& [i, j] : a.pairs) {
    CHECK(i < n);
    CHECK(j < m);
    rows.insert(i);
    cols.insert(j);
  }
  CHECK(rows.size() == a.pairs.size());
  CHECK(cols.size() == a.pairs.size());
}

}  // namespace

TEST_CASE("1x1 assignment") {
  const auto a = hungarian(Matrix{{4.5}});
  REQUIRE(a.pairs.size() == 1);
  CHECK(a.pairs[0] == std::pair<std::size_t, std::size_t>{0, 0});
  CHECK(a.total_cost == 4.5);
}

TEST_CASE("2x2 diagonal optimum") {
  // permutations: identity 1+1=2, swap 2+2=4
  const auto a = hungarian(Matrix{{1, 2}, {2, 1}});
  CHECK(a.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}});
  CHECK(a.total_cost == 2.0);
}

TEST_CASE("empty and non-finite matrices are rejected") {
  CHECK_THROWS_AS(hungarian(Matrix{}), ArgumentError);
  CHECK_THROWS_AS(hungarian(Matrix(0, 3)), ArgumentError);
  CHECK_THROWS_AS(hungarian(Matrix{{1.0, std::numeric_limits<double>::quiet_NaN()}}), ArgumentError);
}

TEST_CASE("square random matrices match the permutation oracle") {
  std::mt19937_64 rng(2024);
  for (std::size_t n = 1; n <= 7; ++n) {
    for (int t = 0; t < 40; ++t) {
      const auto rows = oracle::random_int_matrix(rng, n, n);
      const auto a = hungarian(Matrix::from_rows(rows));
      check_valid(a, n, n);
      CHECK(a.total_cost == oracle::brute_force_assignment(rows));
    }
  }
}

TEST_CASE("rectangular matrices match the oracle in both orientations") {
  std::mt19937_64 rng(99);
  for (std::size_t n = 1; n <= 5; ++n) {
    for (std::size_t m = 1; m <= 5; ++m) {
      const auto rows = oracle::random_int_matrix(rng, n, m, -20, 20);
      const auto a = hungarian(Matrix::from_rows(rows));
      check_valid(a, n, m);
      CHECK(a.total_cost == oracle::brute_force_assignment(rows));
    }
  }
}

TEST_CASE("real-valued costs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.0, 3.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::vector<double>> rows(6, std::vector<double>(6));
    for (auto& r : rows)
      for (auto& v : r) v = d(rng);
    CHECK(hungarian(Matrix::from_rows(rows)).total_cost ==
          doctest::Approx(oracle::brute_force_assignment(rows)).epsilon(1e-12));
  }
}
