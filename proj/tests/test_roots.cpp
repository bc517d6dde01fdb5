#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cpkdim/error.hpp"
#include "cpkdim/roots.hpp"

using namespace cpkdim;

namespace {

// Coefficients (low to high) of lead * prod (z - r).
std::vector<cd> from_roots(const std::vector<cd>& roots, cd lead = 1.0) {
  std::vector<cd> c{lead};
  for (cd r : roots) {
    std::vector<cd> next(c.size() + 1, 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j + 1] += c[j];
      next[j] -= r * c[j];
    }
    c = next;
  }
  return c;
}

// Largest distance from an expected root to its nearest unused computed root.
double match_error(std::vector<cd> got, const std::vector<cd>& want) {
  REQUIRE(got.size() == want.size());
  double worst = 0.0;
  for (cd w : want) {
    auto it = std::min_element(got.begin(), got.end(),
                               [&](cd a, cd b) { return std::abs(a - w) < std::abs(b - w); });
    worst = std::max(worst, std::abs(*it - w));
    got.erase(it);
  }
  return worst;
}

}  // namespace

TEST_CASE("low degrees") {
  const std::vector<cd> lin{2.0, -4.0};
  CHECK(std::abs(polynomial_roots(lin)[0] - cd(0.5)) < 1e-15);

  const auto quad = from_roots({cd(1e8), cd(1e-8)});
  CHECK(match_error(polynomial_roots(quad), {cd(1e8), cd(1e-8)}) < 1e-15 * 1e8);
  const auto r = polynomial_roots(quad);
  const cd small = std::abs(r[0]) < std::abs(r[1]) ? r[0] : r[1];
  CHECK(std::abs(small - cd(1e-8)) < 1e-20);

  const std::vector<cd> zero_const{0.0, 0.0, 1.0};
  CHECK(match_error(polynomial_roots(zero_const), {0.0, 0.0}) == 0.0);
  CHECK(polynomial_roots(std::vector<cd>{3.0}).empty());
}

TEST_CASE("roots of unity and shifted clusters") {
  for (int n = 3; n <= 8; ++n) {
    std::vector<cd> c(n + 1, 0.0);
    c[0] = -1.0;
    c[n] = 1.0;
    std::vector<cd> want;
    for (int j = 0; j < n; ++j) want.push_back(std::polar(1.0, 2.0 * M_PI * j / n));
    CHECK(match_error(polynomial_roots(c), want) < 1e-13);
  }
  const std::vector<cd> spread{cd(0.1, 0.2), cd(-3.0, 1.0), cd(7.5), cd(0.0, -2.0), cd(-0.5, -0.5)};
  CHECK(match_error(polynomial_roots(from_roots(spread, cd(2.0, -1.0))), spread) < 1e-12);
}

TEST_CASE("multiple roots come back to the expected accuracy") {
  const std::vector<cd> want{1.0, 1.0, 1.0, 1.0};
  // a fourfold root is resolved to about eps^(1/4)
  CHECK(match_error(polynomial_roots(from_roots(want)), want) < 1e-3);
  const std::vector<cd> pairs{cd(0.5, 0.5), cd(0.5, 0.5), cd(-2.0), cd(-2.0), cd(0.0, 3.0)};
  CHECK(match_error(polynomial_roots(from_roots(pairs)), pairs) < 1e-6);
}

TEST_CASE("random polynomials have small backward residuals") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 2 + trial % 7;
    std::vector<cd> c(n + 1);
    for (auto& x : c) x = {g(rng), g(rng)};
    const auto roots = polynomial_roots(c);
    REQUIRE(static_cast<int>(roots.size()) == n);
    for (cd z : roots) {
      cd p = 0.0;
      double scale = 0.0;
      for (int j = n; j >= 0; --j) {
        p = p * z + c[j];
        scale = scale * std::abs(z) + std::abs(c[j]);
      }
      CHECK(std::abs(p) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("invalid input") {
  CHECK_THROWS_AS(polynomial_roots(std::vector<cd>{1.0, 2.0, 0.0}), Error);
  CHECK_THROWS_AS(polynomial_roots(std::vector<cd>(11, 1.0)), Error);
  CHECK_THROWS_AS(binary_form_roots(std::vector<cd>(3, 0.0)), Error);
}

TEST_CASE("binary forms keep roots at infinity") {
  // u^2 v: [0:1] twice and [1:0] once
  const std::vector<cd> g{0.0, 0.0, 1.0, 0.0};
  const auto roots = binary_form_roots(g);
  REQUIRE(roots.size() == 3);
  int at_zero = 0, at_inf = 0;
  for (const auto& p : roots) {
    if (std::abs(p[0]) < 1e-12 && std::abs(p[1] - 1.0) < 1e-12) ++at_zero;
    if (std::abs(p[1]) < 1e-12 && std::abs(p[0] - 1.0) < 1e-12) ++at_inf;
  }
  CHECK(at_zero == 2);
  CHECK(at_inf == 1);

  // u^2 - 4 v^2: [2:1] and [-2:1]
  const std::vector<cd> h{-4.0, 0.0, 1.0};
  for (const auto& p : binary_form_roots(h)) {
    CHECK(std::abs(p[0] * p[0] - 4.0 * p[1] * p[1]) < 1e-14);
    CHECK(std::abs(p.cwiseAbs().maxCoeff() - 1.0) < 1e-15);
  }
}
