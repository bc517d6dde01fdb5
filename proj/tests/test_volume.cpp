#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "cpkdim/error.hpp"
#include "cpkdim/volume.hpp"
#include "support.hpp"

using namespace cpkdim;

namespace {

const double kLog2 = std::log(2.0);

const char* const kMaps[] = {"power2_k1", "power3_k1", "chebyshev2", "lattes4",
                             "power2_k2", "power3_k2", "skew2",      "product2"};

QuadratureGrid grid(double radius = 1.0, int n = 256) { return QuadratureGrid::polar(n, n, radius); }

}  // namespace

TEST_CASE("quadrature grid weights") {
  for (double r : {0.25, 1.0, 2.0}) {
    const auto g = QuadratureGrid::polar(64, 96, r);
    CHECK(g.nodes.size() == 64u * 96u);
    CHECK(std::abs(g.total_weight() - M_PI * r * r) < 1e-10);
    for (double w : g.weights) CHECK(w > 0.0);
  }
  CHECK_THROWS_AS(QuadratureGrid::polar(0, 4, 1.0), Error);
}

TEST_CASE("area of a chordal disc") {
  // chordal radius delta around 0 is |z| < delta / sqrt(1 - delta^2) with mass delta^2
  const double delta = 0.1;
  const double R = delta / std::sqrt(1.0 - delta * delta);
  const auto eta = affine_disc(1, 1, testing::vec({0.0}), testing::vec({R}), 1.0);
  const double area = polydisc_volume(testing::map("power2_k1"), 0, eta, grid());
  CHECK(area == doctest::Approx(delta * delta).epsilon(1e-4));
  CHECK(area <= 1.0);
}

TEST_CASE("composition consistency") {
  const auto& f = testing::map("power2_k1");
  const auto eta = affine_disc(1, 1, testing::vec({0.5}), testing::vec({0.25}), 1.0);
  PolydiscMap composed;
  composed.k = 1;
  composed.radius = 1.0;
  composed.lift = {{0.25, 0.25, 0.0625}, {1.0}};
  const double a = polydisc_volume(f, 1, eta, grid());
  const double b = polydisc_volume(f, 0, composed, grid());
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("constant discs have no area") {
  const auto p = testing::point({0.3, 1.0, cd(0.2, 0.1)});
  const auto eta = constant_disc(p, 2.0);
  for (int m : {0, 1, 4}) CHECK(polydisc_volume(testing::map("power2_k2"), m, eta, grid()) == 0.0);
  const auto r = pullback_identity_residual(testing::map("power2_k2"), 1, eta, grid());
  CHECK(r.residual == 0.0);
}

TEST_CASE("growth for the square map on CP1") {
  const auto& entry = testing::catalog().get("power2_k1");
  for (const auto& nd : entry.discs) {
    for (int m = 1; m <= 6; ++m) {
      CAPTURE(nd.label);
      CAPTURE(m);
      const auto g = growth_check(entry.map, m, nd.disc, grid());
      CHECK(g.bound == std::pow(2.0, m));
      CHECK(g.ratio <= 1.05);
      CHECK(g.pass);
    }
  }
}

TEST_CASE("growth for the square map on CP2 along chart lines") {
  const auto& entry = testing::catalog().get("power2_k2");
  for (const auto& nd : entry.discs) {
    for (int m = 1; m <= 5; ++m) {
      CAPTURE(nd.label);
      CAPTURE(m);
      const auto g = growth_check(entry.map, m, nd.disc, grid());
      CHECK(g.ratio <= 1.05);
    }
  }
}

TEST_CASE("base case of the growth bound") {
  for (const char* name : kMaps) {
    const auto& entry = testing::catalog().get(name);
    for (const auto& nd : entry.discs) {
      CAPTURE(std::string(name));
      CAPTURE(nd.label);
      const auto g = growth_check(entry.map, 0, nd.disc, grid());
      CHECK(g.bound == 1.0);
      CHECK(g.ratio <= 1.05);
    }
  }
}

TEST_CASE("growth needs a certificate") {
  const auto eta = affine_disc(1, 1, testing::vec({0.0}), testing::vec({10.0}), 2.0);
  CHECK_FALSE(eta.bounded_certificate.has_value());
  try {
    growth_check(testing::map("power2_k1"), 1, eta, grid());
    FAIL("expected NotBounded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotBounded);
  }
}

TEST_CASE("coarse grids are reported unstable") {
  const auto& entry = testing::catalog().get("chebyshev2");
  bool unstable = false;
  try {
    polydisc_volume(entry.map, 6, entry.discs.front().disc, QuadratureGrid::polar(4, 4, 1.0));
  } catch (const Error& e) {
    unstable = e.code() == ErrorCode::QuadratureUnstable;
  }
  CHECK(unstable);
}

TEST_CASE("volume is monotone in the radius") {
  for (const char* name : kMaps) {
    const auto& entry = testing::catalog().get(name);
    for (const auto& nd : entry.discs) {
      for (int m : {0, 2}) {
        double prev = 0.0;
        for (double rho : {0.25, 0.5, 1.0}) {
          const double v = curve_area(entry.map, m, nd.disc, grid(rho, 128));
          CAPTURE(std::string(name));
          CAPTURE(nd.label);
          CHECK(v >= prev);
          prev = v;
        }
      }
    }
  }
}

TEST_CASE("Green potential examples") {
  const auto& f = testing::map("power2_k1");
  const auto g1 = green_potential(f, testing::vec({1.0, 1.0}), 60);
  CHECK(std::abs(g1.value) < 1e-15);
  CHECK(g1.converged);
  const auto g2 = green_potential(f, testing::vec({2.0, 1.0}), 60);
  CHECK(std::abs(g2.value - kLog2) < 1e-12);
  CHECK_THROWS_AS(green_potential(f, testing::vec({0.0, 0.0}), 10), Error);
  CHECK_THROWS_AS(green_potential(f, testing::vec({1.0, 1.0}), 0), Error);
}

TEST_CASE("power maps have G = log of the sup norm") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> s(-2.0, 2.0);
  for (const char* name : {"power2_k1", "power3_k1", "power2_k2", "power3_k2"}) {
    const auto& f = testing::map(name);
    for (int t = 0; t < 100; ++t) {
      const CVec z = testing::random_lift(f.k(), rng) * std::exp(s(rng));
      CHECK(std::abs(green_potential(f, z).value - std::log(z.cwiseAbs().maxCoeff())) < 1e-8);
    }
  }
}

TEST_CASE("functional equation and homogeneity of G") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> s(-1.0, 1.0), ph(0.0, 2.0 * M_PI);
  for (const char* name : kMaps) {
    const auto& f = testing::map(name);
    const double d = f.degree();
    for (int t = 0; t < 100; ++t) {
      const CVec z = testing::random_lift(f.k(), rng);
      const double g = green_potential(f, z).value;
      CAPTURE(std::string(name));
      CHECK(std::abs(green_potential(f, f.eval_lift(z)).value - d * g) < 1e-8);
      const cd c = std::polar(std::exp(s(rng)), ph(rng));
      CHECK(std::abs(green_potential(f, CVec(c * z)).value - (g + std::log(std::abs(c)))) < 1e-8);
    }
  }
}

TEST_CASE("Green increments contract geometrically") {
  std::mt19937_64 rng(14);
  for (const char* name : kMaps) {
    const auto& f = testing::map(name);
    const double d = f.degree();
    // step constant: largest |log sup |F(v)|| over sup-normalized v
    double step = 0.0;
    for (int t = 0; t < 20'000; ++t) {
      CVec v = testing::random_lift(f.k(), rng);
      v /= v.cwiseAbs().maxCoeff();
      step = std::max(step, std::abs(std::log(f.eval_lift(v).cwiseAbs().maxCoeff())));
    }
    for (int t = 0; t < 50; ++t) {
      const auto g = green_potential(f, testing::random_lift(f.k(), rng));
      CAPTURE(std::string(name));
      CHECK(g.converged);
      for (std::size_t n = 0; n < g.increments.size(); ++n) {
        CHECK(std::abs(g.increments[n]) <= 2.0 * step * std::pow(1.0 / d + 0.1, n + 1.0));
      }
    }
  }
}

TEST_CASE("pullback identity on power maps") {
  for (const char* name : {"power2_k1", "power2_k2"}) {
    const auto& entry = testing::catalog().get(name);
    const auto& eta = entry.discs.front().disc;
    const double d = entry.map.degree();
    const auto r0 = pullback_identity_residual(entry.map, 0, eta, grid(1.0));
    CHECK(r0.residual < 0.02);
    const auto r1 = pullback_identity_residual(entry.map, 1, eta, grid(1.0));
    CHECK(r1.residual < 0.02 * d);
    CHECK(r1.volume_m > 0.0);
  }
}

TEST_CASE("pullback identity on the other benchmarks") {
  for (const char* name : {"chebyshev2", "lattes4", "skew2", "product2"}) {
    const auto& entry = testing::catalog().get(name);
    const double d = entry.map.degree();
    for (int m : {0, 1, 2}) {
      const auto r = pullback_identity_residual(entry.map, m, entry.discs.front().disc, grid(1.0));
      CAPTURE(std::string(name));
      CAPTURE(m);
      CHECK(r.residual < 0.02 * std::pow(d, m));
    }
  }
}
