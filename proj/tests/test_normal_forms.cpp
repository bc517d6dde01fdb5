#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cpkdim/normal_forms.hpp"

using namespace cpkdim;

namespace {

using cplx = std::complex<double>;
using Exact = ResonantMap<ExactComplex>;

const double kLog2 = std::log(2.0);
const double kLog4 = std::log(4.0);

MultiIndex mi(std::initializer_list<int> v) { return MultiIndex(v); }

ExactComplex q(long n, long d = 1, long in = 0, long id = 1) {
  mpq_class re(n, d), im(in, id);
  re.canonicalize();
  im.canonicalize();
  return {re, im};
}

// (a z1 + c z2^2, b z2)
template <class S>
ResonantMap<S> triangular(S a, S c, S b) {
  ResonantMap<S> r;
  r.k = 2;
  r.a = {a, b};
  r.N.assign(2, {});
  r.N[0][mi({0, 2})] = c;
  return r;
}

// Exponent ratios with nonempty resonance sets.
std::vector<mpq_class> random_ratios(std::mt19937_64& rng) {
  static const mpq_class bases[] = {mpq_class(3, 2), mpq_class(2), mpq_class(5, 4), mpq_class(7, 3)};
  std::uniform_int_distribution<int> pick(0, 3), shape(0, 4);
  const mpq_class b = bases[pick(rng)];
  switch (shape(rng)) {
    case 0: return {b * b, b};
    case 1: return {b * b * b, b};
    case 2: return {b * b * b, b * b, b};
    case 3: return {b * b * b * b, b * b, b};
    default: return {b * b, b * b, b};
  }
}

CocycleSpec<cplx> random_cocycle(const ResonanceSet& res, int n, double eps, double c_scale,
                                 std::mt19937_64& rng) {
  CocycleSpec<cplx> spec;
  spec.res = res;
  spec.epsilon = eps;
  for (int m = 0; m < n; ++m) spec.steps.push_back(random_resonant_map(res, eps, c_scale, rng));
  spec.M = minimal_adaptedness_constant(spec, n);
  return spec;
}

}  // namespace

TEST_CASE("resonance examples") {
  const auto a = enumerate_resonances({kLog4, kLog2}, 1e-9);
  REQUIRE(a.R.size() == 1);
  CHECK(a.R[0] == std::vector<MultiIndex>{mi({0, 2})});
  CHECK(a.Delta == 1);
  CHECK(a.theta == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(a.I == std::vector<int>{0});

  const auto b = enumerate_resonances({std::log(3.0), kLog2}, 1e-9);
  CHECK(b.R[0].empty());
  CHECK(b.Delta == 0);

  const auto c = enumerate_resonances({1.0, 0.9}, 1e-6);
  CHECK(c.I.empty());
  CHECK(c.R[0].empty());

  const auto e = enumerate_resonances_exact({mpq_class(4), mpq_class(2)});
  CHECK(e.R[0] == std::vector<MultiIndex>{mi({0, 2})});

  CHECK_THROWS_AS(enumerate_resonances({kLog2, kLog4}, 1e-9), Error);
  CHECK_THROWS_AS(enumerate_resonances({kLog4, kLog2}, 0.5), Error);
}

TEST_CASE("resonance sets satisfy their defining constraints") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  for (int t = 0; t < 300; ++t) {
    const int k = 2 + t % 2;
    std::vector<double> lambda(k);
    lambda.back() = u(rng);
    // integer combinations half the time so resonances actually occur
    for (int i = k - 2; i >= 0; --i) {
      lambda[i] = (t % 4 < 2) ? lambda[i + 1] * (1 + t % 3) : lambda[i + 1] * (1.0 + u(rng));
    }
    const double eps = 1e-6;
    const auto res = enumerate_resonances(lambda, eps);
    CHECK(res.theta == doctest::Approx(lambda.front() / lambda.back()));
    int count = 0;
    for (int i = 0; i + 1 < k; ++i) {
      const bool in_I = std::find(res.I.begin(), res.I.end(), i) != res.I.end();
      if (!in_I) CHECK(res.R[i].empty());
      for (std::size_t n = 0; n < res.R[i].size(); ++n) {
        const auto& alpha = res.R[i][n];
        CHECK(order(alpha) >= 2);
        CHECK(order(alpha) <= res.theta + eps);
        double s = 0.0;
        for (int j = 0; j < k; ++j) {
          if (j <= i) CHECK(alpha[j] == 0);
          s += alpha[j] * lambda[j];
        }
        CHECK(std::abs(lambda[i] - s) <= eps);
        if (n > 0) CHECK(GrLex{}(res.R[i][n - 1], alpha));
      }
      count += static_cast<int>(res.R[i].size());
    }
    CHECK(res.Delta == count);
  }
}

TEST_CASE("composition examples") {
  const auto res = enumerate_resonances_exact({mpq_class(4), mpq_class(2)});
  const Exact lin1 = triangular(q(1, 3), q(0), q(1, 2, 1, 5));
  const Exact lin2 = triangular(q(-2, 7, 1, 2), q(0), q(3));
  const Exact prod = compose_resonant(lin1, lin2, res);
  CHECK(prod.a[0] == lin1.a[0] * lin2.a[0]);
  CHECK(prod.a[1] == lin1.a[1] * lin2.a[1]);
  CHECK(prod.N[0].empty());

  const Exact r = triangular(q(1, 4, 1, 9), q(-5, 3, 2, 1), q(1, 2));
  CHECK(compose_resonant(Exact::identity(2), r, res) == r);
  CHECK(compose_resonant(r, Exact::identity(2), res) == r);

  const ExactComplex a = q(1, 4), c = q(2, 3, -1, 2), b = q(1, 2, 1, 3);
  const ExactComplex a2 = q(-1, 5, 1, 7), c2 = q(3), b2 = q(0, 1, 2, 5);
  const Exact out = compose_resonant(triangular(a, c, b), triangular(a2, c2, b2), res);
  CHECK(out.N[0].at(mi({0, 2})) == a * c2 + c * b2 * b2);
  CHECK(out.a[0] == a * a2);
  CHECK(out.a[1] == b * b2);
}

TEST_CASE("inverse examples") {
  const auto res = enumerate_resonances_exact({mpq_class(4), mpq_class(2)});
  const ExactComplex a = q(1, 4, 1, 8), c = q(-3, 2, 5, 1), b = q(1, 2, -1, 3);
  const Exact inv = invert_resonant(triangular(a, c, b), res);
  CHECK(inv.a[0] == ExactComplex(1) / a);
  CHECK(inv.a[1] == ExactComplex(1) / b);
  CHECK(inv.N[0].at(mi({0, 2})) == -(c / (a * b * b)));

  const Exact lin = triangular(q(2, 3), q(0), q(-5, 1, 1, 1));
  const Exact lin_inv = invert_resonant(lin, res);
  CHECK(lin_inv.a[0] == q(3, 2));
  CHECK(lin_inv.a[1] == ExactComplex(1) / q(-5, 1, 1, 1));
  CHECK(lin_inv.N[0].empty());

  const auto r = triangular<cplx>(0.0, 1.0, 0.5);
  const auto dres = enumerate_resonances({kLog4, kLog2}, 1e-9);
  CHECK_THROWS_AS(invert_resonant(r, dres), Error);
}

TEST_CASE("closure and inverse laws hold exactly") {
  std::mt19937_64 rng(2024);
  int nonempty = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto ratios = random_ratios(rng);
    const auto res = enumerate_resonances_exact(ratios);
    REQUIRE(res.Delta > 0);
    nonempty += res.Delta > 0;
    const Exact r1 = random_exact_resonant_map(res, ratios, rng);
    const Exact r2 = random_exact_resonant_map(res, ratios, rng);
    const auto c = compose_with_residual(r1, r2, res);
    CHECK(c.residual_zero());
    const Exact inv = invert_resonant(r1, res);
    CHECK(compose_resonant(r1, inv, res) == Exact::identity(res.k));
    CHECK(compose_resonant(inv, r1, res) == Exact::identity(res.k));
  }
  CHECK(nonempty == 1000);
}

TEST_CASE("associativity") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto ratios = random_ratios(rng);
    const auto res = enumerate_resonances_exact(ratios);
    const Exact r1 = random_exact_resonant_map(res, ratios, rng);
    const Exact r2 = random_exact_resonant_map(res, ratios, rng);
    const Exact r3 = random_exact_resonant_map(res, ratios, rng);
    CHECK(compose_resonant(compose_resonant(r1, r2, res), r3, res) ==
          compose_resonant(r1, compose_resonant(r2, r3, res), res));
  }
}

TEST_CASE("cocycle products") {
  std::mt19937_64 rng(6);
  const auto res = enumerate_resonances({kLog4, kLog2}, 1e-9);

  CocycleSpec<cplx> one;
  one.res = res;
  one.epsilon = 0.01;
  one.steps = {random_resonant_map(res, 0.01, 0.5, rng), random_resonant_map(res, 0.01, 0.5, rng)};
  CHECK(cocycle_product(one, 1) == one.steps[0]);
  const auto two = cocycle_product(one, 2);
  const double m = std::abs(two.a[0]);
  CHECK(m >= std::exp(-2 * kLog4 - 0.02));
  CHECK(m <= std::exp(-2 * kLog4 + 0.02));
  CHECK_THROWS_AS(cocycle_product(one, 3), Error);

  const auto eres = enumerate_resonances_exact({mpq_class(4), mpq_class(2)});
  CocycleSpec<ExactComplex> lin;
  lin.res = eres;
  lin.epsilon = 0.0;
  const Exact a = triangular(q(0, 1, 1, 4), q(0), q(1, 2));
  lin.steps.assign(6, a);
  const Exact p = cocycle_product(lin, 6);
  ExactComplex a0 = 1, a1 = 1;
  for (int i = 0; i < 6; ++i) {
    a0 *= a.a[0];
    a1 *= a.a[1];
  }
  CHECK(p.a[0] == a0);
  CHECK(p.a[1] == a1);
  CHECK(p.N[0].empty());

  CocycleSpec<cplx> bad = one;
  bad.steps[1].a[0] *= 3.0;
  try {
    cocycle_product(bad, 2);
    FAIL("expected BandViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BandViolation);
  }
}

TEST_CASE("band propagation and the inverse of a product") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const auto ratios = random_ratios(rng);
    const auto res = enumerate_resonances_exact(ratios);
    CocycleSpec<ExactComplex> spec;
    spec.res = res;
    spec.epsilon = 0.01;
    const int n = 2 + t % 4;
    for (int m = 0; m < n; ++m) spec.steps.push_back(random_exact_resonant_map(res, ratios, rng));
    const Exact prod = cocycle_product(spec, n);
    Exact rev = invert_resonant(spec.steps[0], res);
    for (int m = 1; m < n; ++m) rev = compose_resonant(rev, invert_resonant(spec.steps[m], res), res);
    CHECK(invert_resonant(prod, res) == rev);
    for (int i = 0; i < res.k; ++i) {
      CHECK(in_band(modulus(prod.a[i]), res.lambda[i], spec.epsilon, n));
    }
  }
}

TEST_CASE("adaptedness estimates for linear cocycles") {
  const auto res = enumerate_resonances({kLog4, kLog2}, 1e-9);
  CocycleSpec<cplx> spec;
  spec.res = res;
  spec.epsilon = 0.01;
  spec.M = 1.0;
  spec.steps.assign(5, triangular<cplx>(std::polar(0.25, 0.3), 0.0, std::polar(0.5, -1.1)));
  const auto out = normal_form_estimates(spec, 5, 1000);
  CHECK(out.ok1);
  CHECK(out.ok2);
  CHECK(out.ok3);
  CHECK(out.ok4);
  // item 2 sees the diagonal |a_1|^5 = 4^-5 against M' e^(-5 log 4 + 5 eps)
  CHECK(out.worst_margins[1] == doctest::Approx(2.0 * std::exp(0.05) - 1.0).epsilon(1e-9));
  CHECK(out.worst_margins[2] == doctest::Approx(std::exp(0.05) - 1.0).epsilon(1e-9));
  CHECK(std::isinf(out.worst_margins[3]));
  CHECK(out.M_prime == doctest::Approx(2.0));
}

TEST_CASE("adaptedness estimates for random cocycles") {
  std::mt19937_64 rng(8);
  const auto res = enumerate_resonances({kLog4, kLog2}, 1e-9);
  for (int t = 0; t < 100; ++t) {
    const auto spec = random_cocycle(res, 5, 0.01, 0.5 + t % 3, rng);
    const auto out = normal_form_estimates(spec, 5, 1000);
    CHECK(out.ok1);
    CHECK(out.ok2);
    CHECK(out.ok3);
    CHECK(out.ok4);
  }
  const auto res3 = enumerate_resonances({3 * kLog2, 2 * kLog2, kLog2}, 1e-9);
  for (int t = 0; t < 20; ++t) {
    const auto spec = random_cocycle(res3, 4, 0.02, 1.0, rng);
    const auto out = normal_form_estimates(spec, 4, 500);
    CHECK((out.ok1 && out.ok2 && out.ok3 && out.ok4));
  }
}

TEST_CASE("inflated coefficients fail adaptedness") {
  std::mt19937_64 rng(9);
  const auto res = enumerate_resonances({kLog4, kLog2}, 1e-9);
  auto spec = random_cocycle(res, 5, 0.01, 1.0, rng);
  for (auto& s : spec.steps) s.N[0][mi({0, 2})] *= 50.0;
  try {
    normal_form_estimates(spec, 5, 100);
    FAIL("expected AdaptednessFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AdaptednessFailure);
  }
}

TEST_CASE("fractional time") {
  CHECK(fractional_time(10, kLog4, kLog2) == 5);
  CHECK(fractional_time(0, kLog4, kLog2) == 0);
  CHECK(fractional_time(7, 1.0, 0.3) == 2);
  CHECK(fractional_time(30, 1.0, 0.1) == 3);
  CHECK_THROWS_AS(fractional_time(-1, 1.0, 0.5), Error);
  CHECK_THROWS_AS(fractional_time(3, 0.5, 1.0), Error);

  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int t = 0; t < 200; ++t) {
    const double l1 = u(rng);
    const double lk = l1 * std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    int prev = 0;
    for (int n = 0; n <= 200; ++n) {
      const int qn = fractional_time(n, l1, lk);
      const double x = n * lk / l1;
      CHECK(qn >= 0);
      CHECK(qn <= n);
      CHECK(qn >= prev);
      CHECK(qn > x - 1.0);
      CHECK(qn <= x * (1.0 + 1e-12));
      prev = qn;
    }
  }
}

TEST_CASE("text round trip") {
  std::mt19937_64 rng(11);
  const auto res = enumerate_resonances({3 * kLog2, 2 * kLog2, kLog2}, 1e-9);
  for (int t = 0; t < 50; ++t) {
    const auto r = random_resonant_map(res, 0.01, 2.0, rng);
    CHECK(parse_resonant_map(to_text(r), 3) == r);
  }
  const auto r = triangular<cplx>({0.25, 0.0}, {1.5, -2.0}, {0.0, 0.5});
  CHECK(to_text(r) == "a_1 = 0.25,0; a_2 = 0,0.5; c_1[0,2] = 1.5,-2");
  CHECK(to_text(triangular(q(1, 4), q(3, 2, -2, 1), q(0, 1, 1, 2))) ==
        "a_1 = 1/4,0; a_2 = 0,1/2; c_1[0,2] = 3/2,-2");
  CHECK_THROWS_AS(parse_resonant_map("a_1 = 1", 2), Error);
  CHECK_THROWS_AS(parse_resonant_map("b_1 = 1,0", 2), Error);
}
