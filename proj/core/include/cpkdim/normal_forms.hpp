#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cpkdim/error.hpp"

namespace cpkdim {

using MultiIndex = std::vector<int>;

int order(const MultiIndex& a);

/// Graded lexicographic order: total degree first, then lexicographic.
struct GrLex {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

/// Complex number with exact rational parts.
struct ExactComplex {
  mpq_class re = 0;
  mpq_class im = 0;

  ExactComplex() = default;
  ExactComplex(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {}
  ExactComplex(int r) : re(r), im(0) {}

  ExactComplex& operator+=(const ExactComplex& o);
  ExactComplex& operator-=(const ExactComplex& o);
  ExactComplex& operator*=(const ExactComplex& o);
  ExactComplex& operator/=(const ExactComplex& o);
  friend ExactComplex operator+(ExactComplex a, const ExactComplex& b) { return a += b; }
  friend ExactComplex operator-(ExactComplex a, const ExactComplex& b) { return a -= b; }
  friend ExactComplex operator*(ExactComplex a, const ExactComplex& b) { return a *= b; }
  friend ExactComplex operator/(ExactComplex a, const ExactComplex& b) { return a /= b; }
  ExactComplex operator-() const { return {-re, -im}; }
  friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const ExactComplex& a, const ExactComplex& b) { return !(a == b); }
};

inline bool is_zero(const std::complex<double>& c) { return c == std::complex<double>(0.0); }
inline bool is_zero(const ExactComplex& c) { return sgn(c.re) == 0 && sgn(c.im) == 0; }
inline double modulus(const std::complex<double>& c) { return std::abs(c); }
double modulus(const ExactComplex& c);
inline std::complex<double> to_complex(const std::complex<double>& c) { return c; }
std::complex<double> to_complex(const ExactComplex& c);

template <class S>
using SparsePoly = std::map<MultiIndex, S, GrLex>;

/// Resonant degrees R_i (0-based i = 0..k-2) of a descending exponent vector.
struct ResonanceSet {
  int k = 0;
  std::vector<double> lambda;
  std::vector<std::vector<MultiIndex>> R;
  int Delta = 0;
  double theta = 1.0;
  std::vector<int> I;  // 0-based indices i < k-1 with 2 lambda_k <= lambda_i

  bool contains(int i, const MultiIndex& alpha) const;
};

/// Exhaustive search over |alpha| <= ceil(theta) + 1 with |lambda_i - sum alpha_j lambda_j| <= eps.
/// Each R_i comes out in graded lexicographic order.
ResonanceSet enumerate_resonances(const std::vector<double>& lambda, double eps_res);

/// Exponents lambda_i = log(ratios[i]) with rational ratios > 1; resonances are exact identities
/// ratios[i] = prod ratios[j]^alpha_j.
ResonanceSet enumerate_resonances_exact(const std::vector<mpq_class>& ratios);

/// R = A + N: diagonal linear part `a` and normal part N[i] supported on R_i; N[k-1] is empty.
template <class S>
struct ResonantMap {
  int k = 0;
  std::vector<S> a;
  std::vector<SparsePoly<S>> N;

  static ResonantMap identity(int k) {
    ResonantMap r;
    r.k = k;
    r.a.assign(k, S(1));
    r.N.assign(k, {});
    return r;
  }

  /// Full components as polynomials in z_1..z_k.
  std::vector<SparsePoly<S>> components() const {
    std::vector<SparsePoly<S>> out(k);
    for (int i = 0; i < k; ++i) {
      MultiIndex e(k, 0);
      e[i] = 1;
      if (!is_zero(a[i])) out[i][e] = a[i];
      for (const auto& [alpha, c] : N[i]) {
        if (!is_zero(c)) out[i][alpha] = c;
      }
    }
    return out;
  }

  friend bool operator==(const ResonantMap& x, const ResonantMap& y) {
    if (x.k != y.k) return false;
    const auto cx = x.components();
    const auto cy = y.components();
    return cx == cy;
  }
};

template <class S>
struct Composition {
  ResonantMap<S> map;
  std::vector<SparsePoly<S>> residual;  // terms outside A + N, must vanish

  bool residual_zero() const {
    for (const auto& p : residual) {
      if (!p.empty()) return false;
    }
    return true;
  }
};

namespace detail {

template <class S>
void add_term(SparsePoly<S>& p, const MultiIndex& e, const S& c) {
  if (is_zero(c)) return;
  auto it = p.find(e);
  if (it == p.end()) {
    p.emplace(e, c);
  } else {
    it->second += c;
    if (is_zero(it->second)) p.erase(it);
  }
}

template <class S>
SparsePoly<S> multiply(const SparsePoly<S>& x, const SparsePoly<S>& y) {
  SparsePoly<S> out;
  for (const auto& [ex, cx] : x) {
    for (const auto& [ey, cy] : y) {
      MultiIndex e(ex.size());
      for (std::size_t j = 0; j < e.size(); ++j) e[j] = ex[j] + ey[j];
      add_term(out, e, cx * cy);
    }
  }
  return out;
}

template <class S>
SparsePoly<S> monomial_of(const std::vector<SparsePoly<S>>& polys, const MultiIndex& alpha, int k) {
  SparsePoly<S> out;
  out[MultiIndex(k, 0)] = S(1);
  for (int j = 0; j < k; ++j) {
    for (int t = 0; t < alpha[j]; ++t) out = multiply(out, polys[j]);
  }
  return out;
}

// Splits polynomial components into diagonal linear part, resonant part and residual.
template <class S>
Composition<S> split(const std::vector<SparsePoly<S>>& comps, const ResonanceSet& res) {
  const int k = static_cast<int>(comps.size());
  Composition<S> c;
  c.map.k = k;
  c.map.a.assign(k, S(0));
  c.map.N.assign(k, {});
  c.residual.assign(k, {});
  for (int i = 0; i < k; ++i) {
    for (const auto& [e, coef] : comps[i]) {
      const int o = order(e);
      if (o == 1 && e[i] == 1) {
        c.map.a[i] = coef;
      } else if (o >= 2 && i < k - 1 && res.contains(i, e)) {
        c.map.N[i][e] = coef;
      } else {
        c.residual[i][e] = coef;
      }
    }
  }
  return c;
}

}  // namespace detail

/// R1 o R2 (R2 applied first), with the terms outside the resonant class collected separately.
template <class S>
Composition<S> compose_with_residual(const ResonantMap<S>& r1, const ResonantMap<S>& r2,
                                     const ResonanceSet& res) {
  if (r1.k != r2.k || r1.k != res.k) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  const int k = r1.k;
  const auto inner = r2.components();
  std::vector<SparsePoly<S>> out(k);
  for (int i = 0; i < k; ++i) {
    for (const auto& [e, c] : inner[i]) detail::add_term(out[i], e, r1.a[i] * c);
    for (const auto& [alpha, c] : r1.N[i]) {
      for (const auto& [e, m] : detail::monomial_of(inner, alpha, k)) detail::add_term(out[i], e, c * m);
    }
  }
  return detail::split(out, res);
}

/// Throws ClosureViolation if a non-resonant monomial survives.
template <class S>
ResonantMap<S> compose_resonant(const ResonantMap<S>& r1, const ResonantMap<S>& r2,
                                const ResonanceSet& res) {
  Composition<S> c = compose_with_residual(r1, r2, res);
  if (!c.residual_zero()) throw Error(ErrorCode::ClosureViolation, "non-resonant term in composition");
  return std::move(c.map);
}

/// Triangular back-substitution: z_k first, then z_{k-1}, ...
/// Throws SingularDiagonal for a vanishing diagonal entry, ClosureViolation as above.
template <class S>
ResonantMap<S> invert_resonant(const ResonantMap<S>& r, const ResonanceSet& res) {
  const int k = r.k;
  for (const auto& a : r.a) {
    if (modulus(a) < 1e-300) throw Error(ErrorCode::SingularDiagonal, "diagonal coefficient vanishes");
  }
  std::vector<SparsePoly<S>> z(k);
  for (int i = k - 1; i >= 0; --i) {
    const S inv = S(1) / r.a[i];
    MultiIndex e(k, 0);
    e[i] = 1;
    z[i][e] = inv;
    for (const auto& [alpha, c] : r.N[i]) {
      for (const auto& [m, coef] : detail::monomial_of(z, alpha, k)) {
        detail::add_term(z[i], m, -(inv * c * coef));
      }
    }
  }
  Composition<S> c = detail::split(z, res);
  if (!c.residual_zero()) throw Error(ErrorCode::ClosureViolation, "non-resonant term in inverse");
  return std::move(c.map);
}

template <class S>
struct CocycleSpec {
  std::vector<ResonantMap<S>> steps;
  ResonanceSet res;
  double epsilon = 0.0;
  double M = 1.0;
};

/// |a| inside [e^(-n lambda - |n| eps), e^(-n lambda + |n| eps)] up to relative rounding.
bool in_band(double modulus_a, double lambda, double eps, int n);

/// R_{n-1} o ... o R_0. Throws BandViolation when a diagonal coefficient leaves the band.
template <class S>
ResonantMap<S> cocycle_product(const CocycleSpec<S>& spec, int n) {
  if (n < 1 || n > static_cast<int>(spec.steps.size())) {
    throw Error(ErrorCode::InvalidArgument, "n must lie in [1, length]");
  }
  ResonantMap<S> acc = spec.steps[0];
  for (int m = 1; m < n; ++m) acc = compose_resonant(spec.steps[m], acc, spec.res);
  for (int i = 0; i < acc.k; ++i) {
    if (!in_band(modulus(acc.a[i]), spec.res.lambda[i], spec.epsilon, n)) {
      throw Error(ErrorCode::BandViolation, "diagonal coefficient of the product leaves its band");
    }
  }
  return acc;
}

ResonantMap<std::complex<double>> to_double(const ResonantMap<ExactComplex>& r);
CocycleSpec<std::complex<double>> to_double(const CocycleSpec<ExactComplex>& spec);

/// Smallest M >= 1 with max_alpha |c_{i,m}^alpha| <= M e^(-m lambda_i + |m| eps) for 0 < |m| <= n.
double minimal_adaptedness_constant(const CocycleSpec<std::complex<double>>& spec, int n);

struct EstimatesResult {
  bool ok1 = false, ok2 = false, ok3 = false, ok4 = false;
  /// Relative slack of each item; infinite when the bounded quantity vanishes identically.
  double worst_margins[4] = {0, 0, 0, 0};
  double M_prime = 0.0;
};

/// Samples `samples` low-discrepancy points of the unit polydisc, weighted towards its boundary,
/// and checks the four estimates for R^n. Throws AdaptednessFailure if the cocycle's M is too small.
EstimatesResult normal_form_estimates(const CocycleSpec<std::complex<double>>& spec, int n, int samples);

/// floor(n lambdak / lambda1) with a 1e-12 relative guard against rounding just below an integer.
int fractional_time(int n, double lambda1, double lambdak);

/// Random map with |a_i| = e^(-lambda_i) (1 + delta), |delta| <= eps/2, and normal coefficients of
/// modulus at most c_scale * e^(-lambda_i).
ResonantMap<std::complex<double>> random_resonant_map(const ResonanceSet& res, double eps,
                                                      double c_scale, std::mt19937_64& rng);

/// Exact analogue for exponents log(ratios[i]): a_i is a rational point of the unit circle times
/// (1/ratios[i]) (1 + delta) with rational delta; coefficients have small rational parts.
ResonantMap<ExactComplex> random_exact_resonant_map(const ResonanceSet& res,
                                                    const std::vector<mpq_class>& ratios,
                                                    std::mt19937_64& rng);

/// Text form "a_1 = re,im; c_1[0,2] = re,im; ..." with 1-based indices.
std::string to_text(const ResonantMap<std::complex<double>>& r);
std::string to_text(const ResonantMap<ExactComplex>& r);
ResonantMap<std::complex<double>> parse_resonant_map(const std::string& text, int k);

}  // namespace cpkdim
