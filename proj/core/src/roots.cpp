#include "cpkdim/roots.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cpkdim/error.hpp"

namespace cpkdim {

namespace {

using Companion = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDegree, kMaxDegree>;

// p(z), p'(z) and the rounding scale sum |c_j| |z|^j; `ac` holds |c_j|.
void horner(std::span<const cd> c, const double* ac, cd z, cd& p, cd& dp, double& scale) {
  p = 0.0;
  dp = 0.0;
  scale = 0.0;
  const double az = std::abs(z);
  for (std::size_t j = c.size(); j-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[j];
    scale = scale * az + ac[j];
  }
}

// Complex quotient without the inf/nan recovery path of the library division.
inline cd quot(cd a, cd b) {
  const double den = std::norm(b);
  return cd((a.real() * b.real() + a.imag() * b.imag()) / den,
            (a.imag() * b.real() - a.real() * b.imag()) / den);
}

cd polish(std::span<const cd> c, const double* ac, cd z) {
  for (int it = 0; it < 8; ++it) {
    cd p, dp;
    double scale;
    horner(c, ac, z, p, dp, scale);
    if (std::norm(p) <= 1e-30 * scale * scale || dp == cd(0.0)) break;
    const cd step = quot(p, dp);
    z -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

// Simultaneous Aberth-Ehrlich iteration; false when it has not settled.
bool aberth(std::span<const cd> c, const double* ac, std::vector<cd>& z) {
  const int n = static_cast<int>(c.size()) - 1;
  double rad = 0.0;
  for (int i = 0; i < n; ++i) rad = std::max(rad, std::pow(ac[i] / ac[n], 1.0 / (n - i)));
  if (rad == 0.0) rad = 1.0;
  z.resize(n);
  for (int i = 0; i < n; ++i) z[i] = std::polar(rad, 2.0 * M_PI * (i + 0.25) / n + 0.4);
  std::array<bool, kMaxDegree> done{};
  for (int it = 0; it < 60; ++it) {
    bool all = true;
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      cd p, dp;
      double scale;
      horner(c, ac, z[i], p, dp, scale);
      if (std::norm(p) <= 1e-30 * scale * scale) {
        done[i] = true;
        continue;
      }
      const cd ratio = quot(p, dp);
      cd sum = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) sum += quot(1.0, z[i] - z[j]);
      }
      const cd w = quot(ratio, 1.0 - ratio * sum);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
      z[i] -= w;
      if (std::norm(w) <= 1e-30 * std::max(1.0, std::norm(z[i]))) {
        done[i] = true;
      } else {
        all = false;
      }
    }
    if (all) return true;
  }
  return false;
}

}  // namespace

std::vector<cd> polynomial_roots(std::span<const cd> coeffs) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n < 1) return {};
  if (n > kMaxDegree) throw Error(ErrorCode::InvalidArgument, "polynomial degree above 8");
  const cd lead = coeffs[n];
  if (lead == cd(0.0)) throw Error(ErrorCode::InvalidArgument, "zero leading coefficient");
  if (n == 1) return {-coeffs[0] / lead};
  std::array<double, kMaxDegree + 1> ac{};
  for (int j = 0; j <= n; ++j) ac[j] = std::abs(coeffs[j]);
  if (n == 2) {
    const cd b = coeffs[1] / lead;
    const cd c = coeffs[0] / lead;
    const cd disc = std::sqrt(b * b - 4.0 * c);
    const cd q = -0.5 * (std::real(std::conj(b) * disc) >= 0.0 ? b + disc : b - disc);
    if (q == cd(0.0)) return {0.0, 0.0};
    return {polish(coeffs, ac.data(), q), polish(coeffs, ac.data(), c / q)};
  }

  std::vector<cd> roots;
  if (aberth(coeffs, ac.data(), roots)) return roots;

  Companion m = Companion::Zero(n, n);
  for (int i = 1; i < n; ++i) m(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) m(i, n - 1) = -coeffs[i] / lead;
  Eigen::ComplexEigenSolver<Companion> es(m, false);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::DegenerateFiber, "companion eigenvalue iteration failed");
  }
  roots.resize(n);
  for (int i = 0; i < n; ++i) roots[i] = polish(coeffs, ac.data(), es.eigenvalues()[i]);
  return roots;
}

std::vector<CVec> binary_form_roots(std::span<const cd> g) {
  const int d = static_cast<int>(g.size()) - 1;
  double gmax = 0.0;
  for (auto c : g) gmax = std::max(gmax, std::abs(c));
  if (gmax == 0.0) throw Error(ErrorCode::DegenerateFiber, "binary form vanishes identically");

  // Work in the chart whose leading coefficient is larger; trailing tiny leading
  // coefficients in that chart are roots at its infinity.
  const bool u_chart = std::abs(g[d]) >= std::abs(g[0]);
  std::vector<cd> poly(d + 1);
  for (int m = 0; m <= d; ++m) poly[m] = u_chart ? g[m] : g[d - m];
  int deg = d;
  while (deg > 0 && std::abs(poly[deg]) <= 1e-14 * gmax) --deg;

  std::vector<CVec> out;
  out.reserve(d);
  for (cd r : polynomial_roots(std::span<const cd>(poly.data(), deg + 1))) {
    CVec p(2);
    if (u_chart) {
      p << r, 1.0;
    } else {
      p << 1.0, r;
    }
    out.push_back(p / p.cwiseAbs().maxCoeff());
  }
  for (int i = deg; i < d; ++i) {
    CVec p(2);
    if (u_chart) {
      p << 1.0, 0.0;
    } else {
      p << 0.0, 1.0;
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace cpkdim
