#include "cpkdim/volume.hpp"

#include <algorithm>
#include <cmath>

#include "cpkdim/error.hpp"

namespace cpkdim {

namespace {

// Pushes (v, dv) through the lift m times, rescaling both by the sup norm of v.
void push_forward(const ProjectiveMap& f, int m, CVec& v, CVec& dv) {
  CVec val;
  CMat jac;
  for (int q = 0; q < m; ++q) {
    f.eval_with_jacobian(v, val, jac);
    dv = jac * dv;
    v = val;
    const double s = v.cwiseAbs().maxCoeff();
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::IndeterminatePoint, "lift vanished while iterating the disc");
    }
    v /= s;
    dv /= s;
  }
}

// Pullback of omega along a curve: |v ^ v'|^2 / (pi |v|^4).
double area_density(const CVec& v, const CVec& dv) {
  const double n2 = v.squaredNorm();
  const double wedge = n2 * dv.squaredNorm() - std::norm(v.dot(dv));
  return std::max(0.0, wedge) / (M_PI * n2 * n2);
}

// Finite-level potential phi_6 evaluated at the image F^m(lift).
double potential_after(const ProjectiveMap& f, int m, CVec v) {
  CVec dv = CVec::Zero(v.size());
  push_forward(f, m, v, dv);
  const double d = f.degree();
  double u = 0.0;
  double w = 1.0;
  for (int i = 0; i < 6; ++i) {
    v /= v.norm();
    const CVec img = f.eval_lift(v);
    w /= d;
    u -= w * std::log(img.norm());
    v = img;
  }
  return u;
}

}  // namespace

void PolydiscMap::eval(cd s, CVec& value, CVec& derivative) const {
  value.resize(k + 1);
  derivative.resize(k + 1);
  for (int i = 0; i <= k; ++i) {
    const auto& c = lift[i];
    cd p = 0.0, dp = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) {
      dp = dp * s + p;
      p = p * s + c[j];
    }
    value[i] = p;
    derivative[i] = dp;
  }
}

bool PolydiscMap::is_constant() const {
  for (const auto& c : lift) {
    for (std::size_t j = 1; j < c.size(); ++j) {
      if (c[j] != cd(0.0)) return false;
    }
  }
  return true;
}

std::optional<int> certify_bounded(const PolydiscMap& eta, int n) {
  std::vector<double> worst(eta.k + 1, std::numeric_limits<double>::infinity());
  CVec v, dv;
  for (int a = 0; a <= n; ++a) {
    const double r = eta.radius * a / n;
    for (int b = 0; b < (a == 0 ? 1 : 4 * n); ++b) {
      eta.eval(std::polar(r, 2.0 * M_PI * b / (4.0 * n)), v, dv);
      const double m = v.cwiseAbs().maxCoeff();
      if (!(m > 0.0)) return std::nullopt;
      for (int j = 0; j <= eta.k; ++j) worst[j] = std::min(worst[j], std::abs(v[j]) / m);
    }
  }
  const auto best = std::max_element(worst.begin(), worst.end());
  if (*best >= 0.5) return static_cast<int>(best - worst.begin());
  return std::nullopt;
}

PolydiscMap affine_disc(int k, int chart, const CVec& center, const CVec& direction, double radius) {
  if (k < 1 || k > 2 || chart < 0 || chart > k || center.size() != k || direction.size() != k) {
    throw Error(ErrorCode::InvalidArgument, "affine disc needs k coordinates and a chart in [0, k]");
  }
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "disc radius must be positive");
  PolydiscMap eta;
  eta.k = k;
  eta.radius = radius;
  eta.lift.resize(k + 1);
  int a = 0;
  for (int i = 0; i <= k; ++i) {
    if (i == chart) {
      eta.lift[i] = {1.0};
    } else {
      eta.lift[i] = {center[a], direction[a]};
      ++a;
    }
  }
  eta.bounded_certificate = certify_bounded(eta);
  return eta;
}

PolydiscMap constant_disc(const HomogeneousPoint& p, double radius) {
  PolydiscMap eta;
  eta.k = p.dim();
  eta.radius = radius;
  for (int i = 0; i <= eta.k; ++i) eta.lift.push_back({p[i]});
  eta.bounded_certificate = certify_bounded(eta);
  return eta;
}

QuadratureGrid QuadratureGrid::polar(int n_r, int n_theta, double radius) {
  if (n_r < 1 || n_theta < 1 || !(radius > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "grid needs positive node counts and radius");
  }
  QuadratureGrid g;
  g.n_r = n_r;
  g.n_theta = n_theta;
  g.radius = radius;
  const double dr = radius / n_r;
  const double dth = 2.0 * M_PI / n_theta;
  g.nodes.reserve(static_cast<std::size_t>(n_r) * n_theta);
  g.weights.reserve(g.nodes.capacity());
  for (int i = 0; i < n_r; ++i) {
    const double r = (i + 0.5) * dr;
    for (int j = 0; j < n_theta; ++j) {
      g.nodes.push_back(std::polar(r, (j + 0.5) * dth));
      g.weights.push_back(r * dr * dth);
    }
  }
  return g;
}

double QuadratureGrid::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double curve_area(const ProjectiveMap& f, int m, const PolydiscMap& eta, const QuadratureGrid& grid) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "iterate count must be non-negative");
  if (eta.k != f.k()) throw Error(ErrorCode::InvalidArgument, "disc and map dimensions differ");
  if (eta.l != 1) throw Error(ErrorCode::InvalidArgument, "only curves (l = 1) are quadratured");
  if (eta.is_constant()) return 0.0;
  double total = 0.0;
  CVec v, dv;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    eta.eval(grid.nodes[i], v, dv);
    const double s = v.cwiseAbs().maxCoeff();
    v /= s;
    dv /= s;
    push_forward(f, m, v, dv);
    total += grid.weights[i] * area_density(v, dv);
  }
  return total;
}

double polydisc_volume(const ProjectiveMap& f, int m, const PolydiscMap& eta,
                       const QuadratureGrid& grid) {
  const double full = curve_area(f, m, eta, grid);
  const QuadratureGrid coarse =
      QuadratureGrid::polar(std::max(1, grid.n_r / 2), std::max(1, grid.n_theta / 2), grid.radius);
  const double half = curve_area(f, m, eta, coarse);
  if (std::abs(full - half) > kQuadratureSlack * std::max(std::abs(full), 1e-300) &&
      std::abs(full - half) > 1e-14) {
    throw Error(ErrorCode::QuadratureUnstable, "grid and half-resolution areas differ by more than 5%");
  }
  return full;
}

GrowthResult growth_check(const ProjectiveMap& f, int m, const PolydiscMap& eta,
                          const QuadratureGrid& grid) {
  if (!eta.bounded_certificate) throw Error(ErrorCode::NotBounded, "disc has no boundedness certificate");
  if (eta.radius < 1.0) throw Error(ErrorCode::InvalidArgument, "disc must be defined on D(1) at least");
  GrowthResult g;
  g.bound = std::pow(static_cast<double>(f.degree()), eta.l * m);
  int n_r = grid.n_r;
  int n_t = grid.n_theta;
  while (true) {
    try {
      g.volume = polydisc_volume(f, m, eta, QuadratureGrid::polar(n_r, n_t, 1.0));
      g.resolution = std::max(n_r, n_t);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::QuadratureUnstable || std::max(n_r, n_t) >= 4096) throw;
      n_r *= 2;
      n_t *= 2;
    }
  }
  g.ratio = g.volume / g.bound;
  g.pass = g.ratio <= 1.0 + kQuadratureSlack;
  return g;
}

GreenResult green_potential(const ProjectiveMap& f, const CVec& lift, int n_iter) {
  if (n_iter < 1) throw Error(ErrorCode::InvalidArgument, "n_iter must be at least 1");
  const double d = f.degree();
  double s = lift.cwiseAbs().maxCoeff();
  if (!(s > 0.0)) throw Error(ErrorCode::ZeroVector, "zero lift");
  GreenResult g;
  g.value = std::log(s);
  CVec v = lift / s;
  double w = 1.0;
  double cmax = 0.0;
  for (int n = 0; n < n_iter; ++n) {
    v = f.eval_lift(v);
    s = v.cwiseAbs().maxCoeff();
    const double c = std::log(s);
    if (!std::isfinite(c)) throw Error(ErrorCode::NonConvergent, "lift escaped to zero or infinity");
    v /= s;
    w /= d;
    cmax = std::max(cmax, std::abs(c));
    const double inc = w * c;
    // increments must stay under the (2/d)^n envelope set by the bounded step sizes
    if (std::abs(inc) > std::pow(2.0 / d, n) * cmax / d * (1.0 + 1e-12)) {
      throw Error(ErrorCode::NonConvergent, "increments do not contract");
    }
    g.value += inc;
    g.increments.push_back(inc);
    g.iterations = n + 1;
    // a single small step is not enough: the bound on the remaining tail must be small too
    if (std::abs(inc) < 1e-10 && w * std::max(cmax, 1.0) < 1e-10) {
      g.converged = true;
      break;
    }
  }
  return g;
}

GreenResult green_potential(const ProjectiveMap& f, const HomogeneousPoint& p, int n_iter) {
  return green_potential(f, p.coords(), n_iter);
}

PullbackResidual pullback_identity_residual(const ProjectiveMap& f, int m, const PolydiscMap& eta,
                                            const QuadratureGrid& grid) {
  PullbackResidual r;
  if (eta.is_constant()) return r;
  r.volume_m = polydisc_volume(f, m, eta, grid);
  r.green_term = polydisc_volume(f, m + 6, eta, grid) / std::pow(static_cast<double>(f.degree()), 6);

  // Stokes: integral of dd^c u over D(R) is (R / 2 pi) times the boundary integral of du/dr.
  const double radius = grid.radius;
  const int nb = 4 * grid.n_theta;
  const double h = 1e-5 * radius;
  CVec v, dv;
  double sum = 0.0;
  for (int j = 0; j < nb; ++j) {
    const double th = 2.0 * M_PI * j / nb;
    eta.eval(std::polar(radius + h, th), v, dv);
    const double up = potential_after(f, m, v / v.cwiseAbs().maxCoeff());
    eta.eval(std::polar(radius - h, th), v, dv);
    const double um = potential_after(f, m, v / v.cwiseAbs().maxCoeff());
    sum += (up - um) / (2.0 * h);
  }
  r.boundary_term = radius * sum / nb;
  r.residual = std::abs(r.volume_m - r.green_term - r.boundary_term);
  return r;
}

}  // namespace cpkdim
