#include "cpkdim/projective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cpkdim/error.hpp"

namespace cpkdim {

namespace {

constexpr double kUnderflow = 1e-300;

// Sylvester resultant of two binary forms of degree d, each scaled to unit max coefficient.
// Coefficients are indexed by the exponent of the first variable.
double normalized_resultant(std::vector<cd> a, std::vector<cd> b) {
  auto scale = [](std::vector<cd>& v) {
    double m = 0.0;
    for (auto c : v) m = std::max(m, std::abs(c));
    if (m > 0.0) {
      for (auto& c : v) c /= m;
    }
  };
  scale(a);
  scale(b);
  const int d = static_cast<int>(a.size()) - 1;
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  for (int r = 0; r < d; ++r) {
    for (int j = 0; j <= d; ++j) {
      s(r, r + j) = a[d - j];
      s(d + r, r + j) = b[d - j];
    }
  }
  return std::abs(s.partialPivLu().determinant());
}

// Binary form coefficients of a polynomial in variables (u, v), indexed by exponent of u.
std::vector<cd> binary_coeffs(const HomogeneousPolynomial& p, int u, int v, int d) {
  std::vector<cd> c(d + 1, 0.0);
  for (const auto& t : p.terms()) {
    if (t.exps[u] + t.exps[v] != d) {
      throw Error(ErrorCode::InvalidMap, "component is not a binary form in the base variables");
    }
    c[t.exps[u]] += t.coeff;
  }
  return c;
}

}  // namespace

HomogeneousPoint HomogeneousPoint::normalize(const CVec& raw) {
  if (raw.size() < 2 || raw.size() > kMaxCoords) {
    throw Error(ErrorCode::InvalidArgument, "point must have 2 or 3 homogeneous coordinates");
  }
  int imax = 0;
  double m = 0.0;
  for (int i = 0; i < raw.size(); ++i) {
    const double a = std::abs(raw[i]);
    if (!std::isfinite(a)) throw Error(ErrorCode::ZeroVector, "non-finite coordinate");
    if (a > m) {
      m = a;
      imax = i;
    }
  }
  if (m < kUnderflow) throw Error(ErrorCode::ZeroVector, "all coordinates vanish");
  if (std::abs(m - 1.0) <= 4 * std::numeric_limits<double>::epsilon()) return HomogeneousPoint(raw);
  CVec c = raw / m;
  c[imax] /= std::abs(c[imax]);
  return HomogeneousPoint(std::move(c));
}

HomogeneousPoint HomogeneousPoint::normalize(std::initializer_list<cd> raw) {
  CVec v(static_cast<Eigen::Index>(raw.size()));
  int i = 0;
  for (auto c : raw) v[i++] = c;
  return normalize(v);
}

int HomogeneousPoint::max_index() const {
  int imax = 0;
  double m = -1.0;
  for (int i = 0; i < c_.size(); ++i) {
    const double a = std::abs(c_[i]);
    if (a > m) {
      m = a;
      imax = i;
    }
  }
  return imax;
}

CVec HomogeneousPoint::affine(int chart) const {
  CVec z(dim());
  int j = 0;
  for (int i = 0; i < c_.size(); ++i) {
    if (i != chart) z[j++] = c_[i] / c_[chart];
  }
  return z;
}

HomogeneousPoint HomogeneousPoint::from_affine(const CVec& affine, int chart) {
  CVec c(affine.size() + 1);
  int j = 0;
  for (int i = 0; i < c.size(); ++i) c[i] = (i == chart) ? cd(1.0) : affine[j++];
  return normalize(c);
}

double fs_distance(const CVec& p, const CVec& q) {
  double wedge = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    for (int j = i + 1; j < p.size(); ++j) wedge += std::norm(p[i] * q[j] - p[j] * q[i]);
  }
  const double d = std::sqrt(wedge / (p.squaredNorm() * q.squaredNorm()));
  return std::min(d, 1.0);
}

double fs_distance(const HomogeneousPoint& p, const HomogeneousPoint& q) {
  return fs_distance(p.coords(), q.coords());
}

bool same_point(const HomogeneousPoint& p, const HomogeneousPoint& q) {
  return fs_distance(p, q) < kPointEqualityTol;
}

std::string to_string(MapFamily f) {
  switch (f) {
    case MapFamily::RationalK1: return "rational_k1";
    case MapFamily::SkewProductK2: return "skew_product_k2";
    case MapFamily::ProductK2: return "product_k2";
    case MapFamily::General: return "general";
  }
  return "general";
}

MapFamily family_from_string(const std::string& s) {
  if (s == "rational_k1") return MapFamily::RationalK1;
  if (s == "skew_product_k2") return MapFamily::SkewProductK2;
  if (s == "product_k2") return MapFamily::ProductK2;
  if (s == "general") return MapFamily::General;
  throw Error(ErrorCode::InvalidMap, "unknown family '" + s + "'");
}

ProjectiveMap::ProjectiveMap(std::string name, int k, int d, MapFamily family,
                             std::vector<HomogeneousPolynomial> components)
    : name_(std::move(name)), k_(k), d_(d), family_(family), comps_(std::move(components)) {
  validate();
  partials_.resize(k_ + 1);
  for (int i = 0; i <= k_; ++i) {
    for (int j = 0; j <= k_; ++j) partials_[i].push_back(comps_[i].partial(j));
  }
}

long ProjectiveMap::topological_degree() const {
  long t = 1;
  for (int i = 0; i < k_; ++i) t *= d_;
  return t;
}

void ProjectiveMap::validate() const {
  if (k_ < 1 || k_ > 2) throw Error(ErrorCode::InvalidMap, "dimension k must be 1 or 2");
  if (d_ < 2 || d_ > kMaxDegree) throw Error(ErrorCode::InvalidMap, "degree must be in [2, 8]");
  if (static_cast<int>(comps_.size()) != k_ + 1) {
    throw Error(ErrorCode::InvalidMap, "expected k+1 components");
  }
  for (int i = 0; i <= k_; ++i) {
    if (comps_[i].n_vars() != k_ + 1) throw Error(ErrorCode::InvalidMap, "wrong variable count");
    if (!comps_[i].is_homogeneous_of(d_)) {
      throw Error(ErrorCode::InvalidMap,
                  "component " + std::to_string(i) + " is not homogeneous of degree " +
                      std::to_string(d_));
    }
  }
  switch (family_) {
    case MapFamily::RationalK1:
      if (k_ != 1) throw Error(ErrorCode::InvalidMap, "rational_k1 requires k = 1");
      break;
    case MapFamily::SkewProductK2:
    case MapFamily::ProductK2:
      if (k_ != 2) throw Error(ErrorCode::InvalidMap, "skew/product families require k = 2");
      if (comps_[0].depends_on(1) || comps_[2].depends_on(1)) {
        throw Error(ErrorCode::InvalidMap, "base components P_0, P_2 must not depend on z_1");
      }
      if (family_ == MapFamily::ProductK2 &&
          (comps_[1].depends_on(0) || comps_[2].depends_on(0))) {
        throw Error(ErrorCode::InvalidMap, "product maps need P_1(z_1, z_2) and P_2(z_2)");
      }
      break;
    case MapFamily::General:
      break;
  }

  // resultant-style witnesses for the absence of common zeros
  constexpr double kResTol = 1e-10;
  if (k_ == 1) {
    const double r = normalized_resultant(binary_coeffs(comps_[0], 0, 1, d_),
                                          binary_coeffs(comps_[1], 0, 1, d_));
    if (r < kResTol) throw Error(ErrorCode::InvalidMap, "components share a common zero");
  } else if (family_ != MapFamily::General) {
    const double r = normalized_resultant(binary_coeffs(comps_[0], 0, 2, d_),
                                          binary_coeffs(comps_[2], 0, 2, d_));
    if (r < kResTol) throw Error(ErrorCode::InvalidMap, "base components share a common zero");
    cd lead = 0.0;
    for (const auto& t : comps_[1].terms()) {
      if (t.exps[1] == d_) lead += t.coeff;
    }
    if (std::abs(lead) < kResTol * comps_[1].coeff_l1()) {
      throw Error(ErrorCode::InvalidMap, "fiber component lacks the z_1^d term");
    }
  }
  if (common_zero_witness(*this, 256, 0x5eedULL) < 1e-10) {
    throw Error(ErrorCode::InvalidMap, "components vanish simultaneously at a sampled point");
  }
}

CVec ProjectiveMap::eval_lift(const CVec& z) const {
  const PowerTable pw(z, d_);
  CVec v(k_ + 1);
  for (int i = 0; i <= k_; ++i) v[i] = comps_[i].eval(pw);
  return v;
}

CMat ProjectiveMap::jacobian_lift(const CVec& z) const {
  CVec v;
  CMat j;
  eval_with_jacobian(z, v, j);
  return j;
}

void ProjectiveMap::eval_with_jacobian(const CVec& z, CVec& value, CMat& jac) const {
  const PowerTable pw(z, d_);
  value.resize(k_ + 1);
  jac.resize(k_ + 1, k_ + 1);
  for (int i = 0; i <= k_; ++i) {
    value[i] = comps_[i].eval(pw);
    for (int j = 0; j <= k_; ++j) jac(i, j) = partials_[i][j].eval(pw);
  }
}

double common_zero_witness(const ProjectiveMap& f, int random_samples, unsigned long long seed) {
  const int n = f.k() + 1;
  double scale = 0.0;
  for (const auto& c : f.components()) scale = std::max(scale, c.coeff_l1());
  double best = std::numeric_limits<double>::infinity();
  auto probe = [&](const CVec& u) {
    const CVec v = f.eval_lift(u / u.cwiseAbs().maxCoeff());
    best = std::min(best, v.cwiseAbs().maxCoeff() / scale);
  };
  for (int i = 0; i < n; ++i) {
    CVec e = CVec::Zero(n);
    e[i] = 1.0;
    probe(e);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int s = 0; s < random_samples; ++s) {
    CVec u(n);
    for (int i = 0; i < n; ++i) u[i] = cd(g(rng), g(rng));
    probe(u);
  }
  return best;
}

HomogeneousPoint evaluate(const ProjectiveMap& f, const HomogeneousPoint& p) {
  if (p.dim() != f.k()) throw Error(ErrorCode::InvalidArgument, "point dimension mismatch");
  const CVec v = f.eval_lift(p.coords());
  double scale = 0.0;
  for (const auto& c : f.components()) scale = std::max(scale, c.coeff_l1());
  if (v.cwiseAbs().maxCoeff() < 1e-14 * scale) {
    throw Error(ErrorCode::IndeterminatePoint, "all components vanish");
  }
  return HomogeneousPoint::normalize(v);
}

int select_chart(const HomogeneousPoint& p, int preferred, double threshold) {
  if (preferred >= 0 && preferred <= p.dim()) {
    const double m = p.coords().cwiseAbs().maxCoeff();
    if (std::abs(p[preferred]) >= threshold * m) return preferred;
  }
  return p.max_index();
}

ChartJacobian chart_jacobian(const ProjectiveMap& f, const HomogeneousPoint& p, int source_chart,
                             int target_chart) {
  const int k = f.k();
  if (p.dim() != k) throw Error(ErrorCode::InvalidArgument, "point dimension mismatch");
  const int c = source_chart < 0 ? p.max_index() : source_chart;
  if (std::abs(p[c]) < 1e-300) throw Error(ErrorCode::ChartDegenerate, "source chart coordinate is zero");
  const CVec lift = p.coords() / p[c];
  CVec val;
  CMat dp;
  f.eval_with_jacobian(lift, val, dp);
  const double vmax = val.cwiseAbs().maxCoeff();
  int t = target_chart;
  if (t < 0) {
    val.cwiseAbs().maxCoeff(&t);
  } else if (std::abs(val[t]) < 1e-8 * vmax) {
    throw Error(ErrorCode::ChartDegenerate, "target chart coordinate vanishes at the image");
  }
  ChartJacobian out;
  out.source_chart = c;
  out.target_chart = t;
  out.matrix.resize(k, k);
  const cd pt = val[t];
  int r = 0;
  for (int i = 0; i <= k; ++i) {
    if (i == t) continue;
    int col = 0;
    for (int j = 0; j <= k; ++j) {
      if (j == c) continue;
      out.matrix(r, col) = (dp(i, j) * pt - val[i] * dp(t, j)) / (pt * pt);
      ++col;
    }
    ++r;
  }
  return out;
}

double jacobian_density(const ProjectiveMap& f, const HomogeneousPoint& p) {
  const ChartJacobian cj = chart_jacobian(f, p);
  const int k = f.k();
  const CVec lift = p.coords() / p[cj.source_chart];
  const CVec img = f.eval_lift(lift);
  const double src = lift.squaredNorm();                                   // 1 + |z|^2
  const double dst = img.squaredNorm() / std::norm(img[cj.target_chart]);  // 1 + |f(z)|^2
  const double det2 = std::norm(cj.matrix.determinant());
  return det2 * std::pow(src / dst, k + 1);
}

int critical_degree(const ProjectiveMap& f) { return (f.degree() - 1) * (f.k() + 1); }

}  // namespace cpkdim
