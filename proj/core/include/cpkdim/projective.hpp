#pragma once

#include <string>
#include <vector>

#include "cpkdim/polynomial.hpp"

namespace cpkdim {

/// Chordal distance below which two projective points are considered equal.
inline constexpr double kPointEqualityTol = 1e-10;

/// A point of CP^k stored with max-modulus coordinate equal to one.
class HomogeneousPoint {
 public:
  HomogeneousPoint() = default;

  /// Scales `raw` so that its largest coordinate has modulus one.
  /// Throws ErrorCode::ZeroVector when every entry is below the underflow threshold.
  static HomogeneousPoint normalize(const CVec& raw);
  static HomogeneousPoint normalize(std::initializer_list<cd> raw);

  int dim() const { return static_cast<int>(c_.size()) - 1; }
  const CVec& coords() const { return c_; }
  cd operator[](int i) const { return c_[i]; }
  int max_index() const;

  /// Affine coordinates in chart `chart` (the chart coordinate divided out and dropped).
  CVec affine(int chart) const;
  static HomogeneousPoint from_affine(const CVec& affine, int chart);

 private:
  explicit HomogeneousPoint(CVec c) : c_(std::move(c)) {}
  CVec c_;
};

inline HomogeneousPoint normalize(const CVec& raw) { return HomogeneousPoint::normalize(raw); }

/// Chordal (Fubini-Study sine) distance |p ^ q| / (|p| |q|), in [0, 1].
double fs_distance(const HomogeneousPoint& p, const HomogeneousPoint& q);
double fs_distance(const CVec& p, const CVec& q);

bool same_point(const HomogeneousPoint& p, const HomogeneousPoint& q);

enum class MapFamily { RationalK1, SkewProductK2, ProductK2, General };

std::string to_string(MapFamily f);
MapFamily family_from_string(const std::string& s);

/// Endomorphism f = [P_0 : ... : P_k] of CP^k by homogeneous polynomials of degree d.
class ProjectiveMap {
 public:
  ProjectiveMap() = default;
  /// Validates homogeneity, the family structure and the absence of common zeros.
  /// Throws ErrorCode::InvalidMap on failure.
  ProjectiveMap(std::string name, int k, int d, MapFamily family,
                std::vector<HomogeneousPolynomial> components);

  const std::string& name() const { return name_; }
  int k() const { return k_; }
  int degree() const { return d_; }
  MapFamily family() const { return family_; }
  const std::vector<HomogeneousPolynomial>& components() const { return comps_; }
  const HomogeneousPolynomial& component(int i) const { return comps_[i]; }
  long topological_degree() const;

  /// Components evaluated at a lift (no normalization).
  CVec eval_lift(const CVec& z) const;
  /// (k+1)x(k+1) matrix of partials dP_i/dz_j at a lift.
  CMat jacobian_lift(const CVec& z) const;
  void eval_with_jacobian(const CVec& z, CVec& value, CMat& jac) const;

 private:
  void validate() const;

  std::string name_;
  int k_ = 0;
  int d_ = 0;
  MapFamily family_ = MapFamily::General;
  std::vector<HomogeneousPolynomial> comps_;
  std::vector<std::vector<HomogeneousPolynomial>> partials_;  // [i][j] = dP_i/dz_j
};

/// Probabilistic common-zero witness: smallest max|P_i| seen over structured and random unit lifts.
double common_zero_witness(const ProjectiveMap& f, int random_samples, unsigned long long seed);

/// Throws ErrorCode::IndeterminatePoint when every component vanishes at p.
HomogeneousPoint evaluate(const ProjectiveMap& f, const HomogeneousPoint& p);

struct ChartJacobian {
  CMat matrix;  // k x k
  int source_chart = 0;
  int target_chart = 0;
};

/// Chart index kept from `preferred` while its coordinate has modulus >= threshold * max.
int select_chart(const HomogeneousPoint& p, int preferred, double threshold);

/// Derivative of the affinized map between the given charts (max-modulus charts when negative).
ChartJacobian chart_jacobian(const ProjectiveMap& f, const HomogeneousPoint& p,
                             int source_chart = -1, int target_chart = -1);

/// Density of f^* omega^k against omega^k at p; zero on the critical set.
double jacobian_density(const ProjectiveMap& f, const HomogeneousPoint& p);

/// Degree of the critical hypersurface, (d-1)(k+1).
int critical_degree(const ProjectiveMap& f);

}  // namespace cpkdim
