#pragma once

#include <optional>
#include <vector>

#include "cpkdim/projective.hpp"

namespace cpkdim {

/// Holomorphic disc s -> [eta_0(s) : ... : eta_k(s)] on D(radius), polynomial components.
struct PolydiscMap {
  int k = 1;
  int l = 1;
  double radius = 1.0;
  std::vector<std::vector<cd>> lift;  // lift[i][j]: coefficient of s^j in component i
  std::optional<int> bounded_certificate;

  void eval(cd s, CVec& value, CVec& derivative) const;
  bool is_constant() const;
};

/// Chart-affine disc: coordinate `chart` fixed to 1, the others center + s * direction.
/// Certifies boundedness on D(radius) when possible.
PolydiscMap affine_disc(int k, int chart, const CVec& center, const CVec& direction, double radius);
PolydiscMap constant_disc(const HomogeneousPoint& p, double radius);

/// Index of a chart j with |z_j| >= max|z| / 2 at every node of a sampling of D(radius), if any.
std::optional<int> certify_bounded(const PolydiscMap& eta, int n = 64);

/// Midpoint rule in polar coordinates on D(radius) with n_r radial by n_theta angular nodes.
struct QuadratureGrid {
  int n_r = 256;
  int n_theta = 256;
  double radius = 1.0;
  std::vector<cd> nodes;
  std::vector<double> weights;

  static QuadratureGrid polar(int n_r, int n_theta, double radius);
  double total_weight() const;
};

/// Fubini-Study area (total mass of omega equal to one) of s -> f^m(eta(s)) over the grid,
/// counted with multiplicity. No stability check.
double curve_area(const ProjectiveMap& f, int m, const PolydiscMap& eta, const QuadratureGrid& grid);

/// curve_area with a comparison against the half-resolution grid.
/// Throws QuadratureUnstable when the two differ by more than 5%.
double polydisc_volume(const ProjectiveMap& f, int m, const PolydiscMap& eta,
                       const QuadratureGrid& grid);

struct GrowthResult {
  double volume = 0.0;
  double bound = 0.0;  // d^(l m)
  double ratio = 0.0;
  bool pass = false;
  int resolution = 0;
};

inline constexpr double kQuadratureSlack = 0.05;

/// Volume over the unit disc against d^(l m). The grid's node counts are a starting resolution,
/// doubled up to 4096 while the quadrature is unstable. Throws NotBounded without a certificate.
GrowthResult growth_check(const ProjectiveMap& f, int m, const PolydiscMap& eta,
                          const QuadratureGrid& grid);

struct GreenResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> increments;
};

/// lim d^-n log |F^n(z)| with sup-norm lifts, renormalized every step. Stops once an increment
/// and the tail envelope d^-n max(1, max|log step|) both drop below 1e-10. Throws NonConvergent on non-finite or non-contracting increments.
GreenResult green_potential(const ProjectiveMap& f, const CVec& lift, int n_iter = 60);
GreenResult green_potential(const ProjectiveMap& f, const HomogeneousPoint& p, int n_iter = 60);

struct PullbackResidual {
  double residual = 0.0;
  double volume_m = 0.0;       // area of f^m o eta
  double green_term = 0.0;     // d^m times the area under T_{m+6}
  double boundary_term = 0.0;  // integral of dd^c(phi o f^m) via Stokes
};

/// Checks f^{m*} omega = d^m T + dd^c(phi o f^m) on a curve with T replaced by
/// d^-(m+6) f^{(m+6)*} omega and phi by the matching finite-level potential.
PullbackResidual pullback_identity_residual(const ProjectiveMap& f, int m, const PolydiscMap& eta,
                                            const QuadratureGrid& grid);

}  // namespace cpkdim
