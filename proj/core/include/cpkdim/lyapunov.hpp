#pragma once

#include <cstdint>
#include <vector>

#include "cpkdim/projective.hpp"
#include "cpkdim/sampler.hpp"

namespace cpkdim {

struct LyapunovSpectrum {
  std::vector<double> lambda;  // descending, nats per iteration
  std::vector<double> std_error;
  int n_steps = 0;
  int n_orbits = 0;
  int dropped_orbits = 0;
  /// Size of the cluster containing the smallest exponent.
  int multiplicity_k = 1;
};

inline constexpr int kMinLyapunovSteps = 100;

struct LyapunovOptions {
  int n_steps = 1000;
  int n_orbits = 200;
  std::uint64_t seed = 1;
  double chart_threshold = 0.5;
  int threads = 1;
  double cluster_tol = 0.02;
};

/// Running QR of a k x k complex matrix cocycle.
class CocycleAccumulator {
 public:
  explicit CocycleAccumulator(int k);

  /// Replaces the frame by the Q factor of m * frame and accumulates log|R_ii|.
  void push(const CMat& m);
  const CMat& frame() const { return q_; }
  const std::vector<double>& log_sums() const { return sums_; }

 private:
  CMat q_;
  std::vector<double> sums_;
};

/// Upper-triangular U with U^* U equal to the Fubini-Study metric matrix at affine point z.
CMat fs_metric_factor(const CVec& z);

/// Finite-time exponents along the orbit x_0, ..., x_n (x_{j+1} = f(x_j)), measured in the
/// Fubini-Study norm. Returns per-exponent log growth divided by n (QR order).
/// Throws CriticalOrbit when a step has Jacobian density below 1e-24.
std::vector<double> orbit_exponents(const ProjectiveMap& f, const std::vector<HomogeneousPoint>& orbit,
                                    double chart_threshold);

/// Each orbit starts at a cloud point, runs n_steps uniform preimage steps backwards and is then
/// traversed forward, which keeps it on the repeller. Orbits near the critical set are dropped.
/// Exponents closer than cluster_tol are reported as the cluster mean.
LyapunovSpectrum lyapunov_spectrum(const ProjectiveMap& f, const EmpiricalMeasure& cloud,
                                   const LyapunovOptions& opt);

/// Size of the cluster of exponents within `tol` of the smallest.
int smallest_cluster_size(const std::vector<double>& lambda, double tol);

struct IdentityResidual {
  double residual = 0.0;
  double log_jac_mean = 0.0;
  double log_jac_stderr = 0.0;
  /// Combined standard error of the two sides, floored at 1e-10.
  double sigma = 0.0;
};

/// |mean log Jac f over the cloud - 2 sum lambda_i|.
/// Throws NonIntegrable when more than 1% of the cloud sits on the critical set.
IdentityResidual jacobian_identity_residual(const ProjectiveMap& f, const EmpiricalMeasure& cloud,
                                            const LyapunovSpectrum& spectrum);

struct BriendDuvalResult {
  bool ok = false;
  double margin = 0.0;  // lambda_k - log sqrt(d)
};

BriendDuvalResult briend_duval_check(const LyapunovSpectrum& spectrum, int d);

}  // namespace cpkdim
