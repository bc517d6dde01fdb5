#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "cpkdim/projective.hpp"
#include "cpkdim/sampler.hpp"

namespace cpkdim {

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

/// Minimum number of samples a ball needs before its radius enters a fit.
inline constexpr int kMinBallCount = 20;

struct RadiusLadder {
  std::vector<double> r_values;  // strictly decreasing
  int fit_lo = 0;                // inclusive indices into r_values
  int fit_hi = 0;

  static RadiusLadder geometric(double r_max = 0.1, double rho = 0.8, int j_max = 20);
};

struct DimensionEstimate {
  double slope = 0.0;
  double ci95 = 0.0;
  int n_centers = 1;
  RadiusLadder ladder;
  /// Min and max slope over length-5 sub-windows of the fit range.
  double lower = 0.0;
  double upper = 0.0;
  /// Set when no plateau was found and the whole usable prefix was fitted.
  bool plateau_fallback = false;
};

/// Log-log fit of ball mass against radius. `mass[j]` and `count[j]` belong to ladder radius j;
/// `trials` is the sample size behind the masses (for binomial error bars).
/// Uses the longest window of at least three radii whose local slopes agree with the window
/// slope up to 25% plus two binomial standard errors. Throws EmptyBall below three usable radii.
DimensionEstimate fit_scaling(const RadiusLadder& ladder, const std::vector<double>& mass,
                              const std::vector<long>& count, double trials);

/// Squared chordal distance; cheaper than fs_distance when only comparisons are needed.
double fs_distance2(const CVec& p, const CVec& q);

/// Pointwise dimension at x. `exclude` removes one cloud index (the center itself) from counts.
DimensionEstimate local_dimension(const EmpiricalMeasure& cloud, const HomogeneousPoint& x,
                                  const RadiusLadder& ladder,
                                  std::size_t exclude = kNoIndex);

/// Correlation dimension from all pairs when there are at most `max_pairs`, otherwise from
/// `max_pairs` seeded random pairs.
DimensionEstimate correlation_dimension(const EmpiricalMeasure& cloud, const RadiusLadder& ladder,
                                        std::uint64_t seed = 1, std::size_t max_pairs = 10'000'000,
                                        int threads = 1);

/// Forward orbits of every cloud point, stored once so many dynamical balls can be counted.
class DynamicalBallCounter {
 public:
  DynamicalBallCounter(const ProjectiveMap& f, const EmpiricalMeasure& cloud, int n, int threads = 1);

  int n() const { return n_; }
  const ProjectiveMap& map() const { return *f_; }
  /// Weight of cloud points whose orbit stays within xi of the orbit of x for q = 0..m.
  /// Returns masses for every m in 0..n.
  std::vector<double> masses(const HomogeneousPoint& x, double xi, std::size_t exclude = kNoIndex) const;
  std::vector<long> counts(const HomogeneousPoint& x, double xi, std::size_t exclude = kNoIndex) const;

 private:
  template <class Acc>
  void scan(const HomogeneousPoint& x, double xi, std::size_t exclude, Acc&& acc) const;

  const ProjectiveMap* f_;
  const EmpiricalMeasure* cloud_;
  int n_;
  std::vector<CVec> orbits_;  // row-major: point i, step q at i * (n+1) + q
};

struct EntropyEstimate {
  double value = 0.0;
  int n = 0;
  double xi = 0.0;
  long count0 = 0;
  long count_n = 0;
  /// No sample survived: value is the lower bound (1/n) log count0.
  bool lower_bound = false;
};

/// Largest n with count0 * d^(-k n) >= target, at least 1.
int auto_entropy_steps(long count0, int d, int k, double target = 30.0);

/// Local entropy -(1/n) log(nu(B_n(x, xi)) / nu(B_0(x, xi))). n <= 0 selects auto_entropy_steps,
/// capped by the counter's orbit length. Throws EmptyDynamicalBall when B_0 is empty.
EntropyEstimate brin_katok_entropy(const DynamicalBallCounter& counter, const HomogeneousPoint& x,
                                   double xi, int n = 0, std::size_t exclude = kNoIndex);
EntropyEstimate brin_katok_entropy(const ProjectiveMap& f, const EmpiricalMeasure& cloud,
                                   const HomogeneousPoint& x, double xi, int n);

struct BoundInputs {
  int d = 2;
  int k = 1;
  int p = 1;
  std::vector<double> lambda;  // descending, size k
  double h = 0.0;

  double lambda1() const { return lambda.front(); }
  double lambdak() const { return lambda.back(); }
};

/// Throws InvalidArgument unless 1 <= p <= k, lambda is positive, descending and of size k,
/// and 0 <= h <= k log d (up to 1e-12).
void validate(const BoundInputs& b);

/// ((k-p) log d) / lambda_1 + (h - (k-p) log d) / lambda_k.
double theorem_a_bound(const BoundInputs& b);
/// True when h < (k-p) log d, where the second term of the bound turns negative.
bool entropy_below_floor(const BoundInputs& b);

struct CorollaryValues {
  double corA = 0.0;
  double conjecture = 0.0;
  bool corC1_ok = false;
  double phi = 0.0;
};

CorollaryValues corollary_values(const BoundInputs& b);

}  // namespace cpkdim
