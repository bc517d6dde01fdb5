#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "cpkdim/projective.hpp"

namespace cpkdim {

/// Preimages closer than this (chordal) are treated as coalescing: the fiber is near-critical.
inline constexpr double kPreimageSeparationTol = 1e-4;
/// Every returned preimage maps onto the target within this chordal residual.
inline constexpr double kPreimageResidualTol = 1e-9;
/// Minimum recommended pullback depth before a cloud is treated as equidistributed.
inline constexpr int kDefaultBurnIn = 20;

struct PreimageSet {
  std::vector<HomogeneousPoint> points;
  std::vector<int> multiplicities;
  std::vector<double> residuals;

  long total_multiplicity() const;
};

/// Solves f(x) = y for the families with staged univariate structure.
/// Caches the coefficient layout of the map so repeated solves stay cheap.
class PreimageSolver {
 public:
  explicit PreimageSolver(const ProjectiveMap& f);

  /// Throws DegenerateFiber near critical values, UnsupportedFamily for general k=2 maps.
  PreimageSet solve(const HomogeneousPoint& y) const;

 private:
  struct FiberTerm {
    int e0, e2;
    cd coeff;
  };

  PreimageSet solve_k1(const HomogeneousPoint& y) const;
  PreimageSet solve_skew(const HomogeneousPoint& y) const;
  void finish(const HomogeneousPoint& y, PreimageSet& out) const;

  const ProjectiveMap* f_;
  std::vector<cd> base_a_;  // P_0 as binary form, indexed by exponent of the first base variable
  std::vector<cd> base_b_;  // P_1 (k=1) or P_2 (k=2)
  std::vector<std::vector<FiberTerm>> fiber_;  // fiber_[m]: terms of P_1 carrying z_1^m
};

PreimageSet preimages(const ProjectiveMap& f, const HomogeneousPoint& y);

struct CloudProvenance {
  HomogeneousPoint seed_point;
  int depth = 0;
  std::uint64_t rng_seed = 0;
  long aborted_walks = 0;
};

/// Weighted sample cloud standing in for an invariant measure.
struct EmpiricalMeasure {
  std::vector<HomogeneousPoint> points;
  std::vector<double> weights;
  CloudProvenance provenance;

  std::size_t size() const { return points.size(); }
  int k() const { return points.empty() ? 0 : points.front().dim(); }
};

EmpiricalMeasure uniform_measure(std::vector<HomogeneousPoint> points);

/// Backward orbit: path[0] = start and f(path[j+1]) = path[j], each step a uniform preimage.
/// Near-critical fibers are skipped by re-drawing the previous branch; `aborts` counts them.
struct BackwardWalk {
  std::vector<HomogeneousPoint> path;
  int aborts = 0;
};

BackwardWalk backward_walk(const PreimageSolver& solver, const HomogeneousPoint& start, int steps,
                           std::mt19937_64& rng, bool keep_path = true);

/// Pulls back the point mass at `a` along `count` independent uniform walks of `depth` levels.
/// Walk i uses its own stream derived from (seed, i), so the cloud does not depend on `threads`.
/// Throws ExceptionalSeed when the fiber over `a` is degenerate or more than 1% of walks abort.
EmpiricalMeasure sample_equilibrium(const ProjectiveMap& f, const HomogeneousPoint& a, int depth,
                                    std::size_t count, std::uint64_t seed, int threads = 1);

std::vector<HomogeneousPoint> forward_orbit(const ProjectiveMap& f, const HomogeneousPoint& x,
                                            int n);

/// Deterministic pseudo-random point of CP^k with coordinate moduli in [0.3, 1.7].
HomogeneousPoint generic_point(int k, std::uint64_t seed);

/// CSV with header re_0,im_0,...,re_k,im_k,weight; values printed with 17 significant digits.
void write_cloud_csv(const EmpiricalMeasure& m, const std::filesystem::path& path);
EmpiricalMeasure read_cloud_csv(const std::filesystem::path& path);

}  // namespace cpkdim
