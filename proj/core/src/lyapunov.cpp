#include "cpkdim/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "cpkdim/error.hpp"
#include "cpkdim/parallel.hpp"

namespace cpkdim {

CocycleAccumulator::CocycleAccumulator(int k) : q_(CMat::Identity(k, k)), sums_(k, 0.0) {}

void CocycleAccumulator::push(const CMat& m) {
  const CMat a = m * q_;
  const int k = static_cast<int>(a.rows());
  if (k == 1) {
    const double r = std::abs(a(0, 0));
    sums_[0] += std::log(r);
    q_(0, 0) = a(0, 0) / r;
    return;
  }
  // modified Gram-Schmidt, positive real diagonal
  CMat q(k, k);
  for (int j = 0; j < k; ++j) {
    CVec v = a.col(j);
    for (int i = 0; i < j; ++i) v -= q.col(i).dot(v) * q.col(i);
    for (int i = 0; i < j; ++i) v -= q.col(i).dot(v) * q.col(i);
    const double r = v.norm();
    sums_[j] += std::log(r);
    q.col(j) = v / r;
  }
  q_ = q;
}

CMat fs_metric_factor(const CVec& z) {
  const int k = static_cast<int>(z.size());
  const double s = 1.0 + z.squaredNorm();
  CMat g = (s * CMat::Identity(k, k) - z * z.adjoint()) / (s * s);
  Eigen::LLT<CMat> llt(g);
  return llt.matrixU();
}

std::vector<double> orbit_exponents(const ProjectiveMap& f, const std::vector<HomogeneousPoint>& orbit,
                                    double chart_threshold) {
  const int k = f.k();
  const int n = static_cast<int>(orbit.size()) - 1;
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "orbit needs at least one step");
  CocycleAccumulator acc(k);
  int chart = orbit[0].max_index();
  acc.push(fs_metric_factor(orbit[0].affine(chart)).inverse());
  for (int j = 0; j < n; ++j) {
    const int next = select_chart(orbit[j + 1], chart, chart_threshold);
    const ChartJacobian cj = chart_jacobian(f, orbit[j], chart, next);
    const CVec lift = orbit[j].coords() / orbit[j][chart];
    const CVec img = f.eval_lift(lift);
    const double ratio = lift.squaredNorm() * std::norm(img[next]) / img.squaredNorm();
    const double density = std::norm(cj.matrix.determinant()) * std::pow(ratio, k + 1);
    if (!(density >= 1e-24)) throw Error(ErrorCode::CriticalOrbit, "orbit passes near the critical set");
    acc.push(cj.matrix);
    chart = next;
  }
  acc.push(fs_metric_factor(orbit[n].affine(chart)));
  std::vector<double> out = acc.log_sums();
  for (double& v : out) v /= n;
  return out;
}

int smallest_cluster_size(const std::vector<double>& lambda, double tol) {
  if (lambda.empty()) return 0;
  const double lk = *std::min_element(lambda.begin(), lambda.end());
  return static_cast<int>(
      std::count_if(lambda.begin(), lambda.end(), [&](double l) { return l - lk <= tol; }));
}

LyapunovSpectrum lyapunov_spectrum(const ProjectiveMap& f, const EmpiricalMeasure& cloud,
                                   const LyapunovOptions& opt) {
  if (opt.n_steps < kMinLyapunovSteps || opt.n_orbits < 2) {
    throw Error(ErrorCode::InvalidArgument, "need n_steps >= 100 and at least two orbits");
  }
  if (cloud.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty cloud");
  const int k = f.k();
  const PreimageSolver solver(f);
  std::vector<std::vector<double>> per_orbit(opt.n_orbits);
  std::vector<char> ok(opt.n_orbits, 0);
  parallel_for(static_cast<std::size_t>(opt.n_orbits), opt.threads, [&](std::size_t i) {
    std::mt19937_64 rng(stream_seed(opt.seed, i));
    const HomogeneousPoint& start = cloud.points[uniform_index(rng, cloud.size())];
    try {
      BackwardWalk walk = backward_walk(solver, start, opt.n_steps, rng, true);
      std::reverse(walk.path.begin(), walk.path.end());
      per_orbit[i] = orbit_exponents(f, walk.path, opt.chart_threshold);
      ok[i] = 1;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CriticalOrbit && e.code() != ErrorCode::DegenerateFiber &&
          e.code() != ErrorCode::ChartDegenerate) {
        throw;
      }
    }
  });

  LyapunovSpectrum s;
  s.n_steps = opt.n_steps;
  std::vector<std::vector<double>> kept;
  for (int i = 0; i < opt.n_orbits; ++i) {
    if (ok[i]) {
      std::vector<double> v = per_orbit[i];
      std::sort(v.begin(), v.end(), std::greater<>());
      kept.push_back(std::move(v));
    }
  }
  s.n_orbits = static_cast<int>(kept.size());
  s.dropped_orbits = opt.n_orbits - s.n_orbits;
  if (kept.empty()) throw Error(ErrorCode::CriticalOrbit, "every orbit was dropped");
  const double m = static_cast<double>(kept.size());
  // mean and standard error of the per-orbit average of exponents lo..hi-1
  auto estimate = [&](int lo, int hi) {
    std::vector<double> x;
    for (const auto& v : kept) x.push_back(std::accumulate(v.begin() + lo, v.begin() + hi, 0.0) / (hi - lo));
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / m;
    double ss = 0.0;
    for (double xi : x) ss += (xi - mean) * (xi - mean);
    return std::pair{mean, kept.size() > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0};
  };
  s.lambda.assign(k, 0.0);
  s.std_error.assign(k, 0.0);
  for (int i = 0; i < k; ++i) std::tie(s.lambda[i], s.std_error[i]) = estimate(i, i + 1);
  // a cluster of near-equal exponents is reported as its mean, since sorting per orbit biases its ends
  for (int lo = 0; lo < k;) {
    int hi = lo + 1;
    while (hi < k && s.lambda[hi - 1] - s.lambda[hi] < opt.cluster_tol) ++hi;
    if (hi - lo > 1) {
      const auto [mean, se] = estimate(lo, hi);
      for (int i = lo; i < hi; ++i) {
        s.lambda[i] = mean;
        s.std_error[i] = se;
      }
    }
    s.multiplicity_k = hi - lo;
    lo = hi;
  }
  return s;
}

IdentityResidual jacobian_identity_residual(const ProjectiveMap& f, const EmpiricalMeasure& cloud,
                                            const LyapunovSpectrum& spectrum) {
  double wsum = 0.0, mean = 0.0, m2 = 0.0;
  std::size_t critical = 0, used = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double jd = jacobian_density(f, cloud.points[i]);
    if (!(jd >= 1e-300)) {
      ++critical;
      continue;
    }
    const double w = cloud.weights[i];
    const double x = std::log(jd);
    // weighted Welford update
    wsum += w;
    const double delta = x - mean;
    mean += (w / wsum) * delta;
    m2 += w * delta * (x - mean);
    ++used;
  }
  if (cloud.size() == 0 || static_cast<double>(critical) > 0.01 * static_cast<double>(cloud.size())) {
    throw Error(ErrorCode::NonIntegrable, "log Jac is not integrable against the cloud");
  }
  IdentityResidual r;
  r.log_jac_mean = mean;
  const double var = used > 1 ? m2 / wsum : 0.0;
  r.log_jac_stderr = used > 1 ? std::sqrt(var / static_cast<double>(used - 1)) : 0.0;
  double sum_l = 0.0, var_l = 0.0;
  for (std::size_t i = 0; i < spectrum.lambda.size(); ++i) {
    sum_l += spectrum.lambda[i];
    const double se = i < spectrum.std_error.size() ? spectrum.std_error[i] : 0.0;
    var_l += se * se;
  }
  r.residual = std::abs(mean - 2.0 * sum_l);
  r.sigma = std::sqrt(r.log_jac_stderr * r.log_jac_stderr + 4.0 * var_l) + 1e-10;
  return r;
}

BriendDuvalResult briend_duval_check(const LyapunovSpectrum& spectrum, int d) {
  if (spectrum.lambda.empty()) throw Error(ErrorCode::InvalidArgument, "empty spectrum");
  const double lk = spectrum.lambda.back();
  const double se = spectrum.std_error.empty() ? 0.0 : spectrum.std_error.back();
  const double floor = 0.5 * std::log(static_cast<double>(d));
  return {lk >= floor - 3.0 * se, lk - floor};
}

}  // namespace cpkdim
