#include "cpkdim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cpkdim/error.hpp"
#include "cpkdim/parallel.hpp"

namespace cpkdim {

namespace {

struct LineFit {
  double slope = 0.0;
  double se = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y, int lo, int hi) {
  const int n = hi - lo + 1;
  double mx = 0.0, my = 0.0;
  for (int j = lo; j <= hi; ++j) {
    mx += x[j];
    my += y[j];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int j = lo; j <= hi; ++j) {
    sxx += (x[j] - mx) * (x[j] - mx);
    sxy += (x[j] - mx) * (y[j] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  if (n > 2) {
    double rss = 0.0;
    for (int j = lo; j <= hi; ++j) {
      const double e = y[j] - my - f.slope * (x[j] - mx);
      rss += e * e;
    }
    f.se = std::sqrt(rss / (n - 2) / sxx);
  }
  return f;
}

// Squared radii in increasing order, for locating a distance on the ladder.
std::vector<double> ascending_r2(const RadiusLadder& ladder) {
  std::vector<double> a;
  for (auto it = ladder.r_values.rbegin(); it != ladder.r_values.rend(); ++it) a.push_back(*it * *it);
  return a;
}

// Number of ladder radii strictly larger than the distance with square d2.
inline int balls_containing(const std::vector<double>& asc_r2, double d2) {
  return static_cast<int>(asc_r2.end() - std::upper_bound(asc_r2.begin(), asc_r2.end(), d2));
}

// Turns a histogram of "contained in the first c balls" into per-ball totals.
template <class T>
std::vector<T> cumulate(const std::vector<T>& hist) {
  std::vector<T> out(hist.size(), T{});
  T run{};
  for (std::size_t j = hist.size(); j-- > 0;) {
    run += hist[j];
    out[j] = run;
  }
  return out;
}

}  // namespace

RadiusLadder RadiusLadder::geometric(double r_max, double rho, int j_max) {
  if (!(r_max > 0.0 && r_max <= 1.0) || !(rho > 0.0 && rho < 1.0) || j_max < 2) {
    throw Error(ErrorCode::InvalidArgument, "ladder needs r_max in (0,1], rho in (0,1), J >= 2");
  }
  RadiusLadder l;
  for (int j = 0; j <= j_max; ++j) l.r_values.push_back(r_max * std::pow(rho, j));
  l.fit_lo = 0;
  l.fit_hi = j_max;
  return l;
}

DimensionEstimate fit_scaling(const RadiusLadder& ladder, const std::vector<double>& mass,
                              const std::vector<long>& count, double trials) {
  const int nr = static_cast<int>(ladder.r_values.size());
  int usable = 0;
  while (usable < nr && count[usable] >= kMinBallCount && mass[usable] > 0.0) ++usable;
  if (usable < 3) throw Error(ErrorCode::EmptyBall, "fewer than three radii hold enough samples");

  std::vector<double> x(usable), y(usable), var(usable);
  for (int j = 0; j < usable; ++j) {
    x[j] = std::log(ladder.r_values[j]);
    y[j] = std::log(mass[j]);
    const double p = std::min(1.0, static_cast<double>(count[j]) / trials);
    var[j] = (1.0 - p) / static_cast<double>(count[j]);
  }
  std::vector<double> s(usable - 1), sig(usable - 1);
  for (int j = 0; j + 1 < usable; ++j) {
    const double dx = x[j + 1] - x[j];
    s[j] = (y[j + 1] - y[j]) / dx;
    sig[j] = std::sqrt(var[j] + var[j + 1]) / std::abs(dx);
  }

  DimensionEstimate est;
  est.ladder = ladder;
  int lo = 0, hi = usable - 1;
  bool found = false;
  for (int len = usable; len >= 3 && !found; --len) {
    for (int a = 0; a + len <= usable && !found; ++a) {
      const int b = a + len - 1;
      const double slope = least_squares(x, y, a, b).slope;
      bool flat = true;
      for (int j = a; j < b && flat; ++j) {
        flat = std::abs(s[j] - slope) <= 0.25 * std::abs(slope) + 2.0 * sig[j] + 1e-12;
      }
      if (flat) {
        lo = a;
        hi = b;
        found = true;
      }
    }
  }
  est.plateau_fallback = !found;
  est.ladder.fit_lo = lo;
  est.ladder.fit_hi = hi;
  const LineFit fit = least_squares(x, y, lo, hi);
  est.slope = std::max(0.0, fit.slope);
  est.ci95 = 1.96 * fit.se;
  est.lower = est.upper = est.slope;
  if (hi - lo + 1 >= 5) {
    est.lower = std::numeric_limits<double>::infinity();
    est.upper = -std::numeric_limits<double>::infinity();
    for (int a = lo; a + 4 <= hi; ++a) {
      const double sl = std::max(0.0, least_squares(x, y, a, a + 4).slope);
      est.lower = std::min(est.lower, sl);
      est.upper = std::max(est.upper, sl);
    }
  }
  return est;
}

double fs_distance2(const CVec& p, const CVec& q) {
  double wedge = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    for (int j = i + 1; j < p.size(); ++j) wedge += std::norm(p[i] * q[j] - p[j] * q[i]);
  }
  return wedge / (p.squaredNorm() * q.squaredNorm());
}

DimensionEstimate local_dimension(const EmpiricalMeasure& cloud, const HomogeneousPoint& x,
                                  const RadiusLadder& ladder, std::size_t exclude) {
  const std::vector<double> asc = ascending_r2(ladder);
  const int nr = static_cast<int>(asc.size());
  std::vector<double> wh(nr + 1, 0.0);
  std::vector<long> ch(nr + 1, 0);
  double wtot = 0.0;
  long n = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (i == exclude) continue;
    wtot += cloud.weights[i];
    ++n;
    const int c = balls_containing(asc, fs_distance2(x.coords(), cloud.points[i].coords()));
    if (c > 0) {
      wh[c - 1] += cloud.weights[i];
      ++ch[c - 1];
    }
  }
  std::vector<double> mass = cumulate(wh);
  const std::vector<long> count = cumulate(ch);
  mass.resize(nr);
  for (auto& m : mass) m /= wtot;
  return fit_scaling(ladder, mass, std::vector<long>(count.begin(), count.begin() + nr),
                     static_cast<double>(n));
}

DimensionEstimate correlation_dimension(const EmpiricalMeasure& cloud, const RadiusLadder& ladder,
                                        std::uint64_t seed, std::size_t max_pairs, int threads) {
  const std::size_t n = cloud.size();
  if (n < 2) throw Error(ErrorCode::EmptyBall, "correlation dimension needs at least two samples");
  const std::vector<double> asc = ascending_r2(ladder);
  const int nr = static_cast<int>(asc.size());
  const std::size_t all_pairs = n * (n - 1) / 2;
  const bool exhaustive = all_pairs <= max_pairs;
  const std::size_t blocks = exhaustive ? n : 64;
  std::vector<std::vector<double>> wh(blocks, std::vector<double>(nr + 1, 0.0));
  std::vector<std::vector<long>> ch(blocks, std::vector<long>(nr + 1, 0));
  std::vector<double> wsum(blocks, 0.0);
  auto add = [&](std::size_t b, std::size_t i, std::size_t j) {
    const double w = cloud.weights[i] * cloud.weights[j];
    wsum[b] += w;
    const int c = balls_containing(asc, fs_distance2(cloud.points[i].coords(), cloud.points[j].coords()));
    if (c > 0) {
      wh[b][c - 1] += w;
      ++ch[b][c - 1];
    }
  };
  parallel_for(blocks, threads, [&](std::size_t b) {
    if (exhaustive) {
      for (std::size_t j = b + 1; j < n; ++j) add(b, b, j);
      return;
    }
    std::mt19937_64 rng(stream_seed(seed, b));
    const std::size_t m = max_pairs * (b + 1) / blocks - max_pairs * b / blocks;
    for (std::size_t t = 0; t < m; ++t) {
      const std::size_t i = uniform_index(rng, n);
      std::size_t j = uniform_index(rng, n - 1);
      if (j >= i) ++j;
      add(b, i, j);
    }
  });
  std::vector<double> wt(nr + 1, 0.0);
  std::vector<long> ct(nr + 1, 0);
  double total = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    total += wsum[b];
    for (int j = 0; j <= nr; ++j) {
      wt[j] += wh[b][j];
      ct[j] += ch[b][j];
    }
  }
  std::vector<double> mass = cumulate(wt);
  std::vector<long> count = cumulate(ct);
  mass.resize(nr);
  count.resize(nr);
  for (auto& m : mass) m /= total;
  const double trials = static_cast<double>(exhaustive ? all_pairs : max_pairs);
  DimensionEstimate est = fit_scaling(ladder, mass, count, trials);
  est.n_centers = static_cast<int>(n);
  return est;
}

DynamicalBallCounter::DynamicalBallCounter(const ProjectiveMap& f, const EmpiricalMeasure& cloud,
                                           int n, int threads)
    : f_(&f), cloud_(&cloud), n_(n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "orbit length must be non-negative");
  const std::size_t stride = static_cast<std::size_t>(n) + 1;
  orbits_.resize(cloud.size() * stride);
  parallel_for(cloud.size(), threads, [&](std::size_t i) {
    HomogeneousPoint p = cloud.points[i];
    orbits_[i * stride] = p.coords();
    for (int q = 1; q <= n; ++q) {
      p = evaluate(f, p);
      orbits_[i * stride + q] = p.coords();
    }
  });
}

template <class Acc>
void DynamicalBallCounter::scan(const HomogeneousPoint& x, double xi, std::size_t exclude,
                                Acc&& acc) const {
  const std::vector<HomogeneousPoint> xo = forward_orbit(*f_, x, n_);
  const double xi2 = xi * xi;
  const std::size_t stride = static_cast<std::size_t>(n_) + 1;
  for (std::size_t i = 0; i < cloud_->size(); ++i) {
    if (i == exclude) continue;
    int depth = -1;
    for (int q = 0; q <= n_; ++q) {
      if (!(fs_distance2(xo[q].coords(), orbits_[i * stride + q]) < xi2)) break;
      depth = q;
    }
    if (depth >= 0) acc(i, depth);
  }
}

std::vector<double> DynamicalBallCounter::masses(const HomogeneousPoint& x, double xi,
                                                 std::size_t exclude) const {
  std::vector<double> hist(n_ + 1, 0.0);
  scan(x, xi, exclude, [&](std::size_t i, int depth) { hist[depth] += cloud_->weights[i]; });
  return cumulate(hist);
}

std::vector<long> DynamicalBallCounter::counts(const HomogeneousPoint& x, double xi,
                                               std::size_t exclude) const {
  std::vector<long> hist(n_ + 1, 0);
  scan(x, xi, exclude, [&](std::size_t, int depth) { ++hist[depth]; });
  return cumulate(hist);
}

int auto_entropy_steps(long count0, int d, int k, double target) {
  if (count0 <= target) return 1;
  const double n = std::log(static_cast<double>(count0) / target) / (k * std::log(static_cast<double>(d)));
  return std::max(1, static_cast<int>(std::floor(n)));
}

EntropyEstimate brin_katok_entropy(const DynamicalBallCounter& counter, const HomogeneousPoint& x,
                                   double xi, int n, std::size_t exclude) {
  if (!(xi > 0.0)) throw Error(ErrorCode::InvalidArgument, "xi must be positive");
  const std::vector<double> m = counter.masses(x, xi, exclude);
  const std::vector<long> c = counter.counts(x, xi, exclude);
  EntropyEstimate e;
  e.xi = xi;
  e.count0 = c[0];
  if (e.count0 == 0) throw Error(ErrorCode::EmptyDynamicalBall, "no sample within xi of the center");
  e.n = n > 0 ? n : std::min(counter.n(), auto_entropy_steps(e.count0, counter.map().degree(), counter.map().k()));
  if (e.n > counter.n()) throw Error(ErrorCode::InvalidArgument, "n exceeds the precomputed orbit length");
  e.count_n = c[e.n];
  if (e.count_n == 0) {
    e.lower_bound = true;
    e.value = std::log(static_cast<double>(e.count0)) / e.n;
    return e;
  }
  e.value = -std::log(m[e.n] / m[0]) / e.n;
  return e;
}

EntropyEstimate brin_katok_entropy(const ProjectiveMap& f, const EmpiricalMeasure& cloud,
                                   const HomogeneousPoint& x, double xi, int n) {
  if (n <= 0) {
    const DynamicalBallCounter c0(f, cloud, 0);
    n = auto_entropy_steps(c0.counts(x, xi)[0], f.degree(), f.k());
  }
  const DynamicalBallCounter counter(f, cloud, n);
  return brin_katok_entropy(counter, x, xi, n);
}

void validate(const BoundInputs& b) {
  if (b.k < 1 || b.d < 2) throw Error(ErrorCode::InvalidArgument, "need k >= 1 and d >= 2");
  if (b.p < 1 || b.p > b.k) throw Error(ErrorCode::InvalidArgument, "multiplicity p must lie in [1, k]");
  if (static_cast<int>(b.lambda.size()) != b.k) {
    throw Error(ErrorCode::InvalidArgument, "expected k exponents");
  }
  for (std::size_t i = 0; i < b.lambda.size(); ++i) {
    if (!(b.lambda[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "exponents must be positive");
    if (i > 0 && b.lambda[i] > b.lambda[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "exponents must be sorted descending");
    }
  }
  if (b.h < 0.0 || b.h > b.k * std::log(static_cast<double>(b.d)) + 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "entropy outside [0, k log d]");
  }
}

double theorem_a_bound(const BoundInputs& b) {
  validate(b);
  const double base = (b.k - b.p) * std::log(static_cast<double>(b.d));
  return base / b.lambda1() + (b.h - base) / b.lambdak();
}

bool entropy_below_floor(const BoundInputs& b) {
  return b.h < (b.k - b.p) * std::log(static_cast<double>(b.d));
}

CorollaryValues corollary_values(const BoundInputs& b) {
  validate(b);
  const double ld = std::log(static_cast<double>(b.d));
  CorollaryValues v;
  v.corA = (b.k - 1) * ld / b.lambda1() + ld / b.lambdak();
  for (double l : b.lambda) v.conjecture += ld / l;
  v.corC1_ok = b.lambda1() >= (1.0 - 1.0 / b.k) * 0.5 * ld;
  v.phi = 0.5 * ((1.0 + 1.0 / b.k) * (b.k - 1) * ld - b.h);
  return v;
}

}  // namespace cpkdim
