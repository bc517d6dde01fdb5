#include "cpkdim/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cpkdim/error.hpp"
#include "cpkdim/parallel.hpp"
#include "cpkdim/roots.hpp"

namespace cpkdim {

long PreimageSet::total_multiplicity() const {
  return std::accumulate(multiplicities.begin(), multiplicities.end(), 0L);
}

PreimageSolver::PreimageSolver(const ProjectiveMap& f) : f_(&f) {
  const int d = f.degree();
  auto binary = [d](const HomogeneousPolynomial& p, int u) {
    std::vector<cd> c(d + 1, 0.0);
    for (const auto& t : p.terms()) c[t.exps[u]] += t.coeff;
    return c;
  };
  switch (f.family()) {
    case MapFamily::RationalK1:
      base_a_ = binary(f.component(0), 0);
      base_b_ = binary(f.component(1), 0);
      break;
    case MapFamily::SkewProductK2:
    case MapFamily::ProductK2:
      base_a_ = binary(f.component(0), 0);
      base_b_ = binary(f.component(2), 0);
      fiber_.assign(d + 1, {});
      for (const auto& t : f.component(1).terms()) {
        fiber_[t.exps[1]].push_back({t.exps[0], t.exps[2], t.coeff});
      }
      break;
    case MapFamily::General:
      if (f.k() == 1) {
        base_a_ = binary(f.component(0), 0);
        base_b_ = binary(f.component(1), 0);
      }
      break;
  }
}

PreimageSet PreimageSolver::solve(const HomogeneousPoint& y) const {
  if (y.dim() != f_->k()) throw Error(ErrorCode::InvalidArgument, "point dimension mismatch");
  if (f_->k() == 1) return solve_k1(y);
  if (f_->family() == MapFamily::General) {
    throw Error(ErrorCode::UnsupportedFamily, "general k=2 maps have no staged preimage solver");
  }
  return solve_skew(y);
}

PreimageSet PreimageSolver::solve_k1(const HomogeneousPoint& y) const {
  const int d = f_->degree();
  // [P_0 : P_1] = [y_0 : y_1]  <=>  y_1 P_0 - y_0 P_1 = 0
  std::vector<cd> g(d + 1);
  for (int j = 0; j <= d; ++j) g[j] = y[1] * base_a_[j] - y[0] * base_b_[j];
  PreimageSet out;
  for (const CVec& r : binary_form_roots(g)) {
    out.points.push_back(HomogeneousPoint::normalize(r));
    out.multiplicities.push_back(1);
  }
  finish(y, out);
  return out;
}

PreimageSet PreimageSolver::solve_skew(const HomogeneousPoint& y) const {
  const int d = f_->degree();
  if (std::max(std::abs(y[0]), std::abs(y[2])) < 1e-8) {
    throw Error(ErrorCode::DegenerateFiber, "target lies over the indeterminate base point");
  }
  std::vector<cd> g(d + 1);
  for (int j = 0; j <= d; ++j) g[j] = y[2] * base_a_[j] - y[0] * base_b_[j];
  const bool use0 = std::abs(y[0]) >= std::abs(y[2]);

  PreimageSet out;
  std::vector<cd> fiber(d + 1);
  for (const CVec& b : binary_form_roots(g)) {
    const cd z = b[0];
    const cd t = b[1];
    auto eval_binary = [&](const std::vector<cd>& c) {
      cd s = 0.0;
      for (int j = 0; j <= d; ++j) s += c[j] * std::pow(z, j) * std::pow(t, d - j);
      return s;
    };
    // scale factor of the lift: F(x) = lambda * y
    const cd lambda = use0 ? eval_binary(base_a_) / y[0] : eval_binary(base_b_) / y[2];
    for (int m = 0; m <= d; ++m) {
      cd s = 0.0;
      for (const auto& term : fiber_[m]) s += term.coeff * std::pow(z, term.e0) * std::pow(t, term.e2);
      fiber[m] = s;
    }
    fiber[0] -= lambda * y[1];
    for (cd w : polynomial_roots(fiber)) {
      CVec x(3);
      x << z, w, t;
      out.points.push_back(HomogeneousPoint::normalize(x));
      out.multiplicities.push_back(1);
    }
  }
  finish(y, out);
  return out;
}

void PreimageSolver::finish(const HomogeneousPoint& y, PreimageSet& out) const {
  const std::size_t n = out.points.size();
  if (static_cast<long>(n) != f_->topological_degree()) {
    throw Error(ErrorCode::DegenerateFiber, "preimage count differs from the topological degree");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (fs_distance(out.points[i], out.points[j]) < kPreimageSeparationTol) {
        throw Error(ErrorCode::DegenerateFiber, "preimages coalesce (near-critical value)");
      }
    }
  }
  out.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CVec v = f_->eval_lift(out.points[i].coords());
    out.residuals[i] = fs_distance(v, y.coords());
    if (!(out.residuals[i] < kPreimageResidualTol)) {
      throw Error(ErrorCode::DegenerateFiber, "preimage residual above tolerance");
    }
  }
}

PreimageSet preimages(const ProjectiveMap& f, const HomogeneousPoint& y) {
  return PreimageSolver(f).solve(y);
}

EmpiricalMeasure uniform_measure(std::vector<HomogeneousPoint> points) {
  EmpiricalMeasure m;
  const double w = points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size());
  m.weights.assign(points.size(), w);
  m.points = std::move(points);
  return m;
}

BackwardWalk backward_walk(const PreimageSolver& solver, const HomogeneousPoint& start, int steps,
                           std::mt19937_64& rng, bool keep_path) {
  constexpr int kMaxRedraws = 32;
  BackwardWalk walk;
  if (keep_path) walk.path.reserve(static_cast<std::size_t>(steps) + 1);
  walk.path.push_back(start);
  PreimageSet prev;
  bool have_prev = false;
  HomogeneousPoint x = start;
  for (int level = 0; level < steps; ++level) {
    PreimageSet pre;
    int redraws = 0;
    while (true) {
      try {
        pre = solver.solve(x);
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateFiber || !have_prev || ++redraws > kMaxRedraws) throw;
        ++walk.aborts;
        x = prev.points[uniform_index(rng, prev.points.size())];
        if (keep_path) {
          walk.path.back() = x;
        }
      }
    }
    x = pre.points[uniform_index(rng, pre.points.size())];
    if (keep_path) {
      walk.path.push_back(x);
    } else {
      walk.path.back() = x;
    }
    prev = std::move(pre);
    have_prev = true;
  }
  return walk;
}

EmpiricalMeasure sample_equilibrium(const ProjectiveMap& f, const HomogeneousPoint& a, int depth,
                                    std::size_t count, std::uint64_t seed, int threads) {
  if (depth < 0) throw Error(ErrorCode::InvalidArgument, "depth must be non-negative");
  const PreimageSolver solver(f);
  if (depth > 0) {
    try {
      (void)solver.solve(a);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateFiber) {
        throw Error(ErrorCode::ExceptionalSeed, "fiber over the seed point is degenerate");
      }
      throw;
    }
  }
  std::vector<HomogeneousPoint> pts(count);
  std::vector<int> aborts(count, 0);
  parallel_for(count, threads, [&](std::size_t i) {
    std::mt19937_64 rng(stream_seed(seed, i));
    BackwardWalk w = backward_walk(solver, a, depth, rng, false);
    pts[i] = w.path.back();
    aborts[i] = w.aborts;
  });
  const long aborted = std::count_if(aborts.begin(), aborts.end(), [](int n) { return n > 0; });
  if (count > 0 && static_cast<double>(aborted) > 0.01 * static_cast<double>(count)) {
    throw Error(ErrorCode::ExceptionalSeed, "more than 1% of walks hit degenerate fibers");
  }
  EmpiricalMeasure m = uniform_measure(std::move(pts));
  m.provenance = {a, depth, seed, aborted};
  return m;
}

std::vector<HomogeneousPoint> forward_orbit(const ProjectiveMap& f, const HomogeneousPoint& x,
                                            int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "orbit length must be non-negative");
  std::vector<HomogeneousPoint> orbit;
  orbit.reserve(static_cast<std::size_t>(n) + 1);
  orbit.push_back(x);
  for (int q = 0; q < n; ++q) orbit.push_back(evaluate(f, orbit.back()));
  return orbit;
}

HomogeneousPoint generic_point(int k, std::uint64_t seed) {
  std::mt19937_64 rng(stream_seed(seed, 0x9a11ULL));
  CVec c(k + 1);
  for (int i = 0; i <= k; ++i) {
    const double r = 0.3 + 1.4 * uniform01(rng);
    const double th = 2.0 * M_PI * uniform01(rng);
    c[i] = std::polar(r, th);
  }
  return HomogeneousPoint::normalize(c);
}

void write_cloud_csv(const EmpiricalMeasure& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  const int k = m.k();
  for (int i = 0; i <= k; ++i) out << (i ? "," : "") << "re_" << i << ",im_" << i;
  out << ",weight\n";
  char buf[64];
  for (std::size_t n = 0; n < m.size(); ++n) {
    for (int i = 0; i <= k; ++i) {
      std::snprintf(buf, sizeof buf, "%s%.17g,%.17g", i ? "," : "", m.points[n][i].real(),
                    m.points[n][i].imag());
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g\n", m.weights[n]);
    out << buf;
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

EmpiricalMeasure read_cloud_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty cloud file");
  const auto ncols = std::count(line.begin(), line.end(), ',') + 1;
  if (ncols != 5 && ncols != 7) throw Error(ErrorCode::ParseError, "unexpected cloud header");
  const int ncoords = static_cast<int>((ncols - 1) / 2);
  EmpiricalMeasure m;
  std::vector<double> vals(static_cast<std::size_t>(ncols));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    for (auto& v : vals) {
      if (!std::getline(ss, cell, ',')) throw Error(ErrorCode::ParseError, "short cloud row");
      v = std::stod(cell);
    }
    CVec c(ncoords);
    for (int i = 0; i < ncoords; ++i) c[i] = cd(vals[2 * i], vals[2 * i + 1]);
    m.points.push_back(HomogeneousPoint::normalize(c));
    m.weights.push_back(vals.back());
  }
  return m;
}

}  // namespace cpkdim
