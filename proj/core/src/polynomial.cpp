#include "cpkdim/polynomial.hpp"

#include <algorithm>
#include <map>

#include "cpkdim/error.hpp"

namespace cpkdim {

PowerTable::PowerTable(const CVec& z, int max_degree) {
  if (max_degree > kMaxDegree) {
    throw Error(ErrorCode::InvalidArgument, "degree above supported maximum");
  }
  for (int v = 0; v < z.size(); ++v) {
    pw_[v][0] = 1.0;
    for (int e = 1; e <= max_degree; ++e) pw_[v][e] = pw_[v][e - 1] * z[v];
  }
}

HomogeneousPolynomial::HomogeneousPolynomial(int n_vars, std::vector<Monomial> terms)
    : n_vars_(n_vars) {
  if (n_vars < 1 || n_vars > kMaxCoords) {
    throw Error(ErrorCode::InvalidArgument, "polynomial must have 1..3 variables");
  }
  // merge duplicate exponents, drop exact zeros
  std::map<std::array<int, kMaxCoords>, cd> merged;
  for (const auto& t : terms) {
    for (int v = n_vars; v < kMaxCoords; ++v) {
      if (t.exps[v] != 0) throw Error(ErrorCode::InvalidArgument, "exponent on missing variable");
    }
    for (int v = 0; v < n_vars; ++v) {
      if (t.exps[v] < 0) throw Error(ErrorCode::InvalidArgument, "negative exponent");
    }
    merged[t.exps] += t.coeff;
  }
  for (const auto& [e, c] : merged) {
    if (c != cd(0.0)) terms_.push_back({e, c});
  }
}

int HomogeneousPolynomial::degree() const {
  int d = -1;
  for (const auto& t : terms_) d = std::max(d, t.exps[0] + t.exps[1] + t.exps[2]);
  return d;
}

bool HomogeneousPolynomial::is_homogeneous_of(int d) const {
  if (terms_.empty()) return false;
  return std::all_of(terms_.begin(), terms_.end(), [d](const Monomial& t) {
    return t.exps[0] + t.exps[1] + t.exps[2] == d;
  });
}

bool HomogeneousPolynomial::depends_on(int var) const { return degree_in(var) > 0; }

int HomogeneousPolynomial::degree_in(int var) const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.exps[var]);
  return d;
}

cd HomogeneousPolynomial::eval(const CVec& z) const {
  return eval(PowerTable(z, std::max(degree(), 0)));
}

cd HomogeneousPolynomial::eval(const PowerTable& pw) const {
  cd s = 0.0;
  for (const auto& t : terms_) {
    cd m = t.coeff;
    for (int v = 0; v < n_vars_; ++v) {
      if (t.exps[v] != 0) m *= pw.get(v, t.exps[v]);
    }
    s += m;
  }
  return s;
}

HomogeneousPolynomial HomogeneousPolynomial::partial(int var) const {
  std::vector<Monomial> out;
  for (const auto& t : terms_) {
    if (t.exps[var] == 0) continue;
    Monomial m = t;
    m.coeff *= static_cast<double>(t.exps[var]);
    m.exps[var] -= 1;
    out.push_back(m);
  }
  return HomogeneousPolynomial(n_vars_, std::move(out));
}

double HomogeneousPolynomial::coeff_l1() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coeff);
  return s;
}

}  // namespace cpkdim
