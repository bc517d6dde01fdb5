#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace cpkdim {

using cd = std::complex<double>;

/// Homogeneous coordinate vectors live in C^{k+1} with k <= 2.
inline constexpr int kMaxCoords = 3;
inline constexpr int kMaxDegree = 8;

using CVec = Eigen::Matrix<cd, Eigen::Dynamic, 1, 0, kMaxCoords, 1>;
using CMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxCoords, kMaxCoords>;

struct Monomial {
  std::array<int, kMaxCoords> exps{};
  cd coeff;
};

/// Powers z_i^e for e <= kMaxDegree, shared by every component evaluated at one point.
class PowerTable {
 public:
  PowerTable(const CVec& z, int max_degree);
  cd get(int var, int e) const { return pw_[var][e]; }

 private:
  std::array<std::array<cd, kMaxDegree + 1>, kMaxCoords> pw_{};
};

/// Polynomial in up to three variables; the map components are homogeneous of one degree.
class HomogeneousPolynomial {
 public:
  HomogeneousPolynomial() = default;
  HomogeneousPolynomial(int n_vars, std::vector<Monomial> terms);

  int n_vars() const { return n_vars_; }
  /// Total degree of the highest term, -1 for the zero polynomial.
  int degree() const;
  bool is_homogeneous_of(int d) const;
  bool is_zero() const { return terms_.empty(); }
  bool depends_on(int var) const;
  /// Maximal exponent of `var` over all terms.
  int degree_in(int var) const;

  cd eval(const CVec& z) const;
  cd eval(const PowerTable& pw) const;
  HomogeneousPolynomial partial(int var) const;

  const std::vector<Monomial>& terms() const { return terms_; }
  double coeff_l1() const;

 private:
  int n_vars_ = 0;
  std::vector<Monomial> terms_;
};

}  // namespace cpkdim
