#pragma once

#include <cmath>
#include <random>
#include <string>

#include "cpkdim/catalog.hpp"

namespace testing {

inline const cpkdim::Catalog& catalog() {
  static const cpkdim::Catalog c = cpkdim::Catalog::load(CPKDIM_CATALOG);
  return c;
}

inline const cpkdim::ProjectiveMap& map(const std::string& name) { return catalog().get(name).map; }

inline cpkdim::CVec vec(std::initializer_list<cpkdim::cd> v) {
  cpkdim::CVec out(static_cast<int>(v.size()));
  int i = 0;
  for (auto x : v) out[i++] = x;
  return out;
}

inline cpkdim::HomogeneousPoint point(std::initializer_list<cpkdim::cd> v) {
  return cpkdim::HomogeneousPoint::normalize(vec(v));
}

/// Coordinates with moduli in [0.2, 1] and uniform phases.
inline cpkdim::CVec random_lift(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mod(0.2, 1.0), ph(0.0, 2.0 * M_PI);
  cpkdim::CVec v(k + 1);
  for (int i = 0; i <= k; ++i) v[i] = std::polar(mod(rng), ph(rng));
  return v;
}

}  // namespace testing
