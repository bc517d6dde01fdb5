#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cpkdim/projective.hpp"
#include "cpkdim/volume.hpp"

namespace cpkdim {

/// Parses "3", "-0.25", "1/3", "2i", "1/2-3/4i", "0.1+0.2i". Throws ParseError.
cd parse_coefficient(const std::string& text);

/// Parses "(2,0): 1 ; (0,2): -2" into a polynomial in n_vars variables. Throws ParseError.
HomogeneousPolynomial parse_polynomial(const std::string& text, int n_vars);

struct NamedDisc {
  std::string label;
  PolydiscMap disc;
};

struct CatalogEntry {
  ProjectiveMap map;
  std::vector<NamedDisc> discs;
};

/// Blank-line separated blocks of "key = value" lines; '#' starts a comment.
/// Keys: name, k, d, family, component_0..component_k, and disc_<label> entries of the form
/// "chart | center coords | direction coords [| radius]" (default radius 2).
class Catalog {
 public:
  static Catalog parse(const std::string& text);
  static Catalog load(const std::filesystem::path& path);

  /// Throws InvalidArgument for an unknown name.
  const CatalogEntry& get(const std::string& name) const;
  bool contains(const std::string& name) const { return entries_.count(name) > 0; }
  std::vector<std::string> names() const { return order_; }

 private:
  std::map<std::string, CatalogEntry> entries_;
  std::vector<std::string> order_;
};

ProjectiveMap load_map(const std::string& name, const std::filesystem::path& catalog_path);

}  // namespace cpkdim
