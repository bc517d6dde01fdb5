#include "cpkdim/catalog.hpp"

#include <fstream>
#include <sstream>

#include "cpkdim/error.hpp"

namespace cpkdim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(trim(part));
  return out;
}

double parse_real(const std::string& t, const std::string& whole) {
  if (t.empty()) throw Error(ErrorCode::ParseError, "empty number in '" + whole + "'");
  try {
    std::size_t used = 0;
    const auto slash = t.find('/');
    if (slash != std::string::npos) {
      const std::string num = t.substr(0, slash), den = t.substr(slash + 1);
      const long long p = std::stoll(num, &used);
      if (used != num.size()) throw std::invalid_argument(t);
      const long long q = std::stoll(den, &used);
      if (used != den.size() || q == 0) throw std::invalid_argument(t);
      return static_cast<double>(p) / static_cast<double>(q);
    }
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "bad number '" + t + "' in '" + whole + "'");
  }
}

int parse_int(const std::string& t, const std::string& key) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "expected an integer for '" + key + "', got '" + t + "'");
  }
}

CVec parse_coords(const std::string& text, int n, const std::string& key) {
  const auto parts = split(text, ',');
  if (static_cast<int>(parts.size()) != n) {
    throw Error(ErrorCode::ParseError, "'" + key + "' needs " + std::to_string(n) + " coordinates");
  }
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = parse_coefficient(parts[i]);
  return v;
}

}  // namespace

cd parse_coefficient(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  if (s.empty()) throw Error(ErrorCode::ParseError, "empty coefficient");
  // split into signed terms at + or - not following an exponent marker
  std::vector<std::string> terms;
  std::size_t start = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      terms.push_back(s.substr(start, i - start));
      start = i;
    }
  }
  terms.push_back(s.substr(start));
  if (terms.size() > 2 || (terms.size() == 2 && (terms[0].back() == 'i' || terms[1].back() != 'i'))) {
    throw Error(ErrorCode::ParseError, "bad coefficient '" + text + "'");
  }
  cd value = 0.0;
  for (std::string t : terms) {
    const bool imag = t.back() == 'i';
    if (imag) t.pop_back();
    if (t == "+" || t == "-" || t.empty()) t += "1";
    if (t.front() == '+') t.erase(0, 1);
    const double v = parse_real(t, text);
    value += imag ? cd(0.0, v) : cd(v, 0.0);
  }
  return value;
}

HomogeneousPolynomial parse_polynomial(const std::string& text, int n_vars) {
  std::vector<Monomial> terms;
  for (const auto& part : split(text, ';')) {
    if (part.empty()) continue;
    const auto open = part.find('(');
    const auto close = part.find(')');
    const auto colon = part.find(':', close == std::string::npos ? 0 : close);
    if (open != 0 || close == std::string::npos || colon == std::string::npos) {
      throw Error(ErrorCode::ParseError, "expected '(e0,...): coeff' in '" + part + "'");
    }
    const auto exps = split(part.substr(1, close - 1), ',');
    if (static_cast<int>(exps.size()) != n_vars) {
      throw Error(ErrorCode::ParseError, "exponent tuple of wrong length in '" + part + "'");
    }
    Monomial m;
    for (int j = 0; j < n_vars; ++j) {
      m.exps[j] = parse_int(exps[j], part);
      if (m.exps[j] < 0) throw Error(ErrorCode::ParseError, "negative exponent in '" + part + "'");
    }
    m.coeff = parse_coefficient(part.substr(colon + 1));
    terms.push_back(m);
  }
  if (terms.empty()) throw Error(ErrorCode::ParseError, "empty polynomial");
  return HomogeneousPolynomial(n_vars, std::move(terms));
}

Catalog Catalog::parse(const std::string& text) {
  Catalog cat;
  std::vector<std::map<std::string, std::string>> blocks(1);
  std::vector<std::vector<std::string>> disc_order(1);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) {
      if (!blocks.back().empty()) {
        blocks.emplace_back();
        disc_order.emplace_back();
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (blocks.back().count(key)) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    blocks.back()[key] = trim(line.substr(eq + 1));
    if (key.rfind("disc_", 0) == 0) disc_order.back().push_back(key);
  }

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& kv = blocks[b];
    if (kv.empty()) continue;
    auto need = [&](const std::string& key) -> const std::string& {
      const auto it = kv.find(key);
      if (it == kv.end()) {
        const auto n = kv.find("name");
        throw Error(ErrorCode::ParseError, "block '" + (n == kv.end() ? std::string("?") : n->second) +
                                               "' is missing '" + key + "'");
      }
      return it->second;
    };
    const std::string name = need("name");
    const int k = parse_int(need("k"), "k");
    const int d = parse_int(need("d"), "d");
    if (k < 1 || k > 2) throw Error(ErrorCode::ParseError, "map '" + name + "': k must be 1 or 2");
    const MapFamily family = family_from_string(need("family"));
    std::vector<HomogeneousPolynomial> comps;
    for (int i = 0; i <= k; ++i) comps.push_back(parse_polynomial(need("component_" + std::to_string(i)), k + 1));
    for (const auto& [key, value] : kv) {
      const bool known = key == "name" || key == "k" || key == "d" || key == "family" ||
                         key.rfind("component_", 0) == 0 || key.rfind("disc_", 0) == 0;
      if (!known) throw Error(ErrorCode::ParseError, "map '" + name + "': unknown key '" + key + "'");
      if (key.rfind("component_", 0) == 0) {
        const int idx = parse_int(key.substr(10), key);
        if (idx < 0 || idx > k) throw Error(ErrorCode::ParseError, "map '" + name + "': extra component");
      }
    }
    CatalogEntry entry{ProjectiveMap(name, k, d, family, std::move(comps)), {}};
    for (const auto& key : disc_order[b]) {
      const auto fields = split(kv.at(key), '|');
      if (fields.size() != 3 && fields.size() != 4) {
        throw Error(ErrorCode::ParseError, "'" + key + "' needs chart | center | direction [| radius]");
      }
      const int chart = parse_int(fields[0], key);
      if (chart < 0 || chart > k) throw Error(ErrorCode::ParseError, "'" + key + "': chart out of range");
      const double radius = fields.size() == 4 ? parse_real(fields[3], key) : 2.0;
      entry.discs.push_back({key.substr(5), affine_disc(k, chart, parse_coords(fields[1], k, key),
                                                       parse_coords(fields[2], k, key), radius)});
    }
    if (cat.entries_.count(name)) throw Error(ErrorCode::ParseError, "duplicate map '" + name + "'");
    cat.order_.push_back(name);
    cat.entries_.emplace(name, std::move(entry));
  }
  return cat;
}

Catalog Catalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read catalog " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const CatalogEntry& Catalog::get(const std::string& name) const {
  const auto it = entries_.find(name);
  if (it == entries_.end()) throw Error(ErrorCode::InvalidArgument, "unknown map '" + name + "'");
  return it->second;
}

ProjectiveMap load_map(const std::string& name, const std::filesystem::path& catalog_path) {
  return Catalog::load(catalog_path).get(name).map;
}

}  // namespace cpkdim
