#include "cpkdim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <type_traits>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cpkdim/error.hpp"
#include "cpkdim/parallel.hpp"
#include "cpkdim/sampler.hpp"
#include "cpkdim/volume.hpp"

namespace cpkdim {

namespace {

namespace fs = std::filesystem;

enum Stream : std::uint64_t { kSeedPoint = 100, kSampler = 1, kLyapunov = 2, kCenters = 3, kCorrelation = 4 };

constexpr int kSeedAttempts = 8;
constexpr double kLattesTol = 0.03;

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string join(const std::vector<std::string>& v, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::ParseError, "missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
  const std::string& str(std::size_t r, const std::string& name) const { return rows.at(r).at(col(name)); }
  double num(std::size_t r, const std::string& name) const {
    const std::string& s = str(r, name);
    try {
      return std::stod(s);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad number '" + s + "' in column '" + name + "'");
    }
  }
};

Table read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty file " + path.string());
  t.header = split_list(line, ',');
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    if (!line.empty() && line.back() == ',') row.emplace_back();
    if (row.size() != t.header.size()) {
      throw Error(ErrorCode::ParseError, path.string() + ": row has wrong column count");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <class T>
void read(const boost::property_tree::ptree& pt, const char* key, T& value) {
  if (pt.get_optional<std::string>(key)) value = pt.get<T>(key);
}

template <class F>
auto in_stage(const char* stage, const std::string& map, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage ") + stage + " (" + map + "): " + e.message());
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  static const std::set<std::string> known = {
      "map.catalog",     "map.names",      "sampler.depth",  "sampler.count",     "sampler.seed",
      "lyapunov.n_steps", "lyapunov.n_orbits", "dimension.r_max", "dimension.rho", "dimension.J",
      "dimension.n_centers", "dimension.xi", "dimension.n",   "growth.m_max",      "growth.discs",
      "growth.nodes",    "output.dir",     "output.threads"};
  for (const auto& [section, body] : pt) {
    for (const auto& [key, value] : body) {
      if (!known.count(section + "." + key)) {
        throw Error(ErrorCode::ParseError, "unknown config key [" + section + "] " + key);
      }
    }
  }

  ExperimentConfig c;
  try {
    const fs::path catalog = pt.get<std::string>("map.catalog", c.catalog.string());
    c.catalog = catalog.is_relative() ? path.parent_path() / catalog : catalog;
    c.maps = split_list(pt.get<std::string>("map.names", ""), ',');
    read(pt, "sampler.depth", c.depth);
    read(pt, "sampler.count", c.count);
    read(pt, "sampler.seed", c.seed);
    read(pt, "lyapunov.n_steps", c.n_steps);
    read(pt, "lyapunov.n_orbits", c.n_orbits);
    read(pt, "dimension.r_max", c.r_max);
    read(pt, "dimension.rho", c.rho);
    read(pt, "dimension.J", c.j_max);
    read(pt, "dimension.n_centers", c.n_centers);
    read(pt, "dimension.xi", c.xi);
    read(pt, "dimension.n", c.entropy_n);
    read(pt, "growth.m_max", c.m_max);
    c.discs = split_list(pt.get<std::string>("growth.discs", ""), ',');
    read(pt, "growth.nodes", c.quad_nodes);
    c.out_dir = pt.get<std::string>("output.dir", c.out_dir.string());
    read(pt, "output.threads", c.threads);
  } catch (const boost::property_tree::ptree_error& e) {
    throw Error(ErrorCode::ParseError, std::string("config ") + path.string() + ": " + e.what());
  }
  return c;
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, msg);
  };
  require(!maps.empty(), "no maps configured");
  require(depth >= kMinDepth && depth <= kMaxDepth,
          "depth must lie in [" + std::to_string(kMinDepth) + ", " + std::to_string(kMaxDepth) + "]");
  require(count >= 100 && count <= kMaxSampleCount, "sample count out of range");
  require(n_steps >= kMinLyapunovSteps && n_steps <= kMaxSteps, "n_steps out of range");
  require(n_orbits >= 2 && n_orbits <= kMaxOrbits, "n_orbits out of range");
  require(r_max > 0.0 && r_max <= 1.0, "r_max must lie in (0, 1]");
  require(rho > 0.0 && rho < 1.0, "rho must lie in (0, 1)");
  require(j_max >= 3 && j_max <= 200, "J out of range");
  require(n_centers >= 1 && n_centers <= kMaxCenters, "n_centers out of range");
  require(xi > 0.0 && xi < 1.0, "xi must lie in (0, 1)");
  require(entropy_n >= 0 && entropy_n <= kMaxEntropySteps, "entropy n out of range");
  require(m_max >= 0 && m_max <= 12, "m_max out of range");
  require(quad_nodes >= 8 && quad_nodes <= 4096, "quadrature nodes out of range");
  require(threads >= 1, "threads must be positive");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "PASS";
    case Verdict::Fail:
      return "FAIL";
    case Verdict::NotApplicable:
      return "NA";
  }
  return "NA";
}

fs::path map_dir(const ExperimentConfig& cfg, const std::string& map) { return cfg.out_dir / map; }

void stage_sample(const ExperimentConfig& cfg, const CatalogEntry& entry) {
  const auto& f = entry.map;
  fs::create_directories(map_dir(cfg, f.name()));
  for (int attempt = 0;; ++attempt) {
    const auto a = generic_point(f.k(), stream_seed(cfg.seed, kSeedPoint + attempt));
    try {
      const auto cloud =
          sample_equilibrium(f, a, cfg.depth, cfg.count, stream_seed(cfg.seed, kSampler), cfg.threads);
      write_cloud_csv(cloud, map_dir(cfg, f.name()) / "cloud.csv");
      return;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ExceptionalSeed || attempt + 1 >= kSeedAttempts) throw;
    }
  }
}

void stage_lyapunov(const ExperimentConfig& cfg, const CatalogEntry& entry) {
  const auto& f = entry.map;
  const auto dir = map_dir(cfg, f.name());
  const auto cloud = read_cloud_csv(dir / "cloud.csv");
  LyapunovOptions opt;
  opt.n_steps = cfg.n_steps;
  opt.n_orbits = cfg.n_orbits;
  opt.seed = stream_seed(cfg.seed, kLyapunov);
  opt.threads = cfg.threads;
  const auto spec = lyapunov_spectrum(f, cloud, opt);
  const auto id = jacobian_identity_residual(f, cloud, spec);
  const auto bd = briend_duval_check(spec, f.degree());

  std::vector<std::string> header = {"map", "k", "d", "n_steps", "n_orbits", "dropped"};
  std::vector<std::string> row = {f.name(), std::to_string(f.k()), std::to_string(f.degree()),
                                  std::to_string(spec.n_steps), std::to_string(spec.n_orbits),
                                  std::to_string(spec.dropped_orbits)};
  for (int i = 0; i < f.k(); ++i) {
    header.push_back("lambda_" + std::to_string(i + 1));
    header.push_back("stderr_" + std::to_string(i + 1));
    row.push_back(num(spec.lambda[i]));
    row.push_back(num(spec.std_error[i]));
  }
  for (const char* h : {"multiplicity", "log_jac_mean", "log_jac_stderr", "identity_residual",
                        "identity_sigma", "bd_margin", "bd_ok"}) {
    header.emplace_back(h);
  }
  row.insert(row.end(), {std::to_string(spec.multiplicity_k), num(id.log_jac_mean), num(id.log_jac_stderr),
                         num(id.residual), num(id.sigma), num(bd.margin), bd.ok ? "1" : "0"});
  auto out = open_out(dir / "spectrum.csv");
  out << join(header) << "\n" << join(row) << "\n";
}

std::vector<std::size_t> choose_centers(std::size_t cloud_size, int n_centers, std::uint64_t seed) {
  if (cloud_size == 0) throw Error(ErrorCode::InvalidArgument, "empty cloud");
  const std::size_t want = std::min<std::size_t>(cloud_size, static_cast<std::size_t>(n_centers));
  std::mt19937_64 rng(seed);
  std::set<std::size_t> seen;
  std::vector<std::size_t> out;
  while (out.size() < want) {
    const std::size_t i = uniform_index(rng, cloud_size);
    if (seen.insert(i).second) out.push_back(i);
  }
  return out;
}

void stage_entropy(const ExperimentConfig& cfg, const CatalogEntry& entry) {
  const auto& f = entry.map;
  const auto dir = map_dir(cfg, f.name());
  const auto cloud = read_cloud_csv(dir / "cloud.csv");
  const auto centers = choose_centers(cloud.size(), cfg.n_centers, stream_seed(cfg.seed, kCenters));
  const int n_max = cfg.entropy_n > 0 ? cfg.entropy_n : kDefaultEntropyCap;
  const DynamicalBallCounter counter(f, cloud, n_max, cfg.threads);
  auto out = open_out(dir / "entropy.csv");
  out << "map,center_id,xi,n,count0,count_n,value,lower_bound\n";
  for (std::size_t c : centers) {
    const auto e = brin_katok_entropy(counter, cloud.points[c], cfg.xi, cfg.entropy_n, c);
    out << join({f.name(), std::to_string(c), num(e.xi), std::to_string(e.n), std::to_string(e.count0),
                 std::to_string(e.count_n), num(e.value), e.lower_bound ? "1" : "0"})
        << "\n";
  }
}

void stage_dimension(const ExperimentConfig& cfg, const CatalogEntry& entry) {
  const auto& f = entry.map;
  const auto dir = map_dir(cfg, f.name());
  const auto cloud = read_cloud_csv(dir / "cloud.csv");
  const auto ladder = cfg.ladder();
  const auto centers = choose_centers(cloud.size(), cfg.n_centers, stream_seed(cfg.seed, kCenters));
  auto out = open_out(dir / "dimension.csv");
  out << "quantity,center_id,slope,ci95,fit_lo,fit_hi,lower,upper,plateau_fallback\n";
  auto write = [&](const std::string& what, const std::string& id, const DimensionEstimate& e) {
    out << join({what, id, num(e.slope), num(e.ci95), num(e.ladder.r_values[e.ladder.fit_lo]),
                 num(e.ladder.r_values[e.ladder.fit_hi]), num(e.lower), num(e.upper),
                 e.plateau_fallback ? "1" : "0"})
        << "\n";
  };
  for (std::size_t c : centers) {
    try {
      write("local", std::to_string(c), local_dimension(cloud, cloud.points[c], ladder, c));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyBall) throw;
      out << "local," << c << ",nan,nan,nan,nan,nan,nan,0\n";
    }
  }
  write("correlation", "-1",
        correlation_dimension(cloud, ladder, stream_seed(cfg.seed, kCorrelation), 10'000'000, cfg.threads));
}

double theorem_a_sigma(const BoundInputs& b, double h_se, double lambda1_se, double lambdak_se) {
  const double base = (b.k - b.p) * std::log(static_cast<double>(b.d));
  const double l1 = b.lambda1(), lk = b.lambdak();
  const double dh = h_se / lk;
  const double d1 = base * lambda1_se / (l1 * l1);
  const double dk = (b.h - base) * lambdak_se / (lk * lk);
  return std::sqrt(dh * dh + d1 * d1 + dk * dk);
}

double corollary_a_sigma(const BoundInputs& b, double lambda1_se, double lambdak_se) {
  const double ld = std::log(static_cast<double>(b.d));
  const double l1 = b.lambda1(), lk = b.lambdak();
  const double d1 = (b.k - 1) * ld * lambda1_se / (l1 * l1);
  const double dk = ld * lambdak_se / (lk * lk);
  return std::sqrt(d1 * d1 + dk * dk);
}

double conjecture_sigma(const BoundInputs& b, const std::vector<double>& lambda_se) {
  const double ld = std::log(static_cast<double>(b.d));
  double s = 0.0;
  for (std::size_t i = 0; i < b.lambda.size(); ++i) {
    const double t = ld * lambda_se.at(i) / (b.lambda[i] * b.lambda[i]);
    s += t * t;
  }
  return std::sqrt(s);
}

Verdict compare_lower_bound(double measured, double measured_sigma, double bound, double bound_sigma) {
  if (!std::isfinite(measured) || !std::isfinite(bound)) return Verdict::NotApplicable;
  const double tol = 3.0 * std::hypot(measured_sigma, bound_sigma);
  return measured >= bound - tol ? Verdict::Pass : Verdict::Fail;
}

MapReport stage_bounds(const ExperimentConfig& cfg, const CatalogEntry& entry) {
  const auto& f = entry.map;
  const auto dir = map_dir(cfg, f.name());
  MapReport r;
  r.map = f.name();
  r.k = f.k();
  r.d = f.degree();
  const double ld = std::log(static_cast<double>(r.d));

  const Table spec = read_table(dir / "spectrum.csv");
  for (int i = 1; i <= r.k; ++i) {
    r.lambda.push_back(spec.num(0, "lambda_" + std::to_string(i)));
    r.lambda_se.push_back(spec.num(0, "stderr_" + std::to_string(i)));
  }
  r.multiplicity = static_cast<int>(spec.num(0, "multiplicity"));
  r.identity_residual = spec.num(0, "identity_residual");
  r.identity_sigma = spec.num(0, "identity_sigma");
  r.bd_margin = spec.num(0, "bd_margin");
  r.lattes_consistent = std::all_of(r.lambda.begin(), r.lambda.end(), [&](double l) {
    return std::abs(l - 0.5 * ld) <= kLattesTol * 0.5 * ld;
  });

  const Table ent = read_table(dir / "entropy.csv");
  std::vector<double> hs;
  for (std::size_t i = 0; i < ent.rows.size(); ++i) hs.push_back(ent.num(i, "value"));
  r.entropy = mean(hs);
  r.entropy_se = hs.size() > 1 ? stddev(hs) / std::sqrt(static_cast<double>(hs.size())) : 0.0;

  const Table dim = read_table(dir / "dimension.csv");
  std::vector<double> local;
  r.dim_corr = std::nan("");
  for (std::size_t i = 0; i < dim.rows.size(); ++i) {
    const double s = dim.num(i, "slope");
    if (dim.str(i, "quantity") == "correlation") r.dim_corr = s;
    if (dim.str(i, "quantity") == "local" && std::isfinite(s)) local.push_back(s);
  }
  r.dim_local_median = median(local);
  r.dim_local_sigma = local.size() > 1 ? 1.2533 * stddev(local) / std::sqrt(static_cast<double>(local.size())) : 0.0;

  BoundInputs b;
  b.d = r.d;
  b.k = r.k;
  b.p = std::clamp(r.multiplicity, 1, r.k);
  b.lambda = r.lambda;
  b.h = std::clamp(r.entropy, 0.0, r.k * ld);
  r.bound_thmA = theorem_a_bound(b);
  r.bound_thmA_sigma = theorem_a_sigma(b, r.entropy_se, r.lambda_se.front(), r.lambda_se.back());
  const auto cv = corollary_values(b);
  r.bound_corA = cv.corA;
  r.bound_corA_sigma = corollary_a_sigma(b, r.lambda_se.front(), r.lambda_se.back());
  r.conjecture = cv.conjecture;
  r.conjecture_sigma = conjecture_sigma(b, r.lambda_se);
  r.phi = cv.phi;

  r.verdict_thmA = compare_lower_bound(r.dim_local_median, r.dim_local_sigma, r.bound_thmA, r.bound_thmA_sigma);
  r.verdict_corA = compare_lower_bound(r.dim_local_median, r.dim_local_sigma, r.bound_corA, r.bound_corA_sigma);
  r.verdict_corC1 = compare_lower_bound(r.lambda.front(), r.lambda_se.front(), (1.0 - 1.0 / r.k) * 0.5 * ld, 0.0);
  return r;
}

std::pair<int, int> stage_growth(const ExperimentConfig& cfg, const CatalogEntry& entry) {
  const auto& f = entry.map;
  const auto dir = map_dir(cfg, f.name());
  for (const auto& label : cfg.discs) {
    const bool found = std::any_of(entry.discs.begin(), entry.discs.end(),
                                   [&](const NamedDisc& nd) { return nd.label == label; });
    if (!found) throw Error(ErrorCode::InvalidArgument, "map has no disc '" + label + "'");
  }
  const auto grid = QuadratureGrid::polar(cfg.quad_nodes, cfg.quad_nodes, 1.0);
  auto out = open_out(dir / "growth.csv");
  out << "map,disc,l,m,volume,bound,ratio,pass,resolution\n";
  int passed = 0, total = 0;
  for (const auto& nd : entry.discs) {
    if (!cfg.discs.empty() && std::find(cfg.discs.begin(), cfg.discs.end(), nd.label) == cfg.discs.end()) continue;
    for (int m = 0; m <= cfg.m_max; ++m) {
      const auto g = growth_check(f, m, nd.disc, grid);
      out << join({f.name(), nd.label, std::to_string(nd.disc.l), std::to_string(m), num(g.volume), num(g.bound),
                   num(g.ratio), g.pass ? "1" : "0", std::to_string(g.resolution)})
          << "\n";
      passed += g.pass;
      ++total;
    }
  }
  return {passed, total};
}

VerificationReport run_verify(const ExperimentConfig& cfg, const StageObserver& observe) {
  const auto catalog = in_stage("load", "config", [&] {
    cfg.validate();
    auto cat = Catalog::load(cfg.catalog);
    for (const auto& name : cfg.maps) cat.get(name);
    return cat;
  });
  auto timed = [&](const char* stage, const std::string& map, auto&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = in_stage(stage, map, [&] {
      if constexpr (std::is_void_v<decltype(body())>) {
        body();
        return 0;
      } else {
        return body();
      }
    });
    if (observe) {
      observe(map, stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return result;
  };
  VerificationReport report;
  for (const auto& name : cfg.maps) {
    const auto& entry = catalog.get(name);
    timed("sample", name, [&] { stage_sample(cfg, entry); });
    timed("lyapunov", name, [&] { stage_lyapunov(cfg, entry); });
    timed("entropy", name, [&] { stage_entropy(cfg, entry); });
    timed("dimension", name, [&] { stage_dimension(cfg, entry); });
    auto row = timed("bounds", name, [&] { return stage_bounds(cfg, entry); });
    std::tie(row.growth_pass, row.growth_total) = timed("growth", name, [&] { return stage_growth(cfg, entry); });
    report.rows.push_back(std::move(row));
  }
  in_stage("report", "all", [&] { emit_report(report, cfg.out_dir); });
  return report;
}

std::vector<std::string> report_columns() {
  return {"map",          "k",           "d",           "lambda1",      "lambda1_se",      "lambda2",
          "lambda2_se",   "entropy",     "dim_local_median", "dim_corr", "bound_thmA",     "bound_corA",
          "conjecture",   "verdict_thmA", "verdict_corA", "verdict_corC1", "growth_pass",  "growth_total"};
}

void emit_report(const VerificationReport& report, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string());
  auto csv = open_out(dir / "report.csv");
  csv << join(report_columns()) << "\n";
  for (const auto& r : report.rows) {
    std::vector<std::string> row = {r.map, std::to_string(r.k), std::to_string(r.d)};
    for (int i = 0; i < 2; ++i) {
      const bool have = i < static_cast<int>(r.lambda.size());
      row.push_back(have ? short_num(r.lambda[i]) : "");
      row.push_back(have ? short_num(r.lambda_se[i]) : "");
    }
    row.insert(row.end(), {short_num(r.entropy), short_num(r.dim_local_median), short_num(r.dim_corr),
                           short_num(r.bound_thmA), short_num(r.bound_corA), short_num(r.conjecture),
                           to_string(r.verdict_thmA), to_string(r.verdict_corA), to_string(r.verdict_corC1),
                           std::to_string(r.growth_pass), std::to_string(r.growth_total)});
    csv << join(row) << "\n";
  }
  if (!csv) throw Error(ErrorCode::IoError, "write failed for report.csv");

  auto md = open_out(dir / "report.md");
  md << "# Verification report\n\n";
  if (report.rows.empty()) md << "No maps were run.\n";
  for (const auto& r : report.rows) {
    char buf[256];
    md << "## " << r.map << " (k = " << r.k << ", d = " << r.d << ")\n\n";
    for (std::size_t i = 0; i < r.lambda.size(); ++i) {
      std::snprintf(buf, sizeof buf, "- lambda%zu = %.5f +/- %.5f\n", i + 1, r.lambda[i], r.lambda_se[i]);
      md << buf;
    }
    std::snprintf(buf, sizeof buf, "- exponent multiplicity p = %d; log sqrt(d) = %.5f; lower-bound margin %.5f\n",
                  r.multiplicity, 0.5 * std::log(static_cast<double>(r.d)), r.bd_margin);
    md << buf;
    std::snprintf(buf, sizeof buf, "- log Jac identity residual %.3g (sigma %.3g)\n", r.identity_residual,
                  r.identity_sigma);
    md << buf;
    std::snprintf(buf, sizeof buf, "- entropy h = %.5f +/- %.5f (k log d = %.5f)\n", r.entropy, r.entropy_se,
                  r.k * std::log(static_cast<double>(r.d)));
    md << buf;
    std::snprintf(buf, sizeof buf, "- dimension: local median %.4f +/- %.4f, correlation %.4f\n",
                  r.dim_local_median, r.dim_local_sigma, r.dim_corr);
    md << buf;
    std::snprintf(buf, sizeof buf, "- bound_thmA %.4f +/- %.4f -> %s\n", r.bound_thmA, r.bound_thmA_sigma,
                  to_string(r.verdict_thmA).c_str());
    md << buf;
    std::snprintf(buf, sizeof buf, "- bound_corA %.4f +/- %.4f -> %s\n", r.bound_corA, r.bound_corA_sigma,
                  to_string(r.verdict_corA).c_str());
    md << buf;
    std::snprintf(buf, sizeof buf, "- conjecture %.4f +/- %.4f; phi %.4f; corC1 -> %s\n", r.conjecture,
                  r.conjecture_sigma, r.phi, to_string(r.verdict_corC1).c_str());
    md << buf;
    md << "- growth checks passed: " << r.growth_pass << " / " << r.growth_total << "\n";
    if (r.lattes_consistent) md << "- exponents match log sqrt(d): Lattès-consistent\n";
    md << "\n";
  }
  md << "Verdicts pass when the measured value is at least the bound minus three combined standard errors.\n";
  if (!md) throw Error(ErrorCode::IoError, "write failed for report.md");
}

}  // namespace cpkdim
