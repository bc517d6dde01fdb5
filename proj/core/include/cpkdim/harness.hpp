#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cpkdim/catalog.hpp"
#include "cpkdim/dimension.hpp"
#include "cpkdim/lyapunov.hpp"

namespace cpkdim {

inline constexpr std::size_t kMaxSampleCount = 2'000'000;
inline constexpr int kMinDepth = 20;
inline constexpr int kMaxDepth = 200;
inline constexpr int kMaxSteps = 100'000;
inline constexpr int kMaxOrbits = 10'000;
inline constexpr int kMaxCenters = 1'000;
inline constexpr int kMaxEntropySteps = 30;
inline constexpr int kDefaultEntropyCap = 12;

struct ExperimentConfig {
  std::filesystem::path catalog = "data/catalog.txt";
  std::vector<std::string> maps;

  int depth = 30;
  std::size_t count = 100'000;
  std::uint64_t seed = 1;

  int n_steps = 1000;
  int n_orbits = 200;

  double r_max = 0.1;
  double rho = 0.8;
  int j_max = 20;
  int n_centers = 50;
  double xi = 0.05;
  int entropy_n = 0;  // 0 picks n per center

  int m_max = 6;
  std::vector<std::string> discs;  // empty means every catalog disc of the map
  int quad_nodes = 256;

  std::filesystem::path out_dir = "out";
  int threads = 1;

  /// INI file with [map], [sampler], [lyapunov], [dimension], [growth], [output] sections.
  /// A relative catalog path resolves against the config file's directory.
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Checks resource caps and parameter ranges. Throws InvalidArgument.
  void validate() const;

  RadiusLadder ladder() const { return RadiusLadder::geometric(r_max, rho, j_max); }
};

enum class Verdict { Pass, Fail, NotApplicable };
std::string to_string(Verdict v);

struct MapReport {
  std::string map;
  int k = 1;
  int d = 2;
  std::vector<double> lambda;
  std::vector<double> lambda_se;
  int multiplicity = 1;
  double entropy = 0.0;
  double entropy_se = 0.0;
  double dim_local_median = 0.0;
  double dim_local_sigma = 0.0;
  double dim_corr = 0.0;
  double bound_thmA = 0.0;
  double bound_thmA_sigma = 0.0;
  double bound_corA = 0.0;
  double bound_corA_sigma = 0.0;
  double conjecture = 0.0;
  double conjecture_sigma = 0.0;
  double phi = 0.0;
  double identity_residual = 0.0;
  double identity_sigma = 0.0;
  double bd_margin = 0.0;
  bool lattes_consistent = false;
  Verdict verdict_thmA = Verdict::NotApplicable;
  Verdict verdict_corA = Verdict::NotApplicable;
  Verdict verdict_corC1 = Verdict::NotApplicable;
  int growth_pass = 0;
  int growth_total = 0;
};

struct VerificationReport {
  std::vector<MapReport> rows;
};

/// Per-map working directory under the output directory.
std::filesystem::path map_dir(const ExperimentConfig& cfg, const std::string& map);

// Stages. Each reads its inputs from files written by earlier stages in map_dir.

/// Writes cloud.csv.
void stage_sample(const ExperimentConfig& cfg, const CatalogEntry& entry);
/// Reads cloud.csv, writes spectrum.csv.
void stage_lyapunov(const ExperimentConfig& cfg, const CatalogEntry& entry);
/// Reads cloud.csv, writes entropy.csv.
void stage_entropy(const ExperimentConfig& cfg, const CatalogEntry& entry);
/// Reads cloud.csv, writes dimension.csv.
void stage_dimension(const ExperimentConfig& cfg, const CatalogEntry& entry);
/// Reads spectrum.csv, entropy.csv and dimension.csv; growth fields are left at zero.
MapReport stage_bounds(const ExperimentConfig& cfg, const CatalogEntry& entry);
/// Writes growth.csv and returns {passed, total}.
std::pair<int, int> stage_growth(const ExperimentConfig& cfg, const CatalogEntry& entry);

/// Centers used by the entropy and dimension stages.
std::vector<std::size_t> choose_centers(std::size_t cloud_size, int n_centers, std::uint64_t seed);

/// Called after each stage with the map name, the stage name and the wall time in seconds.
using StageObserver = std::function<void(const std::string&, const std::string&, double)>;

/// Runs every stage for every configured map, then writes report.csv and report.md.
/// Errors are rethrown with the failing stage named.
VerificationReport run_verify(const ExperimentConfig& cfg, const StageObserver& observe = {});

/// Fixed report.csv columns; lambda2 columns are empty for k = 1.
std::vector<std::string> report_columns();
void emit_report(const VerificationReport& report, const std::filesystem::path& dir);

// Verdict arithmetic, exposed for testing.

/// Delta-method standard error of h / lambda_k + (1/lambda_1 - 1/lambda_k) * base.
double theorem_a_sigma(const BoundInputs& b, double h_se, double lambda1_se, double lambdak_se);
double corollary_a_sigma(const BoundInputs& b, double lambda1_se, double lambdak_se);
double conjecture_sigma(const BoundInputs& b, const std::vector<double>& lambda_se);
/// Pass when measured >= bound - 3 * sqrt(bound_sigma^2 + measured_sigma^2).
Verdict compare_lower_bound(double measured, double measured_sigma, double bound, double bound_sigma);

}  // namespace cpkdim
