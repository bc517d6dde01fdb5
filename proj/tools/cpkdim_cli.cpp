#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "cpkdim/error.hpp"
#include "cpkdim/harness.hpp"
#include "cpkdim/normal_forms.hpp"

using namespace cpkdim;

namespace {

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 0;
  std::vector<std::string> maps;
};

ExperimentConfig load_config(const Globals& g, CLI::App& app) {
  if (g.config.empty()) throw CLI::RequiredError("--config");
  auto cfg = ExperimentConfig::load(g.config);
  if (app.count("--seed")) cfg.seed = g.seed;
  if (!g.out.empty()) cfg.out_dir = g.out;
  if (g.threads > 0) cfg.threads = g.threads;
  if (!g.maps.empty()) cfg.maps = g.maps;
  cfg.validate();
  return cfg;
}

template <class Stage>
void for_each_map(const ExperimentConfig& cfg, const char* name, Stage&& stage) {
  const auto catalog = Catalog::load(cfg.catalog);
  for (const auto& m : cfg.maps) {
    const auto& entry = catalog.get(m);
    try {
      stage(entry);
    } catch (const Error& e) {
      throw Error(e.code(), std::string("stage ") + name + " (" + m + "): " + e.message());
    }
    std::printf("%s: %s -> %s\n", name, m.c_str(), map_dir(cfg, m).string().c_str());
  }
}

void print_resonances(const ResonanceSet& rs) {
  std::printf("k = %d, Delta = %d, theta = %.6g\n", rs.k, rs.Delta, rs.theta);
  for (int i = 0; i < rs.k; ++i) {
    std::printf("R_%d:", i + 1);
    const auto& ri = i < static_cast<int>(rs.R.size()) ? rs.R[i] : std::vector<MultiIndex>{};
    if (ri.empty()) std::printf(" (none)");
    for (const auto& a : ri) {
      std::printf(" (");
      for (std::size_t j = 0; j < a.size(); ++j) std::printf(j ? ",%d" : "%d", a[j]);
      std::printf(")");
    }
    std::printf("\n");
  }
  std::printf("I:");
  for (int i : rs.I) std::printf(" %d", i + 1);
  std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimension, exponent and entropy experiments for endomorphisms of CP^1 and CP^2"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Experiment INI file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Override the master seed");
  app.add_option("--out", g.out, "Override the output directory");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--map", g.maps, "Restrict to these catalog maps");
  app.fallthrough();

  auto* sample = app.add_subcommand("sample", "Sample the equilibrium measure into cloud.csv");
  auto* lyap = app.add_subcommand("lyapunov", "Estimate exponents from cloud.csv into spectrum.csv");
  auto* entropy = app.add_subcommand("entropy", "Brin-Katok entropy at sampled centers into entropy.csv");
  auto* dimension = app.add_subcommand("dimension", "Local and correlation dimension into dimension.csv");
  auto* growth = app.add_subcommand("growth", "Volume growth of catalog discs into growth.csv");
  auto* verify = app.add_subcommand("verify", "Run every stage and write report.csv and report.md");

  auto* resonance = app.add_subcommand("resonance", "List resonant degrees for an exponent vector");
  std::vector<double> lambda;
  std::vector<std::string> ratios;
  double eps = 1e-9;
  auto* lambda_opt = resonance->add_option("--lambda", lambda, "Exponents, descending")->delimiter(',');
  auto* ratio_opt =
      resonance->add_option("--ratios", ratios, "Exact exponents as logs of rationals, e.g. 4,2")->delimiter(',');
  lambda_opt->excludes(ratio_opt);
  resonance->add_option("--eps", eps, "Resonance tolerance for --lambda");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (resonance->parsed()) {
      if (!ratios.empty()) {
        std::vector<mpq_class> q;
        for (const auto& r : ratios) {
          mpq_class v;
          if (v.set_str(r, 10) != 0) throw Error(ErrorCode::ParseError, "bad ratio '" + r + "'");
          v.canonicalize();
          q.push_back(v);
        }
        print_resonances(enumerate_resonances_exact(q));
      } else if (!lambda.empty()) {
        print_resonances(enumerate_resonances(lambda, eps));
      } else {
        throw CLI::RequiredError("--lambda or --ratios");
      }
      return 0;
    }

    const auto cfg = load_config(g, app);
    if (sample->parsed()) for_each_map(cfg, "sample", [&](const CatalogEntry& e) { stage_sample(cfg, e); });
    if (lyap->parsed()) for_each_map(cfg, "lyapunov", [&](const CatalogEntry& e) { stage_lyapunov(cfg, e); });
    if (entropy->parsed()) for_each_map(cfg, "entropy", [&](const CatalogEntry& e) { stage_entropy(cfg, e); });
    if (dimension->parsed()) {
      for_each_map(cfg, "dimension", [&](const CatalogEntry& e) { stage_dimension(cfg, e); });
    }
    if (growth->parsed()) {
      for_each_map(cfg, "growth", [&](const CatalogEntry& e) {
        const auto [pass, total] = stage_growth(cfg, e);
        std::printf("growth: %s %d/%d within bound\n", e.map.name().c_str(), pass, total);
      });
    }
    if (verify->parsed()) {
      const auto report = run_verify(cfg);
      for (const auto& r : report.rows) {
        std::printf("%s: thmA %s, corA %s, corC1 %s, growth %d/%d\n", r.map.c_str(), to_string(r.verdict_thmA).c_str(),
                    to_string(r.verdict_corA).c_str(), to_string(r.verdict_corC1).c_str(), r.growth_pass,
                    r.growth_total);
      }
      std::printf("report: %s\n", (cfg.out_dir / "report.csv").string().c_str());
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
