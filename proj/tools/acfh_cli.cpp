#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "acfh/config.hpp"
#include "acfh/driver.hpp"
#include "acfh/harness.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kNonconvergence = 3, kInvariantBreach = 4 };

std::optional<double> parse_rho_option(const std::string& s, const acfh::RunConfig& cfg) {
  if (s.empty()) return std::nullopt;
  if (s == "optimal") return acfh::scheme_constants(cfg.params).rho_opt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && v > 0.0) return v;
  } catch (const std::exception&) {
  }
  throw acfh::ConfigError("--rho expects a positive number or 'optimal', got '" + s + "'");
}

int report(const std::vector<acfh::Assertion>& checks) {
  std::cout << acfh::render_assertions(checks);
  return acfh::all_passed(checks) ? kOk : kInvariantBreach;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Allen-Cahn / Flory-Huggins solver with an ADMM inner iteration"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string kind;
  std::string rho_text;
  std::optional<double> alpha;
  int step = 0;

  auto* simulate = app.add_subcommand("simulate", "Run the time-stepping loop");
  simulate->add_option("--config", config_path, "Config file")->required();
  simulate->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  simulate->add_option("--seed", seed, "Random seed (overrides seed)");

  auto* convergence = app.add_subcommand("convergence-study", "Spatial or temporal convergence table");
  convergence->add_option("--kind", kind, "spatial or temporal")->required()->check(
      CLI::IsMember({"spatial", "temporal"}));
  convergence->add_option("--config", config_path, "Config file")->required();

  auto* rate = app.add_subcommand("rate-study", "Contraction of R^(k) against 1/(1+delta(rho))");
  rate->add_option("--config", config_path, "Config file")->required();
  rate->add_option("--rho", rho_text, "Penalty value or 'optimal' (default: sweep rho_factors)");
  rate->add_option("--alpha", alpha, "Multiplier step (default 1)");

  auto* phi = app.add_subcommand("phi-sweep", "Phi-monotonicity over the alpha list");
  phi->add_option("--config", config_path, "Config file")->required();

  auto* diag = app.add_subcommand("diagnose", "Per-iteration trace of one time step");
  diag->add_option("--config", config_path, "Config file")->required();
  diag->add_option("--step", step, "Time step index (>= 1)")->required();
  diag->add_option("--rho", rho_text, "Fixed penalty value or 'optimal'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    acfh::RunConfig cfg = acfh::load_config(config_path);

    if (simulate->parsed()) {
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (seed) cfg.seed = *seed;
      const acfh::RunDiagnostics d = acfh::run(cfg);
      if (cfg.output_dir.empty()) {
        std::cout << d.to_csv();
      } else {
        std::cout << "steps " << d.records.size() - 1 << ", ADMM iterations " << d.total_iterations()
                  << ", final energy " << d.records.back().energy << "\n"
                  << "wrote " << (cfg.output_dir / "diagnostics.csv").string() << "\n";
      }
      return kOk;
    }

    if (convergence->parsed()) {
      const acfh::StudyKind k = acfh::parse_study_kind(kind);
      const acfh::RateTable t = k == acfh::StudyKind::spatial ? acfh::spatial_study(cfg) : acfh::temporal_study(cfg);
      std::cout << t.to_csv() << "\n";
      return k == acfh::StudyKind::spatial ? report(acfh::assess_rates(t, 1.85, 2.15))
                                           : report(acfh::assess_rates(t, 0.8, 1.3));
    }

    if (rate->parsed()) {
      std::vector<double> rhos;
      if (auto r = parse_rho_option(rho_text, cfg)) rhos.push_back(*r);
      const acfh::RateReport rep = acfh::rate_study(cfg, rhos, alpha.value_or(1.0));
      std::cout << rep.to_csv() << "\n" << rep.summary();
      return acfh::all_passed(rep.checks) ? kOk : kInvariantBreach;
    }

    if (phi->parsed()) {
      const acfh::PhiReport rep = acfh::phi_sweep(cfg);
      std::cout << rep.to_csv() << "\n" << rep.summary();
      return acfh::all_passed(rep.checks) ? kOk : kInvariantBreach;
    }

    if (diag->parsed()) {
      if (auto r = parse_rho_option(rho_text, cfg)) {
        cfg.admm.rho_policy = acfh::RhoPolicy::fixed;
        cfg.admm.rho0 = *r;
      }
      const acfh::DiagnoseResult res = acfh::diagnose(cfg, step);
      std::cout << res.trace.to_csv();
      return kOk;
    }
  } catch (const acfh::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const acfh::ContractError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const acfh::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const acfh::ConvergenceError& e) {
    std::cerr << "nonconvergence: " << e.what() << "\n";
    return kNonconvergence;
  } catch (const acfh::InvariantBreach& e) {
    std::cerr << "invariant breach: " << e.what() << "\n";
    return kInvariantBreach;
  } catch (const acfh::DomainError& e) {
    std::cerr << "invariant breach: " << e.what() << "\n";
    return kInvariantBreach;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
