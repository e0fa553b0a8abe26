// couette-lab: command line front end of the couette library.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "couette/config.hpp"
#include "couette/csv.hpp"
#include "couette/echo.hpp"
#include "couette/errors.hpp"
#include "couette/harness.hpp"
#include "couette/lemma_audit.hpp"
#include "couette/weights.hpp"

namespace {

using namespace couette;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

SimConfig config_or_default(const std::string& path) {
  return path.empty() ? parse_config("{}") : load_config(path);
}

int cmd_simulate(const std::string& config, const std::string& energy, const std::string& manifest) {
  SimConfig cfg = load_config(config);
  if (!energy.empty()) cfg.output.energy_csv = energy;
  if (!manifest.empty()) cfg.output.manifest = manifest;
  auto r = run_simulation(cfg);
  std::printf("model=%s outcome=%s max_ratio=%.6g final_ratio=%.6g decay_rate=%.6g steps=%zu wall=%.3fs\n",
              to_string(cfg.model.model).c_str(), to_string(r.outcome).c_str(), r.max_ratio,
              r.final_ratio, r.decay_rate, r.steps, r.wall_time);
  if (!r.failure.empty()) std::printf("failure: %s\n", r.failure.c_str());
  return kOk;
}

void print_bisect(const BisectResult& b) {
  std::printf("mu=%.6g eps_star=%.6g bracket=[%.6g, %.6g] probes=%zu\n", b.mu, b.eps_star, b.eps_stable,
              b.eps_unstable, b.records.size());
}

int cmd_sweep(const std::string& config, const std::vector<double>& mu_grid, int jobs,
              const std::string& records, const std::string& thresholds, std::optional<double> log_r,
              const BisectOptions& opt) {
  SimConfig cfg = load_config(config);
  auto results = sweep(cfg, mu_grid, opt, jobs);
  std::vector<SweepRecord> all;
  for (const auto& b : results) {
    print_bisect(b);
    all.insert(all.end(), b.records.begin(), b.records.end());
  }
  if (!records.empty()) write_sweep_csv(records, all);
  if (!thresholds.empty()) write_threshold_csv(thresholds, results);
  if (results.size() >= 3) {
    auto fit = fit_threshold_slope(results);
    std::printf("slope=%.4f stderr=%.4f\n", fit.slope, fit.stderr_slope);
    if (log_r) {
      auto corr = fit_threshold_slope(results, log_r);
      std::printf("log_corrected_slope=%.4f stderr=%.4f\n", corr.slope, corr.stderr_slope);
    }
  }
  return kOk;
}

int cmd_bisect(const std::string& config, const std::string& model, double mu, const std::string& records,
               const BisectOptions& opt) {
  SimConfig cfg = config_or_default(config);
  if (!model.empty() && model_from_string(model) != cfg.model.model) {
    cfg.model.model = model_from_string(model);
    cfg.sync_weights(false);
  }
  auto b = bisect_threshold(cfg, mu, opt);
  print_bisect(b);
  if (!records.empty()) write_sweep_csv(records, b.records);
  return kOk;
}

int cmd_echo(const EchoSweep& sw, const std::string& out) {
  auto recs = run_echo_sweep(sw);
  std::vector<std::string> header{"mu", "gamma", "r", "eta", "k_start", "eps_star", "Pi_at_star"};
  CsvWriter w;
  if (!out.empty()) w = CsvWriter(out, header);
  for (const auto& r : recs) {
    if (w.is_open())
      w.row({r.mu, r.gamma, r.r, r.eta, static_cast<long long>(r.k_start), r.eps_star, r.amplification});
    else
      std::printf("mu=%.3g gamma=%.3g eta=%.6g eps_star=%.6g Pi=%.6g\n", r.mu, r.gamma, r.eta, r.eps_star,
                  r.amplification);
  }
  for (double g : sw.gammas) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : recs)
      if (r.gamma == g) pts.emplace_back(r.mu, r.eps_star);
    if (pts.size() >= 3) std::printf("gamma=%.3g slope=%.4f\n", g, fit_threshold_slope(pts).slope);
  }
  return kOk;
}

struct DumpOptions {
  std::string config;
  std::string model;
  std::vector<double> times{0.0, 1.0, 10.0};
  int k_min = -4, k_max = 4;
  double eta_min = -20.0, eta_max = 20.0, eta_step = 1.0;
  std::string out;
};

int cmd_weights_dump(const DumpOptions& o) {
  SimConfig cfg = config_or_default(o.config);
  WeightModel wm = o.model.empty() ? weight_model_of(cfg.model.model) : weight_model_from_string(o.model);
  if (o.out.empty()) throw ConfigInvalid("weights dump needs --out");
  if (!(o.eta_step > 0.0) || o.k_min > o.k_max || o.eta_min > o.eta_max)
    throw ConfigInvalid("empty lattice");
  auto ks = static_cast<long>(std::floor((o.eta_max - o.eta_min) / o.eta_step + 1e-9));
  CsvWriter w(o.out, {"t", "k", "eta", "m_gamma", "m_tilde", "M_mu", "M_L", "m", "A", "dlog_m_dt"});
  for (double t : o.times)
    for (int k = o.k_min; k <= o.k_max; ++k)
      for (long n = 0; n <= ks; ++n) {
        double eta = o.eta_min + n * o.eta_step;
        auto c = eval_composite(cfg.weights, wm, t, k, eta);
        w.row({t, static_cast<long long>(k), eta, c.m_gamma.m, c.m_gamma.m_tilde, c.M_mu.value, c.M_L.value, c.m,
               c.A, c.dlog_m});
      }
  return kOk;
}

int cmd_verify(const std::vector<std::string>& lemmas, const std::string& config, const SampleSpec& spec,
               bool strict) {
  SimConfig cfg = config_or_default(config);
  std::vector<LemmaId> ids;
  for (const auto& l : lemmas) {
    if (l == "all") {
      ids = {LemmaId::MGamma, LemmaId::MMu, LemmaId::MLTheta, LemmaId::MAlpha, LemmaId::Admissible};
      break;
    }
    ids.push_back(lemma_from_string(l));
  }
  bool all_ok = true;
  for (LemmaId id : ids) {
    auto rep = audit_lemma(id, cfg.weights, spec);
    for (const auto& it : rep.items) {
      const char* tag = it.passed ? "PASS" : (it.gating ? "FAIL" : "INFO");
      if (it.exact)
        std::printf("%s %s/%s exact violations=%zu/%zu worst=%.3g %s\n", tag, to_string(id).c_str(),
                    it.name.c_str(), it.violations, it.samples, it.worst, it.note.c_str());
      else
        std::printf("%s %s/%s constant=%.4g (half sample %.4g) stable=%d %s\n", tag, to_string(id).c_str(),
                    it.name.c_str(), it.worst, it.constant_half, it.stable ? 1 : 0, it.note.c_str());
    }
    all_ok = all_ok && rep.passed();
  }
  return strict && !all_ok ? kNumericalFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral Couette perturbation lab"};
  app.require_subcommand(1);

  std::string config, energy, manifest, records, thresholds, model, out;
  int jobs = 1;
  double mu = 1e-3;
  std::optional<double> log_r;
  std::vector<double> mu_grid{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  BisectOptions bopt;

  auto* sim = app.add_subcommand("simulate", "Run one simulation from a config file");
  sim->add_option("--config", config, "SimConfig JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--energy-csv", energy, "Energy CSV path (overrides the config)");
  sim->add_option("--manifest", manifest, "Run manifest path (overrides the config)");

  auto add_bisect_opts = [&](CLI::App* c) {
    c->add_option("--guess-factor", bopt.guess_factor, "First probe is this times mu^{1/3}");
    c->add_option("--rel-tol", bopt.rel_tol, "Relative bracket width at termination");
    c->add_option("--eps-min", bopt.eps_min);
    c->add_option("--eps-max", bopt.eps_max);
    c->add_option("--max-probes", bopt.max_probes);
  };

  auto* sw = app.add_subcommand("sweep", "Threshold bisection over a mu grid");
  sw->add_option("--config", config, "Template SimConfig JSON")->required()->check(CLI::ExistingFile);
  sw->add_option("--mu-grid", mu_grid, "Dissipation values")->delimiter(',');
  sw->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sw->add_option("--records", records, "CSV of every probe");
  sw->add_option("--thresholds", thresholds, "CSV of bisected thresholds");
  sw->add_option("--log-r", log_r, "Also fit ln(eps* |ln mu|^{1+r})");
  add_bisect_opts(sw);

  auto* bi = app.add_subcommand("bisect", "Threshold bisection at one mu");
  bi->add_option("--config", config, "Template SimConfig JSON")->check(CLI::ExistingFile);
  bi->add_option("--model", model, "ns | boussinesq | mhd_horizontal | mhd_vertical");
  bi->add_option("--mu", mu, "Dissipation")->required();
  bi->add_option("--records", records, "CSV of every probe");
  add_bisect_opts(bi);

  EchoSweep esw;
  std::string window = "tiled";
  auto* ec = app.add_subcommand("echo", "Critical epsilon of the resonance-cascade toy model");
  ec->add_option("--mu-grid", esw.mu_grid)->delimiter(',');
  ec->add_option("--gamma", esw.gammas, "Kernel exponents")->delimiter(',');
  ec->add_option("--r", esw.r, "Log-correction exponent (recorded)");
  ec->add_option("--eta-scale", esw.eta_scale, "eta = scale * mu^{-1/3}");
  ec->add_option("--k-start", esw.k_start, "Top mode of the chain");
  ec->add_option("--threshold", esw.options.threshold, "Amplification defining instability");
  ec->add_option("--window", window, "tiled | full");
  ec->add_option("--out", out, "CSV output (stdout listing if omitted)");

  DumpOptions dump;
  auto* wt = app.add_subcommand("weights", "Weight utilities");
  wt->require_subcommand(1);
  auto* wd = wt->add_subcommand("dump", "Tabulate the weights on a lattice");
  wd->add_option("--config", dump.config, "SimConfig JSON for the weight parameters")->check(CLI::ExistingFile);
  wd->add_option("--model", dump.model, "Weight model override");
  wd->add_option("--t", dump.times, "Times")->delimiter(',');
  wd->add_option("--k-min", dump.k_min);
  wd->add_option("--k-max", dump.k_max);
  wd->add_option("--eta-min", dump.eta_min);
  wd->add_option("--eta-max", dump.eta_max);
  wd->add_option("--eta-step", dump.eta_step);
  wd->add_option("--out", dump.out, "CSV output")->required();

  std::vector<std::string> lemmas{"all"};
  SampleSpec ss;
  bool strict = false;
  auto* vl = app.add_subcommand("verify-lemmas", "Sampled audit of the weight properties");
  vl->add_option("--lemma", lemmas, "m_gamma | M_mu | M_L_theta | M_alpha | admissible | all")->delimiter(',');
  vl->add_option("--samples", ss.samples, "Samples per property");
  vl->add_option("--seed", ss.seed);
  vl->add_option("--config", config, "SimConfig JSON for the weight parameters")->check(CLI::ExistingFile);
  vl->add_flag("--strict", strict, "Exit 3 when a gating item fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config, energy, manifest);
    if (sw->parsed()) return cmd_sweep(config, mu_grid, jobs, records, thresholds, log_r, bopt);
    if (bi->parsed()) return cmd_bisect(config, model, mu, records, bopt);
    if (ec->parsed()) {
      esw.options.window = echo_window_from_string(window);
      return cmd_echo(esw, out);
    }
    if (wd->parsed()) return cmd_weights_dump(dump);
    if (vl->parsed()) return cmd_verify(lemmas, config, ss, strict);
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return e.kind() == ErrorKind::Config ? kConfigError : kNumericalFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumericalFailure;
  }
  return kOk;
}
