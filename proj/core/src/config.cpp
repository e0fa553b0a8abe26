#include "couette/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "couette/errors.hpp"
#include "json.hpp"

namespace couette {

namespace {

using nlohmann::json;

void allow_keys(const json& obj, const char* section, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigInvalid(std::string("section '") + section + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* k : keys) ok = ok || key == k;
    if (!ok) throw ConfigInvalid(std::string("unknown key '") + key + "' in '" + section + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigInvalid(std::string("bad value for '") + key + "': " + e.what());
  }
}

BracketMode bracket_from_string(const std::string& s) {
  if (s == "square") return BracketMode::Square;
  if (s == "absolute") return BracketMode::Absolute;
  throw ConfigInvalid("unknown bracket mode '" + s + "'");
}

const char* bracket_name(BracketMode m) { return m == BracketMode::Square ? "square" : "absolute"; }

}  // namespace

std::string to_string(InitialProfile p) {
  switch (p) {
    case InitialProfile::Random: return "random";
    case InitialProfile::SingleMode: return "single_mode";
    case InitialProfile::EchoPair: return "echo_pair";
  }
  return "random";
}

InitialProfile initial_profile_from_string(const std::string& s) {
  if (s == "random") return InitialProfile::Random;
  if (s == "single_mode") return InitialProfile::SingleMode;
  if (s == "echo_pair") return InitialProfile::EchoPair;
  throw ConfigInvalid("unknown initial profile '" + s + "'");
}

double SimConfig::mu() const {
  if (model.model == ModelKind::NavierStokes) return model.nu;
  return std::min(model.nu, model.kappa);
}

double SimConfig::resolved_t_end() const {
  if (t_end) return *t_end;
  return classifier.t_mult / std::cbrt(mu());
}

void SimConfig::sync_weights(bool keep_gamma) {
  weights.mu = mu();
  weights.beta = model.beta;
  weights.alpha = model.alpha;
  weights.nu = model.nu;
  weights.kappa = model.kappa;
  if (!keep_gamma) {
    weights.gamma = model_gamma(weight_model_of(model.model));
    weights.gamma_tilde = model.model == ModelKind::NavierStokes ? 0.0 : weights.gamma;
  }
}

void SimConfig::set_mu(double m) {
  model.nu = m;
  model.kappa = m;
  weights.mu = m;
  weights.nu = m;
  weights.kappa = m;
}

void SimConfig::validate() const {
  model.validate();
  grid.make();
  weights.validate();
  if (!(mu() > 0.0)) throw ConfigInvalid("dissipation must be positive");
  StepperConfig s = stepper;
  s.t_end = resolved_t_end();
  s.validate();
  if (s.t_end < 1.0) throw ConfigInvalid("t_end must be at least 1 (the classifier reference time)");
  if (!(initial.epsilon >= 0.0)) throw ConfigInvalid("epsilon must be non-negative");
  if (initial.band_k < 0 || initial.band_j < 0) throw ConfigInvalid("band limits must be non-negative");
  if (!(diagnostics.cadence > 0.0)) throw ConfigInvalid("cadence must be positive");
  if (!(diagnostics.transient_fraction >= 0.0)) throw ConfigInvalid("transient_fraction must be >= 0");
  if (!(classifier.g_stable > 0.0 && classifier.g_unstable > classifier.g_stable))
    throw ConfigInvalid("need 0 < g_stable < g_unstable");
  if (!(classifier.t_mult > 0.0)) throw ConfigInvalid("t_mult must be positive");
}

SimConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigInvalid(std::string("malformed JSON: ") + e.what());
  }
  allow_keys(doc, "root",
             {"model", "grid", "weights", "stepper", "initial", "diagnostics", "classifier", "output"});
  SimConfig cfg;
  bool gamma_given = false;

  if (doc.contains("model")) {
    const auto& m = doc["model"];
    allow_keys(m, "model", {"type", "nu", "kappa", "mu", "beta", "alpha", "linear"});
    std::string type = "ns";
    read(m, "type", type);
    cfg.model.model = model_from_string(type);
    if (m.contains("mu")) {
      double mu = 0.0;
      read(m, "mu", mu);
      cfg.model.nu = cfg.model.kappa = mu;
    }
    read(m, "nu", cfg.model.nu);
    read(m, "kappa", cfg.model.kappa);
    read(m, "beta", cfg.model.beta);
    read(m, "alpha", cfg.model.alpha);
    read(m, "linear", cfg.model.linear);
  }
  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    allow_keys(g, "grid", {"nx", "ny", "ly", "dealias_fraction"});
    read(g, "nx", cfg.grid.nx);
    read(g, "ny", cfg.grid.ny);
    read(g, "ly", cfg.grid.ly);
    read(g, "dealias_fraction", cfg.grid.dealias_fraction);
  }
  cfg.sync_weights(false);
  if (doc.contains("weights")) {
    const auto& w = doc["weights"];
    allow_keys(w, "weights",
               {"gamma", "gamma_tilde", "r", "c", "N", "bracket", "n_max", "tail_tolerance", "c1",
                "c2", "use_m_gamma", "use_M_L", "use_M_mu"});
    gamma_given = w.contains("gamma") || w.contains("gamma_tilde");
    read(w, "gamma", cfg.weights.gamma);
    read(w, "gamma_tilde", cfg.weights.gamma_tilde);
    read(w, "r", cfg.weights.r);
    read(w, "c", cfg.weights.c);
    read(w, "N", cfg.weights.N);
    if (w.contains("bracket")) cfg.weights.bracket_mode = bracket_from_string(w["bracket"].get<std::string>());
    read(w, "n_max", cfg.weights.n_max);
    read(w, "tail_tolerance", cfg.weights.tail_tolerance);
    read(w, "c1", cfg.weights.c1);
    read(w, "c2", cfg.weights.c2);
    read(w, "use_m_gamma", cfg.weights.use_m_gamma);
    read(w, "use_M_L", cfg.weights.use_M_L);
    read(w, "use_M_mu", cfg.weights.use_M_mu);
  }
  cfg.sync_weights(gamma_given);
  if (doc.contains("stepper")) {
    const auto& s = doc["stepper"];
    allow_keys(s, "stepper", {"dt", "scheme", "t_end", "cfl_safety", "adapt", "dt_min"});
    read(s, "dt", cfg.stepper.dt);
    if (s.contains("scheme")) cfg.stepper.scheme = scheme_from_string(s["scheme"].get<std::string>());
    if (s.contains("t_end") && !s["t_end"].is_null()) {
      double te = 0.0;
      read(s, "t_end", te);
      cfg.t_end = te;
    }
    read(s, "cfl_safety", cfg.stepper.cfl_safety);
    read(s, "adapt", cfg.stepper.adapt);
    read(s, "dt_min", cfg.stepper.dt_min);
  }
  if (doc.contains("initial")) {
    const auto& in = doc["initial"];
    allow_keys(in, "initial", {"profile", "epsilon", "seed", "band_k", "band_j", "k", "j", "k2", "j2"});
    if (in.contains("profile")) cfg.initial.profile = initial_profile_from_string(in["profile"].get<std::string>());
    read(in, "epsilon", cfg.initial.epsilon);
    read(in, "seed", cfg.initial.seed);
    read(in, "band_k", cfg.initial.band_k);
    read(in, "band_j", cfg.initial.band_j);
    read(in, "k", cfg.initial.k);
    read(in, "j", cfg.initial.j);
    read(in, "k2", cfg.initial.k2);
    read(in, "j2", cfg.initial.j2);
  }
  if (doc.contains("diagnostics")) {
    const auto& d = doc["diagnostics"];
    allow_keys(d, "diagnostics",
               {"cadence", "transfer", "transfer_pair_budget", "transfer_lab_frame_perp", "transient_fraction"});
    read(d, "cadence", cfg.diagnostics.cadence);
    read(d, "transfer", cfg.diagnostics.transfer);
    read(d, "transfer_pair_budget", cfg.diagnostics.transfer_pair_budget);
    read(d, "transfer_lab_frame_perp", cfg.diagnostics.transfer_lab_frame_perp);
    read(d, "transient_fraction", cfg.diagnostics.transient_fraction);
  }
  if (doc.contains("classifier")) {
    const auto& c = doc["classifier"];
    allow_keys(c, "classifier", {"g_stable", "g_unstable", "t_mult"});
    read(c, "g_stable", cfg.classifier.g_stable);
    read(c, "g_unstable", cfg.classifier.g_unstable);
    read(c, "t_mult", cfg.classifier.t_mult);
  }
  if (doc.contains("output")) {
    const auto& o = doc["output"];
    allow_keys(o, "output", {"energy_csv", "manifest"});
    read(o, "energy_csv", cfg.output.energy_csv);
    read(o, "manifest", cfg.output.manifest);
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const SimConfig& cfg) {
  json j;
  j["model"] = {{"type", to_string(cfg.model.model)}, {"nu", cfg.model.nu}, {"kappa", cfg.model.kappa},
                {"beta", cfg.model.beta}, {"alpha", cfg.model.alpha}, {"linear", cfg.model.linear}};
  j["grid"] = {{"nx", cfg.grid.nx}, {"ny", cfg.grid.ny}, {"ly", cfg.grid.ly},
               {"dealias_fraction", cfg.grid.dealias_fraction}};
  const auto& w = cfg.weights;
  j["weights"] = {{"gamma", w.gamma}, {"gamma_tilde", w.gamma_tilde}, {"r", w.r}, {"c", w.c}, {"N", w.N},
                  {"bracket", bracket_name(w.bracket_mode)}, {"n_max", w.n_max},
                  {"tail_tolerance", w.tail_tolerance}, {"c1", w.c1}, {"c2", w.c2},
                  {"use_m_gamma", w.use_m_gamma}, {"use_M_L", w.use_M_L}, {"use_M_mu", w.use_M_mu}};
  j["stepper"] = {{"dt", cfg.stepper.dt}, {"scheme", to_string(cfg.stepper.scheme)},
                  {"t_end", cfg.resolved_t_end()}, {"cfl_safety", cfg.stepper.cfl_safety},
                  {"adapt", cfg.stepper.adapt}, {"dt_min", cfg.stepper.dt_min}};
  const auto& in = cfg.initial;
  j["initial"] = {{"profile", to_string(in.profile)}, {"epsilon", in.epsilon}, {"seed", in.seed},
                  {"band_k", in.band_k}, {"band_j", in.band_j}, {"k", in.k}, {"j", in.j},
                  {"k2", in.k2}, {"j2", in.j2}};
  const auto& d = cfg.diagnostics;
  j["diagnostics"] = {{"cadence", d.cadence}, {"transfer", d.transfer},
                      {"transfer_pair_budget", d.transfer_pair_budget},
                      {"transfer_lab_frame_perp", d.transfer_lab_frame_perp},
                      {"transient_fraction", d.transient_fraction}};
  j["classifier"] = {{"g_stable", cfg.classifier.g_stable}, {"g_unstable", cfg.classifier.g_unstable},
                     {"t_mult", cfg.classifier.t_mult}};
  j["output"] = {{"energy_csv", cfg.output.energy_csv}, {"manifest", cfg.output.manifest}};
  return j.dump();
}

std::string config_hash(const SimConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace couette
