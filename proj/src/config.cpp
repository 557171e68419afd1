#include "qrc/config.hpp"

#include "qrc/rng.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace qrc {

using nlohmann::json;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::phase_diagram: return "phase-diagram";
    case ExperimentKind::correlations: return "correlations";
    case ExperimentKind::trajectories: return "trajectories";
    case ExperimentKind::ipc: return "ipc";
    case ExperimentKind::ipc_vs_correlations: return "ipc-vs-correlations";
    case ExperimentKind::stationary_stats: return "stationary-stats";
  }
  return "ipc";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (auto k : {ExperimentKind::phase_diagram, ExperimentKind::correlations, ExperimentKind::trajectories,
                 ExperimentKind::ipc, ExperimentKind::ipc_vs_correlations, ExperimentKind::stationary_stats}) {
    if (to_string(k) == text) return k;
  }
  throw Error("unknown experiment kind '" + std::string(text) + "'");
}

ObservableSet ObservableChoice::build(int n_qubits) const {
  if (set == "custom") {
    std::vector<PauliString> list;
    for (const auto& s : strings) list.emplace_back(s);
    auto out = ObservableSet::custom(std::move(list), multiplex);
    out.validate(n_qubits);
    return out;
  }
  if (!strings.empty()) throw Error("'strings' is only allowed with the custom observable set");
  return ObservableSet::named(set, n_qubits, multiplex);
}

std::string ObservableChoice::label() const {
  std::string base = set;
  if (set == "custom") {
    base.clear();
    for (const auto& s : strings) base += (base.empty() ? "" : "+") + s;
  }
  return multiplex == 1 ? base : base + "@V" + std::to_string(multiplex);
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw Error("'" + where + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.contains(key)) throw Error("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error("bad value for '" + std::string(key) + "' in " + where + ": " + e.what());
  }
}

template <typename T, typename Parse>
void read_parsed(const json& j, const char* key, T& out, Parse parse, const std::string& where) {
  if (!j.contains(key)) return;
  std::string text;
  read(j, key, text, where);
  out = parse(text);
}

ObservableChoice parse_observables(const json& j, const std::string& where) {
  check_keys(j, {"set", "strings", "multiplex"}, where);
  ObservableChoice c;
  read(j, "set", c.set, where);
  read(j, "strings", c.strings, where);
  read(j, "multiplex", c.multiplex, where);
  return c;
}

json observables_json(const ObservableChoice& c) {
  json j{{"set", c.set}, {"multiplex", c.multiplex}};
  if (c.set == "custom") j["strings"] = c.strings;
  return j;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (realizations < 1) throw Error("realizations must be >= 1");
  if (scale != "desk" && scale != "paper") throw Error("scale must be 'desk' or 'paper'");
  run.validate();
  ipc.validate();
  if (phase.realizations < 1 || phase.coherence_realizations < 0) throw Error("bad phase realization counts");
  if (correlations.window < 1 || correlations.realizations < 1) throw Error("bad correlation settings");
  if (trajectory.count < 1) throw Error("trajectory window must hold at least one injection");
  for (double p : sweep.p_err) {
    if (!(p >= 0.0 && p <= 0.5)) throw Error("swept p_err must lie in [0, 0.5]");
  }
  for (const auto& o : sweep.observables) o.build(run.model.n_qubits);
}

std::size_t ExperimentConfig::ipc_length() const { return scale == "paper" ? 100000 : 10000; }

ExperimentConfig parse_config(const json& j, std::optional<std::uint64_t> seed_override) {
  check_keys(j, {"kind", "seed", "realizations", "scale", "output", "write_targets", "model", "run", "noise",
                 "observables", "ipc", "sweep", "phase", "correlations", "trajectory"},
             "config");
  ExperimentConfig c;
  read_parsed(j, "kind", c.kind, parse_experiment_kind, "config");
  if (seed_override) {
    c.seed = *seed_override;
  } else if (j.contains("seed")) {
    read(j, "seed", c.seed, "config");
  } else {
    throw Error("config must set a master 'seed'");
  }
  read(j, "realizations", c.realizations, "config");
  read(j, "scale", c.scale, "config");
  read(j, "output", c.output, "config");
  read(j, "write_targets", c.write_targets, "config");

  auto& m = c.run.model;
  if (j.contains("model")) {
    const json& o = j["model"];
    check_keys(o, {"n_qubits", "h", "W", "epsilon"}, "model");
    read(o, "n_qubits", m.n_qubits, "model");
    read(o, "h", m.h, "model");
    read(o, "W", m.W, "model");
    read(o, "epsilon", m.epsilon, "model");
  }
  m.seed = c.seed;

  if (j.contains("run")) {
    const json& o = j["run"];
    check_keys(o, {"delta_t", "washout", "length", "encoding", "readout_sigma", "initial", "propagation"}, "run");
    read(o, "delta_t", c.run.delta_t, "run");
    read(o, "washout", c.run.washout, "run");
    read(o, "length", c.run.length, "run");
    read_parsed(o, "encoding", c.run.encoding, parse_encoding, "run");
    read(o, "readout_sigma", c.run.readout_sigma, "run");
    read_parsed(o, "initial", c.run.initial, parse_initial_state, "run");
    read_parsed(o, "propagation", c.run.propagation,
                [](const std::string& s) {
                  if (s == "transfer") return Propagation::transfer;
                  if (s == "dense") return Propagation::dense;
                  throw Error("unknown propagation '" + s + "'");
                },
                "run");
  }

  if (j.contains("noise")) {
    const json& o = j["noise"];
    check_keys(o, {"axis", "p_err", "gamma", "eta"}, "noise");
    read_parsed(o, "axis", c.run.noise.axis, parse_noise_axis, "noise");
    read(o, "eta", c.run.noise.eta, "noise");
    if (o.contains("p_err") && o.contains("gamma")) throw Error("give either p_err or gamma, not both");
    read(o, "p_err", c.run.noise.p_err, "noise");
    if (o.contains("gamma")) {
      double gamma = 0.0;
      read(o, "gamma", gamma, "noise");
      if (c.run.noise.eta < 1) throw Error("eta must be >= 1");
      c.run.noise.p_err = perr_from_gamma(gamma, c.run.delta_t / c.run.noise.eta);
    }
  }

  if (j.contains("observables")) c.observables = parse_observables(j["observables"], "observables");

  if (j.contains("ipc")) {
    const json& o = j["ipc"];
    check_keys(o, {"d_max", "max_delay_linear", "max_delay", "stop_after", "surrogates", "min_shift", "sigmas",
                   "stop_sigmas", "max_targets_per_degree"},
               "ipc");
    read(o, "d_max", c.ipc.d_max, "ipc");
    read(o, "max_delay_linear", c.ipc.max_delay_linear, "ipc");
    read(o, "max_delay", c.ipc.max_delay, "ipc");
    read(o, "stop_after", c.ipc.stop_after, "ipc");
    read(o, "surrogates", c.ipc.surrogates, "ipc");
    read(o, "min_shift", c.ipc.min_shift, "ipc");
    read(o, "sigmas", c.ipc.sigmas, "ipc");
    read(o, "stop_sigmas", c.ipc.stop_sigmas, "ipc");
    read(o, "max_targets_per_degree", c.ipc.max_targets_per_degree, "ipc");
  }
  c.ipc.seed = c.seed;

  if (j.contains("sweep")) {
    const json& o = j["sweep"];
    check_keys(o, {"W", "h", "epsilon", "axes", "p_err", "encodings", "observables"}, "sweep");
    read(o, "W", c.sweep.W, "sweep");
    read(o, "h", c.sweep.h, "sweep");
    read(o, "epsilon", c.sweep.epsilon, "sweep");
    read(o, "p_err", c.sweep.p_err, "sweep");
    std::vector<std::string> names;
    read(o, "axes", names, "sweep");
    for (const auto& n : names) c.sweep.axes.push_back(parse_noise_axis(n));
    names.clear();
    read(o, "encodings", names, "sweep");
    for (const auto& n : names) c.sweep.encodings.push_back(parse_encoding(n));
    if (o.contains("observables")) {
      if (!o["observables"].is_array()) throw Error("sweep.observables must be a list");
      for (const auto& e : o["observables"]) c.sweep.observables.push_back(parse_observables(e, "sweep.observables"));
    }
  }

  if (j.contains("phase")) {
    const json& o = j["phase"];
    check_keys(o, {"h", "W", "realizations", "coherence_realizations", "coherence_washout", "coherence_window",
                   "resolve_parity", "edge_trim"},
               "phase");
    read(o, "h", c.phase.h_values, "phase");
    read(o, "W", c.phase.W_values, "phase");
    read(o, "realizations", c.phase.realizations, "phase");
    read(o, "coherence_realizations", c.phase.coherence_realizations, "phase");
    read(o, "coherence_washout", c.phase.coherence_washout, "phase");
    read(o, "coherence_window", c.phase.coherence_window, "phase");
    read(o, "resolve_parity", c.phase.gap.resolve_parity, "phase");
    read(o, "edge_trim", c.phase.gap.edge_trim, "phase");
  }
  if (c.phase.h_values.empty()) c.phase.h_values = default_phase_grid().h_values;
  if (c.phase.W_values.empty()) c.phase.W_values = default_phase_grid().W_values;

  if (j.contains("correlations")) {
    const json& o = j["correlations"];
    check_keys(o, {"washout", "window", "negativity", "realizations"}, "correlations");
    read(o, "washout", c.correlations.washout, "correlations");
    read(o, "window", c.correlations.window, "correlations");
    read(o, "negativity", c.correlations.negativity, "correlations");
    read(o, "realizations", c.correlations.realizations, "correlations");
  } else {
    c.correlations.realizations = c.realizations;
  }

  if (j.contains("trajectory")) {
    const json& o = j["trajectory"];
    check_keys(o, {"offset", "count"}, "trajectory");
    read(o, "offset", c.trajectory.offset, "trajectory");
    read(o, "count", c.trajectory.count, "trajectory");
  }

  c.run.observables = c.observables.build(m.n_qubits);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw Error("cannot parse " + path.string() + ": " + e.what());
  }
  return parse_config(j, seed_override);
}

json to_json(const ExperimentConfig& c) {
  json sweep{{"W", c.sweep.W}, {"h", c.sweep.h}, {"epsilon", c.sweep.epsilon}, {"p_err", c.sweep.p_err}};
  sweep["axes"] = json::array();
  for (auto a : c.sweep.axes) sweep["axes"].push_back(to_string(a));
  sweep["encodings"] = json::array();
  for (auto e : c.sweep.encodings) sweep["encodings"].push_back(to_string(e));
  sweep["observables"] = json::array();
  for (const auto& o : c.sweep.observables) sweep["observables"].push_back(observables_json(o));

  return json{
      {"kind", to_string(c.kind)},
      {"seed", c.seed},
      {"realizations", c.realizations},
      {"scale", c.scale},
      {"write_targets", c.write_targets},
      {"model", {{"n_qubits", c.run.model.n_qubits}, {"h", c.run.model.h}, {"W", c.run.model.W},
                 {"epsilon", c.run.model.epsilon}}},
      {"run", {{"delta_t", c.run.delta_t}, {"washout", c.run.washout}, {"length", c.run.length},
               {"encoding", to_string(c.run.encoding)}, {"readout_sigma", c.run.readout_sigma},
               {"initial", to_string(c.run.initial)},
               {"propagation", c.run.propagation == Propagation::dense ? "dense" : "transfer"}}},
      {"noise", {{"axis", to_string(c.run.noise.axis)}, {"p_err", c.run.noise.p_err}, {"eta", c.run.noise.eta}}},
      {"observables", observables_json(c.observables)},
      {"ipc", {{"d_max", c.ipc.d_max}, {"max_delay_linear", c.ipc.max_delay_linear}, {"max_delay", c.ipc.max_delay},
               {"stop_after", c.ipc.stop_after}, {"surrogates", c.ipc.surrogates}, {"min_shift", c.ipc.min_shift},
               {"sigmas", c.ipc.sigmas}, {"stop_sigmas", c.ipc.stop_sigmas},
               {"max_targets_per_degree", c.ipc.max_targets_per_degree}}},
      {"sweep", sweep},
      {"phase", {{"h", c.phase.h_values}, {"W", c.phase.W_values}, {"realizations", c.phase.realizations},
                 {"coherence_realizations", c.phase.coherence_realizations},
                 {"coherence_washout", c.phase.coherence_washout}, {"coherence_window", c.phase.coherence_window},
                 {"resolve_parity", c.phase.gap.resolve_parity}, {"edge_trim", c.phase.gap.edge_trim}}},
      {"correlations", {{"washout", c.correlations.washout}, {"window", c.correlations.window},
                        {"negativity", c.correlations.negativity}, {"realizations", c.correlations.realizations}}},
      {"trajectory", {{"offset", c.trajectory.offset}, {"count", c.trajectory.count}}},
  };
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json(config).dump())));
  return buf;
}

}  // namespace qrc
