#include "chanspec/config.hpp"

#include "chanspec/estimation.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace chanspec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

TomlValue parse_value(const std::string& raw);

TomlValue parse_array(const std::string& raw) {
  TomlValue v;
  v.kind = TomlValue::Kind::Array;
  std::string inner = strip(raw.substr(1, raw.size() - 2));
  if (inner.empty()) return v;
  // Split at top-level commas.
  int depth = 0;
  bool in_str = false;
  std::string cur;
  auto flush = [&]() {
    std::string item = strip(cur);
    if (!item.empty()) v.array.push_back(parse_value(item));
    cur.clear();
  };
  for (char c : inner) {
    if (c == '"') in_str = !in_str;
    if (!in_str) {
      if (c == '[') ++depth;
      if (c == ']') --depth;
      if (c == ',' && depth == 0) {
        flush();
        continue;
      }
    }
    cur.push_back(c);
  }
  flush();
  return v;
}

TomlValue parse_value(const std::string& raw) {
  TomlValue v;
  if (raw.empty()) {
    throw std::invalid_argument("toml: empty value");
  }
  if (raw.front() == '[') {
    if (raw.back() != ']') throw std::invalid_argument("toml: unterminated array");
    return parse_array(raw);
  }
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') {
      throw std::invalid_argument("toml: unterminated string");
    }
    v.kind = TomlValue::Kind::String;
    v.str = raw.substr(1, raw.size() - 2);
    return v;
  }
  if (raw == "true" || raw == "false") {
    v.kind = TomlValue::Kind::Bool;
    v.boolean = raw == "true";
    return v;
  }
  v.kind = TomlValue::Kind::Number;
  size_t pos = 0;
  v.number = std::stod(raw, &pos);
  if (pos != raw.size()) {
    throw std::invalid_argument("toml: bad number '" + raw + "'");
  }
  return v;
}

}  // namespace

TomlDoc parse_toml(const std::string& text) {
  TomlDoc doc;
  TomlTable* current = &doc.tables[""];
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = strip(strip_comment(line));
    if (s.empty()) continue;
    try {
      if (s.size() >= 4 && s.substr(0, 2) == "[[" && s.substr(s.size() - 2) == "]]") {
        std::string name = strip(s.substr(2, s.size() - 4));
        doc.table_arrays[name].emplace_back();
        current = &doc.table_arrays[name].back();
      } else if (s.front() == '[' && s.back() == ']') {
        std::string name = strip(s.substr(1, s.size() - 2));
        current = &doc.tables[name];
      } else {
        size_t eq = s.find('=');
        if (eq == std::string::npos) {
          throw std::invalid_argument("toml: expected key = value");
        }
        std::string key = strip(s.substr(0, eq));
        std::string val = strip(s.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("toml: empty key");
        (*current)[key] = parse_value(val);
      }
    } catch (const std::exception& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return doc;
}

TomlDoc load_toml(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_toml(ss.str());
}

namespace {

const TomlValue* find(const TomlTable& t, const std::string& key) {
  auto it = t.find(key);
  return it == t.end() ? nullptr : &it->second;
}

double get_number(const TomlTable& t, const std::string& key, double def) {
  const TomlValue* v = find(t, key);
  if (!v) return def;
  if (v->kind != TomlValue::Kind::Number) {
    throw std::invalid_argument("config: '" + key + "' must be a number");
  }
  return v->number;
}

bool get_bool(const TomlTable& t, const std::string& key, bool def) {
  const TomlValue* v = find(t, key);
  if (!v) return def;
  if (v->kind != TomlValue::Kind::Bool) {
    throw std::invalid_argument("config: '" + key + "' must be a boolean");
  }
  return v->boolean;
}

std::string get_string(const TomlTable& t, const std::string& key, const std::string& def) {
  const TomlValue* v = find(t, key);
  if (!v) return def;
  if (v->kind != TomlValue::Kind::String) {
    throw std::invalid_argument("config: '" + key + "' must be a string");
  }
  return v->str;
}

std::vector<double> get_number_list(const TomlTable& t, const std::string& key) {
  const TomlValue* v = find(t, key);
  if (!v) return {};
  if (v->kind == TomlValue::Kind::Number) return {v->number};
  if (v->kind != TomlValue::Kind::Array) {
    throw std::invalid_argument("config: '" + key + "' must be a number or array");
  }
  std::vector<double> out;
  for (const TomlValue& e : v->array) {
    if (e.kind != TomlValue::Kind::Number) {
      throw std::invalid_argument("config: '" + key + "' must contain numbers");
    }
    out.push_back(e.number);
  }
  return out;
}

std::vector<std::array<double, 3>> get_vec3_list(const TomlTable& t, const std::string& key) {
  const TomlValue* v = find(t, key);
  if (!v) return {};
  if (v->kind != TomlValue::Kind::Array) {
    throw std::invalid_argument("config: '" + key + "' must be an array of [x,y,z]");
  }
  std::vector<std::array<double, 3>> out;
  for (const TomlValue& e : v->array) {
    if (e.kind != TomlValue::Kind::Array || e.array.size() != 3) {
      throw std::invalid_argument("config: '" + key + "' entries must be [x,y,z]");
    }
    out.push_back({e.array[0].number, e.array[1].number, e.array[2].number});
  }
  return out;
}

std::vector<PauliTerm> get_terms(const TomlDoc& doc, const std::string& name) {
  std::vector<PauliTerm> out;
  auto it = doc.table_arrays.find(name);
  if (it == doc.table_arrays.end()) return out;
  for (const TomlTable& t : it->second) {
    PauliTerm term;
    term.coeff_rad_s = kTwoPi * get_number(t, "coeff_hz", 0.0);
    for (double s : get_number_list(t, "sites")) {
      term.sites.push_back(static_cast<int>(s));
    }
    term.axes = get_string(t, "axes", "");
    out.push_back(std::move(term));
  }
  return out;
}

}  // namespace

RunConfig RunConfig::from_doc(const TomlDoc& doc) {
  RunConfig cfg;
  auto model_it = doc.tables.find("model");
  if (model_it == doc.tables.end()) {
    throw std::invalid_argument("config: missing [model] section");
  }
  const TomlTable& m = model_it->second;
  cfg.model.kind = get_string(m, "kind", "");
  cfg.model.omega_hz = get_number(m, "omega_hz", 0.0);
  cfg.model.g_hz = get_number(m, "g_hz", 0.0);
  cfg.model.d_hz = get_number_list(m, "d_hz");
  cfg.model.h_hz = get_number_list(m, "h_hz");
  cfg.model.h_dirs = get_vec3_list(m, "h_dirs");
  cfg.model.spins = static_cast<int>(get_number(m, "spins", 0));
  cfg.model.tau_a_s = get_number(m, "tau_a_s", 0.0);
  cfg.model.tau_b_s = get_number(m, "tau_b_s", 0.0);
  cfg.model.phi_rad = get_number(m, "phi_rad", 1.5707963267948966);
  cfg.model.include_free_b = get_bool(m, "include_free_b", false);
  cfg.model.a_terms = get_terms(doc, "model.a_terms");
  cfg.model.b_terms = get_terms(doc, "model.b_terms");

  if (auto it = doc.tables.find("simulation"); it != doc.tables.end()) {
    const TomlTable& s = it->second;
    cfg.simulation.cycles = static_cast<int>(get_number(s, "cycles", 2));
    cfg.simulation.samples = static_cast<std::uint64_t>(get_number(s, "samples", 1));
    cfg.simulation.seed = static_cast<std::uint64_t>(get_number(s, "seed", 0));
    cfg.simulation.outcome = static_cast<int>(get_number(s, "outcome", 1));
    cfg.simulation.initial_state = get_string(s, "initial_state", "maximally_mixed");
    cfg.simulation.bloch = get_vec3_list(s, "bloch");
  }
  if (auto it = doc.tables.find("analysis"); it != doc.tables.end()) {
    const TomlTable& a = it->second;
    cfg.analysis.pattern = get_string(a, "pattern", "");
    cfg.analysis.pencil_l = static_cast<int>(get_number(a, "pencil_l", 0));
    cfg.analysis.model_order = static_cast<int>(get_number(a, "model_order", 0));
    cfg.analysis.sv_ratio = get_number(a, "sv_ratio", 1e-8);
    cfg.analysis.noise_sigma_mult = get_number(a, "noise_sigma_mult", 3.0);
    cfg.analysis.truth_hz = get_number_list(a, "truth_hz");
  }
  if (auto it = doc.tables.find("output"); it != doc.tables.end()) {
    const TomlTable& o = it->second;
    cfg.output.dir = get_string(o, "dir", "out");
    cfg.output.write_exact = get_bool(o, "write_exact", true);
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  RunConfig cfg = from_doc(load_toml(path));
  cfg.source_path = path;
  return cfg;
}

void RunConfig::validate() const {
  const ModelConfig& m = model;
  if (m.kind != "two_spin" && m.kind != "three_spin_sm" && m.kind != "single_spin" &&
      m.kind != "custom") {
    throw std::invalid_argument("config: model.kind must be two_spin, three_spin_sm, "
                                "single_spin or custom");
  }
  if (m.tau_a_s <= 0 || m.tau_b_s <= 0) {
    throw std::invalid_argument("config: tau_a_s and tau_b_s must be positive");
  }
  if (simulation.cycles < 2) {
    throw std::invalid_argument("config: simulation.cycles must be >= 2");
  }
  if (simulation.samples < 1) {
    throw std::invalid_argument("config: simulation.samples must be >= 1");
  }
  if (simulation.initial_state != "maximally_mixed" && simulation.initial_state != "product") {
    throw std::invalid_argument("config: initial_state must be maximally_mixed or product");
  }
  if (!analysis.pattern.empty()) {
    ParameterPattern::by_name(analysis.pattern);  // throws on unknown name
  }
}

BuiltModel build_model(const ModelConfig& mc) {
  HamiltonianSpec a, b;
  if (mc.kind == "two_spin" || mc.kind == "three_spin_sm") {
    SpinClusterParams p;
    for (double h : mc.h_hz) p.h_rad_s.push_back(kTwoPi * h);
    p.h_dirs = mc.h_dirs;
    p.omega_rad_s = kTwoPi * mc.omega_hz;
    for (double d : mc.d_hz) p.d_rad_s.push_back(kTwoPi * d);
    ClusterKind kind =
        mc.kind == "two_spin" ? ClusterKind::TwoSpinMain : ClusterKind::ThreeSpinSM;
    std::tie(a, b) = spin_cluster_hamiltonians(kind, p);
  } else if (mc.kind == "single_spin") {
    a = build_hamiltonian(1, {PauliTerm{kTwoPi * mc.g_hz, {0}, "x"}});
    b = build_hamiltonian(1, {PauliTerm{kTwoPi * mc.omega_hz, {0}, "z"}});
  } else if (mc.kind == "custom") {
    if (mc.spins <= 0) {
      throw std::invalid_argument("config: custom model requires spins > 0");
    }
    a = build_hamiltonian(mc.spins, mc.a_terms);
    b = build_hamiltonian(mc.spins, mc.b_terms);
  } else {
    throw std::invalid_argument("build_model: unknown kind " + mc.kind);
  }

  RimParams rp;
  rp.tau_a_s = mc.tau_a_s;
  rp.phi_rad = mc.phi_rad;
  rp.include_free_b = mc.include_free_b;
  if (mc.include_free_b) rp.b_during_rim = b;

  BuiltModel out;
  out.rim = rim_channel(a, rp);
  out.unitary = unitary_channel(b, mc.tau_b_s);
  out.channel = concatenate(out.rim, out.unitary);
  out.a = std::move(a);
  out.b = std::move(b);
  return out;
}

StateVec initial_state(const RunConfig& cfg, Eigen::Index dim) {
  if (cfg.simulation.initial_state == "product") {
    if (cfg.simulation.bloch.empty()) {
      throw std::invalid_argument("config: product initial state requires bloch vectors");
    }
    Eigen::Index d = 1;
    for (size_t i = 0; i < cfg.simulation.bloch.size(); ++i) d *= 2;
    if (d != dim) {
      throw std::invalid_argument("config: bloch vector count does not match model size");
    }
    return product_state(cfg.simulation.bloch);
  }
  return maximally_mixed(dim);
}

}  // namespace chanspec
