#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chanspec/models.hpp"
#include "chanspec/trajectory.hpp"

namespace chanspec {

/// Minimal TOML-style config reader: [tables], [[arrays of tables]],
/// key = value with strings, booleans, numbers and (nested) single-line
/// arrays.  Enough for the run-configuration schema below.
struct TomlValue {
  enum class Kind { String, Bool, Number, Array };
  Kind kind = Kind::Number;
  std::string str;
  bool boolean = false;
  double number = 0.0;
  std::vector<TomlValue> array;
};

using TomlTable = std::map<std::string, TomlValue>;

struct TomlDoc {
  std::map<std::string, TomlTable> tables;
  std::map<std::string, std::vector<TomlTable>> table_arrays;
};

TomlDoc parse_toml(const std::string& text);
TomlDoc load_toml(const std::string& path);

/// Model section.  All frequencies entered in Hz; converted once to rad/s
/// (x 2*pi) when the Hamiltonians are built.
struct ModelConfig {
  std::string kind;  // "two_spin" | "three_spin_sm" | "single_spin" | "custom"
  double omega_hz = 0.0;            // Larmor / omega_L
  double g_hz = 0.0;                // single_spin coupling
  std::vector<double> d_hz;         // {D} or {D12, D13, D23}
  std::vector<double> h_hz;         // hyperfine magnitudes
  std::vector<std::array<double, 3>> h_dirs;
  int spins = 0;                    // custom
  std::vector<PauliTerm> a_terms;   // custom, coeff already in rad/s
  std::vector<PauliTerm> b_terms;
  double tau_a_s = 0.0;
  double tau_b_s = 0.0;
  double phi_rad = 1.5707963267948966;
  bool include_free_b = false;
};

struct SimulationConfig {
  int cycles = 2;
  std::uint64_t samples = 1;
  std::uint64_t seed = 0;
  int outcome = 1;
  std::string initial_state = "maximally_mixed";  // or "product"
  std::vector<std::array<double, 3>> bloch;
};

struct AnalysisConfig {
  std::string pattern;  // "two_spin" | "three_spin_sm" | "" (none)
  int pencil_l = 0;
  int model_order = 0;
  double sv_ratio = 1e-8;
  double noise_sigma_mult = 3.0;  // sampled-data SV floor in noise sigmas
  std::vector<double> truth_hz;
};

struct OutputConfig {
  std::string dir = "out";
  bool write_exact = true;
};

struct RunConfig {
  ModelConfig model;
  SimulationConfig simulation;
  AnalysisConfig analysis;
  OutputConfig output;
  std::string source_path;

  static RunConfig load(const std::string& path);
  static RunConfig from_doc(const TomlDoc& doc);
  void validate() const;
};

/// Everything the pipeline needs, assembled from a model config.
struct BuiltModel {
  HamiltonianSpec a;
  HamiltonianSpec b;
  KrausSet rim;
  UnitaryChannel unitary;
  ConcatenatedChannel channel;
};

BuiltModel build_model(const ModelConfig& mc);

StateVec initial_state(const RunConfig& cfg, Eigen::Index dim);

}  // namespace chanspec
