// SPDX-License-Identifier: MIT
#pragma once

#include "rismimo/optimizer.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

namespace rismimo {

enum class SweepAxis { N, M, p, delta, epsilon, rho, d_ris };
const char* sweep_axis_name(SweepAxis a);
SweepAxis parse_sweep_axis(const std::string& s);

// Sets one swept quantity. p is in dBm, rho in dB, d_ris in wavelengths.
void apply_sweep(SystemConfig& cfg, SweepAxis axis, double value);

enum class PhaseDesign { zeros, optimize, single_user, align };
enum class SeriesKind { two_timescale, asymptotic_limit, baseline_overhead, baseline_idealized };

struct Series {
  std::string name;
  SeriesKind kind = SeriesKind::two_timescale;
  std::function<void(SystemConfig&)> adjust; // may be empty
};

struct ExperimentSpec {
  std::string preset;
  SystemConfig base;
  SweepAxis axis = SweepAxis::N;
  std::vector<double> grid;
  std::vector<Series> series;
  PhaseDesign design = PhaseDesign::optimize;
  OptimizerConfig optimizer;
  std::optional<ScalingLaw> scaling;
  double E_u_dbm = 10.0;
  std::size_t trials = 0; // 0 skips the Monte Carlo columns
  std::uint64_t seed = 1;
  int baseline_intervals = 50;
  int baseline_trials = 4;
  unsigned threads = 1;
  bool record_timing = false;

  std::vector<std::string> violations() const;
};

struct PresetInfo {
  std::string id;
  std::string description;
};

std::vector<PresetInfo> list_presets();
// Throws invalid_config for an unknown id.
ExperimentSpec make_preset(const std::string& id);
// Paper-scale trial count and N grid where the preset sweeps N.
void apply_full_scale(ExperimentSpec& spec);

struct CsvRow {
  std::string series;
  double sweep_value = 0;
  int user = 0;
  double rate_cf = 0;
  double rate_mc = 0;
  double rate_mc_stderr = 0;
  double min_rate = 0;
  double nmse = 0;
  double trace_mse = 0;
  double wall_s = 0;
};

const char* csv_header();
void write_csv(std::ostream& os, const std::vector<CsvRow>& rows);

// Runs every (sweep point, series) pair; rows come back in sweep order.
std::vector<CsvRow> run_experiment(const ExperimentSpec& spec);

// JSON config file with powers in dBm. Every key is optional and falls back
// to the reference scenario.
struct ConfigReport {
  SystemConfig cfg;
  std::vector<std::string> conversions;
  std::vector<std::string> defaulted;
  std::vector<std::string> errors; // parse and constraint failures, all of them
  bool ok() const { return errors.empty(); }
  std::string echo() const; // normalized JSON, powers in watts
};

ConfigReport parse_config_text(const std::string& text);

} // namespace rismimo
