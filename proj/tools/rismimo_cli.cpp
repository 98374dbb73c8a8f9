// SPDX-License-Identifier: MIT
// rismimo: run / list-presets / validate
#include "rismimo/expcli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kUsage = 2;
constexpr int kIo = 3;

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

void print_summary(std::ostream& os, const rismimo::ExperimentSpec& spec, const std::vector<rismimo::CsvRow>& rows) {
  os << "preset " << spec.preset << ", sweep " << rismimo::sweep_axis_name(spec.axis) << ", seed " << spec.seed
     << ", trials " << spec.trials << "\n";
  for (const auto& s : spec.series) {
    if (s.kind == rismimo::SeriesKind::baseline_overhead || s.kind == rismimo::SeriesKind::baseline_idealized) {
      os << "  note: baseline estimates use a per-entry Gaussian LMMSE error surrogate\n";
      break;
    }
  }
  for (const auto& r : rows) {
    if (r.user != 0) continue;
    os << "  " << r.series << " @ " << r.sweep_value << ": min-rate " << r.min_rate << " bit/s/Hz\n";
  }
}

} // namespace

int main(int argc, char** argv) {
  using namespace rismimo;
  CLI::App app{"RIS-aided massive MIMO experiment runner"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a preset sweep and write CSV");
  std::string preset, output, model, scaling, config_path;
  std::uint64_t seed = 1;
  long long trials = -1;
  double eu_dbm = std::nan("");
  unsigned threads = 1;
  bool timing = false, full_scale = false;
  run->add_option("--preset", preset, "preset id (see list-presets)")->required();
  run->add_option("--output,-o", output, "CSV path, '-' for stdout")->default_val("-");
  run->add_option("--seed", seed, "global seed");
  run->add_option("--trials", trials, "Monte Carlo trials, 0 skips them");
  run->add_option("--model", model, "independent or correlated")->check(CLI::IsMember({"independent", "correlated"}));
  run->add_option("--scaling", scaling, "power scaling schedule");
  run->add_option("--eu-dbm", eu_dbm, "E_u for the scaling schedule, dBm");
  run->add_option("--config", config_path, "JSON config replacing the preset's base scenario");
  run->add_option("--threads", threads, "worker threads");
  run->add_flag("--timing", timing, "record wall time per sweep point");
  run->add_flag("--full-scale", full_scale, "paper-scale trials and N grid");

  app.add_subcommand("list-presets", "list presets");

  auto* val = app.add_subcommand("validate", "check a JSON config file");
  std::string val_path;
  val->add_option("path", val_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  if (app.got_subcommand("list-presets")) {
    for (const auto& p : list_presets()) std::cout << p.id << "\t" << p.description << "\n";
    return 0;
  }

  if (app.got_subcommand("validate")) {
    std::string text;
    if (!read_file(val_path, text)) {
      std::cerr << "cannot read " << val_path << "\n";
      return kIo;
    }
    const ConfigReport rep = parse_config_text(text);
    if (!rep.ok()) {
      for (const auto& e : rep.errors) std::cerr << "error: " << e << "\n";
      return kUsage;
    }
    for (const auto& c : rep.conversions) std::cout << "# " << c << "\n";
    for (const auto& d : rep.defaulted) std::cout << "# default: " << d << "\n";
    std::cout << rep.echo() << "\n";
    return 0;
  }

  ExperimentSpec spec;
  try {
    spec = make_preset(preset);
    if (!config_path.empty()) {
      std::string text;
      if (!read_file(config_path, text)) {
        std::cerr << "cannot read " << config_path << "\n";
        return kIo;
      }
      const ConfigReport rep = parse_config_text(text);
      if (!rep.ok()) {
        for (const auto& e : rep.errors) std::cerr << "error: " << e << "\n";
        return kUsage;
      }
      spec.base = rep.cfg;
    }
    spec.seed = seed;
    if (full_scale) apply_full_scale(spec);
    if (trials >= 0) spec.trials = std::size_t(trials);
    if (model == "correlated") {
      spec.base.correlated = true;
      for (auto& e : spec.base.epsilon) e = Rician::inf();
    } else if (model == "independent") {
      spec.base.correlated = false;
    }
    if (!scaling.empty()) spec.scaling = parse_scaling_law(scaling);
    if (!std::isnan(eu_dbm)) spec.E_u_dbm = eu_dbm;
    spec.threads = threads;
    spec.record_timing = timing;
    const auto v = spec.violations();
    if (!v.empty()) {
      for (const auto& s : v) std::cerr << "error: " << s << "\n";
      return kUsage;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  std::ofstream out;
  if (output != "-") {
    out.open(output);
    if (!out) {
      std::cerr << "cannot write " << output << "\n";
      return kIo;
    }
  }

  std::vector<CsvRow> rows;
  try {
    rows = run_experiment(spec);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::io ? kIo : 1;
  }

  if (output == "-") {
    write_csv(std::cout, rows);
    print_summary(std::cerr, spec, rows);
    return 0;
  }
  write_csv(out, rows);
  out.flush();
  if (!out) {
    std::cerr << "write failed for " << output << "\n";
    return kIo;
  }
  print_summary(std::cout, spec, rows);
  return 0;
}
