// SPDX-License-Identifier: MIT
#include "rismimo/expcli.hpp"

#include "rismimo/baseline.hpp"
#include "rismimo/montecarlo.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>
#include <set>
#include <thread>

namespace rismimo {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

SystemConfig make_correlated(SystemConfig cfg, double rho_db, double d_ris) {
  cfg.correlated = true;
  for (auto& e : cfg.epsilon) e = Rician::inf();
  cfg.sigma_e2 = cfg.sigma2 * db_to_linear(rho_db);
  cfg.d_ris = d_ris;
  return cfg;
}

SystemConfig desk16() {
  SystemConfig c = table_defaults();
  c.M = 16;
  c.N = 16;
  return c;
}

Series plain(const std::string& name) { return Series{name, SeriesKind::two_timescale, {}}; }

} // namespace

const char* sweep_axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::N: return "N";
    case SweepAxis::M: return "M";
    case SweepAxis::p: return "p_dbm";
    case SweepAxis::delta: return "delta";
    case SweepAxis::epsilon: return "epsilon";
    case SweepAxis::rho: return "rho_db";
    case SweepAxis::d_ris: return "d_ris";
  }
  return "?";
}

SweepAxis parse_sweep_axis(const std::string& s) {
  for (SweepAxis a : {SweepAxis::N, SweepAxis::M, SweepAxis::p, SweepAxis::delta, SweepAxis::epsilon,
                      SweepAxis::rho, SweepAxis::d_ris})
    if (s == sweep_axis_name(a)) return a;
  throw Error(Errc::invalid_config, "unknown sweep axis '" + s + "'");
}

void apply_sweep(SystemConfig& cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::N: cfg.N = int(std::lround(value)); break;
    case SweepAxis::M: cfg.M = int(std::lround(value)); break;
    case SweepAxis::p: cfg.p = dbm_to_watt(value); break;
    case SweepAxis::delta: cfg.delta = Rician{value, false}; break;
    case SweepAxis::epsilon:
      for (auto& e : cfg.epsilon) e = Rician{value, false};
      break;
    case SweepAxis::rho: cfg.sigma_e2 = cfg.sigma2 * db_to_linear(value); break;
    case SweepAxis::d_ris: cfg.d_ris = value; break;
  }
}

std::vector<std::string> ExperimentSpec::violations() const {
  std::vector<std::string> v;
  if (grid.empty()) v.push_back("sweep grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end())) v.push_back("sweep grid must be sorted");
  if (series.empty()) v.push_back("at least one series is required");
  if (trials != 0 && trials < kMinMcTrials) v.push_back("trials must be 0 or at least 1000");
  for (const auto& s : optimizer.violations()) v.push_back(s);
  return v;
}

std::vector<PresetInfo> list_presets() {
  return {
      {"fig2-nmse", "NMSE and trace MSE versus N at the reference scenario"},
      {"fig4-baseline", "single user: statistical-CSI design against the instantaneous-CSI baseline"},
      {"fig8-delta", "optimized minimum rate versus the RIS-BS Rician factor"},
      {"fig8-epsilon", "optimized minimum rate versus the user-RIS Rician factor"},
      {"fig11-correlation", "rate versus N for three RIS element spacings"},
      {"fig12-emi", "minimum rate versus EMI strength, with and without the RIS"},
      {"scaling-rayleigh-N", "delta = 0 with p = E_u/N against its limit"},
      {"scaling-single-N2", "single user with p = E_u/N^2 against its limit"},
  };
}

ExperimentSpec make_preset(const std::string& id) {
  ExperimentSpec s;
  s.preset = id;
  s.seed = 1;
  if (id == "fig2-nmse") {
    s.base = table_defaults();
    s.axis = SweepAxis::N;
    s.grid = {4, 16, 64, 256};
    s.design = PhaseDesign::zeros;
    s.series = {plain("independent")};
  } else if (id == "fig4-baseline") {
    s.base = with_users(desk16(), 1);
    s.base.tau = 1;
    s.axis = SweepAxis::N;
    s.grid = {16, 64, 144};
    s.design = PhaseDesign::single_user;
    s.trials = 2000;
    s.series = {plain("two-timescale"), Series{"baseline-overhead", SeriesKind::baseline_overhead, {}},
                Series{"baseline-idealized", SeriesKind::baseline_idealized, {}}};
  } else if (id == "fig8-delta" || id == "fig8-epsilon") {
    s.base = desk16();
    s.axis = id == "fig8-delta" ? SweepAxis::delta : SweepAxis::epsilon;
    s.grid = {0.1, 1.0, 10.0};
    s.trials = 2000;
    s.series = {plain("independent")};
  } else if (id == "fig11-correlation") {
    s.base = make_correlated(desk16(), 30.0, 0.5);
    s.axis = SweepAxis::N;
    s.grid = {4, 16, 64};
    s.optimizer.restarts = 1;
    s.trials = 1000;
    for (double d : {0.5, 0.25, 0.125})
      s.series.push_back(Series{"d_ris=" + fmt("%g", d), SeriesKind::two_timescale,
                                [d](SystemConfig& c) { c.d_ris = d; }});
  } else if (id == "fig12-emi") {
    s.base = make_correlated(desk16(), 30.0, 0.25);
    s.axis = SweepAxis::rho;
    s.grid = {30, 60, 90};
    s.optimizer.restarts = 1;
    s.trials = 1000;
    s.series = {plain("ris-aided"), Series{"ris-free", SeriesKind::two_timescale, [](SystemConfig& c) {
                                             for (auto& a : c.alpha) a = 0.0;
                                             c.sigma_e2 = 0.0;
                                           }}};
  } else if (id == "scaling-rayleigh-N") {
    s.base = table_defaults();
    s.base.delta = Rician{0.0, false};
    s.axis = SweepAxis::N;
    s.grid = {64, 256, 1024};
    s.design = PhaseDesign::zeros;
    s.scaling = ScalingLaw::rayleigh_over_N;
    s.series = {plain("closed-form"), Series{"limit", SeriesKind::asymptotic_limit, {}}};
  } else if (id == "scaling-single-N2") {
    s.base = with_users(table_defaults(), 1);
    s.base.tau = 1;
    s.axis = SweepAxis::N;
    s.grid = {64, 256, 1024};
    s.design = PhaseDesign::align;
    s.scaling = ScalingLaw::single_over_N2;
    s.series = {plain("closed-form"), Series{"limit", SeriesKind::asymptotic_limit, {}}};
  } else {
    throw Error(Errc::invalid_config, "unknown preset '" + id + "'");
  }
  return s;
}

void apply_full_scale(ExperimentSpec& spec) {
  if (spec.trials != 0) spec.trials = 100000;
  if (spec.axis == SweepAxis::N) {
    std::vector<double> g = spec.grid;
    for (double n : {256.0, 576.0, 1024.0})
      if (n > g.back()) g.push_back(n);
    spec.grid = g;
  }
}

const char* csv_header() {
  return "series,sweep_value,user,rate_cf,rate_mc,rate_mc_stderr,min_rate,nmse,trace_mse,wall_s";
}

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
  os << csv_header() << '\n';
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.6f\n", r.series.c_str(),
                  r.sweep_value, r.user, r.rate_cf, r.rate_mc, r.rate_mc_stderr, r.min_rate, r.nmse, r.trace_mse,
                  r.wall_s);
    os << buf;
  }
}

namespace {

PhaseShifts design_phases(const ExperimentSpec& spec, const SystemConfig& cfg, const LosGeometry& los) {
  switch (spec.design) {
    case PhaseDesign::zeros: return PhaseShifts::zeros(cfg.N);
    case PhaseDesign::align: return align_phases(cfg, 0);
    case PhaseDesign::single_user: return single_user_design(cfg, los).phase;
    case PhaseDesign::optimize: return optimize_phases(cfg, los, spec.optimizer, spec.seed).phase;
  }
  return PhaseShifts::zeros(cfg.N);
}

std::vector<CsvRow> run_point(const ExperimentSpec& spec, double value, const Series& series) {
  const auto t0 = std::chrono::steady_clock::now();
  SystemConfig cfg = spec.base;
  apply_sweep(cfg, spec.axis, value);
  if (series.adjust) series.adjust(cfg);
  if (spec.scaling) cfg.p = scaled_power(*spec.scaling, dbm_to_watt(spec.E_u_dbm), cfg.M, cfg.N);
  cfg.validate();
  const LosGeometry los = los_geometry(cfg);

  std::vector<CsvRow> rows(cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    rows[k].series = series.name;
    rows[k].sweep_value = value;
    rows[k].user = k;
    rows[k].rate_cf = rows[k].rate_mc = rows[k].rate_mc_stderr = kNaN;
    rows[k].nmse = rows[k].trace_mse = kNaN;
  }
  double min_rate = kNaN;
  switch (series.kind) {
    case SeriesKind::two_timescale: {
      const PhaseShifts phase = design_phases(spec, cfg, los);
      const RateBreakdown rb = evaluate_rate(cfg, los, phase);
      const auto mse = mse_nmse(cfg, los, phase);
      for (int k = 0; k < cfg.K; ++k) {
        rows[k].rate_cf = rb.users[k].rate;
        rows[k].nmse = mse[k].nmse;
        rows[k].trace_mse = mse[k].trace_mse;
      }
      min_rate = rb.min_rate();
      if (spec.trials > 0) {
        const McRateReport mc = rate_mc_report(cfg, los, phase, spec.trials, spec.seed);
        for (int k = 0; k < cfg.K; ++k) {
          rows[k].rate_mc = mc.rate[k];
          rows[k].rate_mc_stderr = mc.std_error[k];
        }
      }
      break;
    }
    case SeriesKind::asymptotic_limit: {
      const PhaseShifts phase = design_phases(spec, cfg, los);
      const AsymptoticLimit lim = asymptotic_limit(cfg, los, phase, *spec.scaling, dbm_to_watt(spec.E_u_dbm));
      min_rate = std::numeric_limits<double>::infinity();
      for (int k = 0; k < cfg.K; ++k) {
        rows[k].rate_cf = lim.rate[k];
        min_rate = std::min(min_rate, lim.rate[k]);
      }
      break;
    }
    case SeriesKind::baseline_overhead:
    case SeriesKind::baseline_idealized: {
      const BaselineReport b = instantaneous_scheme(cfg, spec.baseline_intervals, spec.baseline_trials, spec.seed);
      rows[0].rate_mc = series.kind == SeriesKind::baseline_overhead ? b.avg_rate_with_overhead : b.avg_rate_idealized;
      min_rate = rows[0].rate_mc;
      break;
    }
  }
  const double wall =
      spec.record_timing ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() : 0.0;
  for (auto& r : rows) {
    r.min_rate = min_rate;
    r.wall_s = wall;
  }
  return rows;
}

} // namespace

std::vector<CsvRow> run_experiment(const ExperimentSpec& spec) {
  const auto v = spec.violations();
  if (!v.empty()) {
    std::string msg = "invalid experiment:";
    for (const auto& s : v) msg += " " + s + ";";
    throw Error(Errc::invalid_config, msg);
  }
  const std::size_t n_series = spec.series.size();
  const std::size_t n_tasks = spec.grid.size() * n_series;
  std::vector<std::vector<CsvRow>> results(n_tasks);
  std::vector<std::exception_ptr> errors(n_tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < n_tasks; t = next++) {
      try {
        results[t] = run_point(spec, spec.grid[t / n_series], spec.series[t % n_series]);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(spec.threads, unsigned(n_tasks)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<CsvRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

// ---- config files ----

namespace {

const std::set<std::string> kKnownKeys = {
    "M",   "N",     "K",       "p_dbm", "sigma2_dbm", "sigma_e2_dbm", "rho_db",        "tau",
    "tau_c", "delta", "epsilon", "d_ui", "d_ib",       "d_bs",         "d_ris",         "correlated",
    "ris_departure", "bs_arrival", "user_arrival"};

Rician parse_rician(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return Rician::inf();
    throw std::invalid_argument("expected a number or \"inf\"");
  }
  if (!j.is_number()) throw std::invalid_argument("expected a number or \"inf\"");
  return Rician{j.get<double>(), false};
}

json rician_json(const Rician& r) { return r.infinite ? json("inf") : json(r.value); }

Direction parse_direction(const json& j) {
  if (!j.is_object() || !j.contains("azimuth") || !j.contains("elevation"))
    throw std::invalid_argument("expected {\"azimuth\": rad, \"elevation\": rad}");
  return Direction{j.at("azimuth").get<double>(), j.at("elevation").get<double>()};
}

json direction_json(const Direction& d) { return {{"azimuth", d.azimuth}, {"elevation", d.elevation}}; }

} // namespace

ConfigReport parse_config_text(const std::string& text) {
  ConfigReport rep;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    rep.errors.push_back(std::string("parse error: ") + e.what());
    return rep;
  }
  if (!j.is_object()) {
    rep.errors.push_back("top level must be a JSON object");
    return rep;
  }
  for (const auto& [key, _] : j.items())
    if (!kKnownKeys.count(key)) rep.errors.push_back("unknown key '" + key + "'");

  const SystemConfig ref = table_defaults();
  SystemConfig& c = rep.cfg;
  c = ref;

  auto field = [&](const char* key, auto&& assign) {
    if (!j.contains(key)) {
      rep.defaulted.push_back(key);
      return;
    }
    try {
      assign(j.at(key));
    } catch (const std::exception& e) {
      rep.errors.push_back(std::string(key) + ": " + e.what());
    }
  };
  auto as_int = [](const json& v) {
    if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
    return v.get<int>();
  };
  auto as_num = [](const json& v) {
    if (!v.is_number()) throw std::invalid_argument("expected a number");
    return v.get<double>();
  };

  field("M", [&](const json& v) { c.M = as_int(v); });
  field("N", [&](const json& v) { c.N = as_int(v); });
  field("K", [&](const json& v) { c.K = as_int(v); });
  field("tau", [&](const json& v) { c.tau = as_int(v); });
  field("tau_c", [&](const json& v) { c.tau_c = as_int(v); });
  double p_dbm = watt_to_dbm(ref.p), s2_dbm = watt_to_dbm(ref.sigma2);
  field("p_dbm", [&](const json& v) { p_dbm = as_num(v); });
  field("sigma2_dbm", [&](const json& v) { s2_dbm = as_num(v); });
  c.p = dbm_to_watt(p_dbm);
  c.sigma2 = dbm_to_watt(s2_dbm);
  rep.conversions.push_back("p: " + fmt("%g", p_dbm) + " dBm -> " + fmt("%.4g", c.p) + " W");
  rep.conversions.push_back("sigma2: " + fmt("%g", s2_dbm) + " dBm -> " + fmt("%.4g", c.sigma2) + " W");
  if (j.contains("sigma_e2_dbm") && j.contains("rho_db")) {
    rep.errors.push_back("give either sigma_e2_dbm or rho_db, not both");
  } else if (j.contains("rho_db")) {
    field("rho_db", [&](const json& v) {
      const double rho = as_num(v);
      c.sigma_e2 = c.sigma2 * db_to_linear(rho);
      rep.conversions.push_back("rho: " + fmt("%g", rho) + " dB -> sigma_e2 " + fmt("%.4g", c.sigma_e2) + " W");
    });
  } else {
    field("sigma_e2_dbm", [&](const json& v) {
      const double d = as_num(v);
      c.sigma_e2 = dbm_to_watt(d);
      rep.conversions.push_back("sigma_e2: " + fmt("%g", d) + " dBm -> " + fmt("%.4g", c.sigma_e2) + " W");
    });
  }
  field("delta", [&](const json& v) { c.delta = parse_rician(v); });
  field("d_bs", [&](const json& v) { c.d_bs = as_num(v); });
  field("d_ris", [&](const json& v) { c.d_ris = as_num(v); });
  field("correlated", [&](const json& v) {
    if (!v.is_boolean()) throw std::invalid_argument("expected true or false");
    c.correlated = v.get<bool>();
  });
  field("ris_departure", [&](const json& v) { c.ris_departure = parse_direction(v); });
  field("bs_arrival", [&](const json& v) { c.bs_arrival = parse_direction(v); });

  const int K = c.K;
  if (K > 0) {
    // per-user arrays default to the reference scenario when K fits
    c.user_arrival = ref.user_arrival;
    c.user_arrival.resize(std::size_t(K), Direction{});
    field("user_arrival", [&](const json& v) {
      if (!v.is_array()) throw std::invalid_argument("expected an array of directions");
      c.user_arrival.clear();
      for (const auto& d : v) c.user_arrival.push_back(parse_direction(d));
    });
    if (!j.contains("user_arrival") && K > ref.K)
      rep.errors.push_back("user_arrival must be given when K > " + std::to_string(ref.K));
    c.epsilon.assign(std::size_t(K), ref.epsilon[0]);
    field("epsilon", [&](const json& v) {
      if (v.is_array()) {
        c.epsilon.clear();
        for (const auto& e : v) c.epsilon.push_back(parse_rician(e));
      } else {
        c.epsilon.assign(std::size_t(K), parse_rician(v));
      }
    });
    double d_ui = 20.0, d_ib = 700.0;
    field("d_ui", [&](const json& v) { d_ui = as_num(v); });
    field("d_ib", [&](const json& v) { d_ib = as_num(v); });
    try {
      const Pathloss pl = scenario_geometry(d_ui, d_ib, K);
      c.alpha = pl.alpha;
      c.gamma = pl.gamma;
      c.beta = pl.beta;
    } catch (const Error& e) {
      rep.errors.push_back(e.what());
    }
  }
  for (const auto& v : c.violations()) rep.errors.push_back(v);
  return rep;
}

std::string ConfigReport::echo() const {
  json j;
  j["M"] = cfg.M;
  j["N"] = cfg.N;
  j["K"] = cfg.K;
  j["p_w"] = cfg.p;
  j["sigma2_w"] = cfg.sigma2;
  j["sigma_e2_w"] = cfg.sigma_e2;
  j["tau"] = cfg.tau;
  j["tau_c"] = cfg.tau_c;
  j["delta"] = rician_json(cfg.delta);
  json eps = json::array();
  for (const auto& e : cfg.epsilon) eps.push_back(rician_json(e));
  j["epsilon"] = eps;
  j["alpha"] = cfg.alpha;
  j["gamma"] = cfg.gamma;
  j["beta"] = cfg.beta;
  j["d_bs"] = cfg.d_bs;
  j["d_ris"] = cfg.d_ris;
  j["correlated"] = cfg.correlated;
  j["ris_departure"] = direction_json(cfg.ris_departure);
  j["bs_arrival"] = direction_json(cfg.bs_arrival);
  json ua = json::array();
  for (const auto& d : cfg.user_arrival) ua.push_back(direction_json(d));
  j["user_arrival"] = ua;
  return j.dump(2);
}

} // namespace rismimo
