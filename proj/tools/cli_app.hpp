// cli_app.hpp — command-line driver: subcommands run / converge / sweep /
// compare / list-presets over the config and harness layers.
//
// Exit codes: 0 success (all experiment assertions passed), 1 experiment
// assertions failed, 2 numerical divergence, 3 invalid configuration or
// arguments, 4 i/o failure, 70 unexpected internal error. Partial artifacts
// are flushed before any nonzero exit so diverged runs keep their evidence.
#pragma once

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gradflow/config.hpp"
#include "gradflow/harness.hpp"
#include "gradflow/io.hpp"
#include "gradflow/presets.hpp"
#include "gradflow/version.hpp"

namespace gradflow::cli {

constexpr int kExitOk = 0;
constexpr int kExitAssert = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitValidation = 3;
constexpr int kExitIo = 4;
constexpr int kExitInternal = 70;

struct Invocation {
  std::string preset;
  std::string config_path;
  std::string output_dir;
  std::vector<std::string> overrides;
  int jobs = 1;
  bool no_artifacts = false;
};

inline RunConfig load_config(const Invocation& inv) {
  if (!inv.preset.empty() && !inv.config_path.empty())
    throw ValidationError("give either --preset or --config, not both");
  Json doc;
  if (!inv.preset.empty()) {
    doc = preset_config(inv.preset);
  } else if (!inv.config_path.empty()) {
    const std::string text = read_text_file(inv.config_path);
    try {
      doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ValidationError("config '" + inv.config_path + "' is not valid JSON: " + e.what());
    }
  } else {
    throw ValidationError("a --preset or --config is required (try list-presets)");
  }
  for (const std::string& o : inv.overrides) apply_override(doc, o);
  return parse_config(doc);
}

inline std::string default_output_dir(const std::string& name) {
  const char* env_root = std::getenv("GRADFLOW_OUT_ROOT");
  const std::string root = (env_root && *env_root) ? env_root : "out";
  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S", std::localtime(&now));
  const std::string base = root + "/" + name + "-" + stamp;
  std::string candidate = base;
  for (int k = 2; std::filesystem::exists(candidate); ++k)
    candidate = base + "-" + std::to_string(k);
  return candidate;
}

// Empty result means "write nothing" (--no-artifacts).
inline std::string resolve_output_dir(const Invocation& inv, const RunConfig& cfg,
                                      const OutputConfig& oc) {
  if (inv.no_artifacts) return "";
  if (!inv.output_dir.empty()) return inv.output_dir;
  if (!oc.directory.empty()) return oc.directory;
  return default_output_dir(cfg.name);
}

inline void write_json_file(const std::string& path, const Json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

inline Json make_manifest(const RunConfig& cfg, const Json& extra) {
  Json m;
  m["config"] = cfg.raw;
  m["library_version"] = kVersion;
  const std::string dump = cfg.raw.dump();
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(detail::fnv1a_bytes(dump.data(), dump.size())));
  m["config_hash"] = hash;
  m["scheme"] = cfg.raw["scheme"]["name"];
  if (cfg.raw["initial"].contains("seed")) m["seeds"] = {cfg.raw["initial"]["seed"]};
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  return m;
}

struct BuiltRun {
  RunConfig cfg;
  Grid grid;
  ScalarField phi0;
  ModelSpec model;
  SchemeConfig scheme;
  OutputConfig out_cfg;
  Json experiment;
};

inline BuiltRun build_all(RunConfig cfg, const char* expected_kind) {
  BuiltRun b;
  b.cfg = std::move(cfg);
  b.grid = build_grid(b.cfg);
  b.phi0 = build_initial(b.cfg, b.grid);
  b.model = build_model(b.cfg, b.grid, mean(b.phi0));
  b.scheme = build_scheme(b.cfg);
  b.out_cfg = build_output(b.cfg);
  require(b.cfg.raw.contains("experiment"),
          "config: an experiment block is required for this command");
  b.experiment = b.cfg.raw["experiment"];
  const std::string kind = b.experiment["kind"].get<std::string>();
  require(kind == expected_kind || (std::string(expected_kind) == "sweep" &&
                                    (kind == "sweep-alpha" || kind == "sweep-stability")),
          "config: experiment.kind '" + kind + "' does not match the subcommand");
  return b;
}

inline void write_snapshots(const std::string& dir, const OutputConfig& oc,
                            const RunResult& r) {
  char name[64];
  for (size_t k = 0; k < r.snapshots.size(); ++k) {
    std::snprintf(name, sizeof(name), "snap_%02zu_t%g", k, r.snapshots[k].first);
    write_field_binary(dir + "/" + name + ".bin", r.snapshots[k].second);
    if (oc.write_csv_fields)
      write_field_csv_file(dir + "/" + name + ".csv", r.snapshots[k].second);
  }
}

// --- run -----------------------------------------------------------------------

inline int cmd_run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  BuiltRun b = build_all(load_config(inv), "run");
  const double T = detail::get_number(b.experiment, "experiment", "T_final");
  // mirror the harness's snapshot-range check so a bad request fails before the
  // output directory is created rather than stranding an empty one
  for (double ts : b.out_cfg.snapshot_times)
    require(ts >= 0.0 && ts <= T, "run: snapshot times must lie in [0, T_final]");
  const std::string dir = resolve_output_dir(inv, b.cfg, b.out_cfg);
  if (!dir.empty()) create_run_directory(dir);

  RunResult r = run_simulation(b.model, b.scheme, b.phi0, T, b.out_cfg.snapshot_times,
                               b.out_cfg.trace_stride);
  const EnergyAudit audit = audit_monotonicity(r.trace);
  const TraceRecord& last = r.trace.back();

  if (!dir.empty()) {
    std::ofstream trace_out(dir + "/trace.csv");
    if (!trace_out) throw IoError("cannot open '" + dir + "/trace.csv' for writing");
    write_trace_csv(trace_out, r.trace);
    write_snapshots(dir, b.out_cfg, r);
    write_json_file(dir + "/manifest.json", make_manifest(b.cfg, {{"command", "run"}}));
    Json summary;
    summary["diverged"] = r.diverged;
    if (r.diverged) {
      summary["diverged_step"] = r.diverged_step;
      summary["message"] = r.message;
    }
    summary["steps"] = last.step;
    summary["final_t"] = last.t;
    summary["final_energy_original"] = last.energy_original;
    summary["final_energy_discrete"] = last.energy_discrete;
    summary["final_mass"] = last.mass;
    summary["energy_monotone"] = audit.monotone;
    if (!audit.monotone) summary["first_violation_step"] = audit.first_violation;
    write_json_file(dir + "/summary.json", summary);
  }

  out << "run '" << b.cfg.name << "': " << last.step << " steps to t=" << last.t << "\n"
      << "  energy " << r.trace.front().energy_original << " -> " << last.energy_original
      << "  (discrete " << last.energy_discrete << ", monotone "
      << (audit.monotone ? "yes" : "no") << ")\n"
      << "  mass " << last.mass << ", snapshots " << r.snapshots.size() << "\n";
  if (!dir.empty()) out << "  artifacts: " << dir << "\n";
  if (r.diverged) {
    err << "divergence at step " << r.diverged_step << ": " << r.message << "\n";
    return kExitDiverged;
  }
  return kExitOk;
}

// --- converge --------------------------------------------------------------------

inline int cmd_converge(const Invocation& inv, std::ostream& out, std::ostream&) {
  BuiltRun b = build_all(load_config(inv), "converge");
  const Json& e = b.experiment;
  const double T = detail::get_number(e, "experiment", "T_final");
  const std::vector<double> dt_list = detail::get_number_list(e, "experiment", "dt_list");
  std::vector<double> alpha_list{b.scheme.alpha};
  if (e.contains("alpha_list"))
    alpha_list = detail::get_number_list(e, "experiment", "alpha_list");
  const long divisor = static_cast<long>(detail::get_int_or(e, "experiment", "ref_dt_divisor", 4));
  const double ref_alpha = detail::get_number_or(e, "experiment", "ref_alpha", 1e-5);
  const bool first_order =
      b.scheme.scheme == Scheme::CsavBdf1 || b.scheme.scheme == Scheme::SavBdf1;
  double band_lo = first_order ? 0.9 : 1.8, band_hi = first_order ? 1.1 : 2.2;
  if (e.contains("order_band")) {
    const std::vector<double> band = detail::get_number_list(e, "experiment", "order_band");
    band_lo = band[0];
    band_hi = band[1];
  }

  ReferenceCache cache;
  bool all_ok = true;
  std::string csv = "alpha,dt,error,order,final_aux_dev\n";
  Json rows = Json::array();
  char buf[256];
  out << "convergence '" << b.cfg.name << "' (band [" << band_lo << ", " << band_hi << "]):\n";
  for (double alpha : alpha_list) {
    SchemeConfig cfg = b.scheme;
    cfg.alpha = alpha;
    ConvergenceResult res =
        convergence_study(b.model, cfg, dt_list, b.phi0, T, divisor, ref_alpha, &cache,
                          inv.jobs);
    for (size_t i = 0; i < res.entries.size(); ++i) {
      const ConvergenceEntry& en = res.entries[i];
      const bool in_band = i == 0 || (en.order >= band_lo && en.order <= band_hi);
      all_ok = all_ok && in_band;
      if (i == 0)
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,,%.17g\n", alpha, en.dt, en.error,
                      en.final_aux_dev);
      else
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", alpha, en.dt,
                      en.error, en.order, en.final_aux_dev);
      csv += buf;
      rows.push_back({{"alpha", alpha},
                      {"dt", en.dt},
                      {"error", en.error},
                      {"order", i == 0 ? Json() : Json(en.order)},
                      {"final_aux_dev", en.final_aux_dev},
                      {"order_in_band", i == 0 ? Json() : Json(in_band)}});
      std::snprintf(buf, sizeof(buf), "  alpha=%-8g dt=%-10g error=%-12.4e order=%s\n", alpha,
                    en.dt, en.error, i == 0 ? "-" : std::to_string(en.order).c_str());
      out << buf;
    }
  }
  out << (all_ok ? "all orders in band\n" : "ORDER OUT OF BAND\n");

  const std::string dir = resolve_output_dir(inv, b.cfg, b.out_cfg);
  if (!dir.empty()) {
    create_run_directory(dir);
    write_text_file(dir + "/convergence.csv", csv);
    Json extra = {{"command", "converge"},
                  {"reference",
                   {{"scheme", scheme_name(b.scheme.scheme)},
                    {"dt", dt_list.back() / static_cast<double>(divisor)},
                    {"alpha", ref_alpha}}}};
    write_json_file(dir + "/manifest.json", make_manifest(b.cfg, extra));
    write_json_file(dir + "/summary.json", Json{{"pass", all_ok},
                                                {"order_band", {band_lo, band_hi}},
                                                {"rows", rows}});
    out << "  artifacts: " << dir << "\n";
  }
  return all_ok ? kExitOk : kExitAssert;
}

// --- sweep ---------------------------------------------------------------------

inline int cmd_sweep(const Invocation& inv, std::ostream& out, std::ostream&) {
  BuiltRun b = build_all(load_config(inv), "sweep");
  const Json& e = b.experiment;
  const std::string kind = e["kind"].get<std::string>();
  const double T = detail::get_number(e, "experiment", "T_final");
  const std::string dir = resolve_output_dir(inv, b.cfg, b.out_cfg);

  bool pass = true;
  std::string csv;
  Json rows = Json::array();
  char buf[256];
  if (kind == "sweep-alpha") {
    const std::vector<double> alphas = detail::get_number_list(e, "experiment", "alpha_list");
    std::vector<AlphaSweepEntry> entries =
        alpha_sweep(b.model, b.scheme, alphas, b.phi0, T, inv.jobs);
    csv = "alpha,max_aux_dev,halving_ratio\n";
    out << "alpha sweep '" << b.cfg.name << "' (dt=" << b.scheme.dt << "):\n";
    for (size_t i = 0; i < entries.size(); ++i) {
      double ratio = 0.0;  // deviation ratio across an exact alpha-halving pair
      if (i > 0 && entries[i].max_aux_dev > 0.0 &&
          std::abs(entries[i - 1].alpha / entries[i].alpha - 2.0) < 1e-12) {
        ratio = entries[i - 1].max_aux_dev / entries[i].max_aux_dev;
        pass = pass && ratio >= 1.8 && ratio <= 2.2;
      }
      if (i > 0) pass = pass && entries[i].max_aux_dev < entries[i - 1].max_aux_dev;
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", entries[i].alpha,
                    entries[i].max_aux_dev, ratio);
      csv += buf;
      rows.push_back({{"alpha", entries[i].alpha},
                      {"max_aux_dev", entries[i].max_aux_dev},
                      {"halving_ratio", ratio == 0.0 ? Json() : Json(ratio)}});
      std::snprintf(buf, sizeof(buf), "  alpha=%-10g max|aux-1|=%-12.4e\n", entries[i].alpha,
                    entries[i].max_aux_dev);
      out << buf;
    }
    out << (pass ? "deviations decrease with alpha as required\n" : "ALPHA SCALING FAILED\n");
  } else {
    const std::vector<double> dts = detail::get_number_list(e, "experiment", "dt_list");
    std::vector<StabilityEntry> entries =
        stability_sweep(b.model, b.scheme, dts, b.phi0, T, 1e-10, 1e-10, inv.jobs);
    csv = "dt,diverged,monotone,first_violation,max_increase\n";
    out << "stability sweep '" << b.cfg.name << "':\n";
    for (const StabilityEntry& en : entries) {
      pass = pass && !en.diverged && en.monotone;
      std::snprintf(buf, sizeof(buf), "%.17g,%d,%d,%ld,%.17g\n", en.dt, en.diverged ? 1 : 0,
                    en.monotone ? 1 : 0, en.first_violation, en.max_increase);
      csv += buf;
      rows.push_back({{"dt", en.dt},
                      {"diverged", en.diverged},
                      {"monotone", en.monotone},
                      {"first_violation", en.first_violation},
                      {"max_increase", en.max_increase}});
      std::snprintf(buf, sizeof(buf), "  dt=%-10g %s\n", en.dt,
                    en.diverged ? "DIVERGED" : (en.monotone ? "monotone" : "NOT MONOTONE"));
      out << buf;
    }
    out << (pass ? "discrete energy monotone for every dt\n" : "STABILITY FAILED\n");
  }

  if (!dir.empty()) {
    create_run_directory(dir);
    write_text_file(dir + "/sweep.csv", csv);
    write_json_file(dir + "/manifest.json", make_manifest(b.cfg, {{"command", "sweep"}}));
    write_json_file(dir + "/summary.json", Json{{"pass", pass}, {"kind", kind}, {"rows", rows}});
    out << "  artifacts: " << dir << "\n";
  }
  return pass ? kExitOk : kExitAssert;
}

// --- compare -----------------------------------------------------------------------

inline int cmd_compare(const Invocation& inv, std::ostream& out, std::ostream&) {
  BuiltRun b = build_all(load_config(inv), "compare");
  const Json& e = b.experiment;
  const double T = detail::get_number(e, "experiment", "T_final");
  const double accurate_dt = detail::get_number_or(e, "experiment", "accurate_dt", 1e-4);
  std::vector<Scheme> schemes;
  for (const Json& s : e["schemes"]) schemes.push_back(parse_scheme(s.get<std::string>()));

  SchemeComparisonResult res =
      scheme_comparison(b.model, b.scheme, schemes, b.phi0, T, accurate_dt, inv.jobs);

  // Qualitative ordering: the csav-cn entry, when present, must not be beaten
  // by any sav/rsav entry on either the consistency ratio or the energy curve.
  const SchemeComparisonEntry* csav = nullptr;
  for (const SchemeComparisonEntry& en : res.entries)
    if (en.scheme == std::string("csav-cn") && !en.diverged) csav = &en;
  bool pass = true;
  char buf[256];
  out << "scheme comparison '" << b.cfg.name << "' (dt=" << b.scheme.dt
      << ", accurate dt=" << accurate_dt << "):\n";
  std::string csv = "scheme,diverged,final_l2_error,max_ratio_dev,max_energy_dev\n";
  Json rows = Json::array();
  for (const SchemeComparisonEntry& en : res.entries) {
    pass = pass && !en.diverged;
    if (csav && !en.diverged && &en != csav) {
      pass = pass && csav->max_ratio_dev <= en.max_ratio_dev * (1.0 + 1e-12) + 1e-15;
      pass = pass && csav->max_energy_dev <= en.max_energy_dev * (1.0 + 1e-12) + 1e-15;
    }
    std::snprintf(buf, sizeof(buf), "%s,%d,%.17g,%.17g,%.17g\n", en.scheme.c_str(),
                  en.diverged ? 1 : 0, en.final_l2_error, en.max_ratio_dev,
                  en.max_energy_dev);
    csv += buf;
    rows.push_back({{"scheme", en.scheme},
                    {"diverged", en.diverged},
                    {"final_l2_error", en.final_l2_error},
                    {"max_ratio_dev", en.max_ratio_dev},
                    {"max_energy_dev", en.max_energy_dev}});
    std::snprintf(buf, sizeof(buf), "  %-10s err=%-12.4e |ratio-1|=%-12.4e |dE|=%-12.4e%s\n",
                  en.scheme.c_str(), en.final_l2_error, en.max_ratio_dev, en.max_energy_dev,
                  en.diverged ? "  DIVERGED" : "");
    out << buf;
  }
  out << (pass ? "orderings hold\n" : "ORDERING FAILED\n");

  const std::string dir = resolve_output_dir(inv, b.cfg, b.out_cfg);
  if (!dir.empty()) {
    create_run_directory(dir);
    write_text_file(dir + "/compare.csv", csv);
    std::ofstream acc(dir + "/accurate_trace.csv");
    if (!acc) throw IoError("cannot open '" + dir + "/accurate_trace.csv' for writing");
    write_trace_csv(acc, res.accurate_trace);
    Json extra = {{"command", "compare"},
                  {"accurate", {{"scheme", "sicn-ref"}, {"dt", accurate_dt}}}};
    write_json_file(dir + "/manifest.json", make_manifest(b.cfg, extra));
    write_json_file(dir + "/summary.json", Json{{"pass", pass}, {"rows", rows}});
    out << "  artifacts: " << dir << "\n";
  }
  return pass ? kExitOk : kExitAssert;
}

inline int cmd_list_presets(std::ostream& out) {
  for (const Preset& p : preset_table()) out << p.name << "\n    " << p.description << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------------

inline int cli_main(const std::vector<std::string>& args, std::ostream& out,
                    std::ostream& err) {
  CLI::App app{"Fourier-spectral gradient-flow solver and experiment driver"};
  app.require_subcommand(1);
  Invocation inv;
  if (const char* env_jobs = std::getenv("GRADFLOW_JOBS")) {
    const int j = std::atoi(env_jobs);
    if (j >= 1) inv.jobs = j;
  }
  auto add_common = [&inv](CLI::App* c) {
    c->add_option("--preset", inv.preset, "named preset (see list-presets)");
    c->add_option("--config", inv.config_path, "path to a JSON config file");
    c->add_option("--set", inv.overrides, "dot-path override key=value (repeatable)");
    c->add_option("-o,--output", inv.output_dir, "output directory (must not yet exist)");
    c->add_option("--jobs", inv.jobs, "worker count for independent sweep entries");
    c->add_flag("--no-artifacts", inv.no_artifacts, "compute and report without writing files");
  };
  CLI::App* c_run = app.add_subcommand("run", "time-step a model; write trace and snapshots");
  CLI::App* c_conv = app.add_subcommand("converge", "temporal self-convergence study");
  CLI::App* c_sweep = app.add_subcommand("sweep", "alpha or time-step stability sweep");
  CLI::App* c_cmp = app.add_subcommand("compare", "compare schemes against the accurate run");
  CLI::App* c_list = app.add_subcommand("list-presets", "list the named presets");
  for (CLI::App* c : {c_run, c_conv, c_sweep, c_cmp}) add_common(c);

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("gradflow");
  for (const std::string& a : args) argv_store.push_back(a);
  std::vector<const char*> argv;
  for (const std::string& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (c_list->parsed()) return cmd_list_presets(out);
    if (c_run->parsed()) return cmd_run(inv, out, err);
    if (c_conv->parsed()) return cmd_converge(inv, out, err);
    if (c_sweep->parsed()) return cmd_sweep(inv, out, err);
    if (c_cmp->parsed()) return cmd_compare(inv, out, err);
    err << "no subcommand selected\n";
    return kExitValidation;
  } catch (const DivergenceError& de) {
    err << "divergence: " << de.what() << "\n";
    return kExitDiverged;
  } catch (const ValidationError& ve) {
    err << "invalid configuration: " << ve.what() << "\n";
    return kExitValidation;
  } catch (const IoError& ioe) {
    err << "i/o error: " << ioe.what() << "\n";
    return kExitIo;
  } catch (const std::exception& ex) {
    err << "internal error: " << ex.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace gradflow::cli
