// config.hpp — JSON run configuration: strict validation and object builders.
//
// A run configuration is one JSON document with blocks
//   name (optional label), model, grid, scheme, initial, output?, experiment?
// Unknown keys anywhere are hard errors so typos never silently fall back to
// defaults. Any scalar that is physically a real number may be written either
// as a JSON number or as a constant expression string ("2*pi", "1/3"); sizes,
// seeds and strides must be JSON integers.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradflow/expr.hpp"
#include "gradflow/initial.hpp"
#include "gradflow/integrator.hpp"
#include "gradflow/model.hpp"

namespace gradflow {

using Json = nlohmann::json;

namespace detail {

inline std::string json_brief(const Json& v) {
  std::string s = v.dump();
  if (s.size() > 60) s = s.substr(0, 57) + "...";
  return s;
}

inline void check_keys(const Json& obj, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ValidationError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& key = it.key();
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw ValidationError(where + ": unknown key '" + key + "'");
  }
}

inline const Json& get_field(const Json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(where + ": missing required key '" + key + "'");
  return *it;
}

// Real-valued scalar: JSON number or constant-expression string.
inline double as_number(const Json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return eval_constant_expression(v.get<std::string>());
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  throw ValidationError(where + ": expected a number or expression string, got " +
                        json_brief(v));
}

inline double get_number(const Json& obj, const std::string& where, const char* key) {
  return as_number(get_field(obj, where, key), where + "." + key);
}

inline double get_number_or(const Json& obj, const std::string& where, const char* key,
                            double dflt) {
  auto it = obj.find(key);
  return it == obj.end() ? dflt : as_number(*it, where + "." + key);
}

inline long long get_int(const Json& obj, const std::string& where, const char* key) {
  const Json& v = get_field(obj, where, key);
  if (!v.is_number_integer())
    throw ValidationError(where + "." + key + ": expected an integer, got " + json_brief(v));
  return v.get<long long>();
}

inline long long get_int_or(const Json& obj, const std::string& where, const char* key,
                            long long dflt) {
  auto it = obj.find(key);
  if (it == obj.end()) return dflt;
  if (!it->is_number_integer())
    throw ValidationError(where + "." + key + ": expected an integer, got " +
                          json_brief(*it));
  return it->get<long long>();
}

inline std::string get_string(const Json& obj, const std::string& where, const char* key) {
  const Json& v = get_field(obj, where, key);
  if (!v.is_string())
    throw ValidationError(where + "." + key + ": expected a string, got " + json_brief(v));
  return v.get<std::string>();
}

inline std::string get_string_or(const Json& obj, const std::string& where, const char* key,
                                 const std::string& dflt) {
  auto it = obj.find(key);
  if (it == obj.end()) return dflt;
  if (!it->is_string())
    throw ValidationError(where + "." + key + ": expected a string, got " +
                          json_brief(*it));
  return it->get<std::string>();
}

inline bool get_bool_or(const Json& obj, const std::string& where, const char* key,
                        bool dflt) {
  auto it = obj.find(key);
  if (it == obj.end()) return dflt;
  if (!it->is_boolean())
    throw ValidationError(where + "." + key + ": expected a boolean, got " +
                          json_brief(*it));
  return it->get<bool>();
}

inline std::vector<double> get_number_list(const Json& obj, const std::string& where,
                                           const char* key) {
  const Json& v = get_field(obj, where, key);
  if (!v.is_array() || v.empty())
    throw ValidationError(where + "." + key + ": expected a non-empty array");
  std::vector<double> out;
  out.reserve(v.size());
  for (size_t n = 0; n < v.size(); ++n)
    out.push_back(as_number(v[n], where + "." + key + "[" + std::to_string(n) + "]"));
  return out;
}

}  // namespace detail

struct RunConfig {
  std::string name;  // label used for output directories and manifests
  Json raw;          // the validated document (post-override), echoed verbatim
};

// --- block validators -------------------------------------------------------

namespace detail {

inline void validate_model_block(const Json& m) {
  const std::string where = "model";
  const std::string name = get_string(m, where, "name");
  if (name == "allen-cahn") {
    check_keys(m, where, {"name", "eps", "lambda", "s", "split_s1"});
    get_number(m, where, "eps");
    get_number(m, where, "lambda");
    get_number(m, where, "s");
  } else if (name == "cahn-hilliard") {
    check_keys(m, where, {"name", "eps", "lambda", "s"});
    get_number(m, where, "eps");
    get_number(m, where, "lambda");
    get_number(m, where, "s");
  } else if (name == "mbe") {
    check_keys(m, where, {"name", "eps2", "s"});
    get_number(m, where, "eps2");
    get_number(m, where, "s");
  } else if (name == "pfc") {
    check_keys(m, where, {"name", "a0", "b0", "lambda", "s"});
    get_number(m, where, "a0");
    get_number(m, where, "b0");
    get_number(m, where, "lambda");
    get_number(m, where, "s");
  } else if (name == "diblock") {
    check_keys(m, where, {"name", "eps", "lambda", "sigma", "s", "phibar0"});
    get_number(m, where, "eps");
    get_number(m, where, "lambda");
    get_number(m, where, "sigma");
    get_number(m, where, "s");
    if (m.contains("phibar0")) get_number(m, where, "phibar0");
  } else {
    throw ValidationError("model.name: unknown model '" + name + "'");
  }
}

inline void validate_grid_block(const Json& g) {
  check_keys(g, "grid", {"Lx", "Ly", "Nx", "Ny"});
  require(get_number(g, "grid", "Lx") > 0.0 && get_number(g, "grid", "Ly") > 0.0,
          "grid: Lx, Ly must be positive");
  const long long nx = get_int(g, "grid", "Nx"), ny = get_int(g, "grid", "Ny");
  require(nx >= 4 && ny >= 4 && nx % 2 == 0 && ny % 2 == 0,
          "grid: Nx, Ny must be even and at least 4");
}

inline void validate_scheme_block(const Json& s) {
  check_keys(s, "scheme", {"name", "dt", "alpha", "C0", "eta", "bootstrap", "dealias"});
  parse_scheme(get_string(s, "scheme", "name"));
  require(get_number(s, "scheme", "dt") > 0.0, "scheme.dt: must be positive");
  require(get_number_or(s, "scheme", "alpha", 1e-4) >= 0.0,
          "scheme.alpha: must be nonnegative");
  const double eta = get_number_or(s, "scheme", "eta", 0.99);
  require(eta >= 0.0 && eta <= 1.0, "scheme.eta: must lie in [0, 1]");
  if (s.contains("bootstrap")) parse_bootstrap(get_string(s, "scheme", "bootstrap"));
  get_bool_or(s, "scheme", "dealias", false);
}

inline void validate_initial_block(const Json& ic) {
  const std::string where = "initial";
  const std::string kind = get_string(ic, where, "kind");
  if (kind == "two_bubbles") {
    check_keys(ic, where, {"kind", "eps", "bubbles"});
    get_number(ic, where, "eps");
    const Json& bb = get_field(ic, where, "bubbles");
    if (!bb.is_array() || bb.size() != 2)
      throw ValidationError("initial.bubbles: expected an array of two [x, y, radius]");
    for (const Json& b : bb) {
      if (!b.is_array() || b.size() != 3)
        throw ValidationError("initial.bubbles: each entry must be [x, y, radius]");
      for (const Json& c : b) as_number(c, "initial.bubbles");
    }
  } else if (kind == "flower") {
    check_keys(ic, where, {"kind", "eps"});
    get_number(ic, where, "eps");
  } else if (kind == "mbe_sine") {
    check_keys(ic, where, {"kind"});
  } else if (kind == "pfc_random" || kind == "diblock_random") {
    check_keys(ic, where, {"kind", "base", "amplitude", "seed", "center_mean"});
    get_number(ic, where, "base");
    get_number_or(ic, where, "amplitude", 0.0);
    get_int_or(ic, where, "seed", 1);
  } else if (kind == "pfc_crystallites") {
    check_keys(ic, where, {"kind", "base", "c1", "c2"});
    get_number_or(ic, where, "base", 0.285);
    get_number_or(ic, where, "c1", 0.446);
    get_number_or(ic, where, "c2", 0.66);
  } else if (kind == "constant") {
    check_keys(ic, where, {"kind", "value"});
    get_number(ic, where, "value");
  } else if (kind == "custom-expression") {
    check_keys(ic, where, {"kind", "expr"});
    Expression::parse(get_string(ic, where, "expr"));
  } else {
    throw ValidationError("initial.kind: unknown kind '" + kind + "'");
  }
}

inline void validate_output_block(const Json& o) {
  check_keys(o, "output", {"directory", "snapshot_times", "trace_stride", "write_csv_fields"});
  get_string_or(o, "output", "directory", "");
  if (o.contains("snapshot_times")) {
    const Json& st = o["snapshot_times"];
    if (!st.is_array()) throw ValidationError("output.snapshot_times: expected an array");
    for (size_t n = 0; n < st.size(); ++n)
      require(as_number(st[n], "output.snapshot_times") >= 0.0,
              "output.snapshot_times: times must be nonnegative");
  }
  require(get_int_or(o, "output", "trace_stride", 1) >= 1,
          "output.trace_stride: must be at least 1");
  get_bool_or(o, "output", "write_csv_fields", false);
}

inline void validate_experiment_block(const Json& e) {
  const std::string where = "experiment";
  const std::string kind = get_string(e, where, "kind");
  if (kind == "run") {
    check_keys(e, where, {"kind", "T_final"});
    require(get_number(e, where, "T_final") >= 0.0, "experiment.T_final: must be >= 0");
  } else if (kind == "converge") {
    check_keys(e, where,
               {"kind", "T_final", "dt_list", "alpha_list", "ref_dt_divisor", "ref_alpha",
                "order_band"});
    require(get_number(e, where, "T_final") > 0.0, "experiment.T_final: must be positive");
    std::vector<double> dts = get_number_list(e, where, "dt_list");
    require(dts.size() >= 2, "experiment.dt_list: need at least two time steps");
    for (size_t n = 0; n + 1 < dts.size(); ++n)
      require(dts[n] > dts[n + 1] && dts[n + 1] > 0.0,
              "experiment.dt_list: must be positive and strictly descending");
    if (e.contains("alpha_list")) get_number_list(e, where, "alpha_list");
    require(get_int_or(e, where, "ref_dt_divisor", 4) >= 2,
            "experiment.ref_dt_divisor: must be at least 2");
    get_number_or(e, where, "ref_alpha", 1e-5);
    if (e.contains("order_band")) {
      std::vector<double> band = get_number_list(e, where, "order_band");
      require(band.size() == 2 && band[0] < band[1],
              "experiment.order_band: expected [low, high]");
    }
  } else if (kind == "sweep-alpha") {
    check_keys(e, where, {"kind", "T_final", "alpha_list"});
    require(get_number(e, where, "T_final") > 0.0, "experiment.T_final: must be positive");
    std::vector<double> as = get_number_list(e, where, "alpha_list");
    for (size_t n = 0; n + 1 < as.size(); ++n)
      require(as[n] > as[n + 1] && as[n + 1] >= 0.0,
              "experiment.alpha_list: must be nonnegative and strictly descending");
  } else if (kind == "sweep-stability") {
    check_keys(e, where, {"kind", "T_final", "dt_list"});
    require(get_number(e, where, "T_final") > 0.0, "experiment.T_final: must be positive");
    for (double dt : get_number_list(e, where, "dt_list"))
      require(dt > 0.0, "experiment.dt_list: time steps must be positive");
  } else if (kind == "compare") {
    check_keys(e, where, {"kind", "T_final", "schemes", "accurate_dt"});
    require(get_number(e, where, "T_final") > 0.0, "experiment.T_final: must be positive");
    const Json& sc = get_field(e, where, "schemes");
    if (!sc.is_array() || sc.empty())
      throw ValidationError("experiment.schemes: expected a non-empty array of names");
    for (const Json& s : sc) {
      if (!s.is_string()) throw ValidationError("experiment.schemes: entries must be strings");
      parse_scheme(s.get<std::string>());
    }
    require(get_number_or(e, where, "accurate_dt", 1e-4) > 0.0,
            "experiment.accurate_dt: must be positive");
  } else {
    throw ValidationError("experiment.kind: unknown kind '" + kind + "'");
  }
}

}  // namespace detail

inline RunConfig parse_config(const Json& doc) {
  detail::check_keys(doc, "config",
                     {"name", "description", "model", "grid", "scheme", "initial", "output",
                      "experiment"});
  RunConfig cfg;
  cfg.name = detail::get_string_or(doc, "config", "name", "run");
  detail::validate_model_block(detail::get_field(doc, "config", "model"));
  detail::validate_grid_block(detail::get_field(doc, "config", "grid"));
  detail::validate_scheme_block(detail::get_field(doc, "config", "scheme"));
  detail::validate_initial_block(detail::get_field(doc, "config", "initial"));
  if (doc.contains("output")) detail::validate_output_block(doc["output"]);
  if (doc.contains("experiment")) detail::validate_experiment_block(doc["experiment"]);
  cfg.raw = doc;
  return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

// Applies one "dot.path=value" override onto the raw document. The value text
// is parsed as JSON when possible (numbers, booleans, arrays) and taken as a
// string otherwise, so scheme.dt=1e-4 and initial.kind=flower both work.
inline void apply_override(Json& doc, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ValidationError("override '" + assignment + "' is not of the form path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;  // bare strings need no quotes
  }
  Json* node = &doc;
  size_t begin = 0;
  while (true) {
    const size_t dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot - begin);
    if (key.empty())
      throw ValidationError("override '" + assignment + "' has an empty path segment");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!node->contains(key)) (*node)[key] = Json::object();
    node = &(*node)[key];
    if (!node->is_object())
      throw ValidationError("override '" + assignment + "': '" + key +
                            "' is not an object");
    begin = dot + 1;
  }
}

// --- builders ----------------------------------------------------------------

inline Grid build_grid(const RunConfig& cfg) {
  const Json& g = cfg.raw["grid"];
  return Grid::make(detail::get_number(g, "grid", "Lx"), detail::get_number(g, "grid", "Ly"),
                    static_cast<int>(detail::get_int(g, "grid", "Nx")),
                    static_cast<int>(detail::get_int(g, "grid", "Ny")));
}

inline ScalarField build_initial(const RunConfig& cfg, const Grid& grid) {
  const Json& ic = cfg.raw["initial"];
  const std::string kind = detail::get_string(ic, "initial", "kind");
  if (kind == "two_bubbles") {
    const Json& bb = ic["bubbles"];
    BubbleSpec b1{detail::as_number(bb[0][0], "initial.bubbles"),
                  detail::as_number(bb[0][1], "initial.bubbles"),
                  detail::as_number(bb[0][2], "initial.bubbles")};
    BubbleSpec b2{detail::as_number(bb[1][0], "initial.bubbles"),
                  detail::as_number(bb[1][1], "initial.bubbles"),
                  detail::as_number(bb[1][2], "initial.bubbles")};
    return ic_two_bubbles(grid, detail::get_number(ic, "initial", "eps"), b1, b2);
  }
  if (kind == "flower") return ic_flower(grid, detail::get_number(ic, "initial", "eps"));
  if (kind == "mbe_sine") return ic_mbe_sine(grid);
  if (kind == "pfc_random" || kind == "diblock_random") {
    const double base = detail::get_number(ic, "initial", "base");
    const double dflt_amp = (kind == "pfc_random") ? 0.01 : 0.001;
    const double amp = detail::get_number_or(ic, "initial", "amplitude", dflt_amp);
    const auto seed =
        static_cast<std::uint64_t>(detail::get_int_or(ic, "initial", "seed", 1));
    const bool center =
        detail::get_bool_or(ic, "initial", "center_mean", kind == "diblock_random");
    return ic_random_uniform(grid, base, amp, seed, center);
  }
  if (kind == "pfc_crystallites")
    return ic_crystallites(grid, detail::get_number_or(ic, "initial", "base", 0.285),
                           detail::get_number_or(ic, "initial", "c1", 0.446),
                           detail::get_number_or(ic, "initial", "c2", 0.66));
  if (kind == "constant")
    return ic_constant(grid, detail::get_number(ic, "initial", "value"));
  if (kind == "custom-expression")
    return ic_expression(grid, detail::get_string(ic, "initial", "expr"));
  throw ValidationError("initial.kind: unknown kind '" + kind + "'");
}

// phi_mean is the discrete mean of the built initial field; diblock uses it as
// the default long-range reference value when phibar0 is not given explicitly.
inline ModelSpec build_model(const RunConfig& cfg, const Grid& grid, double phi_mean) {
  const Json& m = cfg.raw["model"];
  const std::string name = detail::get_string(m, "model", "name");
  if (name == "allen-cahn") {
    ModelSpec spec = build_allen_cahn(grid, detail::get_number(m, "model", "eps"),
                                      detail::get_number(m, "model", "lambda"),
                                      detail::get_number(m, "model", "s"));
    if (m.contains("split_s1"))
      spec = build_multi_term(spec,
                              double_well_split(detail::get_number(m, "model", "split_s1")));
    return spec;
  }
  if (name == "cahn-hilliard")
    return build_cahn_hilliard(grid, detail::get_number(m, "model", "eps"),
                               detail::get_number(m, "model", "lambda"),
                               detail::get_number(m, "model", "s"));
  if (name == "mbe")
    return build_mbe(grid, detail::get_number(m, "model", "eps2"),
                     detail::get_number(m, "model", "s"));
  if (name == "pfc")
    return build_pfc(grid, detail::get_number(m, "model", "a0"),
                     detail::get_number(m, "model", "b0"),
                     detail::get_number(m, "model", "lambda"),
                     detail::get_number(m, "model", "s"));
  if (name == "diblock")
    return build_diblock(grid, detail::get_number(m, "model", "eps"),
                         detail::get_number(m, "model", "lambda"),
                         detail::get_number(m, "model", "sigma"),
                         detail::get_number_or(m, "model", "phibar0", phi_mean),
                         detail::get_number(m, "model", "s"));
  throw ValidationError("model.name: unknown model '" + name + "'");
}

inline SchemeConfig build_scheme(const RunConfig& cfg) {
  const Json& s = cfg.raw["scheme"];
  SchemeConfig sc;
  sc.scheme = parse_scheme(detail::get_string(s, "scheme", "name"));
  sc.dt = detail::get_number(s, "scheme", "dt");
  sc.alpha = detail::get_number_or(s, "scheme", "alpha", 1e-4);
  sc.C0 = detail::get_number_or(s, "scheme", "C0", 1.0);
  sc.eta = detail::get_number_or(s, "scheme", "eta", 0.99);
  if (s.contains("bootstrap"))
    sc.bootstrap = parse_bootstrap(detail::get_string(s, "scheme", "bootstrap"));
  sc.dealias = detail::get_bool_or(s, "scheme", "dealias", false);
  return sc;
}

struct OutputConfig {
  std::string directory;  // empty: no artifacts are written
  std::vector<double> snapshot_times;
  long trace_stride = 1;
  bool write_csv_fields = false;
};

inline OutputConfig build_output(const RunConfig& cfg) {
  OutputConfig oc;
  if (!cfg.raw.contains("output")) return oc;
  const Json& o = cfg.raw["output"];
  oc.directory = detail::get_string_or(o, "output", "directory", "");
  if (o.contains("snapshot_times"))
    for (const Json& v : o["snapshot_times"])
      oc.snapshot_times.push_back(detail::as_number(v, "output.snapshot_times"));
  oc.trace_stride = static_cast<long>(detail::get_int_or(o, "output", "trace_stride", 1));
  oc.write_csv_fields = detail::get_bool_or(o, "output", "write_csv_fields", false);
  return oc;
}

}  // namespace gradflow
