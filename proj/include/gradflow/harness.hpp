// harness.hpp — experiment drivers: time-loop runner, convergence studies,
// alpha/stability sweeps, and scheme comparisons.
//
// All drivers are pure computations over in-memory state; artifact writing is
// the caller's business. Sweep entries are independent and may run on a small
// worker pool (jobs > 1); results are stored by index so the output does not
// depend on scheduling. Reference runs are memoized in a content-addressed
// cache keyed by a hash of model, scheme, initial data and horizon.
#pragma once

#include <atomic>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gradflow/diagnostics.hpp"

namespace gradflow {

namespace detail {

inline void parallel_for(int jobs, size_t n, const std::function<void(size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const size_t count = std::min<size_t>(static_cast<size_t>(jobs), n);
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (size_t w = 0; w < count; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline std::uint64_t fnv1a_bytes(const void* data, size_t n,
                                 std::uint64_t h = 1469598103934665603ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a_double(double x, std::uint64_t h) {
  return fnv1a_bytes(&x, sizeof(x), h);
}

inline std::uint64_t fnv1a_symbol(const SpectralSymbol& s, std::uint64_t h) {
  for (size_t n = 0; n < s.size(); ++n) h = fnv1a_double(s[n], h);
  return h;
}

}  // namespace detail

// Content hash identifying a run: model operators and parameters, scheme
// configuration, initial data, and horizon. Nonlinear terms are identified by
// their count and stabilization shifts (the closed forms are determined by the
// model name, which is hashed too).
inline std::uint64_t run_identity_hash(const ModelSpec& m, const SchemeConfig& cfg,
                                       const ScalarField& phi0, double T_final) {
  using detail::fnv1a_bytes;
  using detail::fnv1a_double;
  std::uint64_t h = fnv1a_bytes(m.name.data(), m.name.size());
  const Grid& g = m.grid;
  const int dims[2] = {g.nx(), g.ny()};
  h = fnv1a_bytes(dims, sizeof(dims), h);
  h = fnv1a_double(g.lx(), h);
  h = fnv1a_double(g.ly(), h);
  h = detail::fnv1a_symbol(m.mobility, h);
  h = detail::fnv1a_symbol(m.linear, h);
  h = detail::fnv1a_symbol(m.stabilization, h);
  h = detail::fnv1a_symbol(m.extra_linear, h);
  h = detail::fnv1a_symbol(m.green, h);
  h = fnv1a_double(m.extra_forcing, h);
  h = fnv1a_double(m.s, h);
  const std::uint64_t nterms = m.terms.size();
  h = fnv1a_bytes(&nterms, sizeof(nterms), h);
  for (const NonlinearTerm& t : m.terms) h = fnv1a_double(t.s, h);
  const int ids[3] = {static_cast<int>(cfg.scheme), static_cast<int>(cfg.bootstrap),
                      cfg.dealias ? 1 : 0};
  h = fnv1a_bytes(ids, sizeof(ids), h);
  h = fnv1a_double(cfg.dt, h);
  h = fnv1a_double(cfg.alpha, h);
  h = fnv1a_double(cfg.C0, h);
  h = fnv1a_double(cfg.eta, h);
  h = fnv1a_bytes(phi0.values().data(), phi0.size() * sizeof(double), h);
  h = fnv1a_double(T_final, h);
  return h;
}

// Memoized reference solutions (final-time fields), shared across study calls.
class ReferenceCache {
 public:
  ScalarField get_or_compute(std::uint64_t key, const std::function<ScalarField()>& fn) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    ScalarField field = fn();
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(key, std::move(field)).first->second;
  }
  size_t size() const { return cache_.size(); }

 private:
  std::mutex mu_;
  std::map<std::uint64_t, ScalarField> cache_;
};

// Number of steps needed to land on T_final exactly (within rounding).
inline long step_count(double T_final, double dt) {
  require(T_final >= 0.0, "run: T_final must be nonnegative");
  const double raw = T_final / dt;
  const long n = std::lround(raw);
  require(std::abs(n * dt - T_final) <= 1e-9 * std::max(dt, T_final),
          "run: dt must divide T_final");
  return n;
}

struct RunResult {
  EnergyTrace trace;
  State final_state;
  std::vector<std::pair<double, ScalarField>> snapshots;  // (requested time, field)
  bool diverged = false;
  long diverged_step = -1;
  std::string message;
};

// Steps the scheme until t >= T_final, recording a trace (every trace_stride
// steps; the first and last records are always present) and snapshots at the
// nearest completed step to each requested time. A divergence never throws
// away completed work: the partial trace, snapshots and the failing step index
// come back with diverged = true.
inline RunResult run_simulation(const ModelSpec& m, const SchemeConfig& cfg, ScalarField phi0,
                                double T_final, const std::vector<double>& snapshot_times = {},
                                long trace_stride = 1) {
  require(trace_stride >= 1, "run: trace_stride must be at least 1");
  const long n_steps = step_count(T_final, cfg.dt);
  std::map<long, std::vector<double>> plan;
  for (double ts : snapshot_times) {
    require(ts >= 0.0 && ts <= T_final + 1e-9 * std::max(1.0, T_final),
            "run: snapshot times must lie in [0, T_final]");
    long target = std::lround(ts / cfg.dt);
    target = std::max(0L, std::min(n_steps, target));
    plan[target].push_back(ts);
  }

  RunResult result;
  State st = init_state(m, cfg, std::move(phi0));
  result.trace.push_back(initial_record(m, cfg, st));
  if (auto it = plan.find(0); it != plan.end())
    for (double ts : it->second) result.snapshots.emplace_back(ts, st.phi);

  for (long n = 0; n < n_steps; ++n) {
    StepReport rep;
    try {
      rep = advance(m, cfg, st);
    } catch (const DivergenceError& e) {
      result.diverged = true;
      result.diverged_step = e.step_index;
      result.message = e.what();
      break;
    }
    if (rep.state.step % trace_stride == 0 || rep.state.step == n_steps)
      result.trace.push_back(make_record(m, cfg, rep));
    if (auto it = plan.find(rep.state.step); it != plan.end())
      for (double ts : it->second) result.snapshots.emplace_back(ts, rep.state.phi);
    st = std::move(rep.state);
  }
  result.final_state = std::move(st);
  return result;
}

inline RunResult require_completed(RunResult r, const std::string& what) {
  if (r.diverged)
    throw DivergenceError(r.diverged_step, what + " diverged: " + r.message);
  return r;
}

// --- convergence -------------------------------------------------------------

struct ConvergenceEntry {
  double dt = 0.0;
  double error = 0.0;          // L2 distance to the reference field at T_final
  double order = 0.0;          // observed order vs the previous (coarser) entry; 0 for the first
  double final_aux_dev = 0.0;  // |r - 1| (csav) or |ratio - 1| (sav) at T_final
};

struct ConvergenceResult {
  std::vector<ConvergenceEntry> entries;
  double ref_dt = 0.0;
  double ref_alpha = 0.0;
};

// Self-convergence against the same scheme at dt_ref = min(dt_list)/ref_divisor
// and alpha = ref_alpha. Entries must be strictly descending in dt.
inline ConvergenceResult convergence_study(const ModelSpec& m, const SchemeConfig& base,
                                           const std::vector<double>& dt_list,
                                           const ScalarField& phi0, double T_final,
                                           long ref_divisor = 4, double ref_alpha = 1e-5,
                                           ReferenceCache* cache = nullptr, int jobs = 1) {
  require(!dt_list.empty(), "convergence: dt_list must not be empty");
  for (size_t i = 0; i + 1 < dt_list.size(); ++i)
    require(dt_list[i] > dt_list[i + 1], "convergence: dt_list must be strictly descending");
  require(ref_divisor >= 2, "convergence: ref_divisor must be at least 2");

  SchemeConfig ref_cfg = base;
  ref_cfg.dt = dt_list.back() / static_cast<double>(ref_divisor);
  ref_cfg.alpha = ref_alpha;
  auto run_reference = [&]() {
    return require_completed(run_simulation(m, ref_cfg, phi0, T_final), "reference run")
        .final_state.phi;
  };
  ScalarField phi_ref =
      cache ? cache->get_or_compute(run_identity_hash(m, ref_cfg, phi0, T_final),
                                    run_reference)
            : run_reference();

  ConvergenceResult result;
  result.ref_dt = ref_cfg.dt;
  result.ref_alpha = ref_alpha;
  result.entries.resize(dt_list.size());
  detail::parallel_for(jobs, dt_list.size(), [&](size_t i) {
    SchemeConfig cfg = base;
    cfg.dt = dt_list[i];
    RunResult r = require_completed(run_simulation(m, cfg, phi0, T_final),
                                    "convergence run (dt=" + std::to_string(cfg.dt) + ")");
    ConvergenceEntry e;
    e.dt = cfg.dt;
    e.error = l2_norm(detail::lincomb(1.0, r.final_state.phi, -1.0, phi_ref));
    const TraceRecord& last = r.trace.back();
    e.final_aux_dev = is_sav_family(base.scheme) ? std::abs(last.consistency - 1.0)
                                                 : std::abs(last.aux - 1.0);
    result.entries[i] = e;
  });
  for (size_t i = 1; i < result.entries.size(); ++i) {
    const ConvergenceEntry& prev = result.entries[i - 1];
    ConvergenceEntry& cur = result.entries[i];
    cur.order = std::log(prev.error / cur.error) / std::log(prev.dt / cur.dt);
  }
  return result;
}

// --- sweeps --------------------------------------------------------------------

struct AlphaSweepEntry {
  double alpha = 0.0;
  double max_aux_dev = 0.0;  // max over the run of |r - 1| (csav) / |ratio - 1| (sav)
};

inline std::vector<AlphaSweepEntry> alpha_sweep(const ModelSpec& m, const SchemeConfig& base,
                                                const std::vector<double>& alpha_list,
                                                const ScalarField& phi0, double T_final,
                                                int jobs = 1) {
  require(!alpha_list.empty(), "alpha sweep: alpha_list must not be empty");
  std::vector<AlphaSweepEntry> entries(alpha_list.size());
  detail::parallel_for(jobs, alpha_list.size(), [&](size_t i) {
    SchemeConfig cfg = base;
    cfg.alpha = alpha_list[i];
    RunResult r = require_completed(run_simulation(m, cfg, phi0, T_final),
                                    "alpha sweep run (alpha=" + std::to_string(cfg.alpha) + ")");
    AlphaSweepEntry e;
    e.alpha = cfg.alpha;
    for (const TraceRecord& rec : r.trace) {
      const double dev = is_sav_family(base.scheme) ? std::abs(rec.consistency - 1.0)
                                                    : std::abs(rec.aux - 1.0);
      e.max_aux_dev = std::max(e.max_aux_dev, dev);
    }
    entries[i] = e;
  });
  return entries;
}

struct StabilityEntry {
  double dt = 0.0;
  bool diverged = false;
  bool monotone = false;
  long first_violation = -1;
  double max_increase = 0.0;
};

inline std::vector<StabilityEntry> stability_sweep(const ModelSpec& m, const SchemeConfig& base,
                                                   const std::vector<double>& dt_list,
                                                   const ScalarField& phi0, double T_final,
                                                   double tol_abs = 1e-10, double tol_rel = 1e-10,
                                                   int jobs = 1) {
  require(!dt_list.empty(), "stability sweep: dt_list must not be empty");
  std::vector<StabilityEntry> entries(dt_list.size());
  detail::parallel_for(jobs, dt_list.size(), [&](size_t i) {
    SchemeConfig cfg = base;
    cfg.dt = dt_list[i];
    StabilityEntry e;
    e.dt = cfg.dt;
    RunResult r = run_simulation(m, cfg, phi0, T_final);
    if (r.diverged) {
      e.diverged = true;
      entries[i] = e;
      return;
    }
    EnergyAudit audit = audit_monotonicity(r.trace, tol_abs, tol_rel);
    e.monotone = audit.monotone;
    e.first_violation = audit.first_violation;
    e.max_increase = audit.max_increase;
    entries[i] = e;
  });
  return entries;
}

// --- scheme comparison ----------------------------------------------------------

// The energy curve a paper-style plot would show: csav subtracts the r/alpha
// constant, which equals the original functional exactly; sav plots E_M.
inline double plotted_energy(const SchemeConfig& cfg, const TraceRecord& rec) {
  return is_sav_family(cfg.scheme) ? rec.energy_discrete : rec.energy_original;
}

struct SchemeComparisonEntry {
  std::string scheme;
  bool diverged = false;
  double final_l2_error = 0.0;  // vs the accurate trajectory at T_final
  double max_ratio_dev = 0.0;   // max over steps of |consistency - 1|
  double max_energy_dev = 0.0;  // max over aligned times of |plotted - accurate energy|
};

struct SchemeComparisonResult {
  std::vector<SchemeComparisonEntry> entries;
  double accurate_dt = 0.0;
  EnergyTrace accurate_trace;  // records aligned to the shared scheme step times
};

// Runs each scheme at the shared base.dt from the shared initial data and
// measures it against one accurate trajectory (semi-implicit CN, alpha = 0)
// computed at accurate_dt. accurate_dt must divide base.dt so the energy
// curves align without interpolation. Per-scheme divergences are recorded and
// the comparison continues.
inline SchemeComparisonResult scheme_comparison(const ModelSpec& m, const SchemeConfig& base,
                                                const std::vector<Scheme>& schemes,
                                                const ScalarField& phi0, double T_final,
                                                double accurate_dt, int jobs = 1) {
  require(!schemes.empty(), "comparison: scheme list must not be empty");
  const long ratio = std::lround(base.dt / accurate_dt);
  require(ratio >= 1 && std::abs(ratio * accurate_dt - base.dt) <= 1e-9 * base.dt,
          "comparison: accurate_dt must divide the shared dt");

  SchemeConfig acc = base;
  acc.scheme = Scheme::SemiImplicitCn;
  acc.dt = accurate_dt;
  RunResult accurate = require_completed(
      run_simulation(m, acc, phi0, T_final, {}, ratio), "accurate reference run");

  SchemeComparisonResult result;
  result.accurate_dt = accurate_dt;
  result.accurate_trace = accurate.trace;
  result.entries.resize(schemes.size());
  detail::parallel_for(jobs, schemes.size(), [&](size_t i) {
    SchemeConfig cfg = base;
    cfg.scheme = schemes[i];
    SchemeComparisonEntry e;
    e.scheme = scheme_name(cfg.scheme);
    RunResult r = run_simulation(m, cfg, phi0, T_final);
    if (r.diverged) {
      e.diverged = true;
      result.entries[i] = std::move(e);
      return;
    }
    e.final_l2_error =
        l2_norm(detail::lincomb(1.0, r.final_state.phi, -1.0, accurate.final_state.phi));
    require(r.trace.size() == accurate.trace.size(),
            "comparison: trace misalignment between scheme and accurate runs");
    for (size_t k = 0; k < r.trace.size(); ++k) {
      e.max_ratio_dev = std::max(e.max_ratio_dev, std::abs(r.trace[k].consistency - 1.0));
      const double dev =
          std::abs(plotted_energy(cfg, r.trace[k]) - accurate.trace[k].energy_original);
      e.max_energy_dev = std::max(e.max_energy_dev, dev);
    }
    result.entries[i] = std::move(e);
  });
  return result;
}

}  // namespace gradflow
