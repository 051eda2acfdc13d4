#include "twofluid/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <thread>

namespace twofluid {

CaseOptions RunConfig::case_options() const {
  CaseOptions o;
  o.N = N;
  o.strong_bc = strong_bc;
  o.alpha_l = alpha_l;
  o.amplitude = amplitude;
  o.cg.tol = cg_tol;
  return o;
}

StepConfig RunConfig::step_config() const {
  StepConfig s;
  s.cg.tol = cg_tol;
  s.drift_correction = drift_correction;
  return s;
}

void RunConfig::validate() const {
  if (dt && courant) throw DomainError("set either dt or courant, not both");
  if (dt && !(*dt > 0)) throw DomainError("dt must be positive");
  if (courant && !(*courant > 0)) throw DomainError("courant number must be positive");
  if (t_end && !(*t_end > 0)) throw DomainError("end time must be positive");
  if (!(cg_tol > 0)) throw DomainError("CG tolerance must be positive");
  if (N < 0) throw DomainError("N must be non-negative");
  if (!integrator.empty()) tableau(integrator);
}

FieldFrame field_frame(const ModelD& md, const StateD& s, const CGConfig& cg) {
  const auto& g = md.grid;
  const int n = g.N();
  const FaceFields<double> ff = face_fields(md, s);
  FieldFrame fr;
  fr.t = s.t;
  fr.s = g.x_center;
  fr.alpha_l = s.m_l / (md.fluid.rho_l * md.pipe.A());
  fr.u_g.resize(n);
  fr.u_l.resize(n);
  for (int i = 0; i < n; ++i) {
    const int r = g.periodic() ? (i + 1) % n : i + 1;
    fr.u_g(i) = (ff.u_g(i) + ff.u_g(r)) / 2;
    fr.u_l(i) = (ff.u_l(i) + ff.u_l(r)) / 2;
  }
  fr.p = pressure_postprocess(md, s, cg);
  return fr;
}

StateD integrate(const CaseDefinition& c, const Tableau& tab, double dt, double t_end, const StepConfig& cfg,
                 const std::function<void(const StateD&, const StepInfo<double>&)>& on_step) {
  StateD s = c.initial;
  const double t0 = s.t;
  const long nsteps = std::max(1L, long(std::ceil((t_end - t0) / dt - 1e-9)));
  StepInfo<double> info;
  for (long k = 0; k < nsteps; ++k) {
    const double h = k + 1 == nsteps ? t_end - s.t : dt;
    s = step(c.model, tab, s, h, cfg, &info);
    if (k + 1 == nsteps) s.t = t_end;
    if (!s.m_g.allFinite() || !s.I_g.allFinite() || !s.I_l.allFinite() || !s.m_l.allFinite())
      throw SolverError("non-finite state at t = " + std::to_string(s.t));
    if (on_step) on_step(s, info);
  }
  return s;
}

RunReport run(const RunConfig& cfg) {
  cfg.validate();
  const auto clock0 = std::chrono::steady_clock::now();
  const CaseDefinition c = make_case(cfg.case_name, cfg.case_options());
  const Tableau& tab = tableau(cfg.integrator.empty() ? c.integrator : cfg.integrator);
  const StepConfig sc = cfg.step_config();
  const double t_end = cfg.t_end.value_or(c.t_end);
  double dt = c.dt;
  if (cfg.dt) dt = *cfg.dt;
  if (cfg.courant) dt = cfl_timestep(c.model, c.initial, *cfg.courant);
  const long nsteps = std::max(1L, long(std::ceil((t_end - c.initial.t) / dt - 1e-9)));
  const int every = cfg.output_every > 0 ? cfg.output_every : int(std::max(1L, nsteps / 100));

  RunReport rep;
  rep.model = c.model;
  Monitor<double> mon;
  mon.start(c.model, c.initial);
  auto record = [&](const StateD& s) {
    rep.monitor.push_back({s.t, mon.c0(c.model, s), mon.c1(c.model, s), mon.mass_error_g(c.model, s),
                           mon.mass_error_l(c.model, s)});
  };
  record(c.initial);
  rep.frames.push_back(field_frame(c.model, c.initial, sc.cg));
  long k = 0;
  rep.final_state = integrate(c, tab, dt, t_end, sc, [&](const StateD& s, const StepInfo<double>& info) {
    ++k;
    mon.accumulate(info);
    record(s);
    rep.total_cg_iterations += info.cg_iterations;
    rep.max_cg_iterations = std::max(rep.max_cg_iterations, info.max_cg_iterations);
    if (k % every == 0 || k == nsteps) rep.frames.push_back(field_frame(c.model, s, sc.cg));
  });
  rep.steps = int(k);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    write_fields_csv(cfg.out_dir + "/fields.csv", rep.frames);
    write_monitor_csv(cfg.out_dir + "/monitor.csv", rep.monitor);
    if (!cfg.config_text.empty()) std::ofstream(cfg.out_dir + "/config.ini") << cfg.config_text;
  }
  return rep;
}

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << std::setprecision(17);
  return os;
}

}  // namespace

void write_fields_csv(const std::string& path, const std::vector<FieldFrame>& frames) {
  std::ofstream os = open_csv(path);
  os << "t,s,alpha_l,u_g,u_l,p\n";
  for (const auto& f : frames)
    for (int i = 0; i < f.s.size(); ++i)
      os << f.t << ',' << f.s(i) << ',' << f.alpha_l(i) << ',' << f.u_g(i) << ',' << f.u_l(i) << ',' << f.p(i) << '\n';
}

void write_monitor_csv(const std::string& path, const std::vector<MonitorRow>& rows) {
  std::ofstream os = open_csv(path);
  os << "t,c0_inf,c1_inf,mass_g_err,mass_l_err\n";
  for (const auto& r : rows)
    os << r.t << ',' << r.c0_inf << ',' << r.c1_inf << ',' << r.mass_g_err << ',' << r.mass_l_err << '\n';
}

Snapshot accurate_snapshot(const ModelD& md, const StateD& s, const CGConfig& cg) {
  Snapshot snap = snapshot(md, s);
  snap.p = pressure_postprocess(md, s, cg);
  return snap;
}

std::array<double, 4> component_errors(const Snapshot& s, const Snapshot& ref, const std::array<double, 4>& scale) {
  return {error_norm(s.alpha_l, ref.alpha_l, scale[0]), error_norm(s.u_g, ref.u_g, scale[1]),
          error_norm(s.u_l, ref.u_l, scale[2]), error_norm(s.p, ref.p, scale[3])};
}

double fit_slope(const std::vector<double>& dt, const std::vector<double>& err, std::size_t first, std::size_t last) {
  last = std::min(last, dt.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = first; i < last; ++i) {
    if (!(err[i] > 0) || !std::isfinite(err[i])) continue;
    const double x = std::log(dt[i]), y = std::log(err[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++n;
  }
  if (n < 2) return std::nan("");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

template <typename Job>
void parallel_for(std::size_t count, unsigned threads, const Job& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = unsigned(std::min<std::size_t>(threads, count));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

double fit_slope_asymptotic(const std::vector<double>& dt, const std::vector<double>& err, double floor, int points,
                            int* used) {
  std::vector<double> x, y;
  for (std::size_t i = dt.size(); i-- > 0;) {
    if (points > 0 && int(x.size()) == points) break;
    if (!std::isfinite(err[i]) || !(err[i] > floor)) continue;
    x.insert(x.begin(), dt[i]);
    y.insert(y.begin(), err[i]);
  }
  if (used) *used = int(x.size());
  return fit_slope(x, y);
}

namespace {

// Accurate snapshots at the sample times of one run; the last entry is the end time.
std::vector<Snapshot> sampled_run(const CaseDefinition& c, const Tableau& tab, double dt, double t_end,
                                  double interval, const StepConfig& sc) {
  std::vector<Snapshot> out;
  const long every = interval > 0 ? std::lround(interval / dt) : 0;
  long k = 0;
  const StateD s = integrate(c, tab, dt, t_end, sc, [&](const StateD& st, const StepInfo<double>&) {
    ++k;
    if (every > 0 && k % every == 0 && st.t < t_end - 0.5 * dt) out.push_back(accurate_snapshot(c.model, st, sc.cg));
  });
  out.push_back(accurate_snapshot(c.model, s, sc.cg));
  return out;
}

}  // namespace

ConvergenceResult convergence(const ConvergenceConfig& cfg) {
  cfg.base.validate();
  if (cfg.dt_list.empty() || cfg.integrators.empty()) throw DomainError("convergence needs integrators and dt values");
  for (std::size_t i = 1; i < cfg.dt_list.size(); ++i)
    if (!(cfg.dt_list[i] < cfg.dt_list[i - 1])) throw DomainError("dt list must be strictly descending");
  if (cfg.sample_interval < 0) throw DomainError("sample interval must be non-negative");
  const CaseDefinition c = make_case(cfg.base.case_name, cfg.base.case_options());
  if (cfg.analytic_reference && !c.exact) throw DomainError("case " + c.name + " has no exact solution");
  const StepConfig sc = cfg.base.step_config();
  const double t_end = cfg.base.t_end.value_or(c.t_end);

  struct Job {
    std::string integrator;
    double dt;
  };
  std::vector<Job> jobs;
  if (!cfg.analytic_reference) jobs.push_back({cfg.reference_integrator, cfg.reference_dt});
  for (const auto& name : cfg.integrators)
    for (double dt : cfg.dt_list) jobs.push_back({name, dt});
  if (cfg.sample_interval > 0)
    for (const Job& job : jobs) {
      const long every = std::lround(cfg.sample_interval / job.dt);
      if (every < 1 || std::abs(every * job.dt - cfg.sample_interval) > 1e-9 * cfg.sample_interval)
        throw DomainError("sample interval is not a multiple of dt = " + std::to_string(job.dt));
    }
  std::vector<std::optional<std::vector<Snapshot>>> runs(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    try {
      runs[i] = sampled_run(c, tableau(jobs[i].integrator), jobs[i].dt, t_end, cfg.sample_interval, sc);
    } catch (const std::exception&) {
      runs[i].reset();
    }
  });

  std::vector<Snapshot> ref;
  std::size_t j = 0;
  if (cfg.analytic_reference) {
    const long count = cfg.sample_interval > 0 ? long(std::ceil(t_end / cfg.sample_interval - 1e-9)) : 1;
    for (long k = 1; k <= count; ++k) {
      const double t = k == count ? t_end : c.initial.t + k * cfg.sample_interval;
      ref.push_back(snapshot(c.model, c.exact(t)));
    }
  } else {
    if (!runs[0]) throw SolverError("reference run failed");
    ref = *runs[0];
    j = 1;
  }

  ConvergenceResult res;
  for (const auto& name : cfg.integrators) {
    std::array<std::vector<double>, 4> errs;
    std::vector<double> dts;
    for (double dt : cfg.dt_list) {
      const auto& run = runs[j++];
      std::array<double, 4> e;
      e.fill(std::nan(""));
      if (run) {
        if (run->size() != ref.size()) throw DomainError("sample count differs from the reference");
        e.fill(0);
        for (std::size_t k = 0; k < ref.size(); ++k) {
          const auto ek = component_errors((*run)[k], ref[k], c.error_scale);
          for (int m = 0; m < 4; ++m) e[m] = std::max(e[m], ek[m]);
        }
      }
      // an unstable run is reported but kept out of the fit
      const bool bad = !run || !(e[0] < 1) || !std::isfinite(e[0]);
      res.partial |= !run;
      dts.push_back(dt);
      for (int k = 0; k < 4; ++k) {
        res.errors.push_back({name, dt, component_names[k], e[k], !run});
        errs[k].push_back(bad ? std::nan("") : e[k]);
      }
    }
    for (int k = 0; k < 4; ++k) {
      int pts = 0;
      const double slope = fit_slope_asymptotic(dts, errs[k], cfg.error_floor[k], cfg.fit_points, &pts);
      res.slopes.push_back({name, component_names[k], slope, pts});
    }
  }
  return res;
}

void write_errors_csv(const std::string& path, const std::vector<ErrorRow>& rows) {
  std::ofstream os = open_csv(path);
  os << "integrator,dt,component,error\n";
  for (const auto& r : rows) os << r.integrator << ',' << r.dt << ',' << r.component << ',' << r.error << '\n';
}

void write_slopes_csv(const std::string& path, const std::vector<SlopeRow>& rows) {
  std::ofstream os = open_csv(path);
  os << "integrator,component,slope,points\n";
  for (const auto& r : rows) os << r.integrator << ',' << r.component << ',' << r.slope << ',' << r.points << '\n';
}

std::string default_output_root() {
  if (const char* env = std::getenv("TWOFLUID_OUT"); env && *env) return env;
  return "out";
}

}  // namespace twofluid
