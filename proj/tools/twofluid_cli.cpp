#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "twofluid/harness.hpp"

using namespace twofluid;

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

std::vector<std::string> parse_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

void add_run_flags(CLI::App* app, RunConfig& rc, std::string& bc_mode, bool& no_drift, double& dt, double& courant,
                   double& tend) {
  app->add_option("--case", rc.case_name, "kh | sloshing | ifp | mms")
      ->check(CLI::IsMember({"kh", "sloshing", "ifp", "mms"}));
  app->add_option("--n", rc.N, "number of volumes (0: case default)");
  auto* o_dt = app->add_option("--dt", dt, "time step [s]");
  auto* o_c = app->add_option("--courant", courant, "Courant number");
  o_dt->excludes(o_c);
  app->add_option("--tend", tend, "end time [s]");
  app->add_option("--integrator", rc.integrator, "tableau name");
  app->add_option("--bc-mode", bc_mode, "strong | weak")->check(CLI::IsMember({"strong", "weak"}));
  app->add_option("--cg-tol", rc.cg_tol, "CG relative tolerance");
  app->add_flag("--no-drift-correction", no_drift, "disable the constraint drift terms");
  app->add_option("--alpha-l", rc.alpha_l, "sloshing fill level");
  app->add_option("--amplitude", rc.amplitude, "KH hold-up perturbation");
  app->add_option("--out", rc.out_dir, "output directory");
  app->add_option("--output-every", rc.output_every, "steps between field snapshots");
}

void finish_run_config(RunConfig& rc, const std::string& bc_mode, bool no_drift, double dt, double courant,
                       double tend, const std::string& sub) {
  rc.strong_bc = bc_mode == "strong";
  rc.drift_correction = !no_drift;
  if (dt > 0) rc.dt = dt;
  if (courant > 0) rc.courant = courant;
  if (tend > 0) rc.t_end = tend;
  if (rc.out_dir.empty()) rc.out_dir = default_output_root() + "/" + sub + "-" + rc.case_name;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incompressible two-fluid pipe flow simulator"};
  app.set_config("--config", "", "flat key=value configuration file");
  app.require_subcommand(1);

  RunConfig rc;
  std::string bc_mode = "strong";
  bool no_drift = false;
  double dt = 0, courant = 0, tend = 0;

  auto* run_cmd = app.add_subcommand("run", "integrate one case and write fields.csv and monitor.csv");
  add_run_flags(run_cmd, rc, bc_mode, no_drift, dt, courant, tend);

  auto* conv_cmd = app.add_subcommand("convergence", "temporal convergence study");
  RunConfig cc_rc;
  std::string cc_bc = "strong";
  bool cc_no_drift = false;
  double cc_dt = 0, cc_courant = 0, cc_tend = 0;
  add_run_flags(conv_cmd, cc_rc, cc_bc, cc_no_drift, cc_dt, cc_courant, cc_tend);
  std::string integrators = "rk2,rk3-proposed,rk4", dt_list = "0.01,0.005,0.0025";
  std::string ref_integrator = "rk4";
  double ref_dt = 1e-4;
  unsigned threads = 0;
  conv_cmd->add_option("--integrators", integrators, "comma separated tableau names");
  conv_cmd->add_option("--dt-list", dt_list, "comma separated descending time steps");
  conv_cmd->add_option("--ref-integrator", ref_integrator);
  conv_cmd->add_option("--ref-dt", ref_dt);
  bool analytic_ref = false;
  double sample_interval = 0, error_floor = 0;
  int fit_points = 0;
  conv_cmd->add_flag("--analytic-reference", analytic_ref, "compare against the exact solution (mms)");
  conv_cmd->add_option("--sample-interval", sample_interval, "max error over multiples of this time; 0: end time");
  conv_cmd->add_option("--error-floor", error_floor, "errors at or below this are left out of the fit");
  conv_cmd->add_option("--fit-points", fit_points, "fit over this many smallest steps; 0: all");
  conv_cmd->add_option("--threads", threads);

  auto* disp_cmd = app.add_subcommand("dispersion", "linear stability of the KH base state");
  std::string disp_case = "kh";
  double k = 2 * pi<double>, amp = 1e-6;
  disp_cmd->add_option("--case", disp_case)->check(CLI::IsMember({"kh"}));
  disp_cmd->add_option("--k", k, "wavenumber [1/m]");
  disp_cmd->add_option("--amplitude", amp, "hold-up fraction amplitude of eps2");

  auto* tab_cmd = app.add_subcommand("tableau", "check Runge-Kutta order conditions");
  std::string tab_name = "rk3-proposed";
  int order = 0;
  tab_cmd->add_option("--name", tab_name);
  tab_cmd->add_option("--order", order, "0: advertised order");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      finish_run_config(rc, bc_mode, no_drift, dt, courant, tend, "run");
      rc.config_text = app.config_to_str(true, false);
      const RunReport rep = run(rc);
      std::printf("steps=%d\nt_end=%.17g\nmax_cg_iterations=%d\nwall_seconds=%.3f\nout=%s\n", rep.steps,
                  rep.final_state.t, rep.max_cg_iterations, rep.wall_seconds, rc.out_dir.c_str());
    } else if (*conv_cmd) {
      finish_run_config(cc_rc, cc_bc, cc_no_drift, cc_dt, cc_courant, cc_tend, "convergence");
      ConvergenceConfig cfg;
      cfg.base = cc_rc;
      cfg.base.dt.reset();
      cfg.base.courant.reset();
      cfg.integrators = parse_names(integrators);
      cfg.dt_list = parse_list(dt_list);
      cfg.reference_integrator = ref_integrator;
      cfg.reference_dt = ref_dt;
      cfg.analytic_reference = analytic_ref;
      cfg.sample_interval = sample_interval;
      cfg.error_floor.fill(error_floor);
      cfg.fit_points = fit_points;
      cfg.threads = threads;
      const ConvergenceResult res = convergence(cfg);
      std::filesystem::create_directories(cc_rc.out_dir);
      write_errors_csv(cc_rc.out_dir + "/errors.csv", res.errors);
      write_slopes_csv(cc_rc.out_dir + "/slopes.csv", res.slopes);
      std::ofstream(cc_rc.out_dir + "/config.ini") << app.config_to_str(true, false);
      for (const auto& s : res.slopes)
        std::printf("slope.%s.%s=%.4f\n", s.integrator.c_str(), s.component.c_str(), s.slope);
      std::printf("partial=%d\nout=%s\n", int(res.partial), cc_rc.out_dir.c_str());
      return res.partial ? 2 : 0;
    } else if (*disp_cmd) {
      const KHParameters par;
      const KHSteady ss = kh_steady_state(par.u_l, par.alpha_l, par);
      const auto d = kh_dispersion(par, ss, k, amp);
      std::printf("u_g=%.10g\nF_body=%.10g\ndp_ds=%.10g\nk=%.10g\n", ss.u_g, ss.F_body, ss.dp_ds, k);
      std::printf("omega1_re=%.10g\nomega1_im=%.10g\nomega2_re=%.10g\nomega2_im=%.10g\n", d.omega1.real(),
                  d.omega1.imag(), d.omega2.real(), d.omega2.imag());
      const char* names[4] = {"A_l", "u_l", "u_g", "p"};
      for (int i = 0; i < 4; ++i)
        std::printf("eps2_%s_re=%.10g\neps2_%s_im=%.10g\n", names[i], d.eps2(i).real(), names[i], d.eps2(i).imag());
    } else if (*tab_cmd) {
      const Tableau& t = tableau(tab_name);
      const TableauReport r = verify_tableau(t, order > 0 ? order : t.order);
      std::printf("name=%s\nstages=%d\norder=%d\n", t.name.c_str(), t.stages(), r.order);
      for (const auto& c : r.classical)
        std::printf("classical[%s]=%s value=%.17g\n", c.name.c_str(), c.pass ? "PASS" : "FAIL", c.value);
      std::printf("classical=%s\n", r.classical_pass() ? "PASS" : "FAIL");
      if (r.has_dae_condition)
        std::printf("dae_extra=%s value=%.17g\n", r.dae.pass ? "PASS" : "FAIL", r.dae.value);
      else
        std::printf("dae_extra=NA\n");
      std::printf("subdiagonal_nonzero=%s\n", r.subdiagonal_nonzero ? "PASS" : "FAIL");
      return r.pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
