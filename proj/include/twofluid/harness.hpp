#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "twofluid/cases.hpp"

namespace twofluid {

struct RunConfig {
  std::string case_name = "kh";
  int N = 0;
  std::optional<double> dt;
  std::optional<double> courant;
  std::optional<double> t_end;
  std::string integrator;  // empty: case default
  bool strong_bc = true;
  double cg_tol = 1e-12;
  bool drift_correction = true;
  double alpha_l = 0.5;
  double amplitude = 1e-3;
  std::string out_dir;     // empty: no files
  int output_every = 0;    // steps between field snapshots; 0: about 100 snapshots
  std::string config_text; // echoed into the output directory

  CaseOptions case_options() const;
  StepConfig step_config() const;
  void validate() const;
};

struct MonitorRow {
  double t, c0_inf, c1_inf, mass_g_err, mass_l_err;
};

// Fields at volume centres, velocities averaged from the faces.
struct FieldFrame {
  double t = 0;
  Vec<double> s, alpha_l, u_g, u_l, p;
};

struct RunReport {
  std::vector<FieldFrame> frames;
  std::vector<MonitorRow> monitor;
  StateD final_state;
  ModelD model;
  int steps = 0;
  int total_cg_iterations = 0;
  int max_cg_iterations = 0;
  double wall_seconds = 0;
};

FieldFrame field_frame(const ModelD& md, const StateD& s, const CGConfig& cg);

// Integrates `c` from its initial state to t_end with fixed dt; the last step is
// shortened to land on t_end. `on_step` sees every accepted state.
StateD integrate(const CaseDefinition& c, const Tableau& tab, double dt, double t_end, const StepConfig& cfg,
                 const std::function<void(const StateD&, const StepInfo<double>&)>& on_step = {});

RunReport run(const RunConfig& cfg);

void write_fields_csv(const std::string& path, const std::vector<FieldFrame>& frames);
void write_monitor_csv(const std::string& path, const std::vector<MonitorRow>& rows);

// ---- convergence studies

struct ErrorRow {
  std::string integrator;
  double dt = 0;
  std::string component;
  double error = 0;
  bool failed = false;
};

struct SlopeRow {
  std::string integrator;
  std::string component;
  double slope = 0;
  int points = 0;
};

struct ConvergenceConfig {
  RunConfig base;
  std::vector<std::string> integrators;
  std::vector<double> dt_list;  // descending
  std::string reference_integrator = "rk4";
  double reference_dt = 1e-4;
  // compare against the case's exact solution instead of a reference run
  bool analytic_reference = false;
  // 0: error at the end time; otherwise the largest error over the multiples of
  // this interval, which must be a whole number of every step size
  double sample_interval = 0;
  // slopes use the `fit_points` smallest steps whose error exceeds the component's
  // floor (0: all points)
  std::array<double, 4> error_floor{0, 0, 0, 0};
  int fit_points = 0;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct ConvergenceResult {
  std::vector<ErrorRow> errors;
  std::vector<SlopeRow> slopes;
  bool partial = false;  // some member run failed
};

inline const std::array<std::string, 4> component_names{"alpha_l", "u_g", "u_l", "p"};

// Native-location fields with the postprocessed pressure.
Snapshot accurate_snapshot(const ModelD& md, const StateD& s, const CGConfig& cg);

// Scaled errors of alpha_l, u_g, u_l, p against a reference.
std::array<double, 4> component_errors(const Snapshot& s, const Snapshot& ref, const std::array<double, 4>& scale);

ConvergenceResult convergence(const ConvergenceConfig& cfg);

// Least-squares slope of log(err) against log(dt) over the points [first, last).
double fit_slope(const std::vector<double>& dt, const std::vector<double>& err, std::size_t first = 0,
                 std::size_t last = std::size_t(-1));

// Slope over the `points` smallest steps with error above `floor` (descending dt).
double fit_slope_asymptotic(const std::vector<double>& dt, const std::vector<double>& err, double floor, int points,
                            int* used = nullptr);

void write_errors_csv(const std::string& path, const std::vector<ErrorRow>& rows);
void write_slopes_csv(const std::string& path, const std::vector<SlopeRow>& rows);

// Default output root: $TWOFLUID_OUT or ./out
std::string default_output_root();

}  // namespace twofluid
