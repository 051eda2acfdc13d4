#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "twofluid/timeint.hpp"

namespace twofluid {

using ModelD = Model<double>;
using StateD = State<double>;

struct CaseOptions {
  int N = 0;                  // 0: case default
  bool strong_bc = true;      // inflow imposition
  double alpha_l = 0.5;       // sloshing fill level
  double amplitude = 1e-3;    // KH hold-up perturbation
  double wavenumber = 2 * pi<double>;
  CGConfig cg{};
  GeometryOptions geometry{};
};

struct CaseDefinition {
  std::string name;
  ModelD model;
  StateD initial;  // consistent
  double t_end = 0;
  double dt = 0;
  std::string integrator = "rk4";
  // per-component scales for error norms: alpha_l, u_g, u_l, p
  std::array<double, 4> error_scale{1, 1, 1, 1};
  // exact solution of the semi-discrete system, when known
  std::function<StateD(double)> exact;
};

// ---- Kelvin-Helmholtz (periodic)

struct KHParameters {
  FluidProps<double> fluid{1.1614, 1000, 1.8e-5, 8.9e-4};
  PipeGeometry<double> pipe{0.039, 1.0, 0.0, 1e-8};
  double g = 9.8;
  double u_l = 1.0;
  double alpha_l = 0.9;
  double friction_scale = 1.0;  // 0 gives the frictionless variant
};

struct KHSteady {
  double u_g = 0;
  double F_body = 0;       // driving force per unit volume [Pa/m]
  double dp_ds = 0;        // equivalent sustaining pressure gradient, -F_body
  int iterations = 0;
};

KHSteady kh_steady_state(double u_l, double alpha_l, const KHParameters& par = {},
                         FrictionModel friction = FrictionModel::all_regime, const GeometryOptions& geo = {});

ModelD kh_model(const KHParameters& par, const KHSteady& ss, int N, const GeometryOptions& geo = {});
DispersionResult<double> kh_dispersion(const KHParameters& par, const KHSteady& ss, double k, double amplitude,
                                       const GeometryOptions& geo = {});
// Base state plus Re[eps2 exp(i(omega2 t - k s))] sampled on the grid and projected.
StateD kh_initial_condition(const ModelD& md, const KHParameters& par, const KHSteady& ss,
                            const DispersionResult<double>& disp, const CGConfig& cg = {}, double t = 0,
                            bool project = true);
CaseDefinition kh_case(const CaseOptions& opt = {});

// ---- sloshing in a closed tilted pipe

struct SloshingParameters {
  FluidProps<double> fluid{1.1614, 1000, 1.5e-2, 5.0e-2};
  PipeGeometry<double> pipe{0.05, 1.0, 2.0 * pi<double> / 180, 1e-8};
  double g = 9.8;
};

CaseDefinition sloshing_case(const CaseOptions& opt = {}, const SloshingParameters& par = {});

// ---- hold-up wave from a varying gas inflow

struct IFPParameters {
  FluidProps<double> fluid{1.26, 1003, 1.8e-5, 1.516e-3};
  PipeGeometry<double> pipe{0.073, 1000.0, 0.0, 1e-8};
  double g = 9.8;
  double p_out = 1e6;
  double I_l = 1.0;
  double I_g_start = 0.02;
  double I_g_end = 0.04;
};

Signal<double> ifp_gas_signal(const IFPParameters& par = {});
CaseDefinition ifp_case(const CaseOptions& opt = {}, const IFPParameters& par = {});

// Uniform steady stratified flow at given mass flows: root of S_l/A_l - S_g/A_g.
double steady_holdup(const FluidProps<double>& fl, const PipeGeometry<double>& pipe, double g, double I_g,
                     double I_l, FrictionModel friction = FrictionModel::all_regime, const GeometryOptions& geo = {});

// ---- manufactured solution

struct MMSFields {
  FluidProps<double> fluid{1.26, 1003, 1.8e-5, 1.516e-3};
  PipeGeometry<double> pipe{0.125, 10.0, 0.0, 1e-8};
  double g = 9.8;
  double p_out = 1e6;
  double I_g0 = 0.04, I_l0 = 2.0;
  double a = 2, b = 1.0 / 20;
  double A_g_hat = 0, u_g_hat = 0, u_l_hat = 0;
  double c1 = 0, c2 = 0;
  GeometryOptions geometry{};

  static MMSFields make(const GeometryOptions& geo = {});

  double f(double t) const;
  double fdot(double t) const;
  double fddot(double t) const;
  double fdddot(double t) const;
  double A_g(double t) const { return A_g_hat * f(t); }
  double A_l(double t) const { return pipe.A() - A_g(t); }
  double m_g(double t) const { return fluid.rho_g * A_g(t); }
  double m_l(double t) const { return fluid.rho_l * A_l(t); }
  double I_g(double s, double t) const;
  double I_l(double s, double t) const;
  double u_g(double s, double t) const { return I_g(s, t) / m_g(t); }
  double u_l(double s, double t) const { return I_l(s, t) / m_l(t); }
  double p(double s) const { return c1 * s + c2; }
  // forcing per phase [N/m]
  double force_g(double s, double t) const;
  double force_l(double s, double t) const;
  // (dI/ds)^2 / m: half the second derivative of the momentum flux I^2/m
  double outflow_defect_g(double t) const;
  double outflow_defect_l(double t) const;
  StateD sample(const Grid<double>& grid, double t) const;
};

CaseDefinition mms_case(const CaseOptions& opt = {});

CaseDefinition make_case(const std::string& name, const CaseOptions& opt = {});

// ---- error measures

// Fields at their native locations: alpha_l and p on volumes, velocities on faces.
struct Snapshot {
  Vec<double> alpha_l, u_g, u_l, p;
};

Snapshot snapshot(const ModelD& md, const StateD& s);
double error_norm(const Vec<double>& numeric, const Vec<double>& reference, double scale = 1.0);

}  // namespace twofluid
