#include "twofluid/cases.hpp"

#include <cmath>
#include <complex>

namespace twofluid {

namespace {

SourceTerms<double> uniform_sources(const FluidProps<double>& fl, const PipeGeometry<double>& pipe, double g,
                                    double alpha, double u_g, double u_l, const ForcePoint<double>& body,
                                    FrictionModel friction, const GeometryOptions& geo) {
  const CrossSection<double> cs = cross_section(alpha, pipe, geo);
  return source_terms(FlowPoint<double>{alpha, u_g, u_l}, cs, fl, pipe, g, body, friction);
}

// end hold-up masses copied from the adjacent volumes
void set_end_masses(StateD& s) {
  const int n = int(s.m_g.size());
  s.mb_g << s.m_g(0), s.m_g(n - 1);
  s.mb_l << s.m_l(0), s.m_l(n - 1);
}

}  // namespace

// ---------------------------------------------------------------------------

KHSteady kh_steady_state(double u_l, double alpha_l, const KHParameters& par, FrictionModel friction,
                         const GeometryOptions& geo) {
  const double A = par.pipe.A();
  const double A_l = alpha_l * A, A_g = A - A_l;
  const double scale = par.friction_scale;
  // sources with the driving force split off: S = S0(u_g) + F A_beta
  auto S0 = [&](double u_g) {
    const SourceTerms<double> s = uniform_sources(par.fluid, par.pipe, par.g, alpha_l, u_g, u_l, {}, friction, geo);
    const double grav_g = -par.fluid.rho_g * A_g * par.g * std::sin(par.pipe.phi);
    const double grav_l = -par.fluid.rho_l * A_l * par.g * std::sin(par.pipe.phi);
    return Eigen::Vector2d(scale * (s.S_g - grav_g) + grav_g, scale * (s.S_l - grav_l) + grav_l);
  };
  Eigen::Vector2d x(u_l + 5.0, 0.0);
  x(1) = -S0(x(0))(0) / A_g;
  KHSteady out;
  for (int it = 1; it <= 100; ++it) {
    const Eigen::Vector2d r = S0(x(0)) + x(1) * Eigen::Vector2d(A_g, A_l);
    const double h = 1e-7 * std::max(1.0, std::abs(x(0)));
    const Eigen::Vector2d dS = (S0(x(0) + h) - S0(x(0) - h)) / (2 * h);
    Eigen::Matrix2d J;
    J << dS(0), A_g, dS(1), A_l;
    const double jscale = J.cwiseAbs().maxCoeff();
    if (std::abs(J.determinant()) <= 1e-10 * jscale * jscale)
      throw DomainError("steady-state Jacobian is singular (no friction to balance the driving force)");
    const Eigen::Vector2d dx = J.partialPivLu().solve(-r);
    x += dx;
    out.iterations = it;
    if (std::abs(dx(0)) <= 1e-13 * std::abs(x(0)) && std::abs(dx(1)) <= 1e-13 * std::max(1.0, std::abs(x(1)))) break;
    if (it == 100) throw DomainError("steady-state Newton iteration did not converge");
  }
  out.u_g = x(0);
  out.F_body = x(1);
  out.dp_ds = -x(1);
  return out;
}

ModelD kh_model(const KHParameters& par, const KHSteady& ss, int N, const GeometryOptions& geo) {
  ModelD md;
  md.pipe = par.pipe;
  md.fluid = par.fluid;
  md.g = par.g;
  md.geometry = geo;
  md.grid = Grid<double>::uniform(N, par.pipe.L, Topology::periodic);
  md.left = md.right = BoundarySpec<double>::periodic();
  md.body = BodyForce<double>::constant(ss.F_body);
  md.validate();
  return md;
}

DispersionResult<double> kh_dispersion(const KHParameters& par, const KHSteady& ss, double k, double amplitude,
                                       const GeometryOptions& geo) {
  DispersionOptions opt;
  opt.amplitude = amplitude;
  opt.geometry = geo;
  const PrimitivePoint<double> base{par.alpha_l * par.pipe.A(), par.u_l, ss.u_g, 0.0};
  return dispersion(base, k, par.fluid, par.pipe, par.g, ForcePoint<double>{ss.F_body, 0, 0}, opt);
}

StateD kh_initial_condition(const ModelD& md, const KHParameters& par, const KHSteady& ss,
                            const DispersionResult<double>& disp, const CGConfig& cg, double t, bool project) {
  using C = std::complex<double>;
  const auto& g = md.grid;
  const double A = md.pipe.A();
  auto wave = [&](int comp, double s) {
    return std::real(disp.eps2(comp) * std::exp(C(0, 1) * (disp.omega2 * t - C(disp.k * s))));
  };
  StateD st = StateD::zeros(g);
  st.t = t;
  for (int i = 0; i < g.N(); ++i) {
    const double A_l = par.alpha_l * A + wave(0, g.x_center(i));
    st.m_l(i) = md.fluid.rho_l * A_l;
    st.m_g(i) = md.fluid.rho_g * (A - A_l);
    st.p(i) = wave(3, g.x_center(i));
  }
  Vec<double> mg, ml;
  face_masses(g, st.m_g, st.mb_g, mg);
  face_masses(g, st.m_l, st.mb_l, ml);
  for (int f = 0; f < g.faces(); ++f) {
    st.I_l(f) = ml(f) * (par.u_l + wave(1, g.x_face(f)));
    st.I_g(f) = mg(f) * (ss.u_g + wave(2, g.x_face(f)));
  }
  return project ? consistent_init(md, st, cg) : st;
}

CaseDefinition kh_case(const CaseOptions& opt) {
  const KHParameters par;
  const KHSteady ss = kh_steady_state(par.u_l, par.alpha_l, par, FrictionModel::all_regime, opt.geometry);
  CaseDefinition c;
  c.name = "kh";
  c.model = kh_model(par, ss, opt.N > 0 ? opt.N : 40, opt.geometry);
  const DispersionResult<double> disp = kh_dispersion(par, ss, opt.wavenumber, opt.amplitude, opt.geometry);
  c.initial = kh_initial_condition(c.model, par, ss, disp, opt.cg);
  c.t_end = 1.0;
  c.dt = 1e-3;
  c.integrator = "rk4";
  c.error_scale = {opt.amplitude, std::abs(disp.eps2(2)), std::abs(disp.eps2(1)), std::abs(disp.eps2(3))};
  return c;
}

// ---------------------------------------------------------------------------

CaseDefinition sloshing_case(const CaseOptions& opt, const SloshingParameters& par) {
  if (!(opt.alpha_l > 0 && opt.alpha_l < 1)) throw DomainError("sloshing fill level must lie in (0,1)");
  CaseDefinition c;
  c.name = "sloshing";
  ModelD& md = c.model;
  md.pipe = par.pipe;
  md.fluid = par.fluid;
  md.g = par.g;
  md.geometry = opt.geometry;
  md.grid = Grid<double>::uniform(opt.N > 0 ? opt.N : 80, par.pipe.L, Topology::bounded);
  md.left = md.right = BoundarySpec<double>::wall();
  md.validate();
  StateD st = StateD::zeros(md.grid);
  const double A = md.pipe.A();
  st.m_l.setConstant(md.fluid.rho_l * opt.alpha_l * A);
  st.m_g.setConstant(md.fluid.rho_g * (1 - opt.alpha_l) * A);
  set_end_masses(st);
  c.initial = consistent_init(md, st, opt.cg);
  c.t_end = 50;
  c.dt = 0.02;
  c.integrator = "rk4";
  return c;
}

// ---------------------------------------------------------------------------

double steady_holdup(const FluidProps<double>& fl, const PipeGeometry<double>& pipe, double g, double I_g,
                     double I_l, FrictionModel friction, const GeometryOptions& geo) {
  const double A = pipe.A();
  auto phi = [&](double alpha) {
    const double A_l = alpha * A, A_g = A - A_l;
    const SourceTerms<double> s =
        uniform_sources(fl, pipe, g, alpha, I_g / (fl.rho_g * A_g), I_l / (fl.rho_l * A_l), {}, friction, geo);
    return s.S_l / A_l - s.S_g / A_g;
  };
  const int n = 400;
  double lo = 0, hi = 0;
  bool found = false;
  double a0 = 1e-3, f0 = phi(a0);
  for (int i = 1; i <= n && !found; ++i) {
    const double a1 = 1e-3 + (1 - 2e-3) * i / n;
    const double f1 = phi(a1);
    if ((f0 < 0) != (f1 < 0)) {
      lo = a0, hi = a1, found = true;
    }
    a0 = a1, f0 = f1;
  }
  if (!found) throw DomainError("no steady hold-up in (0,1) for the given flow rates");
  double flo = phi(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = (lo + hi) / 2, fm = phi(mid);
    if ((fm < 0) == (flo < 0))
      lo = mid, flo = fm;
    else
      hi = mid;
  }
  return (lo + hi) / 2;
}

Signal<double> ifp_gas_signal(const IFPParameters& par) {
  const double I0 = par.I_g_start, dI = par.I_g_end - par.I_g_start;
  Signal<double> s;
  s.value = [=](double t) {
    if (t <= 0) return I0;
    return I0 + dI * std::exp(-10 / t) * (0.5 + std::pow(std::sin(t / 5), 2));
  };
  s.rate = [=](double t) {
    if (t <= 0) return 0.0;
    const double e = std::exp(-10 / t), e1 = e * 10 / (t * t);
    const double h = 0.5 + std::pow(std::sin(t / 5), 2), h1 = std::sin(2 * t / 5) / 5;
    return dI * (e1 * h + e * h1);
  };
  s.accel = [=](double t) {
    if (t <= 0) return 0.0;
    const double e = std::exp(-10 / t), e1 = e * 10 / (t * t), e2 = e * (100 / std::pow(t, 4) - 20 / std::pow(t, 3));
    const double h = 0.5 + std::pow(std::sin(t / 5), 2), h1 = std::sin(2 * t / 5) / 5,
                 h2 = 2 * std::cos(2 * t / 5) / 25;
    return dI * (e2 * h + 2 * e1 * h1 + e * h2);
  };
  return s;
}

CaseDefinition ifp_case(const CaseOptions& opt, const IFPParameters& par) {
  CaseDefinition c;
  c.name = "ifp";
  ModelD& md = c.model;
  md.pipe = par.pipe;
  md.fluid = par.fluid;
  md.g = par.g;
  md.geometry = opt.geometry;
  md.grid = Grid<double>::uniform(opt.N > 0 ? opt.N : 40, par.pipe.L, Topology::bounded);
  md.left = BoundarySpec<double>::inflow(ifp_gas_signal(par), Signal<double>::constant(par.I_l), opt.strong_bc);
  md.right = BoundarySpec<double>::outflow(Signal<double>::constant(par.p_out));
  md.validate();
  const double alpha =
      steady_holdup(md.fluid, md.pipe, md.g, par.I_g_start, par.I_l, FrictionModel::all_regime, opt.geometry);
  const double A = md.pipe.A();
  StateD st = StateD::zeros(md.grid);
  st.m_l.setConstant(md.fluid.rho_l * alpha * A);
  st.m_g.setConstant(md.fluid.rho_g * (1 - alpha) * A);
  set_end_masses(st);
  st.I_g.setConstant(par.I_g_start);
  st.I_l.setConstant(par.I_l);
  c.initial = consistent_init(md, st, opt.cg);
  c.t_end = 100;
  c.dt = 1.25;
  c.integrator = "rk3-proposed";
  return c;
}

// ---------------------------------------------------------------------------

MMSFields MMSFields::make(const GeometryOptions& geo) {
  MMSFields m;
  m.geometry = geo;
  const double A = m.pipe.A();
  const double alpha = steady_holdup(m.fluid, m.pipe, m.g, m.I_g0, m.I_l0, FrictionModel::laminar, geo);
  const double A_l = alpha * A, A_g = A - A_l;
  m.A_g_hat = A_g;
  m.u_g_hat = m.I_g0 / (m.fluid.rho_g * A_g);
  m.u_l_hat = m.I_l0 / (m.fluid.rho_l * A_l);
  const SourceTerms<double> s =
      uniform_sources(m.fluid, m.pipe, m.g, alpha, m.u_g_hat, m.u_l_hat, {}, FrictionModel::laminar, geo);
  m.c1 = s.S_g / A_g;
  m.c2 = m.p_out - m.c1 * m.pipe.L;
  return m;
}

double MMSFields::f(double t) const { return (std::sin(a * t) + 5) * std::exp(b * t) / 60; }

double MMSFields::fdot(double t) const {
  return (a * std::cos(a * t) + b * (std::sin(a * t) + 5)) * std::exp(b * t) / 60;
}

double MMSFields::fddot(double t) const {
  const double s = std::sin(a * t), c = std::cos(a * t);
  return (-a * a * s + 2 * a * b * c + b * b * (s + 5)) * std::exp(b * t) / 60;
}

double MMSFields::fdddot(double t) const {
  const double s = std::sin(a * t), c = std::cos(a * t);
  return (-a * a * a * c - 3 * a * a * b * s + 3 * a * b * b * c + b * b * b * (s + 5)) * std::exp(b * t) / 60;
}

double MMSFields::I_g(double s, double t) const {
  return fluid.rho_g * A_g_hat * (u_g_hat * f(t) - fdot(t) * s);
}

double MMSFields::I_l(double s, double t) const {
  return fluid.rho_l * (A_l(t) * u_l_hat + A_g_hat * fdot(t) * s);
}

double MMSFields::force_g(double s, double t) const {
  const double rg = fluid.rho_g;
  const double dIdt = rg * A_g_hat * (u_g_hat * fdot(t) - fddot(t) * s);
  const double dflux = -2 * rg * A_g_hat * fdot(t) * u_g(s, t);
  const SourceTerms<double> S = uniform_sources(fluid, pipe, g, A_l(t) / pipe.A(), u_g(s, t), u_l(s, t), {},
                                                FrictionModel::laminar, geometry);
  return dIdt + dflux + A_g(t) * c1 - S.S_g;
}

double MMSFields::force_l(double s, double t) const {
  const double rl = fluid.rho_l;
  const double dIdt = rl * A_g_hat * (-fdot(t) * u_l_hat + fddot(t) * s);
  const double dflux = 2 * rl * A_g_hat * fdot(t) * u_l(s, t);
  const SourceTerms<double> S = uniform_sources(fluid, pipe, g, A_l(t) / pipe.A(), u_g(s, t), u_l(s, t), {},
                                                FrictionModel::laminar, geometry);
  return dIdt + dflux + A_l(t) * c1 - S.S_l;
}

double MMSFields::outflow_defect_g(double t) const {
  const double dI = fluid.rho_g * A_g_hat * fdot(t);
  return dI * dI / m_g(t);
}

double MMSFields::outflow_defect_l(double t) const {
  const double dI = fluid.rho_l * A_g_hat * fdot(t);
  return dI * dI / m_l(t);
}

StateD MMSFields::sample(const Grid<double>& grid, double t) const {
  StateD st = StateD::zeros(grid);
  st.t = t;
  st.m_g.setConstant(m_g(t));
  st.m_l.setConstant(m_l(t));
  st.mb_g.setConstant(m_g(t));
  st.mb_l.setConstant(m_l(t));
  for (int f = 0; f < grid.faces(); ++f) {
    st.I_g(f) = I_g(grid.x_face(f), t);
    st.I_l(f) = I_l(grid.x_face(f), t);
  }
  for (int i = 0; i < grid.N(); ++i) st.p(i) = p(grid.x_center(i));
  return st;
}

CaseDefinition mms_case(const CaseOptions& opt) {
  const MMSFields mf = MMSFields::make(opt.geometry);
  CaseDefinition c;
  c.name = "mms";
  ModelD& md = c.model;
  md.pipe = mf.pipe;
  md.fluid = mf.fluid;
  md.g = mf.g;
  md.friction = FrictionModel::laminar;
  md.geometry = opt.geometry;
  md.grid = Grid<double>::uniform(opt.N > 0 ? opt.N : 40, mf.pipe.L, Topology::bounded);
  Signal<double> sg, sl;
  const double kg = mf.fluid.rho_g * mf.A_g_hat * mf.u_g_hat;
  const double kl = mf.fluid.rho_l * mf.A_g_hat * mf.u_l_hat;
  const double A = mf.pipe.A();
  const double rl = mf.fluid.rho_l, ul = mf.u_l_hat;
  sg.value = [mf, kg](double t) { return kg * mf.f(t); };
  sg.rate = [mf, kg](double t) { return kg * mf.fdot(t); };
  sg.accel = [mf, kg](double t) { return kg * mf.fddot(t); };
  sl.value = [mf, kl, rl, ul, A](double t) { return rl * A * ul - kl * mf.f(t); };
  sl.rate = [mf, kl](double t) { return -kl * mf.fdot(t); };
  sl.accel = [mf, kl](double t) { return -kl * mf.fddot(t); };
  md.left = BoundarySpec<double>::inflow(sg, sl, opt.strong_bc);
  md.right = BoundarySpec<double>::outflow(Signal<double>::constant(mf.p_out));
  md.body.gas = [mf](double s, double t) { return mf.force_g(s, t); };
  md.body.liquid = [mf](double s, double t) { return mf.force_l(s, t); };
  // The outflow half volume differences the quadratic momentum flux over h = ds/2,
  // which is off by h q''/2. Cancelling that keeps the sampled fields an exact
  // solution of the semi-discrete system.
  const double h = md.grid.ds_face(md.grid.N());
  md.right.F_g.value = [mf, h](double t) { return -h * mf.outflow_defect_g(t); };
  md.right.F_l.value = [mf, h](double t) { return -h * mf.outflow_defect_l(t); };
  md.validate();
  c.initial = consistent_init(md, mf.sample(md.grid, 0.0), opt.cg);
  const Grid<double> grid = md.grid;
  c.exact = [mf, grid](double t) { return mf.sample(grid, t); };
  // pressure errors relative to the pressure drop along the pipe, not the outlet level
  c.error_scale = {1, std::abs(mf.u_g_hat), std::abs(mf.u_l_hat), std::abs(mf.c1) * mf.pipe.L};
  c.t_end = 20;
  c.dt = 0.05;
  c.integrator = "rk3-proposed";
  return c;
}

CaseDefinition make_case(const std::string& name, const CaseOptions& opt) {
  if (name == "kh") return kh_case(opt);
  if (name == "sloshing") return sloshing_case(opt);
  if (name == "ifp") return ifp_case(opt);
  if (name == "mms") return mms_case(opt);
  throw DomainError("unknown case: " + name);
}

// ---------------------------------------------------------------------------

Snapshot snapshot(const ModelD& md, const StateD& s) {
  Snapshot out;
  out.alpha_l = s.m_l / (md.fluid.rho_l * md.pipe.A());
  const FaceFields<double> ff = face_fields(md, s);
  out.u_g = ff.u_g;
  out.u_l = ff.u_l;
  out.p = s.p;
  return out;
}

double error_norm(const Vec<double>& numeric, const Vec<double>& reference, double scale) {
  if (numeric.size() != reference.size()) throw DomainError("error_norm: shape mismatch");
  if (!(scale > 0)) throw DomainError("error_norm: scale must be positive");
  return numeric.size() ? (numeric - reference).cwiseAbs().maxCoeff() / scale : 0.0;
}

}  // namespace twofluid
