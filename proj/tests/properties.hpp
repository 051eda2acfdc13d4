#pragma once

// Randomized property sweeps shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "twofluid/cases.hpp"

namespace twofluid::props {

struct SweepResult {
  int samples = 0;
  int failures = 0;
  double worst = 0;  // largest normalized violation
  std::string first_failure;

  bool ok() const { return samples > 0 && failures == 0; }
  void record(bool pass, double measure, const std::string& what) {
    ++samples;
    worst = std::max(worst, measure);
    if (!pass) {
      if (failures == 0) first_failure = what;
      ++failures;
    }
  }
  std::string summary() const {
    std::ostringstream os;
    os << samples << " samples, " << failures << " failures, worst " << worst;
    if (failures) os << " (" << first_failure << ")";
    return os.str();
  }
};

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

enum class EndKind { periodic, wall, outflow };

// Random non-uniform grid and a model with the requested end treatment.
inline ModelD random_model(Rng& rng, EndKind kind, int n_min = 3, int n_max = 24) {
  const int n = uniform_int(rng, n_min, n_max);
  Vec<double> w(n);
  for (int i = 0; i < n; ++i) w(i) = uniform(rng, 0.3, 2.0) / n;
  ModelD md;
  md.pipe = {uniform(rng, 0.02, 0.2), w.sum(), 0.0, 1e-8};
  md.fluid = {uniform(rng, 0.5, 50), uniform(rng, 500, 1500), 1.8e-5, 1e-3};
  md.grid = Grid<double>::from_widths(w, kind == EndKind::periodic ? Topology::periodic : Topology::bounded);
  if (kind == EndKind::wall) {
    md.left = md.right = BoundarySpec<double>::wall();
  } else if (kind == EndKind::outflow) {
    md.left = BoundarySpec<double>::wall();
    md.right = BoundarySpec<double>::outflow(Signal<double>::constant(1e5));
  }
  return md;
}

inline EndKind random_kind(Rng& rng) { return EndKind(uniform_int(rng, 0, 2)); }

inline Vec<double> random_vec(Rng& rng, int n, double lo = -1, double hi = 1) {
  Vec<double> v(n);
  for (int i = 0; i < n; ++i) v(i) = uniform(rng, lo, hi);
  return v;
}

// Face masses of a random volume-consistent hold-up distribution.
inline void random_face_masses(Rng& rng, const ModelD& md, Vec<double>& mg, Vec<double>& ml) {
  const int nf = md.grid.faces();
  mg.resize(nf);
  ml.resize(nf);
  for (int f = 0; f < nf; ++f) {
    const double a = uniform(rng, 0.05, 0.95);
    ml(f) = md.fluid.rho_l * a * md.pipe.A();
    mg(f) = md.fluid.rho_g * (1 - a) * md.pipe.A();
  }
}

// Summation by parts: (p, D I)_W + (G p, I)_face = 0 whenever the momentum at
// faces without a pressure coupling vanishes. Periodic D and G have zero row sums
// and M maps any constant total volumetric flux to zero.
inline SweepResult duality(int samples, std::uint64_t seed = 1) {
  Rng rng(seed);
  SweepResult res;
  for (int k = 0; k < samples; ++k) {
    const EndKind kind = random_kind(rng);
    const ModelD md = random_model(rng, kind);
    const auto& g = md.grid;
    Vec<double> I = random_vec(rng, g.faces());
    const Vec<double> p = random_vec(rng, g.N());
    for (int f = 0; f < g.faces(); ++f)
      if (!face_coupled(md, f)) I(f) = 0;
    const Vec<double> DI = -mass_rhs(g, I);
    const Vec<double> Gp = pressure_difference(md, p);
    const double lhs = p.dot(g.ds.cwiseProduct(DI));
    const double rhs = -Gp.dot(g.ds_face.cwiseProduct(I));
    const double scale = p.cwiseAbs().sum() * I.cwiseAbs().sum() + 1e-300;
    double v = std::abs(lhs - rhs) / scale;

    if (kind == EndKind::periodic) {
      const Mat<double> D = dense_D(g), G = dense_G(md);
      v = std::max({v, D.rowwise().sum().cwiseAbs().maxCoeff() * g.ds.minCoeff(),
                    G.rowwise().sum().cwiseAbs().maxCoeff() * g.ds_face.minCoeff()});
    }
    // constant total volumetric flux split randomly between the phases
    const double q = uniform(rng, -2, 2);
    const Vec<double> share = random_vec(rng, g.faces(), 0, 1);
    const Vec<double> Ig = md.fluid.rho_g * q * share;
    const Vec<double> Il = md.fluid.rho_l * q * (Vec<double>::Ones(g.faces()) - share);
    const double mres = apply_M(md, Ig, Il).cwiseAbs().maxCoeff() * g.ds.minCoeff() / (std::abs(q) + 1e-300);
    v = std::max(v, mres);
    res.record(v < 1e-13, v, "duality at N=" + std::to_string(g.N()));
  }
  return res;
}

// W L symmetric and negative semi-definite; constants span the nullspace unless an
// outlet pressure is imposed; L p equals M applied to H p.
inline SweepResult laplacian(int samples, std::uint64_t seed = 2) {
  Rng rng(seed);
  SweepResult res;
  for (int k = 0; k < samples; ++k) {
    const EndKind kind = random_kind(rng);
    const ModelD md = random_model(rng, kind);
    const auto& g = md.grid;
    Vec<double> mg, ml;
    random_face_masses(rng, md, mg, ml);
    const PressureOperator<double> L = assemble_laplacian(md, mg, ml);
    const Mat<double> Ld = L.dense();
    const Mat<double> WL = g.ds.asDiagonal() * Ld;
    const double nrm = WL.cwiseAbs().maxCoeff();
    double v = (WL - WL.transpose()).cwiseAbs().maxCoeff() / nrm;
    Eigen::SelfAdjointEigenSolver<Mat<double>> es((WL + WL.transpose()) / 2);
    const Vec<double> ev = es.eigenvalues();  // ascending
    v = std::max(v, ev.maxCoeff() / nrm);     // must not be positive beyond rounding
    const Vec<double> ones = Vec<double>::Ones(g.N());
    const double null_res = (Ld * ones).cwiseAbs().maxCoeff() * g.ds.minCoeff() / nrm;
    bool structure = true;
    if (kind == EndKind::outflow) {
      structure = !L.singular && ev.maxCoeff() < -1e-12 * nrm;
    } else {
      structure = L.singular && null_res < 1e-13 && (g.N() < 2 || ev(g.N() - 2) < -1e-12 * nrm);
    }
    const Vec<double> p = random_vec(rng, g.N());
    Vec<double> Hg, Hl;
    pressure_gradient(md, mg, ml, p, Hg, Hl);
    const Vec<double> MHp = apply_M(md, Hg, Hl);
    const double cons = (L.apply(p) - MHp).cwiseAbs().maxCoeff() / (MHp.cwiseAbs().maxCoeff() + 1e-300);
    v = std::max(v, cons);
    res.record(structure && v < 1e-12, v, "Laplacian structure at N=" + std::to_string(g.N()));
  }
  return res;
}

// Pressure enters only through differences: a constant shift leaves H p unchanged
// when no outlet pressure is imposed, and a step never reads the incoming pressure.
inline SweepResult gauge(int samples, std::uint64_t seed = 3) {
  Rng rng(seed);
  SweepResult res;
  CaseOptions opt;
  opt.N = 12;
  const CaseDefinition kh = kh_case(opt);
  CaseOptions so;
  so.N = 12;
  const CaseDefinition sl = sloshing_case(so);
  for (int k = 0; k < samples; ++k) {
    const EndKind kind = k % 2 ? EndKind::periodic : EndKind::wall;
    const ModelD md = random_model(rng, kind);
    Vec<double> mg, ml;
    random_face_masses(rng, md, mg, ml);
    const Vec<double> p = random_vec(rng, md.grid.N(), -1e5, 1e5);
    const double c = uniform(rng, -1e6, 1e6);
    Vec<double> Hg, Hl, Hg2, Hl2;
    pressure_gradient(md, mg, ml, p, Hg, Hl);
    pressure_gradient(md, mg, ml, Vec<double>(p.array() + c), Hg2, Hl2);
    // differences of values near |c| lose about |c| eps
    double v = ((Hg - Hg2).cwiseAbs().maxCoeff() + (Hl - Hl2).cwiseAbs().maxCoeff()) /
               (Hg.cwiseAbs().maxCoeff() + Hl.cwiseAbs().maxCoeff() + 1e-300);

    const CaseDefinition& c0 = k % 2 ? kh : sl;
    StateD s = c0.initial;
    StateD s2 = s;
    s2.p = random_vec(rng, s.p.size(), -1e3, 1e3);
    const Tableau& tab = tableau(k % 3 == 0 ? "rk4" : (k % 3 == 1 ? "rk3-proposed" : "rk2"));
    const double dt = c0.dt * uniform(rng, 0.2, 1.0);
    const StateD a = step(c0.model, tab, s, dt), b = step(c0.model, tab, s2, dt);
    const double d = (a.I_g - b.I_g).cwiseAbs().maxCoeff() + (a.I_l - b.I_l).cwiseAbs().maxCoeff() +
                     (a.m_g - b.m_g).cwiseAbs().maxCoeff() + (a.m_l - b.m_l).cwiseAbs().maxCoeff();
    v = std::max(v, d);
    res.record(v < 1e-9 && d == 0, v, "gauge sample " + std::to_string(k));
  }
  return res;
}

// Every stage of a step satisfies the volumetric-flow constraint (with its drift
// term) to solver tolerance, and the volume constraint stays at rounding level.
inline SweepResult stage_cascade(int samples, std::uint64_t seed = 4) {
  Rng rng(seed);
  SweepResult res;
  CaseOptions ko;
  ko.N = 10;
  const CaseDefinition kh = kh_case(ko);
  CaseOptions so;
  so.N = 10;
  const CaseDefinition sl = sloshing_case(so);
  CaseOptions io;
  io.N = 10;
  const CaseDefinition ifp = ifp_case(io);
  const std::vector<std::string> names = tableau_names();
  StepConfig cfg;
  cfg.record_stages = true;
  for (int k = 0; k < samples; ++k) {
    const CaseDefinition& c = k % 3 == 0 ? kh : (k % 3 == 1 ? sl : ifp);
    StateD raw = c.initial;
    for (int i = 0; i < raw.m_l.size(); ++i) raw.m_l(i) *= 1 + uniform(rng, -0.02, 0.02);
    raw.I_g += random_vec(rng, raw.I_g.size(), -1e-3, 1e-3);
    raw.I_l += random_vec(rng, raw.I_l.size(), -1e-2, 1e-2);
    const StateD s = consistent_init(c.model, raw, cfg.cg);
    const Tableau& tab = tableau(names[std::size_t(uniform_int(rng, 0, int(names.size()) - 1))]);
    const double dt = c.dt * uniform(rng, 0.1, 0.5);
    StepInfo<double> info;
    step(c.model, tab, s, dt, cfg, &info);
    const double A = c.model.pipe.A();
    double c0 = 0, c1 = 0;
    for (double r : info.stage_c0) c0 = std::max(c0, r / A);
    // flux constraint residual relative to the predictor's violation it removed
    for (std::size_t i = 0; i < info.stage_c1.size(); ++i)
      c1 = std::max(c1, info.stage_c1[i] / std::max(info.stage_rhs[i], 1e-300));
    const bool pass = c0 < 1e-13 && c1 < 1e-10 && int(info.stage_c1.size()) == tab.stages();
    res.record(pass, std::max(c0, c1), c.name + " with " + tab.name);
  }
  return res;
}

// Closed-form eigenvalues agree with the roots of the characteristic polynomial,
// solve the quasi-linear pencil, and are ordered; ill-posedness matches complex roots.
inline SweepResult eigen_polynomial(int samples, std::uint64_t seed = 5) {
  Rng rng(seed);
  SweepResult res;
  for (int k = 0; k < samples; ++k) {
    const PipeGeometry<double> pipe{uniform(rng, 0.02, 0.3), 10.0, 0.0, 1e-8};
    const FluidProps<double> fl{uniform(rng, 0.5, 100), uniform(rng, 600, 1500), 1.8e-5, 1e-3};
    const double alpha = uniform(rng, 0.02, 0.98);
    GeometryOptions go;
    go.mode = k % 2 ? AngleMode::exact : AngleMode::approximate;
    const CrossSection<double> cs = cross_section(alpha, pipe, go);
    const PrimitivePoint<double> w{alpha * pipe.A(), uniform(rng, -3, 3), uniform(rng, -20, 20), 0.0};
    const double gn = 9.8;
    const EigenData<double> e = eigenvalues(w, cs, fl, pipe, gn);
    const PolynomialRoots<double> r = characteristic_polynomial_roots(w, cs, fl, pipe, gn);
    double v = 0;
    bool pass = e.well_posed == r.real;
    if (e.well_posed) {
      const double scale = std::max({std::abs(e.lambda1), std::abs(e.lambda2), 1e-12});
      v = std::max(std::abs(e.lambda1 - r.lambda1.real()), std::abs(e.lambda2 - r.lambda2.real())) / scale;
      // polynomial residual with a scale built from its largest term
      const double A_g = pipe.A() - w.A_l;
      auto poly = [&](double lam) {
        return fl.rho_l * A_g * (w.u_l - lam) * (w.u_l - lam) + fl.rho_g * w.A_l * (w.u_g - lam) * (w.u_g - lam) -
               (fl.rho_l - fl.rho_g) * A_g * w.A_l * gn * cs.dh_dAl;
      };
      auto pscale = [&](double lam) {
        return fl.rho_l * A_g * (w.u_l - lam) * (w.u_l - lam) + fl.rho_g * w.A_l * (w.u_g - lam) * (w.u_g - lam) +
               (fl.rho_l - fl.rho_g) * A_g * w.A_l * gn * cs.dh_dAl;
      };
      v = std::max({v, std::abs(poly(e.lambda1)) / pscale(e.lambda1), std::abs(poly(e.lambda2)) / pscale(e.lambda2)});
      // det(B - lambda A) vanishes at both eigenvalues
      const Mat4<double> Aq = quasilinear_A(fl), Bq = quasilinear_B(w, cs, fl, pipe, gn);
      for (double lam : {e.lambda1, e.lambda2}) {
        const Mat4<double> P = Bq - lam * Aq;
        const double sv = Eigen::JacobiSVD<Mat4<double>>(P).singularValues()(3);
        v = std::max(v, sv / P.cwiseAbs().maxCoeff());
      }
      pass = pass && e.lambda1 <= e.lambda2 && v < 1e-10;
    }
    res.record(pass, v, "eigenvalues at alpha=" + std::to_string(alpha));
  }
  return res;
}

}  // namespace twofluid::props
