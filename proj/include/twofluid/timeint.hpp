#pragma once

#include <algorithm>
#include <vector>

#include "twofluid/boundary_rhs.hpp"
#include "twofluid/linsolve.hpp"
#include "twofluid/tableau.hpp"

namespace twofluid {

struct StepConfig {
  CGConfig cg{};
  bool drift_correction = true;
  bool record_stages = false;
};

template <typename Scalar>
struct StepInfo {
  int cg_iterations = 0;      // summed over the step
  int max_cg_iterations = 0;  // largest single solve
  Scalar outflux_g{}, outflux_l{};  // dt * sum_j b_j (I_left - I_right)
  std::vector<Scalar> stage_c0;  // |Q m_k - A| for stages k >= 1 and the new step
  // |M I_k + eta_k| after each projection and |M I*_k + eta_k| of the predictor; for a
  // singular Laplacian without the weighted mean, which no projection can remove
  std::vector<Scalar> stage_c1;
  std::vector<Scalar> stage_rhs;
  std::vector<Vec<Scalar>> stage_eta;
};

template <typename Scalar>
Scalar inf_norm(const Vec<Scalar>& v) {
  return v.size() ? v.cwiseAbs().maxCoeff() : Scalar(0);
}

// M v for a face vector pair
template <typename Scalar>
Vec<Scalar> apply_M(const Model<Scalar>& md, const Vec<Scalar>& v_g, const Vec<Scalar>& v_l) {
  return divergence_residual(md, v_g, v_l);
}

// Drift term for the projection producing stage k (1 <= k < s): makes the mass
// update of stage k+1 satisfy the volume constraint exactly.
template <typename Scalar>
Vec<Scalar> drift_terms(const Tableau& tab, int k, const std::vector<Vec<Scalar>>& res, const Vec<Scalar>& c0_n,
                        Scalar dt) {
  Vec<Scalar> eta = -c0_n / dt;
  for (int j = 0; j < k; ++j) eta += Scalar(tab.row(k + 1, j)) * res[j];
  return eta / Scalar(tab.row(k + 1, k));
}

// Drift term for the final projection, aimed at the first stage of the next step.
template <typename Scalar>
Vec<Scalar> drift_terms_final(const Tableau& tab, const Vec<Scalar>& c0_next, Scalar dt) {
  return -c0_next / (dt * Scalar(tab.row(1, 0)));
}

template <typename Scalar>
void face_mass_pair(const Model<Scalar>& md, const State<Scalar>& s, Vec<Scalar>& mg, Vec<Scalar>& ml) {
  face_masses(md.grid, s.m_g, s.mb_g, mg);
  face_masses(md.grid, s.m_l, s.mb_l, ml);
}

// p solving L p = M F_I at the given state.
template <typename Scalar>
Vec<Scalar> pressure_postprocess(const Model<Scalar>& md, const State<Scalar>& s, const CGConfig& cg = {},
                                 int* iterations = nullptr) {
  const Rates<Scalar> R = evaluate_rates(md, s);
  const PressureOperator<Scalar> L = assemble_laplacian(md, s);
  const CGResult<Scalar> sol = solve(L, apply_M(md, R.FI_g, R.FI_l), cg);
  if (iterations) *iterations = sol.iterations;
  return sol.x;
}

// Enforces the volume constraint by rescaling, zero momentum at closed ends and the
// volumetric-flow constraint by projection, then solves the pressure equation.
template <typename Scalar>
State<Scalar> consistent_init(const Model<Scalar>& md, const State<Scalar>& raw, const CGConfig& cg = {}) {
  md.validate();
  State<Scalar> s = raw;
  if ((s.m_g.array() <= 0).any() || (s.m_l.array() <= 0).any()) throw DomainError("initial masses must be positive");
  const Scalar A = md.pipe.A();
  const Vec<Scalar> q = (s.m_g / md.fluid.rho_g + s.m_l / md.fluid.rho_l).cwiseInverse() * A;
  s.m_g = s.m_g.cwiseProduct(q);
  s.m_l = s.m_l.cwiseProduct(q);
  if (!md.grid.periodic()) {
    for (int k = 0; k < 2; ++k) {
      const Scalar f = A / (s.mb_g(k) / md.fluid.rho_g + s.mb_l(k) / md.fluid.rho_l);
      s.mb_g(k) *= f;
      s.mb_l(k) *= f;
    }
  }
  apply_strong_inflow(md, s.I_g, s.I_l, s.t);
  apply_walls(md, s.I_g, s.I_l);
  Vec<Scalar> mg, ml;
  face_mass_pair(md, s, mg, ml);
  const PressureOperator<Scalar> L = assemble_laplacian(md, mg, ml);
  const Vec<Scalar> phi = solve(L, apply_M(md, s.I_g, s.I_l), cg).x;
  Vec<Scalar> Hg, Hl;
  pressure_gradient(md, mg, ml, phi, Hg, Hl);
  s.I_g -= Hg;
  s.I_l -= Hl;
  s.p = pressure_postprocess(md, s, cg);
  return s;
}

template <typename Scalar>
Vec<Scalar> range_part(const PressureOperator<Scalar>& L, const Vec<Scalar>& v) {
  if (!L.singular) return v;
  return v.array() - L.w.dot(v) / L.w.sum();
}

// One step of the half-explicit Runge-Kutta method. The returned pressure is the
// first-order stage pressure; pressure_postprocess gives the accurate one.
template <typename Scalar>
State<Scalar> step(const Model<Scalar>& md, const Tableau& tab, const State<Scalar>& sn, Scalar dt,
                   const StepConfig& cfg = {}, StepInfo<Scalar>* info = nullptr) {
  if (!(dt > 0)) throw DomainError("time step must be positive");
  const int S = tab.stages();
  const int nb = md.grid.N();
  const bool bounded = !md.grid.periodic();
  StepInfo<Scalar> local;
  StepInfo<Scalar>& inf = info ? *info : local;
  inf = StepInfo<Scalar>{};

  const Vec<Scalar> c0_n = volume_residual(md, sn.m_g, sn.m_l);
  std::vector<State<Scalar>> X(S);
  std::vector<Rates<Scalar>> R(S);
  std::vector<Vec<Scalar>> Hp_g(S), Hp_l(S), res(S);
  X[0] = sn;
  R[0] = evaluate_rates(md, X[0]);
  res[0] = apply_M(md, sn.I_g, sn.I_l);

  State<Scalar> out;
  for (int k = 1; k <= S; ++k) {
    const bool last = k == S;
    State<Scalar> x = sn;
    x.t = sn.t + (last ? Scalar(1) : Scalar(tab.c(k))) * dt;
    for (int j = 0; j < k; ++j) {
      const Scalar w = dt * Scalar(tab.row(k, j));
      if (w == 0) continue;
      x.m_g += w * R[j].Fm_g;
      x.m_l += w * R[j].Fm_l;
      x.mb_g += w * R[j].Fmb_g;
      x.mb_l += w * R[j].Fmb_l;
      x.I_g += w * R[j].FI_g;
      x.I_l += w * R[j].FI_l;
      if (j < k - 1) {
        x.I_g -= w * Hp_g[j];
        x.I_l -= w * Hp_l[j];
      }
    }
    apply_strong_inflow(md, x.I_g, x.I_l, x.t);
    if (cfg.record_stages) inf.stage_c0.push_back(inf_norm(volume_residual(md, x.m_g, x.m_l)));

    Vec<Scalar> eta = Vec<Scalar>::Zero(nb);
    if (cfg.drift_correction) {
      eta = last ? drift_terms_final(tab, volume_residual(md, x.m_g, x.m_l), dt)
                 : drift_terms(tab, k, res, c0_n, dt);
    }
    Vec<Scalar> mg, ml;
    face_mass_pair(md, X[k - 1], mg, ml);
    const PressureOperator<Scalar> L = assemble_laplacian(md, mg, ml);
    const Vec<Scalar> rhs = apply_M(md, x.I_g, x.I_l) + eta;
    if (cfg.record_stages) inf.stage_rhs.push_back(inf_norm(range_part(L, rhs)));
    const CGResult<Scalar> sol = solve(L, rhs, cfg.cg);
    inf.cg_iterations += sol.iterations;
    inf.max_cg_iterations = std::max(inf.max_cg_iterations, sol.iterations);
    const Scalar scale = Scalar(tab.row(k, k - 1)) * dt;
    Vec<Scalar> Hg, Hl;
    pressure_gradient(md, mg, ml, sol.x, Hg, Hl);
    x.I_g -= Hg;
    x.I_l -= Hl;
    x.p = sol.x / scale;
    if (cfg.record_stages) {
      inf.stage_c1.push_back(inf_norm(range_part(L, Vec<Scalar>(apply_M(md, x.I_g, x.I_l) + eta))));
      inf.stage_eta.push_back(eta);
    }
    if (last) {
      out = std::move(x);
      break;
    }
    Hp_g[k - 1] = Hg / scale;
    Hp_l[k - 1] = Hl / scale;
    X[k] = std::move(x);
    R[k] = evaluate_rates(md, X[k]);
    res[k] = apply_M(md, X[k].I_g, X[k].I_l);
  }
  if (bounded) {
    for (int j = 0; j < S; ++j) {
      const Scalar w = dt * Scalar(tab.b(j));
      inf.outflux_g += w * (X[j].I_g(0) - X[j].I_g(nb));
      inf.outflux_l += w * (X[j].I_l(0) - X[j].I_l(nb));
    }
  }
  return out;
}

// Largest stable step estimate from the convective wave speeds.
template <typename Scalar>
Scalar cfl_timestep(const Model<Scalar>& md, const State<Scalar>& s, Scalar courant) {
  using std::abs, std::max;
  const FaceFields<Scalar> ff = face_fields(md, s);
  const auto& g = md.grid;
  const int n = g.N();
  Scalar lmax = 0;
  for (int i = 0; i < n; ++i) {
    const int fr = g.periodic() ? (i + 1) % n : i + 1;
    const Scalar Al = s.m_l(i) / md.fluid.rho_l;
    const CrossSection<Scalar> cs = cross_section(Al / md.pipe.A(), md.pipe, md.geometry);
    const PrimitivePoint<Scalar> w{Al, (ff.u_l(i) + ff.u_l(fr)) / 2, (ff.u_g(i) + ff.u_g(fr)) / 2, Scalar(0)};
    const EigenData<Scalar> e = eigenvalues(w, cs, md.fluid, md.pipe, md.g_n());
    if (!e.well_posed) throw DomainError("ill-posed state: complex characteristic speeds");
    lmax = max({lmax, abs(e.lambda1), abs(e.lambda2)});
  }
  if (!(lmax > 0)) throw DomainError("zero wave speed, CFL step undefined");
  return courant * g.ds.minCoeff() / lmax;
}

template <typename Scalar>
Scalar cfl_timestep(Scalar lambda_max, Scalar ds_min, Scalar courant) {
  if (!(lambda_max > 0)) throw DomainError("zero wave speed, CFL step undefined");
  return courant * ds_min / lambda_max;
}

// Constraint residuals and phase-mass balance.
template <typename Scalar>
struct Monitor {
  Scalar M0_g{}, M0_l{};
  Scalar influx_g{}, influx_l{};  // integrated net boundary inflow

  static Scalar total(const Grid<Scalar>& g, const Vec<Scalar>& m) { return m.dot(g.ds); }

  void start(const Model<Scalar>& md, const State<Scalar>& s) {
    M0_g = total(md.grid, s.m_g);
    M0_l = total(md.grid, s.m_l);
    influx_g = influx_l = 0;
  }
  void accumulate(const StepInfo<Scalar>& info) {
    influx_g += info.outflux_g;
    influx_l += info.outflux_l;
  }
  Scalar c0(const Model<Scalar>& md, const State<Scalar>& s) const {
    return inf_norm(volume_residual(md, s.m_g, s.m_l));
  }
  Scalar c1(const Model<Scalar>& md, const State<Scalar>& s) const {
    return inf_norm(apply_M(md, s.I_g, s.I_l));
  }
  Scalar mass_error_g(const Model<Scalar>& md, const State<Scalar>& s) const {
    using std::abs;
    return abs(total(md.grid, s.m_g) - M0_g - influx_g) / M0_g;
  }
  Scalar mass_error_l(const Model<Scalar>& md, const State<Scalar>& s) const {
    using std::abs;
    return abs(total(md.grid, s.m_l) - M0_l - influx_l) / M0_l;
  }
};

}  // namespace twofluid
