#pragma once

#include "twofluid/model.hpp"

namespace twofluid {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

// Semi-discrete right-hand sides of all differential unknowns at one state.
// FI excludes the interior pressure gradient; at an outflow face it carries the
// outlet pressure contribution.
template <typename Scalar>
struct Rates {
  Vec<Scalar> Fm_g, Fm_l;
  Vec<Scalar> FI_g, FI_l;
  Vec2<Scalar> Fmb_g = Vec2<Scalar>::Zero();
  Vec2<Scalar> Fmb_l = Vec2<Scalar>::Zero();
};

template <typename Scalar>
struct EndPoint {
  Scalar alpha_l{};
  Scalar A_l{}, A_g{};
  Scalar u_g{}, u_l{};
  CrossSection<Scalar> cs;
};

template <typename Scalar>
EndPoint<Scalar> end_point(const Model<Scalar>& md, const State<Scalar>& s, const FaceFields<Scalar>& ff, Side side) {
  const int k = side == Side::left ? 0 : 1;
  const int f = md.end_face(side);
  EndPoint<Scalar> e;
  e.A_l = s.mb_l(k) / md.fluid.rho_l;
  e.A_g = s.mb_g(k) / md.fluid.rho_g;
  e.alpha_l = e.A_l / md.pipe.A();
  e.u_g = ff.u_g(f);
  e.u_l = ff.u_l(f);
  e.cs = cross_section(e.alpha_l, md.pipe, md.geometry);
  return e;
}

// Momentum right-hand side on the outflow half volume between the last centre
// and the outlet face.
template <typename Scalar>
std::pair<Scalar, Scalar> outflow_momentum(const Model<Scalar>& md, const State<Scalar>& s,
                                           const FaceFields<Scalar>& ff, const VolumeFields<Scalar>& vf) {
  const int n = md.grid.N();
  const Scalar h = md.grid.ds_face(n);
  const EndPoint<Scalar> e = end_point(md, s, ff, Side::right);
  const Scalar gn = md.g_n();
  const Scalar Kg = level_potential(Phase::gas, e.cs, md.pipe, md.fluid.rho_g, gn);
  const Scalar Kl = level_potential(Phase::liquid, e.cs, md.pipe, md.fluid.rho_l, gn);
  const Scalar flux_g = s.I_g(n) * s.I_g(n) / s.mb_g(1);
  const Scalar flux_l = s.I_l(n) * s.I_l(n) / s.mb_l(1);
  const SourceTerms<Scalar> S = face_sources(md, ff, n, s.t);
  const Scalar p_out = md.right.p_out(s.t);
  Scalar Fg = -(flux_g - vf.flux_g(n - 1)) / h + (Kg - vf.K_g(n - 1)) / h + S.S_g - e.A_g * p_out / h;
  Scalar Fl = -(flux_l - vf.flux_l(n - 1)) / h + (Kl - vf.K_l(n - 1)) / h + S.S_l - e.A_l * p_out / h;
  if (md.right.F_g) Fg += md.right.F_g(s.t);
  if (md.right.F_l) Fl += md.right.F_l(s.t);
  return {Fg, Fl};
}

// Sets the momentum at strong-inflow faces to the signal values at time t.
template <typename Scalar>
void apply_strong_inflow(const Model<Scalar>& md, Vec<Scalar>& I_g, Vec<Scalar>& I_l, Scalar t) {
  for (Side side : {Side::left, Side::right}) {
    const auto& b = md.end(side);
    if (b.kind != BoundaryKind::inflow_strong) continue;
    const int f = md.end_face(side);
    I_g(f) = b.I_g(t);
    I_l(f) = b.I_l(t);
  }
}

// Closed ends carry no momentum.
template <typename Scalar>
void apply_walls(const Model<Scalar>& md, Vec<Scalar>& I_g, Vec<Scalar>& I_l) {
  for (Side side : {Side::left, Side::right}) {
    if (md.end(side).kind != BoundaryKind::wall) continue;
    const int f = md.end_face(side);
    I_g(f) = I_l(f) = 0;
  }
}

// Momentum rates at inflow faces from the signal derivatives (integrated for weak
// imposition, used by the pressure equation for strong imposition).
template <typename Scalar>
void apply_weak_inflow(const Model<Scalar>& md, Vec<Scalar>& F_g, Vec<Scalar>& F_l, Scalar t) {
  for (Side side : {Side::left, Side::right}) {
    const auto& b = md.end(side);
    if (!b.inflow()) continue;
    const int f = md.end_face(side);
    F_g(f) = b.I_g.d1(t);
    F_l(f) = b.I_l.d1(t);
  }
}

template <typename Scalar>
struct EndDiagnostics {
  EigenData<Scalar> eig;
  BoundarySlopes<Scalar> V;
  Scalar J{};
  Scalar S_star{};
  Scalar dA_l{};
};

// Hold-up rate at a bounded end from the outgoing characteristic. FIg/FIl are the
// momentum rates at the end face.
template <typename Scalar>
EndDiagnostics<Scalar> end_holdup_rate(const Model<Scalar>& md, const State<Scalar>& s,
                                       const FaceFields<Scalar>& ff, Side side, Scalar FIg, Scalar FIl) {
  const auto& g = md.grid;
  const int n = g.N();
  const EndPoint<Scalar> e = end_point(md, s, ff, side);
  const Scalar rl = md.fluid.rho_l;
  // At closed and inflow ends the hold-up slope comes from the first three centres:
  // the end node would make its rate equation stiffer than the interior CFL limit.
  // At an outflow the end-face momentum already depends on the end hold-up through
  // the half-volume level gradient, and the slope has to include the end node too,
  // otherwise that dependence is left undamped.
  const int c0 = side == Side::left ? 0 : n - 1;
  const int f0 = md.end_face(side);
  const int dir = side == Side::left ? 1 : -1;
  Scalar xc[3], Al[3], xf[3], ul[3], ug[3];
  for (int j = 0; j < 3; ++j) {
    xc[j] = g.x_center(c0 + dir * j);
    Al[j] = s.m_l(c0 + dir * j) / rl;
    xf[j] = g.x_face(f0 + dir * j);
    ul[j] = ff.u_l(f0 + dir * j);
    ug[j] = ff.u_g(f0 + dir * j);
  }
  const Scalar x0 = g.x_face(f0);
  Eigen::Matrix<Scalar, 3, 1> dW;
  dW(0) = md.end(side).kind == BoundaryKind::outflow ? one_sided_derivative(x0, xc[0], xc[1], e.A_l, Al[0], Al[1])
                                                     : lagrange_derivative(x0, xc, Al);
  dW(1) = lagrange_derivative(x0, xf, ul);
  dW(2) = lagrange_derivative(x0, xf, ug);

  EndDiagnostics<Scalar> d;
  d.eig = eigenvalues(PrimitivePoint<Scalar>{e.A_l, e.u_l, e.u_g, Scalar(0)}, e.cs, md.fluid, md.pipe, md.g_n());
  d.V = boundary_slopes(dW, d.eig, md.fluid);
  const SourceTerms<Scalar> S = face_sources(md, ff, md.end_face(side), s.t);
  d.J = FIg / e.A_g - FIl / e.A_l;
  d.S_star = S.S_l / e.A_l - S.S_g / e.A_g;
  d.dA_l = holdup_rate(side, d.eig, side == Side::left ? d.V.V1 : d.V.V2, d.J, d.S_star);
  return d;
}

// Boundary volumetric-flux vector of the reduced formulation where inflow faces are
// eliminated: (M I)_interior + r = (M I)_full. Returns r and its first two time derivatives.
template <typename Scalar>
struct BoundaryData {
  Vec<Scalar> r, rdot, rddot;
};

template <typename Scalar>
BoundaryData<Scalar> assemble_r(const Model<Scalar>& md, Scalar t) {
  const int n = md.grid.N();
  BoundaryData<Scalar> bd;
  bd.r = bd.rdot = bd.rddot = Vec<Scalar>::Zero(n);
  if (md.grid.periodic()) return bd;
  const Scalar rg = md.fluid.rho_g, rl = md.fluid.rho_l;
  for (Side side : {Side::left, Side::right}) {
    const auto& b = md.end(side);
    if (!b.inflow()) continue;
    const int i = side == Side::left ? 0 : n - 1;
    const Scalar sgn = side == Side::left ? Scalar(-1) : Scalar(1);
    const Scalar w = sgn / md.grid.ds(i);
    bd.r(i) += w * (b.I_g(t) / rg + b.I_l(t) / rl);
    bd.rdot(i) += w * (b.I_g.d1(t) / rg + b.I_l.d1(t) / rl);
    bd.rddot(i) += w * (b.I_g.d2(t) / rg + b.I_l.d2(t) / rl);
  }
  return bd;
}

// Full stage right-hand side.
template <typename Scalar>
Rates<Scalar> evaluate_rates(const Model<Scalar>& md, const State<Scalar>& s) {
  const auto& g = md.grid;
  Rates<Scalar> R;
  const FaceFields<Scalar> ff = face_fields(md, s);
  const VolumeFields<Scalar> vf = volume_fields(md, s, ff);
  R.Fm_g = mass_rhs(g, s.I_g);
  R.Fm_l = mass_rhs(g, s.I_l);
  momentum_rhs(md, s, ff, vf, R.FI_g, R.FI_l);
  if (g.periodic()) return R;

  apply_weak_inflow(md, R.FI_g, R.FI_l, s.t);
  if (md.right.kind == BoundaryKind::outflow) {
    const auto [Fg, Fl] = outflow_momentum(md, s, ff, vf);
    R.FI_g(g.N()) = Fg;
    R.FI_l(g.N()) = Fl;
  }
  for (Side side : {Side::left, Side::right}) {
    const int f = md.end_face(side);
    const int k = side == Side::left ? 0 : 1;
    const EndDiagnostics<Scalar> d = end_holdup_rate(md, s, ff, side, R.FI_g(f), R.FI_l(f));
    R.Fmb_g(k) = -md.fluid.rho_g * d.dA_l;
    R.Fmb_l(k) = md.fluid.rho_l * d.dA_l;
  }
  return R;
}

}  // namespace twofluid
