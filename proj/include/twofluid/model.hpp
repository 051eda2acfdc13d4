#pragma once

#include <cmath>
#include <vector>

#include "twofluid/boundary.hpp"

namespace twofluid {

enum class Topology { periodic, bounded };

// Staggered grid. Volume i spans [x_face(i), x_face(i+1)]; face f sits on the left
// of volume f. Bounded grids carry N+1 faces with half-width end faces, periodic
// grids N faces with face 0 joining volume N-1 to volume 0.
template <typename Scalar>
struct Grid {
  Topology topology = Topology::bounded;
  Vec<Scalar> ds;       // volume widths
  Vec<Scalar> ds_face;  // momentum volume widths
  Vec<Scalar> x_center;
  Vec<Scalar> x_face;

  int N() const { return int(ds.size()); }
  int faces() const { return topology == Topology::periodic ? N() : N() + 1; }
  bool periodic() const { return topology == Topology::periodic; }
  Scalar length() const { return ds.sum(); }

  static Grid from_widths(const Vec<Scalar>& widths, Topology topo) {
    const int n = int(widths.size());
    if (n < 3) throw DomainError("grid needs at least 3 volumes");
    if ((widths.array() <= 0).any()) throw DomainError("grid widths must be positive");
    Grid g;
    g.topology = topo;
    g.ds = widths;
    const int nf = topo == Topology::periodic ? n : n + 1;
    g.ds_face.resize(nf);
    g.x_face.resize(nf);
    g.x_center.resize(n);
    Scalar x = 0;
    for (int i = 0; i < n; ++i) {
      g.x_center(i) = x + widths(i) / 2;
      if (i < nf) g.x_face(i) = x;
      x += widths(i);
    }
    if (topo == Topology::bounded) g.x_face(n) = x;
    for (int f = 0; f < nf; ++f) {
      if (topo == Topology::periodic) {
        g.ds_face(f) = (widths((f + n - 1) % n) + widths(f)) / 2;
      } else if (f == 0) {
        g.ds_face(f) = widths(0) / 2;
      } else if (f == n) {
        g.ds_face(f) = widths(n - 1) / 2;
      } else {
        g.ds_face(f) = (widths(f - 1) + widths(f)) / 2;
      }
    }
    return g;
  }

  static Grid uniform(int n, Scalar L, Topology topo) {
    return from_widths(Vec<Scalar>::Constant(n, L / n), topo);
  }

  // volumes left and right of face f (-1 when outside a bounded domain)
  int left_of(int f) const { return periodic() ? (f + N() - 1) % N() : f - 1; }
  int right_of(int f) const { return periodic() ? f : (f < N() ? f : -1); }
};

template <typename Scalar>
struct State {
  Vec<Scalar> m_g, m_l;  // mass per unit length on volumes
  Vec<Scalar> I_g, I_l;  // momentum per unit length on faces
  Eigen::Matrix<Scalar, 2, 1> mb_g = Eigen::Matrix<Scalar, 2, 1>::Zero();  // hold-up masses at the
  Eigen::Matrix<Scalar, 2, 1> mb_l = Eigen::Matrix<Scalar, 2, 1>::Zero();  // left/right end nodes
  Vec<Scalar> p;
  Scalar t = 0;

  static State zeros(const Grid<Scalar>& g) {
    State s;
    s.m_g = s.m_l = s.p = Vec<Scalar>::Zero(g.N());
    s.I_g = s.I_l = Vec<Scalar>::Zero(g.faces());
    return s;
  }
};

enum class Convection { central, upwind };

template <typename Scalar>
struct Model {
  PipeGeometry<Scalar> pipe;
  FluidProps<Scalar> fluid;
  Scalar g = Scalar(9.8);
  FrictionModel friction = FrictionModel::all_regime;
  GeometryOptions geometry{};
  Convection convection = Convection::central;
  Grid<Scalar> grid;
  BoundarySpec<Scalar> left;
  BoundarySpec<Scalar> right;
  BodyForce<Scalar> body;

  Scalar g_n() const { return g * std::cos(pipe.phi); }
  Scalar g_s() const { return g * std::sin(pipe.phi); }
  const BoundarySpec<Scalar>& end(Side s) const { return s == Side::left ? left : right; }
  int end_face(Side s) const { return s == Side::left ? 0 : grid.N(); }

  void validate() const {
    pipe.validate();
    fluid.validate();
    const bool pl = left.kind == BoundaryKind::periodic, pr = right.kind == BoundaryKind::periodic;
    if (pl != pr) throw DomainError("periodic boundaries must be set at both ends");
    if (pl != grid.periodic()) throw DomainError("grid topology does not match boundary kinds");
    if (left.kind == BoundaryKind::outflow) throw DomainError("outflow is supported at the right end only");
    for (const auto* b : {&left, &right}) {
      if (b->inflow() && !(b->I_g && b->I_l)) throw DomainError("inflow boundary needs mass flow signals");
      if (b->kind == BoundaryKind::outflow && !b->p_out) throw DomainError("outflow boundary needs a pressure");
    }
  }
};

// ---------------------------------------------------------------------------
// Face and centre kinematics

template <typename Scalar>
struct FaceFields {
  Vec<Scalar> m_g, m_l;  // R-averaged masses
  Vec<Scalar> u_g, u_l;
};

// Arithmetic average of the adjacent volume masses; boundary faces use the end
// hold-up masses.
template <typename Scalar>
void face_masses(const Grid<Scalar>& g, const Vec<Scalar>& m, const Eigen::Matrix<Scalar, 2, 1>& mb,
                 Vec<Scalar>& out) {
  const int nf = g.faces();
  const int n = g.N();
  out.resize(nf);
  for (int f = 0; f < nf; ++f) {
    const int a = g.left_of(f), b = g.right_of(f);
    if (a >= 0 && b >= 0)
      out(f) = (m(a) + m(b)) / 2;
    else
      out(f) = a < 0 ? mb(0) : mb(1);
  }
  (void)n;
}

template <typename Scalar>
FaceFields<Scalar> face_fields(const Model<Scalar>& md, const State<Scalar>& s) {
  FaceFields<Scalar> ff;
  face_masses(md.grid, s.m_g, s.mb_g, ff.m_g);
  face_masses(md.grid, s.m_l, s.mb_l, ff.m_l);
  ff.u_g = s.I_g.cwiseQuotient(ff.m_g);
  ff.u_l = s.I_l.cwiseQuotient(ff.m_l);
  return ff;
}

// ---------------------------------------------------------------------------
// Mass equation and constraints

// F_m = -D I: per volume -(I_{i+1/2} - I_{i-1/2}) / ds_i
template <typename Scalar>
Vec<Scalar> mass_rhs(const Grid<Scalar>& g, const Vec<Scalar>& I) {
  const int n = g.N();
  Vec<Scalar> F(n);
  for (int i = 0; i < n; ++i) {
    const int fr = g.periodic() ? (i + 1) % n : i + 1;
    F(i) = -(I(fr) - I(i)) / g.ds(i);
  }
  return F;
}

// M I + r on volumes, with boundary-face momentum included in I.
template <typename Scalar>
Vec<Scalar> divergence_residual(const Model<Scalar>& md, const Vec<Scalar>& I_g, const Vec<Scalar>& I_l,
                                const Vec<Scalar>* r = nullptr) {
  Vec<Scalar> res = -(mass_rhs(md.grid, I_g) / md.fluid.rho_g + mass_rhs(md.grid, I_l) / md.fluid.rho_l);
  if (r) res += *r;
  return res;
}

// Q m - A
template <typename Scalar>
Vec<Scalar> volume_residual(const Model<Scalar>& md, const Vec<Scalar>& m_g, const Vec<Scalar>& m_l) {
  return (m_g / md.fluid.rho_g + m_l / md.fluid.rho_l).array() - md.pipe.A();
}

// ---------------------------------------------------------------------------
// Pressure gradient and Laplacian

// Faces where the pressure acts on the momentum (interior faces and outflow).
template <typename Scalar>
bool face_coupled(const Model<Scalar>& md, int f) {
  if (md.grid.periodic()) return true;
  if (f == 0) return false;
  if (f == md.grid.N()) return md.right.kind == BoundaryKind::outflow;
  return true;
}

// Difference p_right - p_left over the momentum volume; outside pressure is 0
// at an outflow face (the outlet value enters the momentum right-hand side).
template <typename Scalar>
Vec<Scalar> pressure_difference(const Model<Scalar>& md, const Vec<Scalar>& p) {
  const auto& g = md.grid;
  Vec<Scalar> Gp = Vec<Scalar>::Zero(g.faces());
  for (int f = 0; f < g.faces(); ++f) {
    if (!face_coupled(md, f)) continue;
    const int a = g.left_of(f), b = g.right_of(f);
    const Scalar pr = b >= 0 ? p(b) : Scalar(0);
    Gp(f) = (pr - p(a)) / g.ds_face(f);
  }
  return Gp;
}

// H(m) p for both phases: A_beta,face * (p_{i+1} - p_i) / ds_face
template <typename Scalar>
void pressure_gradient(const Model<Scalar>& md, const Vec<Scalar>& mf_g, const Vec<Scalar>& mf_l,
                       const Vec<Scalar>& p, Vec<Scalar>& Hp_g, Vec<Scalar>& Hp_l) {
  const Vec<Scalar> Gp = pressure_difference(md, p);
  Hp_g = (mf_g / md.fluid.rho_g).cwiseProduct(Gp);
  Hp_l = (mf_l / md.fluid.rho_l).cwiseProduct(Gp);
}

// L(m) = M H(m) held in symmetric form: (W L p)_i = k_{i+1}(p_{i+1}-p_i) - k_i(p_i-p_{i-1}),
// W = diag(ds), k_f = (A_g/rho_g + A_l/rho_l)_f / ds_face_f (0 on uncoupled faces).
template <typename Scalar>
struct PressureOperator {
  Topology topology = Topology::bounded;
  Vec<Scalar> kappa;  // per face
  Vec<Scalar> w;      // volume widths
  bool singular = true;

  int size() const { return int(w.size()); }

  // volume i sits between faces i and i+1
  int right_face(int i) const { return topology == Topology::periodic ? (i + 1) % size() : i + 1; }

  Vec<Scalar> diagonal() const {
    const int n = size();
    Vec<Scalar> d(n);
    for (int i = 0; i < n; ++i) d(i) = -(kappa(i) + kappa(right_face(i)));
    return d;
  }

  // symmetric product W L p
  template <typename In, typename Out>
  void apply_scaled(const In& p, Out& out) const {
    const int n = size();
    for (int i = 0; i < n; ++i) {
      const int fl = i, fr = right_face(i);
      Scalar v = 0;
      if (topology == Topology::periodic) {
        v = kappa(fr) * (p((i + 1) % n) - p(i)) - kappa(fl) * (p(i) - p((i + n - 1) % n));
      } else {
        const Scalar pr = i + 1 < n ? p(i + 1) : Scalar(0);
        const Scalar pl = i > 0 ? p(i - 1) : Scalar(0);
        v = kappa(fr) * (pr - p(i)) - kappa(fl) * (p(i) - pl);
      }
      out(i) = v;
    }
  }

  Vec<Scalar> apply(const Vec<Scalar>& p) const {
    Vec<Scalar> out(size());
    apply_scaled(p, out);
    return out.cwiseQuotient(w);
  }

  Mat<Scalar> dense() const {
    const int n = size();
    Mat<Scalar> Lm = Mat<Scalar>::Zero(n, n);
    Vec<Scalar> e = Vec<Scalar>::Zero(n);
    for (int j = 0; j < n; ++j) {
      e(j) = 1;
      Lm.col(j) = apply(e);
      e(j) = 0;
    }
    return Lm;
  }
};

template <typename Scalar>
PressureOperator<Scalar> assemble_laplacian(const Model<Scalar>& md, const Vec<Scalar>& mf_g,
                                            const Vec<Scalar>& mf_l) {
  const auto& g = md.grid;
  PressureOperator<Scalar> L;
  L.topology = g.topology;
  L.w = g.ds;
  L.kappa = Vec<Scalar>::Zero(g.faces());
  for (int f = 0; f < g.faces(); ++f) {
    if (!face_coupled(md, f)) continue;
    const Scalar Ag = mf_g(f) / md.fluid.rho_g, Al = mf_l(f) / md.fluid.rho_l;
    if (!(Ag > 0 && Al > 0)) throw DomainError("non-positive averaged hold-up in Laplacian");
    L.kappa(f) = (Ag / md.fluid.rho_g + Al / md.fluid.rho_l) / g.ds_face(f);
  }
  L.singular = g.periodic() || md.right.kind != BoundaryKind::outflow;
  return L;
}

template <typename Scalar>
PressureOperator<Scalar> assemble_laplacian(const Model<Scalar>& md, const State<Scalar>& s) {
  Vec<Scalar> mg, ml;
  face_masses(md.grid, s.m_g, s.mb_g, mg);
  face_masses(md.grid, s.m_l, s.mb_l, ml);
  return assemble_laplacian(md, mg, ml);
}

// ---------------------------------------------------------------------------
// Interior momentum right-hand side (pressure-free part)

template <typename Scalar>
struct VolumeFields {
  Vec<Scalar> alpha_l;
  Vec<Scalar> K_g, K_l;        // level potentials
  Vec<Scalar> flux_g, flux_l;  // convective momentum flux m u^2
};

template <typename Scalar>
Scalar convective_flux(Convection c, Scalar m, Scalar u_left_face, Scalar u_right_face, Scalar I_left_face,
                       Scalar I_right_face) {
  const Scalar u = (u_left_face + u_right_face) / 2;
  if (c == Convection::upwind) return u * (u >= 0 ? I_left_face : I_right_face);
  return m * u * u;
}

template <typename Scalar>
VolumeFields<Scalar> volume_fields(const Model<Scalar>& md, const State<Scalar>& s, const FaceFields<Scalar>& ff) {
  const auto& g = md.grid;
  const int n = g.N();
  VolumeFields<Scalar> v;
  v.alpha_l.resize(n);
  v.K_g.resize(n);
  v.K_l.resize(n);
  v.flux_g.resize(n);
  v.flux_l.resize(n);
  const Scalar A = md.pipe.A();
  for (int i = 0; i < n; ++i) {
    const Scalar Al = s.m_l(i) / md.fluid.rho_l;
    v.alpha_l(i) = Al / A;
    const CrossSection<Scalar> cs = cross_section(v.alpha_l(i), md.pipe, md.geometry);
    v.K_g(i) = level_potential(Phase::gas, cs, md.pipe, md.fluid.rho_g, md.g_n());
    v.K_l(i) = level_potential(Phase::liquid, cs, md.pipe, md.fluid.rho_l, md.g_n());
    const int fl = i, fr = g.periodic() ? (i + 1) % n : i + 1;
    v.flux_g(i) = convective_flux(md.convection, s.m_g(i), ff.u_g(fl), ff.u_g(fr), s.I_g(fl), s.I_g(fr));
    v.flux_l(i) = convective_flux(md.convection, s.m_l(i), ff.u_l(fl), ff.u_l(fr), s.I_l(fl), s.I_l(fr));
  }
  return v;
}

// Source terms at a face from its R-averaged hold-up and face velocities.
template <typename Scalar>
SourceTerms<Scalar> face_sources(const Model<Scalar>& md, const FaceFields<Scalar>& ff, int f, Scalar t) {
  const Scalar alpha = ff.m_l(f) / (md.fluid.rho_l * md.pipe.A());
  const CrossSection<Scalar> cs = cross_section(alpha, md.pipe, md.geometry);
  return source_terms(FlowPoint<Scalar>{alpha, ff.u_g(f), ff.u_l(f)}, cs, md.fluid, md.pipe, md.g,
                      md.body.at(md.grid.x_face(f), t), md.friction);
}

// Pressure-free momentum right-hand side on interior faces; boundary faces are
// left at zero and filled by the boundary treatment.
template <typename Scalar>
void momentum_rhs(const Model<Scalar>& md, const State<Scalar>& s, const FaceFields<Scalar>& ff,
                  const VolumeFields<Scalar>& vf, Vec<Scalar>& F_g, Vec<Scalar>& F_l) {
  const auto& g = md.grid;
  F_g = Vec<Scalar>::Zero(g.faces());
  F_l = Vec<Scalar>::Zero(g.faces());
  for (int f = 0; f < g.faces(); ++f) {
    const int a = g.left_of(f), b = g.right_of(f);
    if (a < 0 || b < 0) continue;
    const Scalar h = g.ds_face(f);
    const SourceTerms<Scalar> S = face_sources(md, ff, f, s.t);
    F_g(f) = -(vf.flux_g(b) - vf.flux_g(a)) / h + (vf.K_g(b) - vf.K_g(a)) / h + S.S_g;
    F_l(f) = -(vf.flux_l(b) - vf.flux_l(a)) / h + (vf.K_l(b) - vf.K_l(a)) / h + S.S_l;
  }
}

// ---------------------------------------------------------------------------
// Dense assemblies for verification

template <typename Scalar>
Mat<Scalar> dense_D(const Grid<Scalar>& g) {
  const int n = g.N(), nf = g.faces();
  Mat<Scalar> D = Mat<Scalar>::Zero(n, nf);
  for (int i = 0; i < n; ++i) {
    const int fr = g.periodic() ? (i + 1) % n : i + 1;
    D(i, fr) += 1 / g.ds(i);
    D(i, i) -= 1 / g.ds(i);
  }
  return D;
}

template <typename Scalar>
Mat<Scalar> dense_G(const Model<Scalar>& md) {
  const auto& g = md.grid;
  Mat<Scalar> G = Mat<Scalar>::Zero(g.faces(), g.N());
  for (int f = 0; f < g.faces(); ++f) {
    if (!face_coupled(md, f)) continue;
    const int a = g.left_of(f), b = g.right_of(f);
    if (b >= 0) G(f, b) += 1 / g.ds_face(f);
    G(f, a) -= 1 / g.ds_face(f);
  }
  return G;
}

template <typename Scalar>
Mat<Scalar> dense_R(const Grid<Scalar>& g) {
  Mat<Scalar> R = Mat<Scalar>::Zero(g.faces(), g.N());
  for (int f = 0; f < g.faces(); ++f) {
    const int a = g.left_of(f), b = g.right_of(f);
    if (a >= 0 && b >= 0) {
      R(f, a) = R(f, b) = Scalar(0.5);
    }
  }
  return R;
}

}  // namespace twofluid
