#pragma once

#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "twofluid/closures.hpp"

namespace twofluid {

template <typename Scalar>
struct PrimitivePoint {
  Scalar A_l{};
  Scalar u_l{};
  Scalar u_g{};
  Scalar p{};
};

template <typename Scalar>
struct EigenData {
  Scalar lambda1{};
  Scalar lambda2{};
  Scalar xi{};
  Scalar xi2{};
  Scalar rho_star{};
  Scalar rhou_star{};
  bool well_posed = false;
};

// lambda_{1,2} = ((rho u)* -+ xi) / rho*,
// xi^2 = rho* (rho_l - rho_g) g_n h' - rho_l rho_g / (A_l A_g) (u_g - u_l)^2.
template <typename Scalar>
EigenData<Scalar> eigenvalues(const PrimitivePoint<Scalar>& w, const CrossSection<Scalar>& cs,
                              const FluidProps<Scalar>& fl, const PipeGeometry<Scalar>& geom, Scalar g_n) {
  using std::sqrt;
  if (cs.degenerate) throw DomainError("eigenvalues need a non-degenerate cross-section");
  const Scalar A_l = w.A_l;
  const Scalar A_g = geom.A() - A_l;
  if (!(A_l > 0 && A_g > 0)) throw DomainError("eigenvalues need 0 < A_l < A");
  EigenData<Scalar> e;
  e.rho_star = fl.rho_l / A_l + fl.rho_g / A_g;
  e.rhou_star = fl.rho_l * w.u_l / A_l + fl.rho_g * w.u_g / A_g;
  const Scalar du = w.u_g - w.u_l;
  e.xi2 = e.rho_star * (fl.rho_l - fl.rho_g) * g_n * cs.dh_dAl - fl.rho_l * fl.rho_g / (A_l * A_g) * du * du;
  e.well_posed = e.xi2 >= 0;
  e.xi = e.well_posed ? sqrt(e.xi2) : Scalar(0);
  e.lambda1 = (e.rhou_star - e.xi) / e.rho_star;
  e.lambda2 = (e.rhou_star + e.xi) / e.rho_star;
  return e;
}

template <typename Scalar>
struct PolynomialRoots {
  std::complex<Scalar> lambda1;
  std::complex<Scalar> lambda2;
  bool real = false;
};

// rho_l A_g (u_l - lambda)^2 + rho_g A_l (u_g - lambda)^2 = (rho_l - rho_g) A_g A_l g_n h'
template <typename Scalar>
PolynomialRoots<Scalar> characteristic_polynomial_roots(const PrimitivePoint<Scalar>& w,
                                                        const CrossSection<Scalar>& cs,
                                                        const FluidProps<Scalar>& fl,
                                                        const PipeGeometry<Scalar>& geom, Scalar g_n) {
  using C = std::complex<Scalar>;
  const Scalar A_l = w.A_l;
  const Scalar A_g = geom.A() - A_l;
  const Scalar wl = fl.rho_l * A_g;
  const Scalar wg = fl.rho_g * A_l;
  const Scalar a = wl + wg;
  const Scalar b = -2 * (wl * w.u_l + wg * w.u_g);
  const Scalar c = wl * w.u_l * w.u_l + wg * w.u_g * w.u_g - (fl.rho_l - fl.rho_g) * A_g * A_l * g_n * cs.dh_dAl;
  const Scalar disc = b * b - 4 * a * c;
  PolynomialRoots<Scalar> r;
  r.real = disc >= 0;
  const C sq = std::sqrt(C(disc));
  // avoid cancellation: q = -(b + sign(b) sqrt(disc))/2
  const C q = b >= 0 ? -(C(b) + sq) / Scalar(2) : -(C(b) - sq) / Scalar(2);
  C r1, r2;
  if (std::abs(q) > 0) {
    r1 = q / a;
    r2 = C(c) / q;
  } else {
    r1 = r2 = C(-b / (2 * a));
  }
  if (r.real) {
    if (r1.real() > r2.real()) std::swap(r1, r2);
  } else if (r1.imag() > r2.imag()) {
    std::swap(r1, r2);
  }
  r.lambda1 = r1;
  r.lambda2 = r2;
  return r;
}

template <typename Scalar>
struct BoundarySlopes {
  Scalar V1{};
  Scalar V2{};
};

// dW = (dA_l/ds, du_l/ds, du_g/ds)
template <typename Scalar>
BoundarySlopes<Scalar> boundary_slopes(const Eigen::Matrix<Scalar, 3, 1>& dW, const EigenData<Scalar>& e,
                                       const FluidProps<Scalar>& fl) {
  BoundarySlopes<Scalar> v;
  v.V1 = e.xi * dW(0) - fl.rho_l * dW(1) + fl.rho_g * dW(2);
  v.V2 = -e.xi * dW(0) - fl.rho_l * dW(1) + fl.rho_g * dW(2);
  return v;
}

template <typename Scalar>
using Mat4 = Eigen::Matrix<Scalar, 4, 4>;
template <typename Scalar>
using Vec4 = Eigen::Matrix<Scalar, 4, 1>;

// Quasi-linear form A dW/dt + B dW/ds + S(W) = 0 with W = (A_l, u_l, u_g, p).
template <typename Scalar>
Mat4<Scalar> quasilinear_A(const FluidProps<Scalar>& fl) {
  Mat4<Scalar> A = Mat4<Scalar>::Zero();
  A(0, 0) = 1;
  A(1, 0) = -1;
  A(2, 1) = fl.rho_l;
  A(3, 2) = fl.rho_g;
  return A;
}

template <typename Scalar>
Mat4<Scalar> quasilinear_B(const PrimitivePoint<Scalar>& w, const CrossSection<Scalar>& cs,
                           const FluidProps<Scalar>& fl, const PipeGeometry<Scalar>& geom, Scalar g_n) {
  const Scalar A_g = geom.A() - w.A_l;
  Mat4<Scalar> B = Mat4<Scalar>::Zero();
  B(0, 0) = w.u_l;
  B(0, 1) = w.A_l;
  B(1, 0) = -w.u_g;
  B(1, 2) = A_g;
  B(2, 0) = fl.rho_l * g_n * cs.dh_dAl;
  B(2, 1) = fl.rho_l * w.u_l;
  B(2, 3) = 1;
  B(3, 0) = fl.rho_g * g_n * cs.dh_dAl;
  B(3, 2) = fl.rho_g * w.u_g;
  B(3, 3) = 1;
  return B;
}

struct DispersionOptions {
  double amplitude = 1e-6;   // liquid fraction perturbation
  int root = 2;              // 1 or 2: which root the perturbation shape belongs to
  double steady_tol = 1e-6;  // allowed source residual relative to the wall shear scale
  GeometryOptions geometry{};
  FrictionModel friction = FrictionModel::all_regime;
};

template <typename Scalar>
struct DispersionResult {
  Scalar k{};
  std::complex<Scalar> omega1;
  std::complex<Scalar> omega2;
  Eigen::Matrix<std::complex<Scalar>, 4, 1> eps2;
  std::array<std::complex<Scalar>, 3> det_coeffs{};  // a w^2 + b w + c
  Scalar det_scale{};                                // max |det| over the sample points
};

template <typename Scalar>
Vec4<Scalar> quasilinear_source(const Vec4<Scalar>& W, const FluidProps<Scalar>& fl, const PipeGeometry<Scalar>& geom,
                                Scalar g, const ForcePoint<Scalar>& body, const DispersionOptions& opt) {
  const Scalar A = geom.A();
  const CrossSection<Scalar> cs = cross_section(W(0) / A, geom, opt.geometry);
  const SourceTerms<Scalar> S =
      source_terms(FlowPoint<Scalar>{W(0) / A, W(2), W(1)}, cs, fl, geom, g, body, opt.friction);
  Vec4<Scalar> out;
  out << 0, 0, -S.S_l / W(0), -S.S_g / (A - W(0));
  return out;
}

// Linear stability of a uniform steady state to perturbations eps exp(i(omega t - k s)).
template <typename Scalar>
DispersionResult<Scalar> dispersion(const PrimitivePoint<Scalar>& base, Scalar k, const FluidProps<Scalar>& fl,
                                    const PipeGeometry<Scalar>& geom, Scalar g, const ForcePoint<Scalar>& body,
                                    const DispersionOptions& opt = {}) {
  using C = std::complex<Scalar>;
  using std::abs, std::cos, std::max;
  using CMat = Eigen::Matrix<C, 4, 4>;
  const Scalar g_n = g * cos(geom.phi);
  const Scalar A = geom.A();
  Vec4<Scalar> W0;
  W0 << base.A_l, base.u_l, base.u_g, base.p;

  {
    const CrossSection<Scalar> cs = cross_section(base.A_l / A, geom, opt.geometry);
    const Stresses<Scalar> t = shear_stresses(FlowPoint<Scalar>{base.A_l / A, base.u_g, base.u_l}, cs, fl, geom,
                                              opt.friction);
    const Vec4<Scalar> S0 = quasilinear_source(W0, fl, geom, g, body, opt);
    const Scalar scale = max({abs(t.tau_g * cs.P_g) / (A - base.A_l), abs(t.tau_l * cs.P_l) / base.A_l,
                              abs(t.tau_gl * cs.P_gl) / base.A_l, Scalar(1e-300)});
    if (S0.cwiseAbs().maxCoeff() > opt.steady_tol * scale)
      throw DomainError("dispersion base state is not steady");
  }

  Mat4<Scalar> Cj;
  for (int j = 0; j < 4; ++j) {
    const Scalar h = max(Scalar(1e-6), Scalar(1e-6) * abs(W0(j)));
    Vec4<Scalar> wp = W0, wm = W0;
    wp(j) += h;
    wm(j) -= h;
    Cj.col(j) = (quasilinear_source(wp, fl, geom, g, body, opt) - quasilinear_source(wm, fl, geom, g, body, opt)) /
                (2 * h);
  }
  const CrossSection<Scalar> cs = cross_section(base.A_l / A, geom, opt.geometry);
  const CMat Ac = quasilinear_A(fl).template cast<C>();
  const CMat Bc = quasilinear_B(base, cs, fl, geom, g_n).template cast<C>();
  const CMat Cc = Cj.template cast<C>();
  const C I(0, 1);
  auto system = [&](C w) -> CMat { return I * w * Ac - I * C(k) * Bc + Cc; };
  auto det = [&](C w) { return system(w).determinant(); };

  // det is quadratic in omega: fit a w^2 + b w + c from samples at 0, 1, i
  const C d0 = det(C(0)), d1 = det(C(1)), di = det(I);
  const C c = d0;
  const C s1 = d1 - c;  // a + b
  const C si = di - c;  // -a + i b
  const C b = (s1 + si) / (C(1) + I);
  const C a = s1 - b;
  DispersionResult<Scalar> r;
  r.k = k;
  r.det_coeffs = {a, b, c};
  r.det_scale = max({abs(d0), abs(d1), abs(di)});
  if (abs(a) == Scalar(0)) throw DomainError("dispersion determinant is not quadratic");
  const C sq = std::sqrt(b * b - Scalar(4) * a * c);
  const C q = std::real(std::conj(b) * sq) >= 0 ? -(b + sq) / Scalar(2) : -(b - sq) / Scalar(2);
  C w1 = q / a, w2 = c / q;
  if (w1.real() > w2.real()) std::swap(w1, w2);
  r.omega1 = w1;
  r.omega2 = w2;

  const C w = opt.root == 1 ? w1 : w2;
  Eigen::JacobiSVD<CMat> svd(system(w), Eigen::ComputeFullV);
  Eigen::Matrix<C, 4, 1> v = svd.matrixV().col(3);
  r.eps2 = v * (C(Scalar(opt.amplitude) * A) / v(0));
  return r;
}

}  // namespace twofluid
