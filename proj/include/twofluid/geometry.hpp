#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "twofluid/types.hpp"

namespace twofluid {

template <typename Scalar>
struct PipeGeometry {
  Scalar R{};
  Scalar L{};
  Scalar phi{0};
  Scalar eps_wall{0};

  Scalar D() const { return 2 * R; }
  Scalar A() const { return pi<Scalar> * R * R; }

  void validate() const {
    if (!(R > 0)) throw DomainError("pipe radius must be positive");
    if (!(L > 0)) throw DomainError("pipe length must be positive");
    if (eps_wall < 0) throw DomainError("wall roughness must be non-negative");
  }
};

enum class AngleMode { approximate, exact };

struct GeometryOptions {
  AngleMode mode = AngleMode::approximate;
  double alpha_min = 1e-6;
  double domain_tol = 1e-12;
};

template <typename Scalar>
struct CrossSection {
  Scalar alpha_l{};
  Scalar gamma_l{};
  Scalar P_l{};
  Scalar P_g{};
  Scalar P_gl{};
  Scalar h{};
  Scalar dh_dAl{};
  bool degenerate = false;
};

// Liquid fraction of a circular segment with wetted half-angle gamma.
template <typename Scalar>
Scalar segment_fraction(Scalar gamma) {
  using std::cos, std::sin;
  return (gamma - sin(gamma) * cos(gamma)) / pi<Scalar>;
}

template <typename Scalar>
Scalar wetted_angle_approx(Scalar alpha_l) {
  using std::cbrt;
  const Scalar al = alpha_l;
  const Scalar ag = 1 - alpha_l;
  const Scalar c = cbrt(Scalar(1.5) * pi<Scalar>);
  Scalar gamma = pi<Scalar> * al + c * (ag - al + cbrt(al) - cbrt(ag)) -
                 al * ag * (ag - al) * (1 + 4 * (al * al + ag * ag)) / 200;
  return std::clamp(gamma, Scalar(0), pi<Scalar>);
}

// Bisection on the exact area-angle relation.
template <typename Scalar>
Scalar wetted_angle_exact(Scalar alpha_l) {
  Scalar lo = 0;
  Scalar hi = pi<Scalar>;
  for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<Scalar>::epsilon(); ++it) {
    const Scalar mid = (lo + hi) / 2;
    if (segment_fraction(mid) < alpha_l)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2;
}

template <typename Scalar>
Scalar checked_fraction(Scalar alpha_l, double tol) {
  if (!(alpha_l >= -tol && alpha_l <= 1 + tol))
    throw DomainError("liquid fraction outside [0,1]: " + std::to_string(double(alpha_l)));
  return std::clamp(alpha_l, Scalar(0), Scalar(1));
}

template <typename Scalar>
Scalar wetted_angle(Scalar alpha_l, AngleMode mode = AngleMode::approximate, double tol = 1e-12) {
  const Scalar a = checked_fraction(alpha_l, tol);
  return mode == AngleMode::approximate ? wetted_angle_approx(a) : wetted_angle_exact(a);
}

template <typename Scalar>
CrossSection<Scalar> cross_section(Scalar alpha_l, const PipeGeometry<Scalar>& geom,
                                   const GeometryOptions& opt = {}) {
  using std::cos, std::sin;
  CrossSection<Scalar> cs;
  cs.alpha_l = checked_fraction(alpha_l, opt.domain_tol);
  const Scalar lo = Scalar(opt.alpha_min);
  const Scalar a = std::clamp(cs.alpha_l, lo, Scalar(1) - lo);
  cs.degenerate = a != cs.alpha_l || a <= 0 || a >= 1;
  const Scalar D = geom.D();
  cs.gamma_l = opt.mode == AngleMode::approximate ? wetted_angle_approx(a) : wetted_angle_exact(a);
  cs.P_gl = D * sin(cs.gamma_l);
  cs.P_l = D * cs.gamma_l;
  cs.P_g = D * (pi<Scalar> - cs.gamma_l);
  cs.h = D * (1 - cos(cs.gamma_l)) / 2;
  cs.dh_dAl = cs.P_gl > 0 ? 1 / cs.P_gl : std::numeric_limits<Scalar>::infinity();
  return cs;
}

// K_g = rho_g g_n [(R-h) A_g + P_gl^3/12],  K_l = rho_l g_n [(R-h) A_l - P_gl^3/12]
template <typename Scalar>
Scalar level_potential(Phase phase, const CrossSection<Scalar>& cs, const PipeGeometry<Scalar>& geom,
                       Scalar rho, Scalar g_n) {
  const Scalar A = geom.A();
  const Scalar cubic = cs.P_gl * cs.P_gl * cs.P_gl / 12;
  if (phase == Phase::gas) return rho * g_n * ((geom.R - cs.h) * (1 - cs.alpha_l) * A + cubic);
  return rho * g_n * ((geom.R - cs.h) * cs.alpha_l * A - cubic);
}

}  // namespace twofluid
