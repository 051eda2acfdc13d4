#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "twofluid/geometry.hpp"

namespace twofluid {

template <typename Scalar>
struct FluidProps {
  Scalar rho_g{};
  Scalar rho_l{};
  Scalar mu_g{};
  Scalar mu_l{};

  Scalar rho(Phase ph) const { return ph == Phase::gas ? rho_g : rho_l; }
  Scalar mu(Phase ph) const { return ph == Phase::gas ? mu_g : mu_l; }

  void validate() const {
    if (!(rho_g > 0 && rho_l > 0 && mu_g > 0 && mu_l > 0))
      throw DomainError("fluid properties must be strictly positive");
    if (!(rho_l > rho_g)) throw DomainError("liquid must be denser than gas");
  }
};

enum class FrictionModel { all_regime, laminar };

inline constexpr double reynolds_floor = 1e-8;
inline constexpr double interfacial_friction_floor = 0.014;

// Local flow state at one point: hold-up and phase velocities.
template <typename Scalar>
struct FlowPoint {
  Scalar alpha_l{};
  Scalar u_g{};
  Scalar u_l{};
};

// Body force at one point: `gradient` [Pa/m] acts on both phases through their
// areas, `gas`/`liquid` [N/m] are per-phase forcing terms.
template <typename Scalar>
struct ForcePoint {
  Scalar gradient{0};
  Scalar gas{0};
  Scalar liquid{0};
};

template <typename Scalar>
struct BodyForce {
  std::function<Scalar(Scalar, Scalar)> gradient;
  std::function<Scalar(Scalar, Scalar)> gas;
  std::function<Scalar(Scalar, Scalar)> liquid;

  ForcePoint<Scalar> at(Scalar s, Scalar t) const {
    ForcePoint<Scalar> f;
    if (gradient) f.gradient = gradient(s, t);
    if (gas) f.gas = gas(s, t);
    if (liquid) f.liquid = liquid(s, t);
    return f;
  }

  static BodyForce constant(Scalar F) {
    BodyForce b;
    b.gradient = [F](Scalar, Scalar) { return F; };
    return b;
  }
};

template <typename Scalar>
struct Stresses {
  Scalar tau_g{};
  Scalar tau_l{};
  Scalar tau_gl{};
};

template <typename Scalar>
struct SourceTerms {
  Scalar S_g{};
  Scalar S_l{};
};

template <typename Scalar>
Scalar hydraulic_diameter(Phase phase, const CrossSection<Scalar>& cs, const PipeGeometry<Scalar>& geom) {
  const Scalar A = geom.A();
  if (phase == Phase::liquid) return 4 * cs.alpha_l * A / cs.P_l;
  return 4 * (1 - cs.alpha_l) * A / (cs.P_g + cs.P_gl);
}

template <typename Scalar>
Scalar all_regime_friction(Scalar Re, Scalar rel_rough) {
  using std::log, std::pow;
  if (!(Re > 0)) throw DomainError("Reynolds number must be positive");
  const Scalar a = pow(Scalar(2.457) * log(1 / (pow(7 / Re, Scalar(0.9)) + Scalar(0.27) * rel_rough)), 16);
  const Scalar b = pow(Scalar(37530) / Re, 16);
  return 2 * pow(pow(8 / Re, 12) + pow(a + b, Scalar(-1.5)), Scalar(1) / 12);
}

template <typename Scalar>
Scalar laminar_friction(Scalar Re) {
  if (!(Re > 0)) throw DomainError("Reynolds number must be positive");
  return 16 / Re;
}

template <typename Scalar>
Scalar interfacial_friction(Scalar f_g) {
  return std::max(f_g, Scalar(interfacial_friction_floor));
}

template <typename Scalar>
Scalar wall_friction(Phase phase, Scalar u, const CrossSection<Scalar>& cs, const FluidProps<Scalar>& fl,
                     const PipeGeometry<Scalar>& geom, FrictionModel model) {
  using std::abs;
  const Scalar Dh = hydraulic_diameter(phase, cs, geom);
  const Scalar Re = std::max(fl.rho(phase) * abs(u) * Dh / fl.mu(phase), Scalar(reynolds_floor));
  if (model == FrictionModel::laminar) return laminar_friction(Re);
  return all_regime_friction(Re, geom.eps_wall / Dh);
}

template <typename Scalar>
Stresses<Scalar> shear_stresses(const FlowPoint<Scalar>& pt, const CrossSection<Scalar>& cs,
                                const FluidProps<Scalar>& fl, const PipeGeometry<Scalar>& geom,
                                FrictionModel model = FrictionModel::all_regime) {
  using std::abs;
  if (model == FrictionModel::laminar) {
    // 16/Re written out so the stress stays linear through zero velocity; the
    // interfacial Reynolds number is built on the slip velocity
    const Scalar Dg = hydraulic_diameter(Phase::gas, cs, geom);
    const Scalar Dl = hydraulic_diameter(Phase::liquid, cs, geom);
    Stresses<Scalar> t;
    t.tau_g = 8 * fl.mu_g * pt.u_g / Dg;
    t.tau_l = 8 * fl.mu_l * pt.u_l / Dl;
    t.tau_gl = 8 * fl.mu_g * (pt.u_g - pt.u_l) / Dg;
    return t;
  }
  const Scalar f_g = wall_friction(Phase::gas, pt.u_g, cs, fl, geom, model);
  const Scalar f_l = wall_friction(Phase::liquid, pt.u_l, cs, fl, geom, model);
  const Scalar du = pt.u_g - pt.u_l;
  Stresses<Scalar> t;
  t.tau_g = f_g * fl.rho_g * pt.u_g * abs(pt.u_g) / 2;
  t.tau_l = f_l * fl.rho_l * pt.u_l * abs(pt.u_l) / 2;
  t.tau_gl = interfacial_friction(f_g) * fl.rho_g * du * abs(du) / 2;
  return t;
}

template <typename Scalar>
SourceTerms<Scalar> source_terms(const FlowPoint<Scalar>& pt, const CrossSection<Scalar>& cs,
                                 const FluidProps<Scalar>& fl, const PipeGeometry<Scalar>& geom, Scalar g,
                                 const ForcePoint<Scalar>& body = {},
                                 FrictionModel model = FrictionModel::all_regime) {
  using std::sin;
  const Stresses<Scalar> t = shear_stresses(pt, cs, fl, geom, model);
  const Scalar A_l = pt.alpha_l * geom.A();
  const Scalar A_g = geom.A() - A_l;
  const Scalar g_s = g * sin(geom.phi);
  SourceTerms<Scalar> s;
  s.S_g = -t.tau_gl * cs.P_gl - t.tau_g * cs.P_g - fl.rho_g * A_g * g_s + body.gradient * A_g + body.gas;
  s.S_l = t.tau_gl * cs.P_gl - t.tau_l * cs.P_l - fl.rho_l * A_l * g_s + body.gradient * A_l + body.liquid;
  return s;
}

}  // namespace twofluid
