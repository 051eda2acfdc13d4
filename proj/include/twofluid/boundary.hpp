#pragma once

#include <functional>
#include <string>

#include "twofluid/characteristics.hpp"

namespace twofluid {

// Time signal with optional analytic derivatives; missing derivatives fall back
// to central differences with step fd_step.
template <typename Scalar>
struct Signal {
  std::function<Scalar(Scalar)> value;
  std::function<Scalar(Scalar)> rate;
  std::function<Scalar(Scalar)> accel;
  Scalar fd_step = Scalar(1e-4);

  explicit operator bool() const { return static_cast<bool>(value); }
  Scalar operator()(Scalar t) const { return value(t); }

  Scalar d1(Scalar t) const {
    if (rate) return rate(t);
    return (value(t + fd_step) - value(t - fd_step)) / (2 * fd_step);
  }
  Scalar d2(Scalar t) const {
    if (accel) return accel(t);
    if (rate) return (rate(t + fd_step) - rate(t - fd_step)) / (2 * fd_step);
    return (value(t + fd_step) - 2 * value(t) + value(t - fd_step)) / (fd_step * fd_step);
  }

  static Signal constant(Scalar v) {
    Signal s;
    s.value = [v](Scalar) { return v; };
    s.rate = [](Scalar) { return Scalar(0); };
    s.accel = [](Scalar) { return Scalar(0); };
    return s;
  }
};

enum class BoundaryKind { periodic, inflow_strong, inflow_weak, wall, outflow };
enum class Side { left, right };

inline std::string to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::periodic: return "periodic";
    case BoundaryKind::inflow_strong: return "inflow_strong";
    case BoundaryKind::inflow_weak: return "inflow_weak";
    case BoundaryKind::wall: return "wall";
    case BoundaryKind::outflow: return "outflow";
  }
  return "?";
}

template <typename Scalar>
struct BoundarySpec {
  BoundaryKind kind = BoundaryKind::periodic;
  Signal<Scalar> I_g;  // mass flow signals for inflow ends
  Signal<Scalar> I_l;
  Signal<Scalar> p_out;  // outlet pressure
  // optional extra momentum source [N/m] on the outflow half volume only
  Signal<Scalar> F_g, F_l;

  bool inflow() const { return kind == BoundaryKind::inflow_strong || kind == BoundaryKind::inflow_weak; }
  // the boundary momentum node is a differential unknown driven by its own rate
  bool integrates_momentum() const { return kind == BoundaryKind::inflow_weak || kind == BoundaryKind::outflow; }

  static BoundarySpec periodic() { return {}; }
  static BoundarySpec wall() {
    BoundarySpec b;
    b.kind = BoundaryKind::wall;
    return b;
  }
  static BoundarySpec inflow(Signal<Scalar> I_g, Signal<Scalar> I_l, bool strong) {
    BoundarySpec b;
    b.kind = strong ? BoundaryKind::inflow_strong : BoundaryKind::inflow_weak;
    b.I_g = std::move(I_g);
    b.I_l = std::move(I_l);
    return b;
  }
  static BoundarySpec outflow(Signal<Scalar> p) {
    BoundarySpec b;
    b.kind = BoundaryKind::outflow;
    b.p_out = std::move(p);
    return b;
  }
};

// dA_l/dt at a non-periodic end from the characteristic equations. J is
// dI_g/dt / A_g - dI_l/dt / A_l at the boundary node, S_star is S_l/A_l - S_g/A_g,
// V the slope term of the outgoing characteristic (V1 on the left, V2 on the right).
template <typename Scalar>
Scalar holdup_rate(Side side, const EigenData<Scalar>& e, Scalar V_out, Scalar J, Scalar S_star) {
  const Scalar k = e.rhou_star;
  if (!e.well_posed) throw DomainError("ill-posed state at boundary");
  if (side == Side::left) {
    if (!(e.lambda1 < 0)) throw DomainError("left boundary: outgoing characteristic expected (lambda1 < 0)");
    return -(e.lambda1 * V_out + J + S_star) / (e.xi + k);
  }
  if (!(e.lambda2 > 0)) throw DomainError("right boundary: outgoing characteristic expected (lambda2 > 0)");
  return -(e.lambda2 * V_out + J + S_star) / (k - e.xi);
}

// Incoming characteristic combination lambda_in V_in implied by the boundary data
// (lambda2 V2 on the left, lambda1 V1 on the right).
template <typename Scalar>
Scalar incoming_wave_term(Side side, const EigenData<Scalar>& e, Scalar V_out, Scalar J, Scalar S_star) {
  const Scalar k = e.rhou_star;
  const Scalar xi = e.xi;
  if (side == Side::left) return -((xi - k) * e.lambda1 * V_out + 2 * xi * J + 2 * xi * S_star) / (xi + k);
  return -((xi + k) * e.lambda2 * V_out + 2 * xi * J + 2 * xi * S_star) / (xi - k);
}

// Derivative at x0 of the quadratic through (x0,f0), (x1,f1), (x2,f2).
template <typename Scalar>
Scalar one_sided_derivative(Scalar x0, Scalar x1, Scalar x2, Scalar f0, Scalar f1, Scalar f2) {
  return f0 * (2 * x0 - x1 - x2) / ((x0 - x1) * (x0 - x2)) + f1 * (x0 - x2) / ((x1 - x0) * (x1 - x2)) +
         f2 * (x0 - x1) / ((x2 - x0) * (x2 - x1));
}

// Derivative at x of the quadratic through three points.
template <typename Scalar>
Scalar lagrange_derivative(Scalar x, const Scalar* xs, const Scalar* fs) {
  Scalar d = 0;
  for (int j = 0; j < 3; ++j) {
    const int a = (j + 1) % 3, b = (j + 2) % 3;
    d += fs[j] * ((x - xs[a]) + (x - xs[b])) / ((xs[j] - xs[a]) * (xs[j] - xs[b]));
  }
  return d;
}

// Linear extrapolation of two centre values (at distances d1 < d2 from the face) to the face.
template <typename Scalar>
Scalar boundary_pressure(Scalar p1, Scalar p2, Scalar d1, Scalar d2) {
  return p1 - (p2 - p1) * d1 / (d2 - d1);
}

}  // namespace twofluid
