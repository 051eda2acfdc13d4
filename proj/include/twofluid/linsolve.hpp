#pragma once

#include <cmath>
#include <limits>
#include <sstream>

#include "twofluid/model.hpp"

namespace twofluid {

enum class Preconditioner { none, diagonal };

struct CGConfig {
  double tol = 1e-12;
  int max_iter = 0;  // 0: 2N + 20
  Preconditioner precond = Preconditioner::diagonal;
};

template <typename Scalar>
struct CGResult {
  Vec<Scalar> x;
  int iterations = 0;
  Scalar residual{};  // final ||b - A x|| / ||b|| on the scaled system
};

// Solves L x = rhs. CG runs on the SPD system -W L x = -W rhs. When L is
// singular the constant part of W rhs is removed and the zero-mean solution returned.
template <typename Scalar>
CGResult<Scalar> solve(const PressureOperator<Scalar>& L, const Vec<Scalar>& rhs, const CGConfig& cfg = {}) {
  using std::sqrt, std::abs;
  const int n = L.size();
  if (rhs.size() != n) throw SolverError("rhs size mismatch");
  if (!rhs.allFinite()) throw SolverError("non-finite rhs in pressure solve");
  if (!(cfg.tol > 0)) throw SolverError("CG tolerance must be positive");
  const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : 2 * n + 20;

  Vec<Scalar> b = -L.w.cwiseProduct(rhs);
  if (L.singular) b.array() -= b.mean();
  const Vec<Scalar> diag = -L.diagonal();
  Vec<Scalar> minv = Vec<Scalar>::Ones(n);
  if (cfg.precond == Preconditioner::diagonal) minv = diag.cwiseInverse();
  // infinity norm of -W L for the rounding floor
  Scalar norm_A = 0;
  for (int i = 0; i < n; ++i) norm_A = std::max(norm_A, 2 * diag(i));

  CGResult<Scalar> res;
  res.x = Vec<Scalar>::Zero(n);
  const Scalar bnorm = b.norm();
  if (bnorm == 0) return res;

  Vec<Scalar> r = b, z = minv.cwiseProduct(r), p = z, Ap(n);
  Scalar rz = r.dot(z);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar rnorm = bnorm;
  for (int it = 1; it <= max_iter; ++it) {
    L.apply_scaled(p, Ap);
    Ap = -Ap;
    const Scalar pAp = p.dot(Ap);
    if (!(pAp > 0)) break;
    const Scalar alpha = rz / pAp;
    res.x += alpha * p;
    r -= alpha * Ap;
    if (L.singular) r.array() -= r.mean();
    rnorm = r.norm();
    res.iterations = it;
    if (rnorm <= cfg.tol * bnorm) break;
    if (rnorm <= 10 * eps * norm_A * res.x.norm() * sqrt(Scalar(n))) break;
    z = minv.cwiseProduct(r);
    const Scalar rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  if (L.singular) res.x.array() -= res.x.mean();
  res.residual = rnorm / bnorm;
  const bool floor_hit = rnorm <= 10 * eps * norm_A * res.x.norm() * sqrt(Scalar(n));
  if (!(rnorm <= cfg.tol * bnorm) && !floor_hit) {
    std::ostringstream os;
    os << "CG did not converge: relative residual " << double(res.residual) << " after " << res.iterations
       << " iterations (tol " << cfg.tol << ")";
    throw SolverError(os.str());
  }
  return res;
}

// Direct tridiagonal solve for the non-singular bounded case.
template <typename Scalar>
Vec<Scalar> solve_thomas(const PressureOperator<Scalar>& L, const Vec<Scalar>& rhs) {
  if (L.topology == Topology::periodic || L.singular) throw SolverError("Thomas solver needs a non-singular bounded operator");
  const int n = L.size();
  Vec<Scalar> diag = L.diagonal(), d = L.w.cwiseProduct(rhs);
  Vec<Scalar> c(n);
  // off-diagonal (i, i+1) is kappa(i+1)
  c(0) = L.kappa(1) / diag(0);
  d(0) /= diag(0);
  for (int i = 1; i < n; ++i) {
    const Scalar sub = L.kappa(i);
    const Scalar m = diag(i) - sub * c(i - 1);
    c(i) = i + 1 < n ? L.kappa(i + 1) / m : Scalar(0);
    d(i) = (d(i) - sub * d(i - 1)) / m;
  }
  for (int i = n - 2; i >= 0; --i) d(i) -= c(i) * d(i + 1);
  return d;
}

}  // namespace twofluid
