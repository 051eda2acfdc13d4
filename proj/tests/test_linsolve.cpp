#include <doctest.h>

#include "properties.hpp"

using namespace twofluid;

namespace {

PressureOperator<double> random_operator(props::Rng& rng, props::EndKind kind) {
  const ModelD md = props::random_model(rng, kind, 3, 40);
  Vec<double> mg, ml;
  props::random_face_masses(rng, md, mg, ml);
  return assemble_laplacian(md, mg, ml);
}

}  // namespace

TEST_CASE("conjugate gradients match a dense solve over 1000 operators") {
  props::Rng rng(51);
  props::SweepResult r;
  for (int k = 0; k < 1000; ++k) {
    const auto kind = props::random_kind(rng);
    const auto L = random_operator(rng, kind);
    const int n = L.size();
    Vec<double> rhs = props::random_vec(rng, n);
    const Mat<double> Ld = L.dense();
    if (L.singular) {
      // compatible right-hand side: W-weighted mean zero
      rhs.array() -= L.w.dot(rhs) / L.w.sum();
    }
    const auto res = solve(L, rhs);
    double err;
    if (L.singular) {
      err = (Ld * res.x - rhs).cwiseAbs().maxCoeff() / rhs.cwiseAbs().maxCoeff();
      err = std::max(err, std::abs(res.x.mean()) / (res.x.cwiseAbs().maxCoeff() + 1e-300));
    } else {
      const Vec<double> x = Ld.fullPivLu().solve(rhs);
      err = (res.x - x).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff();
    }
    r.record(err < 1e-8, err, "CG at N=" + std::to_string(n));
  }
  INFO(r.summary());
  CHECK(r.ok());
}

TEST_CASE("tridiagonal direct solve agrees with conjugate gradients") {
  props::Rng rng(52);
  double worst = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto L = random_operator(rng, props::EndKind::outflow);
    const Vec<double> rhs = props::random_vec(rng, L.size());
    CGConfig cfg;
    cfg.tol = 1e-14;
    const Vec<double> a = solve(L, rhs, cfg).x, b = solve_thomas(L, rhs);
    worst = std::max(worst, (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-9);
  props::Rng r2(53);
  CHECK_THROWS_AS(solve_thomas(random_operator(r2, props::EndKind::wall), Vec<double>(Vec<double>::Ones(3))), SolverError);
}

TEST_CASE("solver input checks") {
  props::Rng rng(54);
  const auto L = random_operator(rng, props::EndKind::outflow);
  const int n = L.size();
  Vec<double> bad = Vec<double>(Vec<double>::Ones(n));
  bad(0) = std::nan("");
  CHECK_THROWS_AS(solve(L, bad), SolverError);
  CHECK_THROWS_AS(solve(L, Vec<double>(Vec<double>::Ones(n + 1))), SolverError);
  CGConfig cfg;
  cfg.tol = 0;
  CHECK_THROWS_AS(solve(L, Vec<double>(Vec<double>::Ones(n)), cfg), SolverError);
  cfg.tol = 1e-14;
  cfg.max_iter = 1;
  cfg.precond = Preconditioner::none;
  Vec<double> rhs = props::random_vec(rng, n);
  if (n > 2) CHECK_THROWS_AS(solve(L, rhs, cfg), SolverError);
  CHECK(solve(L, Vec<double>(Vec<double>::Zero(n))).x.cwiseAbs().maxCoeff() == 0);
}
