#include "twofluid/tableau.hpp"

#include <cmath>
#include <map>

namespace twofluid {

void Tableau::validate() const {
  const int s = stages();
  if (s < 1 || a.rows() != s || a.cols() != s || c.size() != s) throw DomainError("tableau shape mismatch: " + name);
  for (int i = 0; i < s; ++i)
    for (int j = i; j < s; ++j)
      if (a(i, j) != 0) throw DomainError("tableau is not explicit: " + name);
  if (std::abs(b.sum() - 1) > 1e-14) throw DomainError("tableau weights do not sum to one: " + name);
  for (int i = 1; i <= s; ++i)
    if (row(i, i - 1) == 0) throw DomainError("tableau has a zero subdiagonal entry: " + name);
}

Tableau make_tableau(std::string name, Mat<double> a, Vec<double> b, int order) {
  Tableau t;
  t.name = std::move(name);
  t.c = a.rowwise().sum();
  t.a = std::move(a);
  t.b = std::move(b);
  t.order = order;
  t.validate();
  return t;
}

Tableau rk3_family(double c2) {
  if (c2 == 0 || c2 == 1 || std::abs(c2 - 2.0 / 3.0) < 1e-15) throw DomainError("rk3 family needs c2 not in {0, 2/3, 1}");
  const double q = (1 - c2) / (c2 * (3 * c2 - 2));
  Mat<double> a = Mat<double>::Zero(3, 3);
  a(1, 0) = c2;
  a(2, 0) = 1 + q;
  a(2, 1) = -q;
  Vec<double> b(3);
  b << 0.5 - 1 / (6 * c2), 1 / (6 * c2 * (1 - c2)), (2 - 3 * c2) / (6 * (1 - c2));
  return make_tableau("rk3-family", a, b, 3);
}

namespace {

std::map<std::string, Tableau> build_registry() {
  std::map<std::string, Tableau> reg;
  auto add = [&](Tableau t) { reg.emplace(t.name, std::move(t)); };
  {
    Mat<double> a = Mat<double>::Zero(1, 1);
    Vec<double> b(1);
    b << 1;
    // no subdiagonal inside a, so only the weight is checked
    Tableau t;
    t.name = "euler";
    t.a = a;
    t.b = b;
    t.c = Vec<double>::Zero(1);
    t.order = 1;
    add(t);
  }
  {
    Mat<double> a = Mat<double>::Zero(2, 2);
    a(1, 0) = 0.5;
    Vec<double> b(2);
    b << 0, 1;
    add(make_tableau("rk2", a, b, 2));
  }
  {
    Tableau t = rk3_family(0.5);
    t.name = "rk3-proposed";
    add(t);
  }
  {
    // three-stage strong-stability-preserving scheme
    Mat<double> a = Mat<double>::Zero(3, 3);
    a(1, 0) = 1;
    a(2, 0) = 0.25;
    a(2, 1) = 0.25;
    Vec<double> b(3);
    b << 1.0 / 6, 1.0 / 6, 2.0 / 3;
    add(make_tableau("rk3-ssp", a, b, 3));
  }
  {
    Mat<double> a = Mat<double>::Zero(4, 4);
    a(1, 0) = 0.5;
    a(2, 1) = 0.5;
    a(3, 2) = 1;
    Vec<double> b(4);
    b << 1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6;
    add(make_tableau("rk4", a, b, 4));
  }
  {
    // five-stage half-explicit method satisfying the index-2 order-4 conditions
    const double r6 = std::sqrt(6.0);
    Mat<double> a = Mat<double>::Zero(5, 5);
    a(1, 0) = 3.0 / 10;
    a(2, 0) = (1 + r6) / 30;
    a(2, 1) = (11 - 4 * r6) / 30;
    a(3, 0) = (-79 - 31 * r6) / 150;
    a(3, 1) = (-1 - 4 * r6) / 30;
    a(3, 2) = (24 + 11 * r6) / 25;
    a(4, 0) = (14 + 5 * r6) / 6;
    a(4, 1) = (-8 + 7 * r6) / 6;
    a(4, 2) = (-9 - 7 * r6) / 4;
    a(4, 3) = (9 - r6) / 4;
    Vec<double> b(5);
    b << 0, 0, (16 - r6) / 36, (16 + r6) / 36, 1.0 / 9;
    add(make_tableau("hem4", a, b, 4));
  }
  return reg;
}

const std::map<std::string, Tableau>& registry() {
  static const std::map<std::string, Tableau> reg = build_registry();
  return reg;
}

ConditionCheck check(std::string name, double value, double expected, double tol) {
  return {std::move(name), value, expected, std::abs(value - expected) <= tol};
}

}  // namespace

const Tableau& tableau(const std::string& name) {
  const auto& reg = registry();
  auto it = reg.find(name);
  if (it == reg.end()) throw DomainError("unknown integrator: " + name);
  return it->second;
}

std::vector<std::string> tableau_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

double dae_condition(const Tableau& t) {
  const int s = t.stages();
  Mat<double> shifted = Mat<double>::Zero(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) shifted(i, j) = t.row(i + 1, j);
  const Mat<double> w = shifted.triangularView<Eigen::Lower>().solve(Mat<double>::Identity(s, s));
  Vec<double> cs(s);
  for (int j = 0; j < s; ++j) cs(j) = j + 1 < s ? t.c(j + 1) : 1.0;
  return t.b.cwiseProduct(t.c).dot(w * cs.cwiseAbs2());
}

TableauReport verify_tableau(const Tableau& t, int order, double tol) {
  TableauReport r;
  r.name = t.name;
  r.order = order;
  const int s = t.stages();
  const Vec<double>& b = t.b;
  const Vec<double>& c = t.c;
  const Mat<double>& a = t.a;
  r.subdiagonal_nonzero = true;
  r.shifted_invertible = true;
  for (int i = 1; i <= s; ++i) {
    const double v = t.row(i, i - 1);
    if (i < s && v == 0) r.subdiagonal_nonzero = false;
    if (v == 0) r.shifted_invertible = false;
  }
  if (order >= 1) r.classical.push_back(check("sum b = 1", b.sum(), 1.0, tol));
  if (order >= 2) r.classical.push_back(check("sum b c = 1/2", b.dot(c), 0.5, tol));
  if (order >= 3) {
    r.classical.push_back(check("sum b c^2 = 1/3", b.dot(c.cwiseAbs2()), 1.0 / 3, tol));
    r.classical.push_back(check("sum b a c = 1/6", b.dot(a * c), 1.0 / 6, tol));
  }
  if (order >= 4) {
    r.classical.push_back(check("sum b c^3 = 1/4", b.dot(c.array().cube().matrix()), 0.25, tol));
    r.classical.push_back(check("sum b c a c = 1/8", b.cwiseProduct(c).dot(a * c), 1.0 / 8, tol));
    r.classical.push_back(check("sum b a c^2 = 1/12", b.dot(a * c.cwiseAbs2()), 1.0 / 12, tol));
    r.classical.push_back(check("sum b a a c = 1/24", b.dot(a * (a * c)), 1.0 / 24, tol));
  }
  if (order > 4) throw DomainError("order conditions implemented up to order 4");
  if (order >= 3) {
    r.has_dae_condition = true;
    if (r.shifted_invertible)
      r.dae = check("sum b_i c_i w_ij c_{j+1}^2 = 2/3", dae_condition(t), 2.0 / 3, tol);
    else
      r.dae = {"shifted tableau singular", 0, 2.0 / 3, false};
  }
  return r;
}

bool TableauReport::classical_pass() const {
  for (const auto& c : classical)
    if (!c.pass) return false;
  return true;
}

bool TableauReport::pass() const {
  return classical_pass() && subdiagonal_nonzero && (!has_dae_condition || dae.pass);
}

}  // namespace twofluid
