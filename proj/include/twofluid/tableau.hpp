#pragma once

#include <string>
#include <vector>

#include "twofluid/types.hpp"

namespace twofluid {

// Explicit Runge-Kutta tableau; a is strictly lower triangular.
struct Tableau {
  std::string name;
  Mat<double> a;
  Vec<double> b;
  Vec<double> c;
  int order = 0;  // classical order

  int stages() const { return int(b.size()); }
  // coefficient row feeding stage i; i == s gives the weights
  double row(int i, int j) const { return i < stages() ? a(i, j) : b(j); }
  void validate() const;
};

Tableau make_tableau(std::string name, Mat<double> a, Vec<double> b, int order);

// Third-order family whose members also satisfy the additional DAE condition.
Tableau rk3_family(double c2);

const Tableau& tableau(const std::string& name);
std::vector<std::string> tableau_names();

struct ConditionCheck {
  std::string name;
  double value = 0;
  double expected = 0;
  bool pass = false;
};

struct TableauReport {
  std::string name;
  int order = 0;
  std::vector<ConditionCheck> classical;
  bool has_dae_condition = false;  // only for order >= 3
  ConditionCheck dae;
  bool subdiagonal_nonzero = false;
  bool shifted_invertible = false;

  bool classical_pass() const;
  bool pass() const;
};

// Classical conditions up to `order` (at most 4) and, for order >= 3, the extra
// condition sum b_i c_i w_ij c_{j+1}^2 = 2/3 with w the inverse of the shifted
// tableau (rows a_2..a_s, then b) and c_{s+1} = 1.
TableauReport verify_tableau(const Tableau& t, int order, double tol = 1e-14);

double dae_condition(const Tableau& t);

}  // namespace twofluid
