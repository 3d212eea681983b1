#pragma once

// W states, the {|0^n>, W_n} code and depth lower bounds for approximate W preparation.

#include <string>
#include <vector>

#include "aqec/analysis.hpp"
#include "aqec/circuit.hpp"

namespace aqec {

/// (1/sqrt n) sum over weight-one basis states, 1 <= n <= 20.
StateVector build_w(int n);

/// The two-dimensional code spanned by |0^n> and W_n.
Code w_code(int n);

/// Depth max(1, n-1) nearest-neighbour staircase preparing W_n from |0^n>.
Circuit w_staircase_circuit(int n);

struct WCorrelation {
  double analytic = 0.0;  // 2k/n + 2k^2/n^2
  double numeric = 0.0;   // ||W_AB - W_A (x) W_B||_1, A and B the first and last k sites
  bool agrees = true;     // within 1e-10
};

WCorrelation w_correlation_norm(int n, int k);

/// One lower-bound argument evaluated at fixed (n, delta).
struct WBoundPath {
  std::string method;           // "lll-patch" or "correlation"
  bool valid = false;
  std::string note;             // why the path is invalid, if it is
  int parameter = 0;            // patch size m, or region size k
  double validity_lhs = 0.0;    // lll-patch: (1 - e p)^(#patches); correlation: k
  double validity_rhs = 0.0;    // lll-patch: delta^2 / 4;          correlation: n / 2
  int t_min = 0;                // smallest depth not excluded by this argument
  double condition_lhs = 0.0;   // the path's depth condition evaluated at t_min
  double condition_rhs = 0.0;
};

struct WBoundReport {
  int n = 0;
  double delta = 0.0;
  Connectivity connectivity;
  int patch_size = 0;
  double condition_lhs = 0.0;  // lll-patch condition at the reported depth
  double condition_rhs = 0.0;
  std::string selected_method;  // path chosen by connectivity and delta
  int implied_depth_bound = 0;  // every delta-approximation needs depth >= this
  std::vector<WBoundPath> paths;
};

/// Evaluates the patch local-lemma argument and the long-range-correlation argument for
/// a line or all-to-all connectivity. The patch argument is selected for delta <= 1/10 on a
/// line and delta < n^(-1/2) all-to-all, the correlation argument otherwise; an invalid
/// selection falls back to the other path. Throws std::domain_error when no path applies.
WBoundReport w_bound_report(int n, double delta, const Connectivity& conn);

}  // namespace aqec
