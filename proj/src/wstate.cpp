#include "aqec/wstate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aqec/linalg.hpp"

namespace aqec {

namespace {

constexpr int kMaxDepthScan = 4096;

// |10> -> cos|10> + sin|01>, |01> -> -sin|10> + cos|01>, identity on |00>, |11>.
CMatrix hop(double cos_theta) {
  const double c = cos_theta;
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  CMatrix g = CMatrix::Identity(4, 4);
  g(2, 2) = c;
  g(1, 2) = s;
  g(2, 1) = -s;
  g(1, 1) = c;
  return g;
}

bool is_line(const Connectivity& conn) {
  return conn.kind == Connectivity::Kind::lattice && conn.dimension() == 1;
}

}  // namespace

StateVector build_w(int n) {
  if (n < 1 || n > kMaxQubits) throw std::invalid_argument("build_w: n must lie in [1, 20]");
  CVector v = CVector::Zero(Eigen::Index{1} << n);
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  for (int q = 0; q < n; ++q) v(Eigen::Index{1} << (n - 1 - q)) = a;
  return StateVector::from_amplitudes(std::move(v));
}

Code w_code(int n) {
  Code c{n, 1, {StateVector::zero(n), build_w(n)}};
  c.validate();
  return c;
}

Circuit w_staircase_circuit(int n) {
  if (n < 1 || n > kMaxQubits) throw std::invalid_argument("w_staircase_circuit: n must lie in [1, 20]");
  Circuit c{n, Connectivity::chain(n), {}};
  if (n == 1) {
    c.layers.push_back({Gate::named("X", {0})});
    return c;
  }
  const CMatrix flip = kron(named_gate_matrix("X"), named_gate_matrix("I"));
  for (int i = 0; i + 1 < n; ++i) {
    CMatrix g = hop(std::sqrt(1.0 / static_cast<double>(n - i)));
    if (i == 0) g = g * flip;
    c.layers.push_back({Gate::unitary(g, {i, i + 1})});
  }
  return c;
}

WCorrelation w_correlation_norm(int n, int k) {
  if (n < 1 || n > 16) throw std::invalid_argument("w_correlation_norm: n must lie in [1, 16]");
  if (k < 0 || 2 * k > n) throw std::invalid_argument("w_correlation_norm: need 0 <= k <= n/2");
  WCorrelation r;
  if (k == 0) return r;
  const double x = static_cast<double>(k) / n;
  r.analytic = 2.0 * x + 2.0 * x * x;

  const StateVector w = build_w(n);
  const Region a = Region::range(0, k);
  const Region b = Region::range(n - k, n);
  const SparseDensity w_ab = reduced_density_active(w, a.unite(b));
  const SparseDensity w_a = reduced_density_active(w, a);
  const SparseDensity w_b = reduced_density_active(w, b);
  r.numeric = trace_norm_difference(w_ab, kron(w_a, w_b, std::uint64_t{1} << k));
  r.agrees = std::abs(r.analytic - r.numeric) <= 1e-10;
  return r;
}

WBoundReport w_bound_report(int n, double delta, const Connectivity& conn) {
  if (n < 2 || n > 1 << 20) throw std::invalid_argument("w_bound_report: n must lie in [2, 2^20]");
  if (!(delta >= 0.0) || delta >= 2.0) throw std::invalid_argument("w_bound_report: delta must lie in [0, 2)");
  const bool line = is_line(conn);
  if (!line && conn.kind != Connectivity::Kind::all_to_all)
    throw std::invalid_argument("w_bound_report: only line and all-to-all connectivity are supported");

  WBoundReport rep;
  rep.n = n;
  rep.delta = delta;
  rep.connectivity = conn;
  const double nd = static_cast<double>(n);

  // Patch argument: patches of size m (the last absorbs n mod m); p bounds <psi|P_i|psi>
  // for the largest patch. A depth is excluded while the local-lemma condition holds.
  {
    WBoundPath path;
    path.method = "lll-patch";
    const int m = std::clamp(static_cast<int>(std::lround(delta * nd)), 1, n);
    const int patches = n / m;
    const int largest = m + n % m;
    const double p = delta / 2.0 + static_cast<double>(largest) / nd;
    path.parameter = m;
    path.validity_lhs = kEuler * p < 1.0 ? std::pow(1.0 - kEuler * p, patches) : 0.0;
    path.validity_rhs = delta * delta / 4.0;
    path.valid = kEuler * p < 1.0 && path.validity_lhs >= path.validity_rhs;
    if (!path.valid) path.note = "local-lemma bound does not exceed delta^2/4";
    auto neighbours = [&](int t) {
      if (line) return (static_cast<double>(m) + 4.0 * t) / m + 2.0;
      return static_cast<double>(m) * std::ldexp(1.0, 2 * t);
    };
    int t = 0;
    while (t < kMaxDepthScan && neighbours(t) * p <= 1.0 / kEuler) ++t;
    path.t_min = path.valid ? t : 0;
    path.condition_lhs = neighbours(t) * p;
    path.condition_rhs = 1.0 / kEuler;
    rep.patch_size = m;
    rep.condition_lhs = path.condition_lhs;
    rep.condition_rhs = path.condition_rhs;
    rep.paths.push_back(path);
  }

  // Correlation argument: regions of size k = ceil(3 delta n / 2) at the two ends stay
  // correlated, which a depth-t circuit cannot reproduce once they are out of each
  // other's light cone.
  {
    WBoundPath path;
    path.method = "correlation";
    const int k = std::max(1, static_cast<int>(std::ceil(1.5 * delta * nd - 1e-12)));
    path.parameter = k;
    path.validity_lhs = k;
    path.validity_rhs = nd / 2.0;
    path.valid = delta < 1.0 / 3.0 && 2 * k <= n;
    if (!path.valid) path.note = delta >= 1.0 / 3.0 ? "delta >= 1/3" : "k exceeds n/2";
    auto reach = [&](int t) {
      if (line) return static_cast<double>(k) + 2.0 * t;
      return (std::ldexp(1.0, 2 * t) + 1.0) * k;
    };
    const double target = line ? nd / 2.0 : nd;
    int t = 0;
    while (t < kMaxDepthScan && !(reach(t) > target)) ++t;
    path.t_min = path.valid ? t : 0;
    path.condition_lhs = reach(t);
    path.condition_rhs = target;
    rep.paths.push_back(path);
  }

  const bool prefer_patch = line ? delta <= 0.1 : delta < 1.0 / std::sqrt(nd);
  const WBoundPath* chosen = &rep.paths[prefer_patch ? 0 : 1];
  if (!chosen->valid) chosen = &rep.paths[prefer_patch ? 1 : 0];
  if (!chosen->valid) throw std::domain_error("w_bound_report: delta is outside the validity range of every argument");
  rep.selected_method = chosen->method;
  // Depth 0 prepares |0^n>, at trace distance 2 from W_n.
  rep.implied_depth_bound = std::max(1, chosen->t_min);
  return rep;
}

}  // namespace aqec
