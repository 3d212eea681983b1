#include "aqec/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "aqec/linalg.hpp"

namespace aqec {

// ---------------------------------------------------------------- Code

void Code::validate() const {
  if (n < 1 || n > kMaxQubits) throw std::invalid_argument("code: n must lie in [1, " + std::to_string(kMaxQubits) + "]");
  if (k < 0 || k > n) throw std::invalid_argument("code: k must lie in [0, n]");
  if (basis.size() != (std::size_t{1} << k))
    throw std::invalid_argument("code: expected " + std::to_string(std::size_t{1} << k) + " basis states");
  for (const auto& s : basis)
    if (s.num_sites() != n || s.local_dim() != 2) throw std::invalid_argument("code: basis state has wrong size");
  const CMatrix b = basis_matrix();
  const CMatrix gram = b.adjoint() * b;
  if ((gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("code: basis is not orthonormal");
}

CMatrix Code::basis_matrix() const {
  if (basis.empty()) return {};
  CMatrix b(basis.front().dimension(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) b.col(static_cast<Eigen::Index>(i)) = basis[i].amplitudes();
  return b;
}

StateVector Code::state(const CVector& coeffs) const {
  if (coeffs.size() != static_cast<Eigen::Index>(basis.size()))
    throw std::invalid_argument("code: coefficient count does not match basis");
  return StateVector::normalized(basis_matrix() * coeffs);
}

// ---------------------------------------------------------------- Subsystem variance

namespace {

// Gram blocks G_ij = M_i M_j^dagger of the reshaped basis states on one region, so that
// the reduced state of sum_i a_i |i> is sum_ij a_i conj(a_j) G_ij.
struct RegionBlocks {
  Region region;
  int count = 0;
  std::vector<CMatrix> gram;
  CMatrix gamma;

  RegionBlocks(const Code& code, Region r) : region(std::move(r)), count(static_cast<int>(code.basis.size())) {
    std::vector<CMatrix> m;
    m.reserve(code.basis.size());
    for (const auto& s : code.basis) m.push_back(bipartition_matrix(s, region));
    gram.resize(static_cast<std::size_t>(count * count));
    for (int i = 0; i < count; ++i)
      for (int j = 0; j < count; ++j) gram[static_cast<std::size_t>(i * count + j)] = m[i] * m[j].adjoint();
    gamma = CMatrix::Zero(gram[0].rows(), gram[0].cols());
    for (int i = 0; i < count; ++i) gamma += gram[static_cast<std::size_t>(i * count + i)];
    gamma /= static_cast<double>(count);
  }

  double evaluate(const CVector& coeffs) const {
    const double norm = coeffs.norm();
    if (!(norm > 1e-300)) return 0.0;
    const CVector a = coeffs / norm;
    CMatrix diff = -gamma;
    for (int i = 0; i < count; ++i)
      for (int j = 0; j < count; ++j) {
        const cplx w = a(i) * std::conj(a(j));
        if (w != cplx(0.0)) diff += w * gram[static_cast<std::size_t>(i * count + j)];
      }
    return trace_norm(diff);
  }
};

std::vector<Region> combinations(int n, int d) {
  std::vector<Region> out;
  std::vector<int> idx(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.emplace_back(idx);
    int pos = d - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - d + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int j = pos + 1; j < d; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

std::vector<CVector> candidate_coefficients(int count, const VarianceSearch& search) {
  std::vector<CVector> out;
  for (int i = 0; i < count; ++i) out.push_back(CVector::Unit(count, i));
  if (search.basis_only || count == 1) return out;
  if (count == 2) {
    // (cos theta, e^{i phi} sin theta) with theta over [0, pi/2] including both ends.
    const int g = std::max(2, search.grid_points);
    for (int a = 0; a < g; ++a) {
      const double theta = (kPi / 2.0) * a / (g - 1);
      for (int b = 0; b < g; ++b) {
        const double phi = 2.0 * kPi * b / g;
        CVector v(2);
        v << std::cos(theta), std::polar(std::sin(theta), phi);
        out.push_back(v);
      }
    }
    return out;
  }
  std::mt19937_64 rng(search.seed);
  std::normal_distribution<double> gauss;
  for (int s = 0; s < search.random_samples; ++s) {
    CVector v(count);
    for (int i = 0; i < count; ++i) v(i) = cplx(gauss(rng), gauss(rng));
    out.push_back(v / v.norm());
  }
  return out;
}

template <typename F>
double golden_section_max(F&& f, double lo, double hi, int iters, double& arg) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  if (fc >= fd) {
    arg = c;
    return fc;
  }
  arg = d;
  return fd;
}

// Coordinate ascent over the real and imaginary parts of each coefficient.
double refine(const RegionBlocks& blocks, CVector& coeffs, double value, int rounds, std::uint64_t& evaluations) {
  constexpr int kGoldenIters = 40;
  for (int round = 0; round < rounds; ++round) {
    const double half_width = 0.5 / static_cast<double>(1 << round);
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
      for (int part = 0; part < 2; ++part) {
        const cplx original = coeffs(i);
        const double x0 = part == 0 ? original.real() : original.imag();
        auto f = [&](double x) {
          ++evaluations;
          CVector trial = coeffs;
          trial(i) = part == 0 ? cplx(x, original.imag()) : cplx(original.real(), x);
          return blocks.evaluate(trial);
        };
        double arg = x0;
        const double best = golden_section_max(f, x0 - half_width, x0 + half_width, kGoldenIters, arg);
        if (best > value) {
          value = best;
          coeffs(i) = part == 0 ? cplx(arg, original.imag()) : cplx(original.real(), arg);
        }
      }
    }
    coeffs /= coeffs.norm();
  }
  return value;
}

struct RegionBest {
  double value = -1.0;
  std::size_t candidate = 0;
};

}  // namespace

double variance_at(const Code& code, const Region& region, const CVector& coeffs) {
  code.validate();
  region.validate(code.n);
  if (coeffs.size() != static_cast<Eigen::Index>(code.basis.size()))
    throw std::invalid_argument("variance_at: coefficient count does not match basis");
  return RegionBlocks(code, region).evaluate(coeffs);
}

VarianceReport subsystem_variance(const Code& code, int d, const VarianceSearch& search) {
  code.validate();
  if (d < 0 || d > code.n) throw std::invalid_argument("subsystem_variance: d must lie in [0, n]");
  VarianceReport rep;
  rep.d = d;
  const int count = static_cast<int>(code.basis.size());
  rep.argmax_coeffs = CVector::Unit(count, 0);
  if (d == 0) return rep;

  const auto regions = combinations(code.n, d);
  const auto candidates = candidate_coefficients(count, search);
  std::vector<RegionBest> best(regions.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < regions.size(); r = next++) {
      const RegionBlocks blocks(code, regions[r]);
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const double v = blocks.evaluate(candidates[c]);
        if (v > best[r].value) best[r] = {v, c};
      }
    }
  };
  int threads = search.threads == 0 ? static_cast<int>(std::thread::hardware_concurrency()) : search.threads;
  threads = std::clamp(threads, 1, static_cast<int>(regions.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  rep.samples_evaluated = regions.size() * candidates.size();

  // Refine the strongest regions; stable ordering keeps ties on the lowest region index.
  std::vector<std::size_t> order(regions.size());
  for (std::size_t r = 0; r < order.size(); ++r) order[r] = r;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return best[a].value > best[b].value; });
  const std::size_t top = std::min<std::size_t>(4, order.size());
  rep.epsilon = -1.0;
  for (std::size_t i = 0; i < top; ++i) {
    const std::size_t r = order[i];
    CVector coeffs = candidates[best[r].candidate];
    double value = best[r].value;
    if (count > 1 && !search.basis_only && search.refine_iters > 0) {
      const RegionBlocks blocks(code, regions[r]);
      value = refine(blocks, coeffs, value, search.refine_iters, rep.samples_evaluated);
    }
    if (value > rep.epsilon) {
      rep.epsilon = value;
      rep.argmax_region = regions[r];
      rep.argmax_coeffs = coeffs / coeffs.norm();
    }
  }
  rep.epsilon = std::clamp(rep.epsilon, 0.0, 2.0);
  return rep;
}

// ---------------------------------------------------------------- Certificate

CertificateReport commuting_projector_certificate(const std::vector<LocalOperator>& projectors,
                                                  const std::vector<Region>& regions, const StateVector& state,
                                                  double c) {
  if (projectors.size() != regions.size())
    throw std::invalid_argument("certificate: one region per projector required");
  const int n = state.num_sites();
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    const auto& p = projectors[i];
    p.support.validate(n);
    regions[i].validate(n);
    if (!p.is_hermitian(1e-8)) throw std::invalid_argument("certificate: projector " + std::to_string(i) + " is not Hermitian");
    if ((p.matrix * p.matrix - p.matrix).cwiseAbs().maxCoeff() > 1e-8)
      throw std::invalid_argument("certificate: operator " + std::to_string(i) + " is not idempotent");
    if (!regions[i].includes(p.support))
      throw std::invalid_argument("certificate: region " + std::to_string(i) + " does not cover its projector");
  }
  for (std::size_t i = 0; i < projectors.size(); ++i)
    for (std::size_t j = i + 1; j < projectors.size(); ++j) {
      if (!projectors[i].support.intersects(projectors[j].support)) continue;
      const Region u = projectors[i].support.unite(projectors[j].support);
      const CMatrix a = embed_operator(projectors[i].matrix, projectors[i].support, u);
      const CMatrix b = embed_operator(projectors[j].matrix, projectors[j].support, u);
      if ((a * b - b * a).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("certificate: projectors " + std::to_string(i) + " and " + std::to_string(j) +
                                    " do not commute");
    }

  CertificateReport rep;
  for (const auto& p : projectors) rep.p = std::max(rep.p, std::clamp(expectation(state, p).real(), 0.0, 1.0));
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < projectors.size(); ++j)
      if (j != i && projectors[j].support.intersects(regions[i])) ++count;
    rep.K = std::max(rep.K, count);
  }
  rep.bound = lll::symmetric_bound(rep.p, rep.K, projectors.size(), c);

  CVector v = state.amplitudes();
  for (const auto& p : projectors) v -= apply_operator(p, v, n);
  rep.exact = v.squaredNorm();

  if (!rep.bound.ok())
    rep.status = CertificateStatus::inapplicable;
  else if (rep.exact >= rep.bound.value - 1e-12)
    rep.status = CertificateStatus::certified;
  else
    rep.status = CertificateStatus::contradiction;
  return rep;
}

// ---------------------------------------------------------------- Distinguishability

double distinguishability_bound(const Connectivity& conn, int t, int n, double delta) {
  if (n < 1) throw std::invalid_argument("distinguishability_bound: n must be positive");
  const double shrink = delta == 0.0 ? 0.0 : std::pow(delta, 2.0 / n);
  const double inv_f = 1.0 / static_cast<double>(lightcone_function(conn, 4 * t));
  return (2.0 / kEuler) * std::min(1.0 - shrink, inv_f);
}

DistinguishReport distinguishing_operator(const Circuit& circuit1, const StateVector& state2) {
  circuit1.validate();
  if (state2.num_sites() != circuit1.n || state2.local_dim() != 2)
    throw std::invalid_argument("distinguishing_operator: state does not match circuit size");
  const StateVector psi1 = prepare(circuit1);

  DistinguishReport rep;
  double best = -1.0;
  LocalOperator chosen;
  for (int i = 0; i < circuit1.n; ++i) {
    LocalOperator p = conjugated_parent_projector(circuit1, i);
    const double w = expectation(state2, p).real();
    if (w > best + 1e-12) {
      best = w;
      rep.site = i;
      chosen = std::move(p);
    }
  }
  const auto dim = chosen.matrix.rows();
  rep.op = LocalOperator{chosen.support, 2.0 * chosen.matrix - CMatrix::Identity(dim, dim), 2};
  rep.value = std::abs((expectation(psi1, rep.op) - expectation(state2, rep.op)).real());
  rep.t = circuit1.depth();
  rep.connectivity = circuit1.connectivity;
  rep.overlap = std::abs(state_overlap(psi1, state2));
  rep.delta = std::min(rep.overlap, 1.0);
  rep.bound = rep.delta < 1.0 ? distinguishability_bound(circuit1.connectivity, rep.t, circuit1.n, rep.delta) : 0.0;
  rep.inequality_holds = rep.value > rep.bound;
  return rep;
}

DistinguishReport verify_distinguishability(const Circuit& circuit1, const Circuit& circuit2, double delta) {
  if (!(delta >= 0.0) || delta >= 1.0) throw std::invalid_argument("verify_distinguishability: delta must lie in [0, 1)");
  circuit1.validate();
  circuit2.validate();
  if (circuit1.n != circuit2.n) throw std::invalid_argument("verify_distinguishability: circuits differ in size");
  if (!(circuit1.connectivity == circuit2.connectivity))
    throw std::invalid_argument("verify_distinguishability: circuits use different connectivity");

  const StateVector psi1 = prepare(circuit1);
  const StateVector psi2 = prepare(circuit2);
  DistinguishReport rep = distinguishing_operator(circuit1, psi2);
  DistinguishReport other = distinguishing_operator(circuit2, psi1);
  other.source = 2;
  if (other.value > rep.value) rep = std::move(other);

  rep.t = std::max(circuit1.depth(), circuit2.depth());
  rep.delta = delta;
  rep.overlap = std::abs(state_overlap(psi1, psi2));
  rep.bound = distinguishability_bound(circuit1.connectivity, rep.t, circuit1.n, delta);
  rep.precondition_ok = rep.overlap <= delta + 1e-12;
  rep.inequality_holds = rep.value > rep.bound;
  return rep;
}

// ---------------------------------------------------------------- Lower bound on eps

SvReport sv_lower_bound_check(const Code& code, const Circuit& circuit1, const Circuit& circuit2, int t, double delta,
                              const VarianceSearch& search) {
  code.validate();
  circuit1.validate();
  circuit2.validate();
  if (code.k < 1) throw std::invalid_argument("sv_lower_bound_check: code needs two orthogonal states (k >= 1)");
  if (circuit1.n != code.n || circuit2.n != code.n)
    throw std::invalid_argument("sv_lower_bound_check: circuit size does not match code");
  if (t < 0 || circuit1.depth() > t || circuit2.depth() > t)
    throw std::invalid_argument("sv_lower_bound_check: circuit depth exceeds t");
  if (!(delta >= 0.0)) throw std::invalid_argument("sv_lower_bound_check: delta must be non-negative");
  if (!(circuit1.connectivity == circuit2.connectivity))
    throw std::invalid_argument("sv_lower_bound_check: circuits use different connectivity");

  SvReport rep;
  rep.t = t;
  rep.delta = delta;
  const auto& conn = circuit1.connectivity;
  const double f4t = static_cast<double>(lightcone_function(conn, 4 * t));
  rep.region_size = static_cast<int>(std::min<std::uint64_t>(lightcone_function(conn, t), static_cast<std::uint64_t>(code.n)));
  rep.rhs = 1.0 / (kEuler * f4t) - delta;
  rep.delta_threshold = std::pow(1.0 - 1.0 / f4t, code.n / 2.0);

  // Nearest code states: normalized projections of the prepared states.
  const CMatrix b = code.basis_matrix();
  const StateVector prepared[2] = {prepare(circuit1), prepare(circuit2)};
  CVector coeffs[2];
  bool projectable = true;
  for (int j = 0; j < 2; ++j) {
    coeffs[j] = b.adjoint() * prepared[j].amplitudes();
    projectable = projectable && coeffs[j].norm() > 1e-12;
  }
  if (projectable) {
    const StateVector phi1 = code.state(coeffs[0]);
    const StateVector phi2 = code.state(coeffs[1]);
    rep.distance1 = pure_trace_distance(prepared[0], phi1);
    rep.distance2 = pure_trace_distance(prepared[1], phi2);
    rep.code_overlap = std::abs(state_overlap(phi1, phi2));
  } else {
    rep.distance1 = rep.distance2 = 2.0;
    rep.code_overlap = 1.0;
  }
  rep.preconditions_ok = projectable && rep.distance1 <= delta + 1e-10 && rep.distance2 <= delta + 1e-10 &&
                         rep.code_overlap <= 1e-8;
  rep.applicable = rep.preconditions_ok && delta <= rep.delta_threshold;

  rep.variance = subsystem_variance(code, rep.region_size, search);
  rep.margin = rep.variance.epsilon - rep.rhs;
  rep.holds = rep.variance.epsilon > rep.rhs;
  return rep;
}

// ---------------------------------------------------------------- Clifford average

namespace {

CMatrix phase_canonical(const CMatrix& u) {
  for (Eigen::Index j = 0; j < u.cols(); ++j)
    for (Eigen::Index i = 0; i < u.rows(); ++i)
      if (std::abs(u(i, j)) > 1e-9) return u * (std::abs(u(i, j)) / u(i, j));
  return u;
}

}  // namespace

std::vector<CMatrix> single_qubit_cliffords() {
  const CMatrix gens[2] = {named_gate_matrix("H"), named_gate_matrix("S")};
  std::vector<CMatrix> group{CMatrix::Identity(2, 2)};
  for (std::size_t head = 0; head < group.size(); ++head) {
    for (const auto& g : gens) {
      const CMatrix cand = phase_canonical(g * group[head]);
      const bool seen = std::any_of(group.begin(), group.end(),
                                    [&](const CMatrix& m) { return (m - cand).cwiseAbs().maxCoeff() < 1e-9; });
      if (!seen) group.push_back(cand);
    }
  }
  return group;
}

double clifford_average_overlap(int k, const StateVector& state) {
  if (k != 1) throw std::invalid_argument("clifford_average_overlap: only k = 1 is supported");
  if (state.dimension() != 2) throw std::invalid_argument("clifford_average_overlap: state must be a single qubit");
  static const std::vector<CMatrix> group = single_qubit_cliffords();
  const CVector& psi = state.amplitudes();
  double total = 0.0;
  for (const auto& u : group) total += std::norm(psi.dot(u * psi));
  return total / static_cast<double>(group.size());
}

// ---------------------------------------------------------------- Conditions

ConditionReport code_condition_report(double epsilon_ft, const Connectivity& conn, int t, int k, int n) {
  if (!std::isfinite(epsilon_ft)) throw std::invalid_argument("code_condition_report: epsilon must be finite");
  if (n < 1 || k < 0 || k > n) throw std::invalid_argument("code_condition_report: need 0 <= k <= n, n >= 1");
  ConditionReport rep;
  rep.epsilon = epsilon_ft;
  const double inv_f = 1.0 / static_cast<double>(lightcone_function(conn, 4 * t));
  rep.universal_rhs = inv_f / kEuler;
  rep.clifford_rhs = std::min(1.0 - std::pow(2.0, -static_cast<double>(k) / n), inv_f) / kEuler;
  rep.universal_holds = epsilon_ft <= rep.universal_rhs;
  rep.clifford_holds = epsilon_ft <= rep.clifford_rhs;
  std::ostringstream msg;
  if (rep.universal_holds || rep.clifford_holds) {
    msg << "every code state has circuit complexity > " << t << " (";
    if (rep.universal_holds) msg << "transversal universal";
    if (rep.universal_holds && rep.clifford_holds) msg << ", ";
    if (rep.clifford_holds) msg << "transversal Clifford";
    msg << " condition)";
  } else {
    msg << "no complexity statement: both conditions fail";
  }
  rep.statement = msg.str();
  return rep;
}

double u1_filling_bound(double delta_tl, const std::vector<double>& delta_ti, int n) {
  if (n < 1) throw std::invalid_argument("u1_filling_bound: n must be positive");
  if (!(delta_tl >= 0.0)) throw std::invalid_argument("u1_filling_bound: logical range must be non-negative");
  if (delta_ti.empty()) throw std::invalid_argument("u1_filling_bound: no local charge ranges");
  const double max_ti = *std::max_element(delta_ti.begin(), delta_ti.end());
  if (!(max_ti > 0.0)) throw std::invalid_argument("u1_filling_bound: local charge ranges are all zero");
  return delta_tl / (static_cast<double>(n) * max_ti);
}

}  // namespace aqec
