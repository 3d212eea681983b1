#include "aqec/mps.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "aqec/linalg.hpp"

namespace aqec {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

CVector vec(const CMatrix& x) {
  CVector v(x.size());
  for (Eigen::Index a = 0; a < x.rows(); ++a)
    for (Eigen::Index b = 0; b < x.cols(); ++b) v(a * x.cols() + b) = x(a, b);
  return v;
}

CMatrix unvec(const CVector& v, Eigen::Index dim) {
  CMatrix x(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < dim; ++b) x(a, b) = v(a * dim + b);
  return x;
}

// Fixed point of a superoperator matrix as the right singular vector of (M - 1) with the
// smallest singular value, returned as a Hermitian matrix of unit trace when possible.
CMatrix fixed_point(const CMatrix& m, Eigen::Index dim) {
  const CMatrix shifted = m - CMatrix::Identity(m.rows(), m.cols());
  Eigen::JacobiSVD<CMatrix> svd(shifted, Eigen::ComputeFullV);
  CMatrix x = unvec(svd.matrixV().col(svd.matrixV().cols() - 1), dim);
  cplx tr = x.trace();
  if (std::abs(tr) < 1e-12) {
    Eigen::Index i = 0;
    x.diagonal().cwiseAbs().maxCoeff(&i);
    tr = x(i, i);
  }
  if (std::abs(tr) > 0) x *= std::abs(tr) / tr;
  x = (x + x.adjoint()).eval() * 0.5;
  const double t = x.trace().real();
  if (std::abs(t) > 1e-300) x /= t;
  return x;
}

bool positive_definite(const CMatrix& x, double tol) {
  const RVector ev = hermitian_eigenvalues(x);
  return ev.minCoeff() > tol * std::max(1.0, ev.cwiseAbs().maxCoeff());
}

int sites_of(const CMatrix& op, int phys_dim) {
  if (op.rows() != op.cols()) throw std::invalid_argument("operator is not square");
  int sites = 0;
  Eigen::Index dim = 1;
  while (dim < op.rows()) {
    dim *= phys_dim;
    ++sites;
  }
  if (dim != op.rows() || sites == 0) throw std::invalid_argument("operator dimension is not a power of phys_dim");
  return sites;
}

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  if (a > kTwoPi - 1e-12) a = 0.0;
  return a;
}

double circular_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return std::min(d, kTwoPi - d);
}

CMatrix site_phase(const CMatrix& q, double scale) {
  const auto eig = jacobi_eigen(q);
  CVector phases(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::polar(1.0, scale * eig.eigenvalues(i));
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

// Restricts the bond to the supports of the right and left fixed points. Each support is
// invariant under every A_s (respectively A_s^dagger), so the infinite-chain state is kept;
// the discarded block only feeds subleading terms of finite rings.
MPSTensor reduce_bond(MPSTensor a) {
  for (bool changed = true; changed && a.bond_dim > 1;) {
    changed = false;
    const CMatrix e = transfer_matrix(a);
    Eigen::ComplexEigenSolver<CMatrix> solver(e, false);
    CVector ev = solver.eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size(), [](cplx x, cplx y) { return std::abs(x) > std::abs(y); });
    const double radius = std::abs(ev(0));
    if (!(radius > 1e-300) || std::abs(ev(1)) / radius >= 1.0 - 1e-9) return a;
    const CMatrix es = e / radius;
    for (const CMatrix& side : {es, CMatrix(es.adjoint())}) {
      const auto eig = jacobi_eigen(fixed_point(side, a.bond_dim));
      const double top = eig.eigenvalues.cwiseAbs().maxCoeff();
      std::vector<Eigen::Index> keep;
      for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
        if (eig.eigenvalues(i) > 1e-10 * top) keep.push_back(i);
      if (static_cast<int>(keep.size()) == a.bond_dim) continue;
      CMatrix v(a.bond_dim, static_cast<Eigen::Index>(keep.size()));
      for (std::size_t j = 0; j < keep.size(); ++j) v.col(static_cast<Eigen::Index>(j)) = eig.eigenvectors.col(keep[j]);
      for (auto& m : a.matrices) m = (v.adjoint() * m * v).eval();
      a.bond_dim = static_cast<int>(keep.size());
      changed = true;
      break;
    }
  }
  return a;
}

}  // namespace

// ---------------------------------------------------------------- Tensors

void MPSTensor::validate() const {
  if (phys_dim < 1 || bond_dim < 1) throw std::invalid_argument("MPSTensor: dimensions must be positive");
  if (matrices.size() != static_cast<std::size_t>(phys_dim))
    throw std::invalid_argument("MPSTensor: expected one matrix per physical state");
  for (const auto& m : matrices) {
    if (m.rows() != bond_dim || m.cols() != bond_dim) throw std::invalid_argument("MPSTensor: matrix has wrong size");
    if (!m.allFinite()) throw std::invalid_argument("MPSTensor: non-finite entry");
  }
}

CMatrix transfer_matrix(const MPSTensor& a) {
  a.validate();
  const Eigen::Index d2 = static_cast<Eigen::Index>(a.bond_dim) * a.bond_dim;
  CMatrix e = CMatrix::Zero(d2, d2);
  for (const auto& m : a.matrices) e += kron(m, m.conjugate());
  return e;
}

CMatrix transfer_matrix(const MPSTensor& a, const CMatrix& op, int sites) {
  a.validate();
  if (sites < 1) throw std::invalid_argument("transfer_matrix: operator must span at least one site");
  Eigen::Index dim = 1;
  for (int i = 0; i < sites; ++i) dim *= a.phys_dim;
  if (op.rows() != dim || op.cols() != dim)
    throw std::invalid_argument("transfer_matrix: operator dimension does not match phys_dim^sites");

  // Products A_s over the spanned sites, first site most significant.
  std::vector<CMatrix> prod(static_cast<std::size_t>(dim));
  for (Eigen::Index s = 0; s < dim; ++s) {
    CMatrix p = CMatrix::Identity(a.bond_dim, a.bond_dim);
    Eigen::Index rest = s;
    std::vector<int> digits(static_cast<std::size_t>(sites));
    for (int k = sites - 1; k >= 0; --k) {
      digits[static_cast<std::size_t>(k)] = static_cast<int>(rest % a.phys_dim);
      rest /= a.phys_dim;
    }
    for (int dgt : digits) p = p * a.matrices[static_cast<std::size_t>(dgt)];
    prod[static_cast<std::size_t>(s)] = p;
  }
  // E_O = sum_s A_s (x) conj(B_s) with B_s = sum_{s'} conj(O_{s's}) A_{s'}.
  const Eigen::Index d2 = static_cast<Eigen::Index>(a.bond_dim) * a.bond_dim;
  CMatrix e = CMatrix::Zero(d2, d2);
  for (Eigen::Index s = 0; s < dim; ++s) {
    CMatrix b = CMatrix::Zero(a.bond_dim, a.bond_dim);
    for (Eigen::Index sp = 0; sp < dim; ++sp)
      if (op(sp, s) != cplx(0.0)) b += std::conj(op(sp, s)) * prod[static_cast<std::size_t>(sp)];
    e += kron(prod[static_cast<std::size_t>(s)], b.conjugate());
  }
  return e;
}

// ---------------------------------------------------------------- Canonical form

CanonicalForm canonicalize(const MPSTensor& a, double tol) {
  const CMatrix e = transfer_matrix(a);
  const Eigen::Index dim = a.bond_dim;

  Eigen::ComplexEigenSolver<CMatrix> solver(e, false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("canonicalize: eigenvalue computation failed");
  CVector ev = solver.eigenvalues();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return std::abs(ev(x)) > std::abs(ev(y)); });

  CanonicalForm out;
  out.spectral_radius = std::abs(ev(order[0]));
  if (!(out.spectral_radius > 1e-300)) throw std::domain_error("canonicalize: transfer matrix has zero spectral radius");
  out.spectrum.resize(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) out.spectrum(i) = ev(order[static_cast<std::size_t>(i)]) / out.spectral_radius;
  out.lambda2 = ev.size() > 1 ? std::abs(out.spectrum(1)) : 0.0;

  MPSTensor scaled = a;
  for (auto& m : scaled.matrices) m /= std::sqrt(out.spectral_radius);
  const CMatrix es = e / out.spectral_radius;

  const CMatrix x = fixed_point(es, dim);
  const bool gap = out.lambda2 < 1.0 - 1e-9;
  const bool right_pd = positive_definite(x, 1e-12);
  out.tensor = scaled;
  if (right_pd) {
    const Eigen::LLT<CMatrix> llt(x);
    const CMatrix l = llt.matrixL();
    const CMatrix l_inv = l.inverse();
    for (auto& m : out.tensor.matrices) m = l_inv * m * l;
  } else if (gap) {
    throw std::domain_error("canonicalize: right fixed point is singular; gauge transform undefined");
  }

  const CMatrix ec = transfer_matrix(out.tensor);
  out.rho = fixed_point(ec.adjoint(), dim);
  const CMatrix id = CMatrix::Identity(dim, dim);
  out.right_residual = (unvec(ec * vec(id), dim) - id).cwiseAbs().maxCoeff();
  out.left_residual = (unvec(ec.adjoint() * vec(out.rho), dim) - out.rho).cwiseAbs().maxCoeff();
  out.is_normal = gap && right_pd && positive_definite(out.rho, tol);
  return out;
}

cplx imps_expectation(const CanonicalForm& form, const CMatrix& op, int sites) {
  const Eigen::Index dim = form.tensor.bond_dim;
  const CVector one = vec(CMatrix::Identity(dim, dim));
  return vec(form.rho).dot(transfer_matrix(form.tensor, op, sites) * one);
}

cplx imps_two_point(const CanonicalForm& form, const CMatrix& p, int p_sites, const CMatrix& q, int q_sites, int gap) {
  if (gap < 0) throw std::invalid_argument("imps_two_point: negative gap");
  const Eigen::Index dim = form.tensor.bond_dim;
  const CMatrix e = transfer_matrix(form.tensor);
  CVector v = transfer_matrix(form.tensor, q, q_sites) * vec(CMatrix::Identity(dim, dim));
  for (int s = 0; s < gap; ++s) v = e * v;
  v = transfer_matrix(form.tensor, p, p_sites) * v;
  return vec(form.rho).dot(v);
}

// ---------------------------------------------------------------- Clustering

ClusteringResult clustering_constant(const CanonicalForm& form, const CMatrix& p, const CMatrix& q,
                                     std::optional<double> lambda) {
  if (!form.is_normal) throw std::domain_error("clustering_constant: tensor is not normal");
  const int chi = form.tensor.phys_dim;
  const int p_sites = sites_of(p, chi);
  const int q_sites = sites_of(q, chi);
  for (const CMatrix* m : {&p, &q}) {
    if (!is_hermitian(*m, 1e-10) || hermitian_eigenvalues(*m).minCoeff() < -1e-10)
      throw std::invalid_argument("clustering_constant: observables must be positive semidefinite");
  }

  ClusteringResult res;
  res.lambda = lambda.value_or(0.5 * (form.lambda2 + 1.0));
  if (!(res.lambda > form.lambda2 && res.lambda < 1.0))
    throw std::invalid_argument("clustering_constant: lambda must lie in (lambda2, 1)");

  const Eigen::Index dim = form.tensor.bond_dim;
  const CMatrix e = transfer_matrix(form.tensor);
  const CMatrix e_inf = vec(CMatrix::Identity(dim, dim)) * vec(form.rho).adjoint();

  // Scan until lambda^s is at the numerical floor; ell follows the last violation.
  int last_violation = 0;
  CMatrix power = e;
  for (int s = 1; s <= 10000 && std::pow(res.lambda, s) >= 1e-12; ++s) {
    if (operator_norm(CMatrix(power - e_inf)) > std::pow(res.lambda, s)) last_violation = s;
    power = power * e;
  }
  res.ell = last_violation + 1;
  const double rho_min = hermitian_eigenvalues(form.rho).minCoeff();
  res.c = 1.0 + std::pow(res.lambda, res.ell) / rho_min;

  const double ep = imps_expectation(form, p, p_sites).real();
  const double eq = imps_expectation(form, q, q_sites).real();
  for (int gap = res.ell; gap <= res.ell + 8; ++gap) {
    ClusteringCheck chk;
    chk.gap = gap;
    chk.pq = imps_two_point(form, p, p_sites, q, q_sites, gap).real();
    chk.p_times_q = ep * eq;
    chk.holds = chk.pq <= res.c * chk.p_times_q + 1e-10;
    res.all_hold = res.all_hold && chk.holds;
    res.verified_pairs.push_back(chk);
  }
  return res;
}

// ---------------------------------------------------------------- Rings and momentum

StateVector ring_truncation(const MPSTensor& a, int length) {
  a.validate();
  if (length < 1) throw std::invalid_argument("ring_truncation: length must be positive");
  Eigen::Index total = 1;
  for (int i = 0; i < length; ++i) {
    total *= a.phys_dim;
    if (total > (Eigen::Index{1} << kMaxQubits)) throw std::invalid_argument("ring_truncation: state too large");
  }
  CVector amps(total);
  // Depth-first over prefixes so shared prefixes are multiplied once.
  std::vector<CMatrix> prefix(static_cast<std::size_t>(length) + 1);
  prefix[0] = CMatrix::Identity(a.bond_dim, a.bond_dim);
  std::function<void(int, Eigen::Index)> descend = [&](int site, Eigen::Index index) {
    if (site == length) {
      amps(index) = prefix[static_cast<std::size_t>(site)].trace();
      return;
    }
    for (int s = 0; s < a.phys_dim; ++s) {
      prefix[static_cast<std::size_t>(site) + 1] = prefix[static_cast<std::size_t>(site)] * a.matrices[static_cast<std::size_t>(s)];
      descend(site + 1, index * a.phys_dim + s);
    }
  };
  descend(0, 0);
  if (!(amps.norm() > 1e-300)) throw std::domain_error("ring_truncation: ring state has zero norm");
  return StateVector::normalized(std::move(amps), a.phys_dim);
}

StateVector translate(const StateVector& state) {
  const int d = state.local_dim();
  const Eigen::Index total = state.dimension();
  const Eigen::Index head = total / d;  // weight of site 0
  CVector out(total);
  for (Eigen::Index idx = 0; idx < total; ++idx) out(idx) = state[(idx % head) * d + idx / head];
  return StateVector::from_amplitudes(std::move(out), d);
}

double momentum_phase(const StateVector& state, int length) {
  if (state.num_sites() != length) throw std::invalid_argument("momentum_phase: state is not defined on L sites");
  const StateVector shifted = translate(state);
  const cplx z = state_overlap(state, shifted);
  if (std::abs(z) < 1e-12) throw std::domain_error("momentum_phase: state is not translation invariant");
  const cplx phase = z / std::abs(z);
  const double residual = (shifted.amplitudes() - phase * state.amplitudes()).norm();
  if (residual > 1e-8) throw std::domain_error("momentum_phase: state is not translation invariant");
  return wrap_angle(std::arg(phase));
}

ChargeAssignment ChargeAssignment::default_for(int length) {
  CMatrix q = CMatrix::Zero(2, 2);
  q(1, 1) = 1.0;
  return {q, length};
}

void ChargeAssignment::validate(int local_dim) const {
  if (length < 1) throw std::invalid_argument("charges: length must be positive");
  if (q.rows() != local_dim || q.cols() != local_dim) throw std::invalid_argument("charges: dimension mismatch");
  if (!is_hermitian(q, 1e-10)) throw std::invalid_argument("charges: charge is not Hermitian");
  for (double v : hermitian_eigenvalues(q))
    if (std::abs(v - std::round(v)) > 1e-8) throw std::invalid_argument("charges: eigenvalues must be integers");
}

StateVector large_gauge_transform(const StateVector& state, const ChargeAssignment& charges) {
  charges.validate(state.local_dim());
  if (state.num_sites() != charges.length) throw std::invalid_argument("large_gauge_transform: length mismatch");
  CVector amps = state.amplitudes();
  const int l = charges.length;
  for (int x = 0; x < l; ++x) {
    const std::vector<int> site{x};
    apply_on_sites(site_phase(charges.q, kTwoPi * x / l), site, amps, l, state.local_dim());
  }
  return StateVector::normalized(std::move(amps), state.local_dim());
}

LsmReport lsm_report(const StateVector& state, const ChargeAssignment& charges, std::optional<int> t,
                     std::optional<double> delta) {
  charges.validate(state.local_dim());
  const int l = charges.length;
  if (state.num_sites() != l) throw std::invalid_argument("lsm_report: length mismatch");
  LsmReport rep;
  rep.momentum = momentum_phase(state, l);

  // e^{i alpha} from exp(2 pi i Q / L) acting on the state.
  CVector twisted = state.amplitudes();
  const CMatrix unit = site_phase(charges.q, kTwoPi / l);
  for (int x = 0; x < l; ++x) apply_on_sites(unit, std::vector<int>{x}, twisted, l, state.local_dim());
  const cplx z = state.amplitudes().dot(twisted);
  if ((twisted - z * state.amplitudes()).norm() > 1e-8)
    throw std::domain_error("lsm_report: state is not an eigenstate of exp(2 pi i Q / L)");
  rep.alpha = wrap_angle(std::arg(z));
  rep.applicable = rep.alpha > 1e-10;
  rep.charge_norm = hermitian_operator_norm(charges.q);
  if (circular_distance(rep.momentum, 0.0) > 1e-8) rep.depth_threshold = l / 4.0;
  if (!rep.applicable) {
    rep.note = "commensurate filling (alpha = 0): theorem inapplicable";
    return rep;
  }

  const StateVector moved = large_gauge_transform(state, charges);
  rep.transformed_momentum = momentum_phase(moved, l);
  rep.momentum_shift = wrap_angle(rep.transformed_momentum - rep.momentum);
  rep.shift_matches = circular_distance(rep.momentum_shift, wrap_angle(-rep.alpha)) <= 1e-8;
  if (circular_distance(rep.transformed_momentum, 0.0) > 1e-8) rep.transformed_depth_threshold = l / 4.0;
  rep.overlap = std::abs(state_overlap(state, moved));
  rep.overlap_vanishes = rep.overlap <= 1e-10;
  for (int s = 1; s <= l / 2; ++s) {
    const Region region = Region::range(0, s);
    rep.indistinguishability.emplace_back(
        s, trace_norm(CMatrix(reduced_density_matrix(state, region) - reduced_density_matrix(moved, region))));
  }

  if (t || delta) {
    if (!t || !delta) throw std::invalid_argument("lsm_report: t and delta must be supplied together");
    if (*t < 1) throw std::invalid_argument("lsm_report: t must be positive");
    if (!(*delta >= 0.0)) throw std::invalid_argument("lsm_report: delta must be non-negative");
    rep.t = t;
    rep.delta = delta;
    const double td = *t;
    const double ratio = 9.0 * kPi * td * td * rep.charge_norm / (2.0 * l);
    const double base = 1.0 - kEuler * *delta - kEuler * ratio * ratio;
    LsmCondition c1;
    c1.lhs = *delta;
    c1.rhs = base > 0.0 ? std::pow(base, l / td) : 0.0;
    c1.holds = c1.lhs > c1.rhs;
    rep.cond1 = c1;
    LsmCondition c2;
    const double inner = 2.0 / (9.0 * kPi * rep.charge_norm) * (1.0 / (7.0 * kEuler) - *delta);
    c2.lhs = td;
    c2.rhs = inner > 0.0 ? std::sqrt(l * inner) : 0.0;
    c2.holds = c2.lhs >= c2.rhs;
    rep.cond2 = c2;
  }
  return rep;
}

// ---------------------------------------------------------------- Circuits to iMPS

void UnitCell::validate() const {
  if (cell_size < 1 || cell_size > 10) throw std::invalid_argument("unit cell: cell_size must lie in [1, 10]");
  const int s = cell_size;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    std::vector<char> used(static_cast<std::size_t>(s), 0);
    for (const auto& g : layers[l]) {
      const std::string where = "unit cell layer " + std::to_string(l) + ": ";
      if (g.qubits.empty() || g.qubits.size() > 2) throw std::invalid_argument(where + "gate arity must be 1 or 2");
      const Eigen::Index dim = Eigen::Index{1} << g.qubits.size();
      if (g.matrix.rows() != dim || g.matrix.cols() != dim || !is_unitary(g.matrix, 1e-10))
        throw std::invalid_argument(where + "gate matrix is not a unitary of matching size");
      int lowest = 2 * s;
      for (int q : g.qubits) {
        if (q < 0 || q >= 2 * s) throw std::invalid_argument(where + "qubit index outside [0, 2 cell_size)");
        lowest = std::min(lowest, q);
        if (used[static_cast<std::size_t>(q % s)]) throw std::invalid_argument(where + "gates overlap once tiled");
        used[static_cast<std::size_t>(q % s)] = 1;
      }
      if (lowest >= s) throw std::invalid_argument(where + "gate lies entirely in the next cell");
      if (g.qubits.size() == 2 && std::abs(g.qubits[0] - g.qubits[1]) != 1)
        throw std::invalid_argument(where + "two-qubit gates must act on neighbouring sites");
    }
  }
}

MPSTensor circuit_to_imps(const UnitCell& cell) {
  cell.validate();
  if (static_cast<int>(cell.layers.size()) > kMaxImpsDepth)
    throw std::invalid_argument("circuit_to_imps: depth exceeds the guard of " + std::to_string(kMaxImpsDepth));
  const int s = cell.cell_size;
  const Eigen::Index phys = Eigen::Index{1} << s;
  const Region whole = Region::range(0, s);
  const CMatrix swap = named_gate_matrix("SWAP");

  MPSTensor a{static_cast<int>(phys), 1, std::vector<CMatrix>(static_cast<std::size_t>(phys), CMatrix::Zero(1, 1))};
  a.matrices[0](0, 0) = 1.0;

  for (const auto& layer : cell.layers) {
    CMatrix inner = CMatrix::Identity(phys, phys);
    struct Straddler {
      int here;   // qubit in this cell
      int there;  // qubit in the next cell, as a local index
      std::vector<CMatrix> left, right;
    };
    std::vector<Straddler> straddlers;
    for (const auto& g : layer) {
      const bool crosses = g.qubits.size() == 2 && (g.qubits[0] >= s) != (g.qubits[1] >= s);
      if (!crosses) {
        std::vector<int> local(g.qubits.begin(), g.qubits.end());
        const Region r(local);
        CMatrix m = g.matrix;
        if (local.size() == 2 && local[0] > local[1]) m = swap * m * swap;
        inner = embed_operator(m, r, whole) * inner;
        continue;
      }
      CMatrix m = g.matrix;
      int here = g.qubits[0], there = g.qubits[1];
      if (here >= s) {
        std::swap(here, there);
        m = swap * m * swap;
      }
      // Operator-Schmidt split m = sum_k L_k (x) R_k.
      CMatrix reshaped(4, 4);
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          for (int xp = 0; xp < 2; ++xp)
            for (int yp = 0; yp < 2; ++yp) reshaped(x * 2 + xp, y * 2 + yp) = m(x * 2 + y, xp * 2 + yp);
      Eigen::JacobiSVD<CMatrix> svd(reshaped, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Straddler st{here, there - s, {}, {}};
      for (int k = 0; k < 4; ++k) {
        const double sv = svd.singularValues()(k);
        if (sv <= 1e-12) continue;
        CMatrix lk(2, 2), rk(2, 2);
        for (int x = 0; x < 2; ++x)
          for (int xp = 0; xp < 2; ++xp) {
            lk(x, xp) = std::sqrt(sv) * svd.matrixU()(x * 2 + xp, k);
            rk(x, xp) = std::sqrt(sv) * std::conj(svd.matrixV()(x * 2 + xp, k));
          }
        st.left.push_back(embed_operator(lk, Region{st.here}, whole));
        st.right.push_back(embed_operator(rk, Region{st.there}, whole));
      }
      straddlers.push_back(std::move(st));
    }

    // MPO bond: one Schmidt index per straddling gate for the incoming (R) and outgoing (L) side.
    Eigen::Index k_dim = 1;
    for (const auto& st : straddlers) k_dim *= static_cast<Eigen::Index>(st.left.size());
    const Eigen::Index d_old = a.bond_dim;
    const Eigen::Index d_new = k_dim * d_old;
    if (d_new > (Eigen::Index{1} << (2 * kMaxImpsDepth)))
      throw std::invalid_argument("circuit_to_imps: bond dimension exceeds the guard");
    MPSTensor next{a.phys_dim, static_cast<int>(d_new),
                   std::vector<CMatrix>(static_cast<std::size_t>(phys), CMatrix::Zero(d_new, d_new))};
    auto digits = [&](Eigen::Index k) {
      std::vector<std::size_t> out(straddlers.size());
      for (std::size_t j = straddlers.size(); j-- > 0;) {
        out[j] = static_cast<std::size_t>(k % static_cast<Eigen::Index>(straddlers[j].left.size()));
        k /= static_cast<Eigen::Index>(straddlers[j].left.size());
      }
      return out;
    };
    for (Eigen::Index kin = 0; kin < k_dim; ++kin) {
      const auto din = digits(kin);
      for (Eigen::Index kout = 0; kout < k_dim; ++kout) {
        const auto dout = digits(kout);
        CMatrix w = inner;
        for (std::size_t j = 0; j < straddlers.size(); ++j)
          w = straddlers[j].right[din[j]] * straddlers[j].left[dout[j]] * w;
        for (Eigen::Index sp = 0; sp < phys; ++sp)
          for (Eigen::Index sidx = 0; sidx < phys; ++sidx) {
            if (w(sp, sidx) == cplx(0.0)) continue;
            next.matrices[static_cast<std::size_t>(sp)].block(kin * d_old, kout * d_old, d_old, d_old) +=
                w(sp, sidx) * a.matrices[static_cast<std::size_t>(sidx)];
          }
      }
    }
    a = std::move(next);
  }
  return reduce_bond(std::move(a));
}

Circuit tile_on_ring(const UnitCell& cell, int cells) {
  cell.validate();
  const int n = cell.cell_size * cells;
  if (cells < 2 || n < 3) throw std::invalid_argument("tile_on_ring: need at least two cells and three sites");
  Circuit c{n, Connectivity::chain(n, true), {}};
  for (const auto& layer : cell.layers) {
    Layer tiled;
    for (int k = 0; k < cells; ++k)
      for (const auto& g : layer) {
        std::vector<int> qubits;
        for (int q : g.qubits) qubits.push_back((k * cell.cell_size + q) % n);
        tiled.push_back(Gate{g.name, qubits, g.matrix});
      }
    c.layers.push_back(std::move(tiled));
  }
  c.validate();
  return c;
}

}  // namespace aqec
