#include "aqec/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace aqec {

namespace {

std::uint64_t ipow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base)
      throw std::overflow_error("integer power overflows 64 bits");
    r *= base;
  }
  return r;
}

void check_dimension(std::uint64_t dim) {
  if (dim > (std::uint64_t{1} << kMaxQubits))
    throw std::invalid_argument("state dimension exceeds 2^" + std::to_string(kMaxQubits));
}

// Strides of each site in a full index over n sites of dimension d.
std::vector<std::uint64_t> site_strides(int n, int d) {
  std::vector<std::uint64_t> s(static_cast<std::size_t>(n));
  std::uint64_t stride = 1;
  for (int q = n - 1; q >= 0; --q) {
    s[static_cast<std::size_t>(q)] = stride;
    stride *= static_cast<std::uint64_t>(d);
  }
  return s;
}

// Index of the digits at `sites` (first site most significant).
std::uint64_t sub_index(std::uint64_t idx, std::span<const int> sites, const std::vector<std::uint64_t>& strides,
                        int d) {
  std::uint64_t r = 0;
  for (int s : sites) r = r * static_cast<std::uint64_t>(d) + (idx / strides[static_cast<std::size_t>(s)]) % d;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- Region

Region::Region(std::initializer_list<int> sites) : Region(std::vector<int>(sites)) {}

Region::Region(std::vector<int> sites) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  if (!sites_.empty() && sites_.front() < 0) throw std::invalid_argument("Region: negative site index");
}

Region Region::range(int begin, int end) {
  std::vector<int> v;
  for (int i = begin; i < end; ++i) v.push_back(i);
  return Region(std::move(v));
}

bool Region::contains(int site) const { return std::binary_search(sites_.begin(), sites_.end(), site); }

bool Region::includes(const Region& other) const {
  return std::includes(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end());
}

bool Region::intersects(const Region& other) const {
  for (int s : other.sites_)
    if (contains(s)) return true;
  return false;
}

Region Region::unite(const Region& other) const {
  std::vector<int> v;
  std::set_union(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end(), std::back_inserter(v));
  return Region(std::move(v));
}

Region Region::minus(const Region& other) const {
  std::vector<int> v;
  std::set_difference(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end(), std::back_inserter(v));
  return Region(std::move(v));
}

std::size_t Region::position(int site) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), site);
  if (it == sites_.end() || *it != site) throw std::out_of_range("Region: site " + std::to_string(site) + " absent");
  return static_cast<std::size_t>(it - sites_.begin());
}

void Region::validate(int n) const {
  if (!sites_.empty() && sites_.back() >= n)
    throw std::invalid_argument("Region: site " + std::to_string(sites_.back()) + " outside [0, " +
                                std::to_string(n) + ")");
}

// ---------------------------------------------------------------- Connectivity

bool Connectivity::allows(std::span<const int> qubits) const {
  if (qubits.size() <= 1 || kind == Kind::all_to_all) return true;
  if (qubits.size() != 2) return false;
  // Row-major site numbering: the last axis varies fastest.
  auto coords = [&](int site) {
    std::vector<int> c(dims.size());
    for (int a = static_cast<int>(dims.size()) - 1; a >= 0; --a) {
      c[static_cast<std::size_t>(a)] = site % dims[static_cast<std::size_t>(a)];
      site /= dims[static_cast<std::size_t>(a)];
    }
    return c;
  };
  const auto a = coords(qubits[0]);
  const auto b = coords(qubits[1]);
  int differing = 0;
  for (std::size_t ax = 0; ax < dims.size(); ++ax) {
    const int diff = std::abs(a[ax] - b[ax]);
    if (diff == 0) continue;
    ++differing;
    const bool adjacent = diff == 1 || (periodic && dims[ax] > 2 && diff == dims[ax] - 1);
    if (!adjacent) return false;
  }
  return differing == 1;
}

std::uint64_t lightcone_function(const Connectivity& conn, int t) {
  if (t < 0) throw std::invalid_argument("lightcone_function: negative depth");
  if (conn.kind == Connectivity::Kind::all_to_all) {
    if (t >= 64) throw std::overflow_error("lightcone_function: 2^t overflows");
    return std::uint64_t{1} << t;
  }
  return ipow(static_cast<std::uint64_t>(2 * t + 1), conn.dimension());
}

// ---------------------------------------------------------------- Gates

CMatrix named_gate_matrix(std::string_view name) {
  const cplx i(0.0, 1.0);
  const double r = 1.0 / std::sqrt(2.0);
  CMatrix m;
  if (name == "I") {
    m = CMatrix::Identity(2, 2);
  } else if (name == "X") {
    m.resize(2, 2);
    m << 0, 1, 1, 0;
  } else if (name == "Y") {
    m.resize(2, 2);
    m << 0, -i, i, 0;
  } else if (name == "Z") {
    m.resize(2, 2);
    m << 1, 0, 0, -1;
  } else if (name == "H") {
    m.resize(2, 2);
    m << r, r, r, -r;
  } else if (name == "S") {
    m.resize(2, 2);
    m << 1, 0, 0, i;
  } else if (name == "T") {
    m.resize(2, 2);
    m << 1, 0, 0, std::exp(i * (kPi / 4.0));
  } else if (name == "CX") {
    m = CMatrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  } else if (name == "CZ") {
    m = CMatrix::Identity(4, 4);
    m(3, 3) = -1.0;
  } else if (name == "SWAP") {
    m = CMatrix::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
  } else {
    throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
  }
  return m;
}

Gate Gate::named(std::string_view name, std::vector<int> qubits) {
  CMatrix m = named_gate_matrix(name);
  const std::size_t arity = m.rows() == 2 ? 1 : 2;
  if (qubits.size() != arity)
    throw std::invalid_argument("gate " + std::string(name) + " expects " + std::to_string(arity) + " qubit(s)");
  return Gate{std::string(name), std::move(qubits), std::move(m)};
}

Gate Gate::unitary(CMatrix matrix, std::vector<int> qubits) {
  if (qubits.empty() || qubits.size() > 2) throw std::invalid_argument("gate arity must be 1 or 2");
  const Eigen::Index dim = Eigen::Index{1} << qubits.size();
  if (matrix.rows() != dim || matrix.cols() != dim)
    throw std::invalid_argument("explicit gate matrix must be " + std::to_string(dim) + "x" + std::to_string(dim));
  if (!is_unitary(matrix, 1e-10)) throw std::invalid_argument("explicit gate matrix is not unitary");
  return Gate{"U", std::move(qubits), std::move(matrix)};
}

// ---------------------------------------------------------------- Circuit

void Circuit::validate() const {
  if (n < 1 || n > kMaxQubits)
    throw std::invalid_argument("circuit: n must lie in [1, " + std::to_string(kMaxQubits) + "]");
  if (connectivity.kind == Connectivity::Kind::lattice) {
    if (connectivity.dims.empty()) throw std::invalid_argument("circuit: lattice needs at least one dimension");
    long long prod = 1;
    for (int s : connectivity.dims) {
      if (s < 1) throw std::invalid_argument("circuit: lattice side lengths must be positive");
      prod *= s;
    }
    if (prod != n) throw std::invalid_argument("circuit: lattice dims do not multiply to n");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    for (const auto& g : layers[l]) {
      const std::string where = "layer " + std::to_string(l) + " gate " + g.name;
      if (g.qubits.empty() || g.qubits.size() > 2) throw std::invalid_argument(where + ": arity must be 1 or 2");
      for (int q : g.qubits) {
        if (q < 0 || q >= n) throw std::invalid_argument(where + ": qubit out of range");
        if (used[static_cast<std::size_t>(q)]) throw std::invalid_argument(where + ": qubits overlap within layer");
        used[static_cast<std::size_t>(q)] = 1;
      }
      const Eigen::Index dim = Eigen::Index{1} << g.qubits.size();
      if (g.matrix.rows() != dim || g.matrix.cols() != dim)
        throw std::invalid_argument(where + ": matrix size does not match arity");
      if (!is_unitary(g.matrix, 1e-10)) throw std::invalid_argument(where + ": matrix is not unitary");
      if (!connectivity.allows(g.qubits)) throw std::invalid_argument(where + ": violates connectivity");
    }
  }
}

Circuit Circuit::inverse() const {
  Circuit inv{n, connectivity, {}};
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
    Layer layer;
    for (const auto& g : *it) layer.push_back(Gate{g.name + "^dg", g.qubits, g.matrix.adjoint()});
    inv.layers.push_back(std::move(layer));
  }
  return inv;
}

// ---------------------------------------------------------------- StateVector

int StateVector::sites_for(Eigen::Index size, int local_dim) {
  if (local_dim < 2) throw std::invalid_argument("StateVector: local dimension must be >= 2");
  if (size < 1) throw std::invalid_argument("StateVector: empty amplitude vector");
  check_dimension(static_cast<std::uint64_t>(size));
  int n = 0;
  Eigen::Index dim = 1;
  while (dim < size) {
    dim *= local_dim;
    ++n;
  }
  if (dim != size) throw std::invalid_argument("StateVector: length is not a power of the local dimension");
  return n;
}

StateVector StateVector::zero(int n, int local_dim) { return basis(n, 0, local_dim); }

StateVector StateVector::basis(int n, std::uint64_t index, int local_dim) {
  if (n < 0) throw std::invalid_argument("StateVector: negative site count");
  const std::uint64_t dim = ipow(static_cast<std::uint64_t>(local_dim), n);
  check_dimension(dim);
  if (index >= dim) throw std::out_of_range("StateVector: basis index out of range");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(v), n, local_dim);
}

StateVector StateVector::from_amplitudes(CVector amplitudes, int local_dim) {
  const int n = sites_for(amplitudes.size(), local_dim);
  if (std::abs(amplitudes.norm() - 1.0) > 1e-10) throw std::invalid_argument("StateVector: amplitudes not normalized");
  return StateVector(std::move(amplitudes), n, local_dim);
}

StateVector StateVector::normalized(CVector amplitudes, int local_dim) {
  const int n = sites_for(amplitudes.size(), local_dim);
  const double norm = amplitudes.norm();
  if (!(norm > 1e-300)) throw std::domain_error("StateVector: cannot normalize a zero vector");
  amplitudes /= norm;
  return StateVector(std::move(amplitudes), n, local_dim);
}

// ---------------------------------------------------------------- Operators

LocalOperator LocalOperator::on(Region support, CMatrix matrix, int local_dim) {
  const std::uint64_t dim = ipow(static_cast<std::uint64_t>(local_dim), static_cast<int>(support.size()));
  if (static_cast<std::uint64_t>(matrix.rows()) != dim || matrix.rows() != matrix.cols())
    throw std::invalid_argument("LocalOperator: matrix dimension does not match support");
  return LocalOperator{std::move(support), std::move(matrix), local_dim};
}

double LocalOperator::norm() const {
  if (is_hermitian(1e-10)) return hermitian_operator_norm(matrix);
  return operator_norm(matrix);
}

void apply_on_sites(const CMatrix& m, std::span<const int> sites, CVector& amps, int n, int local_dim) {
  const std::size_t k = sites.size();
  const std::uint64_t block = ipow(static_cast<std::uint64_t>(local_dim), static_cast<int>(k));
  if (static_cast<std::uint64_t>(m.rows()) != block || m.rows() != m.cols())
    throw std::invalid_argument("apply_on_sites: matrix dimension does not match sites");
  if (static_cast<std::uint64_t>(amps.size()) != ipow(static_cast<std::uint64_t>(local_dim), n))
    throw std::invalid_argument("apply_on_sites: amplitude vector does not match n");
  for (int s : sites)
    if (s < 0 || s >= n) throw std::invalid_argument("apply_on_sites: site out of range");
  if (k == 0) {
    amps *= m(0, 0);
    return;
  }

  const auto strides = site_strides(n, local_dim);
  std::vector<std::uint64_t> offset(block, 0);
  for (std::uint64_t j = 0; j < block; ++j) {
    std::uint64_t rest = j;
    for (std::size_t a = k; a-- > 0;) {
      offset[j] += (rest % local_dim) * strides[static_cast<std::size_t>(sites[a])];
      rest /= local_dim;
    }
  }
  auto is_base = [&](std::uint64_t idx) {
    for (int s : sites)
      if ((idx / strides[static_cast<std::size_t>(s)]) % local_dim != 0) return false;
    return true;
  };

  CVector in(static_cast<Eigen::Index>(block));
  const auto total = static_cast<std::uint64_t>(amps.size());
  for (std::uint64_t base = 0; base < total; ++base) {
    if (!is_base(base)) continue;
    for (std::uint64_t j = 0; j < block; ++j) in(static_cast<Eigen::Index>(j)) = amps(static_cast<Eigen::Index>(base + offset[j]));
    const CVector out = m * in;
    for (std::uint64_t j = 0; j < block; ++j) amps(static_cast<Eigen::Index>(base + offset[j])) = out(static_cast<Eigen::Index>(j));
  }
}

CVector apply_operator(const LocalOperator& op, const CVector& amps, int n) {
  op.support.validate(n);
  CVector out = amps;
  apply_on_sites(op.matrix, op.support.sites(), out, n, op.local_dim);
  return out;
}

cplx expectation(const StateVector& state, const LocalOperator& op) {
  if (op.local_dim != state.local_dim()) throw std::invalid_argument("expectation: local dimension mismatch");
  return state.amplitudes().dot(apply_operator(op, state.amplitudes(), state.num_sites()));
}

StateVector apply_circuit(const Circuit& circuit, const StateVector& input) {
  circuit.validate();
  if (input.num_sites() != circuit.n || input.local_dim() != 2)
    throw std::invalid_argument("apply_circuit: state does not match circuit size");
  CVector amps = input.amplitudes();
  for (const auto& layer : circuit.layers)
    for (const auto& g : layer) apply_on_sites(g.matrix, g.qubits, amps, circuit.n);
  return StateVector::normalized(std::move(amps));
}

StateVector prepare(const Circuit& circuit) { return apply_circuit(circuit, StateVector::zero(circuit.n)); }

// ---------------------------------------------------------------- Light cones

namespace {

Region grow(const Region& current, const Layer& layer) {
  std::vector<int> sites = current.sites();
  for (const auto& g : layer) {
    bool touches = false;
    for (int q : g.qubits) touches = touches || current.contains(q);
    if (touches) sites.insert(sites.end(), g.qubits.begin(), g.qubits.end());
  }
  return Region(std::move(sites));
}

}  // namespace

Region circuit_lightcone(const Circuit& circuit, const Region& seed, int stacked_depth) {
  if (stacked_depth < 0) throw std::invalid_argument("circuit_lightcone: negative depth");
  seed.validate(circuit.n);
  std::vector<const Layer*> stack;
  for (auto it = circuit.layers.rbegin(); it != circuit.layers.rend(); ++it) stack.push_back(&*it);
  for (const auto& layer : circuit.layers) stack.push_back(&layer);
  Region cone = seed;
  const std::size_t used = std::min(stack.size(), static_cast<std::size_t>(stacked_depth));
  for (std::size_t i = 0; i < used; ++i) cone = grow(cone, *stack[i]);
  return cone;
}

Region forward_lightcone(const Circuit& circuit, const Region& seed) {
  seed.validate(circuit.n);
  Region cone = seed;
  for (const auto& layer : circuit.layers) cone = grow(cone, layer);
  return cone;
}

Region backward_lightcone(const Circuit& circuit, const Region& seed) {
  return circuit_lightcone(circuit, seed, circuit.depth());
}

CMatrix embed_operator(const CMatrix& m, const Region& from, const Region& to, int local_dim) {
  if (!to.includes(from)) throw std::invalid_argument("embed_operator: target region does not contain source");
  const int kt = static_cast<int>(to.size());
  const std::uint64_t dim_to = ipow(static_cast<std::uint64_t>(local_dim), kt);
  const std::uint64_t dim_from = ipow(static_cast<std::uint64_t>(local_dim), static_cast<int>(from.size()));
  if (static_cast<std::uint64_t>(m.rows()) != dim_from) throw std::invalid_argument("embed_operator: size mismatch");
  if (from == to) return m;

  // Positions (within `to`) of the sites of `from` and of the added sites.
  std::vector<int> pos_from;
  std::vector<int> pos_rest;
  for (int p = 0; p < kt; ++p) (from.contains(to[static_cast<std::size_t>(p)]) ? pos_from : pos_rest).push_back(p);
  const auto strides = site_strides(kt, local_dim);

  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dim_to), static_cast<Eigen::Index>(dim_to));
  for (std::uint64_t r = 0; r < dim_to; ++r) {
    const std::uint64_t r_from = sub_index(r, pos_from, strides, local_dim);
    const std::uint64_t r_rest = sub_index(r, pos_rest, strides, local_dim);
    for (std::uint64_t c = 0; c < dim_to; ++c) {
      if (sub_index(c, pos_rest, strides, local_dim) != r_rest) continue;
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          m(static_cast<Eigen::Index>(r_from), static_cast<Eigen::Index>(sub_index(c, pos_from, strides, local_dim)));
    }
  }
  return out;
}

namespace {

// Conjugates op by the listed layers, gate by gate: M <- G M G^dagger, growing the
// support whenever a gate touches it.
LocalOperator conjugate_through(const LocalOperator& op, const std::vector<const Layer*>& layers, bool adjoint) {
  LocalOperator cur = op;
  for (const Layer* layer : layers) {
    for (const auto& g : *layer) {
      bool touches = false;
      for (int q : g.qubits) touches = touches || cur.support.contains(q);
      if (!touches) continue;
      const Region grown = cur.support.unite(Region(g.qubits));
      CMatrix m = embed_operator(cur.matrix, cur.support, grown);
      std::vector<int> local;
      for (int q : g.qubits) local.push_back(static_cast<int>(grown.position(q)));
      const CMatrix gm = adjoint ? CMatrix(g.matrix.adjoint()) : g.matrix;
      const int k = static_cast<int>(grown.size());
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        CVector col = m.col(c);
        apply_on_sites(gm, local, col, k);
        m.col(c) = col;
      }
      CMatrix mt = m.adjoint();
      for (Eigen::Index c = 0; c < mt.cols(); ++c) {
        CVector col = mt.col(c);
        apply_on_sites(gm, local, col, k);
        mt.col(c) = col;
      }
      cur.support = grown;
      cur.matrix = mt.adjoint();
    }
  }
  return cur;
}

}  // namespace

LocalOperator conjugate_forward(const Circuit& circuit, const LocalOperator& op) {
  op.support.validate(circuit.n);
  // U = L_{T-1} ... L_0, so U O U^dagger applies layer 0 innermost.
  std::vector<const Layer*> order;
  for (const auto& layer : circuit.layers) order.push_back(&layer);
  return conjugate_through(op, order, false);
}

LocalOperator conjugate_backward(const Circuit& circuit, const LocalOperator& op) {
  op.support.validate(circuit.n);
  std::vector<const Layer*> order;
  for (auto it = circuit.layers.rbegin(); it != circuit.layers.rend(); ++it) order.push_back(&*it);
  return conjugate_through(op, order, true);
}

LocalOperator conjugated_parent_projector(const Circuit& circuit, int site) {
  if (site < 0 || site >= circuit.n) throw std::invalid_argument("conjugated_parent_projector: invalid site");
  CMatrix one = CMatrix::Zero(2, 2);
  one(1, 1) = 1.0;  // (1 - Z) / 2
  return conjugate_forward(circuit, LocalOperator{Region{site}, one, 2});
}

// ---------------------------------------------------------------- Reduced states

CMatrix bipartition_matrix(const StateVector& state, const Region& region) {
  const int n = state.num_sites();
  const int d = state.local_dim();
  region.validate(n);
  const Region rest = Region::range(0, n).minus(region);
  const auto strides = site_strides(n, d);
  const std::uint64_t dim_r = ipow(static_cast<std::uint64_t>(d), static_cast<int>(region.size()));
  const std::uint64_t dim_e = ipow(static_cast<std::uint64_t>(d), static_cast<int>(rest.size()));

  CMatrix psi(static_cast<Eigen::Index>(dim_r), static_cast<Eigen::Index>(dim_e));
  const auto& a = state.amplitudes();
  for (Eigen::Index idx = 0; idx < a.size(); ++idx) {
    const auto u = static_cast<std::uint64_t>(idx);
    psi(static_cast<Eigen::Index>(sub_index(u, region.sites(), strides, d)),
        static_cast<Eigen::Index>(sub_index(u, rest.sites(), strides, d))) = a(idx);
  }
  return psi;
}

CMatrix reduced_density_matrix(const StateVector& state, const Region& region) {
  const CMatrix psi = bipartition_matrix(state, region);
  return psi * psi.adjoint();
}

SparseDensity reduced_density_active(const StateVector& state, const Region& region) {
  const int n = state.num_sites();
  const int d = state.local_dim();
  region.validate(n);
  const Region rest = Region::range(0, n).minus(region);
  const auto strides = site_strides(n, d);
  const auto& a = state.amplitudes();

  std::map<std::uint64_t, Eigen::Index> row_of;
  std::unordered_map<std::uint64_t, std::vector<std::pair<std::uint64_t, cplx>>> by_env;
  for (Eigen::Index idx = 0; idx < a.size(); ++idx) {
    if (a(idx) == cplx(0.0)) continue;
    const auto u = static_cast<std::uint64_t>(idx);
    const std::uint64_t r = sub_index(u, region.sites(), strides, d);
    row_of.emplace(r, 0);
    by_env[sub_index(u, rest.sites(), strides, d)].emplace_back(r, a(idx));
  }
  SparseDensity out;
  Eigen::Index next = 0;
  for (auto& [r, pos] : row_of) {
    pos = next++;
    out.rows.push_back(r);
  }
  out.block = CMatrix::Zero(next, next);
  for (const auto& [env, entries] : by_env)
    for (const auto& [r1, a1] : entries)
      for (const auto& [r2, a2] : entries) out.block(row_of[r1], row_of[r2]) += a1 * std::conj(a2);
  return out;
}

SparseDensity kron(const SparseDensity& a, const SparseDensity& b, std::uint64_t dim_b) {
  SparseDensity out;
  for (auto ra : a.rows)
    for (auto rb : b.rows) out.rows.push_back(ra * dim_b + rb);
  out.block = kron(a.block, b.block);
  return out;
}

double trace_norm_difference(const SparseDensity& x, const SparseDensity& y) {
  std::vector<std::uint64_t> rows = x.rows;
  rows.insert(rows.end(), y.rows.begin(), y.rows.end());
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  auto position = [&](std::uint64_t r) {
    return static_cast<Eigen::Index>(std::lower_bound(rows.begin(), rows.end(), r) - rows.begin());
  };
  const auto dim = static_cast<Eigen::Index>(rows.size());
  CMatrix diff = CMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < x.rows.size(); ++i)
    for (std::size_t j = 0; j < x.rows.size(); ++j)
      diff(position(x.rows[i]), position(x.rows[j])) += x.block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  for (std::size_t i = 0; i < y.rows.size(); ++i)
    for (std::size_t j = 0; j < y.rows.size(); ++j)
      diff(position(y.rows[i]), position(y.rows[j])) -= y.block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return trace_norm(diff);
}

double excitation_probability(const StateVector& state, const Region& region) {
  region.validate(state.num_sites());
  const auto strides = site_strides(state.num_sites(), state.local_dim());
  double vacuum = 0.0;
  const auto& a = state.amplitudes();
  for (Eigen::Index idx = 0; idx < a.size(); ++idx)
    if (sub_index(static_cast<std::uint64_t>(idx), region.sites(), strides, state.local_dim()) == 0)
      vacuum += std::norm(a(idx));
  return 1.0 - vacuum;
}

// ---------------------------------------------------------------- Overlaps

cplx state_overlap(const StateVector& a, const StateVector& b) {
  if (a.dimension() != b.dimension() || a.local_dim() != b.local_dim())
    throw std::invalid_argument("state_overlap: dimension mismatch");
  return a.amplitudes().dot(b.amplitudes());
}

double fubini_study_angle(const StateVector& a, const StateVector& b) {
  return std::acos(std::min(1.0, std::abs(state_overlap(a, b))));
}

double pure_trace_distance(const StateVector& a, const StateVector& b) {
  const double f = std::min(1.0, std::norm(state_overlap(a, b)));
  return 2.0 * std::sqrt(1.0 - f);
}

// ---------------------------------------------------------------- Clustering

ClusteringReport clustering_check(const Circuit& circuit, const LocalOperator& p, const LocalOperator& q) {
  circuit.validate();
  p.support.validate(circuit.n);
  q.support.validate(circuit.n);
  if (p.support.intersects(q.support)) throw std::invalid_argument("clustering_check: P and Q supports overlap");

  ClusteringReport r;
  r.conjugated_support_p = backward_lightcone(circuit, p.support);
  r.conjugated_support_q = backward_lightcone(circuit, q.support);
  r.cones_intersect = r.conjugated_support_p.intersects(r.conjugated_support_q);

  const StateVector psi = prepare(circuit);
  const Region joint = p.support.unite(q.support);
  const CMatrix pq = embed_operator(p.matrix, p.support, joint) * embed_operator(q.matrix, q.support, joint);
  r.expect_pq = expectation(psi, LocalOperator{joint, pq, 2});
  r.expect_p = expectation(psi, p);
  r.expect_q = expectation(psi, q);
  r.residual = std::abs(r.expect_pq - r.expect_p * r.expect_q);
  r.factorizes = r.cones_intersect || r.residual <= 1e-10;
  return r;
}

}  // namespace aqec
