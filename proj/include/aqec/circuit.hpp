#pragma once

// Layered shallow circuits, statevector simulation, light cones and reduced density
// matrices.
//
// Ordering convention: site 0 is the most significant digit of an amplitude index, so
// |q0 q1 ... q_{n-1}> sits at index sum_q q * d^(n-1-q). Two-qubit gate matrices are
// written in the basis |a b> of their (first, second) qubit.

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aqec/linalg.hpp"
#include "aqec/types.hpp"

namespace aqec {

/// Sorted set of distinct site indices.
class Region {
 public:
  Region() = default;
  Region(std::initializer_list<int> sites);
  explicit Region(std::vector<int> sites);

  static Region range(int begin, int end);  // [begin, end)

  const std::vector<int>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }
  int operator[](std::size_t i) const { return sites_[i]; }

  bool contains(int site) const;
  bool includes(const Region& other) const;
  bool intersects(const Region& other) const;
  Region unite(const Region& other) const;
  Region minus(const Region& other) const;
  /// Position of a site inside the region; throws if absent.
  std::size_t position(int site) const;
  /// Throws std::invalid_argument if a site lies outside [0, n).
  void validate(int n) const;

  friend bool operator==(const Region&, const Region&) = default;

 private:
  std::vector<int> sites_;
};

struct Connectivity {
  enum class Kind { all_to_all, lattice };

  Kind kind = Kind::all_to_all;
  std::vector<int> dims;  // lattice side lengths; dims.size() is the dimension D
  bool periodic = false;

  static Connectivity all_to_all() { return {}; }
  static Connectivity lattice(std::vector<int> dims, bool periodic = false) {
    return {Kind::lattice, std::move(dims), periodic};
  }
  static Connectivity chain(int n, bool periodic = false) { return lattice({n}, periodic); }

  int dimension() const { return static_cast<int>(dims.size()); }
  /// Whether a gate on these sites is allowed (single sites always are).
  bool allows(std::span<const int> qubits) const;

  friend bool operator==(const Connectivity&, const Connectivity&) = default;
};

/// Maximum number of qubits a depth-t circuit can influence: 2^t for all-to-all two-body
/// gates, (2t+1)^D on a D-dimensional lattice.
std::uint64_t lightcone_function(const Connectivity& conn, int t);

/// A one- or two-qubit gate: a named generator or an explicit unitary ("U").
struct Gate {
  std::string name;
  std::vector<int> qubits;
  CMatrix matrix;

  static Gate named(std::string_view name, std::vector<int> qubits);
  static Gate unitary(CMatrix matrix, std::vector<int> qubits);
};

/// Matrix of a named generator: I, X, Y, Z, H, S, T (one qubit) or CX, CZ, SWAP (two).
CMatrix named_gate_matrix(std::string_view name);

using Layer = std::vector<Gate>;

struct Circuit {
  int n = 0;
  Connectivity connectivity;
  std::vector<Layer> layers;

  /// Every layer counts, including layers holding only single-qubit gates.
  int depth() const { return static_cast<int>(layers.size()); }
  /// Checks qubit ranges, disjointness within layers, connectivity and unitarity.
  void validate() const;
  /// Circuit preparing U^dagger (layers reversed, gates adjointed).
  Circuit inverse() const;
};

/// Normalized amplitude vector on n sites of equal local dimension (2 for qubits).
class StateVector {
 public:
  StateVector() = default;

  static StateVector zero(int n, int local_dim = 2);
  static StateVector basis(int n, std::uint64_t index, int local_dim = 2);
  /// Requires unit norm within 1e-10.
  static StateVector from_amplitudes(CVector amplitudes, int local_dim = 2);
  /// Rescales to unit norm; throws std::domain_error on a zero vector.
  static StateVector normalized(CVector amplitudes, int local_dim = 2);

  int num_sites() const { return n_; }
  int local_dim() const { return d_; }
  Eigen::Index dimension() const { return amps_.size(); }
  const CVector& amplitudes() const { return amps_; }
  cplx operator[](Eigen::Index i) const { return amps_(i); }

 private:
  StateVector(CVector amps, int n, int d) : amps_(std::move(amps)), n_(n), d_(d) {}
  static int sites_for(Eigen::Index size, int local_dim);

  CVector amps_;
  int n_ = 0;
  int d_ = 2;
};

struct LocalOperator {
  Region support;
  CMatrix matrix;
  int local_dim = 2;

  static LocalOperator on(Region support, CMatrix matrix, int local_dim = 2);
  /// Spectral norm (eigenvalue based for Hermitian operators).
  double norm() const;
  bool is_hermitian(double tol = 1e-10) const { return aqec::is_hermitian(matrix, tol); }
};

/// Applies a d^k x d^k matrix to the listed sites of a full amplitude vector.
void apply_on_sites(const CMatrix& m, std::span<const int> sites, CVector& amps, int n, int local_dim = 2);

CVector apply_operator(const LocalOperator& op, const CVector& amps, int n);
cplx expectation(const StateVector& state, const LocalOperator& op);

StateVector apply_circuit(const Circuit& circuit, const StateVector& input);
/// U |0^n>.
StateVector prepare(const Circuit& circuit);

/// Qubits reached from `seed` through the stacked layer sequence of U^dagger followed by
/// U (last layer first, then first layer first), truncated to `stacked_depth` layers.
/// Layers beyond the stack count as idle.
Region circuit_lightcone(const Circuit& circuit, const Region& seed, int stacked_depth);
/// Support of U O U^dagger for O supported on seed.
Region forward_lightcone(const Circuit& circuit, const Region& seed);
/// Support of U^dagger O U for O supported on seed.
Region backward_lightcone(const Circuit& circuit, const Region& seed);

/// U O U^dagger restricted to its light-cone support.
LocalOperator conjugate_forward(const Circuit& circuit, const LocalOperator& op);
/// U^dagger O U restricted to its light-cone support.
LocalOperator conjugate_backward(const Circuit& circuit, const LocalOperator& op);

/// (1 - U Z_site U^dagger) / 2 on its light-cone support.
LocalOperator conjugated_parent_projector(const Circuit& circuit, int site);

/// Re-expresses an operator on a larger region (identity on the added sites).
CMatrix embed_operator(const CMatrix& m, const Region& from, const Region& to, int local_dim = 2);

/// Amplitudes reshaped into a (region) x (complement) matrix, region digits as rows.
CMatrix bipartition_matrix(const StateVector& state, const Region& region);

CMatrix reduced_density_matrix(const StateVector& state, const Region& region);

/// Reduced density matrix stored only on the basis rows where it can be non-zero. Lets
/// large regions of sparse states (W states) be handled exactly.
struct SparseDensity {
  std::vector<std::uint64_t> rows;  // ascending basis indices of the region
  CMatrix block;
};
SparseDensity reduced_density_active(const StateVector& state, const Region& region);
/// a (x) b on the concatenated region, b's region of total dimension dim_b.
SparseDensity kron(const SparseDensity& a, const SparseDensity& b, std::uint64_t dim_b);
/// ||x - y||_1 over the union of active rows.
double trace_norm_difference(const SparseDensity& x, const SparseDensity& y);

/// Probability that a measurement of `region` in the computational basis is not all zeros,
/// i.e. <1 - |0..0><0..0|_region>.
double excitation_probability(const StateVector& state, const Region& region);

cplx state_overlap(const StateVector& a, const StateVector& b);
/// arccos |<a|b>| in [0, pi/2].
double fubini_study_angle(const StateVector& a, const StateVector& b);
/// || |a><a| - |b><b| ||_1 = 2 sin(angle).
double pure_trace_distance(const StateVector& a, const StateVector& b);

struct ClusteringReport {
  Region conjugated_support_p;
  Region conjugated_support_q;
  bool cones_intersect = false;
  cplx expect_pq;
  cplx expect_p;
  cplx expect_q;
  double residual = 0.0;  // |<PQ> - <P><Q>|
  bool factorizes = true;  // residual <= 1e-10 whenever the cones are disjoint
};

/// Factorization test for the state U|0^n>; P and Q must have disjoint raw supports.
ClusteringReport clustering_check(const Circuit& circuit, const LocalOperator& p, const LocalOperator& q);

}  // namespace aqec
