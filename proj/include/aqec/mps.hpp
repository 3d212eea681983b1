#pragma once

// Translation-invariant matrix product states: transfer matrices, canonical form,
// clustering constants, ring truncation, momentum and the large gauge transformation.
//
// Vectorization is row-major, so A (x) conj(B) acts on vec(X) as X -> A X B^dagger. The
// transfer matrix E = sum_i A_i (x) conj(A_i) is the map X -> sum_i A_i X A_i^dagger and
// E^dagger is X -> sum_i A_i^dagger X A_i.

#include <optional>
#include <string>
#include <vector>

#include "aqec/circuit.hpp"
#include "aqec/types.hpp"

namespace aqec {

struct MPSTensor {
  int phys_dim = 0;
  int bond_dim = 0;
  std::vector<CMatrix> matrices;  // one bond x bond matrix per physical state

  void validate() const;
};

/// sum_i A_i (x) conj(A_i).
CMatrix transfer_matrix(const MPSTensor& a);

/// sum_{s,s'} O_{s's} A_s (x) conj(A_{s'}) for O acting on `sites` consecutive sites
/// (dimension phys_dim^sites), A_s the ordered product over the sites.
CMatrix transfer_matrix(const MPSTensor& a, const CMatrix& op, int sites = 1);

struct CanonicalForm {
  MPSTensor tensor;       // rescaled and gauge fixed: E(1) = 1
  CMatrix rho;            // E^dagger(rho) = rho, tr rho = 1
  CVector spectrum;       // eigenvalues of the rescaled E by decreasing modulus
  double spectral_radius = 0.0;  // of the input E
  double lambda2 = 0.0;   // second largest eigenvalue modulus after rescaling
  bool is_normal = false;
  double right_residual = 0.0;  // ||E(1) - 1||_max
  double left_residual = 0.0;   // ||E^dagger(rho) - rho||_max
};

/// Rescales to unit spectral radius and gauges the right fixed point to the identity.
/// Non-normal tensors come back with is_normal = false (and no gauge change when the
/// right fixed point is not positive definite).
CanonicalForm canonicalize(const MPSTensor& a, double tol = 1e-12);

/// <O> on the infinite chain, tr(rho E_O(1)).
cplx imps_expectation(const CanonicalForm& form, const CMatrix& op, int sites = 1);

/// <P Q> on the infinite chain with `gap` sites between the supports.
cplx imps_two_point(const CanonicalForm& form, const CMatrix& p, int p_sites, const CMatrix& q, int q_sites, int gap);

struct ClusteringCheck {
  int gap = 0;
  double pq = 0.0;
  double p_times_q = 0.0;
  bool holds = false;  // pq <= c <P><Q> + 1e-10
};

struct ClusteringResult {
  double lambda = 0.0;
  int ell = 0;   // first separation from which ||E^s - E^inf|| <= lambda^s for the whole scanned tail
  double c = 0.0;  // 1 + lambda^ell / lambda_min(rho)
  std::vector<ClusteringCheck> verified_pairs;
  bool all_hold = true;
};

/// Clustering constant of a normal tensor and the check <PQ> <= c <P><Q> at separations
/// ell .. ell + 8. lambda defaults to (lambda2 + 1) / 2.
ClusteringResult clustering_constant(const CanonicalForm& form, const CMatrix& p, const CMatrix& q,
                                     std::optional<double> lambda = std::nullopt);

/// Normalized periodic-boundary state with amplitudes tr(A_{s1} ... A_{sL}).
StateVector ring_truncation(const MPSTensor& a, int length);

/// Cyclic shift moving the content of site x to site x + 1.
StateVector translate(const StateVector& state);

/// p in [0, 2 pi) with T|psi> = e^{ip}|psi>; throws std::domain_error when the residual of
/// the best-fit phase exceeds 1e-8.
double momentum_phase(const StateVector& state, int length);

struct ChargeAssignment {
  CMatrix q;   // per-site Hermitian charge with integer eigenvalues
  int length = 0;

  static ChargeAssignment default_for(int length);  // (1 - Z) / 2
  void validate(int local_dim) const;
};

/// exp((2 pi i / L) sum_x x q_x) |psi>.
StateVector large_gauge_transform(const StateVector& state, const ChargeAssignment& charges);

struct LsmCondition {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

struct LsmReport {
  double momentum = 0.0;
  double alpha = 0.0;
  bool applicable = false;  // alpha != 0
  std::string note;
  double transformed_momentum = 0.0;
  double momentum_shift = 0.0;  // transformed - original, mod 2 pi
  bool shift_matches = false;   // shift == -alpha mod 2 pi within 1e-8
  double overlap = 0.0;         // |<psi|U psi>|
  bool overlap_vanishes = false;
  std::vector<std::pair<int, double>> indistinguishability;  // |S| -> ||tr(psi - U psi)||_1
  double charge_norm = 0.0;
  std::optional<int> t;
  std::optional<double> delta;
  std::optional<LsmCondition> cond1;  // delta > (1 - e delta - e (9 pi t^2 |q| / 2L)^2)^(L/t)
  std::optional<LsmCondition> cond2;  // t >= sqrt(L (2 / (9 pi |q|)) (1/(7e) - delta))
  // L/4: a circuit whose output has nonzero lattice momentum is deeper than this. The 1/4 is
  // specific to the ring-tiling argument; only the linear growth in L is meaningful.
  std::optional<double> depth_threshold;              // input state, when its momentum is nonzero
  std::optional<double> transformed_depth_threshold;  // U psi, when its momentum is nonzero
};

LsmReport lsm_report(const StateVector& state, const ChargeAssignment& charges, std::optional<int> t = std::nullopt,
                     std::optional<double> delta = std::nullopt);

/// A translation-invariant layered circuit on an infinite chain, given by one cell of
/// `cell_size` qubits. Qubit indices in [cell_size, 2 cell_size) refer to the next cell, so
/// a gate on (cell_size - 1, cell_size) straddles the cut between neighbouring cells.
struct UnitCell {
  int cell_size = 1;
  std::vector<Layer> layers;

  /// Checks indices, nearest-neighbour gates and disjointness once the cell is tiled.
  void validate() const;
};

inline constexpr int kMaxImpsDepth = 2;

/// Per-cell iMPS tensor (physical dimension 2^cell_size) of the tiled circuit applied to
/// |0...0>. Depth is capped at kMaxImpsDepth. Bond directions outside the supports of the
/// transfer-matrix fixed points are dropped, so gapped outputs canonicalize.
MPSTensor circuit_to_imps(const UnitCell& cell);

/// The same circuit on a ring of `cells` cells, for cross-checks.
Circuit tile_on_ring(const UnitCell& cell, int cells);

}  // namespace aqec
