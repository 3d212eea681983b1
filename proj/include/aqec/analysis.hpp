#pragma once

// Approximate-code analysis: subsystem variance, the commuting-projector local-lemma
// certificate, constructive distinguishing operators and the condition evaluators built
// on the light-cone function.

#include <cstdint>
#include <string>
#include <vector>

#include "aqec/circuit.hpp"
#include "aqec/lll.hpp"
#include "aqec/types.hpp"

namespace aqec {

/// Orthonormal basis of a 2^k-dimensional code space on n qubits.
struct Code {
  int n = 0;
  int k = 0;
  std::vector<StateVector> basis;

  /// Checks sizes and orthonormality within 1e-10.
  void validate() const;
  /// Basis matrix with the code states as columns.
  CMatrix basis_matrix() const;
  /// Normalized sum_i coeffs_i |basis_i>.
  StateVector state(const CVector& coeffs) const;
};

struct VarianceSearch {
  int grid_points = 24;      // per angle, k = 1 only
  int random_samples = 256;  // k >= 2
  int refine_iters = 3;      // rounds of coordinate ascent
  std::uint64_t seed = 0;
  int threads = 1;           // 0 picks the hardware concurrency
  bool basis_only = false;   // evaluate the basis states alone
};

struct VarianceReport {
  int d = 0;
  double epsilon = 0.0;
  Region argmax_region;
  CVector argmax_coeffs;
  std::uint64_t samples_evaluated = 0;
};

/// ||tr_complement(|psi><psi| - Gamma)||_1 for psi = sum_i coeffs_i |basis_i> (normalized)
/// and Gamma the maximally mixed code state.
double variance_at(const Code& code, const Region& region, const CVector& coeffs);

/// Certified lower estimate of the subsystem variance at region size d: exact
/// enumeration of size-d regions, sampled code states, then coordinate-ascent refinement.
VarianceReport subsystem_variance(const Code& code, int d, const VarianceSearch& search = {});

enum class CertificateStatus { inapplicable, certified, contradiction };

struct CertificateReport {
  double p = 0.0;          // max_i <P_i>
  std::size_t K = 0;       // max_i #{j != i : supp(P_j) meets R_i}
  lll::BoundResult bound;  // (1 - c e p)^n when c e (K+1) p <= 1
  double exact = 0.0;      // tr(G rho), G = prod_i (1 - P_i)
  CertificateStatus status = CertificateStatus::inapplicable;
};

/// Local-lemma certificate for the ground space of commuting projectors, compared with
/// the exact ground-space weight of the state. `contradiction` means the lemma's bound
/// exceeds the exact value, which is what forces distinguishability.
CertificateReport commuting_projector_certificate(const std::vector<LocalOperator>& projectors,
                                                  const std::vector<Region>& regions, const StateVector& state,
                                                  double c = 1.0);

struct DistinguishReport {
  LocalOperator op;  // 2 P* - 1
  int site = 0;      // qubit whose conjugated projector was selected
  int source = 1;    // circuit whose parent projectors produced op
  double value = 0.0;
  double bound = 0.0;
  int t = 0;
  double delta = 0.0;
  double overlap = 0.0;  // measured |<psi1|psi2>|
  Connectivity connectivity;
  bool precondition_ok = true;  // overlap <= delta
  bool inequality_holds = true;  // value > bound
};

/// Picks the conjugated parent projector of circuit1 with the largest weight on state2
/// (lowest site among ties) and reports O = 2 P* - 1 with its expectation gap.
DistinguishReport distinguishing_operator(const Circuit& circuit1, const StateVector& state2);

/// Runs the construction both ways, keeps the larger gap and compares it with
/// (2/e) min{1 - delta^(2/n), 1/f(4t)}, t the larger depth.
DistinguishReport verify_distinguishability(const Circuit& circuit1, const Circuit& circuit2, double delta);

/// (2/e) min{1 - delta^(2/n), 1/f(4t)} with 0^(2/n) = 0.
double distinguishability_bound(const Connectivity& conn, int t, int n, double delta);

struct SvReport {
  int t = 0;
  double delta = 0.0;
  int region_size = 0;          // min(f(t), n)
  VarianceReport variance;
  double rhs = 0.0;             // 1/(e f(4t)) - delta
  double delta_threshold = 0.0; // (1 - 1/f(4t))^(n/2)
  double distance1 = 0.0;       // trace distance of each prepared state to its code state
  double distance2 = 0.0;
  double code_overlap = 0.0;    // |<phi1|phi2>| between the two code states
  bool preconditions_ok = false;
  bool applicable = false;
  bool holds = false;
  double margin = 0.0;          // epsilon - rhs
};

/// Evaluates both sides of eps(f(t)) > 1/(e f(4t)) - delta for a code and two depth-t
/// preparations of states near orthogonal code states.
SvReport sv_lower_bound_check(const Code& code, const Circuit& circuit1, const Circuit& circuit2, int t,
                              double delta, const VarianceSearch& search = {});

/// The 24 single-qubit Clifford unitaries modulo phase, generated from H and S.
std::vector<CMatrix> single_qubit_cliffords();

/// Group average of |<psi|U|psi>|^2 over the single-qubit Clifford group.
double clifford_average_overlap(int k, const StateVector& state);

struct ConditionReport {
  double epsilon = 0.0;
  double universal_rhs = 0.0;  // 1/(e f(4t))
  double clifford_rhs = 0.0;   // (1/e) min{1 - 2^(-k/n), 1/f(4t)}
  bool universal_holds = false;
  bool clifford_holds = false;
  std::string statement;
};

ConditionReport code_condition_report(double epsilon_ft, const Connectivity& conn, int t, int k, int n);

/// Delta T_L / (n max_i Delta T_i), a lower bound on eps(1) for U(1)-covariant codes.
double u1_filling_bound(double delta_tl, const std::vector<double>& delta_ti, int n);

}  // namespace aqec
