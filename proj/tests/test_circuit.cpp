#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "aqec/circuit.hpp"
#include "support/random_circuits.hpp"

namespace {

using namespace aqec;

constexpr double kTol = 1e-12;

StateVector w3() {
  CVector v = CVector::Zero(8);
  v(4) = v(2) = v(1) = 1.0 / std::sqrt(3.0);
  return StateVector::from_amplitudes(v);
}

Circuit bell_circuit(int n) {
  return Circuit{n, Connectivity::all_to_all(), {{Gate::named("H", {0})}, {Gate::named("CX", {0, 1})}}};
}

CMatrix pauli_z() { return named_gate_matrix("Z"); }

TEST(LightconeFunction, Table) {
  EXPECT_EQ(lightcone_function(Connectivity::all_to_all(), 0), 1u);
  EXPECT_EQ(lightcone_function(Connectivity::all_to_all(), 3), 8u);
  EXPECT_EQ(lightcone_function(Connectivity::chain(5), 2), 5u);
  EXPECT_EQ(lightcone_function(Connectivity::lattice({3, 3}), 1), 9u);
  EXPECT_EQ(lightcone_function(Connectivity::lattice({2, 2, 2}), 0), 1u);
  EXPECT_THROW(lightcone_function(Connectivity::all_to_all(), -1), std::invalid_argument);
}

TEST(Connectivity, LatticeNeighbours) {
  const auto chain = Connectivity::chain(5);
  EXPECT_TRUE(chain.allows(std::vector<int>{1, 2}));
  EXPECT_FALSE(chain.allows(std::vector<int>{0, 4}));
  EXPECT_TRUE(Connectivity::chain(5, true).allows(std::vector<int>{0, 4}));
  const auto grid = Connectivity::lattice({3, 3});
  EXPECT_TRUE(grid.allows(std::vector<int>{0, 3}));   // vertical
  EXPECT_TRUE(grid.allows(std::vector<int>{4, 5}));   // horizontal
  EXPECT_FALSE(grid.allows(std::vector<int>{2, 3}));  // row wrap is not an edge
  EXPECT_FALSE(grid.allows(std::vector<int>{0, 4}));  // diagonal
}

TEST(CircuitValidation, Rejections) {
  Circuit overlap{2, Connectivity::all_to_all(), {{Gate::named("X", {0}), Gate::named("CX", {0, 1})}}};
  EXPECT_THROW(overlap.validate(), std::invalid_argument);
  Circuit far{4, Connectivity::chain(4), {{Gate::named("CZ", {0, 2})}}};
  EXPECT_THROW(far.validate(), std::invalid_argument);
  Circuit range{2, Connectivity::all_to_all(), {{Gate::named("X", {2})}}};
  EXPECT_THROW(range.validate(), std::invalid_argument);
  Circuit big{21, Connectivity::all_to_all(), {}};
  EXPECT_THROW(big.validate(), std::invalid_argument);
  Circuit dims{4, Connectivity::lattice({3}), {}};
  EXPECT_THROW(dims.validate(), std::invalid_argument);
  CMatrix not_unitary = CMatrix::Identity(2, 2) * 2.0;
  EXPECT_THROW(Gate::unitary(not_unitary, {0}), std::invalid_argument);
  EXPECT_THROW(Gate::named("Q", {0}), std::invalid_argument);
  EXPECT_THROW(Gate::named("CX", {0}), std::invalid_argument);
}

TEST(ApplyCircuit, Examples) {
  const Circuit empty{2, Connectivity::all_to_all(), {}};
  EXPECT_NEAR((prepare(empty).amplitudes() - StateVector::zero(2).amplitudes()).norm(), 0.0, kTol);

  const Circuit x0{2, Connectivity::all_to_all(), {{Gate::named("X", {0})}}};
  EXPECT_NEAR(std::abs(prepare(x0)[2] - cplx(1.0)), 0.0, kTol);  // |10> is index 2

  const StateVector bell = prepare(bell_circuit(2));
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(bell[0] - r), 0.0, kTol);
  EXPECT_NEAR(std::abs(bell[3] - r), 0.0, kTol);
  EXPECT_NEAR(std::abs(bell[1]), 0.0, kTol);

  EXPECT_THROW(apply_circuit(x0, StateVector::zero(3)), std::invalid_argument);
}

TEST(ApplyCircuit, GateOrderingMatchesKron) {
  // A gate on (2, 0) must act as its matrix in the basis |q2 q0>.
  std::mt19937_64 rng(1);
  const CMatrix u = fixtures::random_unitary(4, rng);
  const Circuit c{3, Connectivity::all_to_all(), {{Gate::unitary(u, {2, 0})}}};
  const CVector in = fixtures::random_state(8, rng);
  const CVector out = apply_circuit(c, StateVector::from_amplitudes(in)).amplitudes();
  // Oracle: permute to order (q2, q0, q1), apply u (x) I, permute back.
  auto to_perm = [](int idx) {
    const int q0 = (idx >> 2) & 1, q1 = (idx >> 1) & 1, q2 = idx & 1;
    return (q2 << 2) | (q0 << 1) | q1;
  };
  CVector permuted(8);
  for (int i = 0; i < 8; ++i) permuted(to_perm(i)) = in(i);
  const CVector applied = kron(u, CMatrix::Identity(2, 2)) * permuted;
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(std::abs(out(i) - applied(to_perm(i))), 0.0, 1e-12);
}

TEST(ApplyCircuit, NormPreservationProperty) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 7;
    const auto conn = trial % 2 ? Connectivity::chain(n, trial % 3 == 0) : Connectivity::all_to_all();
    const Circuit c = fixtures::random_circuit(n, conn, 1 + trial % 4, rng);
    const StateVector s = StateVector::from_amplitudes(fixtures::random_state(1 << n, rng));
    EXPECT_NEAR(apply_circuit(c, s).amplitudes().norm(), 1.0, 1e-10);
  }
}

TEST(Lightcone, Examples) {
  const Circuit one{2, Connectivity::all_to_all(), {{Gate::named("CZ", {0, 1})}}};
  EXPECT_EQ(circuit_lightcone(one, Region{0}, 1), (Region{0, 1}));
  const Circuit empty{5, Connectivity::all_to_all(), {}};
  EXPECT_EQ(circuit_lightcone(empty, Region{3}, 7), (Region{3}));

  Circuit brick{6, Connectivity::chain(6), {}};
  brick.layers.push_back({Gate::named("CX", {0, 1}), Gate::named("CX", {2, 3}), Gate::named("CX", {4, 5})});
  brick.layers.push_back({Gate::named("CX", {1, 2}), Gate::named("CX", {3, 4})});
  const Region cone = circuit_lightcone(brick, Region{2}, 4);
  EXPECT_TRUE(cone.includes(Region{2}));
  EXPECT_LE(cone.size(), 5u);  // f(4) = 9 on a line, and only 6 sites exist
  // Stack: layer1, layer0, layer0, layer1 from {2} -> {1,2} -> {0,1,2,3} -> same -> {0..4}.
  EXPECT_EQ(cone, Region::range(0, 5));
}

TEST(Lightcone, ContainmentProperty) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 4 + trial % 9;
    const bool line = trial % 2;
    const auto conn = line ? Connectivity::chain(n) : Connectivity::all_to_all();
    const int depth = 1 + trial % 3;
    const Circuit c = fixtures::random_circuit(n, conn, depth, rng);
    for (int t = 0; t <= 2 * depth; ++t)
      for (int site = 0; site < n; ++site)
        EXPECT_LE(circuit_lightcone(c, Region{site}, t).size(), lightcone_function(conn, t));
  }
}

TEST(ReducedDensity, Examples) {
  const CMatrix r0 = reduced_density_matrix(StateVector::zero(2), Region{0});
  EXPECT_NEAR(std::abs(r0(0, 0) - 1.0), 0.0, kTol);
  EXPECT_NEAR(r0.cwiseAbs().sum(), 1.0, kTol);

  const CMatrix rb = reduced_density_matrix(prepare(bell_circuit(2)), Region{0});
  EXPECT_LT((rb - CMatrix::Identity(2, 2) * 0.5).cwiseAbs().maxCoeff(), kTol);

  const CMatrix rw = reduced_density_matrix(w3(), Region{0});
  EXPECT_NEAR(rw(0, 0).real(), 2.0 / 3.0, kTol);
  EXPECT_NEAR(rw(1, 1).real(), 1.0 / 3.0, kTol);
  EXPECT_NEAR(std::abs(rw(0, 1)), 0.0, kTol);

  EXPECT_THROW(reduced_density_matrix(w3(), Region{3}), std::invalid_argument);
}

TEST(ReducedDensity, PsdTraceOneAndSparseAgreement) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 5;
    const StateVector s = StateVector::from_amplitudes(fixtures::random_state(1 << n, rng));
    std::vector<int> sites;
    for (int q = 0; q < n; ++q)
      if (std::bernoulli_distribution(0.5)(rng)) sites.push_back(q);
    const Region r(sites);
    const CMatrix rho = reduced_density_matrix(s, r);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-10);
    EXPECT_GT(hermitian_eigenvalues(rho).minCoeff(), -1e-10);

    const SparseDensity sp = reduced_density_active(s, r);
    ASSERT_EQ(static_cast<Eigen::Index>(sp.rows.size()), rho.rows());
    EXPECT_LT((sp.block - rho).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ReducedDensity, PartialTraceMonotonicity) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4 + trial % 3;
    const StateVector a = StateVector::from_amplitudes(fixtures::random_state(1 << n, rng));
    const StateVector b = StateVector::from_amplitudes(fixtures::random_state(1 << n, rng));
    const Region small{0, 2};
    const Region large{0, 1, 2};
    const double d_small = trace_norm(reduced_density_matrix(a, small) - reduced_density_matrix(b, small));
    const double d_large = trace_norm(reduced_density_matrix(a, large) - reduced_density_matrix(b, large));
    EXPECT_LE(d_small, d_large + 1e-10);
  }
}

TEST(ParentProjector, Examples) {
  const Circuit id{4, Connectivity::all_to_all(), {}};
  const auto p = conjugated_parent_projector(id, 2);
  EXPECT_EQ(p.support, (Region{2}));
  EXPECT_NEAR(std::abs(p.matrix(1, 1) - 1.0), 0.0, kTol);
  EXPECT_NEAR(std::abs(p.matrix(0, 0)), 0.0, kTol);

  const Circuit x{1, Connectivity::all_to_all(), {{Gate::named("X", {0})}}};
  const auto px = conjugated_parent_projector(x, 0);
  EXPECT_NEAR(std::abs(px.matrix(0, 0) - 1.0), 0.0, kTol);
  EXPECT_NEAR(std::abs(px.matrix(1, 1)), 0.0, kTol);

  const Circuit h{1, Connectivity::all_to_all(), {{Gate::named("H", {0})}}};
  const auto ph = conjugated_parent_projector(h, 0);
  CMatrix expect(2, 2);
  expect << 0.5, -0.5, -0.5, 0.5;
  EXPECT_LT((ph.matrix - expect).cwiseAbs().maxCoeff(), kTol);

  EXPECT_THROW(conjugated_parent_projector(id, 4), std::invalid_argument);
}

TEST(ParentProjector, AnnihilationAndIdempotenceProperty) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 3 + trial % 6;
    const auto conn = trial % 2 ? Connectivity::chain(n, true) : Connectivity::all_to_all();
    const Circuit c = fixtures::random_circuit(n, conn, 1 + trial % 3, rng);
    const StateVector psi = prepare(c);
    for (int i = 0; i < n; ++i) {
      const auto p = conjugated_parent_projector(c, i);
      EXPECT_LT((p.matrix * p.matrix - p.matrix).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LE(p.support.size(), lightcone_function(conn, c.depth()));
      EXPECT_EQ(p.support, forward_lightcone(c, Region{i}));
      EXPECT_LE(apply_operator(p, psi.amplitudes(), n).norm(), 1e-10);
    }
  }
}

TEST(Conjugation, MatchesDenseUnitary) {
  std::mt19937_64 rng(31);
  const int n = 4;
  const Circuit c = fixtures::random_circuit(n, Connectivity::all_to_all(), 2, rng);
  // Dense U from columns.
  CMatrix u(16, 16);
  for (int j = 0; j < 16; ++j) u.col(j) = apply_circuit(c, StateVector::basis(n, j)).amplitudes();
  const LocalOperator z1{Region{1}, pauli_z(), 2};
  const CMatrix full_z = embed_operator(pauli_z(), Region{1}, Region::range(0, n));
  const auto fwd = conjugate_forward(c, z1);
  const auto bwd = conjugate_backward(c, z1);
  EXPECT_LT((embed_operator(fwd.matrix, fwd.support, Region::range(0, n)) - u * full_z * u.adjoint()).cwiseAbs().maxCoeff(),
            1e-10);
  EXPECT_LT((embed_operator(bwd.matrix, bwd.support, Region::range(0, n)) - u.adjoint() * full_z * u).cwiseAbs().maxCoeff(),
            1e-10);
}

TEST(Overlap, Examples) {
  const StateVector s = StateVector::zero(3);
  EXPECT_NEAR(std::abs(state_overlap(s, s)), 1.0, kTol);
  EXPECT_NEAR(fubini_study_angle(s, s), 0.0, 1e-7);
  EXPECT_NEAR(std::abs(state_overlap(s, w3())), 0.0, kTol);
  EXPECT_NEAR(fubini_study_angle(s, w3()), kPi / 2, kTol);
  CVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const StateVector p = StateVector::from_amplitudes(plus);
  EXPECT_NEAR(std::abs(state_overlap(StateVector::zero(1), p)), 1.0 / std::sqrt(2.0), kTol);
  EXPECT_NEAR(fubini_study_angle(StateVector::zero(1), p), kPi / 4, kTol);
  EXPECT_THROW(state_overlap(StateVector::zero(1), s), std::invalid_argument);
}

TEST(Overlap, TraceDistanceIdentity) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 1 << (1 + trial % 4);
    const CVector a = fixtures::random_state(dim, rng);
    const CVector b = fixtures::random_state(dim, rng);
    const double direct = trace_norm(CMatrix(a * a.adjoint() - b * b.adjoint()));
    const StateVector sa = StateVector::from_amplitudes(a);
    const StateVector sb = StateVector::from_amplitudes(b);
    EXPECT_NEAR(direct, 2.0 * std::sqrt(1.0 - std::norm(state_overlap(sa, sb))), 1e-10);
    EXPECT_NEAR(direct, 2.0 * std::sin(fubini_study_angle(sa, sb)), 1e-10);
  }
}

TEST(Clustering, ProductState) {
  const Circuit id{4, Connectivity::all_to_all(), {}};
  const auto r = clustering_check(id, LocalOperator{Region{0}, pauli_z(), 2}, LocalOperator{Region{3}, pauli_z(), 2});
  EXPECT_FALSE(r.cones_intersect);
  EXPECT_NEAR(r.residual, 0.0, kTol);
  EXPECT_TRUE(r.factorizes);
}

TEST(Clustering, BellPair) {
  CMatrix hcx = named_gate_matrix("CX") * kron(named_gate_matrix("H"), named_gate_matrix("I"));
  const Circuit c{4, Connectivity::all_to_all(), {{Gate::unitary(hcx, {0, 1})}}};
  const auto far = clustering_check(c, LocalOperator{Region{0}, pauli_z(), 2}, LocalOperator{Region{3}, pauli_z(), 2});
  EXPECT_FALSE(far.cones_intersect);
  EXPECT_LE(far.residual, 1e-12);
  const auto near = clustering_check(c, LocalOperator{Region{0}, pauli_z(), 2}, LocalOperator{Region{1}, pauli_z(), 2});
  EXPECT_TRUE(near.cones_intersect);
  EXPECT_NEAR(near.residual, 1.0, 1e-12);
  EXPECT_THROW(clustering_check(c, LocalOperator{Region{0}, pauli_z(), 2}, LocalOperator{Region{0}, pauli_z(), 2}),
               std::invalid_argument);
}

TEST(Clustering, RandomCircuitsFactorizeOutsideCones) {
  std::mt19937_64 rng(77);
  int disjoint = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 6 + trial % 3;
    const Circuit c = fixtures::random_circuit(n, Connectivity::chain(n), 1 + trial % 2, rng);
    const LocalOperator p{Region{0}, fixtures::random_unitary(2, rng), 2};
    const LocalOperator q{Region{n - 1}, fixtures::random_unitary(2, rng), 2};
    const auto r = clustering_check(c, p, q);
    if (!r.cones_intersect) {
      ++disjoint;
      EXPECT_LE(r.residual, 1e-10);
    }
  }
  EXPECT_GT(disjoint, 0);
}

TEST(StateVector, Construction) {
  EXPECT_THROW(StateVector::from_amplitudes(CVector::Ones(3)), std::invalid_argument);
  EXPECT_THROW(StateVector::from_amplitudes(CVector::Ones(4)), std::invalid_argument);
  EXPECT_THROW(StateVector::normalized(CVector::Zero(4)), std::domain_error);
  EXPECT_EQ(StateVector::zero(3, 3).dimension(), 27);
  EXPECT_EQ(StateVector::zero(3, 3).num_sites(), 3);
  EXPECT_THROW(StateVector::zero(21), std::invalid_argument);
}

TEST(Excitation, MatchesProjectorExpectation) {
  const StateVector w = w3();
  EXPECT_NEAR(excitation_probability(w, Region{0, 1}), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(excitation_probability(StateVector::zero(3), Region{0, 1, 2}), 0.0, 1e-14);
}

}  // namespace
