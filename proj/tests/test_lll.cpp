#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "aqec/lll.hpp"
#include "aqec/types.hpp"
#include "support/bit_instances.hpp"

namespace {

using namespace aqec::lll;

// Outcome o of m fair bits; bit b of o is bit number b (bit 0 least significant).
JointDistribution fair_bits(std::size_t m, std::vector<Event> events) {
  const std::size_t outcomes = std::size_t{1} << m;
  return JointDistribution(std::vector<double>(outcomes, 1.0 / static_cast<double>(outcomes)), std::move(events));
}

Event conjunction(std::string name, std::size_t m, std::vector<std::size_t> bits_set) {
  Event e{std::move(name), {}};
  for (std::size_t o = 0; o < (std::size_t{1} << m); ++o) {
    bool hit = true;
    for (auto b : bits_set) hit = hit && ((o >> b) & 1u);
    if (hit) e.outcomes.push_back(o);
  }
  return e;
}

TEST(JointDistribution, RejectsBadProbabilities) {
  EXPECT_THROW(JointDistribution({0.5, 0.6}, {}), std::invalid_argument);
  EXPECT_THROW(JointDistribution({1.5, -0.5}, {}), std::invalid_argument);
  EXPECT_THROW(JointDistribution({}, {}), std::invalid_argument);
  EXPECT_THROW(JointDistribution({1.0}, {{"bad", {1}}}), std::invalid_argument);
  EXPECT_NO_THROW(JointDistribution({1.0}, {{"empty", {}}}));
}

TEST(SymmetricBound, ZeroProbability) {
  const auto r = symmetric_bound(0.0, 3, 5, 1.0);
  ASSERT_TRUE(r.ok());
  EXPECT_DOUBLE_EQ(r.value, 1.0);
}

TEST(SymmetricBound, ModerateProbability) {
  const auto r = symmetric_bound(0.1, 2, 3, 1.0);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r.value, std::pow(1.0 - aqec::kEuler * 0.1, 3), 1e-15);
  EXPECT_NEAR(r.value, 0.3861016, 1e-7);
}

TEST(SymmetricBound, ConditionViolation) {
  const auto r = symmetric_bound(0.5, 1, 2, 1.0);
  EXPECT_EQ(r.status, BoundStatus::condition_violation);
  EXPECT_GT(r.condition_lhs, r.condition_rhs);
}

TEST(SymmetricBound, RejectsBadInputs) {
  EXPECT_THROW(symmetric_bound(-0.1, 1, 1), std::invalid_argument);
  EXPECT_THROW(symmetric_bound(0.1, 1, 1, 0.5), std::invalid_argument);
  DependencyGraph asym{{{1}, {}}};
  const std::vector<double> probs{0.01, 0.01};
  EXPECT_THROW(symmetric_bound(probs, asym), std::invalid_argument);
}

TEST(GlllBound, IndependentCase) {
  const std::vector<double> probs{0.2, 0.3};
  const auto r = glll_bound(probs, DependencyGraph::empty(2), {1.0, {0.2, 0.3}});
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r.value, 0.56, 1e-15);
}

TEST(GlllBound, TightNeighbourCondition) {
  const std::vector<double> probs{0.1875, 0.1875};
  const auto r = glll_bound(probs, DependencyGraph{{{1}, {0}}}, {1.0, {0.25, 0.25}});
  ASSERT_TRUE(r.ok());
  EXPECT_DOUBLE_EQ(r.value, 0.5625);
}

TEST(GlllBound, ViolationReportsIndex) {
  const std::vector<double> probs{0.5};
  const auto r = glll_bound(probs, DependencyGraph::empty(1), {1.0, {0.4}});
  EXPECT_EQ(r.status, BoundStatus::condition_violation);
  ASSERT_TRUE(r.failing_index.has_value());
  EXPECT_EQ(*r.failing_index, 0u);
}

TEST(GlllBound, DimensionMismatchAndBadAssignment) {
  const std::vector<double> probs{0.1, 0.1};
  EXPECT_THROW(glll_bound(probs, DependencyGraph::empty(1), {1.0, {0.1, 0.1}}), std::invalid_argument);
  EXPECT_THROW(glll_bound(probs, DependencyGraph::empty(2), {2.0, {0.1, 0.6}}), std::invalid_argument);
  EXPECT_THROW(glll_bound(probs, DependencyGraph{{{0}, {}}}, {1.0, {0.1, 0.1}}), std::invalid_argument);
}

TEST(ExactNone, TwoFairBits) {
  const auto dist = fair_bits(2, {conjunction("b0", 2, {0}), conjunction("b1", 2, {1})});
  const std::vector<std::size_t> idx{0, 1};
  EXPECT_DOUBLE_EQ(exact_none_probability(dist, idx), 0.25);
}

TEST(ExactNone, OverlappingConjunctions) {
  const auto dist = fair_bits(3, {conjunction("b0b1", 3, {0, 1}), conjunction("b1b2", 3, {1, 2})});
  const std::vector<std::size_t> idx{0, 1};
  EXPECT_DOUBLE_EQ(exact_none_probability(dist, idx), 0.625);
  EXPECT_DOUBLE_EQ(exact_none_probability(dist, {}), 1.0);
  const std::vector<std::size_t> bad{2};
  EXPECT_THROW(exact_none_probability(dist, bad), std::out_of_range);
}

TEST(Lopsided, IndependentEvents) {
  const auto dist = fair_bits(3, {conjunction("b0", 3, {0}), conjunction("b1", 3, {1}), conjunction("b2", 3, {2})});
  const std::vector<std::size_t> idx{0, 1, 2};
  const auto rep = verify_lopsided_condition(dist, idx, DependencyGraph::empty(3), 1.0);
  EXPECT_NEAR(rep.max_ratio, 1.0, 1e-15);
  EXPECT_TRUE(rep.passes);
}

TEST(Lopsided, PositivelyCorrelatedComplements) {
  const auto dist = fair_bits(3, {conjunction("b0b1", 3, {0, 1}), conjunction("b1b2", 3, {1, 2})});
  const std::vector<std::size_t> idx{0, 1};
  const auto rep = verify_lopsided_condition(dist, idx, DependencyGraph::empty(2), 1.0);
  EXPECT_NEAR(rep.max_ratio, 1.0, 1e-15);  // S = {} gives 1, S = {other} gives 2/3
  EXPECT_TRUE(rep.passes);
  EXPECT_TRUE(rep.argmax_set.empty());
}

TEST(Lopsided, ComplementaryEvents) {
  Event a{"b0", {1, 3}};
  Event b{"not b0", {0, 2}};
  const auto dist = fair_bits(2, {a, b});
  const std::vector<std::size_t> idx{0, 1};
  const auto rep = verify_lopsided_condition(dist, idx, DependencyGraph::empty(2), 1.0);
  EXPECT_NEAR(rep.max_ratio, 2.0, 1e-15);
  EXPECT_FALSE(rep.passes);
  EXPECT_TRUE(verify_lopsided_condition(dist, idx, DependencyGraph::empty(2), 2.0).passes);
}

TEST(Lopsided, DegenerateConditioningIsSkipped) {
  // A1 certain, so "none of {A1}" has probability zero.
  const auto dist = fair_bits(1, {Event{"always", {0, 1}}, Event{"b0", {1}}});
  const std::vector<std::size_t> idx{0, 1};
  const auto rep = verify_lopsided_condition(dist, idx, DependencyGraph::empty(2), 1.0);
  EXPECT_GT(rep.degenerate_sets, 0u);
}

TEST(Lopsided, ZeroProbabilityEventHasRatioZero) {
  const auto dist = fair_bits(1, {Event{"never", {}}});
  const std::vector<std::size_t> idx{0};
  const auto rep = verify_lopsided_condition(dist, idx, DependencyGraph::empty(1), 1.0);
  EXPECT_EQ(rep.max_ratio, 0.0);
  EXPECT_TRUE(rep.passes);
}

TEST(Lopsided, TooManyEvents) {
  std::vector<Event> events(21, Event{"e", {0}});
  const auto dist = fair_bits(1, events);
  std::vector<std::size_t> idx(21);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  EXPECT_THROW(verify_lopsided_condition(dist, idx, DependencyGraph::empty(21), 1.0), std::invalid_argument);
}

// Brute-force ratio over explicit subsets, independent of the subset-sum transform.
double brute_max_ratio(const JointDistribution& dist, const DependencyGraph& g) {
  const std::size_t n = dist.event_count();
  auto in_event = [&](std::size_t o, std::size_t e) {
    const auto& out = dist.events()[e].outcomes;
    return std::find(out.begin(), out.end(), o) != out.end();
  };
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pa = dist.probability(i);
    if (pa == 0.0) continue;
    for (std::size_t s = 0; s < (std::size_t{1} << n); ++s) {
      if (s & (std::size_t{1} << i)) continue;
      bool ok = true;
      for (auto j : g.gamma[i]) ok = ok && !(s & (std::size_t{1} << j));
      if (!ok) continue;
      double none = 0.0, joint = 0.0;
      for (std::size_t o = 0; o < dist.outcome_count(); ++o) {
        bool avoided = true;
        for (std::size_t j = 0; j < n; ++j)
          if ((s >> j) & 1u) avoided = avoided && !in_event(o, j);
        if (!avoided) continue;
        none += dist.probs()[o];
        if (in_event(o, i)) joint += dist.probs()[o];
      }
      if (none > 0.0) best = std::max(best, joint / none / pa);
    }
  }
  return best;
}

TEST(LopsidedProperty, MatchesBruteForce) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = aqec::fixtures::random_bit_instance(rng, 8, 5);
    const auto thinned = aqec::fixtures::thin_graph(inst.graph, 0.5, rng);
    const auto rep = verify_lopsided_condition(inst.dist, inst.indices, thinned, 1.0);
    const double brute = brute_max_ratio(inst.dist, thinned);
    EXPECT_NEAR(rep.max_ratio, brute, 1e-12 * std::max(1.0, brute));
  }
}

TEST(LopsidedProperty, SharedBitGraphGivesRatioOne) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto inst = aqec::fixtures::random_bit_instance(rng, 12, 8);
    const auto rep = verify_lopsided_condition(inst.dist, inst.indices, inst.graph, 1.0);
    EXPECT_TRUE(rep.passes) << "max ratio " << rep.max_ratio;
    EXPECT_NEAR(rep.max_ratio, 1.0, 1e-9);
  }
}

TEST(OracleProperty, IndependentCaseIsExact) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> kd(1, 8);
  for (int trial = 0; trial < 50; ++trial) {
    // One disjoint bit block per event: events are mutually independent.
    const std::size_t k = kd(rng);
    std::vector<double> bias(k);
    std::uniform_real_distribution<double> u(0.05, 0.9);
    for (auto& b : bias) b = u(rng);
    std::vector<double> probs(std::size_t{1} << k, 1.0);
    for (std::size_t o = 0; o < probs.size(); ++o)
      for (std::size_t b = 0; b < k; ++b) probs[o] *= ((o >> b) & 1u) ? bias[b] : 1.0 - bias[b];
    double total = 0.0;
    for (double p : probs) total += p;
    for (double& p : probs) p /= total;
    std::vector<Event> events;
    for (std::size_t b = 0; b < k; ++b) events.push_back(conjunction("b", k, {b}));
    const JointDistribution dist(probs, events);
    std::vector<std::size_t> idx(k);
    std::vector<double> pa(k);
    for (std::size_t i = 0; i < k; ++i) {
      idx[i] = i;
      pa[i] = dist.probability(i);
    }
    const auto r = glll_bound(pa, DependencyGraph::empty(k), {1.0, pa});
    ASSERT_TRUE(r.ok());
    EXPECT_NEAR(r.value, exact_none_probability(dist, idx), 1e-13);
  }
}

TEST(OracleProperty, BoundsNeverExceedExactProbability) {
  std::mt19937_64 rng(123);
  int verified = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto inst = aqec::fixtures::random_bit_instance(rng, 10, 6);
    const double exact = exact_none_probability(inst.dist, inst.indices);
    std::vector<double> pa(inst.indices.size());
    for (std::size_t i = 0; i < pa.size(); ++i) pa[i] = inst.dist.probability(i);

    const auto sym = symmetric_bound(pa, inst.graph);
    if (sym.ok()) {
      ++verified;
      EXPECT_GT(exact, sym.value - 1e-12);
    }
    for (double mult : {1.0, 1.2, 1.5, 2.0, 3.0}) {
      LllAssignment assign{1.0, {}};
      for (double p : pa) assign.x.push_back(std::min(mult * p, 0.999));
      const auto r = glll_bound(pa, inst.graph, assign);
      if (!r.ok()) continue;
      ++verified;
      EXPECT_GE(exact, r.value - 1e-12);
    }
  }
  EXPECT_GT(verified, 100);
}

TEST(SolveX0, Examples) {
  EXPECT_NEAR(solve_x0(0.3, 1.0, 0), 0.3, 1e-14);
  EXPECT_NEAR(solve_x0(0.21, 1.0, 1), 0.3, 1e-12);
  EXPECT_THROW(solve_x0(0.5, 1.0, 1), std::domain_error);
  EXPECT_THROW(solve_x0(0.0, 1.0, 1), std::domain_error);
}

TEST(SolveX0, BracketProperty) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> frac(0.01, 1.0);
  std::uniform_real_distribution<double> cd(1.0, 4.0);
  std::uniform_int_distribution<std::size_t> dd(0, 20);
  for (int trial = 0; trial < 500; ++trial) {
    const double c = cd(rng);
    const std::size_t d = dd(rng);
    const double xmax = 1.0 / (c * (static_cast<double>(d) + 1.0));
    const double fmax = xmax * std::pow(1.0 - c * xmax, static_cast<double>(d));
    const double p = frac(rng) * fmax;
    const double x = solve_x0(p, c, d);
    EXPECT_GT(x, 0.0);
    EXPECT_LE(x, xmax);
    EXPECT_LT(x, aqec::kEuler * p);
    EXPECT_LE(std::abs(x * std::pow(1.0 - c * x, static_cast<double>(d)) - p), 1e-14);
  }
}

TEST(ProofInequality, OneMinusReciprocalPower) {
  for (int d = 1; d <= 64; ++d) EXPECT_GT(std::pow(1.0 - 1.0 / (d + 1.0), d), 1.0 / aqec::kEuler) << d;
}

}  // namespace
