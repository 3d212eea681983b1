#pragma once

// Lovász local lemma bound engines (symmetric, asymmetric, generalized lopsided) and
// exact enumeration oracles over explicit finite probability spaces.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aqec::lll {

struct Event {
  std::string name;
  std::vector<std::size_t> outcomes;
};

/// A finite probability space with named events. Probabilities are checked to be
/// non-negative and to sum to one within 1e-12.
class JointDistribution {
 public:
  JointDistribution(std::vector<double> probs, std::vector<Event> events);

  std::size_t outcome_count() const { return probs_.size(); }
  std::size_t event_count() const { return events_.size(); }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<Event>& events() const { return events_; }

  double probability(std::size_t event) const;

  /// Per-outcome membership bitmask over the listed events (bit j set when the outcome
  /// belongs to events[event_indices[j]]). At most 32 events.
  std::vector<std::uint32_t> membership(std::span<const std::size_t> event_indices) const;

 private:
  std::vector<double> probs_;
  std::vector<Event> events_;
};

/// Dependency sets Gamma(i). Need not be symmetric; i never belongs to gamma[i].
struct DependencyGraph {
  std::vector<std::vector<std::size_t>> gamma;

  std::size_t size() const { return gamma.size(); }
  bool is_symmetric() const;
  std::size_t max_degree() const;
  void validate() const;

  static DependencyGraph empty(std::size_t n) { return {std::vector<std::vector<std::size_t>>(n)}; }
};

/// The constant c >= 1 and the weights x_i in [0, 1/c) of the generalized lemma.
struct LllAssignment {
  double c = 1.0;
  std::vector<double> x;

  void validate() const;
};

enum class BoundStatus { ok, condition_violation };

/// Outcome of a bound attempt. A violated hypothesis is a normal result, not an
/// exception, so callers can chain attempts.
struct BoundResult {
  BoundStatus status = BoundStatus::ok;
  double value = 0.0;                       // the lower bound when status == ok
  std::optional<std::size_t> failing_index;  // first failing event (glll path)
  double condition_lhs = 0.0;
  double condition_rhs = 0.0;

  bool ok() const { return status == BoundStatus::ok; }
};

/// (1 - c e p)^n when c e (d+1) p <= 1.
BoundResult symmetric_bound(double p, std::size_t d, std::size_t n, double c = 1.0);

/// Symmetric bound with p = max P(A_i) and d = max |Gamma(i)|; the graph must be symmetric.
BoundResult symmetric_bound(std::span<const double> probs, const DependencyGraph& graph, double c = 1.0);

/// prod_i (1 - c x_i) when P(A_i) <= x_i prod_{j in Gamma(i)} (1 - c x_j) for every i.
BoundResult glll_bound(std::span<const double> probs, const DependencyGraph& graph, const LllAssignment& assign);

/// Exact P(no listed event occurs).
double exact_none_probability(const JointDistribution& dist, std::span<const std::size_t> event_indices);

struct LopsidedReport {
  double max_ratio = 0.0;
  double c = 1.0;
  bool passes = false;
  std::size_t argmax_event = 0;           // position in event_indices
  std::vector<std::size_t> argmax_set;    // positions in event_indices
  std::size_t sets_checked = 0;
  std::size_t degenerate_sets = 0;        // P(none of S) == 0, skipped
};

inline constexpr std::size_t kMaxLopsidedEvents = 20;

/// max over i and S subset of [n] - Gamma(i) - {i} of P(A_i | none of S) / P(A_i), compared
/// against c. Events with P(A_i) = 0 contribute ratio 0. Graph positions refer to
/// event_indices.
LopsidedReport verify_lopsided_condition(const JointDistribution& dist, std::span<const std::size_t> event_indices,
                                         const DependencyGraph& graph, double c);

/// Root of x (1 - c x)^d = p on (0, 1/(c(d+1))) by bisection.
double solve_x0(double p, double c, std::size_t d);

}  // namespace aqec::lll
