#include "aqec/lll.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "aqec/types.hpp"

namespace aqec::lll {

JointDistribution::JointDistribution(std::vector<double> probs, std::vector<Event> events)
    : probs_(std::move(probs)), events_(std::move(events)) {
  if (probs_.empty()) throw std::invalid_argument("JointDistribution: empty outcome space");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw std::invalid_argument("JointDistribution: negative or NaN probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("JointDistribution: probabilities sum to " + std::to_string(total));
  for (auto& e : events_) {
    std::sort(e.outcomes.begin(), e.outcomes.end());
    e.outcomes.erase(std::unique(e.outcomes.begin(), e.outcomes.end()), e.outcomes.end());
    if (!e.outcomes.empty() && e.outcomes.back() >= probs_.size())
      throw std::invalid_argument("JointDistribution: event '" + e.name + "' references an outcome out of range");
  }
}

double JointDistribution::probability(std::size_t event) const {
  if (event >= events_.size()) throw std::out_of_range("JointDistribution: invalid event index");
  double p = 0.0;
  for (auto o : events_[event].outcomes) p += probs_[o];
  return p;
}

std::vector<std::uint32_t> JointDistribution::membership(std::span<const std::size_t> event_indices) const {
  if (event_indices.size() > 32) throw std::invalid_argument("membership: more than 32 events");
  std::vector<std::uint32_t> mask(probs_.size(), 0u);
  for (std::size_t j = 0; j < event_indices.size(); ++j) {
    const auto idx = event_indices[j];
    if (idx >= events_.size()) throw std::out_of_range("invalid event index " + std::to_string(idx));
    for (auto o : events_[idx].outcomes) mask[o] |= (1u << j);
  }
  return mask;
}

bool DependencyGraph::is_symmetric() const {
  for (std::size_t i = 0; i < gamma.size(); ++i)
    for (auto j : gamma[i])
      if (std::find(gamma[j].begin(), gamma[j].end(), i) == gamma[j].end()) return false;
  return true;
}

std::size_t DependencyGraph::max_degree() const {
  std::size_t d = 0;
  for (const auto& g : gamma) d = std::max(d, g.size());
  return d;
}

void DependencyGraph::validate() const {
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    for (auto j : gamma[i]) {
      if (j >= gamma.size()) throw std::invalid_argument("DependencyGraph: neighbour index out of range");
      if (j == i) throw std::invalid_argument("DependencyGraph: event " + std::to_string(i) + " lists itself");
    }
  }
}

void LllAssignment::validate() const {
  if (!(c >= 1.0)) throw std::invalid_argument("LllAssignment: c must be >= 1");
  for (double xi : x)
    if (!(xi >= 0.0) || !(xi < 1.0 / c)) throw std::invalid_argument("LllAssignment: x_i must lie in [0, 1/c)");
}

BoundResult symmetric_bound(double p, std::size_t d, std::size_t n, double c) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("symmetric_bound: p must lie in [0, 1]");
  if (!(c >= 1.0)) throw std::invalid_argument("symmetric_bound: c must be >= 1");
  BoundResult r;
  r.condition_lhs = c * kEuler * static_cast<double>(d + 1) * p;
  r.condition_rhs = 1.0;
  if (r.condition_lhs > r.condition_rhs) {
    r.status = BoundStatus::condition_violation;
    return r;
  }
  r.value = std::pow(1.0 - c * kEuler * p, static_cast<double>(n));
  return r;
}

BoundResult symmetric_bound(std::span<const double> probs, const DependencyGraph& graph, double c) {
  if (probs.size() != graph.size()) throw std::invalid_argument("symmetric_bound: dimension mismatch");
  graph.validate();
  if (!graph.is_symmetric()) throw std::invalid_argument("symmetric_bound: dependency graph is not symmetric");
  const double p = probs.empty() ? 0.0 : *std::max_element(probs.begin(), probs.end());
  return symmetric_bound(p, graph.max_degree(), probs.size(), c);
}

BoundResult glll_bound(std::span<const double> probs, const DependencyGraph& graph, const LllAssignment& assign) {
  if (probs.size() != graph.size() || probs.size() != assign.x.size())
    throw std::invalid_argument("glll_bound: dimension mismatch");
  graph.validate();
  assign.validate();
  const double c = assign.c;
  BoundResult r;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    double rhs = assign.x[i];
    for (auto j : graph.gamma[i]) rhs *= 1.0 - c * assign.x[j];
    if (probs[i] > rhs) {
      r.status = BoundStatus::condition_violation;
      r.failing_index = i;
      r.condition_lhs = probs[i];
      r.condition_rhs = rhs;
      return r;
    }
  }
  r.value = 1.0;
  for (double xi : assign.x) r.value *= 1.0 - c * xi;
  return r;
}

double exact_none_probability(const JointDistribution& dist, std::span<const std::size_t> event_indices) {
  std::vector<char> hit(dist.outcome_count(), 0);
  for (auto idx : event_indices) {
    if (idx >= dist.event_count()) throw std::out_of_range("exact_none_probability: invalid event index");
    for (auto o : dist.events()[idx].outcomes) hit[o] = 1;
  }
  double total = 0.0;
  for (std::size_t o = 0; o < dist.outcome_count(); ++o)
    if (!hit[o]) total += dist.probs()[o];
  return total;
}

LopsidedReport verify_lopsided_condition(const JointDistribution& dist, std::span<const std::size_t> event_indices,
                                         const DependencyGraph& graph, double c) {
  const std::size_t n = event_indices.size();
  if (n > kMaxLopsidedEvents)
    throw std::invalid_argument("verify_lopsided_condition: at most " + std::to_string(kMaxLopsidedEvents) +
                                " events supported");
  if (graph.size() != n) throw std::invalid_argument("verify_lopsided_condition: graph size mismatch");
  graph.validate();

  // Weight of each membership pattern, then subset sums g[T] = sum_{mask subset of T} w[mask].
  // P(none of S) = g[~S], P(A_i and none of S) = g[~S] - g[~S \ {i}].
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<double> g(full + 1, 0.0);
  const auto mask = dist.membership(event_indices);
  for (std::size_t o = 0; o < mask.size(); ++o) g[mask[o]] += dist.probs()[o];
  for (std::size_t b = 0; b < n; ++b) {
    const std::size_t bit = std::size_t{1} << b;
    for (std::size_t t = 0; t <= full; ++t)
      if (t & bit) g[t] += g[t ^ bit];
  }

  LopsidedReport rep;
  rep.c = c;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bi = std::size_t{1} << i;
    const double pa = std::max(0.0, 1.0 - g[full ^ bi]);
    std::size_t allowed = full & ~bi;
    for (auto j : graph.gamma[i]) allowed &= ~(std::size_t{1} << j);

    for (std::size_t s = allowed;; s = (s - 1) & allowed) {
      ++rep.sets_checked;
      const std::size_t comp = full & ~s;
      const double none = g[comp];
      if (none <= 0.0) {
        ++rep.degenerate_sets;
      } else {
        double ratio = 0.0;
        if (pa > 0.0) {
          const double joint = std::max(0.0, none - g[comp ^ bi]);
          ratio = joint / none / pa;
        }
        if (ratio > rep.max_ratio) {
          rep.max_ratio = ratio;
          rep.argmax_event = i;
          rep.argmax_set.clear();
          for (std::size_t j = 0; j < n; ++j)
            if (s & (std::size_t{1} << j)) rep.argmax_set.push_back(j);
        }
      }
      if (s == 0) break;
    }
  }
  rep.passes = rep.max_ratio <= c + 1e-12;
  return rep;
}

double solve_x0(double p, double c, std::size_t d) {
  if (!(c > 0.0)) throw std::invalid_argument("solve_x0: c must be positive");
  const double dd = static_cast<double>(d);
  auto f = [&](double x) { return x * std::pow(1.0 - c * x, dd); };
  const double hi0 = 1.0 / (c * (dd + 1.0));
  const double fmax = f(hi0);
  if (!(p > 0.0) || p > fmax)
    throw std::domain_error("solve_x0: p = " + std::to_string(p) + " outside (0, " + std::to_string(fmax) + "]");

  double lo = 0.0;
  double hi = hi0;
  double best = hi0;
  double best_err = std::abs(fmax - p);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    const double err = std::abs(fm - p);
    if (err < best_err) {
      best = mid;
      best_err = err;
    }
    if (err <= 1e-14 && it > 0) break;
    if (fm < p)
      lo = mid;
    else
      hi = mid;
  }
  return best;
}

}  // namespace aqec::lll
