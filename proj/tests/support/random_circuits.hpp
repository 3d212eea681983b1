#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "aqec/circuit.hpp"

namespace aqec::fixtures {

inline CMatrix random_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(a);
  CMatrix q = qr.householderQ();
  // Fix column phases so the distribution is Haar.
  const CMatrix r = qr.matrixQR();
  for (int j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

inline CVector random_state(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cplx(g(rng), g(rng));
  return v / v.norm();
}

/// Random layers of disjoint one- and two-qubit gates respecting `conn`.
inline Circuit random_circuit(int n, const Connectivity& conn, int depth, std::mt19937_64& rng,
                              double single_fraction = 0.25) {
  Circuit c{n, conn, {}};
  std::bernoulli_distribution single(single_fraction);
  for (int l = 0; l < depth; ++l) {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    Layer layer;
    for (int a : order) {
      if (used[static_cast<std::size_t>(a)]) continue;
      if (single(rng)) {
        used[static_cast<std::size_t>(a)] = 1;
        layer.push_back(Gate::unitary(random_unitary(2, rng), {a}));
        continue;
      }
      std::vector<int> partners;
      for (int b = 0; b < n; ++b) {
        const std::vector<int> pair{a, b};
        if (b != a && !used[static_cast<std::size_t>(b)] && conn.allows(pair)) partners.push_back(b);
      }
      if (partners.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick(0, partners.size() - 1);
      const int b = partners[pick(rng)];
      used[static_cast<std::size_t>(a)] = used[static_cast<std::size_t>(b)] = 1;
      layer.push_back(Gate::unitary(random_unitary(4, rng), {a, b}));
    }
    c.layers.push_back(std::move(layer));
  }
  return c;
}

}  // namespace aqec::fixtures
