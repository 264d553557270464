#pragma once

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

#include "patchflow/types.hpp"

namespace patchflow {

/// n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) {
    if (n < 1) throw DomainError("Gauss-Legendre rule needs at least one node");
    const auto pos = boost::math::legendre_p_zeros<double>(n);  // nonnegative zeros
    for (double z : pos) {
      const double dp = boost::math::legendre_p_prime(n, z);
      const double w = 2.0 / ((1.0 - z * z) * dp * dp);
      nodes.push_back(z);
      weights.push_back(w);
      if (z != 0.0) {
        nodes.push_back(-z);
        weights.push_back(w);
      }
    }
    std::vector<std::size_t> idx(nodes.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });
    std::vector<double> xs, ws;
    for (std::size_t i : idx) {
      xs.push_back(nodes[i]);
      ws.push_back(weights[i]);
    }
    nodes = std::move(xs);
    weights = std::move(ws);
  }

  std::size_t size() const { return nodes.size(); }

  /// Calls f(x, w) for the rule mapped to [a, b].
  template <class F>
  void apply(double a, double b, F&& f) const {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < nodes.size(); ++i) f(mid + half * nodes[i], half * weights[i]);
  }
};

/// Shared, lazily built rules.
inline const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, GaussLegendre(n)).first;
  return it->second;
}

}  // namespace patchflow
