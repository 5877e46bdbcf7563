#pragma once

#include <functional>
#include <vector>

#include "confbound/metric.hpp"

namespace confbound {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;  // positive, sum to 2
};

// Gauss-Legendre rule with n >= 1 points (cached; thread-safe).
const GaussRule& gauss_legendre(int n);

// Tensor-product rule over an axis-aligned box.
struct QuadratureRule {
  int orderPerAxis = 24;
};

// Pairwise (cascade) summation; deterministic for a fixed input order.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

// Number of worker threads: CONFBOUND_THREADS if set, else the hardware
// concurrency.
int worker_threads();

// Runs body(i) for i in [0, n) on up to worker_threads() threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace confbound
