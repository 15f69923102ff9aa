#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace vfield {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(std::size_t n);

/// Pairwise (cascade) summation. The result depends only on the input order.
double pairwise_sum(std::span<const double> values);

/// Evaluates row(i) for i in [0, count) on up to `threads` worker threads and
/// returns the results in index order. Work assignment does not affect values.
std::vector<double> evaluate_rows(std::size_t count, unsigned threads,
                                  const std::function<double(std::size_t)>& row);

}  // namespace vfield
