#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "ctxsal/matrix.hpp"

namespace ctxsal {

/// Same-shape 1-D average pooling along time (stride 1). Entry (ch, t) is the
/// mean of row ch over [t - kernel/2, t + kernel/2] clipped to valid columns,
/// so windows shrink at the edges instead of reading zero padding.
/// `kernel` must be odd; throws InvalidArgument otherwise.
EegMatrix avg_pool_temporal(const EegMatrix& x, std::size_t kernel);

/// As avg_pool_temporal, with the window sliding over channels for each column.
EegMatrix avg_pool_spatial(const EegMatrix& x, std::size_t kernel);

struct PairWeights {
  double first;
  double second;
};

/// Two-way softmax, evaluated after subtracting max(a, b).
PairWeights pairwise_softmax(double a, double b);

/// Softmax over a probability-sized vector, max-shifted.
std::vector<double> softmax(std::span<const double> logits);

/// Central differences (g(x + eps e_i) - g(x - eps e_i)) / (2 eps) for every
/// entry. Throws NumericError when g returns a non-finite value.
EegMatrix finite_difference_gradient(const std::function<double(const EegMatrix&)>& g,
                                     const EegMatrix& x, double eps);

}  // namespace ctxsal
