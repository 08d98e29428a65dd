// Lovasz hinge: piecewise-linear convex surrogate for the Jaccard set loss.

#pragma once

#include <span>
#include <vector>

namespace lanemb {

// Hinge errors m_i = max(0, 1 - s_i * yhat_i), yhat = 2y - 1, weighted by the
// Jaccard-gradient increments of the ground truth sorted by descending error.
// labels must be 0/1; throws std::domain_error otherwise or on empty input.
double lovasz_hinge(std::span<const double> scores, std::span<const int> labels);

// Subgradient wrt scores. Sort permutation and Jaccard coefficients are
// treated as constants of the forward pass; at m = 0 the flat side is taken.
std::vector<double> lovasz_hinge_grad(std::span<const double> scores,
                                      std::span<const int> labels);

// Jaccard-gradient increments for labels already sorted by descending error.
std::vector<double> jaccard_grad_increments(std::span<const int> sorted_labels);

}  // namespace lanemb
