#include "lanemb/lovasz.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace lanemb {

std::vector<double> jaccard_grad_increments(std::span<const int> sorted_labels) {
    const size_t n = sorted_labels.size();
    size_t positives = 0;
    for (int y : sorted_labels) positives += (y != 0);

    std::vector<double> inc(n);
    size_t cum_pos = 0, cum_neg = 0;
    double prev = 0.0;
    for (size_t j = 0; j < n; ++j) {
        cum_pos += (sorted_labels[j] != 0);
        cum_neg += (sorted_labels[j] == 0);
        size_t inter = positives - cum_pos;
        size_t uni = positives + cum_neg;
        double jacc = (uni == 0) ? 0.0
                                 : 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
        inc[j] = jacc - prev;
        prev = jacc;
    }
    return inc;
}

namespace {

struct Prepared {
    std::vector<double> errors;     // hinge errors per element
    std::vector<size_t> order;      // indices sorted by descending error (stable)
    std::vector<double> weights;    // increment weight per sorted position
};

Prepared prepare(std::span<const double> scores, std::span<const int> labels) {
    const size_t n = scores.size();
    if (n == 0) throw std::domain_error("lovasz_hinge: empty input");
    if (labels.size() != n) throw std::domain_error("lovasz_hinge: length mismatch");
    for (int y : labels)
        if (y != 0 && y != 1) throw std::domain_error("lovasz_hinge: labels must be 0/1");

    Prepared p;
    p.errors.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double sign = labels[i] ? 1.0 : -1.0;
        p.errors[i] = std::max(0.0, 1.0 - scores[i] * sign);
    }
    p.order.resize(n);
    std::iota(p.order.begin(), p.order.end(), size_t{0});
    std::stable_sort(p.order.begin(), p.order.end(),
                     [&](size_t a, size_t b) { return p.errors[a] > p.errors[b]; });

    std::vector<int> sorted_labels(n);
    for (size_t j = 0; j < n; ++j) sorted_labels[j] = labels[p.order[j]];
    p.weights = jaccard_grad_increments(sorted_labels);
    return p;
}

}  // namespace

double lovasz_hinge(std::span<const double> scores, std::span<const int> labels) {
    Prepared p = prepare(scores, labels);
    double loss = 0.0;
    for (size_t j = 0; j < p.order.size(); ++j)
        loss += p.weights[j] * p.errors[p.order[j]];
    return loss;
}

std::vector<double> lovasz_hinge_grad(std::span<const double> scores,
                                      std::span<const int> labels) {
    Prepared p = prepare(scores, labels);
    std::vector<double> grad(scores.size(), 0.0);
    for (size_t j = 0; j < p.order.size(); ++j) {
        size_t i = p.order[j];
        if (p.errors[i] > 0.0) {
            double sign = labels[i] ? 1.0 : -1.0;
            grad[i] = -sign * p.weights[j];
        }
    }
    return grad;
}

}  // namespace lanemb
