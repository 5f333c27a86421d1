#pragma once

#include <functional>
#include <span>
#include <vector>

namespace nvcorr {

// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Computed by Newton iteration on the Legendre recurrence; cached per order.
const GaussLegendre& gauss_legendre(int order);

// Composite Gauss-Legendre integral of f over [a, b] using `panels` equal
// panels of `order` nodes each.
double integrate_panels(const std::function<double(double)>& f, double a,
                        double b, int panels, int order);

// Order-independent deterministic reduction; also more accurate than a
// running sum for long vectors.
double pairwise_sum(std::span<const double> values);

}  // namespace nvcorr
