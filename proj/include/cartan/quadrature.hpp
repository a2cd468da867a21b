#pragma once

#include <vector>

namespace cartan {

/// Nodes and weights with sum_q weights[q] f(nodes[q]) approximating an
/// integral or an expectation, depending on the producer.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the weight exp(-x^2); exact for polynomials of
/// degree < 2 * count. Nodes ascend.
QuadratureRule gauss_hermite(int count);

}  // namespace cartan
