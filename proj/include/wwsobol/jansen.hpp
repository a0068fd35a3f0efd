// Jansen pick-freeze estimator of first-order indices.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wwsobol/core.hpp"
#include "wwsobol/models.hpp"
#include "wwsobol/sampling.hpp"

namespace wws {

/// S = 1 - sum (y_b - y_h)^2 / (2 n var), with var the 1/(2n) variance of the
/// pooled 2n values {y_b, y_h}. `y_b[i]` is f at sample_b row i and `y_h[i]` at
/// sample_a row i with column l taken from sample_b.
/// Throws std::domain_error("zero output variance") when the pool is constant.
SobolEstimate jansen_from_outputs(std::span<const double> y_b, std::span<const double> y_h,
                                  std::string input_name);

/// Evaluations of one pick-freeze run; `calls` counts model evaluations.
struct JansenRun {
  std::vector<SobolEstimate> estimates;
  std::size_t calls = 0;
};

/// All p indices from one design: n evaluations of sample_b shared across
/// inputs plus n hybrid evaluations per input, n (p + 1) calls in total.
/// Evaluation i of sample_b uses nuisance.child(0).child(i); hybrid i for
/// input l uses nuisance.child(l + 1).child(i).
JansenRun jansen_indices(const Model& model, const DesignPair& pair, const SeedStream& nuisance);

/// Single index; same streams as jansen_indices, so the two agree exactly.
/// Throws std::out_of_range for an invalid input index.
SobolEstimate jansen_first_order(const Model& model, const DesignPair& pair, std::size_t ell,
                                 const SeedStream& nuisance);

}  // namespace wws
