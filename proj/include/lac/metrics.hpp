#pragma once

#include <map>
#include <string>
#include <vector>

#include "lac/permutation.hpp"
#include "lac/types.hpp"

namespace lac {

/// Fraction of (problem, position) slots where the predicted item equals
/// the true item, pooled over all problems. Key sets and rank lengths must
/// match; throws ValidationError otherwise.
double positionwise_accuracy(const std::map<std::string, Permutation>& predicted,
                             const std::map<std::string, Permutation>& truth);

/// Mean absolute entrywise deviation over all matrices:
/// 1 / (R^2 J) * sum over annotators and entries of |true - estimated|.
double ability_estimation_error(const std::vector<ConfusionMatrix>& true_matrices,
                                const std::vector<ConfusionMatrix>& estimated);

} // namespace lac
