#pragma once

#include <vector>

#include "lac/rng.hpp"
#include "lac/types.hpp"

namespace lac {

struct SynthConfig {
    int problem_count = 500;    // I
    int annotator_count = 10;   // J
    int rank_length = 5;        // R
    double quality = 0.3;       // e, lower bound of each diagonal entry
    double annotation_ratio = 0.5; // eta, fraction of annotators per problem
    std::uint64_t seed = 0;

    int annotators_per_problem() const; // round(eta * J)
    void check() const;                 // throws std::invalid_argument
};

/// Annotator ability matrix for quality level e: each diagonal entry is
/// drawn uniformly from [e, 1] and the rest of the row splits the remaining
/// mass with uniform random weights. Rows sum to 1; e = 1 gives the exact
/// identity matrix.
ConfusionMatrix gen_ability_matrix(double quality, int rank_length, Rng& rng);

/// Biased rank: for each slot in turn, draw a true-rank position from the
/// matching matrix row until it names an unplaced item, place that item,
/// and give the last slot the remaining item. Throws NumericalError if a
/// slot rejects 10^6 draws in a row.
Items gen_biased_rank(const Items& truth, const ConfusionMatrix& ability, Rng& rng);

struct SynthDataset {
    AnnotationSet data; // ground_truth filled
    std::vector<ConfusionMatrix> true_ability; // per annotator, dataset order
};

/// Full benchmark draw: uniform ground-truth ranks, one ability matrix per
/// annotator, and for every problem one biased rank from each annotator in
/// a fresh uniform subset of size round(eta * J).
SynthDataset gen_dataset(const SynthConfig& config);

} // namespace lac
