#pragma once

#include <map>
#include <string>
#include <vector>

#include "lac/permutation.hpp"
#include "lac/rng.hpp"
#include "lac/types.hpp"

namespace lac {

/// Pairwise comparison counts of one problem: entry (a, b) is the number of
/// its annotations ranking item a above item b.
struct PairwiseTally {
    int item_count = 0;
    int annotation_count = 0;
    std::vector<double> counts; // row-major R x R, zero diagonal

    double at(int a, int b) const { return counts[static_cast<std::size_t>(a) * item_count + b]; }
    double& at(int a, int b) { return counts[static_cast<std::size_t>(a) * item_count + b]; }
};

PairwiseTally tally_annotations(const std::vector<Items>& annotations, int item_count);

/// Item score = sum of its 1-based positions across annotations; output
/// sorts by ascending score, ties by smaller item label.
Items borda(const std::vector<Items>& annotations, int item_count);

struct BradleyTerryResult {
    Items order;                   // descending strength, ties by smaller label
    std::vector<double> strengths; // indexed by item label
    bool converged = false;
};

/// Bradley-Terry strengths via the minorize-maximize fixed point, with +0.5
/// smoothing on every ordered pair so unanimous tallies stay bounded. A fit
/// that has not settled after max_iterations returns its last iterate with
/// converged = false.
BradleyTerryResult bradley_terry(const PairwiseTally& tally, int max_iterations = 500,
                                 double tol = 1e-10);

/// Randomized quicksort whose comparator is the pairwise majority direction
/// (ties put the smaller label first). A hand-rolled sort: majority cycles
/// make the comparator non-transitive, which std::sort does not allow.
Items condorcet_fuse(const PairwiseTally& tally, Rng& rng);

enum class BaselineMethod { borda, bradley_terry, condorcet };

/// Runs one baseline independently on every problem of the dataset. The
/// seed feeds per-problem pivot substreams for condorcet_fuse.
std::map<std::string, Permutation> run_baseline(const AnnotationSet& dataset,
                                                BaselineMethod method, std::uint64_t seed = 0);

} // namespace lac
