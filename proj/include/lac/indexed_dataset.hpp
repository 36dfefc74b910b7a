#pragma once

#include <map>
#include <string>
#include <vector>

#include "lac/permutation.hpp"
#include "lac/types.hpp"

namespace lac {

/// Contiguous-index view of a validated AnnotationSet: problems and
/// annotators numbered in dataset order, annotations grouped per problem,
/// plus the shared permutation table over the dataset's R.
struct IndexedDataset {
    struct Ann {
        int annotator = 0;
        Items items;
        std::uint64_t rank_index = 0;
    };

    int R = 0;
    std::uint64_t K = 0; // R!
    int problem_count = 0;
    int annotator_count = 0;
    std::vector<std::string> problem_ids;
    std::vector<std::string> annotator_ids;
    std::map<std::string, int> problem_index;
    std::map<std::string, int> annotator_index;
    std::vector<std::vector<Ann>> by_problem; // file order within each problem
    std::vector<int> annotations_per_annotator;
    PermTable perms;

    /// Validates the dataset (throwing ValidationError on any violation) and
    /// builds the view. Refuses R for which the R! hypothesis space cannot
    /// be enumerated in memory.
    static IndexedDataset build(const AnnotationSet& dataset);
};

} // namespace lac
