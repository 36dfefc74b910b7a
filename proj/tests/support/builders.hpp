#pragma once

#include <string>
#include <vector>

#include "lac/types.hpp"

namespace lac::testing {

/// Dataset with problems p0..p{I-1} (all with rank length R) and annotators
/// a0..a{J-1}; annotations are appended by the caller.
inline AnnotationSet make_dataset(int problem_count, int annotator_count, int rank_length) {
    AnnotationSet ds;
    for (int i = 0; i < problem_count; ++i) {
        Problem p;
        p.id = "p" + std::to_string(i);
        p.item_count = rank_length;
        ds.problems.push_back(std::move(p));
    }
    for (int j = 0; j < annotator_count; ++j) {
        ds.annotators.push_back("a" + std::to_string(j));
    }
    return ds;
}

inline void annotate(AnnotationSet& ds, const std::string& problem_id,
                     const std::string& annotator_id, Items items) {
    Annotation ann;
    ann.problem_id = problem_id;
    ann.annotator_id = annotator_id;
    ann.rank = Permutation::from_items(std::move(items));
    ds.annotations.push_back(std::move(ann));
}

} // namespace lac::testing
