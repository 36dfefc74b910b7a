#include "lac/indexed_dataset.hpp"

#include <string>

#include "lac/errors.hpp"

namespace lac {

IndexedDataset IndexedDataset::build(const AnnotationSet& dataset) {
    validate_or_throw(dataset);

    IndexedDataset ds;
    ds.R = dataset.item_count();
    if (ds.R > 10) {
        throw NumericalError("R = " + std::to_string(ds.R) +
                             " would enumerate R! > 3.6M hypotheses per problem; refusing");
    }
    ds.K = factorial(ds.R);
    ds.problem_count = static_cast<int>(dataset.problems.size());
    ds.annotator_count = static_cast<int>(dataset.annotators.size());

    // K * I posterior rows dominate memory; refuse sizes past ~2 GB of doubles.
    const std::uint64_t cells = ds.K * static_cast<std::uint64_t>(ds.problem_count);
    if (cells > 250'000'000ULL) {
        throw NumericalError("dataset needs " + std::to_string(cells) +
                             " posterior cells (R = " + std::to_string(ds.R) +
                             ", I = " + std::to_string(ds.problem_count) +
                             "); too large to enumerate");
    }

    ds.problem_ids.reserve(dataset.problems.size());
    for (const auto& p : dataset.problems) {
        ds.problem_index.emplace(p.id, static_cast<int>(ds.problem_ids.size()));
        ds.problem_ids.push_back(p.id);
    }
    ds.annotator_ids.reserve(dataset.annotators.size());
    for (const auto& a : dataset.annotators) {
        ds.annotator_index.emplace(a, static_cast<int>(ds.annotator_ids.size()));
        ds.annotator_ids.push_back(a);
    }

    ds.by_problem.resize(dataset.problems.size());
    ds.annotations_per_annotator.assign(dataset.annotators.size(), 0);
    for (const auto& ann : dataset.annotations) {
        const int i = ds.problem_index.at(ann.problem_id);
        const int j = ds.annotator_index.at(ann.annotator_id);
        ds.by_problem[i].push_back({j, ann.rank.items, ann.rank.index});
        ++ds.annotations_per_annotator[j];
    }

    ds.perms = PermTable::build(ds.R);
    return ds;
}

} // namespace lac
