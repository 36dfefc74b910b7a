#include "lac/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lac/errors.hpp"

namespace lac {

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    out << violations.size() << " validation violation(s)";
    for (const auto& v : violations) out << "\n  - " << v;
    return out.str();
}

ValidationReport validate(const AnnotationSet& dataset) {
    ValidationReport report;
    auto add = [&report](const std::string& msg) { report.violations.push_back(msg); };

    if (dataset.problems.empty()) add("dataset has no problems");

    std::unordered_map<std::string, int> problem_R;
    const int R = dataset.item_count();
    for (const auto& p : dataset.problems) {
        if (p.id.empty()) add("problem with empty id");
        if (!problem_R.emplace(p.id, p.item_count).second) {
            add("duplicate problem id '" + p.id + "'");
        }
        if (p.item_count < 2) {
            add("problem '" + p.id + "' has item_count " + std::to_string(p.item_count) + " < 2");
        }
        if (p.item_count != R) {
            add("problem '" + p.id + "' has item_count " + std::to_string(p.item_count) +
                " but the dataset uses R = " + std::to_string(R));
        }
        if (!p.payloads.empty() && static_cast<int>(p.payloads.size()) != p.item_count) {
            add("problem '" + p.id + "' has " + std::to_string(p.payloads.size()) +
                " payloads for " + std::to_string(p.item_count) + " items");
        }
    }

    std::unordered_set<std::string> annotator_ids;
    for (const auto& a : dataset.annotators) {
        if (a.empty()) add("annotator with empty id");
        if (!annotator_ids.insert(a).second) add("duplicate annotator id '" + a + "'");
    }

    std::set<std::pair<std::string, std::string>> seen_pairs;
    std::unordered_map<std::string, int> annotations_per_problem;
    for (const auto& ann : dataset.annotations) {
        const auto it = problem_R.find(ann.problem_id);
        if (it == problem_R.end()) {
            add("annotation references unknown problem '" + ann.problem_id + "'");
        }
        if (!annotator_ids.count(ann.annotator_id)) {
            add("annotation references unknown annotator '" + ann.annotator_id + "'");
        }
        if (!seen_pairs.insert({ann.problem_id, ann.annotator_id}).second) {
            add("duplicate annotation by '" + ann.annotator_id + "' on problem '" +
                ann.problem_id + "'");
        }
        if (!is_permutation(ann.rank.items)) {
            add("annotation by '" + ann.annotator_id + "' on '" + ann.problem_id +
                "' is not a permutation of 0..R-1");
        } else {
            if (it != problem_R.end() && ann.rank.size() != it->second) {
                add("annotation by '" + ann.annotator_id + "' on '" + ann.problem_id +
                    "' has length " + std::to_string(ann.rank.size()) + ", expected " +
                    std::to_string(it->second));
            }
            if (ann.rank.index != encode_permutation(ann.rank.items)) {
                add("annotation by '" + ann.annotator_id + "' on '" + ann.problem_id +
                    "' has an inconsistent canonical index");
            }
        }
        ++annotations_per_problem[ann.problem_id];
    }

    for (const auto& p : dataset.problems) {
        if (annotations_per_problem[p.id] == 0) {
            add("problem '" + p.id + "' has no annotations");
        }
    }

    if (!dataset.ground_truth.empty()) {
        for (const auto& [pid, rank] : dataset.ground_truth) {
            const auto it = problem_R.find(pid);
            if (it == problem_R.end()) {
                add("ground truth references unknown problem '" + pid + "'");
                continue;
            }
            if (!is_permutation(rank.items) || rank.size() != it->second) {
                add("ground truth for '" + pid + "' is not a permutation of 0..R-1");
            }
        }
        for (const auto& p : dataset.problems) {
            if (!dataset.ground_truth.count(p.id)) {
                add("ground truth present but missing problem '" + p.id + "'");
            }
        }
    }

    return report;
}

const AnnotationSet& validate_or_throw(const AnnotationSet& dataset) {
    const ValidationReport report = validate(dataset);
    if (!report.ok()) throw ValidationError(report.to_string());
    return dataset;
}

void floor_and_normalize(std::span<double> row, double eps) {
    double sum = 0.0;
    for (double& v : row) {
        if (!(v >= eps)) v = eps; // also catches NaN
        sum += v;
    }
    for (double& v : row) v /= sum;
}

ConfusionMatrix ConfusionMatrix::identity(int size) {
    ConfusionMatrix m(size);
    for (int r = 0; r < size; ++r) m.at(r, r) = 1.0;
    return m;
}

ConfusionMatrix ConfusionMatrix::uniform(int size) {
    ConfusionMatrix m(size);
    const double p = 1.0 / size;
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) m.at(r, c) = p;
    }
    return m;
}

ConfusionMatrix ConfusionMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    ConfusionMatrix m(n);
    for (int r = 0; r < n; ++r) {
        if (static_cast<int>(rows[r].size()) != n) {
            throw std::invalid_argument("ConfusionMatrix::from_rows: ragged rows");
        }
        for (int c = 0; c < n; ++c) m.at(r, c) = rows[r][c];
    }
    return m;
}

ConfusionMatrix ConfusionMatrix::from_counts(int size, std::span<const double> counts, double eps) {
    if (static_cast<int>(counts.size()) != size * size) {
        throw std::invalid_argument("ConfusionMatrix::from_counts: wrong count size");
    }
    ConfusionMatrix m(size);
    std::copy(counts.begin(), counts.end(), m.m_.begin());
    m.floor_rows(eps);
    return m;
}

void ConfusionMatrix::floor_rows(double eps) {
    for (int r = 0; r < R_; ++r) {
        floor_and_normalize({m_.data() + static_cast<std::size_t>(r) * R_,
                             static_cast<std::size_t>(R_)}, eps);
    }
}

bool ConfusionMatrix::is_row_stochastic(double tol) const {
    for (int r = 0; r < R_; ++r) {
        double sum = 0.0;
        for (int c = 0; c < R_; ++c) {
            const double v = at(r, c);
            if (!(v >= 0.0) || v > 1.0 + tol) return false;
            sum += v;
        }
        if (std::abs(sum - 1.0) > tol) return false;
    }
    return R_ > 0;
}

const ConfusionMatrix& ModelState::ability_for(const std::string& annotator_id) const {
    for (std::size_t j = 0; j < annotator_ids.size(); ++j) {
        if (annotator_ids[j] == annotator_id) return ability[j];
    }
    throw std::invalid_argument("ModelState: unknown annotator '" + annotator_id + "'");
}

const ConfusionMatrix& ModelState::difficulty_for(const std::string& problem_id) const {
    for (std::size_t i = 0; i < problem_ids.size(); ++i) {
        if (problem_ids[i] == problem_id) return difficulty[i];
    }
    throw std::invalid_argument("ModelState: unknown problem '" + problem_id + "'");
}

} // namespace lac
