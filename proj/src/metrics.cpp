#include "lac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lac/errors.hpp"

namespace lac {

double positionwise_accuracy(const std::map<std::string, Permutation>& predicted,
                             const std::map<std::string, Permutation>& truth) {
    if (predicted.empty()) throw ValidationError("positionwise_accuracy: no predictions");
    if (predicted.size() != truth.size() ||
        !std::equal(predicted.begin(), predicted.end(), truth.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; })) {
        std::string detail;
        for (const auto& [pid, rank] : predicted) {
            if (!truth.count(pid)) detail += "\n  - no truth for problem '" + pid + "'";
        }
        for (const auto& [pid, rank] : truth) {
            if (!predicted.count(pid)) detail += "\n  - no prediction for problem '" + pid + "'";
        }
        throw ValidationError("positionwise_accuracy: key sets differ (" +
                              std::to_string(predicted.size()) + " predictions, " +
                              std::to_string(truth.size()) + " truths)" + detail);
    }
    long correct = 0;
    long total = 0;
    for (const auto& [pid, pred] : predicted) {
        const auto& truth_rank = truth.find(pid)->second;
        if (pred.size() != truth_rank.size()) {
            throw ValidationError("positionwise_accuracy: rank length mismatch on '" + pid + "'");
        }
        for (int r = 0; r < pred.size(); ++r) {
            if (pred.items[r] == truth_rank.items[r]) ++correct;
            ++total;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(total);
}

double ability_estimation_error(const std::vector<ConfusionMatrix>& true_matrices,
                                const std::vector<ConfusionMatrix>& estimated) {
    if (true_matrices.empty() || true_matrices.size() != estimated.size()) {
        throw std::invalid_argument("ability_estimation_error: matrix count mismatch");
    }
    const int R = true_matrices.front().size();
    double total = 0.0;
    for (std::size_t j = 0; j < true_matrices.size(); ++j) {
        if (true_matrices[j].size() != R || estimated[j].size() != R) {
            throw std::invalid_argument("ability_estimation_error: matrix size mismatch");
        }
        for (int r = 0; r < R; ++r) {
            for (int c = 0; c < R; ++c) {
                total += std::abs(true_matrices[j].at(r, c) - estimated[j].at(r, c));
            }
        }
    }
    return total / (static_cast<double>(R) * R * static_cast<double>(true_matrices.size()));
}

} // namespace lac
