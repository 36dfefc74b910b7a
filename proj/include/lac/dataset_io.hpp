#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "lac/types.hpp"

namespace lac {

/// Dataset files are UTF-8 text, one JSON record per line:
///   {"type":"header","R":5,"problem_count":2,"annotators":["a0","a1"]}
///   {"type":"problem","problem":"p0","payload":["...","..."]}
///   {"type":"annotation","problem":"p0","annotator":"a0","rank":[1,0,2,3,4]}
///   {"type":"truth","problem":"p0","rank":[0,1,2,3,4]}
/// The header comes first; problems are numbered by order of first
/// appearance; unknown fields and record types are ignored with a warning.
struct LoadResult {
    AnnotationSet dataset;
    std::vector<std::string> warnings;
};

/// Parses and validates a dataset file. Malformed lines and validation
/// failures raise ValidationError listing every problem found (with line
/// numbers where known); unreadable files raise IoError.
LoadResult load_dataset(const std::filesystem::path& path);

void save_dataset(const AnnotationSet& dataset, const std::filesystem::path& path,
                  bool include_truth = true);

/// Predictions: one {"type":"prediction","problem":...,"rank":[...]} record
/// per line.
void save_predictions(const std::map<std::string, Permutation>& predictions,
                      const std::filesystem::path& path);

/// Reads prediction records; truth records are accepted too, so a dataset
/// file with embedded ground truth can serve as a truth source.
std::map<std::string, Permutation> load_predictions(const std::filesystem::path& path);

/// Dense row-major text blocks, one per matrix: a "R id" header line then
/// R rows of R doubles.
void save_matrices(const std::vector<std::string>& ids,
                   const std::vector<ConfusionMatrix>& matrices,
                   const std::filesystem::path& path);

std::pair<std::vector<std::string>, std::vector<ConfusionMatrix>> load_matrices(
    const std::filesystem::path& path);

/// Column of doubles with a "<n> <id>" header line.
void save_series(const std::vector<double>& values, const std::string& id,
                 const std::filesystem::path& path);
std::vector<double> load_series(const std::filesystem::path& path);

/// Written alongside every CLI run's results.
struct RunManifest {
    std::string command;
    std::string version;
    std::uint64_t seed = 0;
    nlohmann::ordered_json config;
    double wall_clock_seconds = 0.0;
    std::vector<std::pair<std::string, double>> phase_seconds;
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

} // namespace lac
