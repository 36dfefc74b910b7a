#include "lac/dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lac/errors.hpp"

namespace lac {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    return in;
}

void warn_unknown_fields(const json& record, const std::set<std::string>& known,
                         long line, std::vector<std::string>& warnings) {
    for (const auto& [key, value] : record.items()) {
        (void)value;
        if (!known.count(key)) {
            warnings.push_back("line " + std::to_string(line) + ": ignoring unknown field '" +
                               key + "'");
        }
    }
}

Items parse_rank(const json& record, long line, std::vector<std::string>& errors) {
    Items items;
    if (!record.contains("rank") || !record["rank"].is_array()) {
        errors.push_back("line " + std::to_string(line) + ": missing or non-array 'rank'");
        return items;
    }
    for (const auto& v : record["rank"]) {
        if (!v.is_number_integer()) {
            errors.push_back("line " + std::to_string(line) + ": rank entries must be integers");
            return {};
        }
        items.push_back(v.get<int>());
    }
    return items;
}

/// Builds a Permutation without insisting on a valid permutation; invalid
/// ranks surface through validate() with this record's line number attached.
Permutation raw_permutation(Items items) {
    Permutation p;
    if (is_permutation(items)) return Permutation::from_items(std::move(items));
    p.items = std::move(items);
    return p;
}

} // namespace

LoadResult load_dataset(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    LoadResult result;
    std::vector<std::string> errors;
    AnnotationSet& ds = result.dataset;

    bool have_header = false;
    int header_R = 0;
    std::unordered_map<std::string, int> problem_slot;
    std::unordered_map<std::string, long> payload_line;
    std::map<std::pair<std::string, std::string>, long> annotation_line;
    std::unordered_set<std::string> roster;

    auto problem_of = [&](const std::string& id) -> Problem& {
        auto it = problem_slot.find(id);
        if (it == problem_slot.end()) {
            it = problem_slot.emplace(id, static_cast<int>(ds.problems.size())).first;
            Problem p;
            p.id = id;
            p.item_count = header_R;
            ds.problems.push_back(std::move(p));
        }
        return ds.problems[static_cast<std::size_t>(it->second)];
    };

    std::string text;
    long line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.empty() || text.find_first_not_of(" \t\r") == std::string::npos) continue;
        json record = json::parse(text, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            errors.push_back("line " + std::to_string(line) + ": not a JSON object");
            continue;
        }
        const std::string type = record.value("type", "");
        if (type == "header") {
            if (have_header) {
                errors.push_back("line " + std::to_string(line) + ": duplicate header");
                continue;
            }
            warn_unknown_fields(record, {"type", "R", "problem_count", "annotators"}, line,
                                result.warnings);
            if (!record.contains("R") || !record["R"].is_number_integer()) {
                errors.push_back("line " + std::to_string(line) + ": header missing integer 'R'");
                continue;
            }
            header_R = record["R"].get<int>();
            if (record.contains("annotators") && record["annotators"].is_array()) {
                for (const auto& a : record["annotators"]) {
                    if (a.is_string()) {
                        ds.annotators.push_back(a.get<std::string>());
                        roster.insert(a.get<std::string>());
                    }
                }
            }
            have_header = true;
        } else if (type == "problem") {
            if (!have_header) {
                errors.push_back("line " + std::to_string(line) + ": record before header");
                continue;
            }
            warn_unknown_fields(record, {"type", "problem", "payload"}, line, result.warnings);
            if (!record.contains("problem") || !record["problem"].is_string()) {
                errors.push_back("line " + std::to_string(line) + ": missing 'problem' id");
                continue;
            }
            Problem& p = problem_of(record["problem"].get<std::string>());
            if (record.contains("payload") && record["payload"].is_array()) {
                if (payload_line.count(p.id)) {
                    errors.push_back("line " + std::to_string(line) + ": duplicate payload for '" +
                                     p.id + "'");
                    continue;
                }
                payload_line[p.id] = line;
                for (const auto& s : record["payload"]) {
                    p.payloads.push_back(s.is_string() ? s.get<std::string>() : s.dump());
                }
            }
        } else if (type == "annotation") {
            if (!have_header) {
                errors.push_back("line " + std::to_string(line) + ": record before header");
                continue;
            }
            warn_unknown_fields(record, {"type", "problem", "annotator", "rank"}, line,
                                result.warnings);
            if (!record.contains("problem") || !record["problem"].is_string() ||
                !record.contains("annotator") || !record["annotator"].is_string()) {
                errors.push_back("line " + std::to_string(line) +
                                 ": annotation needs 'problem' and 'annotator'");
                continue;
            }
            Annotation ann;
            ann.problem_id = record["problem"].get<std::string>();
            ann.annotator_id = record["annotator"].get<std::string>();
            ann.rank = raw_permutation(parse_rank(record, line, errors));
            if (!roster.count(ann.annotator_id)) {
                errors.push_back("line " + std::to_string(line) + ": annotator '" +
                                 ann.annotator_id + "' is not in the header roster");
            }
            const auto key = std::make_pair(ann.problem_id, ann.annotator_id);
            const auto prev = annotation_line.find(key);
            if (prev != annotation_line.end()) {
                errors.push_back("line " + std::to_string(line) + ": duplicate annotation by '" +
                                 ann.annotator_id + "' on '" + ann.problem_id +
                                 "' (first on line " + std::to_string(prev->second) + ")");
            } else {
                annotation_line.emplace(key, line);
            }
            problem_of(ann.problem_id);
            ds.annotations.push_back(std::move(ann));
        } else if (type == "truth") {
            if (!have_header) {
                errors.push_back("line " + std::to_string(line) + ": record before header");
                continue;
            }
            warn_unknown_fields(record, {"type", "problem", "rank"}, line, result.warnings);
            if (!record.contains("problem") || !record["problem"].is_string()) {
                errors.push_back("line " + std::to_string(line) + ": missing 'problem' id");
                continue;
            }
            const std::string pid = record["problem"].get<std::string>();
            if (ds.ground_truth.count(pid)) {
                errors.push_back("line " + std::to_string(line) + ": duplicate truth for '" + pid +
                                 "'");
                continue;
            }
            problem_of(pid);
            ds.ground_truth.emplace(pid, raw_permutation(parse_rank(record, line, errors)));
        } else {
            result.warnings.push_back("line " + std::to_string(line) +
                                      ": ignoring unknown record type '" + type + "'");
        }
    }

    if (!have_header) errors.push_back("no header record found");

    if (errors.empty()) {
        const ValidationReport report = validate(ds);
        errors.insert(errors.end(), report.violations.begin(), report.violations.end());
    }
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "'" << path.string() << "': " << errors.size() << " error(s)";
        for (const auto& e : errors) msg << "\n  - " << e;
        throw ValidationError(msg.str());
    }
    return result;
}

void save_dataset(const AnnotationSet& dataset, const std::filesystem::path& path,
                  bool include_truth) {
    std::ofstream out = open_out(path);
    ordered_json header;
    header["type"] = "header";
    header["R"] = dataset.item_count();
    header["problem_count"] = dataset.problems.size();
    header["annotators"] = dataset.annotators;
    out << header.dump() << '\n';
    for (const auto& p : dataset.problems) {
        ordered_json record;
        record["type"] = "problem";
        record["problem"] = p.id;
        if (!p.payloads.empty()) record["payload"] = p.payloads;
        out << record.dump() << '\n';
    }
    for (const auto& ann : dataset.annotations) {
        ordered_json record;
        record["type"] = "annotation";
        record["problem"] = ann.problem_id;
        record["annotator"] = ann.annotator_id;
        record["rank"] = ann.rank.items;
        out << record.dump() << '\n';
    }
    if (include_truth) {
        for (const auto& p : dataset.problems) {
            const auto it = dataset.ground_truth.find(p.id);
            if (it == dataset.ground_truth.end()) continue;
            ordered_json record;
            record["type"] = "truth";
            record["problem"] = p.id;
            record["rank"] = it->second.items;
            out << record.dump() << '\n';
        }
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void save_predictions(const std::map<std::string, Permutation>& predictions,
                      const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    for (const auto& [pid, rank] : predictions) {
        ordered_json record;
        record["type"] = "prediction";
        record["problem"] = pid;
        record["rank"] = rank.items;
        out << record.dump() << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::map<std::string, Permutation> load_predictions(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::map<std::string, Permutation> out;
    std::string text;
    long line = 0;
    std::vector<std::string> errors;
    while (std::getline(in, text)) {
        ++line;
        if (text.empty() || text.find_first_not_of(" \t\r") == std::string::npos) continue;
        json record = json::parse(text, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            errors.push_back("line " + std::to_string(line) + ": not a JSON object");
            continue;
        }
        const std::string type = record.value("type", "");
        if (type != "prediction" && type != "truth") continue;
        if (!record.contains("problem") || !record["problem"].is_string()) {
            errors.push_back("line " + std::to_string(line) + ": missing 'problem' id");
            continue;
        }
        const std::string pid = record["problem"].get<std::string>();
        Items items = parse_rank(record, line, errors);
        if (!is_permutation(items)) {
            errors.push_back("line " + std::to_string(line) +
                             ": rank is not a permutation of 0..R-1");
            continue;
        }
        if (!out.emplace(pid, Permutation::from_items(std::move(items))).second) {
            errors.push_back("line " + std::to_string(line) + ": duplicate rank for '" + pid + "'");
        }
    }
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "'" << path.string() << "': " << errors.size() << " error(s)";
        for (const auto& e : errors) msg << "\n  - " << e;
        throw ValidationError(msg.str());
    }
    if (out.empty()) {
        throw ValidationError("'" + path.string() + "': no prediction or truth records");
    }
    return out;
}

void save_matrices(const std::vector<std::string>& ids,
                   const std::vector<ConfusionMatrix>& matrices,
                   const std::filesystem::path& path) {
    if (ids.size() != matrices.size()) {
        throw std::invalid_argument("save_matrices: id/matrix count mismatch");
    }
    std::ofstream out = open_out(path);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const int R = matrices[i].size();
        out << R << ' ' << ids[i] << '\n';
        for (int r = 0; r < R; ++r) {
            for (int c = 0; c < R; ++c) {
                if (c) out << ' ';
                out << fmt_double(matrices[i].at(r, c));
            }
            out << '\n';
        }
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::pair<std::vector<std::string>, std::vector<ConfusionMatrix>> load_matrices(
    const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::vector<std::string> ids;
    std::vector<ConfusionMatrix> matrices;
    std::string header;
    while (in >> std::ws, std::getline(in, header)) {
        if (header.empty()) continue;
        std::istringstream hs(header);
        int R = 0;
        std::string id;
        if (!(hs >> R >> id) || R < 1) {
            throw IoError("'" + path.string() + "': bad matrix header '" + header + "'");
        }
        ConfusionMatrix m(R);
        for (int r = 0; r < R; ++r) {
            for (int c = 0; c < R; ++c) {
                if (!(in >> m.at(r, c))) {
                    throw IoError("'" + path.string() + "': truncated matrix '" + id + "'");
                }
            }
        }
        in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
        ids.push_back(id);
        matrices.push_back(std::move(m));
    }
    if (ids.empty()) throw IoError("'" + path.string() + "': no matrices found");
    return {std::move(ids), std::move(matrices)};
}

void save_series(const std::vector<double>& values, const std::string& id,
                 const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << values.size() << ' ' << id << '\n';
    for (double v : values) out << fmt_double(v) << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<double> load_series(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::size_t n = 0;
    std::string id;
    if (!(in >> n >> id)) throw IoError("'" + path.string() + "': bad series header");
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(in >> values[i])) throw IoError("'" + path.string() + "': truncated series");
    }
    return values;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
    ordered_json doc;
    doc["command"] = manifest.command;
    doc["version"] = manifest.version;
    doc["seed"] = manifest.seed;
    doc["config"] = manifest.config;
    doc["wall_clock_seconds"] = manifest.wall_clock_seconds;
    ordered_json phases;
    for (const auto& [name, seconds] : manifest.phase_seconds) phases[name] = seconds;
    doc["phase_seconds"] = phases;
    std::ofstream out = open_out(path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

} // namespace lac
