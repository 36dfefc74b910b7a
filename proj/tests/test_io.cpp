#include <chrono>
#include <fstream>

#include "doctest.h"

#include "lac/dataset_io.hpp"
#include "lac/errors.hpp"
#include "lac/synth.hpp"
#include "support/builders.hpp"
#include "support/tempdir.hpp"

using namespace lac;
using lac::testing::annotate;
using lac::testing::make_dataset;
using lac::testing::TempDir;

namespace {

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
    std::ofstream out(path);
    for (const auto& line : lines) out << line << '\n';
}

} // namespace

TEST_CASE("dataset round trip preserves everything") {
    auto ds = make_dataset(2, 3, 3);
    ds.problems[0].payloads = {"first sentence", "second one", "third"};
    annotate(ds, "p0", "a0", {0, 1, 2});
    annotate(ds, "p0", "a2", {1, 0, 2});
    annotate(ds, "p1", "a1", {2, 1, 0});
    ds.ground_truth.emplace("p0", Permutation::from_items({0, 1, 2}));
    ds.ground_truth.emplace("p1", Permutation::from_items({2, 0, 1}));

    TempDir dir;
    save_dataset(ds, dir.file("data.jsonl"));
    const auto loaded = load_dataset(dir.file("data.jsonl"));
    CHECK(loaded.warnings.empty());
    const auto& got = loaded.dataset;
    REQUIRE(got.problems.size() == 2);
    CHECK(got.problems[0].id == "p0");
    CHECK(got.problems[0].payloads == ds.problems[0].payloads);
    CHECK(got.annotators == ds.annotators);
    REQUIRE(got.annotations.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(got.annotations[i].problem_id == ds.annotations[i].problem_id);
        CHECK(got.annotations[i].annotator_id == ds.annotations[i].annotator_id);
        CHECK(got.annotations[i].rank == ds.annotations[i].rank);
    }
    CHECK(got.ground_truth.at("p1").items == Items{2, 0, 1});
}

TEST_CASE("loader warns on unknown fields and record types") {
    TempDir dir;
    write_lines(dir.file("data.jsonl"),
                {R"({"type":"header","R":2,"annotators":["a0"],"flavor":"umami"})",
                 R"({"type":"annotation","problem":"p0","annotator":"a0","rank":[1,0]})",
                 R"({"type":"comment","text":"hi"})"});
    const auto loaded = load_dataset(dir.file("data.jsonl"));
    REQUIRE(loaded.warnings.size() == 2);
    CHECK(loaded.warnings[0].find("unknown field 'flavor'") != std::string::npos);
    CHECK(loaded.warnings[1].find("unknown record type 'comment'") != std::string::npos);
    CHECK(loaded.dataset.annotations.size() == 1);
}

TEST_CASE("loader reports validation failures with line numbers") {
    TempDir dir;
    write_lines(dir.file("data.jsonl"),
                {R"({"type":"header","R":3,"annotators":["a0","a1"]})",
                 R"({"type":"annotation","problem":"p0","annotator":"a0","rank":[0,1,2]})",
                 R"({"type":"annotation","problem":"p0","annotator":"a0","rank":[1,0,2]})",
                 R"({"type":"annotation","problem":"p0","annotator":"a1","rank":[0,0,2]})",
                 R"({"type":"annotation","problem":"p1","annotator":"zz","rank":[0,1,2]})"});
    try {
        load_dataset(dir.file("data.jsonl"));
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 3: duplicate annotation by 'a0'") != std::string::npos);
        CHECK(msg.find("first on line 2") != std::string::npos);
        CHECK(msg.find("line 5: annotator 'zz' is not in the header roster") != std::string::npos);
    }
}

TEST_CASE("loader rejects malformed input") {
    TempDir dir;
    write_lines(dir.file("noheader.jsonl"),
                {R"({"type":"annotation","problem":"p0","annotator":"a0","rank":[0,1]})"});
    CHECK_THROWS_AS(load_dataset(dir.file("noheader.jsonl")), ValidationError);

    write_lines(dir.file("badjson.jsonl"),
                {R"({"type":"header","R":2,"annotators":["a0"]})", "{not json"});
    CHECK_THROWS_AS(load_dataset(dir.file("badjson.jsonl")), ValidationError);

    CHECK_THROWS_AS(load_dataset(dir.file("missing.jsonl")), IoError);
}

TEST_CASE("predictions round trip; empty file is an explicit error") {
    TempDir dir;
    std::map<std::string, Permutation> predictions;
    predictions.emplace("p0", Permutation::from_items({1, 0, 2}));
    predictions.emplace("p1", Permutation::from_items({2, 1, 0}));
    save_predictions(predictions, dir.file("pred.jsonl"));
    const auto loaded = load_predictions(dir.file("pred.jsonl"));
    CHECK(loaded.size() == 2);
    CHECK(loaded.at("p0").items == Items{1, 0, 2});

    write_lines(dir.file("empty.jsonl"), {});
    CHECK_THROWS_AS(load_predictions(dir.file("empty.jsonl")), ValidationError);
}

TEST_CASE("a dataset file works as a truth source for predictions") {
    auto ds = make_dataset(1, 1, 3);
    annotate(ds, "p0", "a0", {0, 1, 2});
    ds.ground_truth.emplace("p0", Permutation::from_items({0, 2, 1}));
    TempDir dir;
    save_dataset(ds, dir.file("data.jsonl"));
    const auto truth = load_predictions(dir.file("data.jsonl"));
    REQUIRE(truth.size() == 1);
    CHECK(truth.at("p0").items == Items{0, 2, 1});
}

TEST_CASE("matrix sidecars round trip") {
    TempDir dir;
    const std::vector<std::string> ids = {"a0", "a1"};
    const std::vector<ConfusionMatrix> matrices = {
        ConfusionMatrix::from_rows({{0.8, 0.15, 0.05}, {0.1, 0.8, 0.1}, {0.05, 0.15, 0.8}}),
        ConfusionMatrix::uniform(3)};
    save_matrices(ids, matrices, dir.file("ability.txt"));
    const auto [got_ids, got_mats] = load_matrices(dir.file("ability.txt"));
    CHECK(got_ids == ids);
    REQUIRE(got_mats.size() == 2);
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            CHECK(got_mats[0].at(r, c) == matrices[0].at(r, c));
            CHECK(got_mats[1].at(r, c) == matrices[1].at(r, c));
        }
    }
    CHECK_THROWS_AS(load_matrices(dir.file("nope.txt")), IoError);
}

TEST_CASE("series round trip") {
    TempDir dir;
    const std::vector<double> values = {-123.456, 0.0, 1e-300, 7.25};
    save_series(values, "log_likelihood", dir.file("trace.txt"));
    CHECK(load_series(dir.file("trace.txt")) == values);
}

TEST_CASE("manifest writes valid JSON") {
    TempDir dir;
    RunManifest manifest;
    manifest.command = "generate";
    manifest.version = "0.1.0";
    manifest.seed = 7;
    manifest.config = {{"I", 10}};
    manifest.wall_clock_seconds = 0.25;
    manifest.phase_seconds = {{"generate", 0.2}, {"write", 0.05}};
    write_manifest(manifest, dir.file("m.json"));
    std::ifstream in(dir.file("m.json"));
    const auto doc = nlohmann::json::parse(in);
    CHECK(doc["command"] == "generate");
    CHECK(doc["seed"] == 7);
    CHECK(doc["phase_seconds"]["generate"] == 0.2);
}

TEST_CASE("a production-scale file parses within a second") {
    SynthConfig config;
    config.problem_count = 600;
    config.annotator_count = 25;
    config.rank_length = 5;
    config.annotation_ratio = 0.4; // ~10 annotations per problem
    config.seed = 3;
    const auto synth = gen_dataset(config);
    TempDir dir;
    save_dataset(synth.data, dir.file("realworld.jsonl"));

    const auto start = std::chrono::steady_clock::now();
    const auto loaded = load_dataset(dir.file("realworld.jsonl"));
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(loaded.dataset.annotations.size() == 6000);
    CHECK(seconds < 1.0);
}
