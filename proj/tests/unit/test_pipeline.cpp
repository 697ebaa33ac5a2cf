#include <filesystem>

#include "doctest.h"
#include "kwsfcm/pipeline.hpp"
#include "support/synthetic.hpp"

using namespace kwsfcm;

namespace {

PipelineConfig small_config(Algo algo, double level, std::uint64_t seed, int runs) {
    PipelineConfig config;
    config.algo = algo;
    config.cluster.c = 2;
    config.noise = {NoiseKind::salt_pepper, level, seed};
    config.runs = runs;
    return config;
}

}  // namespace

TEST_CASE("noise-free single run of fcm scores SA 100 against itself") {
    GrayImage clean = testsupport::two_region(30, 30);
    PipelineOutcome outcome = run_pipeline(clean, small_config(Algo::fcm, 0.0, 0, 1));
    REQUIRE(outcome.runs.size() == 1);
    CHECK(outcome.runs[0].sa == 100.0);
    CHECK(outcome.runs[0].converged);
}

TEST_CASE("per-run seeds follow the base seed by run index") {
    GrayImage clean = testsupport::two_region(24, 24);
    PipelineOutcome outcome = run_pipeline(clean, small_config(Algo::fcm, 0.1, 40, 3));
    REQUIRE(outcome.runs.size() == 3);
    CHECK(outcome.runs[0].seed == 40);
    CHECK(outcome.runs[1].seed == 41);
    CHECK(outcome.runs[2].seed == 42);
}

TEST_CASE("report and CSV bytes are identical across repeated runs") {
    GrayImage clean = testsupport::two_region(30, 30);
    const PipelineConfig config = small_config(Algo::kwsfcm, 0.15, 9, 3);
    const std::string dir = testsupport::scratch_dir("pipeline_det");

    for (const char* tag : {"a", "b"}) {
        PipelineOutcome outcome = run_pipeline(clean, config);
        write_key_values(dir + "/report_" + tag + ".txt", pipeline_report(config, outcome));
        write_runs_csv(dir + "/runs_" + tag + ".csv", outcome.runs);
    }
    CHECK(testsupport::read_file(dir + "/report_a.txt") ==
          testsupport::read_file(dir + "/report_b.txt"));
    CHECK(testsupport::read_file(dir + "/runs_a.csv") == testsupport::read_file(dir + "/runs_b.csv"));
    CHECK(!testsupport::read_file(dir + "/report_a.txt").empty());
}

TEST_CASE("pipeline results are identical in serial and parallel mode") {
    GrayImage clean = testsupport::two_region(24, 24);
    const PipelineConfig config = small_config(Algo::kwsfcm, 0.2, 5, 4);

    thread_override() = 1;
    PipelineOutcome serial = run_pipeline(clean, config);
    thread_override() = 4;
    PipelineOutcome parallel = run_pipeline(clean, config);
    thread_override() = 0;

    REQUIRE(serial.runs.size() == parallel.runs.size());
    for (std::size_t r = 0; r < serial.runs.size(); ++r) {
        CHECK(serial.runs[r].sa == parallel.runs[r].sa);
        CHECK(serial.runs[r].entropy == parallel.runs[r].entropy);
        CHECK(serial.runs[r].eqf == parallel.runs[r].eqf);
    }
}

TEST_CASE("the report echoes the full effective configuration") {
    GrayImage clean = testsupport::two_region(24, 24);
    PipelineConfig config = small_config(Algo::kwsfcm, 0.1, 3, 1);
    PipelineOutcome outcome = run_pipeline(clean, config);
    KeyValues kv = pipeline_report(config, outcome);

    auto has = [&](const std::string& key) {
        for (const auto& [k, v] : kv)
            if (k == key) return true;
        return false;
    };
    for (const char* key :
         {"algo", "c", "m", "alpha", "epsilon", "kernel.kind", "kernel.sigma", "susan.t",
          "noise.kind", "noise.level", "noise.seed", "runs", "sa.mean", "sa.min", "sa.max",
          "entropy.mean", "eqf.mean", "convergence.all"})
        CHECK_MESSAGE(has(key), key);
}

TEST_CASE("trace CSV has one row per iteration with centroid columns") {
    GrayImage clean = testsupport::two_region(20, 20);
    SegmentationResult r = fcm_segment(clean, ClusterParams{});
    const std::string dir = testsupport::scratch_dir("trace_csv");
    write_trace_csv(dir + "/trace.csv", r.trace);
    const std::string text = testsupport::read_file(dir + "/trace.csv");
    CHECK(text.rfind("iteration,objective,v1,v2\n", 0) == 0);
    std::size_t rows = 0;
    for (char ch : text)
        if (ch == '\n') ++rows;
    CHECK(rows == static_cast<std::size_t>(r.trace.iteration_count()) + 1);
}
