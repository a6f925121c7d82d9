#include "designctl/monitor.hpp"

#include <filesystem>
#include <fstream>
#include <random>

#include "designctl/ingest.hpp"
#include "designctl/traceability.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace designctl;
using namespace designctl::monitor;
using testsup::accuracy_baseline;
using testsup::drift_oracle;
using testsup::step_stream;

namespace {

std::vector<PredictionEvent> constant_stream(std::size_t count, bool correct,
                                             double confidence, bool labeled = true) {
    std::vector<PredictionEvent> events;
    for (std::size_t i = 0; i < count; ++i) {
        PredictionEvent e;
        e.seq = static_cast<std::int64_t>(i);
        e.timestamp = "2026-04-01T00:00:00Z";
        e.predicted = "x";
        if (labeled) e.actual = correct ? "x" : "y";
        e.confidence = confidence;
        events.push_back(std::move(e));
    }
    return events;
}

}  // namespace

TEST_CASE("rolling_stats over a constant correct stream") {
    auto events = constant_stream(10, true, 1.0);
    auto series = rolling_stats(events, 5);
    REQUIRE(series.size() == 6);
    for (const auto& point : series) {
        REQUIRE(point.accuracy.has_value());
        CHECK(*point.accuracy == doctest::Approx(1.0));
        CHECK(point.mean_confidence == doctest::Approx(1.0));
        CHECK(point.labeled_count == 5);
    }
    CHECK(series.front().end_seq == 4);
    CHECK(series.back().end_seq == 9);
}

TEST_CASE("rolling_stats over an alternating stream is one half everywhere") {
    auto events = constant_stream(12, true, 0.8);
    for (std::size_t i = 0; i < events.size(); i += 2) events[i].actual = "y";
    auto series = rolling_stats(events, 4);
    REQUIRE(series.size() == 9);
    for (const auto& point : series) {
        // independent recount of the trailing window
        REQUIRE(point.accuracy.has_value());
        CHECK(*point.accuracy == doctest::Approx(0.5));
    }
}

TEST_CASE("rolling_stats marks accuracy undefined on unlabeled streams") {
    auto events = constant_stream(6, true, 0.7, /*labeled=*/false);
    auto series = rolling_stats(events, 3);
    REQUIRE(series.size() == 4);
    for (const auto& point : series) {
        CHECK_FALSE(point.accuracy.has_value());
        CHECK(point.labeled_count == 0);
        CHECK(point.mean_confidence == doctest::Approx(0.7));
    }
}

TEST_CASE("a window larger than the stream yields an empty series") {
    auto events = constant_stream(3, true, 1.0);
    CHECK(rolling_stats(events, 10).empty());
    CHECK(rolling_stats(events, 0).empty());
}

TEST_CASE("rolling accuracy and confidence stay within [0,1] on random streams") {
    std::mt19937 rng(5);
    for (int round = 0; round < 20; ++round) {
        std::vector<PredictionEvent> events;
        const std::size_t n = 20 + rng() % 100;
        for (std::size_t i = 0; i < n; ++i) {
            PredictionEvent e;
            e.seq = static_cast<std::int64_t>(i);
            e.timestamp = "t";
            e.predicted = "x";
            if (rng() % 3 != 0) e.actual = (rng() % 2 != 0) ? "x" : "y";
            e.confidence = static_cast<double>(rng() % 1001) / 1000.0;
            events.push_back(std::move(e));
        }
        for (const auto& point : rolling_stats(events, 10)) {
            if (point.accuracy) {
                CHECK(*point.accuracy >= 0.0);
                CHECK(*point.accuracy <= 1.0);
            }
            CHECK(point.mean_confidence >= 0.0);
            CHECK(point.mean_confidence <= 1.0);
        }
    }
}

TEST_CASE("the documented step stream yields exactly one accuracy drop") {
    auto events = step_stream(1000, 500);
    DriftConfig config{100, 0.10, 0.10, 50};
    auto series = rolling_stats(events, config.window);
    auto deviations = detect_deviation(series, accuracy_baseline(0.9), config);
    REQUIRE(deviations.size() == 1);
    CHECK(deviations[0].kind == DeviationKind::accuracy_drop);
    CHECK(deviations[0].window_end_seq >= 500);
    CHECK(deviations[0].window_end_seq <= 600);
    CHECK(deviations[0].delta > 0.10);

    auto expected = drift_oracle(events, config.window, 0.9, config.accuracy_tolerance,
                                 std::nullopt, config.confidence_tolerance,
                                 config.min_labeled);
    REQUIRE(expected.size() == 1);
    CHECK(expected[0].window_end_seq == deviations[0].window_end_seq);
    CHECK(expected[0].observed == doctest::Approx(deviations[0].observed));
}

TEST_CASE("a stream matching the baseline yields no deviations") {
    auto events = step_stream(1000, 1000);  // stays in the 0.9 region
    DriftConfig config{100, 0.10, 0.10, 50};
    CHECK(detect_deviation(rolling_stats(events, 100), accuracy_baseline(0.9), config)
              .empty());
}

TEST_CASE("tolerance 1.0 never triggers an accuracy drop") {
    auto events = step_stream(1000, 200);  // long, deep drop
    DriftConfig config{100, 1.0, 1.0, 1};
    CHECK(detect_deviation(rolling_stats(events, 100), accuracy_baseline(0.9), config)
              .empty());
}

TEST_CASE("detect_deviation validates its inputs") {
    auto events = constant_stream(10, true, 1.0);
    auto series = rolling_stats(events, 5);
    DriftConfig config{5, 0.1, 0.1, 1};

    card::QuantitativeAnalysis no_accuracy;
    no_accuracy.performance_metrics.push_back({"auc", 0.9, std::nullopt, std::nullopt});
    CHECK_THROWS_WITH_AS(detect_deviation(series, no_accuracy, config),
                         doctest::Contains("BaselineMissing"), Error);

    DriftConfig bad = config;
    bad.min_labeled = 10;
    CHECK_THROWS_WITH_AS(detect_deviation(series, accuracy_baseline(0.9), bad),
                         doctest::Contains("ConfigInvalid"), Error);
    bad = config;
    bad.accuracy_tolerance = 0.0;
    CHECK_THROWS_WITH_AS(detect_deviation(series, accuracy_baseline(0.9), bad),
                         doctest::Contains("ConfigInvalid"), Error);
}

TEST_CASE("edge triggering matches the brute-force state machine on random step streams") {
    std::mt19937 rng(41);
    for (int round = 0; round < 30; ++round) {
        // random piecewise accuracy levels, sometimes recovering
        std::vector<PredictionEvent> events;
        std::size_t seq = 0;
        const int segments = 2 + static_cast<int>(rng() % 4);
        for (int s = 0; s < segments; ++s) {
            const int per_ten = 5 + static_cast<int>(rng() % 6);  // 0.5 .. 1.0
            const std::size_t length = 50 + rng() % 150;
            for (std::size_t i = 0; i < length; ++i, ++seq) {
                PredictionEvent e;
                e.seq = static_cast<std::int64_t>(seq);
                e.timestamp = "t";
                e.predicted = "x";
                e.actual = (static_cast<int>(seq % 10) < per_ten) ? "x" : "y";
                e.confidence = 0.9;
                events.push_back(std::move(e));
            }
        }
        DriftConfig config{50, 0.15, 0.10, 10};
        auto got = detect_deviation(rolling_stats(events, config.window),
                                    accuracy_baseline(0.9), config);
        auto expected =
            drift_oracle(events, config.window, 0.9, config.accuracy_tolerance, std::nullopt,
                         config.confidence_tolerance, config.min_labeled);
        CAPTURE(round);
        REQUIRE(got.size() == expected.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].window_end_seq == expected[i].window_end_seq);
            CHECK(got[i].observed == doctest::Approx(expected[i].observed));
        }
    }
}

TEST_CASE("confidence drops are detected against a mean_confidence metric") {
    auto events = constant_stream(100, true, 0.9);
    for (std::size_t i = 50; i < events.size(); ++i) events[i].confidence = 0.4;
    card::QuantitativeAnalysis qa = accuracy_baseline(1.0);
    qa.performance_metrics.push_back({"mean_confidence", 0.9, std::nullopt, std::nullopt});
    DriftConfig config{20, 0.10, 0.10, 1};
    auto deviations = detect_deviation(rolling_stats(events, config.window), qa, config);
    REQUIRE(deviations.size() == 1);
    CHECK(deviations[0].kind == DeviationKind::confidence_drop);
}

TEST_CASE("to_feedback groups consecutive deviations by kind") {
    CHECK(to_feedback({}).empty());

    std::vector<Deviation> deviations{
        {DeviationKind::accuracy_drop, 100, 0.7, 0.9, 0.2},
        {DeviationKind::accuracy_drop, 180, 0.72, 0.9, 0.18},
        {DeviationKind::confidence_drop, 220, 0.5, 0.88, 0.38},
        {DeviationKind::accuracy_drop, 300, 0.6, 0.9, 0.3},
    };
    auto items = to_feedback(deviations);
    REQUIRE(items.size() == 3);
    CHECK(items[0].kind == FeedbackKind::model_drift);
    CHECK(items[0].evidence.size() == 2);
    CHECK(items[1].kind == FeedbackKind::concept_drift_suspect);
    CHECK(items[2].kind == FeedbackKind::model_drift);
    CHECK(items[0].id == "FB-ACC-100");
    CHECK(items[1].id == "FB-CONF-220");
    for (const auto& item : items) {
        CHECK_FALSE(item.proposed_requirement_title.empty());
        CHECK_FALSE(item.evidence.empty());
    }
}

TEST_CASE("feedback stubs ingest cleanly as requirements") {
    std::vector<Deviation> deviations{{DeviationKind::accuracy_drop, 533, 0.74, 0.9, 0.16}};
    auto items = to_feedback(deviations);
    REQUIRE(items.size() == 1);

    const auto dir =
        std::filesystem::temp_directory_path() / "designctl_inbox_test" / "inbox";
    std::filesystem::remove_all(dir.parent_path());
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / (items[0].id + ".md"));
        out << feedback_stub_markdown(items[0]);
    }
    auto loaded = ingest::load_trace_items(dir.parent_path());
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].id == "FB-ACC-533");
    CHECK(loaded[0].kind == trace::ItemKind::requirement);
    CHECK(loaded[0].title.find("accuracy drop") != std::string::npos);
    auto graph = trace::build_graph(loaded);
    CHECK(graph.contains("FB-ACC-533"));
    std::filesystem::remove_all(dir.parent_path());
}

TEST_CASE("parse_events validates the stream invariants") {
    CHECK(parse_events("").empty());
    auto events = parse_events(
        R"({"seq":0,"timestamp":"t","predicted":"x","actual":"x","confidence":0.5})"
        "\n"
        R"({"seq":3,"timestamp":"t","predicted":"x","confidence":1})"
        "\n");
    REQUIRE(events.size() == 2);
    CHECK(events[0].actual.has_value());
    CHECK_FALSE(events[1].actual.has_value());

    CHECK_THROWS_WITH_AS(
        parse_events(R"({"seq":0,"timestamp":"t","predicted":"x","confidence":1.5})"),
        doctest::Contains("SchemaViolation"), Error);
    CHECK_THROWS_WITH_AS(parse_events(R"({"seq":2,"timestamp":"t","predicted":"x","confidence":1})"
                                      "\n"
                                      R"({"seq":1,"timestamp":"t","predicted":"x","confidence":1})"),
                         doctest::Contains("SchemaViolation"), Error);
    CHECK_THROWS_WITH_AS(parse_events("not json"), doctest::Contains("MalformedJson"),
                         Error);
}
