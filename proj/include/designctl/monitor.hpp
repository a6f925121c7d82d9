#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "designctl/common.hpp"
#include "designctl/modelcard.hpp"

namespace designctl::monitor {

struct PredictionEvent {
    std::int64_t seq = 0;  // strictly increasing within a stream
    std::string timestamp;
    std::string predicted;
    std::optional<std::string> actual;  // labels may arrive later
    double confidence = 0.0;            // in [0,1]
};

struct DriftConfig {
    std::size_t window = 100;
    double accuracy_tolerance = 0.10;
    double confidence_tolerance = 0.10;
    std::size_t min_labeled = 1;  // <= window
};

struct WindowStats {
    std::int64_t end_seq = 0;
    std::optional<double> accuracy;  // correct/labeled; empty when no labels in window
    double mean_confidence = 0.0;
    std::size_t labeled_count = 0;
};

enum class DeviationKind { accuracy_drop, confidence_drop };
enum class FeedbackKind { model_drift, concept_drift_suspect };

std::string_view to_string(DeviationKind k);
std::string_view to_string(FeedbackKind k);

struct Deviation {
    DeviationKind kind = DeviationKind::accuracy_drop;
    std::int64_t window_end_seq = 0;
    double observed = 0.0;
    double baseline = 0.0;
    double delta = 0.0;  // baseline - observed

    json to_json() const;
};

struct FeedbackItem {
    std::string id;
    FeedbackKind kind = FeedbackKind::model_drift;
    std::vector<Deviation> evidence;  // non-empty
    std::string proposed_requirement_title;

    json to_json() const;
};

// One JSON event per line. Throws Error("ParseError"/"SchemaViolation")
// with the line number; seq must be strictly increasing, confidence in [0,1].
std::vector<PredictionEvent> parse_events(std::string_view jsonl, const std::string& where = {});

// One output per position >= window (a window shorter than the stream
// start yields nothing; window > event count yields an empty series).
std::vector<WindowStats> rolling_stats(std::span<const PredictionEvent> events,
                                       std::size_t window);

// Edge-triggered threshold detector against the card's recorded
// baselines: accuracy vs the card's "accuracy" metric, confidence vs a
// "mean_confidence" metric when present. Throws Error("BaselineMissing")
// when the card has no accuracy metric, Error("ConfigInvalid") when
// min_labeled > window or a tolerance is out of (0,1].
std::vector<Deviation> detect_deviation(std::span<const WindowStats> series,
                                        const card::QuantitativeAnalysis& baseline,
                                        const DriftConfig& config);

// Groups consecutive deviations of one kind into a single feedback item;
// accuracy_drop -> model_drift, confidence_drop -> concept_drift_suspect.
std::vector<FeedbackItem> to_feedback(std::span<const Deviation> deviations);

// Requirement-stub Markdown (trace-item front matter + evidence body),
// suitable for dropping into trace/inbox/.
std::string feedback_stub_markdown(const FeedbackItem& item);

}  // namespace designctl::monitor
