#include "designctl/monitor.hpp"

#include <algorithm>
#include <sstream>

#include "designctl/canonical.hpp"

namespace designctl::monitor {

namespace {

std::string fmt(double v) { return canonical_dump(json(v)); }

const card::Metric* find_metric(const card::QuantitativeAnalysis& qa,
                                std::string_view type) {
    const card::Metric* fallback = nullptr;
    for (const auto& m : qa.performance_metrics) {
        if (m.type != type) continue;
        if (!m.slice) return &m;  // prefer the unsliced metric
        if (fallback == nullptr) fallback = &m;
    }
    return fallback;
}

// Edge-triggered threshold crossing: one deviation per excursion below
// the threshold, re-armed once the signal recovers to >= threshold.
class EdgeTrigger {
public:
    explicit EdgeTrigger(double threshold) : threshold_(threshold) {}

    bool observe(double value) {
        if (armed_ && value < threshold_) {
            armed_ = false;
            return true;
        }
        if (!armed_ && value >= threshold_) {
            armed_ = true;
        }
        return false;
    }

private:
    double threshold_;
    bool armed_ = true;
};

}  // namespace

std::string_view to_string(DeviationKind k) {
    return k == DeviationKind::accuracy_drop ? "accuracy_drop" : "confidence_drop";
}

std::string_view to_string(FeedbackKind k) {
    return k == FeedbackKind::model_drift ? "model_drift" : "concept_drift_suspect";
}

json Deviation::to_json() const {
    return json{{"kind", std::string(to_string(kind))},
                {"window_end_seq", window_end_seq},
                {"observed", observed},
                {"baseline", baseline},
                {"delta", delta}};
}

json FeedbackItem::to_json() const {
    json evidence_json = json::array();
    for (const auto& d : evidence) evidence_json.push_back(d.to_json());
    return json{{"id", id},
                {"kind", std::string(to_string(kind))},
                {"evidence", std::move(evidence_json)},
                {"proposed_requirement_title", proposed_requirement_title}};
}

std::vector<PredictionEvent> parse_events(std::string_view jsonl, const std::string& where) {
    std::vector<PredictionEvent> events;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= jsonl.size()) {
        std::size_t end = jsonl.find('\n', pos);
        if (end == std::string_view::npos) end = jsonl.size();
        std::string_view line = jsonl.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

        const std::string at = (where.empty() ? "events" : where) + ":" + std::to_string(line_no);
        json j = parse_json(line, at);
        if (!j.is_object()) throw Error("SchemaViolation", "event must be an object", at);
        PredictionEvent e;
        auto need = [&](const char* key) -> const json& {
            auto it = j.find(key);
            if (it == j.end()) {
                throw Error("SchemaViolation", std::string("event missing '") + key + "'", at);
            }
            return *it;
        };
        const json& seq = need("seq");
        if (!seq.is_number_integer() || seq.get<std::int64_t>() < 0) {
            throw Error("SchemaViolation", "seq must be a non-negative integer", at);
        }
        e.seq = seq.get<std::int64_t>();
        if (!events.empty() && e.seq <= events.back().seq) {
            throw Error("SchemaViolation", "seq must be strictly increasing", at);
        }
        e.timestamp = need("timestamp").get<std::string>();
        e.predicted = need("predicted").get<std::string>();
        if (auto it = j.find("actual"); it != j.end() && !it->is_null()) {
            e.actual = it->get<std::string>();
        }
        const json& confidence = need("confidence");
        if (!confidence.is_number()) {
            throw Error("SchemaViolation", "confidence must be a number", at);
        }
        e.confidence = confidence.get<double>();
        if (e.confidence < 0.0 || e.confidence > 1.0) {
            throw Error("SchemaViolation", "confidence must be within [0,1]", at);
        }
        events.push_back(std::move(e));
    }
    return events;
}

std::vector<WindowStats> rolling_stats(std::span<const PredictionEvent> events,
                                       std::size_t window) {
    std::vector<WindowStats> series;
    if (window == 0 || events.size() < window) return series;
    series.reserve(events.size() - window + 1);

    double confidence_sum = 0.0;
    std::size_t labeled = 0;
    std::size_t correct = 0;
    auto contributes = [](const PredictionEvent& e) {
        return e.actual.has_value();
    };
    for (std::size_t i = 0; i < events.size(); ++i) {
        confidence_sum += events[i].confidence;
        if (contributes(events[i])) {
            ++labeled;
            if (*events[i].actual == events[i].predicted) ++correct;
        }
        if (i + 1 > window) {
            const PredictionEvent& gone = events[i - window];
            confidence_sum -= gone.confidence;
            if (contributes(gone)) {
                --labeled;
                if (*gone.actual == gone.predicted) --correct;
            }
        }
        if (i + 1 >= window) {
            WindowStats stats;
            stats.end_seq = events[i].seq;
            stats.labeled_count = labeled;
            stats.mean_confidence = confidence_sum / static_cast<double>(window);
            if (labeled > 0) {
                stats.accuracy = static_cast<double>(correct) / static_cast<double>(labeled);
            }
            series.push_back(stats);
        }
    }
    return series;
}

std::vector<Deviation> detect_deviation(std::span<const WindowStats> series,
                                        const card::QuantitativeAnalysis& baseline,
                                        const DriftConfig& config) {
    if (config.window == 0 || config.min_labeled > config.window) {
        throw Error("ConfigInvalid", "min_labeled must not exceed window");
    }
    if (config.accuracy_tolerance <= 0.0 || config.accuracy_tolerance > 1.0 ||
        config.confidence_tolerance <= 0.0 || config.confidence_tolerance > 1.0) {
        throw Error("ConfigInvalid", "tolerances must be within (0,1]");
    }
    const card::Metric* accuracy_metric = find_metric(baseline, "accuracy");
    if (accuracy_metric == nullptr) {
        throw Error("BaselineMissing", "card records no accuracy metric");
    }
    const card::Metric* confidence_metric = find_metric(baseline, "mean_confidence");

    const double accuracy_baseline = accuracy_metric->value;
    EdgeTrigger accuracy_trigger(accuracy_baseline - config.accuracy_tolerance);
    std::optional<EdgeTrigger> confidence_trigger;
    double confidence_baseline = 0.0;
    if (confidence_metric != nullptr) {
        confidence_baseline = confidence_metric->value;
        confidence_trigger.emplace(confidence_baseline - config.confidence_tolerance);
    }

    std::vector<Deviation> deviations;
    for (const auto& point : series) {
        if (point.accuracy && point.labeled_count >= config.min_labeled) {
            if (accuracy_trigger.observe(*point.accuracy)) {
                deviations.push_back({DeviationKind::accuracy_drop, point.end_seq,
                                      *point.accuracy, accuracy_baseline,
                                      accuracy_baseline - *point.accuracy});
            }
        }
        if (confidence_trigger && confidence_trigger->observe(point.mean_confidence)) {
            deviations.push_back({DeviationKind::confidence_drop, point.end_seq,
                                  point.mean_confidence, confidence_baseline,
                                  confidence_baseline - point.mean_confidence});
        }
    }
    return deviations;
}

std::vector<FeedbackItem> to_feedback(std::span<const Deviation> deviations) {
    std::vector<FeedbackItem> items;
    const Deviation* previous = nullptr;
    for (const auto& deviation : deviations) {
        if (previous == nullptr || previous->kind != deviation.kind) {
            FeedbackItem item;
            item.kind = deviation.kind == DeviationKind::accuracy_drop
                            ? FeedbackKind::model_drift
                            : FeedbackKind::concept_drift_suspect;
            const char* tag =
                deviation.kind == DeviationKind::accuracy_drop ? "ACC" : "CONF";
            item.id = "FB-" + std::string(tag) + "-" +
                      std::to_string(deviation.window_end_seq);
            const char* signal =
                deviation.kind == DeviationKind::accuracy_drop ? "accuracy" : "confidence";
            item.proposed_requirement_title =
                "Investigate " + std::string(signal) + " drop: observed " +
                fmt(deviation.observed) + " against baseline " + fmt(deviation.baseline) +
                " (window ending at seq " + std::to_string(deviation.window_end_seq) + ")";
            items.push_back(std::move(item));
        }
        items.back().evidence.push_back(deviation);
        previous = &deviation;
    }
    return items;
}

std::string feedback_stub_markdown(const FeedbackItem& item) {
    std::ostringstream out;
    out << "---\n";
    out << "id: " << item.id << "\n";
    out << "kind: requirement\n";
    out << "title: \"" << item.proposed_requirement_title << "\"\n";
    out << "links: []\n";
    out << "---\n\n";
    out << "Post-market monitoring detected " << to_string(item.kind) << ".\n\n";
    out << "Evidence:\n";
    for (const auto& d : item.evidence) {
        out << "- " << to_string(d.kind) << " at window_end_seq=" << d.window_end_seq
            << ": observed=" << fmt(d.observed) << ", baseline=" << fmt(d.baseline)
            << ", delta=" << fmt(d.delta) << "\n";
    }
    return out.str();
}

}  // namespace designctl::monitor
