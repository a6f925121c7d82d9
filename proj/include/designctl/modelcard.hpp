#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "designctl/canonical.hpp"
#include "designctl/common.hpp"

namespace designctl::card {

enum class Profile { structural, development, release };
enum class DatasetRole { train, test };
enum class SourceKind { clinical_registry, export_file, database, other };
enum class RiskCategory { input_data, algorithm_design, output_decisions };
enum class FieldVisibility { pub, priv };

std::string_view to_string(Profile p);
Profile profile_from_string(std::string_view s);
std::string_view to_string(DatasetRole r);
std::string_view to_string(SourceKind k);
std::string_view to_string(RiskCategory c);

struct DataSource {
    std::string id;
    SourceKind kind = SourceKind::other;
    std::string description;
    std::optional<std::string> digest;
};

struct Dataset {
    std::string name;
    DatasetRole role = DatasetRole::train;
    std::string description;  // Markdown; carries the dataset justification
    std::vector<DataSource> sources;
    std::optional<std::string> digest;
    std::optional<std::vector<std::string>> record_digests;  // sorted, unique
    std::optional<std::int64_t> record_count;
};

struct ExtraParameter {
    std::string name;
    json value;  // number or string
    std::optional<std::pair<double, double>> valid_range;
};

struct ModelVersion {
    std::string name;
    std::string date;  // ISO-8601
    std::string diff;
};

struct Owner {
    std::string name;
    std::string role;
};

struct ModelDetails {
    std::string name;
    std::string documentation;  // Markdown, template driven
    std::optional<ModelVersion> version;
    std::vector<Owner> owners;
    std::optional<std::string> license;
};

struct Metric {
    std::string type;  // e.g. "accuracy", "auc"
    double value = 0.0;
    std::optional<std::string> slice;
    std::optional<double> threshold;
};

struct QuantitativeAnalysis {
    std::vector<Metric> performance_metrics;
    std::string evaluation_context;
};

struct Risk {
    std::string name;
    RiskCategory category = RiskCategory::algorithm_design;
    std::string mitigation;
    std::optional<std::string> requirement_ref;
};

struct Considerations {
    std::vector<std::string> limitations;
    std::vector<std::string> tradeoffs;
    std::vector<std::string> ethical_considerations;
    std::vector<Risk> risks;
};

struct RegulatoryExtension {
    std::string intended_use;
    std::string clinical_evaluation;
    std::vector<std::string> resource_requirements;
    std::map<std::string, FieldVisibility> visibility;  // selector -> visibility
    bool redacted = false;
};

// The parsed card. `doc` holds the canonicalized source document and is
// authoritative for serialization, diffing and redaction; the typed
// members are a read view extracted from it. Unknown `x_`-prefixed
// fields live only in `doc` and survive round trips.
struct ModelCard {
    std::string schema_version;
    ModelDetails model_details;
    std::vector<Dataset> datasets;  // model_parameters.data
    std::optional<std::string> model_format;
    std::vector<ExtraParameter> parameters;  // model_parameters.x_parameters
    std::optional<QuantitativeAnalysis> quantitative_analysis;
    std::optional<Considerations> considerations;
    std::optional<RegulatoryExtension> regulatory;  // x_regulatory
    std::vector<std::string> warnings;  // unknown non-x_ fields seen at parse
    json doc;
};

struct ValidationFinding {
    std::string code;
    Severity severity = Severity::error;
    std::string path;
    std::string message;
};

struct ValidationReport {
    Profile profile = Profile::structural;
    std::vector<ValidationFinding> findings;
    bool passed = false;  // passed <=> no finding with severity=error

    json to_json() const;
};

struct CardDiff {
    std::vector<std::string> changed_paths;  // sorted field selectors
    bool version_changed = false;
    bool datasets_changed = false;
    bool metrics_changed = false;

    json to_json() const;
};

// Errors: MalformedJson (unparseable bytes), SchemaViolation (required
// field missing or wrong type / broken field invariant), both carrying
// the offending field selector in where().
ModelCard parse_card(std::string_view bytes);

// Canonical bytes of the card document.
std::string serialize_card(const ModelCard& card);

ValidationReport validate_card(const ModelCard& card, Profile profile);

CardDiff diff_cards(const ModelCard& old_card, const ModelCard& new_card);

// Removes every field whose visibility selector maps to private, drops
// the satisfied private entries from the visibility map and stamps
// x_regulatory.redacted when anything was removed. Throws
// Error("SelectorUnresolved") when a selector matches no field.
ModelCard redact_card(const ModelCard& card);

}  // namespace designctl::card
