#include "designctl/modelcard.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace designctl::card {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw Error("SchemaViolation", msg, path);
}

std::string join(const std::string& prefix, const char* key) {
    return prefix.empty() ? std::string(key) : prefix + "." + key;
}

std::string at(const std::string& prefix, std::size_t index) {
    return prefix + "[" + std::to_string(index) + "]";
}

const json* opt_member(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

const json& req_member(const json& obj, const std::string& path, const char* key) {
    const json* m = opt_member(obj, key);
    if (m == nullptr) fail(join(path, key), "required field missing");
    return *m;
}

std::string get_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

double get_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

void expect_object(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
}

void expect_array(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array");
}

bool is_semver(std::string_view s) {
    int part = 0;
    std::size_t digits = 0;
    for (char ch : s) {
        if (ch == '.') {
            if (digits == 0 || part == 2) return false;
            ++part;
            digits = 0;
        } else if (ch >= '0' && ch <= '9') {
            ++digits;
        } else {
            return false;
        }
    }
    return part == 2 && digits > 0;
}

bool is_lower_hex(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char ch) {
        return (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f');
    });
}

bool is_iso_date(std::string_view s) {
    if (s.size() < 10) return false;
    for (std::size_t i = 0; i < 10; ++i) {
        if (i == 4 || i == 7) {
            if (s[i] != '-') return false;
        } else if (s[i] < '0' || s[i] > '9') {
            return false;
        }
    }
    return s.size() == 10 || s[10] == 'T' || s[10] == ' ';
}

void note_unknown_fields(const json& obj, const std::string& path,
                         std::initializer_list<std::string_view> known,
                         std::vector<std::string>& warnings) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (key.rfind("x_", 0) == 0) continue;  // extensions are preserved verbatim
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            warnings.push_back("unknown field " + join(path, key.c_str()));
        }
    }
}

std::vector<std::string> get_string_list(const json& v, const std::string& path) {
    expect_array(v, path);
    std::vector<std::string> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(get_string(v[i], at(path, i)));
    }
    return out;
}

DataSource extract_source(const json& j, const std::string& path,
                          std::vector<std::string>& warnings) {
    expect_object(j, path);
    note_unknown_fields(j, path, {"id", "kind", "description", "digest"}, warnings);
    DataSource s;
    s.id = get_string(req_member(j, path, "id"), join(path, "id"));
    if (s.id.empty()) fail(join(path, "id"), "id must be non-empty");
    std::string kind = get_string(req_member(j, path, "kind"), join(path, "kind"));
    if (kind == "clinical_registry") s.kind = SourceKind::clinical_registry;
    else if (kind == "export_file") s.kind = SourceKind::export_file;
    else if (kind == "database") s.kind = SourceKind::database;
    else if (kind == "other") s.kind = SourceKind::other;
    else fail(join(path, "kind"), "unknown data source kind '" + kind + "'");
    if (const json* d = opt_member(j, "description")) {
        s.description = get_string(*d, join(path, "description"));
    }
    if (const json* d = opt_member(j, "digest")) {
        std::string hex = get_string(*d, join(path, "digest"));
        if (!is_lower_hex(hex)) fail(join(path, "digest"), "expected a lowercase hex digest");
        s.digest = hex;
    }
    return s;
}

Dataset extract_dataset(const json& j, const std::string& path,
                        std::vector<std::string>& warnings) {
    expect_object(j, path);
    note_unknown_fields(j, path,
                        {"name", "role", "description", "digest", "record_digests",
                         "record_count"},
                        warnings);
    Dataset d;
    d.name = get_string(req_member(j, path, "name"), join(path, "name"));
    std::string role = get_string(req_member(j, path, "role"), join(path, "role"));
    if (role == "train") d.role = DatasetRole::train;
    else if (role == "test") d.role = DatasetRole::test;
    else fail(join(path, "role"), "dataset role must be train or test");
    if (const json* v = opt_member(j, "description")) {
        d.description = get_string(*v, join(path, "description"));
    }
    if (const json* v = opt_member(j, "x_sources")) {
        const std::string spath = join(path, "x_sources");
        expect_array(*v, spath);
        for (std::size_t i = 0; i < v->size(); ++i) {
            d.sources.push_back(extract_source((*v)[i], at(spath, i), warnings));
        }
    }
    if (const json* v = opt_member(j, "digest")) {
        std::string hex = get_string(*v, join(path, "digest"));
        if (!is_lower_hex(hex)) fail(join(path, "digest"), "expected a lowercase hex digest");
        d.digest = hex;
    }
    if (const json* v = opt_member(j, "record_digests")) {
        const std::string rpath = join(path, "record_digests");
        std::vector<std::string> digests = get_string_list(*v, rpath);
        for (std::size_t i = 0; i < digests.size(); ++i) {
            if (!is_lower_hex(digests[i])) {
                fail(at(rpath, i), "expected a lowercase hex digest");
            }
            if (i > 0 && !(digests[i - 1] < digests[i])) {
                fail(rpath, "record_digests must be sorted and duplicate-free");
            }
        }
        d.record_digests = std::move(digests);
    }
    if (const json* v = opt_member(j, "record_count")) {
        if (!v->is_number_integer() || v->get<std::int64_t>() < 0) {
            fail(join(path, "record_count"), "expected a non-negative integer");
        }
        d.record_count = v->get<std::int64_t>();
    }
    if (d.record_digests) {
        const auto n = static_cast<std::int64_t>(d.record_digests->size());
        if (d.record_count && *d.record_count != n) {
            fail(join(path, "record_count"),
                 "record_count " + std::to_string(*d.record_count) + " does not match " +
                     std::to_string(n) + " record_digests");
        }
        d.record_count = n;
    }
    return d;
}

ModelDetails extract_details(const json& j, std::vector<std::string>& warnings) {
    const std::string path = "model_details";
    expect_object(j, path);
    note_unknown_fields(j, path, {"name", "documentation", "version", "owners", "license"},
                        warnings);
    ModelDetails d;
    d.name = get_string(req_member(j, path, "name"), join(path, "name"));
    if (d.name.empty()) fail(join(path, "name"), "model name must be non-empty");
    if (const json* v = opt_member(j, "documentation")) {
        d.documentation = get_string(*v, join(path, "documentation"));
    }
    if (const json* v = opt_member(j, "version")) {
        const std::string vpath = join(path, "version");
        expect_object(*v, vpath);
        note_unknown_fields(*v, vpath, {"name", "date", "diff"}, warnings);
        ModelVersion mv;
        mv.name = get_string(req_member(*v, vpath, "name"), join(vpath, "name"));
        mv.date = get_string(req_member(*v, vpath, "date"), join(vpath, "date"));
        if (!is_iso_date(mv.date)) fail(join(vpath, "date"), "expected an ISO-8601 date");
        if (const json* df = opt_member(*v, "diff")) {
            mv.diff = get_string(*df, join(vpath, "diff"));
        }
        d.version = std::move(mv);
    }
    if (const json* v = opt_member(j, "owners")) {
        const std::string opath = join(path, "owners");
        expect_array(*v, opath);
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string epath = at(opath, i);
            expect_object((*v)[i], epath);
            note_unknown_fields((*v)[i], epath, {"name", "role"}, warnings);
            Owner o;
            o.name = get_string(req_member((*v)[i], epath, "name"), join(epath, "name"));
            o.role = get_string(req_member((*v)[i], epath, "role"), join(epath, "role"));
            d.owners.push_back(std::move(o));
        }
    }
    if (const json* v = opt_member(j, "license")) {
        d.license = get_string(*v, join(path, "license"));
    }
    return d;
}

QuantitativeAnalysis extract_quantitative(const json& j, std::vector<std::string>& warnings) {
    const std::string path = "quantitative_analysis";
    expect_object(j, path);
    note_unknown_fields(j, path, {"performance_metrics", "evaluation_context"}, warnings);
    QuantitativeAnalysis qa;
    const json& metrics = req_member(j, path, "performance_metrics");
    const std::string mpath = join(path, "performance_metrics");
    expect_array(metrics, mpath);
    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t i = 0; i < metrics.size(); ++i) {
        const std::string epath = at(mpath, i);
        expect_object(metrics[i], epath);
        note_unknown_fields(metrics[i], epath, {"type", "value", "slice", "threshold"},
                            warnings);
        Metric m;
        m.type = get_string(req_member(metrics[i], epath, "type"), join(epath, "type"));
        m.value = get_number(req_member(metrics[i], epath, "value"), join(epath, "value"));
        if (const json* v = opt_member(metrics[i], "slice")) {
            m.slice = get_string(*v, join(epath, "slice"));
        }
        if (const json* v = opt_member(metrics[i], "threshold")) {
            m.threshold = get_number(*v, join(epath, "threshold"));
        }
        if (!seen.emplace(m.type, m.slice.value_or("")).second) {
            fail(epath, "duplicate metric for type '" + m.type + "'" +
                            (m.slice ? " slice '" + *m.slice + "'" : ""));
        }
        qa.performance_metrics.push_back(std::move(m));
    }
    if (const json* v = opt_member(j, "evaluation_context")) {
        qa.evaluation_context = get_string(*v, join(path, "evaluation_context"));
    }
    return qa;
}

Considerations extract_considerations(const json& j, std::vector<std::string>& warnings) {
    const std::string path = "considerations";
    expect_object(j, path);
    note_unknown_fields(
        j, path, {"limitations", "tradeoffs", "ethical_considerations", "risks"}, warnings);
    Considerations c;
    if (const json* v = opt_member(j, "limitations")) {
        c.limitations = get_string_list(*v, join(path, "limitations"));
    }
    if (const json* v = opt_member(j, "tradeoffs")) {
        c.tradeoffs = get_string_list(*v, join(path, "tradeoffs"));
    }
    if (const json* v = opt_member(j, "ethical_considerations")) {
        c.ethical_considerations = get_string_list(*v, join(path, "ethical_considerations"));
    }
    if (const json* v = opt_member(j, "risks")) {
        const std::string rpath = join(path, "risks");
        expect_array(*v, rpath);
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string epath = at(rpath, i);
            expect_object((*v)[i], epath);
            note_unknown_fields((*v)[i], epath,
                                {"name", "category", "mitigation", "requirement_ref"},
                                warnings);
            Risk r;
            r.name = get_string(req_member((*v)[i], epath, "name"), join(epath, "name"));
            std::string cat =
                get_string(req_member((*v)[i], epath, "category"), join(epath, "category"));
            if (cat == "input_data") r.category = RiskCategory::input_data;
            else if (cat == "algorithm_design") r.category = RiskCategory::algorithm_design;
            else if (cat == "output_decisions") r.category = RiskCategory::output_decisions;
            else fail(join(epath, "category"), "unknown risk category '" + cat + "'");
            if (const json* m = opt_member((*v)[i], "mitigation")) {
                r.mitigation = get_string(*m, join(epath, "mitigation"));
            }
            if (const json* m = opt_member((*v)[i], "requirement_ref")) {
                r.requirement_ref = get_string(*m, join(epath, "requirement_ref"));
            }
            c.risks.push_back(std::move(r));
        }
    }
    return c;
}

RegulatoryExtension extract_regulatory(const json& j, std::vector<std::string>& warnings) {
    const std::string path = "x_regulatory";
    expect_object(j, path);
    note_unknown_fields(j, path,
                        {"intended_use", "clinical_evaluation", "resource_requirements",
                         "visibility", "redacted"},
                        warnings);
    RegulatoryExtension r;
    if (const json* v = opt_member(j, "intended_use")) {
        r.intended_use = get_string(*v, join(path, "intended_use"));
    }
    if (const json* v = opt_member(j, "clinical_evaluation")) {
        r.clinical_evaluation = get_string(*v, join(path, "clinical_evaluation"));
    }
    if (const json* v = opt_member(j, "resource_requirements")) {
        r.resource_requirements = get_string_list(*v, join(path, "resource_requirements"));
    }
    if (const json* v = opt_member(j, "visibility")) {
        const std::string vpath = join(path, "visibility");
        expect_object(*v, vpath);
        for (const auto& [selector, value] : v->items()) {
            std::string vis = get_string(value, join(vpath, selector.c_str()));
            if (vis == "public") r.visibility.emplace(selector, FieldVisibility::pub);
            else if (vis == "private") r.visibility.emplace(selector, FieldVisibility::priv);
            else fail(join(vpath, selector.c_str()), "visibility must be public or private");
        }
    }
    if (const json* v = opt_member(j, "redacted")) {
        if (!v->is_boolean()) fail(join(path, "redacted"), "expected a boolean");
        r.redacted = v->get<bool>();
    }
    return r;
}

// Rebuilds the typed view from card.doc; shared by parse and redact.
void extract_card(ModelCard& c) {
    const json& doc = c.doc;
    if (!doc.is_object()) fail("", "card document must be a JSON object");
    c.warnings.clear();
    note_unknown_fields(doc, "",
                        {"schema_version", "model_details", "model_parameters",
                         "quantitative_analysis", "considerations"},
                        c.warnings);

    c.schema_version =
        get_string(req_member(doc, "", "schema_version"), "schema_version");
    if (!is_semver(c.schema_version)) {
        fail("schema_version", "expected MAJOR.MINOR.PATCH");
    }

    c.model_details = extract_details(req_member(doc, "", "model_details"), c.warnings);

    const json& params = req_member(doc, "", "model_parameters");
    const std::string ppath = "model_parameters";
    expect_object(params, ppath);
    note_unknown_fields(params, ppath, {"data", "model_format"}, c.warnings);
    const json& data = req_member(params, ppath, "data");
    const std::string dpath = join(ppath, "data");
    expect_array(data, dpath);
    c.datasets.clear();
    for (std::size_t i = 0; i < data.size(); ++i) {
        c.datasets.push_back(extract_dataset(data[i], at(dpath, i), c.warnings));
    }
    std::set<std::string> source_ids;
    for (std::size_t i = 0; i < c.datasets.size(); ++i) {
        for (std::size_t s = 0; s < c.datasets[i].sources.size(); ++s) {
            if (!source_ids.insert(c.datasets[i].sources[s].id).second) {
                fail(join(at(join(at(dpath, i), "x_sources"), s), "id"),
                     "duplicate data source id '" + c.datasets[i].sources[s].id + "'");
            }
        }
    }
    if (const json* v = opt_member(params, "model_format")) {
        c.model_format = get_string(*v, join(ppath, "model_format"));
    } else {
        c.model_format.reset();
    }
    c.parameters.clear();
    if (const json* v = opt_member(params, "x_parameters")) {
        const std::string xpath = join(ppath, "x_parameters");
        expect_array(*v, xpath);
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string epath = at(xpath, i);
            expect_object((*v)[i], epath);
            note_unknown_fields((*v)[i], epath, {"name", "value", "valid_range"}, c.warnings);
            ExtraParameter p;
            p.name = get_string(req_member((*v)[i], epath, "name"), join(epath, "name"));
            p.value = req_member((*v)[i], epath, "value");
            if (!p.value.is_number() && !p.value.is_string()) {
                fail(join(epath, "value"), "expected a number or string");
            }
            if (const json* r = opt_member((*v)[i], "valid_range")) {
                const std::string rpath = join(epath, "valid_range");
                expect_array(*r, rpath);
                if (r->size() != 2) fail(rpath, "expected [min, max]");
                double lo = get_number((*r)[0], at(rpath, 0));
                double hi = get_number((*r)[1], at(rpath, 1));
                if (lo > hi) fail(rpath, "min exceeds max");
                p.valid_range = {lo, hi};
            }
            c.parameters.push_back(std::move(p));
        }
    }

    c.quantitative_analysis.reset();
    if (const json* v = opt_member(doc, "quantitative_analysis")) {
        c.quantitative_analysis = extract_quantitative(*v, c.warnings);
    }
    c.considerations.reset();
    if (const json* v = opt_member(doc, "considerations")) {
        c.considerations = extract_considerations(*v, c.warnings);
    }
    c.regulatory.reset();
    if (const json* v = opt_member(doc, "x_regulatory")) {
        c.regulatory = extract_regulatory(*v, c.warnings);
    }
}

}  // namespace

std::string_view to_string(Profile p) {
    switch (p) {
        case Profile::structural: return "structural";
        case Profile::development: return "development";
        case Profile::release: return "release";
    }
    return "structural";
}

Profile profile_from_string(std::string_view s) {
    if (s == "structural") return Profile::structural;
    if (s == "development") return Profile::development;
    if (s == "release") return Profile::release;
    throw Error("ConfigInvalid", "unknown profile '" + std::string(s) + "'");
}

std::string_view to_string(DatasetRole r) {
    return r == DatasetRole::train ? "train" : "test";
}

std::string_view to_string(SourceKind k) {
    switch (k) {
        case SourceKind::clinical_registry: return "clinical_registry";
        case SourceKind::export_file: return "export_file";
        case SourceKind::database: return "database";
        case SourceKind::other: return "other";
    }
    return "other";
}

std::string_view to_string(RiskCategory c) {
    switch (c) {
        case RiskCategory::input_data: return "input_data";
        case RiskCategory::algorithm_design: return "algorithm_design";
        case RiskCategory::output_decisions: return "output_decisions";
    }
    return "algorithm_design";
}

json ValidationReport::to_json() const {
    json findings_json = json::array();
    for (const auto& f : findings) {
        findings_json.push_back({{"code", f.code},
                                 {"severity", std::string(designctl::to_string(f.severity))},
                                 {"path", f.path},
                                 {"message", f.message}});
    }
    return json{{"profile", std::string(to_string(profile))},
                {"findings", std::move(findings_json)},
                {"passed", passed}};
}

json CardDiff::to_json() const {
    return json{{"changed_paths", changed_paths},
                {"version_changed", version_changed},
                {"datasets_changed", datasets_changed},
                {"metrics_changed", metrics_changed}};
}

ModelCard parse_card(std::string_view bytes) {
    ModelCard c;
    c.doc = parse_json(bytes);
    extract_card(c);
    return c;
}

std::string serialize_card(const ModelCard& card) {
    return canonical_dump(card.doc);
}

ValidationReport validate_card(const ModelCard& card, Profile profile) {
    ValidationReport report;
    report.profile = profile;
    const bool redacted = card.regulatory && card.regulatory->redacted;

    auto add = [&](const char* code, Severity severity, const std::string& path,
                   std::string message) {
        report.findings.push_back({code, severity, path, std::move(message)});
    };
    // Absence of content that redaction may legitimately have removed is
    // reported as a warning on redacted cards.
    auto absent = [&](const char* code, const std::string& path, std::string message) {
        add(code, redacted ? Severity::warning : Severity::error, path, std::move(message));
    };

    // structural: shape invariants beyond what parsing already enforced
    for (std::size_t i = 0; i < card.parameters.size(); ++i) {
        const auto& p = card.parameters[i];
        if (!p.valid_range) continue;
        const std::string path = "model_parameters.x_parameters[" + std::to_string(i) + "]";
        if (!p.value.is_number()) {
            add("PARAM_OUT_OF_RANGE", Severity::error, path,
                "parameter '" + p.name + "' has a valid_range but a non-numeric value");
        } else {
            double v = p.value.get<double>();
            if (v < p.valid_range->first || v > p.valid_range->second) {
                add("PARAM_OUT_OF_RANGE", Severity::error, path,
                    "parameter '" + p.name + "' value " + canonical_dump(p.value) +
                        " outside valid range [" + canonical_dump(json(p.valid_range->first)) +
                        ", " + canonical_dump(json(p.valid_range->second)) + "]");
            }
        }
    }
    if (card.regulatory) {
        for (const auto& [selector, vis] : card.regulatory->visibility) {
            (void)vis;
            if (resolve_selector(card.doc, selector) == nullptr) {
                add("VISIBILITY_UNRESOLVED", Severity::error, selector,
                    "visibility selector matches no card field");
            }
        }
    }
    for (const auto& w : card.warnings) {
        add("UNKNOWN_FIELD", Severity::warning, "", w);
    }

    if (profile == Profile::development || profile == Profile::release) {
        if (card.model_details.documentation.empty()) {
            absent("DOC_MISSING", "model_details.documentation",
                   "model documentation is required before gating");
        }
        bool has_train = std::any_of(card.datasets.begin(), card.datasets.end(),
                                     [](const Dataset& d) { return d.role == DatasetRole::train; });
        if (!has_train) {
            absent("TRAIN_MISSING", "model_parameters.data",
                   "at least one training dataset is required");
        }
        for (std::size_t i = 0; i < card.datasets.size(); ++i) {
            const std::string path = "model_parameters.data[" + std::to_string(i) + "]";
            if (card.datasets[i].sources.empty()) {
                absent("X_SOURCES_MISSING", path + ".x_sources",
                       "dataset '" + card.datasets[i].name + "' traces to no data source");
            }
            if (card.datasets[i].description.empty()) {
                absent("JUSTIFICATION_MISSING", path + ".description",
                       "dataset '" + card.datasets[i].name + "' carries no justification");
            }
        }
    }

    if (profile == Profile::release) {
        const auto tests = std::count_if(card.datasets.begin(), card.datasets.end(),
                                         [](const Dataset& d) { return d.role == DatasetRole::test; });
        if (tests != 1) {
            absent("TEST_COUNT", "model_parameters.data",
                   "release card must carry exactly one test dataset, found " +
                       std::to_string(tests));
        }
        if (!card.quantitative_analysis) {
            absent("QA_MISSING", "quantitative_analysis",
                   "release card must record the integration test results");
        }
        if (!card.considerations) {
            absent("CONSIDERATIONS_MISSING", "considerations",
                   "release card must document limitations, trade-offs and risks");
        } else {
            const auto& risks = card.considerations->risks;
            for (std::size_t i = 0; i < risks.size(); ++i) {
                if (risks[i].mitigation.empty()) {
                    absent("MITIGATION_MISSING",
                           "considerations.risks[" + std::to_string(i) + "].mitigation",
                           "risk '" + risks[i].name + "' has no mitigation");
                }
            }
        }
        if (!card.regulatory || card.regulatory->intended_use.empty()) {
            absent("INTENDED_USE_MISSING", "x_regulatory.intended_use",
                   "release card must state the intended use");
        }
    }

    report.passed = std::none_of(report.findings.begin(), report.findings.end(),
                                 [](const ValidationFinding& f) {
                                     return f.severity == Severity::error;
                                 });
    return report;
}

CardDiff diff_cards(const ModelCard& old_card, const ModelCard& new_card) {
    CardDiff diff;
    auto old_leaves = flatten_leaves(old_card.doc);
    auto new_leaves = flatten_leaves(new_card.doc);
    std::set<std::string> changed;
    for (const auto& [path, value] : old_leaves) {
        auto it = new_leaves.find(path);
        if (it == new_leaves.end() || it->second != value) changed.insert(path);
    }
    for (const auto& [path, value] : new_leaves) {
        (void)value;
        if (old_leaves.find(path) == old_leaves.end()) changed.insert(path);
    }
    diff.changed_paths.assign(changed.begin(), changed.end());
    for (const auto& path : diff.changed_paths) {
        if (path == "model_details.version.name") diff.version_changed = true;
        if (path.rfind("model_parameters.data", 0) == 0) diff.datasets_changed = true;
        if (path.rfind("quantitative_analysis", 0) == 0) diff.metrics_changed = true;
    }
    return diff;
}

namespace {

struct ParsedSelector {
    std::string text;
    std::vector<std::string> keys;  // member names and bracketed indices, flattened
};

// Numeric-aware order so erasing in descending order never invalidates a
// later selector: deeper paths and higher array indices come first.
std::vector<std::string> erase_order(std::vector<std::string> selectors) {
    auto tokens = [](const std::string& s) {
        std::vector<std::pair<bool, std::string>> out;  // (is_index, token)
        std::string cur;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '.' || s[i] == '[') {
                if (!cur.empty()) out.emplace_back(false, cur), cur.clear();
                if (s[i] == '[') {
                    std::size_t close = s.find(']', i);
                    out.emplace_back(true, s.substr(i + 1, close - i - 1));
                    i = close;
                }
            } else {
                cur += s[i];
            }
        }
        if (!cur.empty()) out.emplace_back(false, cur);
        return out;
    };
    std::sort(selectors.begin(), selectors.end(),
              [&](const std::string& a, const std::string& b) {
                  auto ta = tokens(a), tb = tokens(b);
                  for (std::size_t i = 0; i < std::min(ta.size(), tb.size()); ++i) {
                      if (ta[i] == tb[i]) continue;
                      if (ta[i].first && tb[i].first) {
                          return std::stoull(ta[i].second) > std::stoull(tb[i].second);
                      }
                      return ta[i].second > tb[i].second;
                  }
                  return ta.size() > tb.size();
              });
    return selectors;
}

}  // namespace

ModelCard redact_card(const ModelCard& card) {
    if (!card.regulatory || card.regulatory->visibility.empty()) {
        return card;  // absent map means everything is public
    }

    std::vector<std::string> private_selectors;
    for (const auto& [selector, vis] : card.regulatory->visibility) {
        if (resolve_selector(card.doc, selector) == nullptr) {
            throw Error("SelectorUnresolved", "visibility selector matches no card field",
                        selector);
        }
        if (vis == FieldVisibility::priv) private_selectors.push_back(selector);
    }

    json doc = card.doc;
    bool removed_any = false;
    for (const auto& selector : erase_order(std::move(private_selectors))) {
        // A selector already covered by an erased ancestor is satisfied.
        if (erase_selector(doc, selector)) removed_any = true;
    }

    // Rewrite the visibility map: private entries are satisfied and
    // dropped; public entries survive only while they still resolve.
    json visibility = json::object();
    for (const auto& [selector, vis] : card.regulatory->visibility) {
        if (vis == FieldVisibility::pub && resolve_selector(doc, selector) != nullptr) {
            visibility[selector] = "public";
        }
    }
    doc["x_regulatory"]["visibility"] = std::move(visibility);
    if (removed_any) {
        doc["x_regulatory"]["redacted"] = true;
    }

    ModelCard out;
    out.doc = std::move(doc);
    extract_card(out);
    return out;
}

}  // namespace designctl::card
