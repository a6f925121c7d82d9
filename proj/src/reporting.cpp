#include "designctl/reporting.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace designctl::report {

namespace {

constexpr const char* kNoneDocumented = "None documented.";

std::string escape_cell(const std::string& value) {
    std::string out;
    out.reserve(value.size());
    for (char ch : value) {
        if (ch == '|') out += "\\|";
        else if (ch == '\n') out += "<br>";
        else if (ch != '\r') out += ch;
    }
    return out;
}

std::string fmt(double v) {
    if (v == static_cast<double>(static_cast<long long>(v))) {
        return std::to_string(static_cast<long long>(v));
    }
    return canonical_dump(json(v));
}

void table_header(std::ostringstream& out, std::initializer_list<const char*> columns) {
    out << "|";
    for (const char* c : columns) out << " " << c << " |";
    out << "\n|";
    for (std::size_t i = 0; i < columns.size(); ++i) out << " --- |";
    out << "\n";
}

void table_row(std::ostringstream& out, const std::vector<std::string>& cells) {
    out << "|";
    for (const auto& cell : cells) out << " " << escape_cell(cell) << " |";
    out << "\n";
}

std::string join_ids(const std::vector<std::string>& ids) {
    if (ids.empty()) return "-";
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) out += ", ";
        out += id;
    }
    return out;
}

std::string version_label(const card::ModelCard& c) {
    if (c.model_details.version) return c.model_details.version->name;
    return "unversioned";
}

void render_datasets(std::ostringstream& out, const card::ModelCard& c) {
    out << "## Datasets\n\n";
    if (c.datasets.empty()) {
        out << kNoneDocumented << "\n\n";
        return;
    }
    for (const auto& d : c.datasets) {
        out << "### " << to_string(d.role) << ": " << d.name << "\n\n";
        if (d.digest) out << "- Digest: `" << *d.digest << "`\n";
        if (d.record_count) out << "- Records: " << *d.record_count << "\n";
        out << "- Sources:\n";
        if (d.sources.empty()) {
            out << "  - " << kNoneDocumented << "\n";
        }
        for (const auto& s : d.sources) {
            out << "  - " << s.id << " (" << to_string(s.kind) << ")";
            if (!s.description.empty()) out << ": " << s.description;
            out << "\n";
        }
        out << "\nJustification:\n\n";
        out << (d.description.empty() ? kNoneDocumented : d.description) << "\n\n";
    }
}

void render_parameters(std::ostringstream& out, const card::ModelCard& c) {
    out << "## Parameters\n\n";
    if (c.model_format) out << "Model format: " << *c.model_format << "\n\n";
    if (c.parameters.empty()) {
        out << kNoneDocumented << "\n\n";
        return;
    }
    table_header(out, {"Name", "Value", "Valid range"});
    for (const auto& p : c.parameters) {
        std::string value = p.value.is_string() ? p.value.get<std::string>()
                                                : canonical_dump(p.value);
        std::string range = "-";
        if (p.valid_range) {
            range = "[" + fmt(p.valid_range->first) + ", " + fmt(p.valid_range->second) + "]";
        }
        table_row(out, {p.name, value, range});
    }
    out << "\n";
}

void render_quantitative(std::ostringstream& out, const card::ModelCard& c) {
    out << "## Quantitative Analysis\n\n";
    if (!c.quantitative_analysis) {
        out << kNoneDocumented << "\n\n";
        return;
    }
    const auto& qa = *c.quantitative_analysis;
    if (!qa.evaluation_context.empty()) {
        out << "Evaluation context: " << qa.evaluation_context << "\n\n";
    }
    table_header(out, {"Metric", "Slice", "Value", "Threshold"});
    for (const auto& m : qa.performance_metrics) {
        table_row(out, {m.type, m.slice.value_or("-"), fmt(m.value),
                        m.threshold ? fmt(*m.threshold) : "-"});
    }
    out << "\n";
}

void render_considerations(std::ostringstream& out, const card::ModelCard& c) {
    out << "## Considerations\n\n";
    if (!c.considerations) {
        out << kNoneDocumented << "\n";
        return;
    }
    const auto& cons = *c.considerations;
    auto list_section = [&](const char* title, const std::vector<std::string>& entries) {
        out << "### " << title << "\n\n";
        if (entries.empty()) {
            out << kNoneDocumented << "\n\n";
            return;
        }
        for (const auto& entry : entries) out << "- " << entry << "\n";
        out << "\n";
    };
    list_section("Limitations", cons.limitations);
    list_section("Trade-offs", cons.tradeoffs);
    list_section("Ethical considerations", cons.ethical_considerations);
    out << "### Risks\n\n";
    if (cons.risks.empty()) {
        out << kNoneDocumented << "\n";
        return;
    }
    table_header(out, {"Risk", "Category", "Mitigation", "Requirement"});
    for (const auto& r : cons.risks) {
        table_row(out, {r.name, std::string(to_string(r.category)),
                        r.mitigation.empty() ? "-" : r.mitigation,
                        r.requirement_ref ? *r.requirement_ref : "unlinked"});
    }
}

}  // namespace

Audience audience_from_string(std::string_view s) {
    if (s == "internal") return Audience::internal;
    if (s == "public") return Audience::pub;
    throw Error("ConfigInvalid", "unknown audience '" + std::string(s) + "'");
}

std::string render_model_card(const card::ModelCard& input, Audience audience) {
    const card::ModelCard c =
        audience == Audience::pub ? card::redact_card(input) : input;

    std::ostringstream out;
    out << "# Model Card: " << c.model_details.name << "\n\n";
    out << "- Schema version: " << c.schema_version << "\n";
    if (c.model_details.version) {
        out << "- Version: " << c.model_details.version->name << " ("
            << c.model_details.version->date << ")\n";
    }
    if (!c.model_details.owners.empty()) {
        out << "- Owners:";
        for (std::size_t i = 0; i < c.model_details.owners.size(); ++i) {
            out << (i == 0 ? " " : ", ") << c.model_details.owners[i].name << " ("
                << c.model_details.owners[i].role << ")";
        }
        out << "\n";
    }
    if (c.model_details.license) out << "- License: " << *c.model_details.license << "\n";
    out << "\n";

    if (!c.model_details.documentation.empty()) {
        out << c.model_details.documentation << "\n\n";
    }

    out << "## Intended Use\n\n";
    if (c.regulatory && !c.regulatory->intended_use.empty()) {
        out << c.regulatory->intended_use << "\n\n";
    } else {
        out << kNoneDocumented << "\n\n";
    }

    render_datasets(out, c);
    render_parameters(out, c);
    render_quantitative(out, c);
    render_considerations(out, c);
    return out.str();
}

std::string render_clinical_validation_report(const card::ModelCard& c,
                                              const trace::TraceMatrix& matrix,
                                              const std::vector<gate::GateVerdict>& verdicts,
                                              const prov::Chain& chain) {
    card::ValidationReport validation = card::validate_card(c, card::Profile::release);
    if (!validation.passed) {
        throw Error("ProfileInsufficient",
                    "clinical validation requires a card that passes the release profile");
    }
    if (verdicts.empty()) {
        throw Error("ProfileInsufficient",
                    "clinical validation requires at least one gate verdict");
    }

    std::ostringstream out;
    out << "# Clinical Validation Report: " << c.model_details.name << " "
        << version_label(c) << "\n\n";

    out << "## Intended Use\n\n";
    out << c.regulatory->intended_use << "\n\n";

    out << "## Dataset Provenance\n\n";
    if (chain.empty()) {
        out << "No provenance chain supplied.\n\n";
    } else {
        table_header(out, {"#", "Kind", "Digest", "Note"});
        for (std::size_t i = 0; i < chain.size(); ++i) {
            table_row(out, {std::to_string(i + 1), std::string(to_string(chain[i].kind)),
                            "`" + chain[i].subject.hex + "`", chain[i].note});
        }
        out << "\n";
    }

    out << "## Performance\n\n";
    const auto& qa = *c.quantitative_analysis;
    if (!qa.evaluation_context.empty()) {
        out << "Evaluation context: " << qa.evaluation_context << "\n\n";
    }
    table_header(out, {"Metric", "Slice", "Value", "Threshold", "Status"});
    for (const auto& m : qa.performance_metrics) {
        std::string status = "recorded";
        if (m.threshold) status = m.value >= *m.threshold ? "meets threshold" : "below threshold";
        table_row(out, {m.type, m.slice.value_or("-"), fmt(m.value),
                        m.threshold ? fmt(*m.threshold) : "-", status});
    }
    out << "\n";

    out << "## Design Control History\n\n";
    table_header(out, {"Pull request", "Status", "Rule outcomes"});
    for (const auto& verdict : verdicts) {
        std::string rules;
        for (const auto& result : verdict.rule_results) {
            if (!rules.empty()) rules += ", ";
            rules += result.rule_id + ":" + std::string(to_string(result.outcome));
        }
        table_row(out, {verdict.pr_id, verdict.passed ? "pass" : "fail", rules});
    }
    bool any_finding = false;
    for (const auto& verdict : verdicts) {
        for (const auto& result : verdict.rule_results) {
            for (const auto& finding : result.findings) {
                if (!any_finding) {
                    out << "\nFindings:\n\n";
                    any_finding = true;
                }
                out << "- " << verdict.pr_id << " " << finding.rule_id << " " << finding.code
                    << " (" << designctl::to_string(finding.severity)
                    << "): " << finding.message << "\n";
            }
        }
    }
    out << "\n";

    out << "## Traceability Summary\n\n";
    out << "- Requirements traced: " << matrix.rows.size() << "\n";
    std::size_t change_requests = 0, test_cases = 0, elements = 0;
    for (const auto& row : matrix.rows) {
        change_requests += row.change_requests.size();
        test_cases += row.test_cases.size();
        elements += row.software_elements.size();
    }
    out << "- Change requests: " << change_requests << "\n";
    out << "- Verifying test cases: " << test_cases << "\n";
    out << "- Mapped software elements: " << elements << "\n";
    std::size_t errors = 0, warnings = 0;
    for (const auto& verdict : verdicts) {
        for (const auto& result : verdict.rule_results) {
            for (const auto& finding : result.findings) {
                (finding.severity == Severity::error ? errors : warnings) += 1;
            }
        }
    }
    out << "- Open gate findings: " << errors << " error(s), " << warnings
        << " warning(s)\n";
    return out.str();
}

std::string render_risk_report(const card::ModelCard& c) {
    if (!c.considerations) {
        throw Error("ConsiderationsMissing", "card documents no considerations");
    }
    std::ostringstream out;
    out << "# Risk Report: " << c.model_details.name << " " << version_label(c) << "\n\n";

    const std::pair<card::RiskCategory, const char*> groups[] = {
        {card::RiskCategory::input_data, "Input Data"},
        {card::RiskCategory::algorithm_design, "Algorithm Design"},
        {card::RiskCategory::output_decisions, "Output Decisions"},
    };
    for (const auto& [category, title] : groups) {
        out << "## " << title << "\n\n";
        std::vector<const card::Risk*> risks;
        for (const auto& r : c.considerations->risks) {
            if (r.category == category) risks.push_back(&r);
        }
        if (risks.empty()) {
            out << kNoneDocumented << "\n\n";
            continue;
        }
        table_header(out, {"Risk", "Mitigation", "Requirement"});
        for (const card::Risk* r : risks) {
            table_row(out, {r->name, r->mitigation.empty() ? "missing" : r->mitigation,
                            r->requirement_ref ? *r->requirement_ref : "unlinked"});
        }
        out << "\n";
    }
    return out.str();
}

std::string render_trace_matrix(const trace::TraceMatrix& matrix) {
    std::ostringstream out;
    out << "# Traceability Matrix\n\n";
    if (matrix.rows.empty()) {
        out << "No requirements in the trace graph.\n";
        return out.str();
    }
    table_header(out, {"Requirement", "User Needs", "Change Requests", "Test Cases",
                       "Software Elements"});
    for (const auto& row : matrix.rows) {
        table_row(out, {row.requirement, join_ids(row.user_needs),
                        join_ids(row.change_requests), join_ids(row.test_cases),
                        join_ids(row.software_elements)});
    }
    return out.str();
}

json ReportBundle::manifest_to_json() const {
    json out = json::object();
    for (const auto& [name, digest] : manifest) {
        out[name] = json{{"algorithm", std::string(prov::kDigestAlgorithm)},
                         {"hex", digest.hex}};
    }
    return out;
}

ReportBundle render_bundle(const card::ModelCard& c, Audience audience,
                           const trace::TraceMatrix& matrix,
                           const std::vector<gate::GateVerdict>& verdicts,
                           const prov::Chain& chain) {
    ReportBundle bundle;
    bundle.model_card_md = render_model_card(c, audience);
    bundle.clinical_validation_md =
        render_clinical_validation_report(c, matrix, verdicts, chain);
    bundle.risk_report_md = render_risk_report(c);
    bundle.trace_matrix_md = render_trace_matrix(matrix);
    bundle.manifest = {
        {"model_card.md", prov::digest_bytes(bundle.model_card_md)},
        {"clinical_validation.md", prov::digest_bytes(bundle.clinical_validation_md)},
        {"risk_report.md", prov::digest_bytes(bundle.risk_report_md)},
        {"trace_matrix.md", prov::digest_bytes(bundle.trace_matrix_md)},
    };
    return bundle;
}

std::filesystem::path write_bundle(const std::filesystem::path& out_dir,
                                   const card::ModelCard& c, const ReportBundle& bundle) {
    std::string version = version_label(c);
    for (char& ch : version) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                        (ch >= '0' && ch <= '9') || ch == '.' || ch == '_' || ch == '-';
        if (!ok) ch = '_';
    }
    const std::filesystem::path dir = out_dir / version;
    std::filesystem::create_directories(dir);
    auto write = [&](const char* name, const std::string& content) {
        std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("IoError", "cannot write report", (dir / name).string());
        f << content;
    };
    write("model_card.md", bundle.model_card_md);
    write("clinical_validation.md", bundle.clinical_validation_md);
    write("risk_report.md", bundle.risk_report_md);
    write("trace_matrix.md", bundle.trace_matrix_md);
    write("manifest.json", canonical_dump(bundle.manifest_to_json()) + "\n");
    return dir;
}

}  // namespace designctl::report
