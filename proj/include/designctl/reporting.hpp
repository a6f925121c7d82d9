#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "designctl/gatekeeper.hpp"
#include "designctl/modelcard.hpp"
#include "designctl/provenance.hpp"
#include "designctl/traceability.hpp"

namespace designctl::report {

enum class Audience { internal, pub };

Audience audience_from_string(std::string_view s);

// All renderers emit LF-only Markdown and are byte-deterministic for
// identical inputs.

// Section order: details, intended use, datasets (sources and
// justification), parameters, quantitative analysis, considerations.
// public audience renders redact_card(card) and propagates redaction errors.
std::string render_model_card(const card::ModelCard& c, Audience audience);

// Sections: intended use, dataset provenance, performance vs thresholds,
// design-control history (one row per verdict), traceability summary.
// Throws Error("ProfileInsufficient") unless the card passes the release
// profile and at least one verdict is supplied.
std::string render_clinical_validation_report(const card::ModelCard& c,
                                              const trace::TraceMatrix& matrix,
                                              const std::vector<gate::GateVerdict>& verdicts,
                                              const prov::Chain& chain);

// Risks grouped by the three categories; unlinked mitigations flagged
// inline. Throws Error("ConsiderationsMissing").
std::string render_risk_report(const card::ModelCard& c);

std::string render_trace_matrix(const trace::TraceMatrix& matrix);

struct ReportBundle {
    std::string model_card_md;
    std::string clinical_validation_md;
    std::string risk_report_md;
    std::string trace_matrix_md;
    std::map<std::string, prov::Digest> manifest;  // document name -> digest of bytes

    json manifest_to_json() const;
};

ReportBundle render_bundle(const card::ModelCard& c, Audience audience,
                           const trace::TraceMatrix& matrix,
                           const std::vector<gate::GateVerdict>& verdicts,
                           const prov::Chain& chain);

// Writes reports/<card-version>/{model_card.md, clinical_validation.md,
// risk_report.md, trace_matrix.md, manifest.json}; returns that directory.
std::filesystem::path write_bundle(const std::filesystem::path& out_dir,
                                   const card::ModelCard& c, const ReportBundle& bundle);

}  // namespace designctl::report
