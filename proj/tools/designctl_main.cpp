// designctl - compliance gate toolkit for ML in certified medical systems.
// stdout carries machine-readable JSON only; diagnostics go to stderr.
// Exit codes: 0 pass, 1 gate/validation failure, 2 usage/config/parse error.

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "designctl/gatekeeper.hpp"
#include "designctl/ingest.hpp"
#include "designctl/modelcard.hpp"
#include "designctl/monitor.hpp"
#include "designctl/provenance.hpp"
#include "designctl/reporting.hpp"
#include "designctl/traceability.hpp"

namespace fs = std::filesystem;
using designctl::Error;
using designctl::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("ParseError", "cannot open file", path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string read_stdin() {
    std::stringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
}

void emit(const json& payload) {
    std::cout << designctl::canonical_dump(payload) << "\n";
}

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct GateFlags {
    std::vector<std::string> rules{"R1", "R2", "R3", "R4", "R5", "R6", "R7"};
    std::vector<std::string> required_roles{"developer", "data_scientist", "regulatory",
                                            "clinical"};
    std::vector<std::string> model_globs{"models/**"};
    std::vector<std::string> metric_thresholds;  // type=value
    std::string stage = "development";
};

designctl::gate::GateConfig to_gate_config(const GateFlags& flags) {
    designctl::gate::GateConfig config;
    config.enabled_rules = flags.rules;
    config.required_roles.clear();
    for (const auto& role : flags.required_roles) {
        config.required_roles.insert(designctl::gate::role_from_string(role));
    }
    config.model_path_globs = flags.model_globs;
    config.metric_thresholds.clear();
    for (const auto& entry : flags.metric_thresholds) {
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw Error("ConfigInvalid", "metric threshold must be type=value, got '" +
                                             entry + "'");
        }
        try {
            config.metric_thresholds[entry.substr(0, eq)] = std::stod(entry.substr(eq + 1));
        } catch (const std::exception&) {
            throw Error("ConfigInvalid", "metric threshold value in '" + entry +
                                             "' is not a number");
        }
    }
    config.stage = designctl::gate::stage_from_string(flags.stage);
    return config;
}

void add_gate_flags(CLI::App* cmd, GateFlags& flags) {
    cmd->add_option("--rules", flags.rules, "Enabled rule ids, in evaluation order");
    cmd->add_option("--required-roles", flags.required_roles,
                    "Roles whose approval R6 requires");
    cmd->add_option("--model-globs", flags.model_globs,
                    "Glob patterns identifying model artifacts");
    cmd->add_option("--metric-thresholds", flags.metric_thresholds,
                    "Minimum metric values as type=value pairs (R4)");
    cmd->add_option("--stage", flags.stage,
                    "Gate stage: development, integration or release (R4 applies from "
                    "integration on)");
}

designctl::trace::TraceGraph load_graph(const fs::path& trace_dir) {
    return designctl::trace::build_graph(designctl::ingest::load_trace_items(trace_dir));
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("IoError", "cannot write file", path.string());
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"designctl - continuous design control toolkit for ML in certified "
                 "medical systems"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Tool configuration file (INI/TOML sections per "
                                   "subcommand; flags win)")
        ->envname("DESIGNCTL_CONFIG");
    bool json_output = true;
    app.add_flag("--json,!--no-json", json_output,
                 "Emit machine-readable JSON on stdout (default; stdout never carries "
                 "anything else)");

    int exit_code = 0;

    // validate <card> [--profile p]
    std::string validate_card_path;
    std::string validate_profile = "release";
    auto* validate_cmd = app.add_subcommand("validate", "Validate a model card");
    validate_cmd->add_option("card", validate_card_path, "Path to modelcard.json")
        ->required();
    validate_cmd->add_option("--profile", validate_profile,
                             "structural, development or release");
    validate_cmd->callback([&] {
        auto card = designctl::card::parse_card(read_file(validate_card_path));
        auto report = designctl::card::validate_card(
            card, designctl::card::profile_from_string(validate_profile));
        emit(report.to_json());
        if (!report.passed) exit_code = 1;
    });

    // trace check [--dir d]
    auto* trace_cmd = app.add_subcommand("trace", "Traceability graph commands");
    trace_cmd->require_subcommand(1);
    std::string trace_dir = "trace";
    auto* trace_check = trace_cmd->add_subcommand(
        "check", "Check completeness and decomposition of the trace graph");
    trace_check->add_option("--dir", trace_dir, "Trace items directory");
    trace_check->callback([&] {
        json findings;
        bool passed = true;
        try {
            auto graph = load_graph(trace_dir);
            auto all = designctl::trace::check_completeness(graph);
            auto decomposition = designctl::trace::check_decomposition(graph);
            all.insert(all.end(), decomposition.begin(), decomposition.end());
            findings = designctl::trace::findings_to_json(all);
            passed = std::none_of(all.begin(), all.end(), [](const auto& f) {
                return f.severity == designctl::Severity::error;
            });
        } catch (const Error& e) {
            if (e.code() == "ParseError" || e.code() == "SchemaViolation") throw;
            // graph-level defects (dangling links, cycles, duplicates) are findings
            findings = json::array({json{{"code", e.code()},
                                         {"severity", "error"},
                                         {"subject", e.where()},
                                         {"message", e.what()}}});
            passed = false;
        }
        emit(json{{"findings", findings}, {"passed", passed}});
        if (!passed) exit_code = 1;
    });

    // gate <pr-snapshot> [--config c]
    std::string gate_snapshot;
    std::string gate_trace_dir = "trace";
    std::string gate_out;
    GateFlags gate_flags;
    auto* gate_cmd = app.add_subcommand("gate", "Evaluate the pull-request design-control gate");
    gate_cmd->add_option("snapshot", gate_snapshot, "PR snapshot JSON file")->required();
    gate_cmd->add_option("--trace-dir", gate_trace_dir, "Trace items directory");
    gate_cmd->add_option("--out", gate_out, "Also write the verdict to this file");
    add_gate_flags(gate_cmd, gate_flags);
    gate_cmd->callback([&] {
        auto config = to_gate_config(gate_flags);
        auto graph = load_graph(gate_trace_dir);
        auto ctx = designctl::ingest::load_pr_context(gate_snapshot, config);
        auto verdict = designctl::gate::evaluate_gate(ctx, graph, config);
        const json payload = verdict.to_json();
        emit(payload);
        if (!gate_out.empty()) {
            write_text(gate_out, designctl::canonical_dump(payload) + "\n");
        }
        if (!verdict.passed) exit_code = 1;
    });

    // explain <rule-id>
    std::string explain_id;
    auto* explain_cmd = app.add_subcommand("explain", "Explain a gate rule");
    explain_cmd->add_option("rule", explain_id, "Rule id (R1..R7)")->required();
    explain_cmd->callback([&] {
        emit(json{{"rule_id", explain_id},
                  {"explanation", designctl::gate::explain_rule(explain_id)}});
    });

    // report <card> [--audience a]
    std::string report_card_path;
    std::string report_audience = "internal";
    std::string report_out = "reports";
    std::string report_trace_dir;
    std::vector<std::string> report_verdicts;
    std::string report_store;
    std::string report_chain_target;
    auto* report_cmd = app.add_subcommand("report", "Render the regulatory report bundle");
    report_cmd->add_option("card", report_card_path, "Path to modelcard.json")->required();
    report_cmd->add_option("--audience", report_audience, "internal or public");
    report_cmd->add_option("--out", report_out, "Report output directory");
    report_cmd->add_option("--trace-dir", report_trace_dir, "Trace items directory");
    report_cmd->add_option("--verdicts", report_verdicts,
                           "Gate verdict JSON files for the design-control history");
    report_cmd->add_option("--provenance", report_store, "Provenance store (jsonl)");
    report_cmd->add_option("--chain-target", report_chain_target,
                           "Digest whose chain the report shows (default: the card digest)");
    report_cmd->callback([&] {
        const std::string card_bytes = read_file(report_card_path);
        auto card = designctl::card::parse_card(card_bytes);
        const auto audience = designctl::report::audience_from_string(report_audience);

        designctl::trace::TraceMatrix matrix;
        if (!report_trace_dir.empty()) {
            matrix = designctl::trace::trace_matrix(load_graph(report_trace_dir));
        }
        std::vector<designctl::gate::GateVerdict> verdicts;
        for (const auto& path : report_verdicts) {
            verdicts.push_back(designctl::gate::GateVerdict::from_json(
                designctl::parse_json(read_file(path), path), path));
        }
        designctl::prov::Chain chain;
        if (!report_store.empty()) {
            auto store = designctl::prov::load_store(report_store);
            designctl::prov::Digest target;
            if (!report_chain_target.empty()) {
                target.hex = report_chain_target;
                chain = designctl::prov::verify_chain(store, target);
            } else {
                target = designctl::prov::digest_artifact(card_bytes,
                                                          designctl::prov::ArtifactKind::card);
                try {
                    chain = designctl::prov::verify_chain(store, target);
                } catch (const Error& e) {
                    if (e.code() != "UnknownDigest") throw;
                    std::cerr << "note: card digest not in provenance store; chain omitted\n";
                }
            }
        }

        const fs::path out_dir = report_out;
        json documents = json::object();
        fs::path bundle_dir;
        if (!verdicts.empty()) {
            auto bundle = designctl::report::render_bundle(card, audience, matrix, verdicts,
                                                           chain);
            bundle_dir = designctl::report::write_bundle(out_dir, card, bundle);
            documents = bundle.manifest_to_json();
        } else {
            // no design-control history: render what the card supports
            std::cerr << "note: no --verdicts given; clinical validation report omitted\n";
            designctl::report::ReportBundle partial;
            partial.model_card_md = designctl::report::render_model_card(card, audience);
            partial.trace_matrix_md = designctl::report::render_trace_matrix(matrix);
            partial.manifest = {
                {"model_card.md", designctl::prov::digest_bytes(partial.model_card_md)},
                {"trace_matrix.md", designctl::prov::digest_bytes(partial.trace_matrix_md)},
            };
            if (card.considerations) {
                partial.risk_report_md = designctl::report::render_risk_report(card);
                partial.manifest.emplace(
                    "risk_report.md", designctl::prov::digest_bytes(partial.risk_report_md));
            }
            std::string version = card.model_details.version
                                      ? card.model_details.version->name
                                      : std::string("unversioned");
            for (char& ch : version) {
                const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                                (ch >= '0' && ch <= '9') || ch == '.' || ch == '_' ||
                                ch == '-';
                if (!ok) ch = '_';
            }
            bundle_dir = out_dir / version;
            fs::create_directories(bundle_dir);
            write_text(bundle_dir / "model_card.md", partial.model_card_md);
            write_text(bundle_dir / "trace_matrix.md", partial.trace_matrix_md);
            if (card.considerations) {
                write_text(bundle_dir / "risk_report.md", partial.risk_report_md);
            }
            write_text(bundle_dir / "manifest.json",
                       designctl::canonical_dump(partial.manifest_to_json()) + "\n");
            documents = partial.manifest_to_json();
        }
        emit(json{{"output_dir", bundle_dir.string()}, {"documents", documents}});
    });

    // provenance record|verify|locked
    auto* prov_cmd = app.add_subcommand("provenance", "Provenance store and locked-model "
                                                      "registry commands");
    prov_cmd->require_subcommand(1);

    std::string record_artifact;
    std::string record_store = "provenance.jsonl";
    std::string record_kind;
    std::vector<std::string> record_parents;
    std::string record_note;
    std::string record_created_at;
    auto* prov_record = prov_cmd->add_subcommand("record", "Digest an artifact and append "
                                                           "its provenance record");
    prov_record->add_option("artifact", record_artifact, "Artifact file")->required();
    prov_record->add_option("--store", record_store, "Provenance store path");
    prov_record->add_option("--kind", record_kind,
                            "data_source, dataset, model or card")->required();
    prov_record->add_option("--parent", record_parents, "Parent digest (repeatable)");
    prov_record->add_option("--note", record_note, "Free-text note");
    prov_record->add_option("--created-at", record_created_at,
                            "ISO-8601 timestamp (default: now, UTC)");
    prov_record->callback([&] {
        designctl::prov::ProvenanceRecord record;
        record.kind = designctl::prov::artifact_kind_from_string(record_kind);
        record.subject = designctl::prov::digest_artifact(read_file(record_artifact),
                                                          record.kind);
        for (const auto& parent : record_parents) {
            designctl::prov::Digest d{parent};
            if (!d.valid()) {
                throw Error("ConfigInvalid", "parent is not a sha-256 hex digest", parent);
            }
            record.parents.push_back(std::move(d));
        }
        record.note = record_note;
        record.created_at = record_created_at.empty() ? now_iso8601() : record_created_at;
        designctl::prov::append_record(record_store, record);
        emit(record.to_json());
    });

    std::string verify_digest;
    std::string verify_store = "provenance.jsonl";
    auto* prov_verify = prov_cmd->add_subcommand("verify", "Verify the provenance chain of "
                                                           "a digest");
    prov_verify->add_option("digest", verify_digest, "sha-256 hex digest")->required();
    prov_verify->add_option("--store", verify_store, "Provenance store path");
    prov_verify->callback([&] {
        auto store = designctl::prov::load_store(verify_store);
        try {
            auto chain = designctl::prov::verify_chain(store,
                                                       designctl::prov::Digest{verify_digest});
            emit(json{{"verified", true}, {"chain", designctl::prov::chain_to_json(chain)}});
        } catch (const Error& e) {
            if (e.code() != "UnknownDigest" && e.code() != "BrokenChain" &&
                e.code() != "IllegalLineage") {
                throw;
            }
            emit(json{{"verified", false},
                      {"error", json{{"code", e.code()}, {"message", e.what()}}}});
            exit_code = 1;
        }
    });

    std::string locked_digest;
    std::string locked_registry = "registry.json";
    auto* prov_locked = prov_cmd->add_subcommand("locked", "Check a deployed model against "
                                                           "the locked registry");
    prov_locked->add_option("digest", locked_digest, "Deployed model digest")->required();
    prov_locked->add_option("--registry", locked_registry, "Registry path");
    prov_locked->callback([&] {
        auto registry = designctl::prov::load_registry(locked_registry);
        auto result = designctl::prov::check_locked(designctl::prov::Digest{locked_digest},
                                                    registry);
        emit(result.to_json());
        if (!result.passed) exit_code = 1;
    });

    // monitor <events.jsonl> --card <card>
    std::string monitor_events;
    std::string monitor_card;
    std::string monitor_feedback_dir;
    designctl::monitor::DriftConfig drift;
    auto* monitor_cmd = app.add_subcommand("monitor", "Detect post-market deviations in a "
                                                      "prediction event stream");
    monitor_cmd->add_option("events", monitor_events,
                            "Prediction events (jsonl; '-' for stdin)")->required();
    monitor_cmd->add_option("--card", monitor_card, "Model card with the recorded baselines")
        ->required();
    monitor_cmd->add_option("--window", drift.window, "Rolling window size (events)");
    monitor_cmd->add_option("--accuracy-tolerance", drift.accuracy_tolerance,
                            "Allowed drop below the baseline accuracy");
    monitor_cmd->add_option("--confidence-tolerance", drift.confidence_tolerance,
                            "Allowed drop below the baseline mean confidence");
    monitor_cmd->add_option("--min-labeled", drift.min_labeled,
                            "Labeled events a window needs before accuracy counts");
    monitor_cmd->add_option("--feedback-dir", monitor_feedback_dir,
                            "Write requirement stubs here (e.g. trace/inbox)");
    monitor_cmd->callback([&] {
        auto card = designctl::card::parse_card(read_file(monitor_card));
        if (!card.quantitative_analysis) {
            throw Error("BaselineMissing", "card records no quantitative analysis",
                        monitor_card);
        }
        const std::string bytes =
            monitor_events == "-" ? read_stdin() : read_file(monitor_events);
        auto events = designctl::monitor::parse_events(bytes, monitor_events);
        auto series = designctl::monitor::rolling_stats(events, drift.window);
        auto deviations = designctl::monitor::detect_deviation(
            series, *card.quantitative_analysis, drift);
        auto feedback = designctl::monitor::to_feedback(deviations);

        json deviations_json = json::array();
        for (const auto& d : deviations) deviations_json.push_back(d.to_json());
        json feedback_json = json::array();
        for (const auto& f : feedback) feedback_json.push_back(f.to_json());
        emit(json{{"deviations", deviations_json}, {"feedback", feedback_json}});

        if (!monitor_feedback_dir.empty()) {
            fs::create_directories(monitor_feedback_dir);
            for (const auto& item : feedback) {
                write_text(fs::path(monitor_feedback_dir) / (item.id + ".md"),
                           designctl::monitor::feedback_stub_markdown(item));
            }
        }
    });

    // redact <card>
    std::string redact_card_path;
    auto* redact_cmd = app.add_subcommand("redact", "Print the card with private fields "
                                                    "removed");
    redact_cmd->add_option("card", redact_card_path, "Path to modelcard.json")->required();
    redact_cmd->callback([&] {
        auto card = designctl::card::parse_card(read_file(redact_card_path));
        std::cout << designctl::card::serialize_card(designctl::card::redact_card(card))
                  << "\n";
    });

    // app-level flags (--config, --json) may appear after any subcommand
    std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* cmd) {
        for (CLI::App* sub : cmd->get_subcommands(nullptr)) {
            sub->fallthrough();
            enable_fallthrough(sub);
        }
    };
    enable_fallthrough(&app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "designctl: " << e.what() << "\n";
        const bool data_failure =
            e.code() == "ProfileInsufficient" || e.code() == "ConsiderationsMissing";
        return data_failure ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "designctl: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}
