#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "designctl/gatekeeper.hpp"
#include "designctl/ingest.hpp"
#include "designctl/modelcard.hpp"
#include "designctl/monitor.hpp"
#include "designctl/provenance.hpp"
#include "designctl/reporting.hpp"
#include "designctl/traceability.hpp"

namespace py = pybind11;
using designctl::json;

namespace {

// The toolkit's composite values are JSON documents by nature, so the
// binding speaks JSON strings; the designctl package wraps them as dicts.

designctl::gate::GateConfig gate_config_from_json(const std::string& text) {
    designctl::gate::GateConfig config;
    if (text.empty()) return config;
    json j = designctl::parse_json(text, "gate config");
    if (j.contains("enabled_rules")) {
        config.enabled_rules = j["enabled_rules"].get<std::vector<std::string>>();
    }
    if (j.contains("required_roles")) {
        config.required_roles.clear();
        for (const auto& role : j["required_roles"]) {
            config.required_roles.insert(
                designctl::gate::role_from_string(role.get<std::string>()));
        }
    }
    if (j.contains("model_path_globs")) {
        config.model_path_globs = j["model_path_globs"].get<std::vector<std::string>>();
    }
    if (j.contains("metric_thresholds")) {
        config.metric_thresholds =
            j["metric_thresholds"].get<std::map<std::string, double>>();
    }
    if (j.contains("stage")) {
        config.stage = designctl::gate::stage_from_string(j["stage"].get<std::string>());
    }
    return config;
}

std::vector<designctl::gate::GateVerdict> verdicts_from_json(const std::string& text) {
    std::vector<designctl::gate::GateVerdict> verdicts;
    json j = designctl::parse_json(text, "verdicts");
    for (const auto& v : j) {
        verdicts.push_back(designctl::gate::GateVerdict::from_json(v));
    }
    return verdicts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "designctl core: model-card validation, traceability, design-control "
              "gating, provenance and post-market monitoring";

    py::register_exception<designctl::Error>(m, "Error");

    py::class_<designctl::card::ModelCard>(m, "ModelCard")
        .def_property_readonly("schema_version",
                               [](const designctl::card::ModelCard& c) {
                                   return c.schema_version;
                               })
        .def_property_readonly("name",
                               [](const designctl::card::ModelCard& c) {
                                   return c.model_details.name;
                               })
        .def_property_readonly("warnings",
                               [](const designctl::card::ModelCard& c) {
                                   return c.warnings;
                               })
        .def("serialize", &designctl::card::serialize_card,
             "Canonical JSON bytes of the card")
        .def("__repr__", [](const designctl::card::ModelCard& c) {
            return "<designctl.ModelCard '" + c.model_details.name + "'>";
        });

    py::class_<designctl::trace::TraceGraph>(m, "TraceGraph")
        .def_property_readonly("size",
                               [](const designctl::trace::TraceGraph& g) {
                                   return g.items().size();
                               })
        .def("__repr__", [](const designctl::trace::TraceGraph& g) {
            return "<designctl.TraceGraph of " + std::to_string(g.items().size()) +
                   " items>";
        });

    py::class_<designctl::gate::PullRequestContext>(m, "PullRequestContext")
        .def_property_readonly("pr_id",
                               [](const designctl::gate::PullRequestContext& c) {
                                   return c.pr_id;
                               })
        .def_property_readonly("model_artifact_changed",
                               [](const designctl::gate::PullRequestContext& c) {
                                   return c.model_artifact_changed;
                               });

    // model card
    m.def("parse_card",
          [](const std::string& bytes) { return designctl::card::parse_card(bytes); },
          py::arg("bytes"), "Parse a model card JSON document");
    m.def("validate_card",
          [](const designctl::card::ModelCard& c, const std::string& profile) {
              return designctl::card::validate_card(
                         c, designctl::card::profile_from_string(profile))
                  .to_json()
                  .dump();
          },
          py::arg("card"), py::arg("profile") = "release",
          "Validation report as a JSON string");
    m.def("diff_cards",
          [](const designctl::card::ModelCard& a, const designctl::card::ModelCard& b) {
              return designctl::card::diff_cards(a, b).to_json().dump();
          });
    m.def("redact_card", &designctl::card::redact_card);

    // traceability
    m.def("build_graph",
          [](const std::string& items_json) {
              return designctl::trace::build_graph(designctl::ingest::trace_items_from_json(
                  designctl::parse_json(items_json, "items")));
          },
          py::arg("items_json"), "Build a trace graph from a JSON array of items");
    m.def("load_graph",
          [](const std::string& dir) {
              return designctl::trace::build_graph(designctl::ingest::load_trace_items(dir));
          },
          py::arg("trace_dir"), "Load trace items from a directory and build the graph");
    m.def("check_completeness", [](const designctl::trace::TraceGraph& g) {
        return designctl::trace::findings_to_json(designctl::trace::check_completeness(g))
            .dump();
    });
    m.def("check_decomposition", [](const designctl::trace::TraceGraph& g) {
        return designctl::trace::findings_to_json(designctl::trace::check_decomposition(g))
            .dump();
    });
    m.def("trace_matrix", [](const designctl::trace::TraceGraph& g) {
        return designctl::trace::trace_matrix(g).to_json().dump();
    });
    m.def("impact",
          [](const designctl::trace::TraceGraph& g, const std::string& id) {
              auto reached = designctl::trace::impact(g, id);
              return std::vector<std::string>(reached.begin(), reached.end());
          },
          py::arg("graph"), py::arg("item_id"));

    // gatekeeper
    m.def("load_pr_context",
          [](const std::string& path, const std::string& config_json) {
              return designctl::ingest::load_pr_context(path,
                                                        gate_config_from_json(config_json));
          },
          py::arg("path"), py::arg("config_json") = "");
    m.def("evaluate_gate",
          [](const designctl::gate::PullRequestContext& ctx,
             const designctl::trace::TraceGraph& graph, const std::string& config_json) {
              return designctl::gate::evaluate_gate(ctx, graph,
                                                    gate_config_from_json(config_json))
                  .to_json()
                  .dump();
          },
          py::arg("ctx"), py::arg("graph"), py::arg("config_json") = "",
          "Gate verdict as a JSON string");
    m.def("explain_rule", &designctl::gate::explain_rule, py::arg("rule_id"));

    // provenance
    m.def("digest_artifact",
          [](const py::bytes& data, const std::string& kind) {
              return designctl::prov::digest_artifact(
                         std::string(data),
                         designctl::prov::artifact_kind_from_string(kind))
                  .hex;
          },
          py::arg("data"), py::arg("kind") = "model");
    m.def("verify_chain",
          [](const std::string& store_path, const std::string& hex) {
              auto store = designctl::prov::load_store(store_path);
              return designctl::prov::chain_to_json(
                         designctl::prov::verify_chain(store, designctl::prov::Digest{hex}))
                  .dump();
          },
          py::arg("store_path"), py::arg("digest"));
    m.def("check_locked",
          [](const std::string& hex, const std::string& registry_path) {
              auto registry = designctl::prov::load_registry(registry_path);
              return designctl::prov::check_locked(designctl::prov::Digest{hex}, registry)
                  .to_json()
                  .dump();
          },
          py::arg("digest"), py::arg("registry_path"));
    m.def("dataset_overlap",
          [](std::vector<std::string> a, std::vector<std::string> b) {
              auto overlap = designctl::prov::digest_list_overlap(std::move(a), std::move(b));
              return py::make_tuple(overlap.count, overlap.sample);
          },
          py::arg("digests_a"), py::arg("digests_b"),
          "Intersection count and a sample of shared digests");

    // monitoring
    m.def("monitor_stream",
          [](const std::string& events_jsonl, const designctl::card::ModelCard& c,
             std::size_t window, double accuracy_tolerance, double confidence_tolerance,
             std::size_t min_labeled) {
              if (!c.quantitative_analysis) {
                  throw designctl::Error("BaselineMissing",
                                         "card records no quantitative analysis");
              }
              designctl::monitor::DriftConfig config{window, accuracy_tolerance,
                                                     confidence_tolerance, min_labeled};
              auto events = designctl::monitor::parse_events(events_jsonl);
              auto series = designctl::monitor::rolling_stats(events, window);
              auto deviations = designctl::monitor::detect_deviation(
                  series, *c.quantitative_analysis, config);
              auto feedback = designctl::monitor::to_feedback(deviations);
              json deviations_json = json::array();
              for (const auto& d : deviations) deviations_json.push_back(d.to_json());
              json feedback_json = json::array();
              for (const auto& f : feedback) feedback_json.push_back(f.to_json());
              return json{{"deviations", std::move(deviations_json)},
                          {"feedback", std::move(feedback_json)}}
                  .dump();
          },
          py::arg("events_jsonl"), py::arg("card"), py::arg("window") = 100,
          py::arg("accuracy_tolerance") = 0.10, py::arg("confidence_tolerance") = 0.10,
          py::arg("min_labeled") = 1,
          "Rolling stats -> deviations -> feedback, as a JSON string");

    // reporting
    m.def("render_model_card",
          [](const designctl::card::ModelCard& c, const std::string& audience) {
              return designctl::report::render_model_card(
                  c, designctl::report::audience_from_string(audience));
          },
          py::arg("card"), py::arg("audience") = "internal");
    m.def("render_risk_report", &designctl::report::render_risk_report, py::arg("card"));
    m.def("render_trace_matrix", [](const designctl::trace::TraceGraph& g) {
        return designctl::report::render_trace_matrix(designctl::trace::trace_matrix(g));
    });
    m.def("render_clinical_validation_report",
          [](const designctl::card::ModelCard& c, const designctl::trace::TraceGraph& graph,
             const std::string& verdicts_json, const std::string& chain_json) {
              designctl::prov::Chain chain;
              if (!chain_json.empty()) {
                  for (const auto& r : designctl::parse_json(chain_json, "chain")) {
                      chain.push_back(designctl::prov::ProvenanceRecord::from_json(r));
                  }
              }
              return designctl::report::render_clinical_validation_report(
                  c, designctl::trace::trace_matrix(graph), verdicts_from_json(verdicts_json),
                  chain);
          },
          py::arg("card"), py::arg("graph"), py::arg("verdicts_json"),
          py::arg("chain_json") = "");

    m.attr("__version__") = DESIGNCTL_VERSION;
}
