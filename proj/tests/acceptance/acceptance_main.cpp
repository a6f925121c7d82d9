// Acceptance suite: one criterion per section, one PASS/FAIL line each.
// Exits non-zero if any criterion fails.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "designctl/gatekeeper.hpp"
#include "designctl/ingest.hpp"
#include "designctl/modelcard.hpp"
#include "designctl/monitor.hpp"
#include "designctl/provenance.hpp"
#include "designctl/reporting.hpp"
#include "designctl/traceability.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace designctl;

namespace {

struct Checker {
    int failures = 0;
    std::string first_detail;

    void expect(bool condition, const std::string& detail) {
        if (condition) return;
        ++failures;
        if (first_detail.empty()) first_detail = detail;
    }
};

int g_failed_criteria = 0;

void criterion(int number, const std::string& title,
               const std::function<void(Checker&)>& body) {
    Checker checker;
    try {
        body(checker);
    } catch (const std::exception& e) {
        checker.expect(false, std::string("exception: ") + e.what());
    }
    if (checker.failures == 0) {
        std::cout << "PASS  " << number << ". " << title << "\n";
    } else {
        ++g_failed_criteria;
        std::cout << "FAIL  " << number << ". " << title << " [" << checker.failures
                  << " check(s); first: " << checker.first_detail << "]\n";
    }
}

json load_expected() {
    return parse_json(testsup::read_file(testsup::fixture_path("cards/expected.json")));
}

std::multiset<std::string> finding_codes(const card::ValidationReport& report,
                                         Severity severity) {
    std::multiset<std::string> codes;
    for (const auto& f : report.findings) {
        if (f.severity == severity) codes.insert(f.code);
    }
    return codes;
}

gate::GateConfig repo_config() {
    gate::GateConfig config;
    config.required_roles = {gate::Role::developer, gate::Role::data_scientist,
                             gate::Role::regulatory, gate::Role::clinical};
    return config;
}

}  // namespace

int main() {
    criterion(1, "card corpus reproduces the expected finding codes exactly", [](Checker& c) {
        const json expected = load_expected();
        int total = 0, valid = 0, single_violation = 0;
        for (const auto& [name, meta] : expected.items()) {
            ++total;
            const auto profile =
                card::profile_from_string(meta.at("profile").get<std::string>());
            card::ModelCard parsed = testsup::fixture_card(name);
            const auto report = card::validate_card(parsed, profile);

            std::multiset<std::string> want_errors, want_warnings;
            for (const auto& e : meta.at("errors")) want_errors.insert(e.get<std::string>());
            for (const auto& w : meta.at("warnings")) {
                want_warnings.insert(w.get<std::string>());
            }
            const auto got_errors = finding_codes(report, Severity::error);
            const auto got_warnings = finding_codes(report, Severity::warning);
            c.expect(got_errors == want_errors, name + ": unexpected error codes");
            c.expect(got_warnings == want_warnings, name + ": unexpected warning codes");
            c.expect(report.passed == want_errors.empty(), name + ": passed flag wrong");
            if (want_errors.empty()) {
                ++valid;
                c.expect(got_errors.empty(), name + ": false positive on a valid card");
            }
            if (want_errors.size() == 1) ++single_violation;
        }
        c.expect(total >= 20, "corpus smaller than 20 cards");
        c.expect(valid >= 8, "fewer than 8 valid cards");
        c.expect(single_violation >= 12, "fewer than 12 single-violation cards");
    });

    criterion(2, "round-trip identity and canonical digest invariance", [](Checker& c) {
        std::mt19937 rng(202);
        const json expected = load_expected();
        for (const auto& [name, meta] : expected.items()) {
            (void)meta;
            const std::string bytes =
                testsup::read_file(testsup::fixture_path("cards/" + name));
            const std::string canonical = canonicalize(bytes);
            card::ModelCard parsed = card::parse_card(bytes);
            c.expect(card::serialize_card(parsed) == canonical,
                     name + ": serialize(parse(d)) != canonicalize(d)");
            c.expect(card::serialize_card(card::parse_card(canonical)) == canonical,
                     name + ": canonical form is not a fixed point");

            const prov::Digest reference = prov::digest_artifact(bytes,
                                                                 prov::ArtifactKind::card);
            const json doc = parse_json(bytes);
            for (int i = 0; i < 10; ++i) {
                const std::string permuted = testsup::shuffled_dump(doc, rng);
                c.expect(canonicalize(permuted) == canonical,
                         name + ": canonicalization not permutation-invariant");
                c.expect(prov::digest_artifact(permuted, prov::ArtifactKind::card) ==
                             reference,
                         name + ": card digest not permutation-invariant");
            }
        }
    });

    criterion(3, "traceability findings match the brute-force oracle", [](Checker& c) {
        std::mt19937 rng(303);
        for (int round = 0; round < 200; ++round) {
            const auto items = testsup::random_graph(rng, 200);
            const auto graph = trace::build_graph(items);
            c.expect(testsup::to_finding_set(trace::check_completeness(graph)) ==
                         testsup::completeness_oracle(items),
                     "completeness mismatch in round " + std::to_string(round));
            c.expect(testsup::to_finding_set(trace::check_decomposition(graph)) ==
                         testsup::decomposition_oracle(items),
                     "decomposition mismatch in round " + std::to_string(round));
        }

        int graphs = 0;
        while (graphs < 20) {
            auto items = testsup::complete_graph(rng, 8);
            if (items.size() > 50) continue;
            ++graphs;
            c.expect(testsup::to_finding_set(trace::check_completeness(
                                                 trace::build_graph(items)),
                                             /*errors_only=*/true)
                         .empty(),
                     "complete graph produced error findings");
            for (std::size_t i = 0; i < items.size(); ++i) {
                for (std::size_t l = 0; l < items[i].links.size(); ++l) {
                    const auto rel = items[i].links[l].rel;
                    if (rel != trace::Relation::resolved_by &&
                        rel != trace::Relation::verified_by &&
                        rel != trace::Relation::maps_to) {
                        continue;
                    }
                    auto mutated = items;
                    mutated[i].links.erase(mutated[i].links.begin() +
                                           static_cast<std::ptrdiff_t>(l));
                    const auto errors = testsup::to_finding_set(
                        trace::check_completeness(trace::build_graph(mutated)),
                        /*errors_only=*/true);
                    c.expect(errors.size() == 1,
                             "edge deletion produced " + std::to_string(errors.size()) +
                                 " error findings");
                }
            }
        }
    });

    criterion(4, "gate truth table and rule independence", [](Checker& c) {
        const auto graph = testsup::synth_graph();
        for (int mask = 0; mask < (1 << 7); ++mask) {
            testsup::RuleToggles toggles{(mask & 1) != 0,  (mask & 2) != 0,
                                         (mask & 4) != 0,  (mask & 8) != 0,
                                         (mask & 16) != 0, (mask & 32) != 0,
                                         (mask & 64) != 0};
            auto s = testsup::synth_gate(toggles);
            const auto verdict = gate::evaluate_gate(s.ctx, graph, s.config);
            bool expect_pass = true;
            c.expect(verdict.rule_results.size() == 7, "wrong rule count");
            for (int r = 0; r < 7; ++r) {
                const bool should_pass = toggles.get(r);
                expect_pass = expect_pass && should_pass;
                const auto outcome =
                    verdict.rule_results[static_cast<std::size_t>(r)].outcome;
                c.expect((outcome == gate::Outcome::fail) == !should_pass,
                         "rule R" + std::to_string(r + 1) + " outcome wrong at mask " +
                             std::to_string(mask));
            }
            c.expect(verdict.passed == expect_pass,
                     "verdict is not the conjunction at mask " + std::to_string(mask));

            // determinism: byte-identical serialization on re-evaluation
            c.expect(canonical_dump(gate::evaluate_gate(s.ctx, graph, s.config).to_json()) ==
                         canonical_dump(verdict.to_json()),
                     "verdict not deterministic at mask " + std::to_string(mask));
        }

        for (int disabled = 0; disabled < 7; ++disabled) {
            for (int mask = 0; mask < (1 << 7); ++mask) {
                testsup::RuleToggles toggles{(mask & 1) != 0,  (mask & 2) != 0,
                                             (mask & 4) != 0,  (mask & 8) != 0,
                                             (mask & 16) != 0, (mask & 32) != 0,
                                             (mask & 64) != 0};
                auto s = testsup::synth_gate(toggles);
                std::map<std::string, gate::Outcome> reference;
                for (const auto& r :
                     gate::evaluate_gate(s.ctx, graph, s.config).rule_results) {
                    reference[r.rule_id] = r.outcome;
                }
                auto reduced = s.config;
                reduced.enabled_rules.erase(reduced.enabled_rules.begin() + disabled);
                for (const auto& r : gate::evaluate_gate(s.ctx, graph, reduced).rule_results) {
                    c.expect(r.outcome == reference[r.rule_id],
                             "disabling R" + std::to_string(disabled + 1) + " changed " +
                                 r.rule_id);
                }
            }
        }
    });

    criterion(5, "train/test overlap matches the set-intersection oracle; R3 agrees",
              [](Checker& c) {
        std::mt19937 rng(505);
        const auto graph = testsup::synth_graph();
        auto random_digest = [&] {
            // small alphabet to force natural collisions
            static const char* hex = "0123456789abcdef";
            std::string d(64, '0');
            for (std::size_t i = 60; i < 64; ++i) d[i] = hex[rng() % 4];
            return d;
        };
        for (int round = 0; round < 100; ++round) {
            std::vector<std::string> a, b;
            const std::size_t na = rng() % 300, nb = rng() % 300;
            for (std::size_t i = 0; i < na; ++i) a.push_back(random_digest());
            for (std::size_t i = 0; i < nb; ++i) b.push_back(random_digest());
            const int planted = round % 7;
            for (int i = 0; i < planted; ++i) {
                const std::string shared = random_digest();
                a.push_back(shared);
                b.push_back(shared);
            }
            std::shuffle(a.begin(), a.end(), rng);
            std::shuffle(b.begin(), b.end(), rng);

            std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
            std::vector<std::string> shared;
            std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                                  std::back_inserter(shared));

            const auto overlap = prov::digest_list_overlap(a, b);
            c.expect(overlap.count == shared.size(),
                     "overlap count mismatch in round " + std::to_string(round));

            // R3 fails precisely when the intersection is non-empty
            auto s = testsup::synth_gate(testsup::RuleToggles{});
            json doc = s.ctx.card_new->doc;
            json train = json::array();
            for (const auto& d : sa) train.push_back(d);
            json test = json::array();
            for (const auto& d : sb) test.push_back(d);
            doc["model_parameters"]["data"][0]["record_digests"] = train;
            doc["model_parameters"]["data"][0]["record_count"] = sa.size();
            doc["model_parameters"]["data"][1]["record_digests"] = test;
            doc["model_parameters"]["data"][1]["record_count"] = sb.size();
            s.ctx.card_new = card::parse_card(doc.dump());
            const auto verdict = gate::evaluate_gate(s.ctx, graph, s.config);
            gate::Outcome r3 = gate::Outcome::skipped;
            for (const auto& r : verdict.rule_results) {
                if (r.rule_id == "R3") r3 = r.outcome;
            }
            if (shared.empty()) {
                c.expect(r3 != gate::Outcome::fail,
                         "R3 failed without overlap in round " + std::to_string(round));
            } else {
                c.expect(r3 == gate::Outcome::fail,
                         "R3 passed despite overlap in round " + std::to_string(round));
            }
        }
    });

    criterion(6, "locked-model registry transitions and digest-exact check", [](Checker& c) {
        using prov::RegistryStatus;
        const RegistryStatus all[] = {RegistryStatus::candidate, RegistryStatus::approved,
                                      RegistryStatus::deployed_locked};
        for (RegistryStatus from : all) {
            for (RegistryStatus to : all) {
                const bool expected =
                    (from == RegistryStatus::candidate && to == RegistryStatus::approved) ||
                    (from == RegistryStatus::approved &&
                     to == RegistryStatus::deployed_locked);
                c.expect(prov::transition_allowed(from, to) == expected,
                         std::string("transition table wrong for ") +
                             std::string(prov::to_string(from)) + " -> " +
                             std::string(prov::to_string(to)));
                prov::ModelRegistryEntry entry{{std::string(64, 'a')},
                                               {std::string(64, 'b')},
                                               from};
                bool threw = false;
                try {
                    prov::apply_transition(entry, to);
                } catch (const Error& e) {
                    threw = true;
                    c.expect(e.code() == "IllegalTransition", "unexpected error code");
                }
                c.expect(threw == !expected, "apply_transition disagrees with the table");
            }
        }

        const std::string locked_hex = prov::digest_bytes("the deployed model weights").hex;
        std::vector<prov::ModelRegistryEntry> registry{
            {{locked_hex}, {std::string(64, 'b')}, RegistryStatus::deployed_locked},
            {{std::string(64, 'c')}, {std::string(64, 'b')}, RegistryStatus::approved},
            {{std::string(64, 'd')}, {std::string(64, 'b')}, RegistryStatus::candidate},
        };
        c.expect(prov::check_locked({locked_hex}, registry).passed,
                 "exact locked digest rejected");
        std::string near_miss = locked_hex;
        near_miss[0] = near_miss[0] == '0' ? '1' : '0';
        c.expect(!prov::check_locked({near_miss}, registry).passed,
                 "near-miss digest accepted");
        c.expect(!prov::check_locked({std::string(64, 'c')}, registry).passed,
                 "approved-but-not-locked digest accepted");
        c.expect(!prov::check_locked({std::string(64, 'd')}, registry).passed,
                 "candidate digest accepted");
        c.expect(!prov::check_locked({locked_hex}, {}).passed, "empty registry accepted");
    });

    criterion(7, "drift detection on the synthetic step stream", [](Checker& c) {
        const auto events = testsup::step_stream(1000, 500);
        monitor::DriftConfig config{100, 0.10, 0.10, 50};
        const auto baseline = testsup::accuracy_baseline(0.9);
        const auto series = monitor::rolling_stats(events, config.window);
        const auto deviations = monitor::detect_deviation(series, baseline, config);
        c.expect(deviations.size() == 1,
                 "expected exactly one deviation, got " + std::to_string(deviations.size()));
        if (deviations.size() == 1) {
            c.expect(deviations[0].kind == monitor::DeviationKind::accuracy_drop,
                     "wrong deviation kind");
            c.expect(deviations[0].window_end_seq >= 500 &&
                         deviations[0].window_end_seq <= 600,
                     "window_end_seq " + std::to_string(deviations[0].window_end_seq) +
                         " outside [500, 600]");
        }
        const auto expected =
            testsup::drift_oracle(events, config.window, 0.9, config.accuracy_tolerance,
                                  std::nullopt, config.confidence_tolerance,
                                  config.min_labeled);
        c.expect(expected.size() == deviations.size(), "oracle disagrees on count");
        for (std::size_t i = 0; i < std::min(expected.size(), deviations.size()); ++i) {
            c.expect(expected[i].window_end_seq == deviations[i].window_end_seq,
                     "oracle disagrees on trigger position");
            c.expect(expected[i].observed == deviations[i].observed,
                     "oracle disagrees on observed value");
        }

        const auto null_stream = testsup::step_stream(1000, 1000);
        c.expect(monitor::detect_deviation(monitor::rolling_stats(null_stream, 100),
                                           baseline, config)
                     .empty(),
                 "null stream produced deviations");

        monitor::DriftConfig vacuous = config;
        vacuous.accuracy_tolerance = 1.0;
        vacuous.confidence_tolerance = 1.0;
        c.expect(monitor::detect_deviation(series, baseline, vacuous).empty(),
                 "tolerance 1.0 produced deviations");
    });

    criterion(8, "report determinism and redaction leak-freedom", [](Checker& c) {
        const auto base = testsup::fixture_card("valid_release_full.json");
        c.expect(report::render_model_card(base, report::Audience::internal) ==
                     report::render_model_card(base, report::Audience::internal),
                 "internal model card render not deterministic");
        c.expect(report::render_model_card(base, report::Audience::pub) ==
                     report::render_model_card(base, report::Audience::pub),
                 "public model card render not deterministic");
        c.expect(report::render_risk_report(base) == report::render_risk_report(base),
                 "risk report render not deterministic");

        const auto graph =
            trace::build_graph(ingest::load_trace_items(testsup::fixture_path("trace")));
        const auto matrix = trace::trace_matrix(graph);
        c.expect(report::render_trace_matrix(matrix) == report::render_trace_matrix(matrix),
                 "trace matrix render not deterministic");

        auto config = repo_config();
        auto ctx = ingest::load_pr_context(testsup::fixture_path("pr/pr_pass.json"), config);
        const std::vector<gate::GateVerdict> verdicts{gate::evaluate_gate(ctx, graph, config)};
        const auto repo_card = card::parse_card(
            testsup::read_file(testsup::fixture_path("repo/modelcard.json")));
        c.expect(report::render_clinical_validation_report(repo_card, matrix, verdicts, {}) ==
                     report::render_clinical_validation_report(repo_card, matrix, verdicts,
                                                               {}),
                 "clinical validation render not deterministic");

        std::mt19937 rng(808);
        const std::vector<std::string> pool{
            "model_details.documentation",
            "model_details.license",
            "model_parameters.data[0].x_sources",
            "model_parameters.data[1].x_sources",
            "model_parameters.data[0].description",
            "model_parameters.data[1].description",
            "quantitative_analysis.evaluation_context",
            "considerations.limitations",
            "considerations.tradeoffs",
            "considerations.ethical_considerations",
            "x_regulatory.clinical_evaluation",
            "x_regulatory.resource_requirements",
        };
        for (int round = 0; round < 100; ++round) {
            json doc = base.doc;
            json visibility = json::object();
            std::vector<std::string> privates;
            for (const auto& selector : pool) {
                if (rng() % 2 == 0) continue;
                const bool is_private = rng() % 2 == 0;
                visibility[selector] = is_private ? "private" : "public";
                if (is_private) privates.push_back(selector);
            }
            doc["x_regulatory"]["visibility"] = visibility;
            const auto fuzzed = card::parse_card(doc.dump());
            const auto secrets = testsup::exclusive_private_values(doc, privates);
            const std::string rendered =
                report::render_model_card(fuzzed, report::Audience::pub);
            const std::string serialized = card::serialize_card(card::redact_card(fuzzed));
            for (const auto& secret : secrets) {
                c.expect(rendered.find(secret) == std::string::npos,
                         "private value leaked into the public rendering (round " +
                             std::to_string(round) + ")");
                c.expect(serialized.find(secret) == std::string::npos,
                         "private value survived redaction (round " + std::to_string(round) +
                             ")");
            }
        }
    });

    criterion(9, "end-to-end audit trail over the fixture repository", [](Checker& c) {
        auto config = repo_config();
        const auto snapshot = ingest::scan_repo(testsup::fixture_path("repo"), config);
        c.expect(snapshot.errors.empty(), "repository scan reported errors");
        c.expect(snapshot.cards.size() == 1, "expected exactly one card");
        c.expect(snapshot.pr_contexts.size() == 2, "expected two PR snapshots");

        const auto& repo_card = snapshot.cards.front().second;
        const auto validation = card::validate_card(repo_card, card::Profile::release);
        c.expect(validation.passed, "repository card fails the release profile");

        const auto graph = trace::build_graph(snapshot.trace_items);
        for (const auto& f : trace::check_completeness(graph)) {
            c.expect(f.severity != Severity::error, "trace completeness error: " + f.code);
        }
        for (const auto& f : trace::check_decomposition(graph)) {
            c.expect(f.severity != Severity::error, "trace decomposition error: " + f.code);
        }

        std::vector<gate::GateVerdict> verdicts;
        for (const auto& ctx : snapshot.pr_contexts) {
            verdicts.push_back(gate::evaluate_gate(ctx, graph, config));
        }
        for (const auto& verdict : verdicts) {
            c.expect(verdict.passed, "fixture PR " + verdict.pr_id + " failed the gate");
        }

        const std::string card_bytes =
            testsup::read_file(testsup::fixture_path("repo/modelcard.json"));
        const auto store = prov::load_store(testsup::fixture_path("repo/provenance.jsonl"));
        const auto chain = prov::verify_chain(
            store, prov::digest_artifact(card_bytes, prov::ArtifactKind::card));
        c.expect(chain.size() == 5, "expected the 5-record provenance chain");

        const auto matrix = trace::trace_matrix(graph);
        const auto bundle = report::render_bundle(repo_card, report::Audience::internal,
                                                  matrix, verdicts, chain);

        // the design-control history lists every verdict with per-rule outcomes
        for (const auto& verdict : verdicts) {
            c.expect(bundle.clinical_validation_md.find(verdict.pr_id) != std::string::npos,
                     "clinical report misses verdict " + verdict.pr_id);
            for (const auto& rule : verdict.rule_results) {
                const std::string cell =
                    rule.rule_id + ":" + std::string(gate::to_string(rule.outcome));
                c.expect(bundle.clinical_validation_md.find(cell) != std::string::npos,
                         "clinical report misses outcome " + cell);
            }
        }

        // manifest digests match the rendered bytes, in memory and on disk
        const std::map<std::string, const std::string*> documents{
            {"model_card.md", &bundle.model_card_md},
            {"clinical_validation.md", &bundle.clinical_validation_md},
            {"risk_report.md", &bundle.risk_report_md},
            {"trace_matrix.md", &bundle.trace_matrix_md},
        };
        for (const auto& [name, content] : documents) {
            c.expect(!content->empty(), name + " is empty");
            c.expect(bundle.manifest.at(name) == prov::digest_bytes(*content),
                     name + " manifest digest mismatch");
        }

        const fs::path out_dir = fs::temp_directory_path() / "designctl_acceptance_reports";
        fs::remove_all(out_dir);
        const fs::path bundle_dir = report::write_bundle(out_dir, repo_card, bundle);
        for (const auto& [name, content] : documents) {
            (void)content;
            const std::string on_disk = testsup::read_file((bundle_dir / name).string());
            c.expect(prov::digest_bytes(on_disk) == bundle.manifest.at(name),
                     name + " on-disk digest mismatch");
        }
        const json manifest_on_disk =
            parse_json(testsup::read_file((bundle_dir / "manifest.json").string()));
        c.expect(manifest_on_disk == bundle.manifest_to_json(),
                 "manifest.json does not match the bundle manifest");
        fs::remove_all(out_dir);
    });

    if (g_failed_criteria != 0) {
        std::cout << g_failed_criteria << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all 9 acceptance criteria passed\n";
    return 0;
}
