#include "designctl/gatekeeper.hpp"

#include <algorithm>
#include <set>

#include "designctl/provenance.hpp"

namespace designctl::gate {

namespace {

void add_finding(RuleResult& result, const char* code, Severity severity,
                 std::string message) {
    result.findings.push_back({result.rule_id, code, severity, std::move(message)});
}

// R1 requirement-linked: the requirement is the design input of the
// iteration; linked test failures fold in here as TEST_FAILED.
RuleResult eval_r1(const PullRequestContext& ctx, const trace::TraceGraph& graph) {
    RuleResult r{"R1", Outcome::pass, {}};
    if (ctx.linked_requirements.empty()) {
        r.outcome = Outcome::fail;
        add_finding(r, "NO_LINKED_REQUIREMENT", Severity::error,
                    "pull request links no requirement");
    }
    for (const auto& id : ctx.linked_requirements) {
        const trace::TraceItem* item = graph.find(id);
        if (item == nullptr) {
            r.outcome = Outcome::fail;
            add_finding(r, "UNKNOWN_REQUIREMENT", Severity::error,
                        "linked requirement '" + id + "' is not in the trace graph");
        } else if (item->kind != trace::ItemKind::requirement) {
            r.outcome = Outcome::fail;
            add_finding(r, "UNKNOWN_REQUIREMENT", Severity::error,
                        "linked item '" + id + "' is a " +
                            std::string(trace::to_string(item->kind)) + ", not a requirement");
        }
    }
    for (const auto& t : ctx.test_results) {
        if (!t.passed) {
            r.outcome = Outcome::fail;
            add_finding(r, "TEST_FAILED", Severity::error,
                        "test case '" + t.test_case_id + "' failed");
        }
    }
    return r;
}

// R2 card-updated-on-model-change: a model change must land with a card
// whose version name moved.
RuleResult eval_r2(const PullRequestContext& ctx) {
    RuleResult r{"R2", Outcome::pass, {}};
    if (!ctx.model_artifact_changed) {
        r.outcome = Outcome::skipped;
        return r;
    }
    if (!ctx.card_new) {
        r.outcome = Outcome::fail;
        add_finding(r, "CARD_MISSING", Severity::error,
                    "model artifact changed without an updated model card");
        return r;
    }
    if (!ctx.card_old) {
        return r;  // first card for this model counts as updated
    }
    if (!card::diff_cards(*ctx.card_old, *ctx.card_new).version_changed) {
        r.outcome = Outcome::fail;
        add_finding(r, "CARD_NOT_UPDATED", Severity::error,
                    "model artifact changed but model_details.version.name did not");
    }
    return r;
}

// R3 train-test-independence over per-record digests.
RuleResult eval_r3(const PullRequestContext& ctx) {
    RuleResult r{"R3", Outcome::pass, {}};
    if (!ctx.card_new) {
        r.outcome = Outcome::skipped;
        add_finding(r, "TT_UNCHECKABLE", Severity::warning,
                    "no model card in the pull request; independence not checkable");
        return r;
    }
    bool any_checkable = false;
    bool any_overlap = false;
    for (const auto& test : ctx.card_new->datasets) {
        if (test.role != card::DatasetRole::test) continue;
        for (const auto& train : ctx.card_new->datasets) {
            if (train.role != card::DatasetRole::train) continue;
            if (!test.record_digests || !train.record_digests) {
                add_finding(r, "TT_UNCHECKABLE", Severity::warning,
                            "datasets '" + train.name + "'/'" + test.name +
                                "' carry no record digests; independence not checkable");
                continue;
            }
            any_checkable = true;
            prov::Overlap overlap = prov::dataset_overlap(train, test);
            if (overlap.count > 0) {
                any_overlap = true;
                std::string digests;
                for (const auto& d : overlap.sample) {
                    if (!digests.empty()) digests += ", ";
                    digests += d;
                }
                add_finding(r, "TT_OVERLAP", Severity::error,
                            std::to_string(overlap.count) + " record(s) shared between train '" +
                                train.name + "' and test '" + test.name + "': " + digests);
            }
        }
    }
    if (any_overlap) {
        r.outcome = Outcome::fail;
    } else if (!any_checkable) {
        r.outcome = Outcome::skipped;
        if (r.findings.empty()) {
            add_finding(r, "TT_UNCHECKABLE", Severity::warning,
                        "card has no train/test dataset pair to check");
        }
    }
    return r;
}

// R4 quantitative-analysis-present, integration/release stages only.
RuleResult eval_r4(const PullRequestContext& ctx, const GateConfig& config) {
    RuleResult r{"R4", Outcome::pass, {}};
    if (config.stage == Stage::development) {
        r.outcome = Outcome::skipped;
        return r;
    }
    if (!ctx.card_new || !ctx.card_new->quantitative_analysis) {
        r.outcome = Outcome::fail;
        add_finding(r, "QA_MISSING", Severity::error,
                    "integration/release gate requires quantitative_analysis in the card");
        return r;
    }
    for (const auto& metric : ctx.card_new->quantitative_analysis->performance_metrics) {
        double threshold = -1.0;
        bool thresholded = false;
        if (auto it = config.metric_thresholds.find(metric.type);
            it != config.metric_thresholds.end()) {
            threshold = it->second;
            thresholded = true;
        }
        if (metric.threshold && (!thresholded || *metric.threshold > threshold)) {
            threshold = *metric.threshold;
            thresholded = true;
        }
        if (thresholded && metric.value < threshold) {
            r.outcome = Outcome::fail;
            add_finding(r, "METRIC_BELOW_THRESHOLD", Severity::error,
                        "metric '" + metric.type +
                            (metric.slice ? "' slice '" + *metric.slice : "") + "' value " +
                            canonical_dump(json(metric.value)) + " below threshold " +
                            canonical_dump(json(threshold)));
        }
    }
    return r;
}

// R5 risk-documented: every risk mitigated, references resolvable.
RuleResult eval_r5(const PullRequestContext& ctx, const trace::TraceGraph& graph) {
    RuleResult r{"R5", Outcome::pass, {}};
    if (!ctx.card_new) {
        r.outcome = Outcome::skipped;
        return r;
    }
    if (!ctx.card_new->considerations) {
        return r;  // nothing documented yet; release validation owns absence
    }
    for (const auto& risk : ctx.card_new->considerations->risks) {
        if (risk.mitigation.empty()) {
            r.outcome = Outcome::fail;
            add_finding(r, "MITIGATION_MISSING", Severity::error,
                        "risk '" + risk.name + "' has no mitigation");
        }
        if (risk.requirement_ref && !graph.contains(*risk.requirement_ref)) {
            r.outcome = Outcome::fail;
            add_finding(r, "RISK_REF_UNKNOWN", Severity::error,
                        "risk '" + risk.name + "' references requirement '" +
                            *risk.requirement_ref + "' which is not in the trace graph");
        }
    }
    return r;
}

// R6 multi-role-approval.
RuleResult eval_r6(const PullRequestContext& ctx, const GateConfig& config) {
    RuleResult r{"R6", Outcome::pass, {}};
    std::set<Role> present;
    for (const auto& approval : ctx.approvals) present.insert(approval.role);
    for (Role required : config.required_roles) {
        if (!present.count(required)) {
            r.outcome = Outcome::fail;
            add_finding(r, "ROLE_MISSING", Severity::error,
                        "no approval from role '" + std::string(to_string(required)) + "'");
        }
    }
    return r;
}

// R7 locked-model: no post-market model change.
RuleResult eval_r7(const PullRequestContext& ctx) {
    RuleResult r{"R7", Outcome::pass, {}};
    if (ctx.phase != Phase::post_market) {
        r.outcome = Outcome::skipped;
        return r;
    }
    if (ctx.model_artifact_changed) {
        r.outcome = Outcome::fail;
        add_finding(r, "LOCKED_VIOLATION", Severity::error,
                    "deployed models are locked; post-market pull requests must not "
                    "change the model artifact");
    }
    return r;
}

}  // namespace

std::string_view to_string(Phase p) {
    return p == Phase::pre_market ? "pre_market" : "post_market";
}

Phase phase_from_string(std::string_view s) {
    if (s == "pre_market") return Phase::pre_market;
    if (s == "post_market") return Phase::post_market;
    throw Error("SchemaViolation", "unknown phase '" + std::string(s) + "'");
}

std::string_view to_string(Role r) {
    switch (r) {
        case Role::developer: return "developer";
        case Role::data_scientist: return "data_scientist";
        case Role::regulatory: return "regulatory";
        case Role::clinical: return "clinical";
    }
    return "developer";
}

Role role_from_string(std::string_view s) {
    if (s == "developer") return Role::developer;
    if (s == "data_scientist") return Role::data_scientist;
    if (s == "regulatory") return Role::regulatory;
    if (s == "clinical") return Role::clinical;
    throw Error("SchemaViolation", "unknown role '" + std::string(s) + "'");
}

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::development: return "development";
        case Stage::integration: return "integration";
        case Stage::release: return "release";
    }
    return "development";
}

Stage stage_from_string(std::string_view s) {
    if (s == "development") return Stage::development;
    if (s == "integration") return Stage::integration;
    if (s == "release") return Stage::release;
    throw Error("ConfigInvalid", "unknown stage '" + std::string(s) + "'");
}

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::pass: return "pass";
        case Outcome::fail: return "fail";
        case Outcome::skipped: return "skipped";
    }
    return "pass";
}

json GateVerdict::to_json() const {
    json rules = json::array();
    for (const auto& result : rule_results) {
        json findings = json::array();
        for (const auto& f : result.findings) {
            findings.push_back({{"rule_id", f.rule_id},
                                {"code", f.code},
                                {"severity", std::string(designctl::to_string(f.severity))},
                                {"message", f.message}});
        }
        rules.push_back({{"rule_id", result.rule_id},
                         {"outcome", std::string(to_string(result.outcome))},
                         {"findings", std::move(findings)}});
    }
    return json{{"pr_id", pr_id},
                {"status", passed ? "pass" : "fail"},
                {"rule_results", std::move(rules)}};
}

GateVerdict GateVerdict::from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("pr_id") || !j.contains("status") ||
        !j.contains("rule_results")) {
        throw Error("SchemaViolation", "verdict requires pr_id, status and rule_results",
                    where);
    }
    GateVerdict verdict;
    verdict.pr_id = j["pr_id"].get<std::string>();
    verdict.passed = j["status"].get<std::string>() == "pass";
    for (const auto& rule : j["rule_results"]) {
        RuleResult result;
        result.rule_id = rule.at("rule_id").get<std::string>();
        const std::string outcome = rule.at("outcome").get<std::string>();
        if (outcome == "pass") result.outcome = Outcome::pass;
        else if (outcome == "fail") result.outcome = Outcome::fail;
        else if (outcome == "skipped") result.outcome = Outcome::skipped;
        else throw Error("SchemaViolation", "unknown outcome '" + outcome + "'", where);
        if (rule.contains("findings")) {
            for (const auto& f : rule["findings"]) {
                result.findings.push_back({f.at("rule_id").get<std::string>(),
                                           f.at("code").get<std::string>(),
                                           severity_from_string(
                                               f.at("severity").get<std::string>()),
                                           f.at("message").get<std::string>()});
            }
        }
        verdict.rule_results.push_back(std::move(result));
    }
    return verdict;
}

GateVerdict evaluate_gate(const PullRequestContext& ctx, const trace::TraceGraph& graph,
                          const GateConfig& config) {
    std::set<std::string> seen;
    for (const auto& rule : config.enabled_rules) {
        if (std::find(std::begin(kRuleIds), std::end(kRuleIds), rule) == std::end(kRuleIds)) {
            throw Error("ConfigInvalid", "unknown rule id '" + rule + "'");
        }
        if (!seen.insert(rule).second) {
            throw Error("ConfigInvalid", "rule id '" + rule + "' enabled twice");
        }
    }
    if (seen.count("R6") && config.required_roles.empty()) {
        throw Error("ConfigInvalid", "R6 is enabled but required_roles is empty");
    }

    GateVerdict verdict;
    verdict.pr_id = ctx.pr_id;
    for (const auto& rule : config.enabled_rules) {
        if (rule == "R1") verdict.rule_results.push_back(eval_r1(ctx, graph));
        else if (rule == "R2") verdict.rule_results.push_back(eval_r2(ctx));
        else if (rule == "R3") verdict.rule_results.push_back(eval_r3(ctx));
        else if (rule == "R4") verdict.rule_results.push_back(eval_r4(ctx, config));
        else if (rule == "R5") verdict.rule_results.push_back(eval_r5(ctx, graph));
        else if (rule == "R6") verdict.rule_results.push_back(eval_r6(ctx, config));
        else if (rule == "R7") verdict.rule_results.push_back(eval_r7(ctx));
    }
    verdict.passed = std::none_of(verdict.rule_results.begin(), verdict.rule_results.end(),
                                  [](const RuleResult& r) { return r.outcome == Outcome::fail; });
    return verdict;
}

std::string explain_rule(const std::string& rule_id) {
    if (rule_id == "R1") {
        return "R1 requirement-linked: every pull request resolves at least one requirement "
               "known to the trace graph; the requirement is the design input of the "
               "iteration and linked test cases must pass (IEC 62304 design input / "
               "verification).";
    }
    if (rule_id == "R2") {
        return "R2 card-updated-on-model-change: the model card is the design output that "
               "documents the model, so any change to the model artifact must ship with a "
               "card whose version name moved.";
    }
    if (rule_id == "R3") {
        return "R3 train-test-independence: training data sets are independent of test sets "
               "(GMLP guiding principle); no record digest may appear in both a training "
               "and the test dataset.";
    }
    if (rule_id == "R4") {
        return "R4 quantitative-analysis-present: integration and release gates require the "
               "clinical performance evaluation recorded in the card's quantitative_analysis "
               "section, with every metric at or above its threshold.";
    }
    if (rule_id == "R5") {
        return "R5 risk-documented: identified risks carry mitigations and, when referenced, "
               "resolve to requirements, so risk management feeds design input (ISO 14971 "
               "risk control).";
    }
    if (rule_id == "R6") {
        return "R6 multi-role-approval: multi-disciplinary expertise is leveraged throughout "
               "the product life cycle (GMLP guiding principle); the review needs approvals "
               "from every configured role.";
    }
    if (rule_id == "R7") {
        return "R7 locked-model: deployed models must be in a locked state; post-market "
               "changes to the model artifact are prohibited and must come through a new "
               "pre-market iteration.";
    }
    throw Error("UnknownRule", "no rule '" + rule_id + "' in the catalog R1..R7", rule_id);
}

}  // namespace designctl::gate
