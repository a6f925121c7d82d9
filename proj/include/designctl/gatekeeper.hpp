#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "designctl/common.hpp"
#include "designctl/modelcard.hpp"
#include "designctl/traceability.hpp"

namespace designctl::gate {

enum class Phase { pre_market, post_market };
enum class Role { developer, data_scientist, regulatory, clinical };
enum class Stage { development, integration, release };
enum class Outcome { pass, fail, skipped };

std::string_view to_string(Phase p);
Phase phase_from_string(std::string_view s);
std::string_view to_string(Role r);
Role role_from_string(std::string_view s);
std::string_view to_string(Stage s);
Stage stage_from_string(std::string_view s);
std::string_view to_string(Outcome o);

struct TestResult {
    std::string test_case_id;
    bool passed = false;  // statuses are only pass|fail
};

struct Approval {
    std::string reviewer;
    Role role = Role::developer;
};

// Snapshot of everything the gate looks at for one pull request.
struct PullRequestContext {
    std::string pr_id;
    Phase phase = Phase::pre_market;
    std::vector<std::string> linked_requirements;
    std::vector<std::string> changed_paths;
    bool model_artifact_changed = false;  // derived from the configured model globs
    std::optional<card::ModelCard> card_old;
    std::optional<card::ModelCard> card_new;
    std::vector<TestResult> test_results;
    std::vector<Approval> approvals;
};

// Rule catalog R1..R7; see explain_rule() for the anchors.
inline constexpr std::string_view kRuleIds[] = {"R1", "R2", "R3", "R4", "R5", "R6", "R7"};

struct GateConfig {
    std::vector<std::string> enabled_rules{"R1", "R2", "R3", "R4", "R5", "R6", "R7"};
    std::set<Role> required_roles;
    std::vector<std::string> model_path_globs{"models/**"};
    std::map<std::string, double> metric_thresholds;  // metric type -> minimum
    Stage stage = Stage::development;                 // R4 applies at integration/release
};

struct RuleFinding {
    std::string rule_id;
    std::string code;
    Severity severity = Severity::error;
    std::string message;
};

struct RuleResult {
    std::string rule_id;
    Outcome outcome = Outcome::skipped;
    std::vector<RuleFinding> findings;
};

struct GateVerdict {
    std::string pr_id;
    bool passed = false;  // passed <=> no rule outcome is fail
    std::vector<RuleResult> rule_results;  // config order, each enabled rule once

    json to_json() const;
    static GateVerdict from_json(const json& j, const std::string& where = {});
};

// Evaluates every enabled rule independently, in config order, with no
// short-circuiting; the verdict is the complete review record. Throws
// Error("ConfigInvalid") on an unknown or duplicated rule id, or when R6
// is enabled with an empty required_roles set.
GateVerdict evaluate_gate(const PullRequestContext& ctx, const trace::TraceGraph& graph,
                          const GateConfig& config);

// Deterministic explanatory text with the rule's regulatory anchor.
// Throws Error("UnknownRule").
std::string explain_rule(const std::string& rule_id);

}  // namespace designctl::gate
