#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "designctl/gatekeeper.hpp"
#include "designctl/modelcard.hpp"
#include "designctl/traceability.hpp"

namespace designctl::ingest {

// Minimal glob: '*' matches within a path segment, '**' matches across
// segments, no brace expansion. Paths use '/' separators.
bool glob_match(std::string_view pattern, std::string_view path);

// Parses every *.md YAML front-matter block and *.json item array under
// dir (recursive); result sorted by id. Throws Error("ParseError") with
// the file path, Error("DuplicateId") across files.
std::vector<trace::TraceItem> load_trace_items(const std::filesystem::path& dir);

// One item / an array of items from the JSON export shape
// {id, kind, level?, title?, links?: [{rel, target}]}.
trace::TraceItem trace_item_from_json(const json& j, const std::string& where = {});
std::vector<trace::TraceItem> trace_items_from_json(const json& array,
                                                    const std::string& where = {});
json trace_items_to_json(const std::vector<trace::TraceItem>& items);

// Parses one PR snapshot file. model_artifact_changed is derived from
// config.model_path_globs; card_old_path/card_new_path resolve relative
// to the snapshot's directory. Throws ParseError / SchemaViolation.
gate::PullRequestContext load_pr_context(const std::filesystem::path& path,
                                         const gate::GateConfig& config);

struct IngestError {
    std::string path;
    std::string detail;
};

struct RepoSnapshot {
    std::filesystem::path root;
    std::vector<trace::TraceItem> trace_items;
    std::vector<std::pair<std::filesystem::path, card::ModelCard>> cards;
    std::vector<gate::PullRequestContext> pr_contexts;
    std::vector<IngestError> errors;      // collected, not thrown
    std::vector<std::string> warnings;    // e.g. missing trace/ directory
};

// Aggregates the loaders over a repository checkout: trace items from
// <root>/trace/, cards from files named modelcard.json anywhere under
// root, PR snapshots from <root>/pr/*.json. Collects all errors instead
// of failing fast.
RepoSnapshot scan_repo(const std::filesystem::path& root, const gate::GateConfig& config);

}  // namespace designctl::ingest
