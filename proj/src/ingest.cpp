#include "designctl/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace designctl::ingest {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("ParseError", "cannot open file", path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::string> split_segments(std::string_view s) {
    std::vector<std::string> segments;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t slash = s.find('/', pos);
        if (slash == std::string_view::npos) slash = s.size();
        segments.emplace_back(s.substr(pos, slash - pos));
        pos = slash + 1;
    }
    // collapse a trailing empty segment from "a/b/"
    while (!segments.empty() && segments.back().empty()) segments.pop_back();
    return segments;
}

bool match_segment(std::string_view pattern, std::string_view text) {
    // '*' matches any run of characters within the segment
    std::size_t p = 0, t = 0;
    std::size_t star = std::string_view::npos, star_t = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            star_t = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++star_t;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

bool match_from(const std::vector<std::string>& pattern, std::size_t pi,
                const std::vector<std::string>& path, std::size_t ti) {
    if (pi == pattern.size()) return ti == path.size();
    if (pattern[pi] == "**") {
        // zero or more whole segments
        if (match_from(pattern, pi + 1, path, ti)) return true;
        return ti < path.size() && match_from(pattern, pi, path, ti + 1);
    }
    if (ti == path.size()) return false;
    return match_segment(pattern[pi], path[ti]) && match_from(pattern, pi + 1, path, ti + 1);
}

trace::Link link_from_yaml(const YAML::Node& node, const std::string& where) {
    if (!node.IsMap() || !node["rel"] || !node["target"]) {
        throw Error("ParseError", "link must be a map with rel and target", where);
    }
    trace::Link link;
    link.rel = trace::relation_from_string(node["rel"].as<std::string>());
    link.target = node["target"].as<std::string>();
    return link;
}

trace::TraceItem item_from_yaml(const YAML::Node& node, const std::string& where) {
    if (!node.IsMap()) throw Error("ParseError", "front matter must be a mapping", where);
    if (!node["id"] || !node["kind"]) {
        throw Error("ParseError", "trace item requires id and kind", where);
    }
    trace::TraceItem item;
    item.id = node["id"].as<std::string>();
    item.kind = trace::item_kind_from_string(node["kind"].as<std::string>());
    if (node["level"]) item.level = trace::level_from_string(node["level"].as<std::string>());
    if (node["title"]) item.title = node["title"].as<std::string>();
    if (node["links"]) {
        if (!node["links"].IsSequence()) {
            throw Error("ParseError", "links must be a sequence", where);
        }
        for (const auto& link : node["links"]) {
            item.links.push_back(link_from_yaml(link, where));
        }
    }
    return item;
}

trace::Link link_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("rel") || !j.contains("target")) {
        throw Error("ParseError", "link must be an object with rel and target", where);
    }
    trace::Link link;
    link.rel = trace::relation_from_string(j["rel"].get<std::string>());
    link.target = j["target"].get<std::string>();
    return link;
}

// One file -> items. *.md carries a single YAML front-matter block; *.json
// carries an array of items.
std::vector<trace::TraceItem> parse_trace_file(const fs::path& path) {
    const std::string where = path.string();
    const std::string content = read_file(path);
    std::vector<trace::TraceItem> items;
    if (path.extension() == ".md") {
        if (content.rfind("---", 0) != 0) {
            throw Error("ParseError", "expected YAML front matter starting with ---", where);
        }
        std::size_t start = content.find('\n');
        if (start == std::string::npos) {
            throw Error("ParseError", "unterminated front matter", where);
        }
        std::size_t end = content.find("\n---", start);
        if (end == std::string::npos) {
            throw Error("ParseError", "unterminated front matter", where);
        }
        std::string block = content.substr(start + 1, end - start - 1);
        try {
            items.push_back(item_from_yaml(YAML::Load(block), where));
        } catch (const YAML::Exception& e) {
            throw Error("ParseError", std::string("front matter: ") + e.what(), where);
        }
    } else {
        json doc = parse_json(content, where);
        if (!doc.is_array()) {
            throw Error("ParseError", "trace export must be a JSON array", where);
        }
        auto parsed = trace_items_from_json(doc, where);
        items.insert(items.end(), std::make_move_iterator(parsed.begin()),
                     std::make_move_iterator(parsed.end()));
    }
    return items;
}

std::vector<fs::path> collect_trace_files(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension();
        if (ext == ".md" || ext == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view path) {
    return match_from(split_segments(pattern), 0, split_segments(path), 0);
}

trace::TraceItem trace_item_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("id") || !j.contains("kind")) {
        throw Error("ParseError", "trace item requires id and kind", where);
    }
    trace::TraceItem item;
    item.id = j["id"].get<std::string>();
    item.kind = trace::item_kind_from_string(j["kind"].get<std::string>());
    if (j.contains("level") && !j["level"].is_null()) {
        item.level = trace::level_from_string(j["level"].get<std::string>());
    }
    if (j.contains("title")) item.title = j["title"].get<std::string>();
    if (j.contains("links")) {
        for (const auto& link : j["links"]) {
            item.links.push_back(link_from_json(link, where));
        }
    }
    return item;
}

std::vector<trace::TraceItem> trace_items_from_json(const json& array,
                                                    const std::string& where) {
    if (!array.is_array()) throw Error("ParseError", "expected a JSON array", where);
    std::vector<trace::TraceItem> items;
    items.reserve(array.size());
    for (std::size_t i = 0; i < array.size(); ++i) {
        items.push_back(trace_item_from_json(array[i], where + "[" + std::to_string(i) + "]"));
    }
    return items;
}

json trace_items_to_json(const std::vector<trace::TraceItem>& items) {
    json out = json::array();
    for (const auto& item : items) {
        json links = json::array();
        for (const auto& link : item.links) {
            links.push_back({{"rel", std::string(trace::to_string(link.rel))},
                             {"target", link.target}});
        }
        json j{{"id", item.id},
               {"kind", std::string(trace::to_string(item.kind))},
               {"title", item.title},
               {"links", std::move(links)}};
        if (item.level) j["level"] = std::string(trace::to_string(*item.level));
        out.push_back(std::move(j));
    }
    return out;
}

std::vector<trace::TraceItem> load_trace_items(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw Error("ParseError", "trace directory does not exist", dir.string());
    }
    std::vector<trace::TraceItem> items;
    std::map<std::string, std::string> origin;  // id -> file
    for (const auto& path : collect_trace_files(dir)) {
        for (auto& item : parse_trace_file(path)) {
            auto [it, inserted] = origin.emplace(item.id, path.string());
            if (!inserted) {
                throw Error("DuplicateId",
                            "id '" + item.id + "' defined in both " + it->second + " and " +
                                path.string(),
                            item.id);
            }
            items.push_back(std::move(item));
        }
    }
    std::sort(items.begin(), items.end(),
              [](const trace::TraceItem& a, const trace::TraceItem& b) { return a.id < b.id; });
    return items;
}

gate::PullRequestContext load_pr_context(const fs::path& path, const gate::GateConfig& config) {
    const std::string where = path.string();
    json doc = parse_json(read_file(path), where);
    if (!doc.is_object()) throw Error("SchemaViolation", "snapshot must be an object", where);

    auto need = [&](const char* key) -> const json& {
        auto it = doc.find(key);
        if (it == doc.end()) {
            throw Error("SchemaViolation", std::string("snapshot missing '") + key + "'",
                        where + ":" + key);
        }
        return *it;
    };

    gate::PullRequestContext ctx;
    ctx.pr_id = need("pr_id").get<std::string>();
    if (ctx.pr_id.empty()) throw Error("SchemaViolation", "pr_id must be non-empty", where);
    ctx.phase = gate::phase_from_string(need("phase").get<std::string>());
    for (const auto& id : need("linked_requirements")) {
        ctx.linked_requirements.push_back(id.get<std::string>());
    }
    for (const auto& p : need("changed_paths")) {
        ctx.changed_paths.push_back(p.get<std::string>());
    }
    for (const auto& t : need("test_results")) {
        if (!t.is_object() || !t.contains("test_case_id") || !t.contains("status")) {
            throw Error("SchemaViolation", "test result requires test_case_id and status",
                        where);
        }
        const std::string status = t["status"].get<std::string>();
        if (status != "pass" && status != "fail") {
            throw Error("SchemaViolation", "test status must be pass or fail", where);
        }
        ctx.test_results.push_back({t["test_case_id"].get<std::string>(), status == "pass"});
    }
    for (const auto& a : need("approvals")) {
        if (!a.is_object() || !a.contains("reviewer") || !a.contains("role")) {
            throw Error("SchemaViolation", "approval requires reviewer and role", where);
        }
        ctx.approvals.push_back({a["reviewer"].get<std::string>(),
                                 gate::role_from_string(a["role"].get<std::string>())});
    }

    const fs::path base = path.parent_path();
    if (auto it = doc.find("card_old_path"); it != doc.end() && !it->is_null()) {
        ctx.card_old = card::parse_card(read_file(base / it->get<std::string>()));
    }
    if (auto it = doc.find("card_new_path"); it != doc.end() && !it->is_null()) {
        ctx.card_new = card::parse_card(read_file(base / it->get<std::string>()));
    }

    ctx.model_artifact_changed =
        std::any_of(ctx.changed_paths.begin(), ctx.changed_paths.end(),
                    [&](const std::string& changed) {
                        return std::any_of(config.model_path_globs.begin(),
                                           config.model_path_globs.end(),
                                           [&](const std::string& pattern) {
                                               return glob_match(pattern, changed);
                                           });
                    });
    return ctx;
}

RepoSnapshot scan_repo(const fs::path& root, const gate::GateConfig& config) {
    if (!fs::is_directory(root)) {
        throw Error("ParseError", "repository root does not exist", root.string());
    }
    RepoSnapshot snapshot;
    snapshot.root = root;

    const fs::path trace_dir = root / "trace";
    if (fs::is_directory(trace_dir)) {
        std::map<std::string, std::string> origin;
        for (const auto& path : collect_trace_files(trace_dir)) {
            try {
                for (auto& item : parse_trace_file(path)) {
                    auto [it, inserted] = origin.emplace(item.id, path.string());
                    if (!inserted) {
                        snapshot.errors.push_back(
                            {path.string(), "duplicate trace item id '" + item.id +
                                                "' (first defined in " + it->second + ")"});
                        continue;
                    }
                    snapshot.trace_items.push_back(std::move(item));
                }
            } catch (const Error& e) {
                snapshot.errors.push_back({path.string(), e.what()});
            }
        }
        std::sort(snapshot.trace_items.begin(), snapshot.trace_items.end(),
                  [](const trace::TraceItem& a, const trace::TraceItem& b) {
                      return a.id < b.id;
                  });
    } else {
        snapshot.warnings.push_back("no trace/ directory under " + root.string());
    }

    std::vector<fs::path> card_paths;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && entry.path().filename() == "modelcard.json") {
            card_paths.push_back(entry.path());
        }
    }
    std::sort(card_paths.begin(), card_paths.end());
    for (const auto& path : card_paths) {
        try {
            card::ModelCard c = card::parse_card(read_file(path));
            card::ValidationReport report =
                card::validate_card(c, card::Profile::structural);
            if (!report.passed) {
                std::string detail = "card fails structural validation:";
                for (const auto& f : report.findings) {
                    if (f.severity == Severity::error) detail += " " + f.code;
                }
                snapshot.errors.push_back({path.string(), detail});
                continue;
            }
            snapshot.cards.emplace_back(path, std::move(c));
        } catch (const Error& e) {
            snapshot.errors.push_back({path.string(), e.what()});
        }
    }

    const fs::path pr_dir = root / "pr";
    if (fs::is_directory(pr_dir)) {
        std::vector<fs::path> pr_paths;
        for (const auto& entry : fs::directory_iterator(pr_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") {
                pr_paths.push_back(entry.path());
            }
        }
        std::sort(pr_paths.begin(), pr_paths.end());
        for (const auto& path : pr_paths) {
            try {
                snapshot.pr_contexts.push_back(load_pr_context(path, config));
            } catch (const Error& e) {
                snapshot.errors.push_back({path.string(), e.what()});
            }
        }
    }
    return snapshot;
}

}  // namespace designctl::ingest
