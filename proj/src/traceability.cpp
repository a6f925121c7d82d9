#include "designctl/traceability.hpp"

#include <algorithm>
#include <deque>

namespace designctl::trace {

namespace {

std::size_t rel_index(Relation r) { return static_cast<std::size_t>(r); }

// system outranks item outranks unit
int level_rank(Level l) {
    switch (l) {
        case Level::system: return 3;
        case Level::item: return 2;
        case Level::unit: return 1;
    }
    return 0;
}

bool relation_legal(ItemKind source, Relation rel, ItemKind target) {
    switch (rel) {
        case Relation::decomposes_to:
            return (source == ItemKind::user_need || source == ItemKind::requirement) &&
                   target == ItemKind::requirement;
        case Relation::resolved_by:
            return source == ItemKind::requirement && target == ItemKind::change_request;
        case Relation::verified_by:
            return source == ItemKind::change_request && target == ItemKind::test_case;
        case Relation::maps_to:
            return source == ItemKind::requirement && target == ItemKind::software_element;
        case Relation::parent_of:
            return source == ItemKind::software_element && target == ItemKind::software_element;
    }
    return false;
}

// Iterative DFS cycle search; returns one cycle path for the message.
std::vector<std::string> find_cycle(
    const std::map<std::string, std::vector<std::string>>& adjacency) {
    enum class Mark { unseen, active, done };
    std::map<std::string, Mark> marks;
    for (const auto& [id, targets] : adjacency) {
        (void)targets;
        marks.emplace(id, Mark::unseen);
    }
    for (const auto& [start, targets] : adjacency) {
        (void)targets;
        if (marks[start] != Mark::unseen) continue;
        std::vector<std::pair<std::string, std::size_t>> stack{{start, 0}};
        marks[start] = Mark::active;
        while (!stack.empty()) {
            auto& [id, next] = stack.back();
            auto it = adjacency.find(id);
            if (it == adjacency.end() || next >= it->second.size()) {
                marks[id] = Mark::done;
                stack.pop_back();
                continue;
            }
            const std::string& target = it->second[next++];
            auto mark = marks.find(target);
            if (mark == marks.end() || mark->second == Mark::done) continue;
            if (mark->second == Mark::active) {
                std::vector<std::string> cycle;
                auto frame = std::find_if(stack.begin(), stack.end(),
                                          [&](const auto& f) { return f.first == target; });
                for (; frame != stack.end(); ++frame) cycle.push_back(frame->first);
                cycle.push_back(target);
                return cycle;
            }
            mark->second = Mark::active;
            stack.emplace_back(target, 0);
        }
    }
    return {};
}

std::string join_path(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) out += " -> ";
        out += id;
    }
    return out;
}

}  // namespace

std::string_view to_string(ItemKind k) {
    switch (k) {
        case ItemKind::user_need: return "user_need";
        case ItemKind::requirement: return "requirement";
        case ItemKind::change_request: return "change_request";
        case ItemKind::test_case: return "test_case";
        case ItemKind::software_element: return "software_element";
    }
    return "requirement";
}

ItemKind item_kind_from_string(std::string_view s) {
    if (s == "user_need") return ItemKind::user_need;
    if (s == "requirement") return ItemKind::requirement;
    if (s == "change_request") return ItemKind::change_request;
    if (s == "test_case") return ItemKind::test_case;
    if (s == "software_element") return ItemKind::software_element;
    throw Error("SchemaViolation", "unknown item kind '" + std::string(s) + "'");
}

std::string_view to_string(Level l) {
    switch (l) {
        case Level::system: return "system";
        case Level::item: return "item";
        case Level::unit: return "unit";
    }
    return "unit";
}

Level level_from_string(std::string_view s) {
    if (s == "system") return Level::system;
    if (s == "item") return Level::item;
    if (s == "unit") return Level::unit;
    throw Error("SchemaViolation", "unknown level '" + std::string(s) + "'");
}

std::string_view to_string(Relation r) {
    switch (r) {
        case Relation::decomposes_to: return "decomposes_to";
        case Relation::resolved_by: return "resolved_by";
        case Relation::verified_by: return "verified_by";
        case Relation::maps_to: return "maps_to";
        case Relation::parent_of: return "parent_of";
    }
    return "decomposes_to";
}

Relation relation_from_string(std::string_view s) {
    if (s == "decomposes_to") return Relation::decomposes_to;
    if (s == "resolved_by") return Relation::resolved_by;
    if (s == "verified_by") return Relation::verified_by;
    if (s == "maps_to") return Relation::maps_to;
    if (s == "parent_of") return Relation::parent_of;
    throw Error("SchemaViolation", "unknown relation '" + std::string(s) + "'");
}

json findings_to_json(const std::vector<Finding>& findings) {
    json out = json::array();
    for (const auto& f : findings) {
        out.push_back({{"code", f.code},
                       {"severity", std::string(designctl::to_string(f.severity))},
                       {"subject", f.subject},
                       {"message", f.message}});
    }
    return out;
}

const TraceItem* TraceGraph::find(const std::string& id) const {
    auto it = items_.find(id);
    return it == items_.end() ? nullptr : &it->second;
}

const std::vector<std::string>& TraceGraph::out(const std::string& id, Relation rel) const {
    static const std::vector<std::string> empty;
    const auto& m = out_[rel_index(rel)];
    auto it = m.find(id);
    return it == m.end() ? empty : it->second;
}

const std::vector<std::string>& TraceGraph::in(const std::string& id, Relation rel) const {
    static const std::vector<std::string> empty;
    const auto& m = in_[rel_index(rel)];
    auto it = m.find(id);
    return it == m.end() ? empty : it->second;
}

TraceGraph build_graph(std::vector<TraceItem> items) {
    TraceGraph g;
    for (auto& item : items) {
        if (item.id.empty()) {
            throw Error("InvalidItem", "trace item with empty id");
        }
        const bool is_element = item.kind == ItemKind::software_element;
        if (is_element && !item.level) {
            throw Error("InvalidItem", "software_element requires a level", item.id);
        }
        if (!is_element && item.level) {
            throw Error("InvalidItem", "level is only legal on software_element", item.id);
        }
        std::string id = item.id;
        if (!g.items_.emplace(id, std::move(item)).second) {
            throw Error("DuplicateId", "duplicate trace item id '" + id + "'", id);
        }
    }

    for (const auto& [id, item] : g.items_) {
        for (const auto& link : item.links) {
            auto target = g.items_.find(link.target);
            if (target == g.items_.end()) {
                throw Error("DanglingLink",
                            "link " + id + " -" + std::string(to_string(link.rel)) + "-> " +
                                link.target + " targets a missing item",
                            id);
            }
            if (!relation_legal(item.kind, link.rel, target->second.kind)) {
                throw Error("IllegalRelation",
                            std::string(to_string(item.kind)) + " -" +
                                std::string(to_string(link.rel)) + "-> " +
                                std::string(to_string(target->second.kind)) + " is not legal",
                            id);
            }
            g.out_[rel_index(link.rel)][id].push_back(link.target);
            g.in_[rel_index(link.rel)][link.target].push_back(id);
        }
    }
    for (auto& per_rel : g.out_) {
        for (auto& [id, targets] : per_rel) {
            (void)id;
            std::sort(targets.begin(), targets.end());
            targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
        }
    }
    for (auto& per_rel : g.in_) {
        for (auto& [id, sources] : per_rel) {
            (void)id;
            std::sort(sources.begin(), sources.end());
            sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
        }
    }

    for (Relation rel : {Relation::decomposes_to, Relation::parent_of}) {
        auto cycle = find_cycle(g.out_[rel_index(rel)]);
        if (!cycle.empty()) {
            throw Error("CycleDetected",
                        std::string(to_string(rel)) + " cycle: " + join_path(cycle),
                        cycle.front());
        }
    }
    return g;
}

std::vector<Finding> check_completeness(const TraceGraph& graph) {
    std::vector<Finding> findings;
    for (const auto& [id, item] : graph.items()) {
        switch (item.kind) {
            case ItemKind::requirement: {
                const bool leaf = graph.out(id, Relation::decomposes_to).empty();
                const auto& change_requests = graph.out(id, Relation::resolved_by);
                if (leaf && change_requests.empty()) {
                    findings.push_back({"REQ_UNRESOLVED", Severity::error, id,
                                        "requirement has no resolving change request"});
                }
                if (!change_requests.empty()) {
                    const bool verified =
                        std::any_of(change_requests.begin(), change_requests.end(),
                                    [&](const std::string& cr) {
                                        return !graph.out(cr, Relation::verified_by).empty();
                                    });
                    if (!verified) {
                        findings.push_back({"REQ_UNVERIFIED", Severity::error, id,
                                            "no change request of this requirement is "
                                            "verified by a test case"});
                    }
                }
                if (leaf && graph.out(id, Relation::maps_to).empty()) {
                    findings.push_back({"REQ_UNMAPPED", Severity::error, id,
                                        "requirement maps to no software element"});
                }
                break;
            }
            case ItemKind::user_need:
                if (graph.out(id, Relation::decomposes_to).empty()) {
                    findings.push_back({"NEED_ORPHAN", Severity::warning, id,
                                        "user need decomposes into no requirement"});
                }
                break;
            case ItemKind::software_element:
                if (graph.in(id, Relation::maps_to).empty() &&
                    graph.out(id, Relation::parent_of).empty()) {
                    findings.push_back({"SOFT_ELEM_UNUSED", Severity::warning, id,
                                        "software element is unmapped and childless"});
                }
                break;
            default:
                break;
        }
    }
    return findings;
}

std::vector<Finding> check_decomposition(const TraceGraph& graph) {
    std::vector<Finding> findings;
    for (const auto& [id, item] : graph.items()) {
        if (item.kind != ItemKind::software_element) continue;
        const auto& parents = graph.in(id, Relation::parent_of);
        const auto& children = graph.out(id, Relation::parent_of);
        if (parents.size() > 1) {
            findings.push_back({"DECOMP_NOT_TREE", Severity::error, id,
                                "software element has " + std::to_string(parents.size()) +
                                    " parents"});
        }
        if (parents.empty() && *item.level != Level::system) {
            findings.push_back({"DECOMP_NOT_TREE", Severity::error, id,
                                "decomposition root is level " +
                                    std::string(to_string(*item.level)) + ", not system"});
        }
        if (*item.level == Level::unit && !children.empty()) {
            findings.push_back({"UNIT_HAS_CHILDREN", Severity::error, id,
                                "software unit is decomposed further"});
        }
        for (const auto& child_id : children) {
            const TraceItem* child = graph.find(child_id);
            if (level_rank(*item.level) <= level_rank(*child->level)) {
                findings.push_back({"LEVEL_ORDER", Severity::error, id,
                                    "parent_of edge " + id + " -> " + child_id +
                                        " does not descend the system > item > unit order"});
            }
        }
    }
    return findings;
}

TraceMatrix trace_matrix(const TraceGraph& graph) {
    TraceMatrix matrix;
    for (const auto& [id, item] : graph.items()) {
        if (item.kind != ItemKind::requirement) continue;
        MatrixRow row;
        row.requirement = id;

        // ancestry: walk incoming decomposes_to edges up to user needs
        std::set<std::string> seen{id};
        std::deque<std::string> frontier{id};
        std::set<std::string> needs;
        while (!frontier.empty()) {
            std::string current = frontier.front();
            frontier.pop_front();
            for (const auto& parent : graph.in(current, Relation::decomposes_to)) {
                if (!seen.insert(parent).second) continue;
                if (graph.find(parent)->kind == ItemKind::user_need) {
                    needs.insert(parent);
                } else {
                    frontier.push_back(parent);
                }
            }
        }
        row.user_needs.assign(needs.begin(), needs.end());

        row.change_requests = graph.out(id, Relation::resolved_by);
        std::set<std::string> tests;
        for (const auto& cr : row.change_requests) {
            const auto& verified = graph.out(cr, Relation::verified_by);
            tests.insert(verified.begin(), verified.end());
        }
        row.test_cases.assign(tests.begin(), tests.end());
        row.software_elements = graph.out(id, Relation::maps_to);
        matrix.rows.push_back(std::move(row));
    }
    return matrix;  // items() iterates sorted by id, so rows are sorted
}

json TraceMatrix::to_json() const {
    json out = json::array();
    for (const auto& row : rows) {
        out.push_back({{"requirement", row.requirement},
                       {"user_needs", row.user_needs},
                       {"change_requests", row.change_requests},
                       {"test_cases", row.test_cases},
                       {"software_elements", row.software_elements}});
    }
    return out;
}

std::set<std::string> impact(const TraceGraph& graph, const std::string& id) {
    if (!graph.contains(id)) {
        throw Error("UnknownId", "no trace item '" + id + "'", id);
    }
    std::set<std::string> reached;
    std::deque<std::string> frontier{id};
    while (!frontier.empty()) {
        std::string current = frontier.front();
        frontier.pop_front();
        for (std::size_t r = 0; r < kRelationCount; ++r) {
            auto rel = static_cast<Relation>(r);
            for (const auto& neighbors : {graph.out(current, rel), graph.in(current, rel)}) {
                for (const auto& next : neighbors) {
                    if (next == id || !reached.insert(next).second) continue;
                    frontier.push_back(next);
                }
            }
        }
    }
    return reached;
}

}  // namespace designctl::trace
