#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "designctl/canonical.hpp"
#include "designctl/common.hpp"

namespace designctl::trace {

enum class ItemKind { user_need, requirement, change_request, test_case, software_element };
enum class Level { system, item, unit };
enum class Relation { decomposes_to, resolved_by, verified_by, maps_to, parent_of };

inline constexpr std::size_t kRelationCount = 5;

std::string_view to_string(ItemKind k);
ItemKind item_kind_from_string(std::string_view s);
std::string_view to_string(Level l);
Level level_from_string(std::string_view s);
std::string_view to_string(Relation r);
Relation relation_from_string(std::string_view s);

struct Link {
    Relation rel = Relation::decomposes_to;
    std::string target;
};

struct TraceItem {
    std::string id;
    ItemKind kind = ItemKind::requirement;
    std::optional<Level> level;  // present iff kind == software_element
    std::string title;
    std::vector<Link> links;
};

struct Finding {
    std::string code;
    Severity severity = Severity::error;
    std::string subject;
    std::string message;
};

json findings_to_json(const std::vector<Finding>& findings);

// Immutable once built; queries are safe to share across threads.
class TraceGraph {
public:
    const std::map<std::string, TraceItem>& items() const { return items_; }
    bool contains(const std::string& id) const { return items_.count(id) != 0; }
    const TraceItem* find(const std::string& id) const;

    // Outgoing / incoming neighbor ids for one relation, sorted ascending.
    const std::vector<std::string>& out(const std::string& id, Relation rel) const;
    const std::vector<std::string>& in(const std::string& id, Relation rel) const;

private:
    friend TraceGraph build_graph(std::vector<TraceItem> items);

    std::map<std::string, TraceItem> items_;
    std::array<std::map<std::string, std::vector<std::string>>, kRelationCount> out_;
    std::array<std::map<std::string, std::vector<std::string>>, kRelationCount> in_;
};

// Throws Error with codes DuplicateId, DanglingLink, IllegalRelation,
// CycleDetected (decomposes_to / parent_of), InvalidItem (level present
// on a non software_element or missing on one).
TraceGraph build_graph(std::vector<TraceItem> items);

// Finding catalog:
//   REQ_UNRESOLVED   error    leaf requirement without resolved_by
//   REQ_UNVERIFIED   error    requirement whose change requests carry no verified_by
//   REQ_UNMAPPED     error    leaf requirement without maps_to
//   NEED_ORPHAN      warning  user need without decomposes_to
//   SOFT_ELEM_UNUSED warning  software element with no incoming maps_to and no children
std::vector<Finding> check_completeness(const TraceGraph& graph);

//   DECOMP_NOT_TREE   error   parent_of edges not a forest rooted at level=system
//   LEVEL_ORDER       error   parent_of edge to an equal-or-higher level
//   UNIT_HAS_CHILDREN error   level=unit node with parent_of children
std::vector<Finding> check_decomposition(const TraceGraph& graph);

struct MatrixRow {
    std::string requirement;
    std::vector<std::string> user_needs;  // ancestry over decomposes_to
    std::vector<std::string> change_requests;
    std::vector<std::string> test_cases;
    std::vector<std::string> software_elements;
};

struct TraceMatrix {
    std::vector<MatrixRow> rows;  // sorted by requirement id

    json to_json() const;
};

TraceMatrix trace_matrix(const TraceGraph& graph);

// All items reachable from id over any relation, edges undirected,
// excluding id itself. Throws Error("UnknownId").
std::set<std::string> impact(const TraceGraph& graph, const std::string& id);

}  // namespace designctl::trace
