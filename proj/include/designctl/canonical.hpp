#pragma once

#include <map>
#include <string>
#include <string_view>

#include "designctl/common.hpp"
#include "json.hpp"

namespace designctl {

using json = nlohmann::json;

// Canonical form: UTF-8, object keys sorted lexicographically, no
// insignificant whitespace, numbers in shortest round-trip decimal form.
// nlohmann::json keeps object members in sorted order and its dump()
// emits shortest round-trip numbers, so canonical bytes are parse+dump.

// Throws Error("MalformedJson") on anything json::parse rejects.
json parse_json(std::string_view text, const std::string& where = {});

std::string canonical_dump(const json& value);

// parse + dump in one step.
std::string canonicalize(std::string_view text, const std::string& where = {});

// Flattens a document to selector -> leaf value. Selectors use dotted
// member names with bracketed indices: "model_parameters.data[0].digest".
// Empty objects/arrays count as leaves so {} vs [] vs absent-member all
// compare differently.
std::map<std::string, json> flatten_leaves(const json& value);

// Returns nullptr when the selector does not resolve. A syntactically
// broken selector also resolves to nothing.
const json* resolve_selector(const json& doc, std::string_view selector);

// Removes the addressed member or array element. Returns false when the
// selector does not resolve; the document is left untouched in that case.
bool erase_selector(json& doc, std::string_view selector);

}  // namespace designctl
