#include "designctl/canonical.hpp"

#include <charconv>
#include <cstddef>
#include <vector>

namespace designctl {

json parse_json(std::string_view text, const std::string& where) {
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded()) {
        throw Error("MalformedJson", "input is not parseable JSON", where);
    }
    return parsed;
}

std::string canonical_dump(const json& value) {
    // nlohmann::json's object type is std::map, so members are already
    // sorted; dump() without indent emits no insignificant whitespace.
    return value.dump();
}

std::string canonicalize(std::string_view text, const std::string& where) {
    return canonical_dump(parse_json(text, where));
}

namespace {

void flatten_into(const json& value, const std::string& prefix,
                  std::map<std::string, json>& out) {
    if (value.is_object() && !value.empty()) {
        for (const auto& [key, child] : value.items()) {
            flatten_into(child, prefix.empty() ? key : prefix + "." + key, out);
        }
    } else if (value.is_array() && !value.empty()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
            flatten_into(value[i], prefix + "[" + std::to_string(i) + "]", out);
        }
    } else {
        out.emplace(prefix, value);
    }
}

struct SelectorStep {
    std::string member;            // empty for pure index steps
    std::vector<std::size_t> indices;
};

// "a.b[0][1].c" -> [{a,{}}, {b,{0,1}}, {c,{}}]; returns false on syntax
// the grammar does not cover (empty segment, unterminated bracket, ...).
bool parse_selector(std::string_view selector, std::vector<SelectorStep>& steps) {
    if (selector.empty()) return false;
    std::size_t pos = 0;
    while (pos < selector.size()) {
        SelectorStep step;
        std::size_t start = pos;
        while (pos < selector.size() && selector[pos] != '.' && selector[pos] != '[') ++pos;
        step.member = std::string(selector.substr(start, pos - start));
        if (step.member.empty()) return false;
        while (pos < selector.size() && selector[pos] == '[') {
            std::size_t close = selector.find(']', pos);
            if (close == std::string_view::npos || close == pos + 1) return false;
            std::size_t index = 0;
            const char* first = selector.data() + pos + 1;
            const char* last = selector.data() + close;
            auto [ptr, ec] = std::from_chars(first, last, index);
            if (ec != std::errc() || ptr != last) return false;
            step.indices.push_back(index);
            pos = close + 1;
        }
        steps.push_back(std::move(step));
        if (pos < selector.size()) {
            if (selector[pos] != '.') return false;
            ++pos;
            if (pos == selector.size()) return false;  // trailing dot
        }
    }
    return true;
}

}  // namespace

std::map<std::string, json> flatten_leaves(const json& value) {
    std::map<std::string, json> out;
    flatten_into(value, "", out);
    return out;
}

const json* resolve_selector(const json& doc, std::string_view selector) {
    std::vector<SelectorStep> steps;
    if (!parse_selector(selector, steps)) return nullptr;
    const json* node = &doc;
    for (const auto& step : steps) {
        if (!node->is_object()) return nullptr;
        auto it = node->find(step.member);
        if (it == node->end()) return nullptr;
        node = &*it;
        for (std::size_t index : step.indices) {
            if (!node->is_array() || index >= node->size()) return nullptr;
            node = &(*node)[index];
        }
    }
    return node;
}

bool erase_selector(json& doc, std::string_view selector) {
    std::vector<SelectorStep> steps;
    if (!parse_selector(selector, steps)) return false;
    if (resolve_selector(doc, selector) == nullptr) return false;

    json* node = &doc;
    for (std::size_t s = 0; s < steps.size(); ++s) {
        const auto& step = steps[s];
        const bool last_step = s + 1 == steps.size();
        if (step.indices.empty() && last_step) {
            node->erase(step.member);
            return true;
        }
        node = &(*node)[step.member];
        for (std::size_t i = 0; i < step.indices.size(); ++i) {
            const bool last_index = last_step && i + 1 == step.indices.size();
            if (last_index) {
                node->erase(node->begin() + static_cast<json::difference_type>(step.indices[i]));
                return true;
            }
            node = &(*node)[step.indices[i]];
        }
    }
    return false;
}

}  // namespace designctl
