#include "designctl/common.hpp"

namespace designctl {

namespace {
std::string format_what(const std::string& code, const std::string& message,
                        const std::string& where) {
    std::string s = code;
    s += ": ";
    s += message;
    if (!where.empty()) {
        s += " (at ";
        s += where;
        s += ")";
    }
    return s;
}
}  // namespace

Error::Error(std::string code, const std::string& message, std::string where)
    : std::runtime_error(format_what(code, message, where)),
      code_(std::move(code)),
      where_(std::move(where)) {}

std::string_view to_string(Severity s) {
    return s == Severity::error ? "error" : "warning";
}

Severity severity_from_string(std::string_view s) {
    if (s == "error") return Severity::error;
    if (s == "warning") return Severity::warning;
    throw Error("SchemaViolation", "unknown severity '" + std::string(s) + "'");
}

}  // namespace designctl
