#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace designctl {

enum class Severity { error, warning };

std::string_view to_string(Severity s);
Severity severity_from_string(std::string_view s);

// Single exception type for the whole toolkit. `code` is a stable
// machine-readable identifier (e.g. "SchemaViolation", "DanglingLink");
// `where` is an optional field selector, item id or file path locating
// the defect.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, std::string where = {});

    const std::string& code() const noexcept { return code_; }
    const std::string& where() const noexcept { return where_; }

private:
    std::string code_;
    std::string where_;
};

}  // namespace designctl
