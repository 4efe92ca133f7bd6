#pragma once

#include <string>
#include <vector>

namespace carleson {

struct ValidationIssue {
    std::string code;    // which invariant failed
    std::string detail;  // witness (points, radii, values)
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const { return issues.empty(); }

    void add(std::string code, std::string detail) {
        issues.push_back({std::move(code), std::move(detail)});
    }

    bool has(const std::string& code) const {
        for (const auto& i : issues)
            if (i.code == code) return true;
        return false;
    }

    std::string str() const {
        std::string s;
        for (const auto& i : issues) {
            s += i.code;
            s += ": ";
            s += i.detail;
            s += '\n';
        }
        return s;
    }
};

}  // namespace carleson
