#pragma once

#include <string>
#include <utility>
#include <vector>

namespace wsv {

/// Outcome of one inequality check: lhs <= rhs (up to the check's own slack).
struct CheckRecord {
    std::string name;
    double lhs;
    double rhs;
    bool pass;
    std::vector<std::pair<std::string, double>> constants;
};

}  // namespace wsv
