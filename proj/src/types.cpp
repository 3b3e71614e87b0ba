#include "vibrofdd/types.hpp"

#include "vibrofdd/errors.hpp"

#include <array>

namespace vibrofdd {

namespace {
const std::array<std::string, 3> kClassNames = {
    "structural_looseness",
    "misalignment",
    "bearing_problem",
};
}

const std::string& fault_class_name(FaultClass c) {
    return kClassNames.at(static_cast<std::size_t>(c));
}

std::optional<FaultClass> fault_class_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kClassNames.size(); ++i) {
        if (kClassNames[i] == name) return static_cast<FaultClass>(i);
    }
    return std::nullopt;
}

FaultClass fault_class_from_code(int code) {
    if (code < 0 || code >= kNumClasses) {
        throw DataError("invalid fault class code: " + std::to_string(code));
    }
    return static_cast<FaultClass>(code);
}

bool is_power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace vibrofdd
