#include "molecuforge/elements.hpp"

#include "molecuforge/error.hpp"

namespace molecuforge {

namespace {

// Covalent radii make the default sticks C-C 1.54 Å and C-H 1.09 Å.
constexpr std::array<ElementSpec, 4> kElements{{
    {"C", 4, 0.77, {0.45, 0.45, 0.45}, 0.35},
    {"H", 1, 0.32, {0.95, 0.95, 0.95}, 0.22},
    {"O", 2, 0.66, {0.90, 0.15, 0.15}, 0.32},
    {"N", 3, 0.70, {0.20, 0.30, 0.90}, 0.33},
}};

}  // namespace

const ElementSpec& element_spec(std::string_view symbol) {
    for (const auto& e : kElements) {
        if (e.symbol == symbol) return e;
    }
    throw Error(ErrorCode::UnknownElement, "unknown element '" + std::string(symbol) + "'");
}

std::span<const ElementSpec> element_table() { return kElements; }

}  // namespace molecuforge
