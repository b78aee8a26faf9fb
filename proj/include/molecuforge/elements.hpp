#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

namespace molecuforge {

struct ElementSpec {
    std::string_view symbol;
    int valency;                  // maximum number of single bonds
    double covalent_radius;       // Å
    std::array<double, 3> display_color;  // RGB in [0, 1]
    double display_radius;        // Å
};

/// Looks up the shipped element table. Throws Error(UnknownElement).
const ElementSpec& element_spec(std::string_view symbol);

/// All shipped elements, in table order.
std::span<const ElementSpec> element_table();

}  // namespace molecuforge
