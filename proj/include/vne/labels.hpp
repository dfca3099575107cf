#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <string_view>

namespace vne {

inline constexpr std::size_t kLabelCount = 5;

/// Linguistic labels in ascending order.
enum class Label : std::uint8_t { VL = 0, L = 1, M = 2, H = 3, VH = 4 };

inline constexpr std::array<Label, kLabelCount> kLabels{Label::VL, Label::L, Label::M, Label::H,
                                                         Label::VH};

constexpr std::size_t index(Label l) { return static_cast<std::size_t>(l); }

constexpr std::string_view short_name(Label l) {
    constexpr std::array<std::string_view, kLabelCount> names{"VL", "L", "M", "H", "VH"};
    return names[index(l)];
}

constexpr std::string_view long_name(Label l) {
    constexpr std::array<std::string_view, kLabelCount> names{"very low", "low", "medium", "high",
                                                              "very high"};
    return names[index(l)];
}

constexpr std::optional<Label> parse_label(std::string_view s) {
    for (Label l : kLabels) {
        if (short_name(l) == s) return l;
    }
    return std::nullopt;
}

}  // namespace vne
