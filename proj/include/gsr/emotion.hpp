#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace gsr {

enum class EmotionLabel : unsigned char { Happiness = 0, Grief = 1, Fear = 2, Anger = 3, Calm = 4 };

inline constexpr std::size_t kNumLabels = 5;

/// Canonical label order used for vote tables, confusion matrices and reports.
inline constexpr std::array<EmotionLabel, kNumLabels> kAllLabels{
    EmotionLabel::Happiness, EmotionLabel::Grief, EmotionLabel::Fear, EmotionLabel::Anger, EmotionLabel::Calm};

[[nodiscard]] constexpr std::size_t label_index(EmotionLabel label) noexcept {
    return static_cast<std::size_t>(label);
}

/// Lower-case identifier used in files ("happiness", "grief", ...).
[[nodiscard]] std::string_view to_string(EmotionLabel label) noexcept;

/// Capitalised name used in report tables.
[[nodiscard]] std::string_view display_name(EmotionLabel label) noexcept;

/// Case-insensitive parse; throws ValidationError for anything but the five labels.
[[nodiscard]] EmotionLabel parse_label(std::string_view text);

}  // namespace gsr
