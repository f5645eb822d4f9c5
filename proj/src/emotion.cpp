#include "gsr/emotion.hpp"

#include "gsr/error.hpp"

#include <algorithm>
#include <cctype>

namespace gsr {

namespace {

constexpr std::array<std::string_view, kNumLabels> kIds{"happiness", "grief", "fear", "anger", "calm"};
constexpr std::array<std::string_view, kNumLabels> kNames{"Happiness", "Grief", "Fear", "Anger", "Calm"};

}  // namespace

std::string_view to_string(EmotionLabel label) noexcept { return kIds[label_index(label)]; }

std::string_view display_name(EmotionLabel label) noexcept { return kNames[label_index(label)]; }

EmotionLabel parse_label(std::string_view text) {
    std::string lowered(text);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (std::size_t i = 0; i < kNumLabels; ++i) {
        if (lowered == kIds[i]) {
            return kAllLabels[i];
        }
    }
    throw ValidationError("dataset_io", "unknown emotion label '" + std::string(text) + "'");
}

}  // namespace gsr
