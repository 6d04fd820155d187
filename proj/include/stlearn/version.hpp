#pragma once

#include <string_view>

namespace stlearn {

inline constexpr std::string_view kVersion = "0.1.0";

// On-disk format versions (dataset manifest, model checkpoint).
inline constexpr int kDatasetFormatVersion = 1;
inline constexpr int kCheckpointFormatVersion = 1;

}  // namespace stlearn
