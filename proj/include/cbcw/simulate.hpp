#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "cbcw/dataset.hpp"

namespace cbcw {

// Synthetic survey: creates `cell_counts[c]` respondents per demographic
// cell, hands each one questionnaire block round-robin, and samples every
// answer from the random-utility model at theta. Fully determined by seed.
// The design must already carry block labels.
Dataset simulate_population(const AttributeCatalog& catalog, const Design& blocked_design,
                            std::span<const double> theta, const ModelSpec& spec,
                            const std::array<int, kCellCount>& cell_counts, std::uint64_t seed);

}  // namespace cbcw
