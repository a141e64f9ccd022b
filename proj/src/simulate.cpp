#include "cbcw/simulate.hpp"

#include <unordered_map>

#include "cbcw/error.hpp"
#include "cbcw/rng.hpp"

namespace cbcw {

Dataset simulate_population(const AttributeCatalog& catalog, const Design& blocked_design,
                            std::span<const double> theta, const ModelSpec& spec,
                            const std::array<int, kCellCount>& cell_counts, std::uint64_t seed) {
  require(catalog.size() == blocked_design.n_attributes, ErrorCode::InvalidArgument,
          "catalog does not match the design");
  blocked_design.validate();
  spec.validate_for(catalog.size());
  for (int count : cell_counts) {
    require(count > 0, ErrorCode::InvalidArgument, "cell counts must be positive");
  }

  const std::vector<std::string> labels = block_labels(blocked_design);
  require(!labels.empty(), ErrorCode::InvalidArgument, "simulation needs a blocked design");
  for (const auto& pair : blocked_design.pairs) {
    require(!pair.block.empty(), ErrorCode::InvalidArgument,
            "pair '" + pair.id + "' has no block label");
  }
  std::unordered_map<std::string, std::vector<const ChoicePair*>> pairs_of_block;
  for (const auto& pair : blocked_design.pairs) pairs_of_block[pair.block].push_back(&pair);

  Rng rng(seed);
  std::vector<Respondent> respondents;
  std::vector<Observation> observations;
  int serial = 0;
  for (int c = 0; c < kCellCount; ++c) {
    const Cell cell = cell_from_index(c);
    for (int k = 0; k < cell_counts[static_cast<std::size_t>(c)]; ++k) {
      Respondent respondent;
      std::string number = std::to_string(++serial);
      respondent.id = "s" + std::string(number.size() < 4 ? 4 - number.size() : 0, '0') + number;
      respondent.gender = cell.gender;
      respondent.age = cell.age_side == AgeSide::AtMost40 ? 25 + (k % 4) * 5 : 45 + (k % 4) * 5;
      respondent.education = cell.education;

      const std::string& block = labels[static_cast<std::size_t>(serial - 1) % labels.size()];
      for (const ChoicePair* pair : pairs_of_block[block]) {
        observations.push_back({respondent.id, pair->id, sample_choice(*pair, theta, spec, rng)});
      }
      respondents.push_back(std::move(respondent));
    }
  }
  return make_dataset(catalog, blocked_design, std::move(respondents), std::move(observations));
}

}  // namespace cbcw
