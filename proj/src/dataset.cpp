#include "cbcw/dataset.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "cbcw/error.hpp"

namespace cbcw {

int cell_index(const Cell& cell) {
  return static_cast<int>(cell.gender) * 4 + static_cast<int>(cell.age_side) * 2 +
         static_cast<int>(cell.education);
}

Cell cell_from_index(int index) {
  require(index >= 0 && index < kCellCount, ErrorCode::InvalidArgument, "cell index out of range");
  return Cell{static_cast<Gender>(index / 4), static_cast<AgeSide>((index / 2) % 2),
              static_cast<Education>(index % 2)};
}

Cell cell_of(const Respondent& respondent) {
  return Cell{respondent.gender, respondent.age <= 40 ? AgeSide::AtMost40 : AgeSide::Over40,
              respondent.education};
}

std::string cell_label(const Cell& cell) {
  std::string label = cell.gender == Gender::Female ? "F" : "M";
  label += cell.age_side == AgeSide::AtMost40 ? "/le40" : "/gt40";
  label += cell.education == Education::Below10 ? "/below10" : "/tenthpass";
  return label;
}

bool SegmentFilter::matches(const Respondent& respondent) const {
  if (gender && *gender != respondent.gender) return false;
  if (age_side && *age_side != cell_of(respondent).age_side) return false;
  if (education && *education != respondent.education) return false;
  return true;
}

Dataset make_dataset(AttributeCatalog catalog, Design design, std::vector<Respondent> respondents,
                     std::vector<Observation> observations) {
  require(catalog.size() == design.n_attributes, ErrorCode::InvalidArgument,
          "catalog and design disagree on the attribute count");
  design.validate();

  std::unordered_map<std::string, const ChoicePair*> pair_of;
  for (const auto& pair : design.pairs) pair_of.emplace(pair.id, &pair);

  std::unordered_map<std::string, const Respondent*> respondent_of;
  for (const auto& respondent : respondents) {
    require(!respondent.id.empty(), ErrorCode::InvalidArgument, "empty respondent id");
    require(respondent.age > 0, ErrorCode::InvalidArgument,
            "respondent '" + respondent.id + "' has non-positive age");
    require(respondent_of.emplace(respondent.id, &respondent).second, ErrorCode::InvalidArgument,
            "duplicate respondent id '" + respondent.id + "'");
  }

  std::unordered_set<std::string> seen;
  std::unordered_map<std::string, std::string> block_of_respondent;
  for (const auto& observation : observations) {
    require(respondent_of.count(observation.respondent_id), ErrorCode::InvalidArgument,
            "observation references unknown respondent '" + observation.respondent_id + "'");
    const auto pair_it = pair_of.find(observation.pair_id);
    require(pair_it != pair_of.end(), ErrorCode::InvalidArgument,
            "observation references unknown pair '" + observation.pair_id + "'");
    require(seen.insert(observation.respondent_id + "\t" + observation.pair_id).second,
            ErrorCode::InvalidArgument,
            "duplicate observation for respondent '" + observation.respondent_id + "', pair '" +
                observation.pair_id + "'");
    const std::string& block = pair_it->second->block;
    auto [slot, inserted] = block_of_respondent.emplace(observation.respondent_id, block);
    require(inserted || slot->second == block, ErrorCode::InvalidArgument,
            "respondent '" + observation.respondent_id + "' answers pairs from several blocks");
  }

  return Dataset{std::move(catalog), std::move(design), std::move(respondents),
                 std::move(observations)};
}

Dataset filter_dataset(const Dataset& dataset, const SegmentFilter& filter) {
  Dataset filtered{dataset.catalog, dataset.design, {}, {}};
  std::unordered_set<std::string> kept;
  for (const auto& respondent : dataset.respondents) {
    if (filter.matches(respondent)) {
      kept.insert(respondent.id);
      filtered.respondents.push_back(respondent);
    }
  }
  for (const auto& observation : dataset.observations) {
    if (kept.count(observation.respondent_id)) filtered.observations.push_back(observation);
  }
  return filtered;
}

std::array<int, kCellCount> cell_counts(const Dataset& dataset) {
  std::array<int, kCellCount> counts{};
  for (const auto& respondent : dataset.respondents) {
    counts[static_cast<std::size_t>(cell_index(cell_of(respondent)))] += 1;
  }
  return counts;
}

std::vector<ChoiceObservation> choice_observations(const Dataset& dataset) {
  std::unordered_map<std::string, const ChoicePair*> pair_of;
  for (const auto& pair : dataset.design.pairs) pair_of.emplace(pair.id, &pair);
  std::vector<ChoiceObservation> joined;
  joined.reserve(dataset.observations.size());
  for (const auto& observation : dataset.observations) {
    const auto found = pair_of.find(observation.pair_id);
    require(found != pair_of.end(), ErrorCode::InvalidArgument,
            "observation references unknown pair '" + observation.pair_id + "'");
    joined.push_back({found->second, observation.choice});
  }
  return joined;
}

}  // namespace cbcw
