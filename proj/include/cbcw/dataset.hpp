#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbcw/catalog.hpp"
#include "cbcw/design.hpp"
#include "cbcw/model.hpp"

namespace cbcw {

enum class Gender : std::uint8_t { Female, Male };
enum class Education : std::uint8_t { Below10, TenthPassOrMore };
enum class AgeSide : std::uint8_t { AtMost40, Over40 };

struct Respondent {
  std::string id;
  Gender gender = Gender::Female;
  int age = 0;
  Education education = Education::Below10;
};

// One of the 8 gender x age-side x education cells.
struct Cell {
  Gender gender;
  AgeSide age_side;
  Education education;
};

constexpr int kCellCount = 8;

int cell_index(const Cell& cell);
Cell cell_from_index(int index);
// Age 40 falls on the young side.
Cell cell_of(const Respondent& respondent);
std::string cell_label(const Cell& cell);

// Optional restrictions; unset fields match everything.
struct SegmentFilter {
  std::optional<Gender> gender;
  std::optional<AgeSide> age_side;
  std::optional<Education> education;

  bool empty() const { return !gender && !age_side && !education; }
  bool matches(const Respondent& respondent) const;
};

struct Observation {
  std::string respondent_id;
  std::string pair_id;
  Choice choice = Choice::A;
};

// Respondents joined with their per-pair choices over one design.
struct Dataset {
  AttributeCatalog catalog;
  Design design;
  std::vector<Respondent> respondents;
  std::vector<Observation> observations;
};

// Validates referential integrity, uniqueness of (respondent, pair)
// observations and the one-block-per-respondent rule.
Dataset make_dataset(AttributeCatalog catalog, Design design, std::vector<Respondent> respondents,
                     std::vector<Observation> observations);

// Keeps respondents matching the filter together with their observations.
Dataset filter_dataset(const Dataset& dataset, const SegmentFilter& filter);

std::array<int, kCellCount> cell_counts(const Dataset& dataset);

// Observations joined to design pairs; the returned pointers reference the
// dataset's design and stay valid while it lives.
std::vector<ChoiceObservation> choice_observations(const Dataset& dataset);

}  // namespace cbcw
