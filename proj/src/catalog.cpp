#include "cbcw/catalog.hpp"

#include <unordered_set>

#include "cbcw/error.hpp"

namespace cbcw {

const char* head_name(Head head) {
  switch (head) {
    case Head::Health:
      return "health";
    case Head::Education:
      return "education";
    case Head::StandardOfLiving:
      return "living";
  }
  return "living";
}

Head parse_head(std::string_view name) {
  if (name == "health") return Head::Health;
  if (name == "education") return Head::Education;
  if (name == "living") return Head::StandardOfLiving;
  fail(ErrorCode::InvalidArgument, "unknown dimension head '" + std::string(name) +
                                       "' (expected health, education or living)");
}

AttributeCatalog::AttributeCatalog(std::vector<Attribute> attributes)
    : attributes_(std::move(attributes)) {
  require(attributes_.size() >= 2, ErrorCode::InvalidArgument,
          "catalog needs at least 2 attributes");
  std::unordered_set<std::string> seen;
  for (const auto& attribute : attributes_) {
    require(!attribute.code.empty(), ErrorCode::InvalidArgument, "empty attribute code");
    require(seen.insert(attribute.code).second, ErrorCode::InvalidArgument,
            "duplicate attribute code '" + attribute.code + "'");
  }
}

const Attribute& AttributeCatalog::at(int index) const {
  require(index >= 0 && index < size(), ErrorCode::InvalidArgument,
          "attribute index out of range");
  return attributes_[static_cast<std::size_t>(index)];
}

int AttributeCatalog::index_of(std::string_view code) const {
  for (int i = 0; i < size(); ++i) {
    if (attributes_[static_cast<std::size_t>(i)].code == code) return i;
  }
  return -1;
}

AttributeCatalog mpi_catalog() {
  return AttributeCatalog({
      {"N", Head::Health},            // nutrition
      {"CAM", Head::Health},          // child & adolescent mortality
      {"YS", Head::Education},        // years of schooling
      {"SA", Head::Education},        // school attendance
      {"CF", Head::StandardOfLiving},  // cooking fuel
      {"H", Head::StandardOfLiving},   // housing
      {"S", Head::StandardOfLiving},   // sanitation
      {"MH", Head::Health},            // maternal health
      {"A", Head::StandardOfLiving},   // assets
      {"DW", Head::StandardOfLiving},  // drinking water
      {"E", Head::StandardOfLiving},   // electricity
  });
}

AttributeCatalog generic_catalog(int n) {
  require(n >= 2, ErrorCode::InvalidArgument, "generic catalog needs at least 2 attributes");
  std::vector<Attribute> attributes;
  attributes.reserve(static_cast<std::size_t>(n));
  constexpr Head heads[] = {Head::Health, Head::Education, Head::StandardOfLiving};
  for (int i = 0; i < n; ++i) {
    std::string code = "X";
    if (i + 1 < 10) code += '0';
    code += std::to_string(i + 1);
    attributes.push_back({std::move(code), heads[i % 3]});
  }
  return AttributeCatalog(std::move(attributes));
}

}  // namespace cbcw
