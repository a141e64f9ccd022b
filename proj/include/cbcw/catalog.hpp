#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cbcw {

// Dimension head an attribute belongs to.
enum class Head { Health, Education, StandardOfLiving };

const char* head_name(Head head);
Head parse_head(std::string_view name);

struct Attribute {
  std::string code;  // short label, e.g. "N"
  Head head = Head::StandardOfLiving;
};

// Ordered set of two-level attributes. Indices into the catalog are the
// attribute identifiers used everywhere else.
class AttributeCatalog {
 public:
  explicit AttributeCatalog(std::vector<Attribute> attributes);

  int size() const { return static_cast<int>(attributes_.size()); }
  const Attribute& at(int index) const;
  const std::vector<Attribute>& attributes() const { return attributes_; }

  // Returns -1 when the code is unknown.
  int index_of(std::string_view code) const;

 private:
  std::vector<Attribute> attributes_;
};

// The 11 two-level poverty indicators with their dimension heads.
AttributeCatalog mpi_catalog();

// n generic attributes X01..Xnn, heads cycling over the three dimensions.
AttributeCatalog generic_catalog(int n);

}  // namespace cbcw
