#pragma once

#include <string>
#include <vector>

#include "cbcw/catalog.hpp"
#include "cbcw/design.hpp"
#include "cbcw/model.hpp"

namespace testutil {

// Full-profile pair unless an active mask is given.
inline cbcw::Profile profile(std::vector<int> levels, std::vector<int> active = {}) {
  cbcw::Profile p;
  for (int level : levels) p.levels.push_back(static_cast<std::uint8_t>(level));
  if (active.empty()) {
    p.active.assign(p.levels.size(), 1);
  } else {
    for (int flag : active) p.active.push_back(static_cast<std::uint8_t>(flag));
  }
  return p;
}

inline cbcw::ChoicePair pair(std::string id, std::vector<int> a, std::vector<int> b,
                             std::vector<int> active = {}) {
  cbcw::ChoicePair cp;
  cp.id = std::move(id);
  cp.a = profile(std::move(a), active);
  cp.b = profile(std::move(b), std::move(active));
  return cp;
}

inline cbcw::ModelSpec mains_upto(int p) {
  std::vector<int> all;
  for (int i = 0; i < p; ++i) all.push_back(i);
  return cbcw::ModelSpec::mains(all);
}

inline cbcw::Design design_of(int n_attributes, int strength,
                              std::vector<cbcw::ChoicePair> pairs) {
  cbcw::Design d;
  d.n_attributes = n_attributes;
  d.strength = strength;
  d.pairs = std::move(pairs);
  return d;
}

}  // namespace testutil
