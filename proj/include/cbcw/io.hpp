#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cbcw/dataset.hpp"

namespace cbcw {

// The TSV formats all start with a version line:
//   #cbcw-design v1       id, block, then A_<code> / B_<code> columns with
//                         levels 0/1 and a centered dot for hidden attributes
//   #cbcw-respondents v1  id, gender (F/M), age, education (below10/tenthpass)
//   #cbcw-choices v1      respondent, pair, choice (A/B)
//   #cbcw-theta v1        term, value
// Layout details live in the README.

Design load_design(const AttributeCatalog& catalog, const std::string& path);
void save_design(const Design& design, const AttributeCatalog& catalog, const std::string& path);

std::vector<Respondent> load_respondents(const std::string& path);
void save_respondents(const std::vector<Respondent>& respondents, const std::string& path);

std::vector<Observation> load_choices(const std::string& path);
void save_choices(const std::vector<Observation>& observations, const std::string& path);

Dataset load_dataset(const AttributeCatalog& catalog, const std::string& design_path,
                     const std::string& respondents_path, const std::string& choices_path);
void save_dataset(const Dataset& dataset, const std::string& respondents_path,
                  const std::string& choices_path);

// Named coefficients, e.g. {"N", 1.2} or {"N*MH", 2.3}.
std::vector<std::pair<std::string, double>> load_theta(const std::string& path);

// Spec plus aligned coefficient vector from named values.
std::pair<ModelSpec, std::vector<double>> theta_from_terms(
    const AttributeCatalog& catalog,
    const std::vector<std::pair<std::string, double>>& named_values);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace cbcw
