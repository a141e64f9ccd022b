#include "cbcw/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "cbcw/error.hpp"

namespace cbcw {

namespace {

constexpr const char* kInactive = "\xc2\xb7";  // centered dot

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  require(file.good(), ErrorCode::Io, "cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(file, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

void check_format_line(const std::vector<std::string>& lines, const std::string& expected,
                       const std::string& path) {
  require(!lines.empty(), ErrorCode::Parse, path + ": empty file");
  require(lines[0] == expected, ErrorCode::Parse,
          path + ": expected format line '" + expected + "', found '" + lines[0] + "'");
}

[[noreturn]] void row_error(const std::string& path, std::size_t row, const std::string& what) {
  fail(ErrorCode::Parse, path + " row " + std::to_string(row) + ": " + what);
}

double parse_double(const std::string& text, const std::string& path, std::size_t row) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) row_error(path, row, "trailing characters in number '" + text + "'");
    return value;
  } catch (const Error&) {
    throw;
  } catch (...) {
    row_error(path, row, "invalid number '" + text + "'");
  }
}

int parse_int(const std::string& text, const std::string& path, std::size_t row) {
  try {
    std::size_t used = 0;
    const int value = std::stoi(text, &used);
    if (used != text.size()) row_error(path, row, "trailing characters in integer '" + text + "'");
    return value;
  } catch (const Error&) {
    throw;
  } catch (...) {
    row_error(path, row, "invalid integer '" + text + "'");
  }
}

}  // namespace

Design load_design(const AttributeCatalog& catalog, const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  check_format_line(lines, "#cbcw-design v1", path);
  require(lines.size() >= 2, ErrorCode::Parse, path + ": missing header row");

  const auto p = static_cast<std::size_t>(catalog.size());
  const std::vector<std::string> header = split_tabs(lines[1]);
  require(header.size() == 2 + 2 * p, ErrorCode::Parse,
          path + ": header must carry id, block and " + std::to_string(2 * p) +
              " level columns for this catalog");
  require(header[0] == "id" && header[1] == "block", ErrorCode::Parse,
          path + ": header must start with 'id<TAB>block'");
  for (std::size_t i = 0; i < p; ++i) {
    const std::string& code = catalog.at(static_cast<int>(i)).code;
    require(header[2 + i] == "A_" + code, ErrorCode::Parse,
            path + ": expected column 'A_" + code + "', found '" + header[2 + i] + "'");
    require(header[2 + p + i] == "B_" + code, ErrorCode::Parse,
            path + ": expected column 'B_" + code + "', found '" + header[2 + p + i] + "'");
  }

  Design design;
  design.n_attributes = catalog.size();
  int strength = -1;
  for (std::size_t row = 2; row < lines.size(); ++row) {
    if (lines[row].empty()) continue;
    const std::vector<std::string> fields = split_tabs(lines[row]);
    if (fields.size() != header.size()) row_error(path, row + 1, "ragged row");
    ChoicePair pair;
    pair.id = fields[0];
    if (fields[1] != "-") pair.block = fields[1];
    pair.a = Profile::hidden(catalog.size());
    pair.b = Profile::hidden(catalog.size());
    int shown = 0;
    for (std::size_t i = 0; i < p; ++i) {
      const std::string& cell_a = fields[2 + i];
      const std::string& cell_b = fields[2 + p + i];
      const bool a_hidden = cell_a == kInactive || cell_a == ".";
      const bool b_hidden = cell_b == kInactive || cell_b == ".";
      if (a_hidden != b_hidden) {
        row_error(path, row + 1,
                  "alternatives disagree on whether attribute '" +
                      catalog.at(static_cast<int>(i)).code + "' is shown");
      }
      if (a_hidden) continue;
      const auto parse_level = [&](const std::string& cell) -> std::uint8_t {
        if (cell == "0") return 0;
        if (cell == "1") return 1;
        row_error(path, row + 1, "level must be 0, 1 or the inactive mark, found '" + cell + "'");
      };
      pair.a.active[i] = pair.b.active[i] = 1;
      pair.a.levels[i] = parse_level(cell_a);
      pair.b.levels[i] = parse_level(cell_b);
      ++shown;
    }
    if (strength == -1) {
      strength = shown;
    } else if (shown != strength) {
      row_error(path, row + 1,
                "pair shows " + std::to_string(shown) + " attributes, expected " +
                    std::to_string(strength));
    }
    design.pairs.push_back(std::move(pair));
  }
  require(!design.pairs.empty(), ErrorCode::Parse, path + ": design has no pairs");
  design.strength = strength;
  try {
    design.validate();
  } catch (const Error& error) {
    fail(ErrorCode::Parse, path + ": " + error.what());
  }
  return design;
}

void save_design(const Design& design, const AttributeCatalog& catalog, const std::string& path) {
  require(catalog.size() == design.n_attributes, ErrorCode::InvalidArgument,
          "catalog does not match the design");
  std::string out = "#cbcw-design v1\nid\tblock";
  for (int i = 0; i < catalog.size(); ++i) out += "\tA_" + catalog.at(i).code;
  for (int i = 0; i < catalog.size(); ++i) out += "\tB_" + catalog.at(i).code;
  out += "\n";
  for (const auto& pair : design.pairs) {
    out += pair.id;
    out += "\t";
    out += pair.block.empty() ? "-" : pair.block;
    const auto emit = [&](const Profile& profile) {
      for (std::size_t i = 0; i < profile.levels.size(); ++i) {
        out += "\t";
        out += profile.active[i] ? (profile.levels[i] ? "1" : "0") : kInactive;
      }
    };
    emit(pair.a);
    emit(pair.b);
    out += "\n";
  }
  write_text_file(path, out);
}

std::vector<Respondent> load_respondents(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  check_format_line(lines, "#cbcw-respondents v1", path);
  require(lines.size() >= 2 && lines[1] == "id\tgender\tage\teducation", ErrorCode::Parse,
          path + ": expected header 'id<TAB>gender<TAB>age<TAB>education'");
  std::vector<Respondent> respondents;
  for (std::size_t row = 2; row < lines.size(); ++row) {
    if (lines[row].empty()) continue;
    const std::vector<std::string> fields = split_tabs(lines[row]);
    if (fields.size() != 4) row_error(path, row + 1, "ragged row");
    Respondent respondent;
    respondent.id = fields[0];
    if (fields[1] == "F") {
      respondent.gender = Gender::Female;
    } else if (fields[1] == "M") {
      respondent.gender = Gender::Male;
    } else {
      row_error(path, row + 1, "gender must be F or M, found '" + fields[1] + "'");
    }
    respondent.age = parse_int(fields[2], path, row + 1);
    if (respondent.age <= 0) row_error(path, row + 1, "age must be positive");
    if (fields[3] == "below10") {
      respondent.education = Education::Below10;
    } else if (fields[3] == "tenthpass") {
      respondent.education = Education::TenthPassOrMore;
    } else {
      row_error(path, row + 1, "education must be below10 or tenthpass, found '" + fields[3] + "'");
    }
    respondents.push_back(std::move(respondent));
  }
  return respondents;
}

void save_respondents(const std::vector<Respondent>& respondents, const std::string& path) {
  std::string out = "#cbcw-respondents v1\nid\tgender\tage\teducation\n";
  for (const auto& respondent : respondents) {
    out += respondent.id;
    out += respondent.gender == Gender::Female ? "\tF\t" : "\tM\t";
    out += std::to_string(respondent.age);
    out += respondent.education == Education::Below10 ? "\tbelow10\n" : "\ttenthpass\n";
  }
  write_text_file(path, out);
}

std::vector<Observation> load_choices(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  check_format_line(lines, "#cbcw-choices v1", path);
  require(lines.size() >= 2 && lines[1] == "respondent\tpair\tchoice", ErrorCode::Parse,
          path + ": expected header 'respondent<TAB>pair<TAB>choice'");
  std::vector<Observation> observations;
  for (std::size_t row = 2; row < lines.size(); ++row) {
    if (lines[row].empty()) continue;
    const std::vector<std::string> fields = split_tabs(lines[row]);
    if (fields.size() != 3) row_error(path, row + 1, "ragged row");
    Observation observation;
    observation.respondent_id = fields[0];
    observation.pair_id = fields[1];
    if (fields[2] == "A") {
      observation.choice = Choice::A;
    } else if (fields[2] == "B") {
      observation.choice = Choice::B;
    } else {
      row_error(path, row + 1, "choice must be A or B, found '" + fields[2] + "'");
    }
    observations.push_back(std::move(observation));
  }
  return observations;
}

void save_choices(const std::vector<Observation>& observations, const std::string& path) {
  std::string out = "#cbcw-choices v1\nrespondent\tpair\tchoice\n";
  for (const auto& observation : observations) {
    out += observation.respondent_id + "\t" + observation.pair_id;
    out += observation.choice == Choice::A ? "\tA\n" : "\tB\n";
  }
  write_text_file(path, out);
}

Dataset load_dataset(const AttributeCatalog& catalog, const std::string& design_path,
                     const std::string& respondents_path, const std::string& choices_path) {
  return make_dataset(catalog, load_design(catalog, design_path),
                      load_respondents(respondents_path), load_choices(choices_path));
}

void save_dataset(const Dataset& dataset, const std::string& respondents_path,
                  const std::string& choices_path) {
  save_respondents(dataset.respondents, respondents_path);
  save_choices(dataset.observations, choices_path);
}

std::vector<std::pair<std::string, double>> load_theta(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  check_format_line(lines, "#cbcw-theta v1", path);
  require(lines.size() >= 2 && lines[1] == "term\tvalue", ErrorCode::Parse,
          path + ": expected header 'term<TAB>value'");
  std::vector<std::pair<std::string, double>> values;
  std::unordered_set<std::string> seen;
  for (std::size_t row = 2; row < lines.size(); ++row) {
    if (lines[row].empty()) continue;
    const std::vector<std::string> fields = split_tabs(lines[row]);
    if (fields.size() != 2) row_error(path, row + 1, "ragged row");
    if (!seen.insert(fields[0]).second) row_error(path, row + 1, "duplicate term '" + fields[0] + "'");
    values.emplace_back(fields[0], parse_double(fields[1], path, row + 1));
  }
  require(!values.empty(), ErrorCode::Parse, path + ": no coefficients");
  return values;
}

std::pair<ModelSpec, std::vector<double>> theta_from_terms(
    const AttributeCatalog& catalog,
    const std::vector<std::pair<std::string, double>>& named_values) {
  std::vector<std::string> names;
  names.reserve(named_values.size());
  for (const auto& [name, value] : named_values) names.push_back(name);
  const ModelSpec spec = spec_from_terms(catalog, names);

  std::vector<double> theta(static_cast<std::size_t>(spec.term_count()), 0.0);
  for (const auto& [name, value] : named_values) {
    bool placed = false;
    for (int t = 0; t < spec.term_count(); ++t) {
      if (spec.term_name(catalog, t) == name) {
        theta[static_cast<std::size_t>(t)] = value;
        placed = true;
        break;
      }
    }
    // Interactions may name their attributes in either order.
    if (!placed) {
      const auto star = name.find('*');
      require(star != std::string::npos, ErrorCode::Internal, "unplaced term '" + name + "'");
      const std::string flipped = name.substr(star + 1) + "*" + name.substr(0, star);
      for (int t = 0; t < spec.term_count(); ++t) {
        if (spec.term_name(catalog, t) == flipped) {
          theta[static_cast<std::size_t>(t)] = value;
          placed = true;
          break;
        }
      }
    }
    require(placed, ErrorCode::Internal, "unplaced term '" + name + "'");
  }
  return {spec, std::move(theta)};
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  require(file.good(), ErrorCode::Io, "cannot open '" + path + "' for writing");
  file << content;
  file.flush();
  require(file.good(), ErrorCode::Io, "failed writing '" + path + "'");
}

}  // namespace cbcw
