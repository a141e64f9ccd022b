// Command-line workbench for paired-comparison conjoint studies. Talks to the
// core exclusively through the shared-library C API (cbcw.h).

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cbcw.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

int exit_code_for(cbcw_status status) {
  switch (status) {
    case CBCW_OK:
      return kExitOk;
    case CBCW_ERR_INVALID_ARGUMENT:
    case CBCW_ERR_PARSE:
    case CBCW_ERR_IO:
      return kExitUsage;
    default:
      return kExitNumeric;
  }
}

struct CliError {
  int code;
};

void check(cbcw_status status) {
  if (status == CBCW_OK) return;
  std::fprintf(stderr, "error: %s\n", cbcw_last_error());
  throw CliError{exit_code_for(status)};
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  explicit Handle(T* p) : ptr(p) {}
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
  Handle& operator=(Handle&& other) noexcept {
    if (this != &other) {
      if (ptr != nullptr) Free(ptr);
      ptr = other.ptr;
      other.ptr = nullptr;
    }
    return *this;
  }
  ~Handle() {
    if (ptr != nullptr) Free(ptr);
  }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using Catalog = Handle<cbcw_catalog, cbcw_catalog_free>;
using DesignHandle = Handle<cbcw_design, cbcw_design_free>;
using DatasetHandle = Handle<cbcw_dataset, cbcw_dataset_free>;
using FitHandle = Handle<cbcw_fit, cbcw_fit_free>;
using PipelineHandle = Handle<cbcw_pipeline, cbcw_pipeline_free>;
using BootstrapHandle = Handle<cbcw_bootstrap, cbcw_bootstrap_free>;
using ReportHandle = Handle<cbcw_report, cbcw_report_free>;

std::string take_string(char* text) {
  std::string owned = text == nullptr ? "" : text;
  cbcw_string_free(text);
  return owned;
}

void write_or_print(const std::string& text, const std::string& out_dir,
                    const std::string& file_name) {
  if (out_dir.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const std::string path = out_dir + "/" + file_name;
  std::FILE* file = std::fopen(path.c_str(), "wb");
  if (file == nullptr) {
    std::fprintf(stderr, "error: cannot open '%s' for writing\n", path.c_str());
    throw CliError{kExitUsage};
  }
  std::fwrite(text.data(), 1, text.size(), file);
  std::fclose(file);
  std::fprintf(stderr, "wrote %s\n", path.c_str());
}

struct GlobalOptions {
  std::uint64_t seed = 1;
  double alpha = 0.05;
  int replicates = 0;  // filled from the library default
  std::string out;
  std::string format = "fixed";

  int format_code() const { return format == "delimited" ? 1 : 0; }
};

struct SegmentOption {
  std::string text;

  // "gender=F,age=le40,edu=below10"; unset fields stay unrestricted.
  cbcw_segment parse() const {
    cbcw_segment segment{-1, -1, -1};
    if (text.empty()) return segment;
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t comma = text.find(',', start);
      const std::string token =
          text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      const std::size_t eq = token.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "error: bad segment token '%s'\n", token.c_str());
        throw CliError{kExitUsage};
      }
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      if (key == "gender" && (value == "F" || value == "M")) {
        segment.gender = value == "F" ? 0 : 1;
      } else if (key == "age" && (value == "le40" || value == "gt40")) {
        segment.age_side = value == "le40" ? 0 : 1;
      } else if (key == "edu" && (value == "below10" || value == "tenthpass")) {
        segment.education = value == "below10" ? 0 : 1;
      } else {
        std::fprintf(stderr, "error: bad segment token '%s'\n", token.c_str());
        throw CliError{kExitUsage};
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return segment;
  }

  bool set() const { return !text.empty(); }
};

Catalog make_catalog(int attributes) {
  Catalog catalog;
  if (attributes == 11) {
    check(cbcw_catalog_mpi(catalog.out()));
  } else {
    check(cbcw_catalog_generic(static_cast<size_t>(attributes), catalog.out()));
  }
  return catalog;
}

DatasetHandle load_dataset(const std::string& design_path, const std::string& respondents_path,
                           const std::string& choices_path) {
  Catalog catalog = make_catalog(11);
  DatasetHandle dataset;
  check(cbcw_dataset_load(catalog.get(), design_path.c_str(), respondents_path.c_str(),
                          choices_path.c_str(), dataset.out()));
  return dataset;
}

std::vector<size_t> parse_cells(const std::string& text) {
  std::vector<size_t> cells;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string token =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      cells.push_back(static_cast<size_t>(std::stoul(token)));
    } catch (...) {
      std::fprintf(stderr, "error: bad cell count '%s'\n", token.c_str());
      throw CliError{kExitUsage};
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (cells.size() != 8) {
    std::fprintf(stderr, "error: --cells needs exactly 8 comma-separated counts\n");
    throw CliError{kExitUsage};
  }
  return cells;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cbcw — workbench for paired-comparison conjoint experiments"};
  app.fallthrough();
  app.require_subcommand(1);

  GlobalOptions global;
  global.replicates = cbcw_default_bootstrap_replicates();
  app.add_option("--seed", global.seed, "random seed (default 1)");
  app.add_option("--alpha", global.alpha, "significance level (default 0.05)");
  app.add_option("--B", global.replicates, "bootstrap replicates (default 10000)");
  app.add_option("--out", global.out, "output file or directory");
  app.add_option("--format", global.format, "table format: fixed or delimited")
      ->check(CLI::IsMember({"fixed", "delimited"}));

  // design ----------------------------------------------------------------
  auto* design_cmd = app.add_subcommand("design", "evaluate and build designs");
  design_cmd->require_subcommand(1);

  std::string design_path;
  std::string theta_path;
  std::string model = "interactions";
  int attributes = 11;
  int strength = 4;
  int pairs = 120;
  int blocks = 5;
  int iterations = 0;
  int restarts = 0;

  auto* eval_cmd = design_cmd->add_subcommand("eval", "report size and D-criterion");
  eval_cmd->add_option("--design", design_path, "design file")->required();
  eval_cmd->add_option("--attributes", attributes, "number of attributes (11 = MPI catalog)");
  eval_cmd->add_option("--model", model, "term set: mains or interactions")
      ->check(CLI::IsMember({"mains", "interactions"}));
  eval_cmd->add_option("--theta", theta_path, "coefficient file for a local criterion");

  auto* generate_cmd = design_cmd->add_subcommand("generate", "search for an efficient design");
  generate_cmd->add_option("--attributes", attributes, "number of attributes (11 = MPI catalog)");
  generate_cmd->add_option("--strength", strength, "attributes shown per pair")->required();
  generate_cmd->add_option("--pairs", pairs, "number of pairs")->required();
  generate_cmd->add_option("--model", model, "optimize for mains or interactions")
      ->check(CLI::IsMember({"mains", "interactions"}));
  generate_cmd->add_option("--iterations", iterations, "exchange proposals per restart");
  generate_cmd->add_option("--restarts", restarts, "number of restarts");

  auto* prune_cmd = design_cmd->add_subcommand("prune", "drop dominated pairs");
  prune_cmd->add_option("--design", design_path, "design file")->required();
  prune_cmd->add_option("--attributes", attributes, "number of attributes (11 = MPI catalog)");

  auto* block_cmd = design_cmd->add_subcommand("block", "split into questionnaire blocks");
  block_cmd->add_option("--design", design_path, "design file")->required();
  block_cmd->add_option("--attributes", attributes, "number of attributes (11 = MPI catalog)");
  block_cmd->add_option("--blocks", blocks, "number of blocks")->required();

  // fit ---------------------------------------------------------------------
  auto* fit_cmd = app.add_subcommand("fit", "maximum-likelihood estimation");
  fit_cmd->require_subcommand(1);

  std::string respondents_path;
  std::string choices_path;
  SegmentOption segment;

  auto* linear_cmd = fit_cmd->add_subcommand("linear", "fit all main effects");
  auto* interactions_cmd =
      fit_cmd->add_subcommand("interactions", "elimination pipeline plus interaction fit");
  for (CLI::App* cmd : {linear_cmd, interactions_cmd}) {
    cmd->add_option("--design", design_path, "design file")->required();
    cmd->add_option("--respondents", respondents_path, "respondents file")->required();
    cmd->add_option("--choices", choices_path, "choices file")->required();
    cmd->add_option("--segment", segment.text,
                    "subgroup filter, e.g. gender=F,age=le40,edu=tenthpass");
  }

  // bootstrap / report --------------------------------------------------------
  auto* bootstrap_cmd = app.add_subcommand("bootstrap", "stratified respondent bootstrap");
  std::string ci_flavor = "basic";
  bootstrap_cmd->add_option("--design", design_path, "design file")->required();
  bootstrap_cmd->add_option("--respondents", respondents_path, "respondents file")->required();
  bootstrap_cmd->add_option("--choices", choices_path, "choices file")->required();
  bootstrap_cmd->add_option("--ci", ci_flavor, "interval flavor: basic or percentile")
      ->check(CLI::IsMember({"basic", "percentile"}));

  auto* report_cmd = app.add_subcommand("report", "complement/substitute interpretation");
  report_cmd->add_option("--design", design_path, "design file")->required();
  report_cmd->add_option("--respondents", respondents_path, "respondents file")->required();
  report_cmd->add_option("--choices", choices_path, "choices file")->required();
  report_cmd->add_option("--segment", segment.text,
                         "subgroup filter, e.g. gender=F,age=le40,edu=tenthpass");

  // simulate ------------------------------------------------------------------
  auto* simulate_cmd = app.add_subcommand("simulate", "synthetic survey from planted coefficients");
  std::string cells_text = "17,50,20,24,17,67,18,58";
  int simulate_blocks = 0;
  simulate_cmd->add_option("--design", design_path, "design file")->required();
  simulate_cmd->add_option("--theta", theta_path, "coefficient file")->required();
  simulate_cmd->add_option("--cells", cells_text, "8 respondents-per-cell counts");
  simulate_cmd->add_option("--blocks", simulate_blocks, "block the design first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (eval_cmd->parsed()) {
      Catalog catalog = make_catalog(attributes);
      DesignHandle design;
      check(cbcw_design_load(catalog.get(), design_path.c_str(), design.out()));
      double criterion = 0.0;
      if (!theta_path.empty()) {
        check(cbcw_design_criterion_at(design.get(), theta_path.c_str(), &criterion));
      } else {
        check(cbcw_design_criterion(design.get(), model == "interactions" ? 1 : 0, &criterion));
      }
      const size_t p = cbcw_catalog_size(catalog.get());
      const size_t terms = model == "interactions" ? p + p * (p - 1) / 2 : p;
      std::printf("pairs: %zu\n", cbcw_design_pair_count(design.get()));
      std::printf("strength: %d\n", cbcw_design_strength(design.get()));
      std::printf("blocks: %zu\n", cbcw_design_block_count(design.get()));
      std::printf("dominated: %zu\n", cbcw_design_dominated_count(design.get()));
      if (theta_path.empty()) std::printf("terms: %zu\n", terms);
      std::printf("criterion: %.10g\n", criterion);
      if (criterion == 0.0 && theta_path.empty() &&
          terms > cbcw_design_pair_count(design.get())) {
        std::fprintf(stderr,
                     "note: %zu model terms exceed %zu pairs; the information matrix is "
                     "rank-deficient for this term set\n",
                     terms, cbcw_design_pair_count(design.get()));
      }
    } else if (generate_cmd->parsed()) {
      if (global.out.empty()) {
        std::fprintf(stderr, "error: design generate needs --out FILE\n");
        return kExitUsage;
      }
      Catalog catalog = make_catalog(attributes);
      DesignHandle design;
      check(cbcw_design_generate(catalog.get(), strength, pairs,
                                 model == "interactions" ? 1 : 0, global.seed, iterations,
                                 restarts, design.out()));
      double criterion = 0.0;
      check(cbcw_design_criterion(design.get(), model == "interactions" ? 1 : 0, &criterion));
      check(cbcw_design_save(design.get(), global.out.c_str()));
      std::printf("pairs: %zu\nstrength: %d\ncriterion: %.10g\n",
                  cbcw_design_pair_count(design.get()), cbcw_design_strength(design.get()),
                  criterion);
      std::fprintf(stderr, "wrote %s\n", global.out.c_str());
    } else if (prune_cmd->parsed()) {
      if (global.out.empty()) {
        std::fprintf(stderr, "error: design prune needs --out FILE\n");
        return kExitUsage;
      }
      Catalog catalog = make_catalog(attributes);
      DesignHandle design;
      check(cbcw_design_load(catalog.get(), design_path.c_str(), design.out()));
      DesignHandle pruned;
      check(cbcw_design_prune(design.get(), pruned.out()));
      if (cbcw_design_pair_count(pruned.get()) == 0) {
        std::fprintf(stderr, "warning: every pair is dominated; the pruned design is empty\n");
      }
      check(cbcw_design_save(pruned.get(), global.out.c_str()));
      std::printf("pairs: %zu -> %zu\n", cbcw_design_pair_count(design.get()),
                  cbcw_design_pair_count(pruned.get()));
      std::fprintf(stderr, "wrote %s\n", global.out.c_str());
    } else if (block_cmd->parsed()) {
      if (global.out.empty()) {
        std::fprintf(stderr, "error: design block needs --out FILE\n");
        return kExitUsage;
      }
      Catalog catalog = make_catalog(attributes);
      DesignHandle design;
      check(cbcw_design_load(catalog.get(), design_path.c_str(), design.out()));
      DesignHandle blocked;
      check(cbcw_design_block(design.get(), blocks, global.seed, blocked.out()));
      check(cbcw_design_save(blocked.get(), global.out.c_str()));
      std::printf("pairs: %zu\nblocks: %zu\n", cbcw_design_pair_count(blocked.get()),
                  cbcw_design_block_count(blocked.get()));
      std::fprintf(stderr, "wrote %s\n", global.out.c_str());
    } else if (linear_cmd->parsed()) {
      DatasetHandle dataset = load_dataset(design_path, respondents_path, choices_path);
      const cbcw_segment seg = segment.parse();
      FitHandle fit;
      check(cbcw_fit_linear(dataset.get(), segment.set() ? &seg : nullptr, global.alpha,
                            fit.out()));
      if (!cbcw_fit_converged(fit.get())) {
        std::fprintf(stderr, "warning: fit did not converge\n");
      }
      char* text = nullptr;
      check(cbcw_render_fit(fit.get(), global.format_code(), &text));
      write_or_print(take_string(text), global.out, "linear.tsv");
    } else if (interactions_cmd->parsed()) {
      DatasetHandle dataset = load_dataset(design_path, respondents_path, choices_path);
      const cbcw_segment seg = segment.parse();
      PipelineHandle pipeline;
      check(cbcw_pipeline_run(dataset.get(), segment.set() ? &seg : nullptr, global.alpha,
                              pipeline.out()));
      if (!cbcw_fit_converged(cbcw_pipeline_interactions(pipeline.get()))) {
        std::fprintf(stderr, "warning: interaction fit did not converge\n");
      }
      if (global.out.empty()) {
        char* text = nullptr;
        check(cbcw_render_pipeline(pipeline.get(), global.format_code(), &text));
        std::fputs(take_string(text).c_str(), stdout);
      } else {
        char* text = nullptr;
        check(cbcw_render_fit(cbcw_pipeline_linear_full(pipeline.get()), global.format_code(),
                              &text));
        write_or_print(take_string(text), global.out, "linear_full.tsv");
        check(cbcw_render_fit(cbcw_pipeline_linear_reduced(pipeline.get()), global.format_code(),
                              &text));
        write_or_print(take_string(text), global.out, "linear_reduced.tsv");
        check(cbcw_render_fit(cbcw_pipeline_interactions(pipeline.get()), global.format_code(),
                              &text));
        write_or_print(take_string(text), global.out, "interactions.tsv");
      }
    } else if (bootstrap_cmd->parsed()) {
      DatasetHandle dataset = load_dataset(design_path, respondents_path, choices_path);
      PipelineHandle pipeline;
      check(cbcw_pipeline_run(dataset.get(), nullptr, global.alpha, pipeline.out()));
      BootstrapHandle bootstrap;
      const cbcw_status status =
          cbcw_bootstrap_run(dataset.get(), cbcw_pipeline_interactions(pipeline.get()),
                             global.replicates, global.seed, global.alpha, bootstrap.out());
      if (status != CBCW_OK && status != CBCW_ERR_UNRELIABLE) check(status);
      char* text = nullptr;
      check(cbcw_render_bootstrap(bootstrap.get(), global.format_code(),
                                  ci_flavor == "percentile" ? 1 : 0, &text));
      write_or_print(take_string(text), global.out, "bootstrap.tsv");
      if (status == CBCW_ERR_UNRELIABLE) {
        std::fprintf(stderr, "warning: %d of %d replicates failed to converge\n",
                     cbcw_bootstrap_failed_replicates(bootstrap.get()), global.replicates);
        return kExitNumeric;
      }
    } else if (report_cmd->parsed()) {
      DatasetHandle dataset = load_dataset(design_path, respondents_path, choices_path);
      const cbcw_segment seg = segment.parse();
      PipelineHandle pipeline;
      check(cbcw_pipeline_run(dataset.get(), segment.set() ? &seg : nullptr, global.alpha,
                              pipeline.out()));
      ReportHandle report;
      check(cbcw_report_build(cbcw_pipeline_interactions(pipeline.get()), global.alpha,
                              report.out()));
      char* text = nullptr;
      check(cbcw_render_report(report.get(), global.format_code(), &text));
      write_or_print(take_string(text), global.out, "interactions_report.tsv");
      check(cbcw_render_graph(report.get(), &text));
      write_or_print(take_string(text), global.out, "interactions.graph");
      std::fprintf(stderr, "significant interactions: %zu of %zu\n",
                   cbcw_report_significant_count(report.get()),
                   cbcw_report_edge_count(report.get()));
    } else if (simulate_cmd->parsed()) {
      if (global.out.empty()) {
        std::fprintf(stderr, "error: simulate needs --out DIR\n");
        return kExitUsage;
      }
      const std::vector<size_t> cells = parse_cells(cells_text);
      Catalog catalog = make_catalog(11);
      DesignHandle design;
      check(cbcw_design_load(catalog.get(), design_path.c_str(), design.out()));
      DesignHandle blocked;
      const cbcw_design* simulation_design = design.get();
      if (simulate_blocks > 0) {
        check(cbcw_design_block(design.get(), simulate_blocks, global.seed, blocked.out()));
        simulation_design = blocked.get();
      } else if (cbcw_design_block_count(design.get()) == 0) {
        std::fprintf(stderr, "error: design has no blocks; pass --blocks K\n");
        return kExitUsage;
      }
      DatasetHandle dataset;
      check(cbcw_dataset_simulate_file(simulation_design, theta_path.c_str(), cells.data(),
                                       global.seed, dataset.out()));
      std::error_code ec;
      std::filesystem::create_directories(global.out, ec);
      const std::string respondents_out = global.out + "/respondents.tsv";
      const std::string choices_out = global.out + "/choices.tsv";
      check(cbcw_dataset_save(dataset.get(), respondents_out.c_str(), choices_out.c_str()));
      if (simulation_design == blocked.get()) {
        const std::string design_out = global.out + "/design.tsv";
        check(cbcw_design_save(blocked.get(), design_out.c_str()));
        std::fprintf(stderr, "wrote %s\n", design_out.c_str());
      }
      std::printf("respondents: %zu\nobservations: %zu\n",
                  cbcw_dataset_respondent_count(dataset.get()),
                  cbcw_dataset_observation_count(dataset.get()));
      std::fprintf(stderr, "wrote %s\nwrote %s\n", respondents_out.c_str(), choices_out.c_str());
    }
  } catch (const CliError& error) {
    return error.code;
  }
  return kExitOk;
}
