#include "cbcw.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "cbcw/bootstrap.hpp"
#include "cbcw/catalog.hpp"
#include "cbcw/design.hpp"
#include "cbcw/error.hpp"
#include "cbcw/estimate.hpp"
#include "cbcw/io.hpp"
#include "cbcw/report.hpp"
#include "cbcw/simulate.hpp"

struct cbcw_catalog {
  cbcw::AttributeCatalog value;
};

struct cbcw_design {
  cbcw::AttributeCatalog catalog;
  cbcw::Design value;
};

struct cbcw_dataset {
  cbcw::Dataset value;
};

struct cbcw_fit {
  cbcw::AttributeCatalog catalog;
  cbcw::FitResult result;
  double alpha;
  std::vector<std::string> names;
  std::vector<bool> significant;

  cbcw_fit(cbcw::AttributeCatalog cat, cbcw::FitResult res, double a)
      : catalog(std::move(cat)),
        result(std::move(res)),
        alpha(a),
        names(result.spec.term_names(catalog)),
        significant(cbcw::wald_significance(result, alpha)) {}
};

struct cbcw_pipeline {
  cbcw::PipelineResult raw;
  cbcw_fit linear_full;
  cbcw_fit linear_reduced;
  cbcw_fit interactions;
  std::vector<std::string> dropped;
  double alpha;
};

struct cbcw_bootstrap {
  cbcw::BootstrapSummary value;
};

struct cbcw_report {
  cbcw::InteractionReport value;
};

namespace {

thread_local std::string g_last_error;

cbcw_status status_of(cbcw::ErrorCode code) {
  switch (code) {
    case cbcw::ErrorCode::InvalidArgument:
      return CBCW_ERR_INVALID_ARGUMENT;
    case cbcw::ErrorCode::Parse:
      return CBCW_ERR_PARSE;
    case cbcw::ErrorCode::Io:
      return CBCW_ERR_IO;
    case cbcw::ErrorCode::Numeric:
      return CBCW_ERR_NUMERIC;
    case cbcw::ErrorCode::EmptyModel:
      return CBCW_ERR_EMPTY_MODEL;
    case cbcw::ErrorCode::Unreliable:
      return CBCW_ERR_UNRELIABLE;
    case cbcw::ErrorCode::Internal:
      return CBCW_ERR_INTERNAL;
  }
  return CBCW_ERR_INTERNAL;
}

template <typename F>
cbcw_status guarded(F&& body) {
  try {
    return body();
  } catch (const cbcw::Error& error) {
    g_last_error = error.what();
    return status_of(error.code());
  } catch (const std::exception& error) {
    g_last_error = error.what();
    return CBCW_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return CBCW_ERR_INTERNAL;
  }
}

cbcw_status invalid(const char* message) {
  g_last_error = message;
  return CBCW_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out != nullptr) std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

cbcw_status emit_string(const std::string& text, char** out) {
  *out = dup_string(text);
  if (*out == nullptr) {
    g_last_error = "out of memory";
    return CBCW_ERR_INTERNAL;
  }
  return CBCW_OK;
}

cbcw::SegmentFilter filter_of(const cbcw_segment* segment) {
  cbcw::SegmentFilter filter;
  if (segment == nullptr) return filter;
  const auto check = [](int value, const char* field) {
    cbcw::require(value >= -1 && value <= 1, cbcw::ErrorCode::InvalidArgument,
                  std::string("segment field ") + field + " must be -1, 0 or 1");
  };
  check(segment->gender, "gender");
  check(segment->age_side, "age_side");
  check(segment->education, "education");
  if (segment->gender >= 0) {
    filter.gender = segment->gender == 0 ? cbcw::Gender::Female : cbcw::Gender::Male;
  }
  if (segment->age_side >= 0) {
    filter.age_side = segment->age_side == 0 ? cbcw::AgeSide::AtMost40 : cbcw::AgeSide::Over40;
  }
  if (segment->education >= 0) {
    filter.education =
        segment->education == 0 ? cbcw::Education::Below10 : cbcw::Education::TenthPassOrMore;
  }
  return filter;
}

cbcw::ModelSpec eval_spec(const cbcw::AttributeCatalog& catalog, int with_interactions) {
  std::vector<int> all(static_cast<std::size_t>(catalog.size()));
  for (int i = 0; i < catalog.size(); ++i) all[static_cast<std::size_t>(i)] = i;
  cbcw::ModelSpec spec = cbcw::ModelSpec::mains(all);
  return with_interactions ? spec.with_all_interactions() : spec;
}

cbcw::TableFormat format_of(int format) {
  cbcw::require(format == 0 || format == 1, cbcw::ErrorCode::InvalidArgument,
                "format must be 0 (fixed) or 1 (delimited)");
  return format == 0 ? cbcw::TableFormat::Fixed : cbcw::TableFormat::Delimited;
}

std::array<int, cbcw::kCellCount> counts_of(const size_t cell_counts[8]) {
  std::array<int, cbcw::kCellCount> counts{};
  for (int c = 0; c < cbcw::kCellCount; ++c) {
    cbcw::require(cell_counts[c] > 0 && cell_counts[c] <= 1000000,
                  cbcw::ErrorCode::InvalidArgument, "cell counts must lie in [1, 1e6]");
    counts[static_cast<std::size_t>(c)] = static_cast<int>(cell_counts[c]);
  }
  return counts;
}

cbcw::Dataset segment_view(const cbcw_dataset* dataset, const cbcw_segment* segment) {
  const cbcw::SegmentFilter filter = filter_of(segment);
  cbcw::Dataset filtered = cbcw::filter_dataset(dataset->value, filter);
  cbcw::require(!filtered.observations.empty(), cbcw::ErrorCode::InvalidArgument,
                "segment filter selects no observations");
  return filtered;
}

cbcw_status bootstrap_value(const cbcw_bootstrap* bootstrap, size_t index, double* out,
                            double (*pick)(const cbcw::TermSummary&)) {
  if (bootstrap == nullptr || out == nullptr) return invalid("null argument");
  if (index >= bootstrap->value.terms.size()) return invalid("term index out of range");
  *out = pick(bootstrap->value.terms[index]);
  return CBCW_OK;
}

}  // namespace

extern "C" {

const char* cbcw_last_error(void) { return g_last_error.c_str(); }

/* ---------------- catalogs ---------------- */

cbcw_status cbcw_catalog_mpi(cbcw_catalog** out) {
  if (out == nullptr) return invalid("null output pointer");
  return guarded([&] {
    *out = new cbcw_catalog{cbcw::mpi_catalog()};
    return CBCW_OK;
  });
}

cbcw_status cbcw_catalog_generic(size_t n, cbcw_catalog** out) {
  if (out == nullptr) return invalid("null output pointer");
  return guarded([&] {
    *out = new cbcw_catalog{cbcw::generic_catalog(static_cast<int>(n))};
    return CBCW_OK;
  });
}

cbcw_status cbcw_catalog_create(const char* const* codes, const char* const* heads, size_t n,
                                cbcw_catalog** out) {
  if (out == nullptr || codes == nullptr || heads == nullptr) return invalid("null argument");
  return guarded([&] {
    std::vector<cbcw::Attribute> attributes;
    attributes.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      cbcw::require(codes[i] != nullptr && heads[i] != nullptr, cbcw::ErrorCode::InvalidArgument,
                    "null code or head");
      attributes.push_back({codes[i], cbcw::parse_head(heads[i])});
    }
    *out = new cbcw_catalog{cbcw::AttributeCatalog(std::move(attributes))};
    return CBCW_OK;
  });
}

void cbcw_catalog_free(cbcw_catalog* catalog) { delete catalog; }

size_t cbcw_catalog_size(const cbcw_catalog* catalog) {
  return catalog == nullptr ? 0 : static_cast<size_t>(catalog->value.size());
}

const char* cbcw_catalog_code(const cbcw_catalog* catalog, size_t index) {
  if (catalog == nullptr || index >= static_cast<size_t>(catalog->value.size())) return nullptr;
  return catalog->value.at(static_cast<int>(index)).code.c_str();
}

const char* cbcw_catalog_head(const cbcw_catalog* catalog, size_t index) {
  if (catalog == nullptr || index >= static_cast<size_t>(catalog->value.size())) return nullptr;
  return cbcw::head_name(catalog->value.at(static_cast<int>(index)).head);
}

/* ---------------- designs ---------------- */

cbcw_status cbcw_design_load(const cbcw_catalog* catalog, const char* path, cbcw_design** out) {
  if (catalog == nullptr || path == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    cbcw::Design loaded = cbcw::load_design(catalog->value, path);
    *out = new cbcw_design{catalog->value, std::move(loaded)};
    return CBCW_OK;
  });
}

cbcw_status cbcw_design_save(const cbcw_design* design, const char* path) {
  if (design == nullptr || path == nullptr) return invalid("null argument");
  return guarded([&] {
    cbcw::save_design(design->value, design->catalog, path);
    return CBCW_OK;
  });
}

cbcw_status cbcw_design_generate(const cbcw_catalog* catalog, int strength, int n_pairs,
                                 int with_interactions, uint64_t seed, int iterations,
                                 int restarts, cbcw_design** out) {
  if (catalog == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    cbcw::GenerateOptions options;
    if (iterations > 0) options.iterations = iterations;
    if (restarts > 0) options.restarts = restarts;
    const cbcw::ModelSpec spec = eval_spec(catalog->value, with_interactions);
    cbcw::Design generated =
        cbcw::generate_design(catalog->value.size(), strength, n_pairs, spec, seed, options);
    *out = new cbcw_design{catalog->value, std::move(generated)};
    return CBCW_OK;
  });
}

cbcw_status cbcw_design_prune(const cbcw_design* design, cbcw_design** out) {
  if (design == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    cbcw::Design pruned = cbcw::prune_dominated(design->value);
    *out = new cbcw_design{design->catalog, std::move(pruned)};
    return CBCW_OK;
  });
}

cbcw_status cbcw_design_block(const cbcw_design* design, int blocks, uint64_t seed,
                              cbcw_design** out) {
  if (design == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    const cbcw::BlockedDesign partition = cbcw::block_design(design->value, blocks, seed);
    cbcw::Design labeled = cbcw::with_blocks(design->value, partition);
    *out = new cbcw_design{design->catalog, std::move(labeled)};
    return CBCW_OK;
  });
}

cbcw_status cbcw_design_criterion(const cbcw_design* design, int with_interactions,
                                  double* out_value) {
  if (design == nullptr || out_value == nullptr) return invalid("null argument");
  return guarded([&] {
    const cbcw::ModelSpec spec = eval_spec(design->catalog, with_interactions);
    const std::vector<double> zeros(static_cast<std::size_t>(spec.term_count()), 0.0);
    *out_value = cbcw::d_criterion(design->value, zeros, spec);
    return CBCW_OK;
  });
}

cbcw_status cbcw_design_criterion_at(const cbcw_design* design, const char* theta_path,
                                     double* out_value) {
  if (design == nullptr || theta_path == nullptr || out_value == nullptr) {
    return invalid("null argument");
  }
  return guarded([&] {
    const auto [spec, theta] = cbcw::theta_from_terms(design->catalog, cbcw::load_theta(theta_path));
    *out_value = cbcw::d_criterion(design->value, theta, spec);
    return CBCW_OK;
  });
}

void cbcw_design_free(cbcw_design* design) { delete design; }

size_t cbcw_design_pair_count(const cbcw_design* design) {
  return design == nullptr ? 0 : design->value.pairs.size();
}

int cbcw_design_strength(const cbcw_design* design) {
  return design == nullptr ? 0 : design->value.strength;
}

size_t cbcw_design_dominated_count(const cbcw_design* design) {
  return design == nullptr ? 0 : cbcw::dominated_count(design->value);
}

size_t cbcw_design_block_count(const cbcw_design* design) {
  return design == nullptr ? 0 : cbcw::block_labels(design->value).size();
}

/* ---------------- datasets ---------------- */

cbcw_status cbcw_dataset_load(const cbcw_catalog* catalog, const char* design_path,
                              const char* respondents_path, const char* choices_path,
                              cbcw_dataset** out) {
  if (catalog == nullptr || design_path == nullptr || respondents_path == nullptr ||
      choices_path == nullptr || out == nullptr) {
    return invalid("null argument");
  }
  return guarded([&] {
    *out = new cbcw_dataset{
        cbcw::load_dataset(catalog->value, design_path, respondents_path, choices_path)};
    return CBCW_OK;
  });
}

cbcw_status cbcw_dataset_simulate(const cbcw_design* design, const char* const* terms,
                                  const double* values, size_t n_terms,
                                  const size_t cell_counts[8], uint64_t seed, cbcw_dataset** out) {
  if (design == nullptr || terms == nullptr || values == nullptr || cell_counts == nullptr ||
      out == nullptr) {
    return invalid("null argument");
  }
  return guarded([&] {
    std::vector<std::pair<std::string, double>> named;
    named.reserve(n_terms);
    for (size_t i = 0; i < n_terms; ++i) {
      cbcw::require(terms[i] != nullptr, cbcw::ErrorCode::InvalidArgument, "null term name");
      named.emplace_back(terms[i], values[i]);
    }
    const auto [spec, theta] = cbcw::theta_from_terms(design->catalog, named);
    *out = new cbcw_dataset{cbcw::simulate_population(design->catalog, design->value, theta, spec,
                                                      counts_of(cell_counts), seed)};
    return CBCW_OK;
  });
}

cbcw_status cbcw_dataset_simulate_file(const cbcw_design* design, const char* theta_path,
                                       const size_t cell_counts[8], uint64_t seed,
                                       cbcw_dataset** out) {
  if (design == nullptr || theta_path == nullptr || cell_counts == nullptr || out == nullptr) {
    return invalid("null argument");
  }
  return guarded([&] {
    const auto [spec, theta] = cbcw::theta_from_terms(design->catalog, cbcw::load_theta(theta_path));
    *out = new cbcw_dataset{cbcw::simulate_population(design->catalog, design->value, theta, spec,
                                                      counts_of(cell_counts), seed)};
    return CBCW_OK;
  });
}

cbcw_status cbcw_dataset_save(const cbcw_dataset* dataset, const char* respondents_path,
                              const char* choices_path) {
  if (dataset == nullptr || respondents_path == nullptr || choices_path == nullptr) {
    return invalid("null argument");
  }
  return guarded([&] {
    cbcw::save_dataset(dataset->value, respondents_path, choices_path);
    return CBCW_OK;
  });
}

void cbcw_dataset_free(cbcw_dataset* dataset) { delete dataset; }

size_t cbcw_dataset_respondent_count(const cbcw_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->value.respondents.size();
}

size_t cbcw_dataset_observation_count(const cbcw_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->value.observations.size();
}

/* ---------------- fitting ---------------- */

cbcw_status cbcw_fit_linear(const cbcw_dataset* dataset, const cbcw_segment* segment, double alpha,
                            cbcw_fit** out) {
  if (dataset == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    const cbcw::Dataset filtered = segment_view(dataset, segment);
    const std::vector<cbcw::ChoiceObservation> data = cbcw::choice_observations(filtered);
    std::vector<int> all(static_cast<std::size_t>(filtered.catalog.size()));
    for (int i = 0; i < filtered.catalog.size(); ++i) all[static_cast<std::size_t>(i)] = i;
    cbcw::FitResult fit = cbcw::fit_mnl(data, cbcw::ModelSpec::mains(all));
    *out = new cbcw_fit(filtered.catalog, std::move(fit), alpha);
    return CBCW_OK;
  });
}

cbcw_status cbcw_pipeline_run(const cbcw_dataset* dataset, const cbcw_segment* segment,
                              double alpha, cbcw_pipeline** out) {
  if (dataset == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    const cbcw::Dataset filtered = segment_view(dataset, segment);
    const std::vector<cbcw::ChoiceObservation> data = cbcw::choice_observations(filtered);
    cbcw::PipelineResult pipeline = cbcw::run_pipeline(data, filtered.catalog, alpha);
    std::vector<std::string> dropped;
    for (int attribute : pipeline.dropped) dropped.push_back(filtered.catalog.at(attribute).code);
    cbcw_fit full(filtered.catalog, pipeline.linear_full, alpha);
    cbcw_fit reduced(filtered.catalog, pipeline.linear_reduced, alpha);
    cbcw_fit interactions(filtered.catalog, *pipeline.interaction_fit, alpha);
    *out = new cbcw_pipeline{std::move(pipeline),    std::move(full), std::move(reduced),
                             std::move(interactions), std::move(dropped), alpha};
    return CBCW_OK;
  });
}

void cbcw_pipeline_free(cbcw_pipeline* pipeline) { delete pipeline; }

const cbcw_fit* cbcw_pipeline_linear_full(const cbcw_pipeline* pipeline) {
  return pipeline == nullptr ? nullptr : &pipeline->linear_full;
}

const cbcw_fit* cbcw_pipeline_linear_reduced(const cbcw_pipeline* pipeline) {
  return pipeline == nullptr ? nullptr : &pipeline->linear_reduced;
}

const cbcw_fit* cbcw_pipeline_interactions(const cbcw_pipeline* pipeline) {
  return pipeline == nullptr ? nullptr : &pipeline->interactions;
}

size_t cbcw_pipeline_dropped_count(const cbcw_pipeline* pipeline) {
  return pipeline == nullptr ? 0 : pipeline->dropped.size();
}

const char* cbcw_pipeline_dropped_code(const cbcw_pipeline* pipeline, size_t index) {
  if (pipeline == nullptr || index >= pipeline->dropped.size()) return nullptr;
  return pipeline->dropped[index].c_str();
}

void cbcw_fit_free(cbcw_fit* fit) { delete fit; }

size_t cbcw_fit_term_count(const cbcw_fit* fit) {
  return fit == nullptr ? 0 : fit->result.estimates.size();
}

const char* cbcw_fit_term_name(const cbcw_fit* fit, size_t index) {
  if (fit == nullptr || index >= fit->names.size()) return nullptr;
  return fit->names[index].c_str();
}

cbcw_status cbcw_fit_estimate(const cbcw_fit* fit, size_t index, double* out) {
  if (fit == nullptr || out == nullptr) return invalid("null argument");
  if (index >= fit->result.estimates.size()) return invalid("term index out of range");
  *out = fit->result.estimates[index];
  return CBCW_OK;
}

cbcw_status cbcw_fit_z(const cbcw_fit* fit, size_t index, double* out) {
  if (fit == nullptr || out == nullptr) return invalid("null argument");
  if (index >= fit->result.z.size()) return invalid("term index out of range");
  *out = fit->result.z[index];
  return CBCW_OK;
}

cbcw_status cbcw_fit_p_value(const cbcw_fit* fit, size_t index, double* out) {
  if (fit == nullptr || out == nullptr) return invalid("null argument");
  if (index >= fit->result.p_values.size()) return invalid("term index out of range");
  *out = fit->result.p_values[index];
  return CBCW_OK;
}

int cbcw_fit_significant(const cbcw_fit* fit, size_t index) {
  if (fit == nullptr || index >= fit->significant.size()) return 0;
  return fit->significant[index] ? 1 : 0;
}

int cbcw_fit_separation_flag(const cbcw_fit* fit, size_t index) {
  if (fit == nullptr || index >= fit->result.separation_flags.size()) return 0;
  return fit->result.separation_flags[index] ? 1 : 0;
}

int cbcw_fit_converged(const cbcw_fit* fit) {
  return fit != nullptr && fit->result.converged ? 1 : 0;
}

double cbcw_fit_log_likelihood(const cbcw_fit* fit) {
  return fit == nullptr ? 0.0 : fit->result.log_lik;
}

double cbcw_fit_aic(const cbcw_fit* fit) { return fit == nullptr ? 0.0 : fit->result.aic; }

/* ---------------- bootstrap ---------------- */

cbcw_status cbcw_bootstrap_run(const cbcw_dataset* dataset, const cbcw_fit* reference,
                               int replicates, uint64_t seed, double alpha, cbcw_bootstrap** out) {
  if (dataset == nullptr || reference == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    cbcw::BootstrapOptions options;
    options.alpha = alpha;
    cbcw::BootstrapSummary summary =
        cbcw::block_bootstrap(dataset->value, reference->result.spec, replicates, seed, options);
    const bool reliable = summary.reliable;
    *out = new cbcw_bootstrap{std::move(summary)};
    if (!reliable) {
      g_last_error = "more than 20% of bootstrap replicates failed to converge";
      return CBCW_ERR_UNRELIABLE;
    }
    return CBCW_OK;
  });
}

void cbcw_bootstrap_free(cbcw_bootstrap* bootstrap) { delete bootstrap; }

size_t cbcw_bootstrap_term_count(const cbcw_bootstrap* bootstrap) {
  return bootstrap == nullptr ? 0 : bootstrap->value.terms.size();
}

const char* cbcw_bootstrap_term_name(const cbcw_bootstrap* bootstrap, size_t index) {
  if (bootstrap == nullptr || index >= bootstrap->value.terms.size()) return nullptr;
  return bootstrap->value.terms[index].term.c_str();
}

cbcw_status cbcw_bootstrap_observed(const cbcw_bootstrap* b, size_t index, double* out) {
  return bootstrap_value(b, index, out, [](const cbcw::TermSummary& t) { return t.observed; });
}

cbcw_status cbcw_bootstrap_mean(const cbcw_bootstrap* b, size_t index, double* out) {
  return bootstrap_value(b, index, out, [](const cbcw::TermSummary& t) { return t.boot_mean; });
}

cbcw_status cbcw_bootstrap_se(const cbcw_bootstrap* b, size_t index, double* out) {
  return bootstrap_value(b, index, out, [](const cbcw::TermSummary& t) { return t.boot_se; });
}

cbcw_status cbcw_bootstrap_z(const cbcw_bootstrap* b, size_t index, double* out) {
  return bootstrap_value(b, index, out, [](const cbcw::TermSummary& t) { return t.z; });
}

cbcw_status cbcw_bootstrap_p_value(const cbcw_bootstrap* b, size_t index, double* out) {
  return bootstrap_value(b, index, out, [](const cbcw::TermSummary& t) { return t.p_value; });
}

cbcw_status cbcw_bootstrap_ci(const cbcw_bootstrap* b, size_t index, int use_percentile,
                              double* out_lo, double* out_hi) {
  if (b == nullptr || out_lo == nullptr || out_hi == nullptr) return invalid("null argument");
  if (index >= b->value.terms.size()) return invalid("term index out of range");
  const auto& term = b->value.terms[index];
  const auto& [lo, hi] = use_percentile ? term.ci_percentile : term.ci_basic;
  *out_lo = lo;
  *out_hi = hi;
  return CBCW_OK;
}

int cbcw_bootstrap_significant(const cbcw_bootstrap* b, size_t index, int use_percentile) {
  if (b == nullptr || index >= b->value.terms.size()) return 0;
  return cbcw::bootstrap_significance(b->value.terms[index], use_percentile
                                                                 ? cbcw::CiFlavor::Percentile
                                                                 : cbcw::CiFlavor::Basic)
             ? 1
             : 0;
}

int cbcw_bootstrap_failed_replicates(const cbcw_bootstrap* b) {
  return b == nullptr ? 0 : b->value.failed_replicates;
}

int cbcw_bootstrap_reliable(const cbcw_bootstrap* b) {
  return b != nullptr && b->value.reliable ? 1 : 0;
}

int cbcw_default_bootstrap_replicates(void) { return cbcw::kDefaultBootstrapReplicates; }

/* ---------------- interpretation and rendering ---------------- */

cbcw_status cbcw_report_build(const cbcw_fit* interaction_fit, double alpha, cbcw_report** out) {
  if (interaction_fit == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    *out = new cbcw_report{
        cbcw::build_report(interaction_fit->result, interaction_fit->catalog, alpha)};
    return CBCW_OK;
  });
}

void cbcw_report_free(cbcw_report* report) { delete report; }

size_t cbcw_report_edge_count(const cbcw_report* report) {
  return report == nullptr ? 0 : report->value.edges.size();
}

size_t cbcw_report_significant_count(const cbcw_report* report) {
  return report == nullptr ? 0 : static_cast<size_t>(report->value.significant_count);
}

cbcw_status cbcw_report_write_graph(const cbcw_report* report, const char* path) {
  if (report == nullptr || path == nullptr) return invalid("null argument");
  return guarded([&] {
    cbcw::emit_interaction_graph(report->value, path);
    return CBCW_OK;
  });
}

cbcw_status cbcw_render_fit(const cbcw_fit* fit, int format, char** out) {
  if (fit == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    return emit_string(
        cbcw::render_fit_table(fit->result, fit->catalog, format_of(format), fit->alpha), out);
  });
}

cbcw_status cbcw_render_pipeline(const cbcw_pipeline* pipeline, int format, char** out) {
  if (pipeline == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    return emit_string(cbcw::render_pipeline_tables(pipeline->raw, pipeline->linear_full.catalog,
                                                    format_of(format), pipeline->alpha),
                       out);
  });
}

cbcw_status cbcw_render_bootstrap(const cbcw_bootstrap* bootstrap, int format, int use_percentile,
                                  char** out) {
  if (bootstrap == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    return emit_string(
        cbcw::render_bootstrap_table(bootstrap->value, format_of(format),
                                     use_percentile ? cbcw::CiFlavor::Percentile
                                                    : cbcw::CiFlavor::Basic),
        out);
  });
}

cbcw_status cbcw_render_report(const cbcw_report* report, int format, char** out) {
  if (report == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    return emit_string(cbcw::render_report_table(report->value, format_of(format)), out);
  });
}

cbcw_status cbcw_render_graph(const cbcw_report* report, char** out) {
  if (report == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { return emit_string(cbcw::render_interaction_graph(report->value), out); });
}

void cbcw_string_free(char* text) { std::free(text); }

} /* extern "C" */
