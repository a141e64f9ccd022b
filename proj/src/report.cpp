#include "cbcw/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "cbcw/error.hpp"

namespace cbcw {

namespace {

std::string fmt_double(double value, int decimals) {
  if (std::isnan(value)) return "NA";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  return buffer;
}

std::string pad_right(std::string text, std::size_t width) {
  if (text.size() < width) text.append(width - text.size(), ' ');
  return text;
}

std::string pad_left(std::string text, std::size_t width) {
  if (text.size() < width) text.insert(0, width - text.size(), ' ');
  return text;
}

}  // namespace

const char* relation_name(Relation relation) {
  switch (relation) {
    case Relation::None:
      return "none";
    case Relation::Complement:
      return "complement";
    case Relation::Substitute:
      return "substitute";
  }
  return "none";
}

const char* scope_name(Scope scope) {
  return scope == Scope::WithinHead ? "within" : "between";
}

Relation classify_interaction(double gamma, bool significant) {
  if (!significant) return Relation::None;
  require(gamma != 0.0, ErrorCode::InvalidArgument,
          "a significant interaction cannot have an exactly zero coefficient");
  return gamma > 0.0 ? Relation::Complement : Relation::Substitute;
}

InteractionReport build_report(const FitResult& interaction_fit, const AttributeCatalog& catalog,
                               double alpha) {
  require(interaction_fit.converged, ErrorCode::InvalidArgument,
          "report on a non-convergent fit");
  const ModelSpec& spec = interaction_fit.spec;
  const std::vector<bool> starred = wald_significance(interaction_fit, alpha);
  const std::size_t n_mains = spec.main_terms().size();

  InteractionReport report;
  for (int attribute : spec.main_terms()) {
    report.node_codes.push_back(catalog.at(attribute).code);
    report.node_heads.push_back(catalog.at(attribute).head);
  }
  for (std::size_t k = 0; k < spec.interaction_terms().size(); ++k) {
    const auto& [lo, hi] = spec.interaction_terms()[k];
    const std::size_t term = n_mains + k;
    InteractionEdge edge;
    edge.attr_a = lo;
    edge.attr_b = hi;
    edge.code_a = catalog.at(lo).code;
    edge.code_b = catalog.at(hi).code;
    edge.gamma = interaction_fit.estimates[term];
    edge.separation_flagged =
        term < interaction_fit.separation_flags.size() && interaction_fit.separation_flags[term];
    edge.significant = starred[term] && !edge.separation_flagged;
    edge.relation = edge.separation_flagged ? Relation::None
                                            : classify_interaction(edge.gamma, edge.significant);
    edge.head_a = catalog.at(lo).head;
    edge.head_b = catalog.at(hi).head;
    edge.scope = edge.head_a == edge.head_b ? Scope::WithinHead : Scope::BetweenHead;
    if (edge.significant) report.significant_count += 1;
    report.edges.push_back(std::move(edge));
  }
  return report;
}

std::string render_interaction_graph(const InteractionReport& report) {
  std::string out = "#cbcw-graph v1\n";
  for (std::size_t i = 0; i < report.node_codes.size(); ++i) {
    out += "node\t" + report.node_codes[i] + "\t" + head_name(report.node_heads[i]) + "\n";
  }
  for (const auto& edge : report.edges) {
    if (!edge.significant) continue;
    out += "edge\t" + edge.code_a + "\t" + edge.code_b + "\t" + fmt_double(edge.gamma, 5) + "\t" +
           relation_name(edge.relation) + "\t" + scope_name(edge.scope) + "\n";
  }
  return out;
}

void emit_interaction_graph(const InteractionReport& report, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  require(file.good(), ErrorCode::Io, "cannot open '" + path + "' for writing");
  file << render_interaction_graph(report);
  file.flush();
  require(file.good(), ErrorCode::Io, "failed writing '" + path + "'");
}

namespace {

std::string fit_table_body(const FitResult& fit, const AttributeCatalog& catalog,
                           TableFormat format, double alpha) {
  const std::vector<std::string> names = fit.spec.term_names(catalog);
  const std::vector<bool> starred = wald_significance(fit, alpha);
  std::string out;
  if (format == TableFormat::Delimited) {
    out += "term\testimate\tz\tsig\tnote\n";
    for (std::size_t t = 0; t < names.size(); ++t) {
      out += names[t] + "\t" + fmt_double(fit.estimates[t], 5) + "\t" + fmt_double(fit.z[t], 3) +
             "\t" + (starred[t] ? "*" : "") + "\t" +
             (fit.separation_flags[t] ? "separation" : "") + "\n";
    }
    return out;
  }
  std::size_t term_width = 4;
  std::size_t est_width = 8;
  for (std::size_t t = 0; t < names.size(); ++t) {
    term_width = std::max(term_width, names[t].size());
    est_width = std::max(est_width, fmt_double(fit.estimates[t], 5).size());
  }
  out += pad_right("term", term_width + 2) + pad_left("estimate", est_width) + "  z\n";
  for (std::size_t t = 0; t < names.size(); ++t) {
    out += pad_right(names[t], term_width + 2) + pad_left(fmt_double(fit.estimates[t], 5), est_width) +
           "  " + fmt_double(fit.z[t], 3);
    if (starred[t]) out += " *";
    if (fit.separation_flags[t]) out += "  [separation]";
    out += "\n";
  }
  return out;
}

}  // namespace

std::string render_fit_table(const FitResult& fit, const AttributeCatalog& catalog,
                             TableFormat format, double alpha) {
  return "#cbcw-table coefficients v1\n" + fit_table_body(fit, catalog, format, alpha);
}

std::string render_pipeline_tables(const PipelineResult& pipeline, const AttributeCatalog& catalog,
                                   TableFormat format, double alpha) {
  std::string out = "#cbcw-table pipeline v1\n";
  out += "== linear model: all main effects ==\n";
  out += fit_table_body(pipeline.linear_full, catalog, format, alpha);
  out += "== dropped attributes ==\n";
  if (pipeline.dropped.empty()) {
    out += "(none)\n";
  } else {
    std::string line;
    for (int attribute : pipeline.dropped) {
      if (!line.empty()) line += ' ';
      line += catalog.at(attribute).code;
    }
    out += line + "\n";
  }
  out += "== linear model: retained main effects ==\n";
  out += fit_table_body(pipeline.linear_reduced, catalog, format, alpha);
  if (pipeline.interaction_fit) {
    out += "== interaction model ==\n";
    out += fit_table_body(*pipeline.interaction_fit, catalog, format, alpha);
  }
  return out;
}

std::string render_bootstrap_table(const BootstrapSummary& summary, TableFormat format,
                                   CiFlavor flavor) {
  std::string out = "#cbcw-table bootstrap v1\n";
  if (format == TableFormat::Delimited) {
    out += "term\tobserved\tboot_mean\tboot_se\tz\tp\tci_lo\tci_hi\tsig\n";
    for (const auto& term : summary.terms) {
      const auto& [lo, hi] = flavor == CiFlavor::Basic ? term.ci_basic : term.ci_percentile;
      out += term.term + "\t" + fmt_double(term.observed, 2) + "\t" +
             fmt_double(term.boot_mean, 2) + "\t" + fmt_double(term.boot_se, 2) + "\t" +
             fmt_double(term.z, 2) + "\t" + fmt_double(term.p_value, 4) + "\t" +
             fmt_double(lo, 2) + "\t" + fmt_double(hi, 2) + "\t" +
             (bootstrap_significance(term, flavor) ? "*" : "") + "\n";
    }
    return out;
  }
  std::size_t term_width = 4;
  for (const auto& term : summary.terms) term_width = std::max(term_width, term.term.size());
  out += pad_right("term", term_width + 2) +
         "observed  boot_mean  boot_se        z        p  ci\n";
  for (const auto& term : summary.terms) {
    const auto& [lo, hi] = flavor == CiFlavor::Basic ? term.ci_basic : term.ci_percentile;
    out += pad_right(term.term, term_width + 2) + pad_left(fmt_double(term.observed, 2), 8) +
           pad_left(fmt_double(term.boot_mean, 2), 11) + pad_left(fmt_double(term.boot_se, 2), 9) +
           pad_left(fmt_double(term.z, 2), 9) + pad_left(fmt_double(term.p_value, 4), 9) + "  ( " +
           fmt_double(lo, 2) + " , " + fmt_double(hi, 2) + " )";
    if (bootstrap_significance(term, flavor)) out += "*";
    out += "\n";
  }
  return out;
}

std::string render_report_table(const InteractionReport& report, TableFormat format) {
  std::string out = "#cbcw-table interactions v1\n";
  if (format == TableFormat::Delimited) {
    out += "pair\tgamma\tsig\trelation\tscope\tnote\n";
    for (const auto& edge : report.edges) {
      out += edge.code_a + "*" + edge.code_b + "\t" + fmt_double(edge.gamma, 5) + "\t" +
             (edge.significant ? "*" : "") + "\t" + relation_name(edge.relation) + "\t" +
             scope_name(edge.scope) + "\t" + (edge.separation_flagged ? "separation" : "") + "\n";
    }
    return out;
  }
  std::size_t pair_width = 4;
  for (const auto& edge : report.edges) {
    pair_width = std::max(pair_width, edge.code_a.size() + edge.code_b.size() + 1);
  }
  out += pad_right("pair", pair_width + 2) + "   gamma      relation    scope\n";
  for (const auto& edge : report.edges) {
    out += pad_right(edge.code_a + "*" + edge.code_b, pair_width + 2) +
           pad_left(fmt_double(edge.gamma, 5), 9) + (edge.significant ? " *" : "  ") + " " +
           pad_right(relation_name(edge.relation), 11) + scope_name(edge.scope);
    if (edge.separation_flagged) out += "  [separation]";
    out += "\n";
  }
  return out;
}

}  // namespace cbcw
