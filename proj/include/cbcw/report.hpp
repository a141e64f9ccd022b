#pragma once

#include <string>
#include <vector>

#include "cbcw/bootstrap.hpp"
#include "cbcw/catalog.hpp"
#include "cbcw/estimate.hpp"

namespace cbcw {

enum class Relation { None, Complement, Substitute };
enum class Scope { WithinHead, BetweenHead };

const char* relation_name(Relation relation);
const char* scope_name(Scope scope);

// Positive significant interactions are complements, negative ones
// substitutes; insignificant terms carry no relation.
Relation classify_interaction(double gamma, bool significant);

struct InteractionEdge {
  int attr_a = 0;
  int attr_b = 0;
  std::string code_a;
  std::string code_b;
  double gamma = 0.0;
  bool significant = false;
  bool separation_flagged = false;
  Relation relation = Relation::None;
  Scope scope = Scope::BetweenHead;
  Head head_a = Head::Health;
  Head head_b = Head::Health;
};

struct InteractionReport {
  std::vector<std::string> node_codes;  // the fit's main effects, catalog order
  std::vector<Head> node_heads;
  std::vector<InteractionEdge> edges;  // one per interaction term, spec order
  int significant_count = 0;           // starred edges net of separation flags
};

// One edge per interaction term of the fit. Separation-flagged terms are
// annotated and excluded from classification and the significant count.
InteractionReport build_report(const FitResult& interaction_fit, const AttributeCatalog& catalog,
                               double alpha = 0.05);

// Plain-text graph: one record per line, nodes then significant edges, in
// deterministic order. Re-emission is byte-identical.
std::string render_interaction_graph(const InteractionReport& report);
void emit_interaction_graph(const InteractionReport& report, const std::string& path);

enum class TableFormat { Fixed, Delimited };

// Coefficient tables in the estimate / z / star layout; estimates print with
// 5 decimals, z with 3.
std::string render_fit_table(const FitResult& fit, const AttributeCatalog& catalog,
                             TableFormat format, double alpha = 0.05);
std::string render_pipeline_tables(const PipelineResult& pipeline, const AttributeCatalog& catalog,
                                   TableFormat format, double alpha = 0.05);

// Six value columns per term: observed, bootstrap mean, bootstrap SE, z, p,
// confidence interval (starred when it excludes zero).
std::string render_bootstrap_table(const BootstrapSummary& summary, TableFormat format,
                                   CiFlavor flavor = CiFlavor::Basic);

std::string render_report_table(const InteractionReport& report, TableFormat format);

}  // namespace cbcw
