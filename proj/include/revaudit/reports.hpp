#pragma once

#include <string>
#include <vector>

#include "revaudit/filter.hpp"
#include "revaudit/nonparametric.hpp"
#include "revaudit/parametric.hpp"

namespace revaudit {

enum class AnalysisKind { parametric, nonparametric };

std::string_view to_string(AnalysisKind kind);

struct BiasReport {
  std::string venue_label;
  AnalysisKind kind = AnalysisKind::parametric;
  std::size_t submissions = 0;
  std::size_t reviewers = 0;
  std::size_t pairs = 0;
  double statistic = 0.0;
  std::optional<Interval> ci95;
  double p_two_sided = 1.0;
  std::vector<std::string> caveats;
};

BiasReport parametric_report(const std::string& venue_label, const FitResult& fit, const FilterReport& filter);
BiasReport nonparametric_report(const std::string& venue_label, const PermutationResult& result,
                                const std::vector<MatchedTriple>& triples);

// Fixed-width table with one row per analysis: analysis, venue, sample
// sizes, statistic, 95% CI, p-value; caveats listed underneath.
std::string render_table(const std::vector<BiasReport>& reports);
std::string report_json(const std::vector<BiasReport>& reports);

// "0.009", "< 0.001"
std::string format_p(double p);

}  // namespace revaudit
