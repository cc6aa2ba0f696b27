#include "revaudit/reports.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

namespace revaudit {

std::string_view to_string(AnalysisKind kind) {
  return kind == AnalysisKind::parametric ? "parametric" : "nonparametric";
}

BiasReport parametric_report(const std::string& venue_label, const FitResult& fit, const FilterReport& filter) {
  BiasReport r;
  r.venue_label = venue_label;
  r.kind = AnalysisKind::parametric;
  r.submissions = fit.n_rows;
  r.reviewers = filter.retained_reviewers;
  r.pairs = filter.retained_pairs;
  r.statistic = fit.alpha_star().estimate;
  r.ci95 = fit.alpha_star().ci95;
  r.p_two_sided = fit.alpha_star().p_value;
  for (const auto& w : filter.warnings) r.caveats.push_back(w);
  if (!filter.excluded_submissions.empty())
    r.caveats.push_back(std::to_string(filter.excluded_submissions.size()) +
                        " submission(s) excluded for adjudicated missing citations");
  r.caveats.push_back("standard errors assume independent rows; within-reviewer correlation is not modelled");
  return r;
}

BiasReport nonparametric_report(const std::string& venue_label, const PermutationResult& result,
                                const std::vector<MatchedTriple>& triples) {
  std::set<SubmissionId> subs;
  std::set<ReviewerId> revs;
  for (const auto& t : triples) {
    subs.insert(t.submission_id);
    revs.insert(t.cited_reviewer_id);
    revs.insert(t.uncited_reviewer_id);
  }
  BiasReport r;
  r.venue_label = venue_label;
  r.kind = AnalysisKind::nonparametric;
  r.submissions = subs.size();
  r.reviewers = revs.size();
  r.pairs = 2 * triples.size();
  r.statistic = result.tau;
  r.ci95 = result.ci95_bootstrap;
  r.p_two_sided = result.p_two_sided;
  r.caveats.push_back(result.exact ? "p-value from exact enumeration of all sign patterns"
                                   : "p-value from " + std::to_string(result.iterations) + " random sign flips (seed " +
                                         std::to_string(result.seed) + ")");
  if (r.ci95) r.caveats.push_back("confidence interval bootstrapped over " + std::to_string(result.bootstrap_iterations) + " resamples of triples");
  return r;
}

std::string format_p(double p) {
  if (p < 0.001) return "< 0.001";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", p);
  return buf;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace

std::string render_table(const std::vector<BiasReport>& reports) {
  const std::vector<std::string> head{"Analysis", "Venue", "Submissions", "Reviewers", "Pairs", "Estimate", "95% CI", "p"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports) {
    rows.push_back({r.kind == AnalysisKind::parametric ? "Parametric (WLS)" : "Non-parametric (matching)",
                    r.venue_label, std::to_string(r.submissions), std::to_string(r.reviewers), std::to_string(r.pairs),
                    fixed(r.statistic, 2),
                    r.ci95 ? "[" + fixed(r.ci95->lo, 2) + ", " + fixed(r.ci95->hi, 2) + "]" : "n/a",
                    format_p(r.p_two_sided)});
  }
  std::vector<std::size_t> width(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) {
    width[c] = head[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < cells.size(); ++c) s += (c ? "  " : "") + pad(cells[c], width[c]);
    while (!s.empty() && s.back() == ' ') s.pop_back();
    out << s << '\n';
  };
  line(head);
  std::size_t total = 2 * (head.size() - 1);
  for (auto w : width) total += w;
  out << std::string(total, '-') << '\n';
  for (const auto& row : rows) line(row);
  bool any = false;
  for (const auto& r : reports) {
    for (const auto& c : r.caveats) {
      if (!any) out << "\nCaveats:\n";
      any = true;
      out << "  [" << r.venue_label << ", " << to_string(r.kind) << "] " << c << '\n';
    }
  }
  return out.str();
}

std::string report_json(const std::vector<BiasReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["venue"] = r.venue_label;
    j["analysis"] = std::string(to_string(r.kind));
    j["submissions"] = r.submissions;
    j["reviewers"] = r.reviewers;
    j["pairs"] = r.pairs;
    j["statistic"] = r.statistic;
    if (r.ci95) {
      j["ci95"] = {r.ci95->lo, r.ci95->hi};
    } else {
      j["ci95"] = nullptr;
    }
    j["p_two_sided"] = r.p_two_sided;
    j["caveats"] = r.caveats;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace revaudit
