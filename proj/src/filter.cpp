#include "revaudit/filter.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "revaudit/csv.hpp"
#include "revaudit/error.hpp"

namespace revaudit {

std::size_t AnalysisDataset::pair_count() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.cited.size() + g.uncited.size();
  return n;
}

std::size_t AnalysisDataset::reviewer_count() const {
  std::set<ReviewerId> ids;
  for (const auto& g : groups) {
    for (const auto& p : g.cited) ids.insert(p.reviewer);
    for (const auto& p : g.uncited) ids.insert(p.reviewer);
  }
  return ids.size();
}

namespace {

AnalysisPair make_pair(const ReviewDataset& ds, std::size_t review_index) {
  const ReviewRecord& r = ds.reviews()[review_index];
  AnalysisPair p;
  p.reviewer = r.reviewer_id;
  p.score = r.score;
  p.latent_score = r.latent_score;
  p.covariates = ds.covariates(review_index).values;
  p.sr_expertise = r.sr_expertise;
  p.sr_confidence = r.sr_confidence;
  p.text_overlap = r.text_overlap;
  p.bid = r.bid;
  p.seniority = ds.find_reviewer(r.reviewer_id)->seniority;
  return p;
}

struct Candidate {
  SubmissionId id;
  std::vector<std::size_t> cited;
  std::vector<std::size_t> uncited;
  bool eligible() const { return !cited.empty() && !uncited.empty(); }
};

std::vector<Candidate> step_one(const ReviewDataset& ds, const CitationRelation& relation) {
  std::vector<Candidate> out;
  for (const auto& s : ds.submissions()) {
    if (s.withdrawn) continue;
    Candidate c{s.id, {}, {}};
    for (std::size_t i : ds.reviews_of(s.id)) {
      const PairKey key = ds.reviews()[i].key();
      if (!relation.contains(key))
        throw Error(ErrorKind::referential, "citation relation lacks assigned pair (" + key.submission.str() + ", " +
                                                key.reviewer.str() + ")");
      (relation.is_cited(key) ? c.cited : c.uncited).push_back(i);
    }
    if (c.eligible()) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::pair<AnalysisDataset, FilterReport> filter(const ReviewDataset& input, const CitationRelation& relation,
                                                VenuePolicy policy) {
  const ReviewDataset ds = input.has_covariates() && input.venue().venue_policy == policy
                               ? input
                               : [&] {
                                   VenueConfig v = input.venue();
                                   v.venue_policy = policy;
                                   return derive_covariates(
                                       ReviewDataset(v, input.reviewers(), input.submissions(), input.reviews()));
                                 }();
  FilterReport report;
  report.policy = policy;

  std::vector<Candidate> candidates = step_one(ds, relation);
  report.initially_eligible = candidates.size();

  if (policy == VenuePolicy::icml_like) {
    std::vector<Candidate> kept;
    for (auto& c : candidates) {
      auto drop = [&](std::vector<std::size_t>& v) {
        const auto before = v.size();
        v.erase(std::remove_if(v.begin(), v.end(), [&](std::size_t i) { return ds.covariates(i).droppable; }), v.end());
        report.dropped_missing += before - v.size();
      };
      drop(c.cited);
      drop(c.uncited);
      if (c.eligible()) kept.push_back(std::move(c));
    }
    candidates = std::move(kept);
  }

  std::vector<Candidate> final_set;
  for (auto& c : candidates) {
    const auto& idx = ds.reviews_of(c.id);
    const bool excluded =
        std::any_of(idx.begin(), idx.end(), [&](std::size_t i) { return ds.reviews()[i].exclusion_adjudicated; });
    if (excluded) {
      report.excluded_submissions.push_back(c.id);
    } else {
      final_set.push_back(std::move(c));
    }
  }
  if (final_set.empty()) throw Error(ErrorKind::no_data, "no analyzable data: no submission has both cited and uncited reviewers after filtering");

  AnalysisDataset analysis;
  analysis.venue = ds.venue();
  analysis.covariate_names = covariate_names(policy);
  for (const auto& c : final_set) {
    SubmissionGroup g{c.id, {}, {}};
    for (std::size_t i : c.cited) g.cited.push_back(make_pair(ds, i));
    for (std::size_t i : c.uncited) g.uncited.push_back(make_pair(ds, i));
    analysis.groups.push_back(std::move(g));
  }
  report.eligible_submissions = analysis.groups.size();
  report.retained_pairs = analysis.pair_count();
  report.retained_reviewers = analysis.reviewer_count();

  if (policy == VenuePolicy::icml_like) {
    const bool any_flag = std::any_of(ds.reviews().begin(), ds.reviews().end(),
                                      [](const ReviewRecord& r) { return r.missing_citation_flag; });
    if (!any_flag)
      report.warnings.push_back(
          "genuinely missing citations are unaccounted: no missing-citation flags were collected, so the parametric "
          "estimate carries an unknown share of such pairs");
  }
  return {std::move(analysis), std::move(report)};
}

AnalysisDataset build_analysis_dataset(const ReviewDataset& input,
                                       const std::vector<std::pair<PairKey, bool>>& retained) {
  const ReviewDataset ds = input.has_covariates() ? input : derive_covariates(input);
  std::map<SubmissionId, std::vector<std::pair<ReviewerId, bool>>> wanted;
  for (const auto& [pair, cited] : retained) wanted[pair.submission].emplace_back(pair.reviewer, cited);

  AnalysisDataset analysis;
  analysis.venue = ds.venue();
  analysis.covariate_names = covariate_names(ds.venue().venue_policy);
  std::size_t matched = 0;
  for (const auto& s : ds.submissions()) {
    auto it = wanted.find(s.id);
    if (it == wanted.end()) continue;
    SubmissionGroup g{s.id, {}, {}};
    for (std::size_t i : ds.reviews_of(s.id)) {
      const auto& r = ds.reviews()[i];
      auto hit = std::find_if(it->second.begin(), it->second.end(),
                              [&](const auto& e) { return e.first == r.reviewer_id; });
      if (hit == it->second.end()) continue;
      (hit->second ? g.cited : g.uncited).push_back(make_pair(ds, i));
      ++matched;
    }
    if (g.cited.empty() || g.uncited.empty())
      throw Error(ErrorKind::validation, "retained submission " + s.id.str() + " lacks a cited or an uncited pair");
    analysis.groups.push_back(std::move(g));
  }
  if (matched != retained.size())
    throw Error(ErrorKind::referential, "analysis pairs reference reviews absent from the dataset");
  return analysis;
}

std::vector<std::pair<PairKey, bool>> retained_pairs(const AnalysisDataset& analysis) {
  std::vector<std::pair<PairKey, bool>> out;
  for (const auto& g : analysis.groups) {
    for (const auto& p : g.cited) out.emplace_back(PairKey{g.id, p.reviewer}, true);
    for (const auto& p : g.uncited) out.emplace_back(PairKey{g.id, p.reviewer}, false);
  }
  std::sort(out.begin(), out.end());
  return out;
}

MissingnessReport missingness_report(const ReviewDataset& ds, const CitationRelation& relation) {
  MissingnessReport rep;
  rep.policy = ds.venue().venue_policy;
  std::vector<std::string> names;
  if (rep.policy == VenuePolicy::icml_like) {
    names = {"expertiseSRConf", "expertiseText", "prefBid"};
  } else {
    names = {"preference"};
  }
  std::vector<std::size_t> counts(names.size(), 0);
  for (const auto& c : step_one(ds, relation)) {
    for (const auto* group : {&c.cited, &c.uncited}) {
      for (std::size_t i : *group) {
        const auto& r = ds.reviews()[i];
        std::vector<bool> miss;
        if (rep.policy == VenuePolicy::icml_like) {
          miss = {!r.sr_confidence.has_value(), !r.text_overlap.has_value(), !r.bid.has_value()};
        } else {
          miss = {!r.preference_value.has_value() || *r.preference_value == 0};
        }
        ++rep.qualifying_pairs;
        bool any = false;
        for (std::size_t k = 0; k < miss.size(); ++k)
          if (miss[k]) {
            ++counts[k];
            any = true;
          }
        if (any) ++rep.pairs_with_missing;
      }
    }
  }
  for (std::size_t k = 0; k < names.size(); ++k) rep.per_variable.emplace_back(names[k], counts[k]);
  return rep;
}

namespace {

std::string with_thousands(std::size_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i != 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

}  // namespace

std::string render_missingness(const MissingnessReport& report) {
  std::ostringstream out;
  out << "Missing values among qualifying (submission, reviewer) pairs (" << to_string(report.policy) << ")\n";
  out << "  pairs with any missing variable: " << with_thousands(report.pairs_with_missing) << " out of "
      << with_thousands(report.qualifying_pairs) << '\n';
  for (const auto& [name, n] : report.per_variable) out << "  " << name << ": " << with_thousands(n) << " missing\n";
  return out.str();
}

void save_filter_outputs(const std::filesystem::path& directory, const AnalysisDataset& analysis,
                         const FilterReport& report) {
  std::filesystem::create_directories(directory);
  nlohmann::ordered_json j;
  j["policy"] = std::string(to_string(report.policy));
  j["initially_eligible"] = report.initially_eligible;
  j["eligible_submissions"] = report.eligible_submissions;
  j["dropped_missing"] = report.dropped_missing;
  std::vector<std::string> excluded;
  for (const auto& id : report.excluded_submissions) excluded.push_back(id.str());
  j["excluded_submissions"] = excluded;
  j["retained_pairs"] = report.retained_pairs;
  j["retained_reviewers"] = report.retained_reviewers;
  j["warnings"] = report.warnings;
  {
    std::ofstream out(directory / "filter_report.json", std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write filter_report.json");
    out << j.dump(2) << '\n';
  }
  csv::Table ex;
  ex.header = {"submission_id", "reason"};
  for (const auto& id : report.excluded_submissions) ex.rows.push_back({id.str(), "adjudicated_missing_citation"});
  csv::write(directory / "exclusions.csv", ex);

  csv::Table pairs;
  pairs.header = {"submission_id", "reviewer_id", "cited"};
  for (const auto& [pair, cited] : retained_pairs(analysis))
    pairs.rows.push_back({pair.submission.str(), pair.reviewer.str(), cited ? "1" : "0"});
  csv::write(directory / "analysis_pairs.csv", pairs);
}

FilterReport load_filter_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::missing_artifact, "missing artifact: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
  FilterReport r;
  try {
    r.policy = parse_policy(j.at("policy").get<std::string>());
    r.initially_eligible = j.at("initially_eligible").get<std::size_t>();
    r.eligible_submissions = j.at("eligible_submissions").get<std::size_t>();
    r.dropped_missing = j.at("dropped_missing").get<std::size_t>();
    for (const auto& id : j.at("excluded_submissions")) r.excluded_submissions.emplace_back(id.get<std::string>());
    r.retained_pairs = j.at("retained_pairs").get<std::size_t>();
    r.retained_reviewers = j.at("retained_reviewers").get<std::size_t>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
  return r;
}

std::vector<std::pair<PairKey, bool>> load_analysis_pairs(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorKind::missing_artifact, "missing artifact: " + path.string());
  const auto table = csv::read(path);
  const std::string ctx = path.string();
  const auto cs = table.column("submission_id", ctx), cr = table.column("reviewer_id", ctx),
             cc = table.column("cited", ctx);
  std::vector<std::pair<PairKey, bool>> out;
  for (const auto& row : table.rows) out.emplace_back(PairKey{SubmissionId(row[cs]), ReviewerId(row[cr])}, row[cc] == "1");
  return out;
}

}  // namespace revaudit
