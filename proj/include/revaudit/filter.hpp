#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "revaudit/dataset.hpp"
#include "revaudit/relation.hpp"

namespace revaudit {

// One retained (submission, reviewer) pair with everything the estimators need.
struct AnalysisPair {
  ReviewerId reviewer;
  int score = 0;
  std::optional<double> latent_score;
  std::vector<double> covariates;  // ordered as AnalysisDataset::covariate_names
  int sr_expertise = 0;
  std::optional<int> sr_confidence;
  std::optional<double> text_overlap;
  std::optional<int> bid;
  int seniority = 0;
};

struct SubmissionGroup {
  SubmissionId id;
  std::vector<AnalysisPair> cited;
  std::vector<AnalysisPair> uncited;
};

struct AnalysisDataset {
  VenueConfig venue;
  std::vector<std::string> covariate_names;
  std::vector<SubmissionGroup> groups;

  std::size_t pair_count() const;
  std::size_t reviewer_count() const;
};

struct FilterReport {
  VenuePolicy policy = VenuePolicy::ec_like;
  std::size_t initially_eligible = 0;  // after step (1)
  std::size_t eligible_submissions = 0;
  std::size_t dropped_missing = 0;
  std::vector<SubmissionId> excluded_submissions;
  std::size_t retained_pairs = 0;
  std::size_t retained_reviewers = 0;
  std::vector<std::string> warnings;
};

// Steps, in order: (1) keep non-withdrawn submissions with at least one cited
// and one uncited assigned review; (2) ICML-like: drop pairs with a missing
// covariate, then re-check (1); EC-like: keep them (missingPref encodes it);
// (3) remove every submission with an adjudicated exclusion on any pair.
// Throws Error(no_data) when nothing remains.
std::pair<AnalysisDataset, FilterReport> filter(const ReviewDataset& dataset, const CitationRelation& relation,
                                                VenuePolicy policy);
inline std::pair<AnalysisDataset, FilterReport> filter(const ReviewDataset& dataset,
                                                       const CitationRelation& relation) {
  return filter(dataset, relation, dataset.venue().venue_policy);
}

// Rebuilds the analysis set from the retained (pair, cited) list, preserving
// dataset submission order.
AnalysisDataset build_analysis_dataset(const ReviewDataset& dataset,
                                       const std::vector<std::pair<PairKey, bool>>& retained);
std::vector<std::pair<PairKey, bool>> retained_pairs(const AnalysisDataset& analysis);

struct MissingnessReport {
  VenuePolicy policy = VenuePolicy::ec_like;
  std::size_t qualifying_pairs = 0;
  std::size_t pairs_with_missing = 0;
  std::vector<std::pair<std::string, std::size_t>> per_variable;
};

// Missing-value counts among pairs of submissions passing step (1).
MissingnessReport missingness_report(const ReviewDataset& dataset, const CitationRelation& relation);
std::string render_missingness(const MissingnessReport& report);

// filter_report.json, exclusions.csv, analysis_pairs.csv
void save_filter_outputs(const std::filesystem::path& directory, const AnalysisDataset& analysis,
                         const FilterReport& report);
FilterReport load_filter_report(const std::filesystem::path& path);
std::vector<std::pair<PairKey, bool>> load_analysis_pairs(const std::filesystem::path& path);

}  // namespace revaudit
