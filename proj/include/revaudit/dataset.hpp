#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "revaudit/ids.hpp"
#include "revaudit/relation.hpp"

namespace revaudit {

enum class VenuePolicy { ec_like, icml_like };

std::string_view to_string(VenuePolicy policy);
VenuePolicy parse_policy(std::string_view text);

struct IntRange {
  int lo = 0;
  int hi = 0;
  bool contains(int v) const noexcept { return v >= lo && v <= hi; }
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct VenueConfig {
  std::string label;
  int score_min = 1;
  int score_max = 5;
  VenuePolicy venue_policy = VenuePolicy::ec_like;
  IntRange expertise_scale{1, 4};
  std::optional<IntRange> bid_scale;         // ICML-like: 2..5
  std::optional<IntRange> preference_range;  // EC-like: -100..100

  // Largest admissible |cited - uncited| difference of scores.
  int max_abs_delta() const noexcept { return score_max - score_min; }
  void validate() const;

  static VenueConfig ec_like_defaults();
  static VenueConfig icml_like_defaults();

  friend bool operator==(const VenueConfig&, const VenueConfig&) = default;
};

struct Reviewer {
  ReviewerId id;
  std::string last_name;
  std::string first_name;
  int seniority = 0;
  bool has_text_profile = true;

  friend bool operator==(const Reviewer&, const Reviewer&) = default;
};

struct Submission {
  SubmissionId id;
  std::vector<std::string> reference_entries;
  bool withdrawn = false;

  friend bool operator==(const Submission&, const Submission&) = default;
};

struct ReviewRecord {
  SubmissionId submission_id;
  ReviewerId reviewer_id;
  int score = 0;
  int sr_expertise = 0;
  std::optional<int> sr_confidence;
  std::optional<double> text_overlap;
  std::optional<int> bid;
  std::optional<int> preference_value;
  bool missing_citation_flag = false;
  bool exclusion_adjudicated = false;
  // Pre-discretization score; only present in generated data.
  std::optional<double> latent_score;

  PairKey key() const { return {submission_id, reviewer_id}; }

  friend bool operator==(const ReviewRecord&, const ReviewRecord&) = default;
};

struct DerivedCovariates {
  double pref_perc = 0.0;
  int missing_pref = 0;
  // Ordered as covariate_names(policy); missing entries hold 0.
  std::vector<double> values;
  // ICML-like: some covariate is missing and the pair is dropped from analysis.
  bool droppable = false;

  friend bool operator==(const DerivedCovariates&, const DerivedCovariates&) = default;
};

// Names of the per-pair covariates entering the model for a venue policy.
const std::vector<std::string>& covariate_names(VenuePolicy policy);

class ReviewDataset {
 public:
  ReviewDataset() = default;
  // Validates every invariant and builds the id indexes; throws Error.
  ReviewDataset(VenueConfig venue, std::vector<Reviewer> reviewers, std::vector<Submission> submissions,
                std::vector<ReviewRecord> reviews);

  const VenueConfig& venue() const noexcept { return venue_; }
  const std::vector<Reviewer>& reviewers() const noexcept { return reviewers_; }
  const std::vector<Submission>& submissions() const noexcept { return submissions_; }
  const std::vector<ReviewRecord>& reviews() const noexcept { return reviews_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  bool has_covariates() const noexcept { return !covariates_.empty(); }
  // Parallel to reviews(); requires derive_covariates.
  const DerivedCovariates& covariates(std::size_t review_index) const;

  const Reviewer* find_reviewer(const ReviewerId& id) const;
  const Submission* find_submission(const SubmissionId& id) const;
  // Indices into reviews() for one submission, in file order.
  const std::vector<std::size_t>& reviews_of(const SubmissionId& id) const;

  // Assigned pairs (one per review record), sorted.
  std::vector<PairKey> assigned_pairs() const;

  friend ReviewDataset derive_covariates(const ReviewDataset& dataset);

 private:
  void build_indexes();

  VenueConfig venue_;
  std::vector<Reviewer> reviewers_;
  std::vector<Submission> submissions_;
  std::vector<ReviewRecord> reviews_;
  std::vector<DerivedCovariates> covariates_;
  std::vector<std::string> warnings_;

  std::unordered_map<ReviewerId, std::size_t> reviewer_index_;
  std::unordered_map<SubmissionId, std::size_t> submission_index_;
  std::unordered_map<SubmissionId, std::vector<std::size_t>> reviews_by_submission_;
};

// Attaches DerivedCovariates. EC-like: per-reviewer preference percentiles
//   pref_perc = 100 * #{own non-negative preferences strictly greater} / (count - 1)
// (0 for a singleton), missing preference -> (0, missing_pref = 1).
// ICML-like: (sr_expertise, sr_confidence, text_overlap, bid, seniority); any
// missing entry marks the pair droppable. Idempotent.
ReviewDataset derive_covariates(const ReviewDataset& dataset);

// JSON documents and JSON-Lines files.
VenueConfig load_venue_config(const std::filesystem::path& path);
void save_venue_config(const std::filesystem::path& path, const VenueConfig& venue);

// Reads reviewers.jsonl, submissions.jsonl, reviews.jsonl from `directory`.
ReviewDataset load_dataset(const std::filesystem::path& directory, const VenueConfig& venue);
// Writes the three JSON-Lines files plus venue.json in canonical form.
void save_dataset(const std::filesystem::path& directory, const ReviewDataset& dataset);

// references.jsonl: {"submission_id": ..., "entries": [...]} per line.
std::vector<std::pair<SubmissionId, std::vector<std::string>>> load_references(const std::filesystem::path& path);
void save_references(const std::filesystem::path& path, const ReviewDataset& dataset);
// Copy of `dataset` with reference lists replaced for the listed submissions.
ReviewDataset with_references(const ReviewDataset& dataset,
                              const std::vector<std::pair<SubmissionId, std::vector<std::string>>>& references);

struct SummaryTable {
  std::string venue_label;
  std::size_t reviewers = 0;
  std::size_t submissions = 0;  // not withdrawn
  std::size_t submissions_with_cited = 0;

  double fraction_with_cited() const noexcept {
    return submissions == 0 ? 0.0 : static_cast<double>(submissions_with_cited) / static_cast<double>(submissions);
  }
};

SummaryTable summarize(const ReviewDataset& dataset, const CitationRelation& relation);
std::string render_summary(const SummaryTable& table);

}  // namespace revaudit
