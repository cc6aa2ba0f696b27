#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "revaudit/dataset.hpp"

namespace revaudit {

enum class AveragingMode {
  pairs,        // mean over all (submission, reviewer) pairs
  submissions,  // per-submission mean over its reviewers, then mean over submissions
};

std::string_view to_string(AveragingMode mode);
AveragingMode parse_averaging_mode(std::string_view text);

struct PairImprovement {
  double rank_before = 0.0;  // expected rank, 1 = best
  double rank_after = 0.0;
  double improvement = 0.0;  // percent of the submission count
};

struct RankingOutcome {
  std::map<PairKey, PairImprovement> per_pair;
  double average_improvement = 0.0;
  std::size_t n_submissions = 0;
  AveragingMode mode = AveragingMode::pairs;
  bool capped = true;
};

// Submissions are ranked by mean score with ties resolved by midranks
// (the expected rank under uniform random tie-breaking). For each pair the
// reviewer's score is raised by one point (capped at score_max unless
// `capped` is false) and the change in the submission's expected rank is
// reported as a percent of the number of submissions.
// Errors: no_data when no non-withdrawn submission has a review.
RankingOutcome rank_improvement(const ReviewDataset& dataset, AveragingMode mode = AveragingMode::pairs,
                                bool capped = true);

// Expected ranks for mean scores given as (sum, count), by exact rational
// comparison.
std::vector<double> expected_ranks(const std::vector<std::pair<long long, long long>>& means);

// ranking.json and ranking_pairs.csv
void save_ranking(const std::filesystem::path& directory, const RankingOutcome& outcome);

}  // namespace revaudit
