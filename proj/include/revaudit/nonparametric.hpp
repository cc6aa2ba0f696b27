#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "revaudit/filter.hpp"
#include "revaudit/parametric.hpp"

namespace revaudit {

struct MatchedTriple {
  SubmissionId submission_id;
  ReviewerId cited_reviewer_id;
  ReviewerId uncited_reviewer_id;
  int score_cited = 0;
  int score_uncited = 0;

  int difference() const noexcept { return score_cited - score_uncited; }
  friend bool operator==(const MatchedTriple&, const MatchedTriple&) = default;
};

inline constexpr double kDefaultOverlapTolerance = 0.1;

// Equal expertise, equal confidence, |overlap difference| <= tolerance,
// bids both 3 or both in {4, 5}, same seniority group.
bool compatible(const AnalysisPair& cited, const AnalysisPair& uncited, double overlap_tolerance);

// Per submission, a maximum matching of the compatibility graph; among
// maximum matchings the lexicographically smallest by (cited id, uncited id)
// is chosen. Errors: validation when a pair lacks confidence, overlap or bid.
std::vector<MatchedTriple> match(const AnalysisDataset& analysis, double overlap_tolerance = kDefaultOverlapTolerance);

struct PermutationResult {
  double tau = 0.0;
  std::size_t k = 0;
  double p_two_sided = 1.0;
  std::optional<Interval> ci95_bootstrap;
  std::size_t iterations = 0;
  std::size_t bootstrap_iterations = 0;
  std::uint64_t seed = 0;
  bool exact = false;  // p from full 2^K enumeration
};

// tau = mean within-triple difference. Each iteration flips every
// difference's sign independently with probability 1/2;
// p = (1 + #{|tau_b| >= |tau|}) / (1 + iterations). The bootstrap CI is
// attached when bootstrap_iterations > 0 and K >= 2.
// Errors: no_data when K = 0.
PermutationResult permutation_test(const std::vector<MatchedTriple>& triples, std::size_t iterations,
                                   std::uint64_t seed, std::size_t bootstrap_iterations = 0);

// #{sign patterns s : |sum s_k d_k| >= |sum d_k|} / 2^K. K <= 30.
double exact_permutation_p(const std::vector<MatchedTriple>& triples);
PermutationResult exact_permutation_test(const std::vector<MatchedTriple>& triples);

// Percentile 95% interval of the resampled mean difference.
// Errors: sample_size when K < 2.
Interval bootstrap_ci(const std::vector<MatchedTriple>& triples, std::size_t iterations, std::uint64_t seed);

// triples.csv: submission_id, cited_reviewer_id, uncited_reviewer_id, score_cited, score_uncited
void save_triples(const std::filesystem::path& path, const std::vector<MatchedTriple>& triples);
std::vector<MatchedTriple> load_triples(const std::filesystem::path& path);
void save_permutation(const std::filesystem::path& path, const PermutationResult& result,
                      const std::vector<MatchedTriple>& triples);
PermutationResult load_permutation(const std::filesystem::path& path);

}  // namespace revaudit
