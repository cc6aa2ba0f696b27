#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "revaudit/dataset.hpp"
#include "revaudit/relation.hpp"

namespace revaudit {

// Conventional similarity for candidate pairs. Pairs absent from `sim` are
// not candidates; forbidden pairs are never assigned; soft-penalized pairs
// (missing bid/preference) lose `AssignmentSpec::missing_pref_penalty`.
struct SimilarityMatrix {
  std::map<PairKey, double> sim;
  std::set<PairKey> forbidden;
  std::set<PairKey> soft_penalized;

  std::vector<SubmissionId> submissions() const;
  std::vector<ReviewerId> reviewers() const;
};

struct AssignmentSpec {
  int paper_load = 3;     // reviewers per paper (exact)
  int reviewer_cap = 6;   // papers per reviewer (at most)
  double lambda = 0.0;    // weight of each cited pair
  double missing_pref_penalty = 0.0;
};

struct Assignment {
  std::vector<PairKey> pairs;      // sorted
  double objective_quality = 0.0;  // sum of (quantized) conventional terms
  int cited_count = 0;
  int submissions_with_cited = 0;

  double objective(double lambda) const { return objective_quality + lambda * cited_count; }
};

// Fixed-point scale of the integral solve.
inline constexpr double kCostScale = 1e6;

// Exact maximizer of sum conventional(p, r) + lambda * sum cited(p, r) over
// assignments with exactly paper_load reviewers per paper and at most
// reviewer_cap papers per reviewer. Terms are scaled by 1e6 and rounded half
// to even; among optimal assignments the one maximizing
// sum (N - rank(pair)) is returned, rank being the lexicographic position of
// the pair among the N candidates.
Assignment solve(const SimilarityMatrix& sim, const CitationRelation& relation, const AssignmentSpec& spec);

struct SweepPoint {
  double lambda = 0.0;
  double objective_quality = 0.0;
  int cited_count = 0;
  int submissions_with_cited = 0;
};

std::vector<SweepPoint> tradeoff_sweep(const SimilarityMatrix& sim, const CitationRelation& relation,
                                       const AssignmentSpec& spec, const std::vector<double>& lambdas);

// Smallest lambda of the sweep reaching the target fraction of submissions
// with at least one cited reviewer; -1 when none does.
double select_lambda(const std::vector<SweepPoint>& sweep, std::size_t n_submissions, double target_fraction);

// Throws Error(validation) naming the first violated constraint.
void validate_assignment(const Assignment& assignment, const SimilarityMatrix& sim, const AssignmentSpec& spec);

// Recomputes quality and cited counts of a set of pairs.
Assignment evaluate(std::vector<PairKey> pairs, const SimilarityMatrix& sim, const CitationRelation& relation,
                    const AssignmentSpec& spec);

struct ManualEdit {
  PairKey pair;
  bool add = true;  // false: remove
};

// Applies post-hoc edits and re-validates every constraint.
Assignment apply_manual_edits(const Assignment& assignment, const std::vector<ManualEdit>& edits,
                              const SimilarityMatrix& sim, const CitationRelation& relation,
                              const AssignmentSpec& spec);

// Forbids bid-2 (ICML-like) or negative-preference (EC-like) pairs and marks
// candidates without a usable preference as soft-penalized.
void apply_preference_rules(SimilarityMatrix& sim, const std::map<PairKey, int>& preferences, VenuePolicy policy);

// similarity.csv: submission_id, reviewer_id, sim
SimilarityMatrix load_similarity(const std::filesystem::path& path);
// bids.csv: submission_id, reviewer_id, value
std::map<PairKey, int> load_preferences(const std::filesystem::path& path);
// edits.csv: submission_id, reviewer_id, action (add|remove)
std::vector<ManualEdit> load_manual_edits(const std::filesystem::path& path);
// assignment.csv: submission_id, reviewer_id, sim, cited
void save_assignment(const std::filesystem::path& path, const Assignment& assignment, const SimilarityMatrix& sim,
                     const CitationRelation& relation);
std::vector<PairKey> load_assignment(const std::filesystem::path& path);
void save_sweep(const std::filesystem::path& path, const std::vector<SweepPoint>& sweep);

}  // namespace revaudit
