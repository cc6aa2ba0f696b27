#include "revaudit/effect_size.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "revaudit/csv.hpp"
#include "revaudit/error.hpp"

namespace revaudit {

std::string_view to_string(AveragingMode mode) { return mode == AveragingMode::pairs ? "pairs" : "submissions"; }

AveragingMode parse_averaging_mode(std::string_view text) {
  if (text == "pairs") return AveragingMode::pairs;
  if (text == "submissions") return AveragingMode::submissions;
  throw Error(ErrorKind::usage, "unknown averaging mode '" + std::string(text) + "' (expected pairs|submissions)");
}

namespace {

using Mean = std::pair<long long, long long>;  // (sum, count)

// a < b as rationals; counts are positive.
bool less(const Mean& a, const Mean& b) { return a.first * b.second < b.first * a.second; }

// Expected rank of a submission with mean `m` among `sorted` (descending),
// where `self` (if inside `sorted`) is excluded from the comparison set.
double midrank(const std::vector<Mean>& sorted, const Mean& m, const Mean* self) {
  // Descending order: everything strictly greater sits before lower_bound.
  auto greater_end = std::lower_bound(sorted.begin(), sorted.end(), m, [](const Mean& e, const Mean& v) { return less(v, e); });
  auto equal_end = std::upper_bound(sorted.begin(), sorted.end(), m, [](const Mean& v, const Mean& e) { return less(e, v); });
  auto greater = static_cast<double>(greater_end - sorted.begin());
  auto ties = static_cast<double>(equal_end - greater_end);
  if (self) {
    if (less(m, *self)) greater -= 1;
    else if (!less(*self, m)) ties -= 1;
  }
  return 1.0 + greater + ties / 2.0;
}

std::vector<Mean> sorted_desc(std::vector<Mean> v) {
  std::sort(v.begin(), v.end(), [](const Mean& a, const Mean& b) { return less(b, a); });
  return v;
}

}  // namespace

std::vector<double> expected_ranks(const std::vector<std::pair<long long, long long>>& means) {
  const auto sorted = sorted_desc(means);
  std::vector<double> out;
  out.reserve(means.size());
  for (const auto& m : means) out.push_back(midrank(sorted, m, &m));
  return out;
}

RankingOutcome rank_improvement(const ReviewDataset& dataset, AveragingMode mode, bool capped) {
  std::vector<SubmissionId> ids;
  std::vector<Mean> means;
  for (const auto& s : dataset.submissions()) {
    if (s.withdrawn) continue;
    const auto& idx = dataset.reviews_of(s.id);
    if (idx.empty()) continue;
    long long sum = 0;
    for (std::size_t i : idx) sum += dataset.reviews()[i].score;
    ids.push_back(s.id);
    means.push_back({sum, static_cast<long long>(idx.size())});
  }
  if (ids.empty()) throw Error(ErrorKind::no_data, "no reviewed submissions to rank");

  const auto sorted = sorted_desc(means);
  const double n = static_cast<double>(ids.size());
  const int cap = dataset.venue().score_max;

  RankingOutcome out;
  out.n_submissions = ids.size();
  out.mode = mode;
  out.capped = capped;
  double pair_total = 0.0, submission_total = 0.0;
  std::size_t pair_count = 0;
  for (std::size_t s = 0; s < ids.size(); ++s) {
    const double before = midrank(sorted, means[s], &means[s]);
    double local = 0.0;
    const auto& idx = dataset.reviews_of(ids[s]);
    for (std::size_t i : idx) {
      const auto& r = dataset.reviews()[i];
      const int raised = capped ? std::min(r.score + 1, cap) : r.score + 1;
      const Mean bumped{means[s].first + (raised - r.score), means[s].second};
      const double after = midrank(sorted, bumped, &means[s]);
      const double imp = 100.0 * (before - after) / n;
      out.per_pair[r.key()] = {before, after, imp};
      local += imp;
      pair_total += imp;
      ++pair_count;
    }
    submission_total += local / static_cast<double>(idx.size());
  }
  out.average_improvement = mode == AveragingMode::pairs ? pair_total / static_cast<double>(pair_count)
                                                         : submission_total / n;
  return out;
}

void save_ranking(const std::filesystem::path& directory, const RankingOutcome& outcome) {
  std::filesystem::create_directories(directory);
  nlohmann::ordered_json j;
  j["average_improvement"] = outcome.average_improvement;
  j["n_submissions"] = outcome.n_submissions;
  j["n_pairs"] = outcome.per_pair.size();
  j["mode"] = std::string(to_string(outcome.mode));
  j["capped"] = outcome.capped;
  {
    std::ofstream out(directory / "ranking.json", std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write ranking.json");
    out << j.dump(2) << '\n';
  }
  csv::Table t;
  t.header = {"submission_id", "reviewer_id", "rank_before", "rank_after", "improvement_pct"};
  char buf[3][32];
  for (const auto& [pair, imp] : outcome.per_pair) {
    std::snprintf(buf[0], sizeof buf[0], "%.4f", imp.rank_before);
    std::snprintf(buf[1], sizeof buf[1], "%.4f", imp.rank_after);
    std::snprintf(buf[2], sizeof buf[2], "%.6f", imp.improvement);
    t.rows.push_back({pair.submission.str(), pair.reviewer.str(), buf[0], buf[1], buf[2]});
  }
  csv::write(directory / "ranking_pairs.csv", t);
}

}  // namespace revaudit
