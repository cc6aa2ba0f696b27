#include <cmath>
#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "revaudit/effect_size.hpp"
#include "revaudit/error.hpp"
#include "revaudit/synthetic.hpp"

using namespace revaudit;
using namespace testing;

namespace {

ReviewDataset scored(const std::vector<std::vector<int>>& scores, int score_max = 5) {
  auto venue = VenueConfig::ec_like_defaults();
  venue.score_max = score_max;
  std::vector<Reviewer> revs;
  std::vector<Submission> subs;
  std::vector<ReviewRecord> recs;
  std::size_t max_k = 0;
  for (const auto& s : scores) max_k = std::max(max_k, s.size());
  for (std::size_t r = 0; r < max_k; ++r) revs.push_back(reviewer("r" + std::to_string(r), "L", "F"));
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const std::string id = "s" + std::to_string(i);
    subs.push_back({SubmissionId(id), {}, false});
    for (std::size_t r = 0; r < scores[i].size(); ++r) recs.push_back(review(id, "r" + std::to_string(r), scores[i][r]));
  }
  return ReviewDataset(venue, revs, subs, recs);
}

}  // namespace

TEST_SUITE("effect_size") {

TEST_CASE("two submissions, one point closes the gap") {
  auto out = rank_improvement(scored({{3}, {4}}));
  const auto& low = out.per_pair.at(pk("s0", "r0"));
  CHECK(low.rank_before == 2.0);
  CHECK(low.rank_after == 1.5);
  CHECK(low.improvement == 25.0);
  CHECK(out.per_pair.at(pk("s1", "r0")).improvement == 0.0);
  CHECK(out.n_submissions == 2);
}

TEST_CASE("cap at the top of the scale") {
  auto out = rank_improvement(scored({{5}, {5}, {3}}));
  CHECK(out.per_pair.at(pk("s0", "r0")).improvement == 0.0);
  auto un = rank_improvement(scored({{5}, {5}, {3}}), AveragingMode::pairs, false);
  CHECK(un.per_pair.at(pk("s0", "r0")).improvement > 0.0);
}

TEST_CASE("midranks with exact rational ties") {
  auto ranks = expected_ranks({{3, 1}, {6, 2}, {4, 1}, {7, 3}});
  CHECK(ranks == std::vector<double>{2.5, 2.5, 1.0, 4.0});
  CHECK(expected_ranks({{1, 3}, {2, 6}}) == std::vector<double>{1.5, 1.5});
}

TEST_CASE("averaging modes") {
  auto ds = scored({{2, 2, 2}, {4}, {3, 3}});
  auto pairs = rank_improvement(ds, AveragingMode::pairs);
  auto subs = rank_improvement(ds, AveragingMode::submissions);
  double total = 0.0;
  for (const auto& [k, v] : pairs.per_pair) total += v.improvement;
  CHECK(pairs.average_improvement == doctest::Approx(total / 6.0));
  const double s0 = pairs.per_pair.at(pk("s0", "r0")).improvement;
  const double s1 = pairs.per_pair.at(pk("s1", "r0")).improvement;
  const double s2 = pairs.per_pair.at(pk("s2", "r0")).improvement;
  CHECK(subs.average_improvement == doctest::Approx((s0 + s1 + s2) / 3.0));
}

TEST_CASE("monotone, top is zero, shift invariant") {
  std::mt19937_64 gen(21);
  std::uniform_int_distribution<int> score(1, 6), k(1, 4);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::vector<int>> s(30), shifted(30);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i].resize(static_cast<std::size_t>(k(gen)));
      for (auto& v : s[i]) v = score(gen);
      shifted[i] = s[i];
      for (auto& v : shifted[i]) v += 3;
    }
    auto a = rank_improvement(scored(s, 10));
    auto b = rank_improvement(scored(shifted, 10));
    for (const auto& [key, v] : a.per_pair) {
      CHECK(v.rank_after <= v.rank_before);
      CHECK(v.improvement >= 0.0);
      if (v.rank_before == 1.0) CHECK(v.improvement == 0.0);
      CHECK(b.per_pair.at(key).improvement == v.improvement);
    }
  }
}

TEST_CASE("ICML-like profile lands near eleven percent") {
  auto cfg = GeneratorConfig::icml_like();
  cfg.n_submissions = 1000;
  cfg.render_references = false;
  cfg.seed = 21;
  auto out = rank_improvement(generate(cfg).dataset);
  CHECK(std::abs(out.average_improvement - 11.0) <= 3.0);
}

TEST_CASE("empty dataset is an error") {
  try {
    rank_improvement(scored({{}}));
    FAIL("expected no_data");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::no_data);
  }
}

}
