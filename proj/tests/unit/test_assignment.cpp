#include <random>

#include <doctest.h>

#include "../common/oracles.hpp"
#include "helpers.hpp"
#include "revaudit/assignment.hpp"
#include "revaudit/error.hpp"

using namespace revaudit;
using namespace testing;

namespace {

struct Instance {
  SimilarityMatrix sim;
  CitationRelation rel;
};

Instance two_by_two() {
  Instance in;
  in.sim.sim = {{pk("p1", "r1"), 0.9}, {pk("p1", "r2"), 0.1}, {pk("p2", "r1"), 0.2}, {pk("p2", "r2"), 0.8}};
  for (const auto& [p, s] : in.sim.sim) in.rel.set_parsed(p, p == pk("p1", "r2"));
  return in;
}

Instance random_instance(std::mt19937_64& gen, int papers, int reviewers, double cite_rate) {
  Instance in;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int p = 0; p < papers; ++p) {
    for (int r = 0; r < reviewers; ++r) {
      auto key = pk("p" + std::to_string(p), "r" + std::to_string(r));
      in.sim.sim[key] = std::round(u(gen) * 1000.0) / 1000.0;
      in.rel.set_parsed(key, u(gen) < cite_rate);
    }
  }
  return in;
}

}  // namespace

TEST_SUITE("assignment") {

TEST_CASE("two by two at lambda zero keeps similarity") {
  auto in = two_by_two();
  AssignmentSpec spec{1, 1, 0.0, 0.0};
  auto a = solve(in.sim, in.rel, spec);
  CHECK(a.pairs == std::vector<PairKey>{pk("p1", "r1"), pk("p2", "r2")});
  CHECK(a.objective_quality == doctest::Approx(1.7));
  CHECK(a.cited_count == 0);
}

TEST_CASE("two by two at lambda two swaps to the cited reviewer") {
  auto in = two_by_two();
  AssignmentSpec spec{1, 1, 2.0, 0.0};
  auto a = solve(in.sim, in.rel, spec);
  CHECK(a.pairs == std::vector<PairKey>{pk("p1", "r2"), pk("p2", "r1")});
  CHECK(a.objective_quality == doctest::Approx(0.3));
  CHECK(a.cited_count == 1);
  CHECK(a.objective(2.0) == doctest::Approx(2.3));
}

TEST_CASE("lambda zero ignores citations") {
  std::mt19937_64 gen(5);
  auto in = random_instance(gen, 5, 6, 0.0);
  CitationRelation cited = in.rel;
  for (const auto& [p, s] : in.sim.sim) cited.set_parsed(p, true);
  AssignmentSpec spec{2, 2, 0.0, 0.0};
  CHECK(solve(in.sim, in.rel, spec).pairs == solve(in.sim, cited, spec).pairs);
}

TEST_CASE("matches exhaustive search on small instances") {
  std::mt19937_64 gen(17);
  for (int t = 0; t < 40; ++t) {
    auto in = random_instance(gen, 3, 4, 0.3);
    AssignmentSpec spec{1 + t % 2, 2, (t % 5) * 0.25, 0.0};
    auto a = solve(in.sim, in.rel, spec);
    auto b = oracle::brute_force_assignment(in.sim, in.rel, spec);
    REQUIRE(b.feasible);
    CHECK(a.pairs == b.pairs);
  }
}

TEST_CASE("sweep is monotone and reaches the maximum cited count") {
  std::mt19937_64 gen(23);
  auto in = random_instance(gen, 6, 9, 0.2);
  AssignmentSpec spec{2, 2, 0.0, 0.0};
  std::vector<double> lambdas;
  for (int i = 0; i < 20; ++i) lambdas.push_back(i * 0.1);
  lambdas.push_back(1000.0);
  auto sweep = tradeoff_sweep(in.sim, in.rel, spec, lambdas);
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    CHECK(sweep[i].cited_count >= sweep[i - 1].cited_count);
    CHECK(sweep[i].objective_quality <= sweep[i - 1].objective_quality + 1e-12);
  }
  SimilarityMatrix only_cites = in.sim;
  for (auto& [p, s] : only_cites.sim) s = 0.0;
  auto most = solve(only_cites, in.rel, AssignmentSpec{2, 2, 1.0, 0.0});
  CHECK(sweep.back().cited_count == most.cited_count);
}

TEST_CASE("sweep reaches a majority of submissions with a cited reviewer") {
  std::mt19937_64 gen(29);
  auto in = random_instance(gen, 60, 45, 0.04);
  AssignmentSpec spec{3, 5, 0.0, 0.0};
  std::vector<double> lambdas;
  for (int i = 0; i <= 8; ++i) lambdas.push_back(0.25 * i);
  auto sweep = tradeoff_sweep(in.sim, in.rel, spec, lambdas);
  const double chosen = select_lambda(sweep, 60, 0.5);
  REQUIRE(chosen >= 0.0);
  for (const auto& p : sweep)
    if (p.lambda == chosen) CHECK(p.submissions_with_cited > 30);
  CHECK(sweep.front().submissions_with_cited < sweep.back().submissions_with_cited);
}

TEST_CASE("select lambda picks the smallest qualifying value") {
  std::vector<SweepPoint> sweep{{0.0, 5.0, 1, 1}, {0.5, 4.8, 3, 3}, {1.0, 4.5, 4, 4}};
  CHECK(select_lambda(sweep, 5, 0.5) == 0.5);
  CHECK(select_lambda(sweep, 5, 0.9) == -1.0);
}

TEST_CASE("forbidden pairs and infeasibility") {
  auto in = two_by_two();
  in.sim.forbidden.insert(pk("p1", "r1"));
  auto a = solve(in.sim, in.rel, AssignmentSpec{1, 1, 0.0, 0.0});
  CHECK(a.pairs == std::vector<PairKey>{pk("p1", "r2"), pk("p2", "r1")});
  in.sim.forbidden.insert(pk("p1", "r2"));
  try {
    solve(in.sim, in.rel, AssignmentSpec{1, 1, 0.0, 0.0});
    FAIL("expected infeasible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::infeasible);
    CHECK(std::string(e.what()).find("paper_load") != std::string::npos);
  }
  auto cap = two_by_two();
  try {
    solve(cap.sim, cap.rel, AssignmentSpec{2, 1, 0.0, 0.0});
    FAIL("expected infeasible");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("reviewer_cap") != std::string::npos);
  }
}

TEST_CASE("preference rules forbid and penalize") {
  SimilarityMatrix icml;
  icml.sim = {{pk("p1", "r1"), 0.5}, {pk("p1", "r2"), 0.5}, {pk("p1", "r3"), 0.5}};
  apply_preference_rules(icml, {{pk("p1", "r1"), 2}, {pk("p1", "r2"), 4}}, VenuePolicy::icml_like);
  CHECK(icml.forbidden == std::set<PairKey>{pk("p1", "r1")});
  CHECK(icml.soft_penalized == std::set<PairKey>{pk("p1", "r3")});

  SimilarityMatrix ec;
  ec.sim = icml.sim;
  apply_preference_rules(ec, {{pk("p1", "r1"), -5}, {pk("p1", "r2"), 30}}, VenuePolicy::ec_like);
  CHECK(ec.forbidden == std::set<PairKey>{pk("p1", "r1")});
  CHECK(ec.soft_penalized.count(pk("p1", "r3")));
}

TEST_CASE("soft penalty steers away from missing preferences") {
  auto in = two_by_two();
  in.sim.soft_penalized = {pk("p1", "r1"), pk("p2", "r2")};
  auto a = solve(in.sim, in.rel, AssignmentSpec{1, 1, 0.0, 1.0});
  CHECK(a.pairs == std::vector<PairKey>{pk("p1", "r2"), pk("p2", "r1")});
}

TEST_CASE("manual edits are re-validated") {
  auto in = two_by_two();
  AssignmentSpec spec{1, 1, 0.0, 0.0};
  auto a = solve(in.sim, in.rel, spec);
  auto swapped = apply_manual_edits(a,
                                    {{pk("p1", "r1"), false}, {pk("p2", "r2"), false},
                                     {pk("p1", "r2"), true}, {pk("p2", "r1"), true}},
                                    in.sim, in.rel, spec);
  CHECK(swapped.cited_count == 1);
  CHECK_THROWS_AS(apply_manual_edits(a, {{pk("p1", "r2"), true}}, in.sim, in.rel, spec), Error);
}

TEST_CASE("solution is deterministic and valid") {
  std::mt19937_64 gen(31);
  auto in = random_instance(gen, 12, 10, 0.15);
  AssignmentSpec spec{3, 4, 0.3, 0.0};
  auto a = solve(in.sim, in.rel, spec);
  CHECK_NOTHROW(validate_assignment(a, in.sim, spec));
  CHECK(solve(in.sim, in.rel, spec).pairs == a.pairs);
}

}
