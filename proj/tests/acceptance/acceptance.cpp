// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "../common/oracles.hpp"
#include "revaudit/citation_parser.hpp"
#include "revaudit/effect_size.hpp"
#include "revaudit/error.hpp"
#include "revaudit/filter.hpp"
#include "revaudit/nonparametric.hpp"
#include "revaudit/parametric.hpp"
#include "revaudit/rng.hpp"
#include "revaudit/synthetic.hpp"

using namespace revaudit;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool rejects(double p) { return p <= 0.05; }

// Largest rejection rate compatible with a nominal 0.05 level over r runs.
double nominal_ceiling(std::size_t r) { return 0.05 + 2.0 * std::sqrt(0.05 * 0.95 / static_cast<double>(r)); }

Verdict planted_effect_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t runs = 500;
  std::size_t covered = 0, failed = 0;
  std::vector<double> est;
  for (std::size_t r = 0; r < runs; ++r) {
    auto cfg = GeneratorConfig::ec_like();
    cfg.n_submissions = 300;
    cfg.alpha_star = 0.3;
    cfg.sigma0 = 1.0;
    cfg.seed = rng::derive(101, 0, r);
    try {
      auto conf = generate(cfg);
      auto relation = detect_citations(conf.dataset, conf.dataset.assigned_pairs());
      auto analysis = filter(conf.dataset, relation).first;
      auto fit = fit_wls(build_rows(analysis, ScoreChannel::latent), analysis.covariate_names);
      est.push_back(fit.alpha_star().estimate);
      covered += fit.alpha_star().ci95.contains(0.3);
    } catch (const Error&) {
      ++failed;
    }
  }
  const double elapsed = seconds_since(t0);
  double mean = 0, ss = 0;
  for (double e : est) mean += e;
  mean /= static_cast<double>(est.size());
  for (double e : est) ss += (e - mean) * (e - mean);
  const double se = std::sqrt(ss / static_cast<double>(est.size() - 1) / static_cast<double>(est.size()));
  const double coverage = static_cast<double>(covered) / runs;
  Verdict v;
  v.pass = coverage >= 0.93 && std::abs(mean - 0.3) <= 2 * se && elapsed < 120.0 && failed == 0;
  v.detail = fmt("coverage %.3f over %zu runs (need >= 0.93), mean %.4f, |mean - 0.3| = %.4f vs 2 SE = %.4f, "
                 "%zu failed fits, %.1f s (need < 120)",
                 coverage, runs, mean, std::abs(mean - 0.3), 2 * se, failed, elapsed);
  return v;
}

struct ScenarioRates {
  double wls = 0, perm = 0, naive_beyond_3se = 0, mean_naive_z = 0, mean_k = 0;
  std::size_t failed = 0;
  double seconds = 0;
};

// ICML-like conferences with no citation effect; both tests on every run.
ScenarioRates null_scenario(double correlation, std::size_t runs, std::uint64_t master) {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioRates out;
  std::size_t wls = 0, perm = 0, beyond = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    auto cfg = GeneratorConfig::icml_like();
    cfg.n_submissions = 5000;
    cfg.alpha_star = 0.0;
    cfg.confounder_correlation = correlation;
    cfg.render_references = false;
    cfg.seed = rng::derive(master, 0, r);
    try {
      auto conf = generate(cfg);
      auto analysis = filter(conf.dataset, conf.relation).first;
      auto fit = fit_wls(build_rows(analysis, ScoreChannel::latent), analysis.covariate_names);
      auto triples = match(analysis);
      auto p = permutation_test(triples, 10000, rng::derive(master, 1, r));
      auto gap = naive_gap(analysis);
      wls += rejects(fit.alpha_star().p_value);
      perm += rejects(p.p_two_sided);
      beyond += gap.gap > 3.0 * gap.std_error;
      out.mean_naive_z += gap.gap / gap.std_error;
      out.mean_k += static_cast<double>(triples.size());
    } catch (const Error&) {
      ++out.failed;
    }
  }
  const double n = static_cast<double>(runs);
  out.wls = wls / n;
  out.perm = perm / n;
  out.naive_beyond_3se = beyond / n;
  out.mean_naive_z /= n;
  out.mean_k /= n;
  out.seconds = seconds_since(t0);
  return out;
}

Verdict null_calibration() {
  const std::size_t runs = 1000;
  auto s = null_scenario(0.0, runs, 202);
  Verdict v;
  v.pass = s.wls >= 0.03 && s.wls <= 0.07 && s.perm >= 0.03 && s.perm <= 0.07 && s.seconds < 300.0 && s.failed == 0;
  v.detail = fmt("rejection at 0.05 over %zu runs: fit_wls %.3f, permutation_test %.3f (need both in [0.03, 0.07]); "
                 "mean K %.1f triples, %zu failed runs, %.1f s (need < 300)",
                 runs, s.wls, s.perm, s.mean_k, s.failed, s.seconds);
  return v;
}

Verdict confounder_robustness() {
  const std::size_t runs = 1000;
  auto s = null_scenario(0.5, runs, 303);
  const double ceiling = nominal_ceiling(runs);
  Verdict v;
  v.pass = s.naive_beyond_3se >= 0.9 && s.wls <= ceiling && s.perm <= ceiling && s.failed == 0;
  v.detail = fmt("naive gap > 3 SE in %.3f of %zu runs (mean z %.2f, need >= 0.9 of runs); rejection fit_wls %.3f, "
                 "permutation_test %.3f (need <= %.4f); %zu failed runs",
                 s.naive_beyond_3se, runs, s.mean_naive_z, s.wls, s.perm, ceiling, s.failed);
  return v;
}

Verdict wls_exactness() {
  std::mt19937_64 gen(404);
  std::normal_distribution<double> z;
  std::uniform_int_distribution<int> count(1, 4);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t p = 1 + static_cast<std::size_t>(t % 6);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(p + 2, 200)(gen);
    std::vector<AnalysisRow> rows(n);
    std::vector<std::string> names;
    for (std::size_t j = 1; j < p; ++j) names.push_back("x" + std::to_string(j));
    for (std::size_t i = 0; i < n; ++i) {
      auto& r = rows[i];
      r.submission_id = SubmissionId("s" + std::to_string(i));
      r.n_cited = count(gen);
      r.n_uncited = count(gen);
      r.weight = 1.0 / (1.0 / r.n_cited + 1.0 / r.n_uncited);
      r.score_delta = z(gen);
      for (std::size_t j = 1; j < p; ++j) {
        r.covariate_deltas.push_back(z(gen) * static_cast<double>(j));
        r.score_delta += 0.3 * r.covariate_deltas.back();
      }
    }
    auto fit = fit_wls(rows, names);
    auto beta = oracle::wls(rows);
    for (std::size_t j = 0; j < p; ++j) {
      const double scale = std::max(1.0, std::abs(beta(static_cast<Eigen::Index>(j))));
      worst = std::max(worst, std::abs(fit.coefficients[j].estimate - beta(static_cast<Eigen::Index>(j))) / scale);
    }
  }
  Verdict v;
  v.pass = worst <= 1e-8;
  v.detail = fmt("max scaled coefficient error %.3e over 100 designs (n <= 200, p <= 6; need <= 1e-8)", worst);
  return v;
}

Verdict permutation_exactness() {
  std::mt19937_64 gen(505);
  std::uniform_int_distribution<int> d(-3, 3);
  double worst = 0.0, worst_exact = 0.0;
  std::size_t sets = 0;
  for (std::size_t k = 1; k <= 10; ++k) {
    for (int t = 0; t < 30; ++t) {
      std::vector<int> diffs(k);
      std::vector<MatchedTriple> triples;
      for (std::size_t i = 0; i < k; ++i) {
        diffs[i] = d(gen);
        triples.push_back({SubmissionId("s" + std::to_string(i)), ReviewerId("c"), ReviewerId("u"),
                           3 + std::max(diffs[i], 0), 3 - std::min(diffs[i], 0)});
      }
      const double exact = oracle::enumerate_sign_flips(diffs);
      worst_exact = std::max(worst_exact, std::abs(exact_permutation_p(triples) - exact));
      const double mc = permutation_test(triples, 10000, rng::derive(505, k, static_cast<std::uint64_t>(t))).p_two_sided;
      worst = std::max(worst, std::abs(mc - exact));
      ++sets;
    }
  }
  Verdict v;
  v.pass = worst <= 0.02 && worst_exact == 0.0;
  v.detail = fmt("max |Monte Carlo p - exact p| = %.4f over %zu sets with K <= 10 (need <= 0.02); "
                 "built-in enumeration vs oracle max error %.1e",
                 worst, sets, worst_exact);
  return v;
}

Verdict assignment_optimality() {
  std::mt19937_64 gen(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t checked = 0, mismatches = 0, infeasible_ok = 0, infeasible_bad = 0;
  while (checked < 200) {
    const int papers = std::uniform_int_distribution<int>(1, 4)(gen);
    const int reviewers = std::uniform_int_distribution<int>(1, 4)(gen);
    AssignmentSpec spec;
    spec.paper_load = std::uniform_int_distribution<int>(1, std::min(2, reviewers))(gen);
    spec.reviewer_cap = std::uniform_int_distribution<int>(1, 4)(gen);
    spec.lambda = std::round(u(gen) * 40.0) / 20.0;
    SimilarityMatrix sim;
    CitationRelation rel;
    for (int p = 0; p < papers; ++p) {
      for (int r = 0; r < reviewers; ++r) {
        PairKey key{SubmissionId("p" + std::to_string(p)), ReviewerId("r" + std::to_string(r))};
        sim.sim[key] = std::round(u(gen) * 20.0) / 20.0;
        rel.set_parsed(key, u(gen) < 0.3);
        if (u(gen) < 0.1) sim.forbidden.insert(key);
      }
    }
    auto brute = oracle::brute_force_assignment(sim, rel, spec);
    if (!brute.feasible) {
      try {
        solve(sim, rel, spec);
        ++infeasible_bad;
      } catch (const Error& e) {
        (e.kind() == ErrorKind::infeasible ? infeasible_ok : infeasible_bad) += 1;
      }
      continue;
    }
    ++checked;
    try {
      if (solve(sim, rel, spec).pairs != brute.pairs) ++mismatches;
    } catch (const Error&) {
      ++mismatches;
    }
  }

  std::size_t sweep_violations = 0;
  for (int t = 0; t < 20; ++t) {
    SimilarityMatrix sim;
    CitationRelation rel;
    for (int p = 0; p < 6; ++p) {
      for (int r = 0; r < 9; ++r) {
        PairKey key{SubmissionId("p" + std::to_string(p)), ReviewerId("r" + std::to_string(r))};
        sim.sim[key] = u(gen);
        rel.set_parsed(key, u(gen) < 0.2);
      }
    }
    std::vector<double> lambdas;
    for (int i = 0; i < 20; ++i) lambdas.push_back(0.1 * i);
    auto sweep = tradeoff_sweep(sim, rel, AssignmentSpec{2, 2, 0.0, 0.0}, lambdas);
    for (std::size_t i = 1; i < sweep.size(); ++i)
      sweep_violations += sweep[i].cited_count < sweep[i - 1].cited_count ||
                          sweep[i].objective_quality > sweep[i - 1].objective_quality;
  }
  Verdict v;
  v.pass = mismatches == 0 && infeasible_bad == 0 && sweep_violations == 0;
  v.detail = fmt("%zu/200 instances (<= 4x4, k <= 2) differ from exhaustive optimum; %zu infeasible draws rejected "
                 "correctly, %zu not; %zu monotonicity violations over 20 sweeps of 20 points",
                 mismatches, infeasible_ok, infeasible_bad, sweep_violations);
  return v;
}

Verdict parser_fidelity() {
  CorpusConfig cc;
  cc.n_entries = 1000;
  cc.pool_size = 200;
  cc.key_collisions = 8;
  cc.seed = 707;
  auto corpus = reference_corpus(cc);
  std::size_t mismatched = 0, false_negatives = 0, pool_mentions = 0;
  std::set<ReferenceFormat> formats;
  std::map<ReviewerId, std::string> key;
  for (const auto& r : corpus.pool) key[r.id] = build_key(r).key;
  for (const auto& e : corpus.entries) {
    formats.insert(e.format);
    auto parsed = parse_reference_entry(e.text);
    mismatched += parsed.authors != e.authors;
    std::set<std::string> keys;
    for (const auto& a : parsed.authors) keys.insert(author_key(a));
    for (const auto& id : e.pool_authors) {
      ++pool_mentions;
      false_negatives += keys.count(key[id]) == 0;
    }
  }
  std::map<std::string, int> pool_count;
  for (const auto& [id, k] : key) ++pool_count[k];
  std::size_t corpus_collisions_ok = 0;
  for (const auto& k : corpus.collided_keys) corpus_collisions_ok += pool_count[k] == 2;

  auto cfg = GeneratorConfig::ec_like();
  cfg.n_submissions = 600;
  cfg.citation_prevalence = 0.4;
  cfg.key_collisions = 10;
  cfg.seed = 708;
  auto conf = generate(cfg);
  auto rel = detect_citations(conf.dataset, conf.dataset.assigned_pairs());
  std::map<std::string, int> count;
  std::map<ReviewerId, std::string> rkey;
  for (const auto& r : conf.dataset.reviewers()) ++count[rkey[r.id] = build_key(r).key];
  std::set<PairKey> expected;
  std::size_t conf_errors = 0;
  for (const auto& [pair, cited] : conf.truth.cited) {
    const bool colliding = count[rkey[pair.reviewer]] > 1;
    if (cited && colliding) expected.insert(pair);
    if (!colliding) conf_errors += rel.is_cited(pair) != cited;
  }
  const bool flagged = rel.ambiguous() == expected;

  Verdict v;
  v.pass = mismatched == 0 && false_negatives == 0 && formats.size() == 6 &&
           corpus_collisions_ok == corpus.collided_keys.size() && flagged && conf_errors == 0 && !expected.empty();
  v.detail = fmt("%zu/1000 entries differ from rendered authors across %zu formats, %zu false negatives over %zu pool "
                 "mentions; %zu of %zu colliding cited pairs flagged (%zu flags total), %zu verdict errors on "
                 "non-colliding pairs",
                 mismatched, formats.size(), false_negatives, pool_mentions, flagged ? expected.size() : 0,
                 expected.size(), rel.ambiguous().size(), conf_errors);
  return v;
}

Verdict differencing_invariance() {
  std::size_t checked = 0, differing = 0;
  for (int t = 0; t < 20; ++t) {
    auto cfg = t % 2 ? GeneratorConfig::icml_like() : GeneratorConfig::ec_like();
    cfg.n_submissions = 400;
    cfg.render_references = false;
    cfg.venue.score_min = -40;
    cfg.venue.score_max = 40;
    cfg.alpha_star = 0.2;
    cfg.seed = rng::derive(808, 0, static_cast<std::uint64_t>(t));
    auto conf = generate(cfg);
    std::mt19937_64 gen(cfg.seed);
    std::uniform_int_distribution<int> shift(-30, 30);
    std::map<SubmissionId, int> c;
    for (const auto& s : conf.dataset.submissions()) c[s.id] = shift(gen);
    auto reviews = conf.dataset.reviews();
    for (auto& r : reviews) r.score += c[r.submission_id];
    ReviewDataset shifted(conf.dataset.venue(), conf.dataset.reviewers(), conf.dataset.submissions(), reviews);
    auto a = filter(conf.dataset, conf.relation).first;
    auto b = filter(derive_covariates(shifted), conf.relation).first;
    auto rows_a = build_rows(a);
    auto rows_b = build_rows(b);
    auto fit_a = fit_wls(rows_a, a.covariate_names);
    auto fit_b = fit_wls(rows_b, b.covariate_names);
    ++checked;
    differing += !(rows_a == rows_b) || !(fit_a == fit_b);
  }
  Verdict v;
  v.pass = differing == 0;
  v.detail = fmt("%zu of %zu shifted conferences changed rows or fit (need bit-identical)", differing, checked);
  return v;
}

// Random tie-break Monte Carlo of expected ranks before and after one +1.
std::map<PairKey, double> monte_carlo_improvement(const ReviewDataset& ds, std::size_t draws, std::uint64_t seed) {
  std::vector<SubmissionId> ids;
  std::vector<long long> sum, cnt;
  std::map<SubmissionId, std::size_t> at;
  for (const auto& s : ds.submissions()) {
    at[s.id] = ids.size();
    ids.push_back(s.id);
    sum.push_back(0);
    cnt.push_back(0);
  }
  for (const auto& r : ds.reviews()) {
    sum[at[r.submission_id]] += r.score;
    cnt[at[r.submission_id]] += 1;
  }
  const std::size_t n = ids.size();
  std::map<PairKey, double> total;
  std::mt19937_64 gen(seed);
  std::vector<std::uint64_t> key(n);
  auto rank = [&](std::size_t s, long long s_sum) {
    std::size_t above = 0;
    for (std::size_t t = 0; t < n; ++t) {
      if (t == s) continue;
      const long long lhs = sum[t] * cnt[s], rhs = s_sum * cnt[t];
      above += lhs > rhs || (lhs == rhs && key[t] > key[s]);
    }
    return static_cast<double>(above + 1);
  };
  for (std::size_t d = 0; d < draws; ++d) {
    for (auto& k : key) k = gen();
    for (const auto& r : ds.reviews()) {
      const std::size_t s = at[r.submission_id];
      const int raised = std::min(r.score + 1, ds.venue().score_max);
      total[r.key()] += rank(s, sum[s]) - rank(s, sum[s] + raised - r.score);
    }
  }
  for (auto& [k, v] : total) v = 100.0 * v / static_cast<double>(draws) / static_cast<double>(n);
  return total;
}

Verdict effect_size_properties() {
  auto cfg = GeneratorConfig::icml_like();
  cfg.n_submissions = 1000;
  cfg.render_references = false;
  cfg.seed = 909;
  auto big = rank_improvement(generate(cfg).dataset);
  std::size_t worsened = 0, top_nonzero = 0;
  for (const auto& [k, v] : big.per_pair) {
    worsened += v.rank_after > v.rank_before;
    top_nonzero += v.rank_before == 1.0 && v.improvement != 0.0;
  }

  cfg.n_submissions = 50;
  cfg.seed = 910;
  auto small = generate(cfg).dataset;
  auto exact = rank_improvement(small);
  auto mc = monte_carlo_improvement(small, 100000, 911);
  double worst = 0.0, mc_avg = 0.0;
  for (const auto& [k, v] : exact.per_pair) {
    worst = std::max(worst, std::abs(v.improvement - mc.at(k)));
    mc_avg += mc.at(k);
  }
  mc_avg /= static_cast<double>(exact.per_pair.size());
  worst = std::max(worst, std::abs(mc_avg - exact.average_improvement));
  Verdict v;
  v.pass = worsened == 0 && top_nonzero == 0 && worst <= 0.2;
  v.detail = fmt("%zu pairs worsened and %zu top-ranked pairs improved among %zu; midrank vs 100,000-draw Monte Carlo "
                 "max gap %.3f pp on 50 submissions (average %.3f%% vs %.3f%%; need <= 0.2 pp)",
                 worsened, top_nonzero, big.per_pair.size(), worst, exact.average_improvement, mc_avg);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"planted-effect recovery (parametric)", planted_effect_recovery},
      {"null calibration (both tests)", null_calibration},
      {"confounder robustness", confounder_robustness},
      {"WLS exactness", wls_exactness},
      {"permutation exactness", permutation_exactness},
      {"assignment optimality", assignment_optimality},
      {"parser fidelity", parser_fidelity},
      {"differencing invariance", differencing_invariance},
      {"effect-size properties", effect_size_properties},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s  %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
