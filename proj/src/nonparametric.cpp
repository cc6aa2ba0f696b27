#include "revaudit/nonparametric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include <json.hpp>

#include "revaudit/csv.hpp"
#include "revaudit/error.hpp"
#include "revaudit/kernels.hpp"
#include "revaudit/rng.hpp"

namespace revaudit {

namespace {

int bid_class(int bid) {
  if (bid == 3) return 0;
  if (bid == 4 || bid == 5) return 1;
  return -1;
}

void require_matching_fields(const AnalysisPair& p, const SubmissionId& s) {
  if (!p.sr_confidence || !p.text_overlap || !p.bid)
    throw Error(ErrorKind::validation, "matching needs confidence, text overlap and bid; pair (" + s.str() + ", " +
                                           p.reviewer.str() + ") lacks one");
}

// Kuhn's augmenting paths restricted to the still-free vertices.
class Matcher {
 public:
  Matcher(std::vector<std::vector<int>> adj, std::size_t right) : adj_(std::move(adj)), right_(right) {}

  int max_matching(const std::vector<bool>& left_on, const std::vector<bool>& right_on) {
    std::vector<int> owner(right_, -1);
    int size = 0;
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      if (!left_on[u]) continue;
      std::vector<bool> seen(right_, false);
      if (augment(static_cast<int>(u), owner, seen, right_on)) ++size;
    }
    return size;
  }

  const std::vector<int>& edges(std::size_t u) const { return adj_[u]; }

 private:
  bool augment(int u, std::vector<int>& owner, std::vector<bool>& seen, const std::vector<bool>& right_on) {
    for (int v : adj_[static_cast<std::size_t>(u)]) {
      if (!right_on[static_cast<std::size_t>(v)] || seen[static_cast<std::size_t>(v)]) continue;
      seen[static_cast<std::size_t>(v)] = true;
      int& o = owner[static_cast<std::size_t>(v)];
      if (o < 0 || augment(o, owner, seen, right_on)) {
        o = u;
        return true;
      }
    }
    return false;
  }

  std::vector<std::vector<int>> adj_;
  std::size_t right_;
};

}  // namespace

bool compatible(const AnalysisPair& c, const AnalysisPair& u, double overlap_tolerance) {
  if (c.sr_expertise != u.sr_expertise) return false;
  if (c.sr_confidence != u.sr_confidence) return false;
  if (!c.text_overlap || !u.text_overlap) return false;
  if (std::fabs(*c.text_overlap - *u.text_overlap) > overlap_tolerance + 1e-9) return false;
  if (!c.bid || !u.bid) return false;
  const int bc = bid_class(*c.bid);
  if (bc < 0 || bc != bid_class(*u.bid)) return false;
  return c.seniority == u.seniority;
}

std::vector<MatchedTriple> match(const AnalysisDataset& analysis, double overlap_tolerance) {
  std::vector<MatchedTriple> out;
  for (const auto& g : analysis.groups) {
    std::vector<const AnalysisPair*> cited, uncited;
    for (const auto& p : g.cited) {
      require_matching_fields(p, g.id);
      cited.push_back(&p);
    }
    for (const auto& p : g.uncited) {
      require_matching_fields(p, g.id);
      uncited.push_back(&p);
    }
    auto by_id = [](const AnalysisPair* a, const AnalysisPair* b) { return a->reviewer < b->reviewer; };
    std::sort(cited.begin(), cited.end(), by_id);
    std::sort(uncited.begin(), uncited.end(), by_id);

    std::vector<std::vector<int>> adj(cited.size());
    for (std::size_t i = 0; i < cited.size(); ++i)
      for (std::size_t j = 0; j < uncited.size(); ++j)
        if (compatible(*cited[i], *uncited[j], overlap_tolerance)) adj[i].push_back(static_cast<int>(j));

    Matcher m(std::move(adj), uncited.size());
    std::vector<bool> left_on(cited.size(), true), right_on(uncited.size(), true);
    const int target = m.max_matching(left_on, right_on);
    int fixed = 0;
    for (std::size_t i = 0; i < cited.size() && fixed < target; ++i) {
      left_on[i] = false;
      for (int j : m.edges(i)) {
        if (!right_on[static_cast<std::size_t>(j)]) continue;
        right_on[static_cast<std::size_t>(j)] = false;
        if (fixed + 1 + m.max_matching(left_on, right_on) == target) {
          ++fixed;
          const auto* c = cited[i];
          const auto* u = uncited[static_cast<std::size_t>(j)];
          out.push_back({g.id, c->reviewer, u->reviewer, c->score, u->score});
          break;
        }
        right_on[static_cast<std::size_t>(j)] = true;
      }
    }
  }
  return out;
}

namespace {

std::vector<double> differences(const std::vector<MatchedTriple>& triples) {
  std::vector<double> d;
  d.reserve(triples.size());
  for (const auto& t : triples) d.push_back(static_cast<double>(t.difference()));
  return d;
}

double observed_sum(const std::vector<double>& d) {
  double s = 0;
  for (double v : d) s += v;
  return s;
}

std::size_t worker_count(std::size_t work) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("REVAUDIT_THREADS")) n = std::max(1, std::atoi(env));
  return std::min<std::size_t>(n, std::max<std::size_t>(1, work / 256));
}

// Runs body(begin, end) over [0, total) in contiguous chunks.
template <typename Body>
void parallel_chunks(std::size_t total, Body body) {
  const std::size_t workers = worker_count(total);
  if (workers <= 1) {
    body(0, total);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t step = (total + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * step, e = std::min(total, b + step);
    if (b < e) pool.emplace_back([=, &body] { body(b, e); });
  }
}

}  // namespace

PermutationResult permutation_test(const std::vector<MatchedTriple>& triples, std::size_t iterations,
                                   std::uint64_t seed, std::size_t bootstrap_iterations) {
  if (triples.empty()) throw Error(ErrorKind::no_data, "permutation test needs at least one matched triple");
  if (iterations == 0) throw Error(ErrorKind::usage, "permutation test needs at least one iteration");
  const std::vector<double> d = differences(triples);
  const std::size_t k = d.size();
  const std::size_t words = (k + 63) / 64;
  // Differences are integers, so the signed sums are exact and the
  // comparison needs no tolerance.
  const double threshold = std::fabs(observed_sum(d));
  const std::uint64_t key = rng::derive(seed, rng::streams::permutation);
  const auto& kt = kernels::active();

  std::atomic<std::size_t> extreme{0};
  parallel_chunks(iterations, [&](std::size_t b, std::size_t e) {
    std::vector<std::uint64_t> signs(words);
    std::size_t local = 0;
    for (std::size_t it = b; it < e; ++it) {
      for (std::size_t w = 0; w < words; ++w) signs[w] = rng::counter_bits(key, it, w);
      if (std::fabs(kt.signed_sum(d.data(), signs.data(), k)) >= threshold) ++local;
    }
    extreme += local;
  });

  PermutationResult r;
  r.k = k;
  r.tau = observed_sum(d) / static_cast<double>(k);
  r.iterations = iterations;
  r.seed = seed;
  r.p_two_sided = static_cast<double>(1 + extreme.load()) / static_cast<double>(1 + iterations);
  if (bootstrap_iterations > 0 && k >= 2) {
    r.ci95_bootstrap = bootstrap_ci(triples, bootstrap_iterations, seed);
    r.bootstrap_iterations = bootstrap_iterations;
  }
  return r;
}

double exact_permutation_p(const std::vector<MatchedTriple>& triples) {
  if (triples.empty()) throw Error(ErrorKind::no_data, "permutation test needs at least one matched triple");
  if (triples.size() > 30) throw Error(ErrorKind::usage, "exact enumeration is limited to 30 triples");
  std::vector<long long> d;
  for (const auto& t : triples) d.push_back(t.difference());
  long long total = 0;
  for (long long v : d) total += v;
  const long long threshold = std::llabs(total);
  const std::uint64_t patterns = std::uint64_t{1} << d.size();
  std::uint64_t hits = 0;
  for (std::uint64_t m = 0; m < patterns; ++m) {
    long long s = 0;
    for (std::size_t i = 0; i < d.size(); ++i) s += (m >> i) & 1U ? -d[i] : d[i];
    if (std::llabs(s) >= threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(patterns);
}

PermutationResult exact_permutation_test(const std::vector<MatchedTriple>& triples) {
  PermutationResult r;
  r.p_two_sided = exact_permutation_p(triples);
  r.k = triples.size();
  r.tau = observed_sum(differences(triples)) / static_cast<double>(r.k);
  r.iterations = std::size_t{1} << r.k;
  r.exact = true;
  return r;
}

Interval bootstrap_ci(const std::vector<MatchedTriple>& triples, std::size_t iterations, std::uint64_t seed) {
  if (triples.size() < 2) throw Error(ErrorKind::sample_size, "bootstrap needs at least two matched triples");
  if (iterations == 0) throw Error(ErrorKind::usage, "bootstrap needs at least one iteration");
  const std::vector<double> d = differences(triples);
  const std::size_t k = d.size();
  const auto& kt = kernels::active();
  std::vector<double> taus(iterations);
  parallel_chunks(iterations, [&](std::size_t b, std::size_t e) {
    std::vector<std::uint32_t> idx(k);
    for (std::size_t it = b; it < e; ++it) {
      rng::Xoshiro256 gen(rng::derive(seed, rng::streams::bootstrap, it));
      for (auto& i : idx) i = static_cast<std::uint32_t>(gen.below(k));
      taus[it] = kt.gather_sum(d.data(), idx.data(), k) / static_cast<double>(k);
    }
  });
  std::sort(taus.begin(), taus.end());
  auto quantile = [&](double q) {
    const double h = (static_cast<double>(iterations) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, iterations - 1);
    return taus[lo] + (h - static_cast<double>(lo)) * (taus[hi] - taus[lo]);
  };
  return {quantile(0.025), quantile(0.975)};
}

void save_triples(const std::filesystem::path& path, const std::vector<MatchedTriple>& triples) {
  csv::Table t;
  t.header = {"submission_id", "cited_reviewer_id", "uncited_reviewer_id", "score_cited", "score_uncited"};
  for (const auto& x : triples)
    t.rows.push_back({x.submission_id.str(), x.cited_reviewer_id.str(), x.uncited_reviewer_id.str(),
                      std::to_string(x.score_cited), std::to_string(x.score_uncited)});
  csv::write(path, t);
}

std::vector<MatchedTriple> load_triples(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorKind::missing_artifact, "missing artifact: " + path.string());
  const auto t = csv::read(path);
  const std::string ctx = path.string();
  const auto cs = t.column("submission_id", ctx), cc = t.column("cited_reviewer_id", ctx),
             cu = t.column("uncited_reviewer_id", ctx), sc = t.column("score_cited", ctx),
             su = t.column("score_uncited", ctx);
  std::vector<MatchedTriple> out;
  for (const auto& row : t.rows) {
    try {
      out.push_back({SubmissionId(row[cs]), ReviewerId(row[cc]), ReviewerId(row[cu]), std::stoi(row[sc]),
                     std::stoi(row[su])});
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::parse, ctx + ": malformed score");
    }
  }
  return out;
}

void save_permutation(const std::filesystem::path& path, const PermutationResult& r,
                      const std::vector<MatchedTriple>& triples) {
  std::set<ReviewerId> reviewers;
  std::set<SubmissionId> submissions;
  for (const auto& t : triples) {
    reviewers.insert(t.cited_reviewer_id);
    reviewers.insert(t.uncited_reviewer_id);
    submissions.insert(t.submission_id);
  }
  nlohmann::ordered_json j;
  j["tau"] = r.tau;
  j["k"] = r.k;
  j["pairs"] = 2 * r.k;
  j["submissions"] = submissions.size();
  j["reviewers"] = reviewers.size();
  j["p_two_sided"] = r.p_two_sided;
  j["exact"] = r.exact;
  j["iterations"] = r.iterations;
  j["seed"] = r.seed;
  if (r.ci95_bootstrap) {
    j["ci95_bootstrap"] = {r.ci95_bootstrap->lo, r.ci95_bootstrap->hi};
  } else {
    j["ci95_bootstrap"] = nullptr;
  }
  j["bootstrap_iterations"] = r.bootstrap_iterations;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

PermutationResult load_permutation(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::missing_artifact, "missing artifact: " + path.string());
  PermutationResult r;
  try {
    nlohmann::json j;
    in >> j;
    r.tau = j.at("tau").get<double>();
    r.k = j.at("k").get<std::size_t>();
    r.p_two_sided = j.at("p_two_sided").get<double>();
    r.exact = j.at("exact").get<bool>();
    r.iterations = j.at("iterations").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("ci95_bootstrap").is_null())
      r.ci95_bootstrap = Interval{j["ci95_bootstrap"].at(0).get<double>(), j["ci95_bootstrap"].at(1).get<double>()};
    r.bootstrap_iterations = j.at("bootstrap_iterations").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
  return r;
}

}  // namespace revaudit
