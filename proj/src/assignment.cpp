#include "revaudit/assignment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <queue>
#include <thread>

#include "revaudit/csv.hpp"
#include "revaudit/error.hpp"

namespace revaudit {

std::vector<SubmissionId> SimilarityMatrix::submissions() const {
  std::vector<SubmissionId> out;
  for (const auto& [pair, s] : sim)
    if (out.empty() || out.back() != pair.submission) out.push_back(pair.submission);
  return out;
}

std::vector<ReviewerId> SimilarityMatrix::reviewers() const {
  std::set<ReviewerId> ids;
  for (const auto& [pair, s] : sim) ids.insert(pair.reviewer);
  return {ids.begin(), ids.end()};
}

namespace {

using Cost = __int128;

std::int64_t quantize(double v) { return static_cast<std::int64_t>(std::nearbyint(v * kCostScale)); }

std::int64_t conventional_units(const SimilarityMatrix& sim, const PairKey& pair, double value,
                                const AssignmentSpec& spec) {
  std::int64_t u = quantize(value);
  if (sim.soft_penalized.count(pair)) u -= quantize(spec.missing_pref_penalty);
  return u;
}

class MinCostFlow {
 public:
  explicit MinCostFlow(int n) : graph_(static_cast<std::size_t>(n)) {}

  std::size_t add_edge(int from, int to, int cap, Cost cost) {
    graph_[from].push_back({to, cap, cost, graph_[to].size()});
    graph_[to].push_back({from, 0, -cost, graph_[from].size() - 1});
    return graph_[from].size() - 1;
  }

  int flow_of(int from, std::size_t edge_index) const {
    const Edge& e = graph_[from][edge_index];
    return graph_[e.to][e.rev].cap;
  }

  // Sends up to `limit` units from s to t at minimum cost. `potential` must
  // make every residual reduced cost non-negative on entry.
  int run(int s, int t, int limit, std::vector<Cost> potential) {
    const auto n = graph_.size();
    const Cost inf = std::numeric_limits<std::int64_t>::max() * static_cast<Cost>(1LL << 40);
    int sent = 0;
    std::vector<Cost> dist(n);
    std::vector<int> prev_node(n);
    std::vector<std::size_t> prev_edge(n);
    while (sent < limit) {
      std::fill(dist.begin(), dist.end(), inf);
      dist[s] = 0;
      using Item = std::pair<Cost, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
      heap.push({0, s});
      while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d != dist[u]) continue;
        for (std::size_t i = 0; i < graph_[u].size(); ++i) {
          const Edge& e = graph_[u][i];
          if (e.cap == 0) continue;
          const Cost nd = d + e.cost + potential[u] - potential[e.to];
          if (nd < dist[e.to]) {
            dist[e.to] = nd;
            prev_node[e.to] = u;
            prev_edge[e.to] = i;
            heap.push({nd, e.to});
          }
        }
      }
      if (dist[t] == inf) break;
      for (std::size_t v = 0; v < n; ++v) potential[v] += std::min(dist[v], dist[t]);
      int push = limit - sent;
      for (int v = t; v != s; v = prev_node[v]) push = std::min(push, graph_[prev_node[v]][prev_edge[v]].cap);
      for (int v = t; v != s; v = prev_node[v]) {
        Edge& e = graph_[prev_node[v]][prev_edge[v]];
        e.cap -= push;
        graph_[v][e.rev].cap += push;
      }
      sent += push;
    }
    return sent;
  }

 private:
  struct Edge {
    int to;
    int cap;
    Cost cost;
    std::size_t rev;
  };
  std::vector<std::vector<Edge>> graph_;
};

std::string pair_text(const PairKey& p) { return "(" + p.submission.str() + ", " + p.reviewer.str() + ")"; }

}  // namespace

Assignment evaluate(std::vector<PairKey> pairs, const SimilarityMatrix& sim, const CitationRelation& relation,
                    const AssignmentSpec& spec) {
  std::sort(pairs.begin(), pairs.end());
  Assignment a;
  std::int64_t units = 0;
  std::set<SubmissionId> with_cited;
  for (const auto& p : pairs) {
    auto it = sim.sim.find(p);
    if (it == sim.sim.end()) throw Error(ErrorKind::validation, "pair " + pair_text(p) + " has no similarity entry");
    units += conventional_units(sim, p, it->second, spec);
    if (relation.is_cited(p)) {
      ++a.cited_count;
      with_cited.insert(p.submission);
    }
  }
  a.objective_quality = static_cast<double>(units) / kCostScale;
  a.submissions_with_cited = static_cast<int>(with_cited.size());
  a.pairs = std::move(pairs);
  return a;
}

Assignment solve(const SimilarityMatrix& sim, const CitationRelation& relation, const AssignmentSpec& spec) {
  if (spec.paper_load < 1) throw Error(ErrorKind::infeasible, "paper_load must be at least 1");
  if (spec.reviewer_cap < 0) throw Error(ErrorKind::infeasible, "reviewer_cap must be non-negative");
  if (!(spec.lambda >= 0.0)) throw Error(ErrorKind::usage, "lambda must be non-negative");

  const auto papers = sim.submissions();
  const auto reviewers = sim.reviewers();
  std::map<SubmissionId, int> paper_node;
  std::map<ReviewerId, int> reviewer_node;
  for (std::size_t i = 0; i < papers.size(); ++i) paper_node[papers[i]] = 1 + static_cast<int>(i);
  for (std::size_t i = 0; i < reviewers.size(); ++i)
    reviewer_node[reviewers[i]] = 1 + static_cast<int>(papers.size() + i);

  std::vector<PairKey> candidates;
  std::map<SubmissionId, int> eligible;
  for (const auto& [pair, s] : sim.sim) {
    if (sim.forbidden.count(pair)) continue;
    candidates.push_back(pair);
    ++eligible[pair.submission];
  }
  for (const auto& p : papers)
    if (eligible[p] < spec.paper_load)
      throw Error(ErrorKind::infeasible, "paper_load: submission " + p.str() + " has only " +
                                             std::to_string(eligible[p]) + " eligible reviewers, needs " +
                                             std::to_string(spec.paper_load));
  const long long demand = static_cast<long long>(spec.paper_load) * static_cast<long long>(papers.size());
  if (demand > static_cast<long long>(spec.reviewer_cap) * static_cast<long long>(reviewers.size()))
    throw Error(ErrorKind::infeasible, "reviewer_cap: " + std::to_string(demand) + " review slots needed but only " +
                                           std::to_string(spec.reviewer_cap) + " x " +
                                           std::to_string(reviewers.size()) + " available");

  const int source = 0;
  const int sink = 1 + static_cast<int>(papers.size() + reviewers.size());
  MinCostFlow flow(sink + 1);

  const auto n_candidates = static_cast<Cost>(candidates.size());
  const Cost tie_scale = static_cast<Cost>(demand) * n_candidates + 1;
  const std::int64_t lambda_units = quantize(spec.lambda);

  std::vector<Cost> potential(static_cast<std::size_t>(sink) + 1, 0);
  std::vector<std::size_t> edge_index(candidates.size());
  for (const auto& p : papers) flow.add_edge(source, paper_node[p], spec.paper_load, 0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& pair = candidates[i];
    const std::int64_t w = conventional_units(sim, pair, sim.sim.at(pair), spec) +
                           (relation.is_cited(pair) ? lambda_units : 0);
    const Cost tie = n_candidates - static_cast<Cost>(i);
    const Cost cost = -(static_cast<Cost>(w) * tie_scale + tie);
    const int u = paper_node[pair.submission];
    const int v = reviewer_node[pair.reviewer];
    edge_index[i] = flow.add_edge(u, v, 1, cost);
    potential[v] = std::min(potential[v], cost);
  }
  Cost sink_potential = 0;
  for (const auto& r : reviewers) {
    const int v = reviewer_node[r];
    flow.add_edge(v, sink, spec.reviewer_cap, 0);
    sink_potential = std::min(sink_potential, potential[v]);
  }
  potential[sink] = sink_potential;

  const int sent = flow.run(source, sink, static_cast<int>(demand), potential);
  if (sent < demand)
    throw Error(ErrorKind::infeasible, "reviewer_cap: only " + std::to_string(sent) + " of " + std::to_string(demand) +
                                           " review slots can be filled given forbidden pairs and caps");

  std::vector<PairKey> chosen;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (flow.flow_of(paper_node[candidates[i].submission], edge_index[i]) > 0) chosen.push_back(candidates[i]);
  return evaluate(std::move(chosen), sim, relation, spec);
}

std::vector<SweepPoint> tradeoff_sweep(const SimilarityMatrix& sim, const CitationRelation& relation,
                                       const AssignmentSpec& spec, const std::vector<double>& lambdas) {
  for (double l : lambdas)
    if (!(l >= 0.0)) throw Error(ErrorKind::usage, "sweep lambdas must be non-negative");
  std::vector<SweepPoint> out(lambdas.size());
  std::vector<std::exception_ptr> errors(lambdas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < lambdas.size(); i = next++) {
      try {
        AssignmentSpec s = spec;
        s.lambda = lambdas[i];
        const Assignment a = solve(sim, relation, s);
        out[i] = {lambdas[i], a.objective_quality, a.cited_count, a.submissions_with_cited};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(lambdas.size(), std::max(1U, std::thread::hardware_concurrency()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

double select_lambda(const std::vector<SweepPoint>& sweep, std::size_t n_submissions, double target_fraction) {
  double best = -1.0;
  for (const auto& p : sweep) {
    const double frac = n_submissions == 0 ? 0.0 : static_cast<double>(p.submissions_with_cited) / n_submissions;
    if (frac > target_fraction && (best < 0.0 || p.lambda < best)) best = p.lambda;
  }
  return best;
}

void validate_assignment(const Assignment& assignment, const SimilarityMatrix& sim, const AssignmentSpec& spec) {
  std::map<SubmissionId, int> per_paper;
  std::map<ReviewerId, int> per_reviewer;
  std::set<PairKey> seen;
  for (const auto& p : assignment.pairs) {
    if (!seen.insert(p).second) throw Error(ErrorKind::validation, "duplicate pair " + pair_text(p));
    if (!sim.sim.count(p)) throw Error(ErrorKind::validation, "pair " + pair_text(p) + " is not a candidate");
    if (sim.forbidden.count(p)) throw Error(ErrorKind::validation, "forbidden pair " + pair_text(p) + " assigned");
    ++per_paper[p.submission];
    ++per_reviewer[p.reviewer];
  }
  for (const auto& s : sim.submissions())
    if (per_paper[s] != spec.paper_load)
      throw Error(ErrorKind::validation, "paper_load: submission " + s.str() + " has " + std::to_string(per_paper[s]) +
                                             " reviewers, expected " + std::to_string(spec.paper_load));
  for (const auto& [r, n] : per_reviewer)
    if (n > spec.reviewer_cap)
      throw Error(ErrorKind::validation, "reviewer_cap: reviewer " + r.str() + " has " + std::to_string(n) +
                                             " papers, cap " + std::to_string(spec.reviewer_cap));
}

Assignment apply_manual_edits(const Assignment& assignment, const std::vector<ManualEdit>& edits,
                              const SimilarityMatrix& sim, const CitationRelation& relation,
                              const AssignmentSpec& spec) {
  std::set<PairKey> pairs(assignment.pairs.begin(), assignment.pairs.end());
  for (const auto& e : edits) {
    if (e.add) {
      if (!pairs.insert(e.pair).second) throw Error(ErrorKind::validation, "edit adds existing pair " + pair_text(e.pair));
    } else if (!pairs.erase(e.pair)) {
      throw Error(ErrorKind::validation, "edit removes unassigned pair " + pair_text(e.pair));
    }
  }
  Assignment out = evaluate({pairs.begin(), pairs.end()}, sim, relation, spec);
  validate_assignment(out, sim, spec);
  return out;
}

void apply_preference_rules(SimilarityMatrix& sim, const std::map<PairKey, int>& preferences, VenuePolicy policy) {
  for (const auto& [pair, s] : sim.sim) {
    auto it = preferences.find(pair);
    const bool missing = it == preferences.end() || (policy == VenuePolicy::ec_like && it->second == 0);
    if (missing) {
      sim.soft_penalized.insert(pair);
      continue;
    }
    const bool forbid = policy == VenuePolicy::icml_like ? it->second <= 2 : it->second < 0;
    if (forbid) sim.forbidden.insert(pair);
  }
}

// ---------------------------------------------------------------------------
// Files

namespace {

double parse_real(const std::string& text, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::parse, ctx + ": not a number: '" + text + "'");
  }
}

int parse_int(const std::string& text, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::parse, ctx + ": not an integer: '" + text + "'");
  }
}

}  // namespace

SimilarityMatrix load_similarity(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  const std::string ctx = path.string();
  const auto cs = table.column("submission_id", ctx), cr = table.column("reviewer_id", ctx),
             cv = table.column("sim", ctx);
  SimilarityMatrix m;
  for (const auto& row : table.rows) {
    const double v = parse_real(row[cv], ctx);
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::validation, ctx + ": similarity outside [0, 1]: " + row[cv]);
    if (!m.sim.emplace(PairKey{SubmissionId(row[cs]), ReviewerId(row[cr])}, v).second)
      throw Error(ErrorKind::validation, ctx + ": duplicate pair (" + row[cs] + ", " + row[cr] + ")");
  }
  return m;
}

std::map<PairKey, int> load_preferences(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  const std::string ctx = path.string();
  const auto cs = table.column("submission_id", ctx), cr = table.column("reviewer_id", ctx),
             cv = table.column("value", ctx);
  std::map<PairKey, int> out;
  for (const auto& row : table.rows) out[PairKey{SubmissionId(row[cs]), ReviewerId(row[cr])}] = parse_int(row[cv], ctx);
  return out;
}

std::vector<ManualEdit> load_manual_edits(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  const std::string ctx = path.string();
  const auto cs = table.column("submission_id", ctx), cr = table.column("reviewer_id", ctx),
             ca = table.column("action", ctx);
  std::vector<ManualEdit> out;
  for (const auto& row : table.rows) {
    if (row[ca] != "add" && row[ca] != "remove") throw Error(ErrorKind::parse, ctx + ": action must be add or remove");
    out.push_back({PairKey{SubmissionId(row[cs]), ReviewerId(row[cr])}, row[ca] == "add"});
  }
  return out;
}

void save_assignment(const std::filesystem::path& path, const Assignment& assignment, const SimilarityMatrix& sim,
                     const CitationRelation& relation) {
  csv::Table t;
  t.header = {"submission_id", "reviewer_id", "sim", "cited"};
  for (const auto& p : assignment.pairs) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", sim.sim.at(p));
    t.rows.push_back({p.submission.str(), p.reviewer.str(), buf, relation.is_cited(p) ? "1" : "0"});
  }
  csv::write(path, t);
}

std::vector<PairKey> load_assignment(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  const std::string ctx = path.string();
  const auto cs = table.column("submission_id", ctx), cr = table.column("reviewer_id", ctx);
  std::vector<PairKey> out;
  for (const auto& row : table.rows) out.push_back({SubmissionId(row[cs]), ReviewerId(row[cr])});
  std::sort(out.begin(), out.end());
  return out;
}

void save_sweep(const std::filesystem::path& path, const std::vector<SweepPoint>& sweep) {
  csv::Table t;
  t.header = {"lambda", "objective_quality", "cited_count", "submissions_with_cited"};
  for (const auto& p : sweep) {
    char l[32], q[32];
    std::snprintf(l, sizeof l, "%.6g", p.lambda);
    std::snprintf(q, sizeof q, "%.6f", p.objective_quality);
    t.rows.push_back({l, q, std::to_string(p.cited_count), std::to_string(p.submissions_with_cited)});
  }
  csv::write(path, t);
}

}  // namespace revaudit
