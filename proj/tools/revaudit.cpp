#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "revaudit/assignment.hpp"
#include "revaudit/citation_parser.hpp"
#include "revaudit/dataset.hpp"
#include "revaudit/effect_size.hpp"
#include "revaudit/error.hpp"
#include "revaudit/filter.hpp"
#include "revaudit/nonparametric.hpp"
#include "revaudit/parametric.hpp"
#include "revaudit/reports.hpp"
#include "revaudit/synthetic.hpp"

namespace fs = std::filesystem;
using namespace revaudit;

namespace {

struct Workdir {
  fs::path root;

  fs::path dataset() const { return root / "dataset"; }
  fs::path citations() const { return root / "citations.csv"; }
  fs::path operator/(const char* name) const { return root / name; }
};

void require_artifact(const fs::path& p, const std::string& producer) {
  if (!fs::exists(p))
    throw Error(ErrorKind::missing_artifact, "missing artifact " + p.string() + " (run `" + producer + "` first)");
}

void require_input(const fs::path& p) {
  if (!fs::exists(p)) throw Error(ErrorKind::io, "input file not found: " + p.string());
}

ReviewDataset load_work_dataset(const Workdir& w) {
  require_artifact(w.dataset() / "venue.json", "ingest");
  const VenueConfig venue = load_venue_config(w.dataset() / "venue.json");
  return derive_covariates(load_dataset(w.dataset(), venue));
}

CitationRelation load_work_relation(const Workdir& w) {
  require_artifact(w.citations(), "extract-citations");
  return load_relation(w.citations());
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + p.string());
  out << text;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string input;
  std::string venue_config;
  std::string references;
};

void run_ingest(const Workdir& w, const IngestArgs& a) {
  require_input(a.venue_config);
  require_input(a.input);
  const VenueConfig venue = load_venue_config(a.venue_config);
  ReviewDataset ds = load_dataset(a.input, venue);
  if (!a.references.empty()) {
    require_input(a.references);
    ds = with_references(ds, load_references(a.references));
  }
  print_warnings(ds.warnings());
  const ReviewDataset derived = derive_covariates(ds);
  save_dataset(w.dataset(), ds);
  save_references(w / "references.jsonl", ds);
  std::cout << "ingested " << ds.reviewers().size() << " reviewers, " << ds.submissions().size() << " submissions, "
            << ds.reviews().size() << " reviews into " << w.dataset().string() << '\n';
  if (derived.warnings().size() > ds.warnings().size())
    print_warnings({derived.warnings().begin() + static_cast<std::ptrdiff_t>(ds.warnings().size()),
                    derived.warnings().end()});
}

struct ExtractArgs {
  std::string overrides;
  std::size_t audit_size = 0;
  std::optional<std::uint64_t> seed;
};

void run_extract(const Workdir& w, const ExtractArgs& a) {
  const ReviewDataset ds = load_work_dataset(w);
  std::vector<std::string> warnings;
  CitationRelation rel = detect_citations(ds, ds.assigned_pairs(), &warnings);
  print_warnings(warnings);
  if (a.audit_size > 0) {
    if (!a.seed) throw Error(ErrorKind::usage, "--audit-size requires an explicit --seed");
    for (auto stratum : {AuditStratum::cited, AuditStratum::uncited}) {
      std::vector<PairKey> sample;
      try {
        sample = audit_sample(rel, stratum, a.audit_size, *a.seed);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::no_data) throw;
        std::cerr << "warning: " << e.what() << '\n';
      }
      for (const auto& p : sample) rel.mark_audited(p);
      save_audit_sample(w.root / ("audit_" + std::string(stratum == AuditStratum::cited ? "cited" : "uncited") + ".csv"),
                        sample, stratum);
    }
  } else {
    // Earlier audit samples stay authoritative for overrides.
    for (const char* name : {"audit_cited.csv", "audit_uncited.csv"}) {
      if (!fs::exists(w / name)) continue;
      for (const auto& p : load_assignment(w / name))
        if (rel.contains(p)) rel.mark_audited(p);
    }
  }
  if (!a.overrides.empty()) {
    require_input(a.overrides);
    for (const auto& [pair, cited] : load_overrides(a.overrides)) rel.apply_override(pair, cited);
  }
  save_relation(w.citations(), rel);
  std::cout << render_summary(summarize(ds, rel));
  std::cout << "ambiguous pairs: " << rel.ambiguous().size() << ", undetermined: "
            << std::count_if(rel.ambiguous().begin(), rel.ambiguous().end(),
                             [&](const PairKey& p) { return rel.is_undetermined(p); })
            << '\n';
}

struct AssignArgs {
  std::string similarity;
  std::string bids;
  std::string edits;
  AssignmentSpec spec;
  std::vector<double> sweep;
  double target_fraction = -1.0;
};

void run_assign(const Workdir& w, const AssignArgs& a) {
  const ReviewDataset ds = load_work_dataset(w);
  require_input(a.similarity);
  SimilarityMatrix sim = load_similarity(a.similarity);
  if (!a.bids.empty()) {
    require_input(a.bids);
    apply_preference_rules(sim, load_preferences(a.bids), ds.venue().venue_policy);
  }
  std::vector<PairKey> candidates;
  for (const auto& [pair, v] : sim.sim) candidates.push_back(pair);
  std::vector<std::string> warnings;
  const CitationRelation rel = detect_citations(ds, candidates, &warnings);
  print_warnings(warnings);

  AssignmentSpec spec = a.spec;
  if (!a.sweep.empty()) {
    const auto points = tradeoff_sweep(sim, rel, spec, a.sweep);
    save_sweep(w / "sweep.csv", points);
    for (const auto& p : points)
      std::cout << "lambda " << p.lambda << ": quality " << p.objective_quality << ", cited pairs " << p.cited_count
                << ", submissions with cited " << p.submissions_with_cited << '\n';
    if (a.target_fraction >= 0.0) {
      const double chosen = select_lambda(points, sim.submissions().size(), a.target_fraction);
      if (chosen < 0.0)
        throw Error(ErrorKind::infeasible, "no swept lambda reaches the target fraction of submissions with a cited reviewer");
      spec.lambda = chosen;
      std::cout << "selected lambda " << chosen << '\n';
    }
  }
  Assignment result = solve(sim, rel, spec);
  if (!a.edits.empty()) {
    require_input(a.edits);
    result = apply_manual_edits(result, load_manual_edits(a.edits), sim, rel, spec);
  }
  save_assignment(w / "assignment.csv", result, sim, rel);
  std::cout << "assigned " << result.pairs.size() << " pairs; quality " << result.objective_quality << ", cited pairs "
            << result.cited_count << ", submissions with cited " << result.submissions_with_cited << '\n';
}

void run_filter(const Workdir& w) {
  const ReviewDataset ds = load_work_dataset(w);
  const CitationRelation rel = load_work_relation(w);
  std::cout << render_missingness(missingness_report(ds, rel));
  auto [analysis, report] = filter(ds, rel);
  save_filter_outputs(w.root, analysis, report);
  print_warnings(report.warnings);
  std::cout << "eligible submissions: " << report.eligible_submissions << " (of " << report.initially_eligible
            << " before missing-value and exclusion steps), pairs: " << report.retained_pairs
            << ", reviewers: " << report.retained_reviewers << ", dropped for missing values: " << report.dropped_missing
            << ", excluded submissions: " << report.excluded_submissions.size() << '\n';
}

AnalysisDataset load_work_analysis(const Workdir& w, const ReviewDataset& ds) {
  require_artifact(w / "analysis_pairs.csv", "filter");
  require_artifact(w / "filter_report.json", "filter");
  return build_analysis_dataset(ds, load_analysis_pairs(w / "analysis_pairs.csv"));
}

struct ParametricArgs {
  std::string channel = "observed";
  bool drop_constant = false;
};

std::pair<std::vector<AnalysisRow>, FitResult> parametric_fit(const AnalysisDataset& analysis, ScoreChannel channel,
                                                              bool drop_constant, std::vector<std::string>& warnings) {
  auto rows = build_rows(analysis, channel, drop_constant ? nullptr : &warnings);
  auto names = analysis.covariate_names;
  if (drop_constant)
    for (const auto& n : drop_constant_covariates(rows, names))
      warnings.push_back("covariate " + n + " is constant across rows and was dropped");
  return {rows, fit_wls(rows, names)};
}

std::string p_clause(double p) {
  const std::string text = format_p(p);
  return text.front() == '<' ? text : "= " + text;
}

void run_parametric(const Workdir& w, const ParametricArgs& a) {
  const ReviewDataset ds = load_work_dataset(w);
  const AnalysisDataset analysis = load_work_analysis(w, ds);
  const ScoreChannel channel = parse_channel(a.channel);
  std::vector<std::string> warnings;
  auto [rows, fit] = parametric_fit(analysis, channel, a.drop_constant, warnings);
  print_warnings(warnings);
  save_fit(w / "fit.json", fit, channel, warnings);
  save_diagnostics(w.root, diagnostics(fit, rows));
  const auto& c = fit.alpha_star();
  std::printf("alpha_star = %.4f, 95%% CI [%.4f, %.4f], p %s (n = %zu, df = %zu, sigma0_hat = %.4f)\n", c.estimate,
              c.ci95.lo, c.ci95.hi, p_clause(c.p_value).c_str(), fit.n_rows, fit.df, fit.sigma0_hat);
}

struct NonparametricArgs {
  std::size_t iterations = 10000;
  std::size_t bootstrap = 10000;
  std::optional<std::uint64_t> seed;
  double overlap_tolerance = kDefaultOverlapTolerance;
  bool exact = false;
};

void run_nonparametric(const Workdir& w, const NonparametricArgs& a) {
  const ReviewDataset ds = load_work_dataset(w);
  const AnalysisDataset analysis = load_work_analysis(w, ds);
  const auto triples = match(analysis, a.overlap_tolerance);
  save_triples(w / "triples.csv", triples);
  PermutationResult r;
  if (a.exact) {
    r = exact_permutation_test(triples);
    if (a.bootstrap > 0 && triples.size() >= 2) {
      if (!a.seed) throw Error(ErrorKind::usage, "the bootstrap interval requires an explicit --seed (or --bootstrap 0)");
      r.ci95_bootstrap = bootstrap_ci(triples, a.bootstrap, *a.seed);
      r.bootstrap_iterations = a.bootstrap;
      r.seed = *a.seed;
    }
  } else {
    if (!a.seed) throw Error(ErrorKind::usage, "the permutation test requires an explicit --seed");
    r = permutation_test(triples, a.iterations, *a.seed, a.bootstrap);
  }
  save_permutation(w / "permutation.json", r, triples);
  std::printf("tau = %.4f over K = %zu triples (%zu pairs), p %s", r.tau, r.k, 2 * r.k, p_clause(r.p_two_sided).c_str());
  if (r.ci95_bootstrap) std::printf(", bootstrap 95%% CI [%.4f, %.4f]", r.ci95_bootstrap->lo, r.ci95_bootstrap->hi);
  std::printf("\n");
}

void run_diagnostics(const Workdir& w) {
  require_artifact(w / "fit.json", "analyze --parametric");
  std::ifstream in(w / "fit.json");
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::parse, "fit.json is not valid JSON");
  const ScoreChannel channel = parse_channel(j.value("channel", std::string("observed")));
  const FitResult saved = load_fit(w / "fit.json");
  const ReviewDataset ds = load_work_dataset(w);
  const AnalysisDataset analysis = load_work_analysis(w, ds);
  auto rows = build_rows(analysis, channel);
  std::vector<std::string> names;
  for (std::size_t i = 1; i < saved.coefficients.size(); ++i) names.push_back(saved.coefficients[i].name);
  if (names.size() != analysis.covariate_names.size()) {
    names = analysis.covariate_names;
    drop_constant_covariates(rows, names);
  }
  const FitResult fit = fit_wls(rows, names);
  const auto bundle = diagnostics(fit, rows);
  save_diagnostics(w.root, bundle);
  std::cout << "wrote residuals.csv (" << bundle.residuals.size() << " rows) and qq.csv (" << bundle.qq.size()
            << " rows)\n";
}

struct EffectArgs {
  std::string mode = "pairs";
  bool uncapped = false;
};

void run_effect_size(const Workdir& w, const EffectArgs& a) {
  const ReviewDataset ds = load_work_dataset(w);
  const auto outcome = rank_improvement(ds, parse_averaging_mode(a.mode), !a.uncapped);
  save_ranking(w.root, outcome);
  std::printf("average improvement from a one-point increase: %.2f%% of %zu submissions (%s average, %s)\n",
              outcome.average_improvement, outcome.n_submissions, std::string(to_string(outcome.mode)).c_str(),
              outcome.capped ? "capped at score_max" : "uncapped");
}

struct SimulateArgs {
  std::string config;
  std::string policy = "EC_LIKE";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_submissions;
  std::optional<double> alpha_star;
  std::optional<double> sigma0;
  std::optional<double> prevalence;
  std::optional<double> correlation;
  std::optional<double> exclusion_rate;
  std::optional<std::size_t> collisions;
};

void run_simulate(const Workdir& w, const SimulateArgs& a) {
  GeneratorConfig c;
  if (!a.config.empty()) {
    require_input(a.config);
    c = load_generator_config(a.config);
  } else {
    c = parse_policy(a.policy) == VenuePolicy::icml_like ? GeneratorConfig::icml_like() : GeneratorConfig::ec_like();
  }
  if (!a.seed) throw Error(ErrorKind::usage, "simulate requires an explicit --seed");
  c.seed = *a.seed;
  if (a.n_submissions) c.n_submissions = *a.n_submissions;
  if (a.alpha_star) c.alpha_star = *a.alpha_star;
  if (a.sigma0) c.sigma0 = *a.sigma0;
  if (a.prevalence) c.citation_prevalence = *a.prevalence;
  if (a.correlation) c.confounder_correlation = *a.correlation;
  if (a.exclusion_rate) c.exclusion_rate = *a.exclusion_rate;
  if (a.collisions) c.key_collisions = *a.collisions;
  const auto gen = generate(c);
  save_dataset(w.dataset(), gen.dataset);
  save_references(w / "references.jsonl", gen.dataset);
  save_ground_truth(w / "ground_truth.json", gen.truth);
  std::cout << "generated " << gen.dataset.submissions().size() << " submissions, " << gen.dataset.reviewers().size()
            << " reviewers, " << gen.dataset.reviews().size() << " reviews (" << gen.relation.cited_count()
            << " cited pairs) into " << w.root.string() << '\n';
}

void run_report(const Workdir& w) {
  require_artifact(w / "filter_report.json", "filter");
  const FilterReport filter_report = load_filter_report(w / "filter_report.json");
  require_artifact(w.dataset() / "venue.json", "ingest");
  const VenueConfig venue = load_venue_config(w.dataset() / "venue.json");
  const std::string label = venue.label.empty() ? std::string(to_string(venue.venue_policy)) : venue.label;
  std::vector<BiasReport> reports;
  if (fs::exists(w / "fit.json")) reports.push_back(parametric_report(label, load_fit(w / "fit.json"), filter_report));
  if (fs::exists(w / "permutation.json")) {
    require_artifact(w / "triples.csv", "analyze --nonparametric");
    reports.push_back(nonparametric_report(label, load_permutation(w / "permutation.json"), load_triples(w / "triples.csv")));
  }
  if (reports.empty())
    throw Error(ErrorKind::missing_artifact, "missing artifact: neither fit.json nor permutation.json (run `analyze` first)");
  const std::string table = render_table(reports);
  write_text(w / "report.txt", table);
  write_text(w / "report.json", report_json(reports));
  std::cout << table;
}

int fail(ErrorKind kind, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = std::string(to_string(kind));
  j["message"] = message;
  std::cerr << j.dump() << '\n';
  return kind == ErrorKind::usage ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Citation-bias audit toolkit for peer-review data"};
  app.require_subcommand(1);
  std::string workdir_flag;
  app.add_option("--workdir", workdir_flag, "Artifact directory (default: $REVAUDIT_WORKDIR or .)");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Validate a dataset directory and store it in the workdir");
  c_ingest->add_option("--input", ingest.input, "Directory with reviewers/submissions/reviews .jsonl")->required();
  c_ingest->add_option("--venue-config", ingest.venue_config, "Venue configuration JSON")->required();
  c_ingest->add_option("--references", ingest.references, "references.jsonl replacing reference lists");

  ExtractArgs extract;
  std::uint64_t extract_seed = 0;
  auto* c_extract = app.add_subcommand("extract-citations", "Parse reference lists and build the citation relation");
  c_extract->add_option("--overrides", extract.overrides, "overrides.csv for ambiguous or audited pairs");
  c_extract->add_option("--audit-size", extract.audit_size, "Pairs sampled per stratum for manual audit");
  auto* o_extract_seed = c_extract->add_option("--seed", extract_seed, "Seed of the audit sample");

  AssignArgs assign;
  auto* c_assign = app.add_subcommand("assign", "Solve the citation-aware reviewer assignment");
  c_assign->add_option("--similarity", assign.similarity, "similarity.csv")->required();
  c_assign->add_option("--bids,--forbid-from-bids", assign.bids, "bids.csv; forbids unwilling pairs, marks missing preferences");
  c_assign->add_option("--edits", assign.edits, "edits.csv with post-hoc add/remove actions");
  c_assign->add_option("--paper-load", assign.spec.paper_load, "Reviewers per paper")->capture_default_str();
  c_assign->add_option("--reviewer-cap", assign.spec.reviewer_cap, "Papers per reviewer")->capture_default_str();
  c_assign->add_option("--lambda", assign.spec.lambda, "Weight of each cited pair")->capture_default_str();
  c_assign->add_option("--missing-pref-penalty", assign.spec.missing_pref_penalty,
                       "Penalty on pairs without a usable preference")->capture_default_str();
  c_assign->add_option("--sweep", assign.sweep, "Lambda values to sweep")->delimiter(',');
  c_assign->add_option("--target-fraction", assign.target_fraction,
                       "Pick the smallest swept lambda exceeding this fraction of submissions with a cited reviewer");

  auto* c_filter = app.add_subcommand("filter", "Eligibility, missing values and exclusions");

  ParametricArgs parametric;
  NonparametricArgs nonparametric;
  std::uint64_t np_seed = 0;
  auto* c_analyze = app.add_subcommand("analyze", "Run the parametric or the non-parametric test");
  auto* f_par = c_analyze->add_flag("--parametric", "Weighted least squares on differenced means");
  auto* f_np = c_analyze->add_flag("--nonparametric", "Matched triples with a permutation test");
  f_par->excludes(f_np);
  c_analyze->add_option("--channel", parametric.channel, "observed|latent")->capture_default_str();
  c_analyze->add_flag("--drop-constant-covariates", parametric.drop_constant,
                      "Drop covariates whose delta is constant instead of failing");
  c_analyze->add_option("--iterations", nonparametric.iterations, "Permutation iterations")->capture_default_str();
  c_analyze->add_option("--bootstrap", nonparametric.bootstrap, "Bootstrap resamples (0 disables)")->capture_default_str();
  auto* o_np_seed = c_analyze->add_option("--seed", np_seed, "Seed for permutation and bootstrap");
  c_analyze->add_option("--overlap-tolerance", nonparametric.overlap_tolerance, "Text-overlap matching tolerance")
      ->capture_default_str();
  c_analyze->add_flag("--exact", nonparametric.exact, "Exact 2^K enumeration instead of random flips");

  EffectArgs effect;
  auto* c_effect = app.add_subcommand("effect-size", "Rank improvement from a one-point score increase");
  c_effect->add_option("--mode", effect.mode, "pairs|submissions")->capture_default_str();
  c_effect->add_flag("--uncapped", effect.uncapped, "Allow scores above score_max");

  SimulateArgs sim;
  std::uint64_t sim_seed = 0;
  std::size_t sim_n = 0, sim_coll = 0;
  double sim_alpha = 0, sim_sigma = 0, sim_prev = 0, sim_corr = 0, sim_excl = 0;
  auto* c_sim = app.add_subcommand("simulate", "Generate a synthetic conference with planted effects");
  c_sim->add_option("--config", sim.config, "Generator configuration JSON");
  c_sim->add_option("--policy", sim.policy, "EC_LIKE|ICML_LIKE (without --config)")->capture_default_str();
  auto* o_sim_seed = c_sim->add_option("--seed", sim_seed, "Generator seed");
  auto* o_sim_n = c_sim->add_option("--n-submissions", sim_n);
  auto* o_sim_alpha = c_sim->add_option("--alpha-star", sim_alpha, "Planted citation effect");
  auto* o_sim_sigma = c_sim->add_option("--sigma0", sim_sigma, "Noise scale");
  auto* o_sim_prev = c_sim->add_option("--prevalence", sim_prev, "Per-pair citation probability");
  auto* o_sim_corr = c_sim->add_option("--correlation", sim_corr, "Citation-expertise correlation");
  auto* o_sim_excl = c_sim->add_option("--exclusion-rate", sim_excl, "Share of submissions with adjudicated exclusions");
  auto* o_sim_coll = c_sim->add_option("--key-collisions", sim_coll, "Reviewer pairs sharing a name key");

  auto* c_diag = app.add_subcommand("diagnostics", "Residual and Q-Q plot data for the parametric fit");
  auto* c_report = app.add_subcommand("report", "Render the results table (text and JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(ErrorKind::usage, e.what());
  }

  try {
    Workdir w;
    if (!workdir_flag.empty()) {
      w.root = workdir_flag;
    } else if (const char* env = std::getenv("REVAUDIT_WORKDIR"); env && *env) {
      w.root = env;
    } else {
      w.root = ".";
    }
    fs::create_directories(w.root);

    if (*c_ingest) {
      run_ingest(w, ingest);
    } else if (*c_extract) {
      if (*o_extract_seed) extract.seed = extract_seed;
      run_extract(w, extract);
    } else if (*c_assign) {
      run_assign(w, assign);
    } else if (*c_filter) {
      run_filter(w);
    } else if (*c_analyze) {
      if (*o_np_seed) nonparametric.seed = np_seed;
      if (*f_par) {
        run_parametric(w, parametric);
      } else if (*f_np) {
        run_nonparametric(w, nonparametric);
      } else {
        throw Error(ErrorKind::usage, "analyze needs --parametric or --nonparametric");
      }
    } else if (*c_effect) {
      run_effect_size(w, effect);
    } else if (*c_sim) {
      if (*o_sim_seed) sim.seed = sim_seed;
      if (*o_sim_n) sim.n_submissions = sim_n;
      if (*o_sim_alpha) sim.alpha_star = sim_alpha;
      if (*o_sim_sigma) sim.sigma0 = sim_sigma;
      if (*o_sim_prev) sim.prevalence = sim_prev;
      if (*o_sim_corr) sim.correlation = sim_corr;
      if (*o_sim_excl) sim.exclusion_rate = sim_excl;
      if (*o_sim_coll) sim.collisions = sim_coll;
      run_simulate(w, sim);
    } else if (*c_diag) {
      run_diagnostics(w);
    } else if (*c_report) {
      run_report(w);
    }
  } catch (const Error& e) {
    return fail(e.kind(), e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(ErrorKind::io, e.what());
  } catch (const std::exception& e) {
    return fail(ErrorKind::io, e.what());
  }
  return 0;
}
