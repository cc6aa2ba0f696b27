#include <cstdlib>

#include <doctest.h>
#include <json.hpp>

#include "helpers.hpp"
#include "revaudit/reports.hpp"

using namespace revaudit;
using namespace testing;

namespace {

int cli(const std::filesystem::path& workdir, const std::string& args, const std::string& tag) {
  const std::string cmd = std::string(REVAUDIT_CLI) + " --workdir " + workdir.string() + " " + args + " > " +
                          (workdir / (tag + ".out")).string() + " 2> " + (workdir / (tag + ".err")).string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

FitResult fit_with(double est, double lo, double hi, double p, std::size_t n) {
  FitResult f;
  f.coefficients.push_back({"alpha_star", est, 0.0, 0.0, p, {lo, hi}});
  f.n_rows = n;
  return f;
}

}  // namespace

TEST_SUITE("reports") {

TEST_CASE("p-value formatting") {
  CHECK(format_p(0.009) == "0.009");
  CHECK(format_p(0.02) == "0.020");
  CHECK(format_p(0.0004) == "< 0.001");
}

TEST_CASE("table rows carry the reference values") {
  FilterReport fr;
  fr.retained_pairs = 849;
  fr.retained_reviewers = 500;
  auto param = parametric_report("EC", fit_with(0.23, 0.06, 0.40, 0.009, 300), fr);
  PermutationResult pr;
  pr.tau = 0.42;
  pr.k = 60;
  pr.p_two_sided = 0.02;
  pr.ci95_bootstrap = Interval{0.10, 0.73};
  pr.iterations = 10000;
  std::vector<MatchedTriple> triples;
  for (int i = 0; i < 60; ++i)
    triples.push_back({SubmissionId("s" + std::to_string(i / 2)), ReviewerId("c" + std::to_string(i)),
                       ReviewerId("u" + std::to_string(i)), 4, 3});
  auto nonpar = nonparametric_report("ICML", pr, triples);
  CHECK(nonpar.pairs == 120);
  CHECK(nonpar.submissions == 30);
  CHECK(nonpar.reviewers == 120);

  auto table = render_table({param, nonpar});
  for (auto col : {"Analysis", "Venue", "Submissions", "Reviewers", "Pairs", "Estimate", "95% CI", "p"})
    CHECK(table.find(col) != std::string::npos);
  CHECK(table.find("0.23") != std::string::npos);
  CHECK(table.find("[0.06, 0.40]") != std::string::npos);
  CHECK(table.find("0.009") != std::string::npos);
  CHECK(table.find("0.42") != std::string::npos);
  CHECK(table.find("[0.10, 0.73]") != std::string::npos);
  CHECK(table.find("0.020") != std::string::npos);
  CHECK(table.find("Caveats") != std::string::npos);

  auto j = nlohmann::json::parse(report_json({param, nonpar}));
  CHECK(j[0]["pairs"] == 849);
  CHECK(j[1]["statistic"] == 0.42);
}

TEST_CASE("pipeline recovers a planted effect and reports consistent totals") {
  auto dir = scratch("cli_pipeline");
  REQUIRE(cli(dir, "simulate --seed 1 --alpha-star 0.3 --n-submissions 300", "sim") == 0);
  REQUIRE(cli(dir, "extract-citations", "extract") == 0);
  REQUIRE(cli(dir, "filter", "filter") == 0);
  REQUIRE(cli(dir, "analyze --parametric --channel latent", "analyze") == 0);
  REQUIRE(cli(dir, "diagnostics", "diag") == 0);
  REQUIRE(cli(dir, "effect-size", "effect") == 0);
  REQUIRE(cli(dir, "report", "report") == 0);
  auto fit = load_fit(dir / "fit.json");
  CHECK(fit.alpha_star().ci95.contains(0.3));
  auto filter = load_filter_report(dir / "filter_report.json");
  auto rep = nlohmann::json::parse(read_file(dir / "report.json"));
  CHECK(rep[0]["pairs"] == filter.retained_pairs);
  CHECK(rep[0]["reviewers"] == filter.retained_reviewers);
  CHECK(rep[0]["submissions"] == fit.n_rows);
  CHECK(std::filesystem::exists(dir / "qq.csv"));
  CHECK(std::filesystem::exists(dir / "residuals.csv"));
  CHECK(std::filesystem::exists(dir / "ranking.json"));
}

TEST_CASE("identical runs produce identical artifacts") {
  std::string files[] = {"citations.csv", "analysis_pairs.csv", "filter_report.json", "triples.csv", "permutation.json"};
  std::string content[2][5];
  for (int run = 0; run < 2; ++run) {
    auto dir = scratch("cli_repro_" + std::to_string(run));
    REQUIRE(cli(dir, "simulate --policy icml_like --seed 2 --n-submissions 400", "sim") == 0);
    REQUIRE(cli(dir, "extract-citations", "extract") == 0);
    REQUIRE(cli(dir, "filter", "filter") == 0);
    REQUIRE(cli(dir, "analyze --nonparametric --iterations 2000 --bootstrap 500 --seed 5", "np") == 0);
    for (int f = 0; f < 5; ++f) content[run][f] = read_file(dir / files[f]);
  }
  for (int f = 0; f < 5; ++f) CHECK_MESSAGE(content[0][f] == content[1][f], files[f]);
}

TEST_CASE("analyze before filter is a missing-artifact error") {
  auto dir = scratch("cli_order");
  REQUIRE(cli(dir, "simulate --seed 1 --n-submissions 50", "sim") == 0);
  REQUIRE(cli(dir, "extract-citations", "extract") == 0);
  CHECK(cli(dir, "analyze --parametric", "analyze") != 0);
  auto err = nlohmann::json::parse(read_file(dir / "analyze.err"));
  CHECK(err["error"] == "missing_artifact");
}

TEST_CASE("unknown flags and missing seeds are usage errors") {
  auto dir = scratch("cli_usage");
  CHECK(cli(dir, "filter --bogus", "bogus") != 0);
  CHECK(cli(dir, "simulate", "noseed") != 0);
  auto err = nlohmann::json::parse(read_file(dir / "noseed.err"));
  CHECK(err.contains("error"));
}

}
