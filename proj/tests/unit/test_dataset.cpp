#include <cmath>
#include <set>

#include <doctest.h>

#include "helpers.hpp"
#include "revaudit/error.hpp"
#include "revaudit/synthetic.hpp"

using namespace revaudit;
using namespace testing;

namespace {

ReviewDataset ec_dataset(std::vector<ReviewRecord> reviews, std::vector<Reviewer> reviewers,
                         std::vector<std::string> subs) {
  std::vector<Submission> s;
  for (auto& id : subs) s.push_back(Submission{SubmissionId(id), {}, false});
  return ReviewDataset(VenueConfig::ec_like_defaults(), std::move(reviewers), std::move(s), std::move(reviews));
}

ReviewRecord pref(const std::string& s, const std::string& r, std::optional<int> value) {
  auto rec = review(s, r, 3);
  rec.preference_value = value;
  return rec;
}

std::size_t index_of(const ReviewDataset& ds, const std::string& s, const std::string& r) {
  for (std::size_t i = 0; i < ds.reviews().size(); ++i)
    if (ds.reviews()[i].key() == pk(s, r)) return i;
  FAIL("pair not found");
  return 0;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("identity ingestion of a one-record dataset") {
  auto dir = scratch("ingest_one");
  write_file(dir / "reviewers.jsonl", R"({"id":"r1","last_name":"Doe","first_name":"Jane","seniority":0})" "\n");
  write_file(dir / "submissions.jsonl", R"({"id":"s1"})" "\n");
  write_file(dir / "reviews.jsonl", R"({"submission_id":"s1","reviewer_id":"r1","score":4,"sr_expertise":2})" "\n");
  auto ds = load_dataset(dir, VenueConfig::ec_like_defaults());
  CHECK(ds.reviewers().size() == 1);
  CHECK(ds.submissions().size() == 1);
  CHECK(ds.reviews().size() == 1);
  CHECK(ds.reviews()[0].score == 4);
}

TEST_CASE("score outside the venue scale names the record") {
  auto dir = scratch("ingest_scale");
  auto venue = VenueConfig::ec_like_defaults();
  venue.score_min = 1;
  venue.score_max = 6;
  write_file(dir / "reviewers.jsonl", R"({"id":"r1","last_name":"Doe","first_name":"Jane","seniority":0})" "\n");
  write_file(dir / "submissions.jsonl", R"({"id":"s1"})" "\n");
  write_file(dir / "reviews.jsonl", R"({"submission_id":"s1","reviewer_id":"r1","score":7,"sr_expertise":2})" "\n");
  try {
    load_dataset(dir, venue);
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
    CHECK(std::string(e.what()).find("s1") != std::string::npos);
    CHECK(std::string(e.what()).find("r1") != std::string::npos);
  }
}

TEST_CASE("malformed line reports its line number") {
  auto dir = scratch("ingest_malformed");
  write_file(dir / "reviewers.jsonl",
             R"({"id":"r1","last_name":"Doe","first_name":"Jane","seniority":0})" "\n" R"({"id":"r2","last_name":)" "\n");
  write_file(dir / "submissions.jsonl", R"({"id":"s1"})" "\n");
  write_file(dir / "reviews.jsonl", "");
  try {
    load_dataset(dir, VenueConfig::ec_like_defaults());
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parse);
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("dangling ids are referential errors") {
  std::vector<Reviewer> revs{reviewer("r1", "Doe", "Jane")};
  CHECK_THROWS_AS(ec_dataset({review("s1", "r9", 3)}, revs, {"s1"}), Error);
  try {
    ec_dataset({review("s9", "r1", 3)}, revs, {"s1"});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::referential);
  }
}

TEST_CASE("percentile of two preferences") {
  auto ds = derive_covariates(ec_dataset({pref("s1", "r1", 50), pref("s2", "r1", 10)},
                                         {reviewer("r1", "Doe", "Jane")}, {"s1", "s2"}));
  CHECK(ds.covariates(index_of(ds, "s1", "r1")).pref_perc == 0.0);
  CHECK(ds.covariates(index_of(ds, "s2", "r1")).pref_perc == 100.0);
}

TEST_CASE("singleton preference and missing preference") {
  auto ds = derive_covariates(ec_dataset({pref("s1", "r1", 30), pref("s1", "r2", std::nullopt)},
                                         {reviewer("r1", "Doe", "Jane"), reviewer("r2", "Roe", "Alex")}, {"s1"}));
  auto a = ds.covariates(index_of(ds, "s1", "r1"));
  auto b = ds.covariates(index_of(ds, "s1", "r2"));
  CHECK(a.pref_perc == 0.0);
  CHECK(a.missing_pref == 0);
  CHECK(b.pref_perc == 0.0);
  CHECK(b.missing_pref == 1);
}

TEST_CASE("negative preference assigned anyway warns") {
  auto ds = derive_covariates(ec_dataset({pref("s1", "r1", -20), pref("s2", "r1", 40)},
                                         {reviewer("r1", "Doe", "Jane")}, {"s1", "s2"}));
  REQUIRE(!ds.warnings().empty());
  bool named = false;
  for (const auto& w : ds.warnings()) named |= w.find("s1") != std::string::npos;
  CHECK(named);
}

TEST_CASE("percentile is rank-linear and derivation is idempotent") {
  std::vector<ReviewRecord> recs;
  std::vector<std::string> subs;
  const int prefs[] = {80, 20, 50, 20, 95};
  for (int i = 0; i < 5; ++i) {
    subs.push_back("s" + std::to_string(i));
    recs.push_back(pref(subs.back(), "r1", prefs[i]));
  }
  auto ds = derive_covariates(ec_dataset(recs, {reviewer("r1", "Doe", "Jane")}, subs));
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      if (prefs[i] > prefs[j]) CHECK(ds.covariates(i).pref_perc < ds.covariates(j).pref_perc);
    }
  }
  CHECK(ds.covariates(4).pref_perc == 0.0);
  CHECK(ds.covariates(0).pref_perc == 25.0);
  CHECK(ds.covariates(1).pref_perc == 75.0);
  auto again = derive_covariates(ds);
  for (std::size_t i = 0; i < 5; ++i) CHECK(again.covariates(i) == ds.covariates(i));
}

TEST_CASE("ICML-like records with a missing covariate are droppable") {
  auto venue = VenueConfig::icml_like_defaults();
  auto full = review("s1", "r1", 4, 3);
  full.sr_confidence = 3;
  full.text_overlap = 0.4;
  full.bid = 4;
  auto partial = full;
  partial.reviewer_id = ReviewerId("r2");
  partial.text_overlap.reset();
  ReviewDataset ds(venue, {reviewer("r1", "Doe", "Jane", 1), reviewer("r2", "Roe", "Alex")},
                   {Submission{SubmissionId("s1"), {}, false}}, {full, partial});
  auto d = derive_covariates(ds);
  CHECK_FALSE(d.covariates(0).droppable);
  CHECK(d.covariates(0).values == std::vector<double>{3, 3, 0.4, 4, 1});
  CHECK(d.covariates(1).droppable);
}

TEST_CASE("save then load round-trips byte-identically") {
  auto cfg = GeneratorConfig::icml_like();
  cfg.n_submissions = 40;
  cfg.seed = 3;
  auto conf = generate(cfg);
  auto a = scratch("roundtrip_a");
  auto b = scratch("roundtrip_b");
  save_dataset(a, conf.dataset);
  auto loaded = load_dataset(a, load_venue_config(a / "venue.json"));
  CHECK(loaded.reviews() == conf.dataset.reviews());
  CHECK(loaded.reviewers() == conf.dataset.reviewers());
  CHECK(loaded.submissions() == conf.dataset.submissions());
  save_dataset(b, loaded);
  for (auto name : {"reviewers.jsonl", "submissions.jsonl", "reviews.jsonl", "venue.json"})
    CHECK(read_file(a / name) == read_file(b / name));
}

TEST_CASE("summary rendering of the reference counts") {
  SummaryTable t{"EC", 3064, 4991, 1513};
  auto text = render_summary(t);
  CHECK(text.find("3,064") != std::string::npos);
  CHECK(text.find("4,991") != std::string::npos);
  CHECK(text.find("1,513") != std::string::npos);
  CHECK(text.find("30%") != std::string::npos);
}

TEST_CASE("no citations gives fraction zero") {
  auto ds = ec_dataset({review("s1", "r1", 3), review("s2", "r1", 4)}, {reviewer("r1", "Doe", "Jane")}, {"s1", "s2"});
  CitationRelation rel;
  for (const auto& p : ds.assigned_pairs()) rel.set_parsed(p, false);
  auto t = summarize(ds, rel);
  CHECK(t.submissions == 2);
  CHECK(t.submissions_with_cited == 0);
  CHECK(t.fraction_with_cited() == 0.0);
  CHECK(render_summary(t).find("0%") != std::string::npos);
}

TEST_CASE("planted submission-level prevalence of 40 percent") {
  auto cfg = GeneratorConfig::ec_like();
  cfg.n_submissions = 500;
  cfg.seed = 1;
  cfg.citation_prevalence = 1.0 - std::pow(0.6, 1.0 / cfg.reviewers_per_paper);
  auto conf = generate(cfg);
  auto t = summarize(conf.dataset, conf.relation);
  std::set<SubmissionId> truth;
  for (const auto& [pair, cited] : conf.truth.cited)
    if (cited) truth.insert(pair.submission);
  CHECK(t.submissions == 500);
  CHECK(t.submissions_with_cited == truth.size());
  CHECK(std::abs(t.fraction_with_cited() - 0.40) <= 0.03);
}

TEST_CASE("withdrawn submissions are not counted") {
  std::vector<Submission> subs{{SubmissionId("s1"), {}, false}, {SubmissionId("s2"), {}, true}};
  ReviewDataset ds(VenueConfig::ec_like_defaults(), {reviewer("r1", "Doe", "Jane")}, subs,
                   {review("s1", "r1", 3), review("s2", "r1", 3)});
  CitationRelation rel;
  for (const auto& p : ds.assigned_pairs()) rel.set_parsed(p, true);
  auto t = summarize(ds, rel);
  CHECK(t.submissions == 1);
  CHECK(t.submissions_with_cited == 1);
}

}
