#include "revaudit/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "revaudit/error.hpp"

namespace revaudit {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(VenuePolicy policy) {
  return policy == VenuePolicy::ec_like ? "EC_LIKE" : "ICML_LIKE";
}

VenuePolicy parse_policy(std::string_view text) {
  std::string t(text);
  for (auto& c : t) c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (t == "EC_LIKE" || t == "EC") return VenuePolicy::ec_like;
  if (t == "ICML_LIKE" || t == "ICML") return VenuePolicy::icml_like;
  throw Error(ErrorKind::parse, "unknown venue_policy '" + std::string(text) + "'");
}

void VenueConfig::validate() const {
  if (score_min >= score_max)
    throw Error(ErrorKind::validation, "venue config: score_min must be < score_max");
  if (expertise_scale.lo > expertise_scale.hi)
    throw Error(ErrorKind::validation, "venue config: empty expertise_scale");
  if (bid_scale && bid_scale->lo > bid_scale->hi)
    throw Error(ErrorKind::validation, "venue config: empty bid_scale");
  if (preference_range && preference_range->lo > preference_range->hi)
    throw Error(ErrorKind::validation, "venue config: empty preference_range");
}

VenueConfig VenueConfig::ec_like_defaults() {
  VenueConfig v;
  v.label = "EC-like";
  v.score_min = 1;
  v.score_max = 5;
  v.venue_policy = VenuePolicy::ec_like;
  v.preference_range = IntRange{-100, 100};
  return v;
}

VenueConfig VenueConfig::icml_like_defaults() {
  VenueConfig v;
  v.label = "ICML-like";
  v.score_min = 1;
  v.score_max = 6;
  v.venue_policy = VenuePolicy::icml_like;
  v.bid_scale = IntRange{2, 5};
  return v;
}

const std::vector<std::string>& covariate_names(VenuePolicy policy) {
  static const std::vector<std::string> ec{"expertiseSRExp", "prefPerc", "missingPref", "seniority"};
  static const std::vector<std::string> icml{"expertiseSRExp", "expertiseSRConf", "expertiseText", "prefBid",
                                             "seniority"};
  return policy == VenuePolicy::ec_like ? ec : icml;
}

namespace {

std::string pair_text(const ReviewRecord& r) {
  return "(submission " + r.submission_id.str() + ", reviewer " + r.reviewer_id.str() + ")";
}

void validate_review(const ReviewRecord& r, const VenueConfig& venue, const std::string& where) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::validation, where + ": " + what + " " + pair_text(r));
  };
  if (r.submission_id.empty() || r.reviewer_id.empty()) fail("empty id");
  if (r.score < venue.score_min || r.score > venue.score_max)
    fail("score " + std::to_string(r.score) + " outside [" + std::to_string(venue.score_min) + ", " +
         std::to_string(venue.score_max) + "]");
  if (!venue.expertise_scale.contains(r.sr_expertise))
    fail("sr_expertise " + std::to_string(r.sr_expertise) + " outside expertise scale");
  if (r.sr_confidence && !venue.expertise_scale.contains(*r.sr_confidence))
    fail("sr_confidence " + std::to_string(*r.sr_confidence) + " outside expertise scale");
  if (r.text_overlap && !(*r.text_overlap >= 0.0 && *r.text_overlap <= 1.0)) fail("text_overlap outside [0, 1]");
  if (r.bid) {
    const IntRange range = venue.bid_scale.value_or(IntRange{2, 5});
    if (!range.contains(*r.bid)) fail("bid " + std::to_string(*r.bid) + " outside bid scale");
  }
  if (r.preference_value) {
    const IntRange range = venue.preference_range.value_or(IntRange{-100, 100});
    if (!range.contains(*r.preference_value))
      fail("preference_value " + std::to_string(*r.preference_value) + " outside preference range");
  }
  if (r.exclusion_adjudicated && !r.missing_citation_flag)
    fail("exclusion_adjudicated requires missing_citation_flag");
}

void validate_reviewer(const Reviewer& r, const std::string& where) {
  if (r.id.empty()) throw Error(ErrorKind::validation, where + ": empty reviewer id");
  if (r.last_name.empty()) throw Error(ErrorKind::validation, where + ": reviewer " + r.id.str() + " has empty last_name");
  if (r.seniority != 0 && r.seniority != 1)
    throw Error(ErrorKind::validation, where + ": reviewer " + r.id.str() + " seniority must be 0 or 1");
}

}  // namespace

ReviewDataset::ReviewDataset(VenueConfig venue, std::vector<Reviewer> reviewers, std::vector<Submission> submissions,
                             std::vector<ReviewRecord> reviews)
    : venue_(std::move(venue)),
      reviewers_(std::move(reviewers)),
      submissions_(std::move(submissions)),
      reviews_(std::move(reviews)) {
  venue_.validate();
  for (std::size_t i = 0; i < reviewers_.size(); ++i) validate_reviewer(reviewers_[i], "reviewer #" + std::to_string(i + 1));
  for (std::size_t i = 0; i < reviews_.size(); ++i) validate_review(reviews_[i], venue_, "review #" + std::to_string(i + 1));
  build_indexes();
}

void ReviewDataset::build_indexes() {
  reviewer_index_.clear();
  submission_index_.clear();
  reviews_by_submission_.clear();
  for (std::size_t i = 0; i < reviewers_.size(); ++i)
    if (!reviewer_index_.emplace(reviewers_[i].id, i).second)
      throw Error(ErrorKind::validation, "duplicate reviewer id " + reviewers_[i].id.str());
  for (std::size_t i = 0; i < submissions_.size(); ++i) {
    if (submissions_[i].id.empty()) throw Error(ErrorKind::validation, "empty submission id");
    if (!submission_index_.emplace(submissions_[i].id, i).second)
      throw Error(ErrorKind::validation, "duplicate submission id " + submissions_[i].id.str());
  }
  std::set<PairKey> seen;
  for (std::size_t i = 0; i < reviews_.size(); ++i) {
    const auto& r = reviews_[i];
    if (!submission_index_.count(r.submission_id))
      throw Error(ErrorKind::referential, "review #" + std::to_string(i + 1) + " references unknown submission " +
                                              r.submission_id.str());
    if (!reviewer_index_.count(r.reviewer_id))
      throw Error(ErrorKind::referential,
                  "review #" + std::to_string(i + 1) + " references unknown reviewer " + r.reviewer_id.str());
    if (!seen.insert(r.key()).second)
      throw Error(ErrorKind::validation, "review #" + std::to_string(i + 1) + " duplicates pair " + pair_text(r));
    reviews_by_submission_[r.submission_id].push_back(i);
  }
  warnings_.clear();
  for (const auto& r : reviews_) {
    if (r.preference_value && *r.preference_value == 0)
      warnings_.push_back("preference_value 0 for " + pair_text(r) + " is the non-reported code; treated as missing");
    if (venue_.venue_policy == VenuePolicy::icml_like && r.bid && *r.bid == 2)
      warnings_.push_back("bid 2 (not willing) on assigned pair " + pair_text(r));
  }
}

const DerivedCovariates& ReviewDataset::covariates(std::size_t review_index) const {
  if (covariates_.empty()) throw Error(ErrorKind::usage, "derive_covariates has not been applied");
  return covariates_.at(review_index);
}

const Reviewer* ReviewDataset::find_reviewer(const ReviewerId& id) const {
  auto it = reviewer_index_.find(id);
  return it == reviewer_index_.end() ? nullptr : &reviewers_[it->second];
}

const Submission* ReviewDataset::find_submission(const SubmissionId& id) const {
  auto it = submission_index_.find(id);
  return it == submission_index_.end() ? nullptr : &submissions_[it->second];
}

const std::vector<std::size_t>& ReviewDataset::reviews_of(const SubmissionId& id) const {
  static const std::vector<std::size_t> none;
  auto it = reviews_by_submission_.find(id);
  return it == reviews_by_submission_.end() ? none : it->second;
}

std::vector<PairKey> ReviewDataset::assigned_pairs() const {
  std::vector<PairKey> pairs;
  pairs.reserve(reviews_.size());
  for (const auto& r : reviews_) pairs.push_back(r.key());
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

namespace {

bool has_preference(const ReviewRecord& r) { return r.preference_value && *r.preference_value != 0; }

}  // namespace

ReviewDataset derive_covariates(const ReviewDataset& dataset) {
  ReviewDataset out = dataset;
  const auto& reviews = out.reviews_;
  std::vector<DerivedCovariates> cov(reviews.size());
  std::vector<std::string> extra;

  if (out.venue_.venue_policy == VenuePolicy::ec_like) {
    std::map<ReviewerId, std::vector<int>> positive;
    for (const auto& r : reviews)
      if (has_preference(r) && *r.preference_value > 0) positive[r.reviewer_id].push_back(*r.preference_value);
    for (std::size_t i = 0; i < reviews.size(); ++i) {
      const auto& r = reviews[i];
      auto& c = cov[i];
      if (!has_preference(r)) {
        c.pref_perc = 0.0;
        c.missing_pref = 1;
      } else if (*r.preference_value < 0) {
        // Negative preferences sit below every non-negative one.
        c.pref_perc = 100.0;
        extra.push_back("negative preference on assigned pair " + pair_text(r));
      } else {
        const auto& prefs = positive[r.reviewer_id];
        const auto greater = std::count_if(prefs.begin(), prefs.end(), [&](int p) { return p > *r.preference_value; });
        c.pref_perc = prefs.size() <= 1 ? 0.0
                                        : 100.0 * static_cast<double>(greater) / static_cast<double>(prefs.size() - 1);
      }
      const Reviewer* rev = out.find_reviewer(r.reviewer_id);
      c.values = {static_cast<double>(r.sr_expertise), c.pref_perc, static_cast<double>(c.missing_pref),
                  static_cast<double>(rev->seniority)};
    }
  } else {
    for (std::size_t i = 0; i < reviews.size(); ++i) {
      const auto& r = reviews[i];
      auto& c = cov[i];
      const Reviewer* rev = out.find_reviewer(r.reviewer_id);
      // Bid 2 never enters prefBid (only 3..5 are modelled).
      const bool bid_ok = r.bid && *r.bid >= 3;
      c.droppable = !r.sr_confidence || !r.text_overlap || !bid_ok;
      c.values = {static_cast<double>(r.sr_expertise), static_cast<double>(r.sr_confidence.value_or(0)),
                  r.text_overlap.value_or(0.0), static_cast<double>(bid_ok ? *r.bid : 0),
                  static_cast<double>(rev->seniority)};
      c.missing_pref = bid_ok ? 0 : 1;
    }
  }
  out.covariates_ = std::move(cov);
  out.build_indexes();
  out.warnings_.insert(out.warnings_.end(), extra.begin(), extra.end());
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

ordered_json range_to_json(const IntRange& r) { return ordered_json::array({r.lo, r.hi}); }

IntRange range_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw Error(ErrorKind::parse, "venue config: '" + field + "' must be a [lo, hi] integer pair");
  return {j[0].get<int>(), j[1].get<int>()};
}

int get_int(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) throw Error(ErrorKind::parse, std::string("missing field '") + field + "'");
  if (!it->is_number_integer()) throw Error(ErrorKind::parse, std::string("field '") + field + "' must be an integer");
  return it->get<int>();
}

std::optional<int> get_opt_int(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) return std::nullopt;
  if (!it->is_number_integer()) throw Error(ErrorKind::parse, std::string("field '") + field + "' must be an integer");
  return it->get<int>();
}

std::optional<double> get_opt_real(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) return std::nullopt;
  if (!it->is_number()) throw Error(ErrorKind::parse, std::string("field '") + field + "' must be a number");
  return it->get<double>();
}

std::string get_string(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) throw Error(ErrorKind::parse, std::string("missing field '") + field + "'");
  if (!it->is_string()) throw Error(ErrorKind::parse, std::string("field '") + field + "' must be a string");
  return it->get<std::string>();
}

bool get_bool(const json& j, const char* field, std::optional<bool> fallback = std::nullopt) {
  auto it = j.find(field);
  if (it == j.end()) {
    if (fallback) return *fallback;
    throw Error(ErrorKind::parse, std::string("missing field '") + field + "'");
  }
  if (!it->is_boolean()) throw Error(ErrorKind::parse, std::string("field '") + field + "' must be a boolean");
  return it->get<bool>();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Calls fn(json, line_number) for every non-blank line; wraps failures with
// the file name and line.
template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.filename().string() + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::parse, where + ": malformed JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw Error(ErrorKind::parse, where + ": expected a JSON object");
    try {
      fn(j, where);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::parse) throw Error(ErrorKind::parse, where + ": " + e.what());
      throw;
    }
  }
}

void write_lines(const std::filesystem::path& path, const std::vector<ordered_json>& objects) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  for (const auto& o : objects) out << o.dump() << '\n';
}

ordered_json venue_to_json(const VenueConfig& v) {
  ordered_json j;
  j["label"] = v.label;
  j["score_min"] = v.score_min;
  j["score_max"] = v.score_max;
  j["venue_policy"] = std::string(to_string(v.venue_policy));
  j["expertise_scale"] = range_to_json(v.expertise_scale);
  if (v.bid_scale) j["bid_scale"] = range_to_json(*v.bid_scale);
  if (v.preference_range) j["preference_range"] = range_to_json(*v.preference_range);
  return j;
}

}  // namespace

VenueConfig load_venue_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, path.string() + ": malformed JSON (" + e.what() + ")");
  }
  VenueConfig v;
  try {
    if (auto it = j.find("label"); it != j.end()) v.label = it->get<std::string>();
    v.score_min = get_int(j, "score_min");
    v.score_max = get_int(j, "score_max");
    v.venue_policy = parse_policy(get_string(j, "venue_policy"));
    if (auto it = j.find("expertise_scale"); it != j.end()) v.expertise_scale = range_from_json(*it, "expertise_scale");
    if (auto it = j.find("bid_scale"); it != j.end()) v.bid_scale = range_from_json(*it, "bid_scale");
    if (auto it = j.find("preference_range"); it != j.end())
      v.preference_range = range_from_json(*it, "preference_range");
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
  v.validate();
  return v;
}

void save_venue_config(const std::filesystem::path& path, const VenueConfig& venue) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << venue_to_json(venue).dump(2) << '\n';
}

ReviewDataset load_dataset(const std::filesystem::path& directory, const VenueConfig& venue) {
  venue.validate();
  std::vector<Reviewer> reviewers;
  for_each_jsonl(directory / "reviewers.jsonl", [&](const json& j, const std::string& where) {
    Reviewer r;
    r.id = ReviewerId(get_string(j, "id"));
    r.last_name = get_string(j, "last_name");
    r.first_name = j.contains("first_name") ? get_string(j, "first_name") : std::string{};
    r.seniority = get_int(j, "seniority");
    r.has_text_profile = get_bool(j, "has_text_profile", true);
    validate_reviewer(r, where);
    reviewers.push_back(std::move(r));
  });

  std::vector<Submission> submissions;
  for_each_jsonl(directory / "submissions.jsonl", [&](const json& j, const std::string&) {
    Submission s;
    s.id = SubmissionId(get_string(j, "id"));
    if (auto it = j.find("reference_entries"); it != j.end()) {
      if (!it->is_array()) throw Error(ErrorKind::parse, "field 'reference_entries' must be an array");
      for (const auto& e : *it) {
        if (!e.is_string()) throw Error(ErrorKind::parse, "reference entries must be strings");
        s.reference_entries.push_back(e.get<std::string>());
      }
    }
    s.withdrawn = get_bool(j, "withdrawn", false);
    submissions.push_back(std::move(s));
  });

  std::vector<ReviewRecord> reviews;
  for_each_jsonl(directory / "reviews.jsonl", [&](const json& j, const std::string& where) {
    ReviewRecord r;
    r.submission_id = SubmissionId(get_string(j, "submission_id"));
    r.reviewer_id = ReviewerId(get_string(j, "reviewer_id"));
    r.score = get_int(j, "score");
    r.sr_expertise = get_int(j, "sr_expertise");
    r.sr_confidence = get_opt_int(j, "sr_confidence");
    r.text_overlap = get_opt_real(j, "text_overlap");
    r.bid = get_opt_int(j, "bid");
    r.preference_value = get_opt_int(j, "preference_value");
    r.missing_citation_flag = get_bool(j, "missing_citation_flag", false);
    r.exclusion_adjudicated = get_bool(j, "exclusion_adjudicated", false);
    r.latent_score = get_opt_real(j, "latent_score");
    validate_review(r, venue, where);
    reviews.push_back(std::move(r));
  });

  return ReviewDataset(venue, std::move(reviewers), std::move(submissions), std::move(reviews));
}

void save_dataset(const std::filesystem::path& directory, const ReviewDataset& dataset) {
  std::filesystem::create_directories(directory);
  save_venue_config(directory / "venue.json", dataset.venue());

  std::vector<ordered_json> lines;
  for (const auto& r : dataset.reviewers()) {
    ordered_json j;
    j["id"] = r.id.str();
    j["last_name"] = r.last_name;
    j["first_name"] = r.first_name;
    j["seniority"] = r.seniority;
    j["has_text_profile"] = r.has_text_profile;
    lines.push_back(std::move(j));
  }
  write_lines(directory / "reviewers.jsonl", lines);

  lines.clear();
  for (const auto& s : dataset.submissions()) {
    ordered_json j;
    j["id"] = s.id.str();
    j["reference_entries"] = s.reference_entries;
    j["withdrawn"] = s.withdrawn;
    lines.push_back(std::move(j));
  }
  write_lines(directory / "submissions.jsonl", lines);

  lines.clear();
  for (const auto& r : dataset.reviews()) {
    ordered_json j;
    j["submission_id"] = r.submission_id.str();
    j["reviewer_id"] = r.reviewer_id.str();
    j["score"] = r.score;
    j["sr_expertise"] = r.sr_expertise;
    if (r.sr_confidence) j["sr_confidence"] = *r.sr_confidence;
    if (r.text_overlap) j["text_overlap"] = *r.text_overlap;
    if (r.bid) j["bid"] = *r.bid;
    if (r.preference_value) j["preference_value"] = *r.preference_value;
    j["missing_citation_flag"] = r.missing_citation_flag;
    j["exclusion_adjudicated"] = r.exclusion_adjudicated;
    if (r.latent_score) j["latent_score"] = *r.latent_score;
    lines.push_back(std::move(j));
  }
  write_lines(directory / "reviews.jsonl", lines);
}

std::vector<std::pair<SubmissionId, std::vector<std::string>>> load_references(const std::filesystem::path& path) {
  std::vector<std::pair<SubmissionId, std::vector<std::string>>> out;
  for_each_jsonl(path, [&](const json& j, const std::string&) {
    SubmissionId id(get_string(j, "submission_id"));
    std::vector<std::string> entries;
    auto it = j.find("entries");
    if (it == j.end() || !it->is_array()) throw Error(ErrorKind::parse, "field 'entries' must be an array");
    for (const auto& e : *it) {
      if (!e.is_string()) throw Error(ErrorKind::parse, "reference entries must be strings");
      entries.push_back(e.get<std::string>());
    }
    out.emplace_back(std::move(id), std::move(entries));
  });
  return out;
}

void save_references(const std::filesystem::path& path, const ReviewDataset& dataset) {
  std::vector<ordered_json> lines;
  for (const auto& s : dataset.submissions()) {
    ordered_json j;
    j["submission_id"] = s.id.str();
    j["entries"] = s.reference_entries;
    lines.push_back(std::move(j));
  }
  write_lines(path, lines);
}

ReviewDataset with_references(const ReviewDataset& dataset,
                              const std::vector<std::pair<SubmissionId, std::vector<std::string>>>& references) {
  std::vector<Submission> submissions = dataset.submissions();
  std::map<SubmissionId, std::size_t> index;
  for (std::size_t i = 0; i < submissions.size(); ++i) index[submissions[i].id] = i;
  for (const auto& [id, entries] : references) {
    auto it = index.find(id);
    if (it == index.end())
      throw Error(ErrorKind::referential, "references for unknown submission " + id.str());
    submissions[it->second].reference_entries = entries;
  }
  ReviewDataset out(dataset.venue(), dataset.reviewers(), std::move(submissions), dataset.reviews());
  return dataset.has_covariates() ? derive_covariates(out) : out;
}

// ---------------------------------------------------------------------------

SummaryTable summarize(const ReviewDataset& dataset, const CitationRelation& relation) {
  SummaryTable t;
  t.venue_label = dataset.venue().label;
  t.reviewers = dataset.reviewers().size();
  for (const auto& s : dataset.submissions()) {
    if (s.withdrawn) continue;
    ++t.submissions;
    const auto& idx = dataset.reviews_of(s.id);
    const bool any = std::any_of(idx.begin(), idx.end(),
                                 [&](std::size_t i) { return relation.is_cited(dataset.reviews()[i].key()); });
    if (any) ++t.submissions_with_cited;
  }
  return t;
}

namespace {

std::string with_thousands(std::size_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i != 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

}  // namespace

std::string render_summary(const SummaryTable& table) {
  std::ostringstream out;
  const double pct = 100.0 * table.fraction_with_cited();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0f%%", pct);
  const std::pair<const char*, std::string> lines[] = {
      {"# Reviewers", with_thousands(table.reviewers)},
      {"# Submissions", with_thousands(table.submissions)},
      {"# Submissions with at least one cited reviewer",
       with_thousands(table.submissions_with_cited) + " (" + buf + ")"}};
  out << "Venue: " << (table.venue_label.empty() ? "-" : table.venue_label) << '\n';
  for (const auto& [label, value] : lines) {
    std::string l = label;
    l.resize(48, ' ');
    out << "  " << l << value << '\n';
  }
  return out.str();
}

}  // namespace revaudit
