#include "revaudit/relation.hpp"

#include <algorithm>

#include "revaudit/csv.hpp"
#include "revaudit/error.hpp"

namespace revaudit {

namespace {

bool parse_flag(const std::string& text, const std::string& context) {
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false") return false;
  throw Error(ErrorKind::parse, context + ": expected 0 or 1, got '" + text + "'");
}

std::string describe(const PairKey& pair) {
  return "(" + pair.submission.str() + ", " + pair.reviewer.str() + ")";
}

}  // namespace

void CitationRelation::apply_override(const PairKey& pair, bool cited) {
  if (!contains(pair))
    throw Error(ErrorKind::referential, "override for unassigned pair " + describe(pair));
  if (!is_ambiguous(pair) && !is_audited(pair))
    throw Error(ErrorKind::validation,
                "override for pair " + describe(pair) + " which is neither ambiguous nor audited");
  overrides_[pair] = cited;
}

bool CitationRelation::parsed_verdict(const PairKey& pair) const {
  auto it = parsed_.find(pair);
  return it != parsed_.end() && it->second;
}

bool CitationRelation::is_cited(const PairKey& pair) const {
  if (auto it = overrides_.find(pair); it != overrides_.end()) return it->second;
  if (is_ambiguous(pair)) return false;
  return parsed_verdict(pair);
}

std::size_t CitationRelation::cited_count() const {
  return static_cast<std::size_t>(
      std::count_if(parsed_.begin(), parsed_.end(), [this](const auto& kv) { return is_cited(kv.first); }));
}

void save_relation(const std::filesystem::path& path, const CitationRelation& relation) {
  csv::Table table;
  table.header = {"submission_id", "reviewer_id", "parsed", "ambiguous", "audited", "override", "cited"};
  for (const auto& [pair, verdict] : relation.parsed()) {
    std::string override_field;
    if (auto it = relation.overrides().find(pair); it != relation.overrides().end())
      override_field = it->second ? "1" : "0";
    table.rows.push_back({pair.submission.str(), pair.reviewer.str(), verdict ? "1" : "0",
                          relation.is_ambiguous(pair) ? "1" : "0", relation.is_audited(pair) ? "1" : "0",
                          override_field, relation.is_cited(pair) ? "1" : "0"});
  }
  csv::write(path, table);
}

CitationRelation load_relation(const std::filesystem::path& path) {
  const csv::Table table = csv::read(path);
  const std::string ctx = path.string();
  const auto c_sub = table.column("submission_id", ctx);
  const auto c_rev = table.column("reviewer_id", ctx);
  const auto c_parsed = table.column("parsed", ctx);
  const auto c_amb = table.column("ambiguous", ctx);
  const auto c_aud = table.column("audited", ctx);
  const auto c_ovr = table.column("override", ctx);
  CitationRelation relation;
  for (const auto& row : table.rows) {
    PairKey pair{SubmissionId(row[c_sub]), ReviewerId(row[c_rev])};
    relation.set_parsed(pair, parse_flag(row[c_parsed], ctx));
    if (parse_flag(row[c_amb], ctx)) relation.mark_ambiguous(pair);
    if (parse_flag(row[c_aud], ctx)) relation.mark_audited(pair);
    if (!row[c_ovr].empty()) relation.apply_override(pair, parse_flag(row[c_ovr], ctx));
  }
  return relation;
}

std::vector<std::pair<PairKey, bool>> load_overrides(const std::filesystem::path& path) {
  const csv::Table table = csv::read(path);
  const std::string ctx = path.string();
  const auto c_sub = table.column("submission_id", ctx);
  const auto c_rev = table.column("reviewer_id", ctx);
  const auto c_cited = table.column("cited", ctx);
  std::vector<std::pair<PairKey, bool>> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows)
    out.emplace_back(PairKey{SubmissionId(row[c_sub]), ReviewerId(row[c_rev])}, parse_flag(row[c_cited], ctx));
  return out;
}

}  // namespace revaudit
