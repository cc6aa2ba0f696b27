#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "revaudit/ids.hpp"

namespace revaudit {

// Per-pair citation indicator for assigned (submission, reviewer) pairs.
//
// Final indicator: the manual override when one exists; otherwise "not cited"
// for ambiguous pairs (reviewer key shared by several pool members) and the
// parser verdict for everything else.
class CitationRelation {
 public:
  void set_parsed(const PairKey& pair, bool cited) { parsed_[pair] = cited; }
  void mark_ambiguous(const PairKey& pair) { ambiguous_.insert(pair); }
  void mark_audited(const PairKey& pair) { audited_.insert(pair); }

  // Overrides are only accepted for ambiguous or audited pairs.
  void apply_override(const PairKey& pair, bool cited);

  bool contains(const PairKey& pair) const { return parsed_.count(pair) != 0; }
  bool is_cited(const PairKey& pair) const;
  bool parsed_verdict(const PairKey& pair) const;
  bool is_ambiguous(const PairKey& pair) const { return ambiguous_.count(pair) != 0; }
  bool is_audited(const PairKey& pair) const { return audited_.count(pair) != 0; }
  // Ambiguous and not yet resolved by an override.
  bool is_undetermined(const PairKey& pair) const { return is_ambiguous(pair) && !overrides_.count(pair); }

  const std::map<PairKey, bool>& parsed() const noexcept { return parsed_; }
  const std::set<PairKey>& ambiguous() const noexcept { return ambiguous_; }
  const std::set<PairKey>& audited() const noexcept { return audited_; }
  const std::map<PairKey, bool>& overrides() const noexcept { return overrides_; }

  std::size_t size() const noexcept { return parsed_.size(); }
  std::size_t cited_count() const;

  friend bool operator==(const CitationRelation&, const CitationRelation&) = default;

 private:
  std::map<PairKey, bool> parsed_;
  std::set<PairKey> ambiguous_;
  std::set<PairKey> audited_;
  std::map<PairKey, bool> overrides_;
};

// citations.csv: submission_id, reviewer_id, parsed, ambiguous, audited, override, cited
void save_relation(const std::filesystem::path& path, const CitationRelation& relation);
CitationRelation load_relation(const std::filesystem::path& path);

// overrides.csv: submission_id, reviewer_id, cited (0/1)
std::vector<std::pair<PairKey, bool>> load_overrides(const std::filesystem::path& path);

}  // namespace revaudit
