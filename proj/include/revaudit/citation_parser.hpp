#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "revaudit/dataset.hpp"
#include "revaudit/relation.hpp"

namespace revaudit {

struct AuthorName {
  std::string last_name;      // as written, tokens joined by single spaces
  std::string first_initial;  // one folded letter A-Z

  friend bool operator==(const AuthorName&, const AuthorName&) = default;
};

struct ParsedEntry {
  std::vector<AuthorName> authors;
  std::optional<std::string> warning;
};

// Extracts the author list of one bibliography item. Handles "Last, F.",
// "F. Last", "Last, First" and "First Last" orders; ",", ";", "and", "&"
// separators; "et al." (contributes nothing); a parenthesised year closing
// the author block; multi-token and hyphenated last names. Never throws.
ParsedEntry parse_reference_entry(std::string_view entry);

struct ReviewerKey {
  std::string key;       // LASTNAME_F
  bool flagged = false;  // no usable first initial; placeholder used

  friend bool operator==(const ReviewerKey&, const ReviewerKey&) = default;
};

inline constexpr char kPlaceholderInitial[] = "X";

ReviewerKey build_key(const Reviewer& reviewer);
std::string author_key(const AuthorName& author);

// Parser verdict for every assigned pair. A pair is cited when one of the
// submission's parsed author keys equals the reviewer key. Cited pairs whose
// key is shared with another pool member (or flagged) are marked ambiguous and
// count as uncited until overridden. Parse warnings are appended to
// `warnings` when given.
CitationRelation detect_citations(const ReviewDataset& dataset, const std::vector<PairKey>& assignment,
                                  std::vector<std::string>* warnings = nullptr);

enum class AuditStratum { cited, uncited };

std::string_view to_string(AuditStratum stratum);

// Uniform sample without replacement of min(n, |stratum|) pairs; ambiguous
// pairs belong to neither stratum. Sorted output, deterministic in `seed`.
std::vector<PairKey> audit_sample(const CitationRelation& relation, AuditStratum stratum, std::size_t n,
                                  std::uint64_t seed);

// audit_<stratum>.csv: submission_id, reviewer_id, stratum
void save_audit_sample(const std::filesystem::path& path, const std::vector<PairKey>& pairs, AuditStratum stratum);

}  // namespace revaudit
