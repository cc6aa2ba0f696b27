#include "revaudit/citation_parser.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <unordered_map>

#include "revaudit/csv.hpp"
#include "revaudit/error.hpp"
#include "revaudit/names.hpp"
#include "revaudit/rng.hpp"

namespace revaudit {

// ---------------------------------------------------------------------------
// Lexing

namespace {

enum class Tok { word, comma, semicolon, amp, and_, et_al };

struct Token {
  Tok kind;
  std::string text;  // word text without a trailing period
  bool period = false;
  bool initial = false;
};

std::size_t code_points(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

// "J", "J.P", "J.-P": every period/hyphen separated piece is one letter.
bool is_initial(std::string_view word) {
  if (word.empty()) return false;
  std::size_t start = 0;
  bool any = false;
  for (std::size_t i = 0; i <= word.size(); ++i) {
    if (i == word.size() || word[i] == '.' || word[i] == '-') {
      const auto piece = word.substr(start, i - start);
      if (!piece.empty()) {
        if (code_points(piece) != 1) return false;
        const unsigned char c0 = static_cast<unsigned char>(piece[0]);
        if (c0 < 0x80 && !std::isalpha(c0)) return false;
        any = true;
      }
      start = i + 1;
    }
  }
  return any;
}

std::vector<Token> lex(std::string_view text) {
  std::vector<std::string> chunks;
  std::string cur;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (!cur.empty()) chunks.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) chunks.push_back(std::move(cur));

  std::vector<Token> out;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    std::string chunk = chunks[i];
    if (chunk == "&") {
      out.push_back({Tok::amp, {}});
      continue;
    }
    if (chunk == "and") {
      out.push_back({Tok::and_, {}});
      continue;
    }
    if (chunk == "et" && i + 1 < chunks.size() && chunks[i + 1].rfind("al", 0) == 0) {
      out.push_back({Tok::et_al, {}});
      ++i;
      continue;
    }
    if (chunk.rfind("et.", 0) == 0 || chunk == "etal.") {
      out.push_back({Tok::et_al, {}});
      continue;
    }
    // Peel trailing separators; a period directly before them stays on the word.
    std::vector<Tok> trailing;
    while (!chunk.empty() && (chunk.back() == ',' || chunk.back() == ';')) {
      trailing.push_back(chunk.back() == ',' ? Tok::comma : Tok::semicolon);
      chunk.pop_back();
    }
    if (!chunk.empty()) {
      Token t{Tok::word, chunk};
      if (t.text.back() == '.') {
        t.period = true;
        t.text.pop_back();
      }
      t.initial = is_initial(t.text);
      if (!t.text.empty()) out.push_back(std::move(t));
    }
    for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) out.push_back({*it, {}});
  }
  return out;
}

bool is_separator(const Token& t) {
  return t.kind == Tok::comma || t.kind == Tok::semicolon || t.kind == Tok::amp || t.kind == Tok::and_;
}

// A word closing a sentence: period on something that is not an initial.
bool ends_sentence(const Token& t) { return t.kind == Tok::word && t.period && !t.initial; }

std::string join_words(const std::vector<const Token*>& words) {
  std::string out;
  for (const Token* w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w->text;
  }
  return out;
}

class BlockParser {
 public:
  explicit BlockParser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  ParsedEntry run() {
    ParsedEntry result;
    if (toks_.empty()) {
      result.warning = "empty entry";
      return result;
    }
    const bool inverted = detect_inverted();
    bool ok = inverted ? parse_inverted(result.authors) : parse_natural(result.authors);
    if (result.authors.empty()) {
      result.warning = "no author could be parsed";
    } else if (!ok) {
      result.warning = "author list ended unexpectedly";
    }
    return result;
  }

 private:
  bool at_end() const { return pos_ >= toks_.size(); }
  const Token& peek(std::size_t ahead = 0) const { return toks_[pos_ + ahead]; }
  bool has(std::size_t ahead = 0) const { return pos_ + ahead < toks_.size(); }

  bool detect_inverted() const {
    if (toks_[0].kind != Tok::word || toks_[0].initial) return false;
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      const Token& t = toks_[i];
      if (t.kind == Tok::comma) {
        if (i + 1 >= toks_.size() || toks_[i + 1].kind != Tok::word) return false;
        if (toks_[i + 1].initial) return true;
        std::size_t words = 0;
        for (std::size_t k = i + 1; k < toks_.size(); ++k) {
          if (toks_[k].kind != Tok::word) break;
          ++words;
          if (toks_[k].period) break;
        }
        return words == 1;
      }
      if (t.kind != Tok::word || ends_sentence(t)) return false;
    }
    return false;
  }

  // Consumes separators between authors. Returns false when the block ends.
  bool consume_separator() {
    if (at_end() || !is_separator(peek())) return false;
    semicolon_ = false;
    while (!at_end() && is_separator(peek())) semicolon_ |= toks_[pos_++].kind == Tok::semicolon;
    if (!at_end() && peek().kind == Tok::et_al) return false;
    return !at_end() && peek().kind == Tok::word;
  }

  // "Last, Given" authors. After a spelled-out first given name, comma
  // separated authors read "Given Last"; semicolons keep the inverted order.
  bool parse_inverted(std::vector<AuthorName>& out) {
    bool full_given = false;
    while (true) {
      if (!out.empty() && ((full_given && !semicolon_) || natural_segment())) {
        bool closed = false;
        if (!natural_author(out, closed)) return false;
        if (closed) return true;
        if (!at_end() && peek().kind == Tok::et_al) return true;
        if (!consume_separator()) return true;
        continue;
      }
      std::vector<const Token*> last;
      while (!at_end() && peek().kind == Tok::word && !ends_sentence(peek())) last.push_back(&toks_[pos_++]);
      if (last.empty() || at_end() || peek().kind != Tok::comma) return false;
      ++pos_;
      if (at_end() || peek().kind != Tok::word) return false;
      const Token& given = toks_[pos_++];
      if (out.empty()) full_given = !given.initial;
      bool closed = ends_sentence(given);
      while (!closed && !at_end() && peek().kind == Tok::word && peek().initial) {
        closed = ends_sentence(peek());
        ++pos_;
      }
      const std::string initial = names::first_initial(given.text);
      if (initial.empty()) return false;
      out.push_back({join_words(last), initial});
      if (closed) return true;
      if (!at_end() && peek().kind == Tok::et_al) return true;
      if (!consume_separator()) return true;
    }
  }

  // One "Given Last" author; `closed` is set when its last word ends the block.
  bool natural_author(std::vector<AuthorName>& out, bool& closed) {
    if (at_end() || peek().kind != Tok::word) return false;
    const Token& given = toks_[pos_++];
    if (ends_sentence(given)) return false;
    while (has(1) && peek().kind == Tok::word && peek().initial && peek(1).kind == Tok::word) ++pos_;
    std::vector<const Token*> last;
    closed = false;
    while (!at_end() && peek().kind == Tok::word) {
      last.push_back(&toks_[pos_]);
      closed = ends_sentence(toks_[pos_]);
      ++pos_;
      if (closed) break;
    }
    const std::string initial = names::first_initial(given.text);
    if (last.empty() || initial.empty()) return false;
    out.push_back({join_words(last), initial});
    return true;
  }

  // Words up to the next separator carry no "Last, Given" comma.
  bool natural_segment() const {
    std::size_t i = pos_;
    while (i < toks_.size() && toks_[i].kind == Tok::word) {
      if (ends_sentence(toks_[i])) return true;
      ++i;
    }
    if (i >= toks_.size() || toks_[i].kind != Tok::comma) return true;
    return i + 1 >= toks_.size() || toks_[i + 1].kind != Tok::word;
  }

  // "Given Last" authors.
  bool parse_natural(std::vector<AuthorName>& out) {
    while (true) {
      bool closed = false;
      if (!natural_author(out, closed)) return false;
      if (closed) return true;
      if (!at_end() && peek().kind == Tok::et_al) return true;
      if (!consume_separator()) return true;
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool semicolon_ = false;
};

}  // namespace

ParsedEntry parse_reference_entry(std::string_view entry) {
  static const std::regex year_paren(R"(\(\s*(1[89]|20)\d\d[a-z]?\s*\))");
  std::string text(entry);
  std::smatch m;
  if (std::regex_search(text, m, year_paren)) text = text.substr(0, static_cast<std::size_t>(m.position(0)));
  ParsedEntry parsed = BlockParser(lex(text)).run();
  if (parsed.warning) parsed.warning = *parsed.warning + ": \"" + std::string(entry) + "\"";
  return parsed;
}

// ---------------------------------------------------------------------------
// Keys and detection

ReviewerKey build_key(const Reviewer& reviewer) {
  ReviewerKey k;
  std::string initial = names::first_initial(reviewer.first_name);
  if (initial.empty()) {
    initial = kPlaceholderInitial;
    k.flagged = true;
  }
  k.key = names::fold_compact(reviewer.last_name) + "_" + initial;
  return k;
}

std::string author_key(const AuthorName& author) {
  return names::fold_compact(author.last_name) + "_" + author.first_initial;
}

CitationRelation detect_citations(const ReviewDataset& dataset, const std::vector<PairKey>& assignment,
                                  std::vector<std::string>* warnings) {
  std::unordered_map<ReviewerId, ReviewerKey> keys;
  std::unordered_map<std::string, std::size_t> multiplicity;
  for (const auto& r : dataset.reviewers()) {
    auto k = build_key(r);
    ++multiplicity[k.key];
    keys.emplace(r.id, std::move(k));
  }

  std::map<SubmissionId, std::set<std::string>> cited_keys;
  for (const auto& pair : assignment) {
    if (cited_keys.count(pair.submission)) continue;
    const Submission* s = dataset.find_submission(pair.submission);
    if (s == nullptr) throw Error(ErrorKind::referential, "assignment references unknown submission " + pair.submission.str());
    auto& set = cited_keys[pair.submission];
    for (const auto& entry : s->reference_entries) {
      ParsedEntry parsed = parse_reference_entry(entry);
      if (parsed.warning && warnings) warnings->push_back("submission " + s->id.str() + ": " + *parsed.warning);
      for (const auto& a : parsed.authors) set.insert(author_key(a));
    }
  }

  CitationRelation relation;
  for (const auto& pair : assignment) {
    auto it = keys.find(pair.reviewer);
    if (it == keys.end()) throw Error(ErrorKind::referential, "assignment references unknown reviewer " + pair.reviewer.str());
    const ReviewerKey& key = it->second;
    const bool verdict = cited_keys[pair.submission].count(key.key) != 0;
    relation.set_parsed(pair, verdict);
    if (verdict && (key.flagged || multiplicity[key.key] > 1)) relation.mark_ambiguous(pair);
  }
  return relation;
}

std::string_view to_string(AuditStratum stratum) { return stratum == AuditStratum::cited ? "CITED" : "UNCITED"; }

std::vector<PairKey> audit_sample(const CitationRelation& relation, AuditStratum stratum, std::size_t n,
                                  std::uint64_t seed) {
  if (n == 0) return {};
  std::vector<PairKey> pool;
  for (const auto& [pair, verdict] : relation.parsed()) {
    if (relation.is_ambiguous(pair)) continue;
    if (relation.is_cited(pair) == (stratum == AuditStratum::cited)) pool.push_back(pair);
  }
  if (pool.empty())
    throw Error(ErrorKind::no_data, "audit stratum " + std::string(to_string(stratum)) + " is empty");
  const std::size_t take = std::min(n, pool.size());
  rng::Xoshiro256 gen(rng::derive(seed, rng::streams::audit, stratum == AuditStratum::cited ? 0 : 1));
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(gen.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  std::sort(pool.begin(), pool.end());
  return pool;
}

void save_audit_sample(const std::filesystem::path& path, const std::vector<PairKey>& pairs, AuditStratum stratum) {
  csv::Table t;
  t.header = {"submission_id", "reviewer_id", "stratum"};
  for (const auto& p : pairs) t.rows.push_back({p.submission.str(), p.reviewer.str(), std::string(to_string(stratum))});
  csv::write(path, t);
}

}  // namespace revaudit
