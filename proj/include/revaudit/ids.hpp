#pragma once

#include <compare>
#include <functional>
#include <string>
#include <utility>

namespace revaudit {

template <typename Tag>
struct StrongId {
  std::string value;

  StrongId() = default;
  explicit StrongId(std::string v) : value(std::move(v)) {}

  const std::string& str() const noexcept { return value; }
  bool empty() const noexcept { return value.empty(); }

  friend auto operator<=>(const StrongId&, const StrongId&) = default;
  friend bool operator==(const StrongId&, const StrongId&) = default;
};

struct SubmissionTag {};
struct ReviewerTag {};

using SubmissionId = StrongId<SubmissionTag>;
using ReviewerId = StrongId<ReviewerTag>;

// (submission, reviewer); ordering is lexicographic on (submission, reviewer).
struct PairKey {
  SubmissionId submission;
  ReviewerId reviewer;

  friend auto operator<=>(const PairKey&, const PairKey&) = default;
  friend bool operator==(const PairKey&, const PairKey&) = default;
};

}  // namespace revaudit

template <typename Tag>
struct std::hash<revaudit::StrongId<Tag>> {
  size_t operator()(const revaudit::StrongId<Tag>& id) const noexcept {
    return std::hash<std::string>{}(id.value);
  }
};

template <>
struct std::hash<revaudit::PairKey> {
  size_t operator()(const revaudit::PairKey& k) const noexcept {
    size_t h = std::hash<std::string>{}(k.submission.value);
    return h ^ (std::hash<std::string>{}(k.reviewer.value) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }
};
