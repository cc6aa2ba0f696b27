#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "revaudit/dataset.hpp"

namespace testing {

using namespace revaudit;

inline Reviewer reviewer(const std::string& id, const std::string& last, const std::string& first, int senior = 0) {
  return Reviewer{ReviewerId(id), last, first, senior, true};
}

inline ReviewRecord review(const std::string& s, const std::string& r, int score, int expertise = 2) {
  ReviewRecord rec;
  rec.submission_id = SubmissionId(s);
  rec.reviewer_id = ReviewerId(r);
  rec.score = score;
  rec.sr_expertise = expertise;
  return rec;
}

inline PairKey pk(const std::string& s, const std::string& r) { return {SubmissionId(s), ReviewerId(r)}; }

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("revaudit_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testing
