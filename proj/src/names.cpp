#include "revaudit/names.hpp"

#include <memory>
#include <mutex>

#include <unicode/translit.h>
#include <unicode/unistr.h>

#include "revaudit/error.hpp"

namespace revaudit::names {
namespace {

// ICU transliterators are not thread-safe for concurrent transliterate() calls
// on one instance; one instance per thread.
icu::Transliterator& folder() {
  thread_local std::unique_ptr<icu::Transliterator> instance = [] {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::Transliterator> t(icu::Transliterator::createInstance(
        "NFKD; [:Nonspacing Mark:] Remove; NFC; Upper", UTRANS_FORWARD, status));
    if (U_FAILURE(status) || !t) throw Error(ErrorKind::io, "ICU transliterator unavailable");
    return t;
  }();
  return *instance;
}

}  // namespace

std::string fold(std::string_view utf8) {
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  folder().transliterate(text);
  std::string out;
  text.toUTF8String(out);
  return out;
}

std::string fold_compact(std::string_view utf8) {
  std::string folded = fold(utf8);
  std::string out;
  out.reserve(folded.size());
  for (char c : folded)
    if (c != ' ' && c != '-' && c != '\'' && c != '.' && c != '\t') out.push_back(c);
  return out;
}

std::string first_initial(std::string_view utf8) {
  const std::string folded = fold(utf8);
  for (char c : folded) {
    if (c == ' ' || c == '\t') continue;
    if (c >= 'A' && c <= 'Z') return std::string(1, c);
    return {};
  }
  return {};
}

}  // namespace revaudit::names
