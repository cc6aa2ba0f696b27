#pragma once

#include <string>
#include <string_view>

namespace revaudit::names {

// Unicode compatibility decomposition, combining marks removed, uppercased.
// Returns UTF-8; Latin input folds to ASCII ("Núñez" -> "NUNEZ").
std::string fold(std::string_view utf8);

// fold() with spaces, hyphens, apostrophes and periods removed
// ("van Helsing" -> "VANHELSING", "O'Brien" -> "OBRIEN").
std::string fold_compact(std::string_view utf8);

// First letter (A-Z after folding) of the first whitespace-separated token;
// empty when there is none.
std::string first_initial(std::string_view utf8);

}  // namespace revaudit::names
