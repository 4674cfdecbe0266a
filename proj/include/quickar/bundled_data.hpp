#pragma once

#include <string_view>

// Contents of the files under data/, compiled into the library so the tools
// work without an installation prefix.
namespace quickar::bundled {

std::string_view stopwords();
std::string_view java_keywords();
std::string_view non_nouns();
std::string_view nominal_whitelist();

}  // namespace quickar::bundled
