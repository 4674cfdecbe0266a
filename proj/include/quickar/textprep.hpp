#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace quickar::textprep {

enum class TokenOrigin { kWhole, kCamelPart };

struct Token {
  std::string surface;
  std::string normalized;
  TokenOrigin origin = TokenOrigin::kWhole;

  friend bool operator==(const Token&, const Token&) = default;
};

struct TermSequence {
  std::vector<Token> tokens;
  std::string source_id;

  std::vector<std::string> normalized_terms() const;
  bool empty() const noexcept { return tokens.empty(); }
  std::size_t size() const noexcept { return tokens.size(); }

  friend bool operator==(const TermSequence&, const TermSequence&) = default;
};

/// Immutable set of lower-cased words removed during preprocessing.
class StopList {
 public:
  StopList() = default;
  StopList(std::set<std::string> words, std::string source_path);

  /// Parses the one-word-per-line format; `#` starts a comment.
  static StopList parse(std::string_view text, std::string source_path);
  static StopList load(const std::filesystem::path& path);
  /// The bundled English stop list.
  static const StopList& standard();
  static StopList empty() { return StopList{}; }

  bool contains(std::string_view normalized) const;
  const std::set<std::string, std::less<>>& words() const noexcept { return words_; }
  const std::string& source_path() const noexcept { return source_path_; }
  /// SHA-256 over the sorted entries, each followed by a newline.
  /// Identifies the list in artifact headers.
  std::string sha256() const;

 private:
  std::set<std::string, std::less<>> words_;
  std::string source_path_;
};

enum class SplitMode { kSplitOnly, kSplitAndKeepWhole };

std::string to_lower(std::string_view s);

/// Splits on every character that is not an ASCII letter or digit. Bytes
/// outside ASCII are kept as word characters. Pure-digit fragments are dropped.
std::vector<std::string> tokenize(std::string_view text);

/// Camel-case decomposition. Parts concatenate back to `token`.
std::vector<std::string> split_camel(std::string_view token);

TermSequence preprocess(std::string_view text, const StopList& stops, SplitMode mode,
                        std::string source_id = {});

/// Query analysis without stop-word removal or camel splitting: the
/// lower-cased raw tokens, as a plain search engine would see a title.
TermSequence verbatim_terms(std::string_view text, std::string source_id = {});

}  // namespace quickar::textprep
