#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "quickar/textprep.hpp"

namespace quickar::corpus {

/// A method-like unit cut out of a source file. `name` is empty for the
/// whole-file fallback unit.
struct MethodUnit {
  std::string name;
  std::string text;
};

struct SplitResult {
  std::vector<MethodUnit> units;
  bool whole_file = false;
  bool unbalanced = false;
};

/// Heuristic method splitter for curly-brace languages. A unit is an
/// identifier followed by a parameter list and a `{`, found directly inside
/// a type body (or at file scope). The unit text runs from the end of the
/// previous statement, so leading comments and annotations are kept, to the
/// matching `}`. Comments, string and character literals are skipped when
/// matching braces. Files with no units or unbalanced braces produce a single
/// whole-file unit.
SplitResult split_methods(std::string_view source);

/// Blanks out `//` and `/* */` comments, keeping newlines and literals.
std::string strip_comments(std::string_view source);

struct Document {
  std::string doc_id;
  textprep::TermSequence terms;
  std::unordered_map<std::string, std::uint32_t> term_counts;

  static Document make(std::string doc_id, textprep::TermSequence terms);
};

struct CorpusMeta {
  std::string stoplist_sha;
  std::string keywords_sha;
  std::string source;

  friend bool operator==(const CorpusMeta&, const CorpusMeta&) = default;
};

/// One entry of a term's posting list.
struct Posting {
  std::uint32_t doc = 0;
  std::uint32_t count = 0;
};

/// Immutable collection of method documents with document frequencies and an
/// inverted index.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<Document> documents, CorpusMeta meta);

  const std::vector<Document>& documents() const noexcept { return documents_; }
  const Document& document(std::size_t i) const { return documents_.at(i); }
  std::size_t n_docs() const noexcept { return documents_.size(); }
  const CorpusMeta& meta() const noexcept { return meta_; }

  std::uint32_t doc_freq(std::string_view word) const;
  const std::unordered_map<std::string, std::uint32_t>& doc_freqs() const noexcept {
    return doc_freq_;
  }
  /// Postings sorted by document index; empty for unknown words.
  const std::vector<Posting>& postings(std::string_view word) const;
  std::optional<std::size_t> find(std::string_view doc_id) const;

  friend bool operator==(const Corpus& a, const Corpus& b);

 private:
  std::vector<Document> documents_;
  CorpusMeta meta_;
  std::unordered_map<std::string, std::uint32_t> doc_freq_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct CorpusOptions {
  /// Source tree split into methods by the heuristic splitter.
  std::optional<std::filesystem::path> source_root;
  /// Directory of one-document-per-file text, ingested without splitting.
  std::optional<std::filesystem::path> pre_split_root;
  std::vector<std::string> extensions = {".java", ".c",  ".cc", ".cpp",   ".cxx", ".h",
                                         ".hh",   ".hpp", ".cs", ".js",    ".ts",  ".go",
                                         ".kt",   ".scala", ".groovy", ".swift"};
  bool strip_comments = false;
  unsigned jobs = 1;
  std::string source_label;
};

struct CorpusStats {
  std::size_t files = 0;
  std::size_t unreadable = 0;
  std::size_t whole_file_fallbacks = 0;
  std::size_t unbalanced = 0;
};

/// The bundled Java keyword list.
const textprep::StopList& java_keywords();

/// Preprocesses one unit: camel parts plus whole identifiers, stop words and
/// language keywords removed.
textprep::TermSequence document_terms(std::string_view text, const textprep::StopList& stops,
                                      const textprep::StopList& keywords, std::string doc_id);

/// Walks the configured roots in lexicographic path order. Unreadable files
/// are skipped and counted.
Corpus build_corpus(const CorpusOptions& options, const textprep::StopList& stops,
                    const textprep::StopList& keywords, CorpusStats* stats = nullptr);

/// Fraction of documents containing `word`. Throws on an empty corpus.
double document_frequency_ratio(const Corpus& corpus, std::string_view word);

/// Text format:
///   #format=quickar-corpus-1
///   #stoplist_sha=<hex>
///   #keywords_sha=<hex>
///   #source=<id>
///   doc_id<TAB>tok tok tok ...
///   ...
///   #docs=<n_docs>
///   #tokens=<total tokens>
/// Tokens keep their surface form in document order; camel-case parts carry
/// a leading '+'. Term counts and frequencies are rebuilt on load.
void save(const Corpus& corpus, std::ostream& out);
void save(const Corpus& corpus, const std::filesystem::path& path);
Corpus load(std::istream& in, const std::string& name);
Corpus load(const std::filesystem::path& path);

}  // namespace quickar::corpus
