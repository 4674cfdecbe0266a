#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quickar/code_corpus.hpp"
#include "quickar/textprep.hpp"

namespace quickar::search {

struct SearchHit {
  std::string doc_id;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
  std::size_t doc = 0;   // index into the corpus
};

/// Rank of the first relevant document; empty when none was retrieved.
using Rank = std::optional<std::size_t>;

using QueryVector = std::map<std::string, double, std::less<>>;

struct SearchOptions {
  /// Cut-off; unset returns every matching document.
  std::optional<std::size_t> top_n;
  /// Remove query terms the corpus has never seen instead of letting them
  /// dilute the query norm.
  bool drop_unknown = false;
};

/// TF-IDF cosine ranking over an immutable corpus.
///
///   tf'(t, d) = 1 + ln(count(t, d))
///   idf(t)    = ln((N + 1) / (df(t) + 1)) + 1
///
/// Document and query vectors are L2-normalised; documents sharing no term
/// with the query are not returned. Ties are broken by doc_id ascending.
class Retriever {
 public:
  /// Throws InvalidArgument on an empty corpus.
  explicit Retriever(const corpus::Corpus& corpus);

  const corpus::Corpus& corpus() const noexcept { return *corpus_; }

  static double tf_weight(std::uint32_t count);
  double idf(std::string_view term) const;
  double doc_norm(std::size_t doc) const { return doc_norms_.at(doc); }

  QueryVector query_vector(std::span<const std::string> terms, bool drop_unknown = false) const;

  std::vector<SearchHit> search(std::span<const std::string> terms,
                                const SearchOptions& options = {}) const;
  std::vector<SearchHit> search(const textprep::TermSequence& query,
                                const SearchOptions& options = {}) const;

 private:
  const corpus::Corpus* corpus_;
  std::vector<double> doc_norms_;
};

/// One-shot search; builds a Retriever internally.
std::vector<SearchHit> search(const corpus::Corpus& corpus, const textprep::TermSequence& query,
                              std::optional<std::size_t> top_n = std::nullopt);

/// A gold entry matches a document when it equals the doc_id or the file part
/// of it (everything before '#'), so file-level change sets can be used
/// against method-level documents.
bool gold_matches(std::string_view doc_id, const std::set<std::string, std::less<>>& gold);

/// Throws InvalidArgument when `gold` is empty.
Rank rank_of_first_relevant(std::span<const SearchHit> hits,
                            const std::set<std::string, std::less<>>& gold);

}  // namespace quickar::search
