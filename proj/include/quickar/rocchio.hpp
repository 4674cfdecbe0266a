#pragma once

#include <optional>
#include <vector>

#include "quickar/reformulator.hpp"
#include "quickar/vsm_search.hpp"

namespace quickar::rocchio {

struct RocchioConfig {
  std::size_t top_docs = 5;
  /// Defaults to filling the query up to `query_budget` terms.
  std::optional<std::size_t> expansion_count;
  std::size_t query_budget = 10;
};

struct TermWeight {
  std::string term;
  std::string surface;
  double score = 0.0;
};

/// Pseudo-relevance feedback weights: for every term of the top documents
/// other than the query terms, the sum over those documents of
/// tf'(t, d) * idf(t). Sorted by weight descending, ties by term.
std::vector<TermWeight> feedback_weights(const reformulation::KeywordSet& keywords,
                                         const search::Retriever& retriever,
                                         const textprep::StopList& stops, std::size_t top_docs);

/// Appends the best feedback terms to the preprocessed query keywords. No
/// reduction and no nominal filtering. An empty retrieval leaves the query
/// unchanged.
reformulation::Reformulation rocchio_expand(const reformulation::QueryRecord& q,
                                            const search::Retriever& retriever,
                                            const textprep::StopList& stops,
                                            const RocchioConfig& cfg = {});

}  // namespace quickar::rocchio
