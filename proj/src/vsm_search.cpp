#include "quickar/vsm_search.hpp"

#include <algorithm>
#include <cmath>

#include "quickar/error.hpp"

namespace quickar::search {

Retriever::Retriever(const corpus::Corpus& corpus) : corpus_(&corpus) {
  if (corpus.n_docs() == 0) throw InvalidArgument("cannot search an empty corpus");
  doc_norms_.resize(corpus.n_docs());
  for (std::size_t i = 0; i < corpus.n_docs(); ++i) {
    // Sorted terms keep the floating-point sum independent of hash order.
    const auto& counts = corpus.document(i).term_counts;
    std::vector<std::pair<std::string_view, std::uint32_t>> sorted(counts.begin(), counts.end());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (const auto& [term, count] : sorted) {
      const double w = tf_weight(count) * idf(term);
      sum += w * w;
    }
    doc_norms_[i] = std::sqrt(sum);
  }
}

double Retriever::tf_weight(std::uint32_t count) {
  return count == 0 ? 0.0 : 1.0 + std::log(static_cast<double>(count));
}

double Retriever::idf(std::string_view term) const {
  const double n = static_cast<double>(corpus_->n_docs());
  const double df = static_cast<double>(corpus_->doc_freq(term));
  return std::log((n + 1.0) / (df + 1.0)) + 1.0;
}

QueryVector Retriever::query_vector(std::span<const std::string> terms, bool drop_unknown) const {
  std::map<std::string, std::uint32_t, std::less<>> counts;
  for (const auto& t : terms) {
    if (t.empty()) continue;
    if (drop_unknown && corpus_->doc_freq(t) == 0) continue;
    ++counts[t];
  }
  QueryVector q;
  for (const auto& [term, count] : counts) {
    const double w = tf_weight(count) * idf(term);
    if (w > 0.0) q.emplace(term, w);
  }
  return q;
}

std::vector<SearchHit> Retriever::search(std::span<const std::string> terms,
                                         const SearchOptions& options) const {
  const auto q = query_vector(terms, options.drop_unknown);
  if (q.empty()) return {};
  double qnorm = 0.0;
  for (const auto& [_, w] : q) qnorm += w * w;
  qnorm = std::sqrt(qnorm);

  std::vector<double> acc(corpus_->n_docs(), 0.0);
  std::vector<std::uint32_t> touched;
  for (const auto& [term, qw] : q) {
    const double idf_t = idf(term);
    for (const auto& p : corpus_->postings(term)) {
      if (acc[p.doc] == 0.0) touched.push_back(p.doc);
      acc[p.doc] += qw * tf_weight(p.count) * idf_t;
    }
  }

  std::vector<SearchHit> hits;
  hits.reserve(touched.size());
  for (auto d : touched) {
    if (acc[d] <= 0.0 || doc_norms_[d] == 0.0) continue;
    hits.push_back(SearchHit{corpus_->document(d).doc_id, acc[d] / (qnorm * doc_norms_[d]), 0, d});
  }
  std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  if (options.top_n && hits.size() > *options.top_n) hits.resize(*options.top_n);
  for (std::size_t i = 0; i < hits.size(); ++i) hits[i].rank = i + 1;
  return hits;
}

std::vector<SearchHit> Retriever::search(const textprep::TermSequence& query,
                                         const SearchOptions& options) const {
  const auto terms = query.normalized_terms();
  return search(std::span<const std::string>(terms), options);
}

std::vector<SearchHit> search(const corpus::Corpus& corpus, const textprep::TermSequence& query,
                              std::optional<std::size_t> top_n) {
  return Retriever(corpus).search(query, SearchOptions{top_n, false});
}

bool gold_matches(std::string_view doc_id, const std::set<std::string, std::less<>>& gold) {
  if (gold.find(doc_id) != gold.end()) return true;
  const auto hash = doc_id.find('#');
  return hash != std::string_view::npos && gold.find(doc_id.substr(0, hash)) != gold.end();
}

Rank rank_of_first_relevant(std::span<const SearchHit> hits,
                            const std::set<std::string, std::less<>>& gold) {
  if (gold.empty()) throw InvalidArgument("gold set is empty");
  for (const auto& h : hits) {
    if (gold_matches(h.doc_id, gold)) return h.rank;
  }
  return std::nullopt;
}

}  // namespace quickar::search
