#include "quickar/rocchio.hpp"

#include <algorithm>
#include <map>

#include "quickar/error.hpp"

namespace quickar::rocchio {

std::vector<TermWeight> feedback_weights(const reformulation::KeywordSet& keywords,
                                         const search::Retriever& retriever,
                                         const textprep::StopList& stops, std::size_t top_docs) {
  const auto terms = keywords.normalized();
  const auto hits = retriever.search(std::span<const std::string>(terms),
                                     search::SearchOptions{top_docs, false});
  std::map<std::string, TermWeight> acc;
  for (const auto& hit : hits) {
    const auto& doc = retriever.corpus().document(hit.doc);
    // First-seen surface form, in rank then document order.
    for (const auto& tok : doc.terms.tokens) {
      if (keywords.contains(tok.normalized) || stops.contains(tok.normalized)) continue;
      acc.try_emplace(tok.normalized, TermWeight{tok.normalized, tok.surface, 0.0});
    }
  }
  for (const auto& hit : hits) {
    const auto& counts = retriever.corpus().document(hit.doc).term_counts;
    for (auto& [term, w] : acc) {
      if (auto it = counts.find(term); it != counts.end()) {
        w.score += search::Retriever::tf_weight(it->second) * retriever.idf(term);
      }
    }
  }
  std::vector<TermWeight> out;
  out.reserve(acc.size());
  for (auto& [_, w] : acc) out.push_back(std::move(w));
  std::stable_sort(out.begin(), out.end(),
                   [](const TermWeight& a, const TermWeight& b) { return a.score > b.score; });
  return out;
}

reformulation::Reformulation rocchio_expand(const reformulation::QueryRecord& q,
                                            const search::Retriever& retriever,
                                            const textprep::StopList& stops,
                                            const RocchioConfig& cfg) {
  if (cfg.top_docs == 0) throw InvalidArgument("rocchio top_docs must be at least 1");
  reformulation::Reformulation out;
  out.query_id = q.query_id;
  out.strategy = reformulation::Strategy::kRocchio;
  out.reduced_keywords = reformulation::collect_keywords(q, stops);
  const auto& k = out.reduced_keywords;

  const std::size_t count = cfg.expansion_count.value_or(
      cfg.query_budget > k.size() ? cfg.query_budget - k.size() : 0);
  if (count > 0) {
    for (auto& w : feedback_weights(k, retriever, stops, cfg.top_docs)) {
      if (out.expansion_terms.size() == count) break;
      out.expansion_terms.push_back(reformulation::ExpansionTerm{
          w.term, w.surface, reformulation::Source::kProject, w.score, 0.0});
    }
  }
  std::vector<std::string> surfaces;
  for (const auto& kw : k.keywords) surfaces.push_back(kw.surface);
  for (const auto& e : out.expansion_terms) surfaces.push_back(e.surface);
  out.rendered_query = reformulation::render_query(surfaces, q.query_id);
  return out;
}

}  // namespace quickar::rocchio
