#include "quickar/reformulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "quickar/error.hpp"

namespace quickar::reformulation {

namespace {

bool identifier_token(const textprep::Token& t) {
  return t.origin == textprep::TokenOrigin::kCamelPart || textprep::split_camel(t.surface).size() > 1;
}

bool score_order(const CandidateScore& a, const CandidateScore& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.candidate.term < b.candidate.term;
}

std::uint64_t squared_norm(const adjacency::NeighborMap& row) {
  std::uint64_t sum = 0;
  for (const auto& [_, c] : row) sum += c * c;
  return sum;
}

}  // namespace

bool KeywordSet::contains(std::string_view normalized) const {
  return std::any_of(keywords.begin(), keywords.end(),
                     [&](const Keyword& k) { return k.normalized == normalized; });
}

std::vector<std::string> KeywordSet::normalized() const {
  std::vector<std::string> out;
  out.reserve(keywords.size());
  for (const auto& k : keywords) out.push_back(k.normalized);
  return out;
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::kAll: return "all";
    case Mode::kProjectOnly: return "p";
    case Mode::kCrowdOnly: return "so";
    case Mode::kReductionOnly: return "red";
  }
  return "?";
}

std::string_view to_string(Source s) { return s == Source::kProject ? "project" : "crowd"; }

std::string_view to_string(Strategy s) { return s == Strategy::kQuickar ? "quickar" : "rocchio"; }

std::string Reformulation::rendered_text() const {
  std::string out;
  for (const auto& t : rendered_query.tokens) {
    if (!out.empty()) out += ' ';
    out += t.surface;
  }
  return out;
}

KeywordSet collect_keywords(const QueryRecord& q, const textprep::StopList& stops) {
  const auto seq = textprep::preprocess(q.text, stops, textprep::SplitMode::kSplitAndKeepWhole,
                                        q.query_id);
  KeywordSet out;
  for (const auto& t : seq.tokens) {
    if (out.contains(t.normalized)) continue;
    out.keywords.push_back(Keyword{t.normalized, t.surface, identifier_token(t)});
  }
  if (out.empty()) throw QueryEmptyError(q.query_id);
  return out;
}

KeywordSet reduce_keywords(const KeywordSet& k, const corpus::Corpus& corpus,
                           const NounOracle& oracle, double max_document_ratio) {
  KeywordSet out;
  for (const auto& kw : k.keywords) {
    if (!oracle.is_nominal(kw.normalized, kw.from_identifier)) continue;
    if (corpus::document_frequency_ratio(corpus, kw.normalized) > max_document_ratio) continue;
    out.keywords.push_back(kw);
  }
  return out.empty() ? k : out;
}

std::vector<Candidate> project_candidates(const KeywordSet& k, const search::Retriever& retriever,
                                          const textprep::StopList& stops, std::size_t top_docs) {
  const auto terms = k.normalized();
  const auto hits = retriever.search(std::span<const std::string>(terms),
                                     search::SearchOptions{top_docs, false});
  std::map<std::string, Candidate> found;
  for (const auto& hit : hits) {
    for (const auto& tok : retriever.corpus().document(hit.doc).terms.tokens) {
      if (k.contains(tok.normalized) || stops.contains(tok.normalized)) continue;
      auto [it, inserted] = found.try_emplace(tok.normalized,
                                              Candidate{tok.normalized, tok.surface, false});
      it->second.from_identifier = it->second.from_identifier || identifier_token(tok);
    }
  }
  std::vector<Candidate> out;
  out.reserve(found.size());
  for (auto& [_, c] : found) out.push_back(std::move(c));
  return out;
}

std::vector<Candidate> crowd_candidates(const KeywordSet& k, const adjacency::AdjacencyDatabase& db,
                                        const textprep::StopList& stops) {
  std::set<std::string> found;
  for (const auto& kw : k.keywords) {
    for (const auto& [neighbor, _] : db.neighbors(kw.normalized).weights) {
      if (!k.contains(neighbor) && !stops.contains(neighbor)) found.insert(neighbor);
    }
  }
  std::vector<Candidate> out;
  out.reserve(found.size());
  for (const auto& w : found) out.push_back(Candidate{w, w, false});
  return out;
}

double adjacency_cosine(const adjacency::AdjacencyVector& a, const adjacency::AdjacencyVector& b) {
  if (a.empty() || b.empty()) return 0.0;
  const auto& small = a.weights.size() <= b.weights.size() ? a.weights : b.weights;
  const auto& large = a.weights.size() <= b.weights.size() ? b.weights : a.weights;
  // Integer arithmetic keeps the result independent of hash iteration order.
  std::uint64_t dot = 0;
  for (const auto& [w, c] : small) {
    if (auto it = large.find(w); it != large.end()) dot += c * it->second;
  }
  if (dot == 0) return 0.0;
  return static_cast<double>(dot) / (std::sqrt(static_cast<double>(squared_norm(a.weights))) *
                                     std::sqrt(static_cast<double>(squared_norm(b.weights))));
}

std::vector<CandidateScore> score_project_candidates(std::span<const Candidate> candidates,
                                                     const KeywordSet& k,
                                                     const adjacency::AdjacencyDatabase& db) {
  std::vector<CandidateScore> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    const auto adj_t = db.neighbors(c.term);
    double score = 0.0;
    for (const auto& kw : k.keywords) score += adjacency_cosine(adj_t, db.neighbors(kw.normalized));
    out.push_back(CandidateScore{c, Source::kProject, score});
  }
  return out;
}

std::vector<CandidateScore> score_crowd_candidates(std::span<const Candidate> candidates,
                                                   const KeywordSet& k,
                                                   const adjacency::AdjacencyDatabase& db) {
  std::vector<CandidateScore> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    std::uint64_t sum = 0;
    for (const auto& kw : k.keywords) sum += db.cooccurrence_count(c.term, kw.normalized);
    out.push_back(CandidateScore{c, Source::kCrowd, static_cast<double>(sum)});
  }
  return out;
}

std::vector<RankedCandidate> select_and_combine(std::vector<CandidateScore> project,
                                                std::vector<CandidateScore> crowd,
                                                const NounOracle& oracle, std::size_t top_k) {
  auto select = [&](std::vector<CandidateScore>& list) {
    std::sort(list.begin(), list.end(), score_order);
    if (list.size() > top_k) list.resize(top_k);
    std::erase_if(list, [&](const CandidateScore& c) {
      return !oracle.is_nominal(c.candidate.term, c.candidate.from_identifier);
    });
    std::vector<RankedCandidate> ranked;
    if (list.empty()) return ranked;
    const double hi = list.front().score;
    const double lo = list.back().score;
    for (auto& c : list) {
      const double norm = hi > lo ? (c.score - lo) / (hi - lo) : 1.0;
      ranked.push_back(RankedCandidate{std::move(c), norm});
    }
    return ranked;
  };
  auto p = select(project);
  auto so = select(crowd);

  // Stable merge: within a source the score order is kept; across sources the
  // higher normalised score wins and project wins exact ties.
  std::vector<RankedCandidate> merged;
  merged.reserve(p.size() + so.size());
  std::size_t i = 0, j = 0;
  while (i < p.size() || j < so.size()) {
    if (j == so.size() || (i < p.size() && p[i].normalized_score >= so[j].normalized_score)) {
      merged.push_back(std::move(p[i++]));
    } else {
      merged.push_back(std::move(so[j++]));
    }
  }
  std::unordered_set<std::string> seen;
  std::erase_if(merged, [&](const RankedCandidate& r) {
    return !seen.insert(r.scored.candidate.term).second;
  });
  return merged;
}

textprep::TermSequence render_query(std::span<const std::string> surfaces, std::string source_id) {
  textprep::TermSequence seq;
  seq.source_id = std::move(source_id);
  std::unordered_set<std::string> emitted;
  auto emit = [&](const std::string& surface, textprep::TokenOrigin origin) {
    auto normalized = textprep::to_lower(surface);
    if (!emitted.insert(normalized).second) return;
    seq.tokens.push_back(textprep::Token{surface, std::move(normalized), origin});
  };
  for (const auto& s : surfaces) {
    const auto parts = textprep::split_camel(s);
    if (parts.size() > 1) {
      for (const auto& part : parts) emit(part, textprep::TokenOrigin::kCamelPart);
    }
    emit(s, textprep::TokenOrigin::kWhole);
  }
  return seq;
}

Reformulator::Reformulator(const search::Retriever& retriever,
                           const adjacency::AdjacencyDatabase& db, const textprep::StopList& stops,
                           const NounOracle& oracle, ReformulatorConfig config)
    : retriever_(&retriever), db_(&db), stops_(&stops), oracle_(&oracle), config_(config) {
  if (config_.top_docs == 0 || config_.top_k == 0 || config_.query_budget == 0) {
    throw InvalidArgument("top_docs, top_k and query_budget must be at least 1");
  }
}

Reformulation Reformulator::reformulate(const QueryRecord& q, Mode mode) const {
  Reformulation out;
  out.query_id = q.query_id;
  out.mode = mode;
  out.reduced_keywords = reduce_keywords(collect_keywords(q, *stops_), retriever_->corpus(),
                                         *oracle_, config_.max_document_ratio);
  const auto& k = out.reduced_keywords;
  const std::size_t slots = config_.query_budget > k.size() ? config_.query_budget - k.size() : 0;

  if (mode != Mode::kReductionOnly && slots > 0) {
    std::vector<CandidateScore> rp, rso;
    if (mode == Mode::kAll || mode == Mode::kProjectOnly) {
      const auto tp = project_candidates(k, *retriever_, *stops_, config_.top_docs);
      rp = score_project_candidates(tp, k, *db_);
    }
    if (mode == Mode::kAll || mode == Mode::kCrowdOnly) {
      const auto tso = crowd_candidates(k, *db_, *stops_);
      rso = score_crowd_candidates(tso, k, *db_);
    }
    auto ranked = select_and_combine(std::move(rp), std::move(rso), *oracle_, config_.top_k);
    for (auto& r : ranked) {
      if (out.expansion_terms.size() == slots) break;
      out.expansion_terms.push_back(ExpansionTerm{r.scored.candidate.term,
                                                  r.scored.candidate.surface, r.scored.source,
                                                  r.scored.score, r.normalized_score,
                                                  r.scored.candidate.from_identifier});
    }
  }

  std::vector<std::string> surfaces;
  for (const auto& kw : k.keywords) surfaces.push_back(kw.surface);
  for (const auto& e : out.expansion_terms) surfaces.push_back(e.surface);
  out.rendered_query = render_query(surfaces, q.query_id);
  return out;
}

}  // namespace quickar::reformulation
