#pragma once

#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quickar/adjacency_db.hpp"
#include "quickar/code_corpus.hpp"
#include "quickar/noun_oracle.hpp"
#include "quickar/textprep.hpp"
#include "quickar/vsm_search.hpp"

namespace quickar::reformulation {

struct QueryRecord {
  std::string query_id;
  /// Change-request title, used verbatim as the baseline query.
  std::string text;
  std::set<std::string, std::less<>> gold_docs;
};

struct Keyword {
  std::string normalized;
  std::string surface;
  bool from_identifier = false;

  friend bool operator==(const Keyword&, const Keyword&) = default;
};

/// Ordered, duplicate-free keywords.
struct KeywordSet {
  std::vector<Keyword> keywords;

  bool contains(std::string_view normalized) const;
  std::vector<std::string> normalized() const;
  std::size_t size() const noexcept { return keywords.size(); }
  bool empty() const noexcept { return keywords.empty(); }

  friend bool operator==(const KeywordSet&, const KeywordSet&) = default;
};

enum class Source { kProject, kCrowd };

struct Candidate {
  std::string term;
  std::string surface;
  bool from_identifier = false;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct CandidateScore {
  Candidate candidate;
  Source source = Source::kProject;
  double score = 0.0;
};

/// A selected candidate with its score min-max normalised within its source.
struct RankedCandidate {
  CandidateScore scored;
  double normalized_score = 0.0;
};

enum class Mode { kAll, kProjectOnly, kCrowdOnly, kReductionOnly };
enum class Strategy { kQuickar, kRocchio };

std::string_view to_string(Mode m);
std::string_view to_string(Source s);
std::string_view to_string(Strategy s);

struct ExpansionTerm {
  std::string term;
  std::string surface;
  Source source = Source::kProject;
  double score = 0.0;
  double normalized_score = 0.0;
  bool from_identifier = false;
};

struct Reformulation {
  std::string query_id;
  Strategy strategy = Strategy::kQuickar;
  Mode mode = Mode::kAll;
  KeywordSet reduced_keywords;
  std::vector<ExpansionTerm> expansion_terms;
  textprep::TermSequence rendered_query;

  /// Surface forms joined by single spaces.
  std::string rendered_text() const;
};

struct ReformulatorConfig {
  std::size_t top_docs = 5;
  std::size_t top_k = 5;
  std::size_t query_budget = 10;
  double max_document_ratio = 0.25;
};

/// Keywords of a query: camel parts plus whole identifiers, stop words
/// removed, first occurrence kept. Throws QueryEmptyError when nothing is left.
KeywordSet collect_keywords(const QueryRecord& q, const textprep::StopList& stops);

/// Drops non-nominal keywords and keywords found in more than
/// `max_document_ratio` of the documents. Returns `k` unchanged if that would
/// leave nothing.
KeywordSet reduce_keywords(const KeywordSet& k, const corpus::Corpus& corpus,
                           const NounOracle& oracle, double max_document_ratio = 0.25);

/// Terms of the top `top_docs` documents retrieved for `k`, minus `k` and
/// minus stop words. Sorted by term.
std::vector<Candidate> project_candidates(const KeywordSet& k, const search::Retriever& retriever,
                                          const textprep::StopList& stops, std::size_t top_docs = 5);

/// Union of the keywords' adjacency rows, minus `k` and stop words. Sorted by
/// term.
std::vector<Candidate> crowd_candidates(const KeywordSet& k, const adjacency::AdjacencyDatabase& db,
                                        const textprep::StopList& stops);

/// Cosine similarity of two count-weighted adjacency rows; 0 if either is
/// empty.
double adjacency_cosine(const adjacency::AdjacencyVector& a, const adjacency::AdjacencyVector& b);

/// Sum over keywords of the adjacency-row cosine between candidate and
/// keyword.
std::vector<CandidateScore> score_project_candidates(std::span<const Candidate> candidates,
                                                     const KeywordSet& k,
                                                     const adjacency::AdjacencyDatabase& db);

/// Sum over keywords of the windowed co-occurrence count.
std::vector<CandidateScore> score_crowd_candidates(std::span<const Candidate> candidates,
                                                   const KeywordSet& k,
                                                   const adjacency::AdjacencyDatabase& db);

/// Sorts each list by score (ties by term), keeps the top `top_k` of each,
/// drops non-nominal terms, min-max normalises scores within each list (a
/// list whose scores are all equal maps to 1.0), then merges by normalised
/// score with project entries winning exact ties. A term present in both
/// lists keeps its higher-ranked entry.
std::vector<RankedCandidate> select_and_combine(std::vector<CandidateScore> project,
                                                std::vector<CandidateScore> crowd,
                                                const NounOracle& oracle, std::size_t top_k = 5);

/// Emits each term's camel-case parts followed by the term itself, skipping
/// terms already emitted.
textprep::TermSequence render_query(std::span<const std::string> surfaces, std::string source_id);

/// Query reformulation over a fixed corpus, adjacency database and
/// configuration. Stateless; safe to share across threads.
class Reformulator {
 public:
  Reformulator(const search::Retriever& retriever, const adjacency::AdjacencyDatabase& db,
               const textprep::StopList& stops, const NounOracle& oracle,
               ReformulatorConfig config = {});

  Reformulation reformulate(const QueryRecord& q, Mode mode) const;

  const ReformulatorConfig& config() const noexcept { return config_; }
  const search::Retriever& retriever() const noexcept { return *retriever_; }
  const textprep::StopList& stops() const noexcept { return *stops_; }

 private:
  const search::Retriever* retriever_;
  const adjacency::AdjacencyDatabase* db_;
  const textprep::StopList* stops_;
  const NounOracle* oracle_;
  ReformulatorConfig config_;
};

}  // namespace quickar::reformulation
