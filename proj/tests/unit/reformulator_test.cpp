#include <gtest/gtest.h>

#include "quickar/error.hpp"
#include "quickar/reformulator.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace adj = quickar::adjacency;
namespace cc = quickar::corpus;
namespace qr = quickar::reformulation;
namespace qs = quickar::search;
namespace tp = quickar::textprep;

using quickar::AcceptAllNounOracle;
using quickar::LexiconNounOracle;

namespace {

const tp::StopList& stops() { return tp::StopList::standard(); }

std::vector<adj::TitleRecord> table_one() {
  return {{6470651, "Creating a memory leak with Java", {"java"}},
          {4948529, "Easiest way to cause memory leak in Java?", {"java"}},
          {1071631, "Tracking down a memory leak/garbage-collection issue in Java", {"java"}}};
}

qr::KeywordSet keywords(std::initializer_list<const char*> words) {
  qr::KeywordSet k;
  for (const char* w : words) k.keywords.push_back({w, w, false});
  return k;
}

std::set<std::string> terms_of(const std::vector<qr::Candidate>& c) {
  std::set<std::string> out;
  for (const auto& x : c) out.insert(x.term);
  return out;
}

qr::CandidateScore scored(const std::string& term, qr::Source s, double score) {
  return {{term, term, false}, s, score};
}

std::vector<std::string> order(const std::vector<qr::RankedCandidate>& r) {
  std::vector<std::string> out;
  for (const auto& x : r) out.push_back(x.scored.candidate.term);
  return out;
}

// Small project around the working example title.
struct WorkingExample {
  cc::Corpus corpus;
  adj::AdjacencyDatabase db;

  WorkingExample() {
    std::vector<std::pair<std::string, std::string>> docs = {
        {"rest/RestClientService.java#1:send",
         "Response send(Request request) { RestClientService client = executor.submit(httpRequest); }"},
        {"rest/RestClientService.java#2:decode", "String decode(byte[] content) { return charset.decode(content); }"},
        {"web/WebService.java#1:call", "void call(WebService service) { executor.execute(service); }"},
        {"web/HttpExecutor.java#1:run", "void run(HttpRequest httpRequest) { executor.run(httpRequest); }"},
    };
    // Filler documents keep encoding and the rest of the title frequent
    // enough to be dropped by the document-frequency rule.
    for (int i = 0; i < 16; ++i) {
      docs.emplace_back("util/Util" + std::to_string(i) + ".java#1:f",
                        "void f() { encoding ignores value" + std::to_string(i) + " }");
    }
    corpus = synthetic::corpus_from_texts(docs);
    db = adj::build(
        std::vector<adj::TitleRecord>{
            {1, "Rest client service timeout with web service executor", {"java"}},
            {2, "Client content encoding in http web service", {"java"}},
            {3, "Rest service http executor thread pool", {"java"}},
            {4, "Java web service rest client", {"java"}}},
        stops());
  }
};

}  // namespace

TEST(CollectKeywords, WorkingExampleTitle) {
  const auto k = qr::collect_keywords({"q", "RestClientService ignores content encoding", {}}, stops());
  EXPECT_EQ(k.normalized(), (std::vector<std::string>{"rest", "client", "service", "restclientservice",
                                                       "ignores", "content", "encoding"}));
  EXPECT_TRUE(k.keywords[0].from_identifier);
  EXPECT_TRUE(k.keywords[3].from_identifier);
  EXPECT_FALSE(k.keywords[4].from_identifier);
}

TEST(CollectKeywords, DeduplicatesAndMatchesPreprocess) {
  const std::string title = "Leak in leakDetector leak";
  const auto k = qr::collect_keywords({"q", title, {}}, stops());
  EXPECT_EQ(k.normalized(), (std::vector<std::string>{"leak", "detector", "leakdetector"}));
  auto expected = tp::preprocess(title, stops(), tp::SplitMode::kSplitAndKeepWhole).normalized_terms();
  expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
  std::set<std::string> a(expected.begin(), expected.end());
  const auto n = k.normalized();
  EXPECT_EQ(a, std::set<std::string>(n.begin(), n.end()));
}

TEST(CollectKeywords, AllStopWordsIsQueryEmpty) {
  try {
    qr::collect_keywords({"q7", "a the of", {}}, stops());
    FAIL();
  } catch (const quickar::QueryEmptyError& e) {
    EXPECT_EQ(e.query_id(), "q7");
    EXPECT_EQ(std::string(e.what()).rfind("QUERY_EMPTY", 0), 0u);
  }
}

TEST(ReduceKeywords, WorkingExampleDropsVerbAndFrequentTerm) {
  const WorkingExample ex;
  const auto k = qr::collect_keywords({"q", "RestClientService ignores content encoding", {}}, stops());
  const auto reduced = qr::reduce_keywords(k, ex.corpus, LexiconNounOracle());
  EXPECT_EQ(reduced.normalized(),
            (std::vector<std::string>{"rest", "client", "service", "restclientservice", "content"}));
}

TEST(ReduceKeywords, GuardReturnsOriginalWhenEverythingGoes) {
  const auto c = synthetic::corpus_from_texts({{"a", "alpha beta"}, {"b", "alpha beta"}});
  const auto k = keywords({"alpha", "beta"});
  EXPECT_EQ(qr::reduce_keywords(k, c, AcceptAllNounOracle()), k);
}

TEST(ReduceKeywords, PlantedRatios) {
  std::vector<std::pair<std::string, std::string>> docs;
  for (int i = 0; i < 10; ++i) {
    std::string text = "filler";
    if (i < 2) text += " lowratio";
    if (i < 3) text += " highratio";
    docs.emplace_back("d" + std::to_string(i), text);
  }
  const auto c = synthetic::corpus_from_texts(docs);
  ASSERT_DOUBLE_EQ(cc::document_frequency_ratio(c, "lowratio"), 0.2);
  ASSERT_DOUBLE_EQ(cc::document_frequency_ratio(c, "highratio"), 0.3);
  const auto reduced = qr::reduce_keywords(keywords({"lowratio", "highratio"}), c, AcceptAllNounOracle());
  EXPECT_EQ(reduced.normalized(), std::vector<std::string>{"lowratio"});
}

TEST(ProjectCandidates, TrivialCases) {
  const auto c = synthetic::corpus_from_texts({{"d", "alpha beta"}});
  const qs::Retriever r(c);
  EXPECT_EQ(terms_of(qr::project_candidates(keywords({"alpha"}), r, stops(), 5)),
            (std::set<std::string>{"beta"}));
  EXPECT_TRUE(qr::project_candidates(keywords({"gamma"}), r, stops(), 5).empty());
}

TEST(ProjectCandidates, MatchesUnionOfDenseTopFive) {
  const auto fx = synthetic::random_corpus(12, 20, 40);
  const qs::Retriever r(fx.corpus);
  std::mt19937 rng(4);
  for (int round = 0; round < 15; ++round) {
    qr::KeywordSet k;
    std::vector<std::string> q;
    for (int i = 0; i < 3; ++i) {
      const auto& w = fx.vocab[rng() % fx.vocab.size()];
      if (k.contains(w)) continue;
      k.keywords.push_back({w, w, false});
      q.push_back(w);
    }
    auto dense = oracle::DenseCosine(fx.corpus).rank(q);
    if (dense.size() > 5) dense.resize(5);
    std::set<std::string> expected;
    for (const auto& h : dense) {
      for (const auto& t : fx.corpus.document(h.doc).terms.tokens) {
        if (!k.contains(t.normalized)) expected.insert(t.normalized);
      }
    }
    EXPECT_EQ(terms_of(qr::project_candidates(k, r, stops(), 5)), expected);
  }
}

TEST(CrowdCandidates, TableOneAndUnknown) {
  const auto db = adj::build(table_one(), stops());
  EXPECT_EQ(terms_of(qr::crowd_candidates(keywords({"memory"}), db, stops())),
            (std::set<std::string>{"creating", "leak", "cause", "down"}));
  EXPECT_TRUE(qr::crowd_candidates(keywords({"quantum"}), db, stops()).empty());
}

TEST(CrowdCandidates, MatchesBruteForceUnion) {
  const auto titles = synthetic::random_titles(3, 200, 30);
  const auto db = adj::build(titles, stops());
  const auto pairs = oracle::brute_force_pairs(oracle::title_words(titles, stops()), 2);
  const auto words = db.sorted_words();
  const auto k = keywords({words[0].c_str(), words[5].c_str(), words[9].c_str()});
  std::set<std::string> expected;
  for (const auto& [p, _] : pairs) {
    if (k.contains(p.first) && !k.contains(p.second)) expected.insert(p.second);
    if (k.contains(p.second) && !k.contains(p.first)) expected.insert(p.first);
  }
  EXPECT_EQ(terms_of(qr::crowd_candidates(k, db, stops())), expected);
}

TEST(ScoreProject, IdenticalAndDisjointNeighbourhoods) {
  adj::AdjacencyDatabase db;
  db.add_pair("t", "x", 2);
  db.add_pair("t", "y", 1);
  db.add_pair("k", "x", 2);
  db.add_pair("k", "y", 1);
  db.add_pair("lonely", "z", 4);
  const std::vector<qr::Candidate> cands = {{"t", "t", false}, {"lonely", "lonely", false}};
  const auto s = qr::score_project_candidates(cands, keywords({"k"}), db);
  EXPECT_NEAR(s[0].score, 1.0, 1e-12);
  EXPECT_EQ(s[1].score, 0.0);
  EXPECT_EQ(s[0].source, qr::Source::kProject);
}

TEST(ScoreProject, MatchesDenseCosineOracle) {
  const auto titles = synthetic::random_titles(17, 400, 30);
  const auto db = adj::build(titles, stops());
  const auto words = db.sorted_words();
  ASSERT_GE(words.size(), 25u);
  const auto k = keywords({words[1].c_str(), words[4].c_str(), words[8].c_str()});
  std::vector<qr::Candidate> cands;
  for (std::size_t i = 10; i < 18; ++i) cands.push_back({words[i], words[i], false});
  cands.push_back({"neverseen", "neverseen", false});
  const auto scores = qr::score_project_candidates(cands, k, db);
  ASSERT_EQ(scores.size(), cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    long double expected = 0;
    for (const auto& kw : k.keywords) expected += oracle::dense_adjacency_cosine(db, cands[i].term, kw.normalized);
    EXPECT_NEAR(scores[i].score, static_cast<double>(expected), 1e-9) << cands[i].term;
    EXPECT_GE(scores[i].score, 0.0);
    EXPECT_LE(scores[i].score, 3.0 + 1e-12);
  }
}

TEST(ScoreCrowd, TableOneLeak) {
  const auto db = adj::build(table_one(), stops());
  const std::vector<qr::Candidate> cands = {{"leak", "leak", false}, {"garbage", "garbage", false}};
  const auto s = qr::score_crowd_candidates(cands, keywords({"memory"}), db);
  EXPECT_EQ(s[0].score, 3.0);
  EXPECT_EQ(s[1].score, 0.0);
  EXPECT_EQ(s[0].source, qr::Source::kCrowd);
}

TEST(ScoreCrowd, MatchesBruteForceSum) {
  const auto titles = synthetic::random_titles(29, 300, 25);
  const auto db = adj::build(titles, stops());
  const auto pairs = oracle::brute_force_pairs(oracle::title_words(titles, stops()), 2);
  const auto words = db.sorted_words();
  const auto k = keywords({words[2].c_str(), words[3].c_str()});
  const auto cands = qr::crowd_candidates(k, db, stops());
  for (const auto& s : qr::score_crowd_candidates(cands, k, db)) {
    std::uint64_t expected = 0;
    for (const auto& kw : k.keywords) {
      auto key = std::minmax(s.candidate.term, kw.normalized);
      if (auto it = pairs.find({key.first, key.second}); it != pairs.end()) expected += it->second;
    }
    EXPECT_EQ(s.score, static_cast<double>(expected)) << s.candidate.term;
  }
}

TEST(SelectAndCombine, PinnedTieRuleExample) {
  const auto r = qr::select_and_combine(
      {scored("a", qr::Source::kProject, 2), scored("b", qr::Source::kProject, 1)},
      {scored("c", qr::Source::kCrowd, 10), scored("a", qr::Source::kCrowd, 4)}, AcceptAllNounOracle(), 5);
  EXPECT_EQ(order(r), (std::vector<std::string>{"a", "c", "b"}));
  EXPECT_EQ(r[0].scored.source, qr::Source::kProject);
  EXPECT_EQ(r[0].normalized_score, 1.0);
  EXPECT_EQ(r[1].normalized_score, 1.0);
  EXPECT_EQ(r[2].normalized_score, 0.0);
}

TEST(SelectAndCombine, SingleSourceKeepsTopFive) {
  std::vector<qr::CandidateScore> so;
  for (int i = 0; i < 6; ++i) so.push_back(scored(std::string(1, static_cast<char>('m' + i)), qr::Source::kCrowd, i));
  const auto r = qr::select_and_combine({}, so, AcceptAllNounOracle(), 5);
  EXPECT_EQ(order(r), (std::vector<std::string>{"r", "q", "p", "o", "n"}));
}

TEST(SelectAndCombine, DedupAndSingletonNormalisation) {
  const auto r = qr::select_and_combine({scored("x", qr::Source::kProject, 0.3)},
                                        {scored("x", qr::Source::kCrowd, 7)}, AcceptAllNounOracle(), 5);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].normalized_score, 1.0);
  EXPECT_EQ(r[0].scored.source, qr::Source::kProject);
  EXPECT_TRUE(qr::select_and_combine({}, {}, AcceptAllNounOracle(), 5).empty());
}

TEST(SelectAndCombine, NominalFilterAfterTopK) {
  // "running" is cut by the noun oracle after the top-2 cut, so it does not
  // make room for the third-best term.
  const auto r = qr::select_and_combine(
      {scored("running", qr::Source::kProject, 3), scored("socket", qr::Source::kProject, 2),
       scored("buffer", qr::Source::kProject, 1)},
      {}, LexiconNounOracle(), 2);
  EXPECT_EQ(order(r), std::vector<std::string>{"socket"});
}

TEST(SelectAndCombine, ScoreTiesBrokenByTerm) {
  const auto r = qr::select_and_combine(
      {scored("zeta", qr::Source::kProject, 1), scored("alpha", qr::Source::kProject, 1),
       scored("mid", qr::Source::kProject, 1)},
      {}, AcceptAllNounOracle(), 2);
  EXPECT_EQ(order(r), (std::vector<std::string>{"alpha", "mid"}));
}

TEST(RenderQuery, DualRenderingAndDedup) {
  const std::vector<std::string> s = {"RestClientService", "content", "WebService", "Service", "web"};
  const auto seq = qr::render_query(s, "q");
  std::vector<std::string> out;
  for (const auto& t : seq.tokens) out.push_back(t.surface);
  EXPECT_EQ(out, (std::vector<std::string>{"Rest", "Client", "Service", "RestClientService", "content", "Web",
                                           "WebService"}));
}

TEST(Reformulate, WorkingExampleShape) {
  const WorkingExample ex;
  const qs::Retriever r(ex.corpus);
  const LexiconNounOracle oracle;
  const qr::Reformulator reformulator(r, ex.db, stops(), oracle);
  const qr::QueryRecord q{"ex", "RestClientService ignores content encoding", {}};

  const auto full = reformulator.reformulate(q, qr::Mode::kAll);
  EXPECT_EQ(full.reduced_keywords.size(), 5u);
  EXPECT_EQ(full.expansion_terms.size(), 5u);
  EXPECT_EQ(full.rendered_text().rfind("Rest Client Service RestClientService content ", 0), 0u)
      << full.rendered_text();

  const auto red = reformulator.reformulate(q, qr::Mode::kReductionOnly);
  EXPECT_TRUE(red.expansion_terms.empty());
  EXPECT_EQ(red.rendered_text(), "Rest Client Service RestClientService content");
}

TEST(Reformulate, NoRoomLeftMeansNoExpansion) {
  const WorkingExample ex;
  const qs::Retriever r(ex.corpus);
  const qr::Reformulator reformulator(r, ex.db, stops(), AcceptAllNounOracle());
  const qr::QueryRecord q{"long", "alpha bravo charlie delta echo foxtrot golf hotel india juliet kilo", {}};
  const auto out = reformulator.reformulate(q, qr::Mode::kAll);
  EXPECT_EQ(out.reduced_keywords.size(), 11u);
  EXPECT_TRUE(out.expansion_terms.empty());
}

TEST(Reformulate, RejectsZeroConfig) {
  const WorkingExample ex;
  const qs::Retriever r(ex.corpus);
  const AcceptAllNounOracle oracle;
  EXPECT_THROW(qr::Reformulator(r, ex.db, stops(), oracle, qr::ReformulatorConfig{5, 0, 10, 0.25}),
               quickar::InvalidArgument);
}

class ContractProperty : public ::testing::TestWithParam<std::uint32_t> {};

TEST_P(ContractProperty, BudgetDisjointNominalAndModeSources) {
  const auto seed = GetParam();
  const auto fx = synthetic::random_corpus(seed, 80, 70);
  const auto db = adj::build(synthetic::random_titles(seed + 100, 300, fx.vocab), stops());
  const qs::Retriever r(fx.corpus);
  const LexiconNounOracle oracle;
  const qr::Reformulator reformulator(r, db, stops(), oracle);
  std::mt19937 rng(seed);
  for (int n = 0; n < 25; ++n) {
    std::string title;
    const int len = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < len; ++i) {
      title += fx.vocab[rng() % fx.vocab.size()];
      title += rng() % 3 == 0 ? "Handler " : " ";
    }
    title += "is failing";
    const qr::QueryRecord q{"q" + std::to_string(n), title, {}};
    for (auto mode : {qr::Mode::kAll, qr::Mode::kProjectOnly, qr::Mode::kCrowdOnly, qr::Mode::kReductionOnly}) {
      const auto out = reformulator.reformulate(q, mode);
      EXPECT_LE(out.reduced_keywords.size() + out.expansion_terms.size(),
                std::max<std::size_t>(10, out.reduced_keywords.size()));
      for (const auto& e : out.expansion_terms) {
        EXPECT_FALSE(out.reduced_keywords.contains(e.term)) << e.term;
        EXPECT_FALSE(stops().contains(e.term)) << e.term;
        EXPECT_TRUE(oracle.is_nominal(e.term, e.from_identifier)) << e.term;
        if (mode == qr::Mode::kProjectOnly) EXPECT_EQ(e.source, qr::Source::kProject);
        if (mode == qr::Mode::kCrowdOnly) EXPECT_EQ(e.source, qr::Source::kCrowd);
      }
      if (mode == qr::Mode::kReductionOnly) EXPECT_TRUE(out.expansion_terms.empty());
      const auto again = reformulator.reformulate(q, mode);
      EXPECT_EQ(again.rendered_text(), out.rendered_text());
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, ContractProperty, ::testing::Values(1u, 2u, 3u, 4u));

TEST(ScoringProperty, ScalingAdjacencyCountsKeepsSelection) {
  const auto fx = synthetic::random_corpus(41, 60, 50);
  const auto db = adj::build(synthetic::random_titles(42, 250, fx.vocab), stops());
  for (std::uint64_t factor : {2u, 7u}) {
    adj::AdjacencyDatabase scaled(db.meta());
    for (const auto& [w, row] : db.entries()) {
      for (const auto& [n, c] : row) {
        if (w < n) scaled.add_pair(w, n, c * factor);
      }
    }
    const qs::Retriever r(fx.corpus);
    for (int i = 0; i < 10; ++i) {
      const auto k = keywords({fx.vocab[static_cast<std::size_t>(i)].c_str(),
                               fx.vocab[static_cast<std::size_t>(i + 10)].c_str()});
      const auto tp_ = qr::project_candidates(k, r, stops(), 5);
      const auto so = qr::crowd_candidates(k, db, stops());
      const auto base = qr::select_and_combine(qr::score_project_candidates(tp_, k, db),
                                               qr::score_crowd_candidates(so, k, db), AcceptAllNounOracle(), 5);
      const auto big = qr::select_and_combine(qr::score_project_candidates(tp_, k, scaled),
                                              qr::score_crowd_candidates(so, k, scaled), AcceptAllNounOracle(), 5);
      EXPECT_EQ(order(base), order(big));
    }
  }
}
