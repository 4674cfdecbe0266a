#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "quickar/code_corpus.hpp"
#include "quickar/error.hpp"
#include "support/temp_dir.hpp"

namespace cc = quickar::corpus;
namespace tp = quickar::textprep;
namespace fs = std::filesystem;

namespace {

struct ManifestRow {
  std::string path;
  std::size_t units = 0;
  std::vector<std::string> names;  // empty for a whole-file document
  bool unbalanced = false;
};

std::vector<ManifestRow> read_manifest() {
  std::ifstream in(fs::path(QUICKAR_FIXTURES) / "java_tree_manifest.tsv");
  std::vector<ManifestRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream f(line);
    ManifestRow r;
    std::string names, unb;
    std::getline(f, r.path, '\t');
    f >> r.units;
    f.ignore();
    std::getline(f, names, '\t');
    std::getline(f, unb);
    if (names != "-") {
      std::istringstream n(names);
      std::string x;
      while (std::getline(n, x, ',')) r.names.push_back(x);
    }
    r.unbalanced = unb == "1";
    rows.push_back(std::move(r));
  }
  return rows;
}

fs::path tree() { return fs::path(QUICKAR_FIXTURES) / "java_tree"; }

cc::Corpus small_corpus(const std::vector<std::pair<std::string, std::string>>& docs) {
  std::vector<cc::Document> out;
  for (const auto& [id, text] : docs) {
    out.push_back(cc::Document::make(id, tp::preprocess(text, tp::StopList::empty(),
                                                        tp::SplitMode::kSplitAndKeepWhole)));
  }
  return cc::Corpus(std::move(out), {});
}

}  // namespace

TEST(SplitMethods, TwoMethods) {
  const auto r = cc::split_methods("class A {\n  void foo(int a){ a++; }\n  int bar(){ return 1; }\n}\n");
  ASSERT_EQ(r.units.size(), 2u);
  EXPECT_FALSE(r.whole_file);
  EXPECT_EQ(r.units[0].name, "foo");
  EXPECT_EQ(r.units[1].name, "bar");
  EXPECT_EQ(r.units[0].text, "void foo(int a){ a++; }");
}

TEST(SplitMethods, InterfaceFallsBackToWholeFile) {
  const std::string src = "interface I {\n  void a();\n  int b(int x);\n}\n";
  const auto r = cc::split_methods(src);
  ASSERT_EQ(r.units.size(), 1u);
  EXPECT_TRUE(r.whole_file);
  EXPECT_FALSE(r.unbalanced);
  EXPECT_EQ(r.units[0].text, src);
}

TEST(SplitMethods, UnbalancedFallsBack) {
  for (const std::string src : {"class A { void f() { }", "class A { } }", "}"}) {
    const auto r = cc::split_methods(src);
    EXPECT_TRUE(r.whole_file) << src;
    EXPECT_TRUE(r.unbalanced) << src;
    EXPECT_EQ(r.units.size(), 1u);
  }
}

TEST(SplitMethods, SignatureAndLeadingCommentKept) {
  const auto r = cc::split_methods(
      "class A {\n  int x;\n  /** Parses. */\n  @Override\n  public int parse(String s) throws IOException {\n    return 0;\n  }\n}\n");
  ASSERT_EQ(r.units.size(), 1u);
  EXPECT_EQ(r.units[0].name, "parse");
  EXPECT_EQ(r.units[0].text.rfind("/** Parses. */", 0), 0u);
}

TEST(SplitMethods, FixtureTreeMatchesHandLabels) {
  const auto manifest = read_manifest();
  ASSERT_EQ(manifest.size(), 20u);
  for (const auto& row : manifest) {
    std::ifstream in(tree() / row.path, std::ios::binary);
    ASSERT_TRUE(in) << row.path;
    std::string text((std::istreambuf_iterator<char>(in)), {});
    const auto r = cc::split_methods(text);
    EXPECT_EQ(r.units.size(), row.units) << row.path;
    EXPECT_EQ(r.unbalanced, row.unbalanced) << row.path;
    if (row.names.empty()) {
      EXPECT_TRUE(r.whole_file) << row.path;
    } else {
      std::vector<std::string> names;
      for (const auto& u : r.units) names.push_back(u.name);
      EXPECT_EQ(names, row.names) << row.path;
    }
  }
}

TEST(StripComments, BlanksCommentsKeepsLiterals) {
  const std::string src = "int a; // tail\n/* block\n */ String s = \"// not a comment\";";
  const auto out = cc::strip_comments(src);
  EXPECT_EQ(out.size(), src.size());
  EXPECT_EQ(out.find("tail"), std::string::npos);
  EXPECT_EQ(out.find("block"), std::string::npos);
  EXPECT_NE(out.find("\"// not a comment\""), std::string::npos);
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 2);
}

TEST(DocumentTerms, RemovesKeywordsAndStopWords) {
  const auto seq = cc::document_terms("public static void getUserName(String the)", tp::StopList::standard(),
                                      cc::java_keywords(), "d");
  EXPECT_EQ(seq.normalized_terms(),
            (std::vector<std::string>{"get", "user", "name", "getusername", "string"}));
}

TEST(BuildCorpus, FixtureTreeCountsAndIds) {
  cc::CorpusOptions opts;
  opts.source_root = tree();
  cc::CorpusStats stats;
  const auto c = cc::build_corpus(opts, tp::StopList::standard(), cc::java_keywords(), &stats);
  std::size_t expected = 0;
  for (const auto& row : read_manifest()) expected += row.units;
  EXPECT_EQ(c.n_docs(), expected);
  EXPECT_EQ(stats.files, 20u);
  EXPECT_EQ(stats.unbalanced, 1u);
  EXPECT_EQ(stats.whole_file_fallbacks, 3u);
  EXPECT_EQ(c.documents().front().doc_id, "a/Anon.java#1:register");
  EXPECT_TRUE(c.find("a/Iface.java"));
  EXPECT_TRUE(c.find("d/util/helper.c#2:main"));
  EXPECT_TRUE(c.find("b/Enum.java#1:Enum"));
}

TEST(BuildCorpus, EveryFileContributesADocument) {
  cc::CorpusOptions opts;
  opts.source_root = tree();
  const auto c = cc::build_corpus(opts, tp::StopList::standard(), cc::java_keywords());
  for (const auto& row : read_manifest()) {
    const bool found = std::any_of(c.documents().begin(), c.documents().end(), [&](const cc::Document& d) {
      return d.doc_id == row.path || d.doc_id.rfind(row.path + "#", 0) == 0;
    });
    EXPECT_TRUE(found) << row.path;
  }
}

TEST(BuildCorpus, DocFreqConsistentWithDocuments) {
  cc::CorpusOptions opts;
  opts.source_root = tree();
  const auto c = cc::build_corpus(opts, tp::StopList::standard(), cc::java_keywords());
  std::map<std::string, std::uint32_t> df;
  for (const auto& d : c.documents()) {
    std::set<std::string> seen;
    std::map<std::string, std::uint32_t> counts;
    for (const auto& t : d.terms.tokens) {
      seen.insert(t.normalized);
      ++counts[t.normalized];
    }
    for (const auto& w : seen) ++df[w];
    EXPECT_EQ(counts.size(), d.term_counts.size()) << d.doc_id;
    for (const auto& [w, n] : counts) EXPECT_EQ(d.term_counts.at(w), n);
  }
  EXPECT_EQ(df.size(), c.doc_freqs().size());
  for (const auto& [w, n] : df) {
    EXPECT_EQ(c.doc_freq(w), n) << w;
    EXPECT_LE(n, c.n_docs());
    EXPECT_EQ(c.postings(w).size(), n);
  }
}

TEST(BuildCorpus, RebuildIsByteIdenticalAcrossJobCounts) {
  cc::CorpusOptions opts;
  opts.source_root = tree();
  const auto a = cc::build_corpus(opts, tp::StopList::standard(), cc::java_keywords());
  opts.jobs = 6;
  const auto b = cc::build_corpus(opts, tp::StopList::standard(), cc::java_keywords());
  std::ostringstream sa, sb;
  cc::save(a, sa);
  cc::save(b, sb);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_TRUE(a == b);
}

TEST(BuildCorpus, EmptyDirectoryGivesEmptyCorpus) {
  test_support::TempDir dir;
  cc::CorpusOptions opts;
  opts.source_root = dir.path();
  const auto c = cc::build_corpus(opts, tp::StopList::standard(), cc::java_keywords());
  EXPECT_EQ(c.n_docs(), 0u);
  EXPECT_THROW(cc::document_frequency_ratio(c, "x"), quickar::InvalidArgument);
}

TEST(BuildCorpus, MissingRootIsIoError) {
  cc::CorpusOptions opts;
  opts.source_root = "/nonexistent/tree";
  EXPECT_THROW(cc::build_corpus(opts, tp::StopList::standard(), cc::java_keywords()), quickar::IoError);
}

TEST(BuildCorpus, PreSplitDocumentsAreNotSplit) {
  test_support::TempDir dir;
  test_support::write_file(dir.path() / "m1.txt", "void a() { } void b() { }");
  test_support::write_file(dir.path() / "sub/m2.txt", "parseConfig reads settings");
  cc::CorpusOptions opts;
  opts.pre_split_root = dir.path();
  const auto c = cc::build_corpus(opts, tp::StopList::standard(), cc::java_keywords());
  ASSERT_EQ(c.n_docs(), 2u);
  EXPECT_EQ(c.document(0).doc_id, "m1.txt");
  EXPECT_EQ(c.document(1).doc_id, "sub/m2.txt");
  EXPECT_EQ(c.document(1).terms.normalized_terms(),
            (std::vector<std::string>{"parse", "config", "parseconfig", "reads", "settings"}));
}

TEST(BuildCorpus, StripCommentsOption) {
  test_support::TempDir dir;
  test_support::write_file(dir.path() / "A.java", "class A {\n  // zebra\n  void run() { go(); }\n}\n");
  cc::CorpusOptions opts;
  opts.source_root = dir.path();
  auto with = cc::build_corpus(opts, tp::StopList::standard(), cc::java_keywords());
  EXPECT_EQ(with.doc_freq("zebra"), 1u);
  opts.strip_comments = true;
  auto without = cc::build_corpus(opts, tp::StopList::standard(), cc::java_keywords());
  EXPECT_EQ(without.doc_freq("zebra"), 0u);
}

TEST(DocumentFrequencyRatio, Fixtures) {
  std::vector<std::pair<std::string, std::string>> docs;
  for (int i = 0; i < 20; ++i) {
    std::string text = "common";
    if (i < 5) text += " planted";
    if (i < 6) text += " frequent";
    if (i < 4) text += " rare";
    docs.emplace_back("d" + std::to_string(i), text);
  }
  const auto c = small_corpus(docs);
  EXPECT_DOUBLE_EQ(cc::document_frequency_ratio(c, "common"), 1.0);
  EXPECT_DOUBLE_EQ(cc::document_frequency_ratio(c, "planted"), 0.25);
  EXPECT_DOUBLE_EQ(cc::document_frequency_ratio(c, "frequent"), 0.3);
  EXPECT_DOUBLE_EQ(cc::document_frequency_ratio(c, "rare"), 0.2);
  EXPECT_DOUBLE_EQ(cc::document_frequency_ratio(c, "unknown"), 0.0);
}

TEST(Corpus, DuplicateIdsRejected) {
  EXPECT_THROW(small_corpus({{"x", "a"}, {"x", "b"}}), quickar::InvalidArgument);
}

TEST(CorpusFile, RoundTripAndLayout) {
  auto c = cc::Corpus({cc::Document::make("A.java#1:getName",
                                          tp::preprocess("getName name", tp::StopList::empty(),
                                                         tp::SplitMode::kSplitAndKeepWhole))},
                      cc::CorpusMeta{"s1", "k1", "src"});
  std::stringstream buf;
  cc::save(c, buf);
  EXPECT_EQ(buf.str(),
            "#format=quickar-corpus-1\n#stoplist_sha=s1\n#keywords_sha=k1\n#source=src\n"
            "A.java#1:getName\t+get +Name getName name\n#docs=1\n#tokens=4\n");
  const auto back = cc::load(buf, "buf");
  EXPECT_TRUE(back == c);
  EXPECT_EQ(back.document(0).terms.tokens[0].origin, tp::TokenOrigin::kCamelPart);
}

TEST(CorpusFile, TruncationDetected) {
  cc::CorpusOptions opts;
  opts.source_root = tree();
  const auto c = cc::build_corpus(opts, tp::StopList::standard(), cc::java_keywords());
  std::ostringstream out;
  cc::save(c, out);
  const auto text = out.str();
  std::istringstream cut(text.substr(0, text.size() / 2));
  EXPECT_THROW(cc::load(cut, "cut"), quickar::CorruptionError);
  std::istringstream no_tokens(text.substr(0, text.rfind("#tokens=")));
  EXPECT_THROW(cc::load(no_tokens, "no_tokens"), quickar::CorruptionError);
}
