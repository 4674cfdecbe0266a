#include "quickar/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <optional>

#include "quickar/adjacency_db.hpp"
#include "quickar/code_corpus.hpp"
#include "quickar/error.hpp"
#include "quickar/eval_harness.hpp"
#include "quickar/noun_oracle.hpp"
#include "quickar/reformulator.hpp"
#include "quickar/rocchio.hpp"
#include "quickar/vsm_search.hpp"

namespace quickar::cli {

namespace {

namespace fs = std::filesystem;
using reformulation::Mode;

struct Config {
  std::string stoplist_path;
  std::string keywords_path;
  int window = 2;
  std::size_t top_docs = 5;
  std::size_t top_k = 5;
  std::size_t query_budget = 10;
  std::string mode = "all";
  unsigned jobs = 1;
};

struct BuildDbArgs {
  std::string dump;
  std::string tag = "java";
  std::string out;
  std::optional<std::size_t> limit;
  std::string source;
  bool binary = false;
};

struct IndexArgs {
  std::string src;
  std::string pre_split;
  std::string out;
  std::string source;
  bool strip_comments = false;
};

struct SearchArgs {
  std::string index;
  std::string query;
  std::optional<std::size_t> top;
  bool verbatim = false;
  bool drop_unknown = false;
};

struct ReformulateArgs {
  std::string index;
  std::string db;
  std::string query;
  std::string id = "query";
  std::string strategy = "quickar";
  bool json = false;
};

struct EvaluateArgs {
  std::string index;
  std::string db;
  std::string queries;
  std::string strategies = "all,p,so,red,rocchio,pre";
  bool strict = false;
  bool no_filter = false;
  std::string out;
};

textprep::StopList stop_list(const Config& c) {
  return c.stoplist_path.empty() ? textprep::StopList::standard()
                                 : textprep::StopList::load(c.stoplist_path);
}

textprep::StopList keyword_list(const Config& c) {
  return c.keywords_path.empty() ? corpus::java_keywords() : textprep::StopList::load(c.keywords_path);
}

Mode parse_mode(const std::string& m) {
  if (m == "all") return Mode::kAll;
  if (m == "p") return Mode::kProjectOnly;
  if (m == "so") return Mode::kCrowdOnly;
  if (m == "red") return Mode::kReductionOnly;
  throw InvalidArgument("unknown mode: " + m);
}

reformulation::ReformulatorConfig reformulator_config(const Config& c) {
  return {c.top_docs, c.top_k, c.query_budget, 0.25};
}

void warn_meta(std::ostream& err, const std::string& what, const std::string& file_sha,
               const textprep::StopList& stops) {
  if (!file_sha.empty() && file_sha != stops.sha256()) {
    err << "warning: " << what << " was built with a different stop list (" << file_sha.substr(0, 12)
        << " vs " << stops.sha256().substr(0, 12) << ")\n";
  }
}

int build_db(const Config& cfg, const BuildDbArgs& a, std::ostream& out, std::ostream& err) {
  const auto stops = stop_list(cfg);
  adjacency::DumpStats stats;
  auto records = adjacency::read_dump(fs::path(a.dump), &stats);
  auto titles = adjacency::filter_titles(records, textprep::to_lower(a.tag));
  if (a.limit && titles.size() > *a.limit) titles.resize(*a.limit);
  if (stats.malformed || stats.duplicate_ids) {
    err << fmt::format("warning: skipped {} malformed and {} duplicate-id records\n", stats.malformed,
                       stats.duplicate_ids);
  }
  adjacency::BuildOptions opts;
  opts.window = cfg.window;
  opts.counting = a.binary ? adjacency::Counting::kBinary : adjacency::Counting::kOccurrence;
  opts.source = a.source.empty() ? fs::path(a.dump).filename().string() : a.source;
  opts.jobs = cfg.jobs;
  const auto db = adjacency::build(titles, stops, opts);
  adjacency::save(db, fs::path(a.out));
  out << fmt::format("titles read: {}, kept with tag '{}': {}\n", records.size(), a.tag, titles.size());
  out << fmt::format("vocabulary: {}, pairs: {}\n", db.vocab_size(), db.total_pair_count());
  return kOk;
}

int index(const Config& cfg, const IndexArgs& a, std::ostream& out, std::ostream& err) {
  corpus::CorpusOptions opts;
  if (!a.src.empty()) opts.source_root = a.src;
  if (!a.pre_split.empty()) opts.pre_split_root = a.pre_split;
  if (!opts.source_root && !opts.pre_split_root) {
    throw InvalidArgument("index needs --src or --pre-split");
  }
  opts.strip_comments = a.strip_comments;
  opts.jobs = cfg.jobs;
  opts.source_label = !a.source.empty() ? a.source
                      : !a.src.empty()  ? fs::path(a.src).filename().string()
                                        : fs::path(a.pre_split).filename().string();
  corpus::CorpusStats stats;
  const auto c = corpus::build_corpus(opts, stop_list(cfg), keyword_list(cfg), &stats);
  if (stats.unreadable) err << fmt::format("warning: skipped {} unreadable files\n", stats.unreadable);
  if (stats.unbalanced) {
    err << fmt::format("warning: {} files had unbalanced braces and were indexed whole\n",
                       stats.unbalanced);
  }
  corpus::save(c, fs::path(a.out));
  out << fmt::format("files: {}, documents: {}, vocabulary: {}\n", stats.files, c.n_docs(),
                     c.doc_freqs().size());
  return kOk;
}

int search_cmd(const Config& cfg, const SearchArgs& a, std::ostream& out, std::ostream& err) {
  const auto stops = stop_list(cfg);
  const auto c = corpus::load(fs::path(a.index));
  warn_meta(err, "index", c.meta().stoplist_sha, stops);
  const search::Retriever retriever(c);
  const auto query = a.verbatim ? textprep::verbatim_terms(a.query)
                                : textprep::preprocess(a.query, stops,
                                                       textprep::SplitMode::kSplitAndKeepWhole);
  for (const auto& h : retriever.search(query, search::SearchOptions{a.top, a.drop_unknown})) {
    out << fmt::format("{}\t{}\t{:.6f}\n", h.rank, h.doc_id, h.score);
  }
  return kOk;
}

nlohmann::json to_json(const reformulation::Reformulation& r) {
  nlohmann::json j;
  j["query_id"] = r.query_id;
  j["strategy"] = reformulation::to_string(r.strategy);
  if (r.strategy == reformulation::Strategy::kQuickar) j["mode"] = reformulation::to_string(r.mode);
  auto& kws = j["reduced_keywords"] = nlohmann::json::array();
  for (const auto& k : r.reduced_keywords.keywords) kws.push_back(k.surface);
  auto& exps = j["expansion_terms"] = nlohmann::json::array();
  for (const auto& e : r.expansion_terms) {
    exps.push_back({{"term", e.surface},
                    {"source", reformulation::to_string(e.source)},
                    {"score", e.score},
                    {"normalized_score", e.normalized_score}});
  }
  j["rendered_query"] = r.rendered_text();
  return j;
}

void print_text(std::ostream& out, const reformulation::Reformulation& r) {
  const std::string label = r.strategy == reformulation::Strategy::kRocchio
                                ? std::string("rocchio")
                                : std::string(reformulation::to_string(r.mode));
  out << "[" << label << "] " << r.rendered_text() << '\n';
  for (const auto& e : r.expansion_terms) {
    out << fmt::format("  + {:<24} {:<8} {:.4f}\n", e.surface, reformulation::to_string(e.source),
                       e.score);
  }
}

int reformulate_cmd(const Config& cfg, const ReformulateArgs& a, std::ostream& out,
                    std::ostream& err) {
  const auto stops = stop_list(cfg);
  const auto c = corpus::load(fs::path(a.index));
  warn_meta(err, "index", c.meta().stoplist_sha, stops);
  const search::Retriever retriever(c);
  const reformulation::QueryRecord q{a.id, a.query, {}};

  std::vector<reformulation::Reformulation> results;
  if (a.strategy == "rocchio") {
    rocchio::RocchioConfig rc;
    rc.top_docs = cfg.top_docs;
    rc.query_budget = cfg.query_budget;
    results.push_back(rocchio::rocchio_expand(q, retriever, stops, rc));
  } else if (a.strategy == "quickar") {
    const auto db = adjacency::load(fs::path(a.db));
    warn_meta(err, "adjacency database", db.meta().stoplist_sha, stops);
    const LexiconNounOracle oracle;
    const reformulation::Reformulator reformulator(retriever, db, stops, oracle,
                                                   reformulator_config(cfg));
    const auto mode = parse_mode(cfg.mode);
    // Without relevance information both the reduced and the full query are
    // offered.
    if (mode != Mode::kReductionOnly) {
      results.push_back(reformulator.reformulate(q, Mode::kReductionOnly));
    }
    results.push_back(reformulator.reformulate(q, mode));
  } else {
    throw InvalidArgument("unknown strategy: " + a.strategy);
  }

  if (a.json) {
    nlohmann::json j;
    j["query"] = a.query;
    j["reformulations"] = nlohmann::json::array();
    for (const auto& r : results) j["reformulations"].push_back(to_json(r));
    out << j.dump(2) << '\n';
  } else {
    for (const auto& r : results) print_text(out, r);
  }
  return kOk;
}

int evaluate_cmd(const Config& cfg, const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<eval::Technique> techniques;
  for (const auto& tok : CLI::detail::split(a.strategies, ',')) {
    auto t = eval::parse_technique(CLI::detail::trim_copy(tok));
    if (!t) throw InvalidArgument("unknown strategy: " + tok);
    if (std::find(techniques.begin(), techniques.end(), *t) == techniques.end()) techniques.push_back(*t);
  }
  const auto stops = stop_list(cfg);
  const auto c = corpus::load(fs::path(a.index));
  const auto db = adjacency::load(fs::path(a.db));
  warn_meta(err, "index", c.meta().stoplist_sha, stops);
  warn_meta(err, "adjacency database", db.meta().stoplist_sha, stops);
  const auto queries = eval::read_queries(fs::path(a.queries));
  const search::Retriever retriever(c);
  const LexiconNounOracle oracle;

  rocchio::RocchioConfig rc;
  rc.top_docs = cfg.top_docs;
  rc.query_budget = cfg.query_budget;
  const eval::EvalContext ctx{retriever, db, stops, oracle, reformulator_config(cfg), rc};

  eval::EvalReport report;
  if (a.no_filter) {
    report = eval::run_evaluation(queries, ctx, techniques, cfg.jobs);
  } else {
    const auto filtered = eval::filter_dataset(queries, retriever);
    report = eval::run_evaluation(filtered.kept, ctx, techniques, cfg.jobs);
    report.already_good = filtered.already_good.size();
    report.not_retrieved = filtered.not_retrieved.size();
    if (!filtered.not_retrieved.empty()) {
      err << "note: baseline retrieved no gold document for: ";
      for (std::size_t i = 0; i < filtered.not_retrieved.size(); ++i) {
        err << (i ? ", " : "") << filtered.not_retrieved[i];
      }
      err << '\n';
    }
  }
  report.strict = a.strict;
  eval::emit_report(report, fs::path(a.out));
  out << eval::render_table(report);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Query reformulation for concept location using crowd-sourced word adjacency",
               "quickar"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "TOML-style defaults file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);

  Config cfg;
  app.add_option("--stoplist,--stoplist_path", cfg.stoplist_path, "Stop list file (one word per line)");
  app.add_option("--keywords,--keywords_path", cfg.keywords_path, "Language keyword list file");
  app.add_option("--window", cfg.window, "Adjacency window size")->check(CLI::Range(2, 1000));
  app.add_option("--top-docs,--top_docs", cfg.top_docs, "Documents mined for project candidates")
      ->check(CLI::PositiveNumber);
  app.add_option("--top-k,--top_k", cfg.top_k, "Candidates kept per source")->check(CLI::PositiveNumber);
  app.add_option("--query-budget,--query_budget", cfg.query_budget, "Maximum reformulated query terms")
      ->check(CLI::PositiveNumber);
  app.add_option("--mode", cfg.mode, "Reformulation mode")->check(CLI::IsMember({"all", "p", "so", "red"}));
  app.add_option("--jobs,-j", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);

  BuildDbArgs bd;
  auto* build_cmd = app.add_subcommand("build-db", "Build the word adjacency database from a title dump");
  build_cmd->add_option("--dump", bd.dump, "TSV dump: question_id, title, tags")->required();
  build_cmd->add_option("--tag", bd.tag, "Required tag");
  build_cmd->add_option("--out", bd.out, "Output database file")->required();
  build_cmd->add_option("--limit", bd.limit, "Use at most N tagged titles");
  build_cmd->add_option("--source", bd.source, "Source label stored in the header");
  build_cmd->add_flag("--binary", bd.binary, "Count each pair at most once per title");

  IndexArgs ix;
  auto* index_cmd = app.add_subcommand("index", "Index a source tree at method granularity");
  index_cmd->add_option("--src", ix.src, "Source tree to split into methods");
  index_cmd->add_option("--pre-split", ix.pre_split, "Directory with one document per file");
  index_cmd->add_option("--out", ix.out, "Output index file")->required();
  index_cmd->add_option("--source", ix.source, "Source label stored in the header");
  index_cmd->add_flag("--strip-comments", ix.strip_comments, "Drop comments before indexing");

  SearchArgs sa;
  auto* search_sub = app.add_subcommand("search", "Rank documents for a query");
  search_sub->add_option("--index", sa.index, "Index file")->required();
  search_sub->add_option("--query", sa.query, "Query text")->required();
  search_sub->add_option("--top", sa.top, "Number of hits");
  search_sub->add_flag("--verbatim", sa.verbatim, "Only lower-case the query; no stop words or camel splitting");
  search_sub->add_flag("--drop-unknown", sa.drop_unknown, "Ignore query terms absent from the index");

  ReformulateArgs ra;
  auto* reform_sub = app.add_subcommand("reformulate", "Suggest a reformulated query");
  reform_sub->add_option("--index", ra.index, "Index file")->required();
  reform_sub->add_option("--db", ra.db, "Adjacency database (quickar strategy)");
  reform_sub->add_option("--query", ra.query, "Initial query, e.g. a change-request title")->required();
  reform_sub->add_option("--id", ra.id, "Query id");
  reform_sub->add_option("--strategy", ra.strategy, "quickar or rocchio")
      ->check(CLI::IsMember({"quickar", "rocchio"}));
  reform_sub->add_flag("--json", ra.json, "JSON output");

  EvaluateArgs ea;
  auto* eval_sub = app.add_subcommand("evaluate", "Evaluate reformulation techniques on a query set");
  eval_sub->add_option("--index", ea.index, "Index file")->required();
  eval_sub->add_option("--db", ea.db, "Adjacency database")->required();
  eval_sub->add_option("--queries", ea.queries, "TSV: query_id, title, gold doc ids")->required();
  eval_sub->add_option("--strategies", ea.strategies, "Comma list of all,p,so,red,rocchio,pre");
  eval_sub->add_flag("--strict", ea.strict, "Leave excluded queries out of percentage denominators");
  eval_sub->add_flag("--no-filter", ea.no_filter, "Evaluate every query, not only baseline rank > 10");
  eval_sub->add_option("--out", ea.out, "Report directory")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  if (reform_sub->parsed() && ra.strategy == "quickar" && ra.db.empty()) {
    err << "reformulate: --db is required for the quickar strategy\n" << app.help();
    return kUsageError;
  }

  try {
    if (build_cmd->parsed()) return build_db(cfg, bd, out, err);
    if (index_cmd->parsed()) return index(cfg, ix, out, err);
    if (search_sub->parsed()) return search_cmd(cfg, sa, out, err);
    if (reform_sub->parsed()) return reformulate_cmd(cfg, ra, out, err);
    if (eval_sub->parsed()) return evaluate_cmd(cfg, ea, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace quickar::cli
