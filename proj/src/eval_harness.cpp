#include "quickar/eval_harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "quickar/error.hpp"
#include "quickar/parallel.hpp"

namespace quickar::eval {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \r") - b + 1);
}

// Fixed-point rendering that never prints "-0.00".
std::string fixed(double v, int decimals) {
  auto s = fmt::format("{:.{}f}", v, decimals);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string rank_text(const Rank& r) { return r ? std::to_string(*r) : "NOT_RETRIEVED"; }

Rank rank_for(const textprep::TermSequence& query, const QueryRecord& q,
              const search::Retriever& retriever) {
  const auto hits = retriever.search(query);
  return search::rank_of_first_relevant(hits, q.gold_docs);
}

EvalOutcome evaluate_one(const QueryRecord& q, const EvalContext& ctx, Technique technique,
                         const reformulation::Reformulator& reformulator) {
  using reformulation::Mode;
  EvalOutcome out;
  out.query_id = q.query_id;
  out.baseline_rank = baseline_rank(q, ctx.retriever);
  try {
    textprep::TermSequence query;
    switch (technique) {
      case Technique::kAll: {
        auto reduced = reformulator.reformulate(q, Mode::kReductionOnly);
        const auto red_rank = rank_for(reduced.rendered_query, q, ctx.retriever);
        if (classify(out.baseline_rank, red_rank) == Classification::kImproved) {
          out.reformulated_rank = red_rank;
          out.reformulated_query = reduced.rendered_text();
          out.note = "reduction-only";
          out.classification = Classification::kImproved;
          return out;
        }
        query = reformulator.reformulate(q, Mode::kAll).rendered_query;
        break;
      }
      case Technique::kProjectOnly:
        query = reformulator.reformulate(q, Mode::kProjectOnly).rendered_query;
        break;
      case Technique::kCrowdOnly:
        query = reformulator.reformulate(q, Mode::kCrowdOnly).rendered_query;
        break;
      case Technique::kReductionOnly:
        query = reformulator.reformulate(q, Mode::kReductionOnly).rendered_query;
        break;
      case Technique::kRocchio:
        query = rocchio::rocchio_expand(q, ctx.retriever, ctx.stops, ctx.rocchio).rendered_query;
        break;
      case Technique::kPreprocessed:
        query = textprep::preprocess(q.text, ctx.stops, textprep::SplitMode::kSplitAndKeepWhole,
                                     q.query_id);
        if (query.empty()) throw QueryEmptyError(q.query_id);
        break;
    }
    for (const auto& t : query.tokens) {
      if (!out.reformulated_query.empty()) out.reformulated_query += ' ';
      out.reformulated_query += t.surface;
    }
    out.reformulated_rank = rank_for(query, q, ctx.retriever);
  } catch (const QueryEmptyError&) {
    out.classification = Classification::kExcluded;
    out.note = "QUERY_EMPTY";
    return out;
  }
  out.classification = classify(out.baseline_rank, out.reformulated_rank);
  if (out.classification == Classification::kExcluded) {
    out.note = out.baseline_rank ? "reformulated not retrieved" : "baseline not retrieved";
  }
  return out;
}

RankSummary bucket_summary(const std::vector<EvalOutcome>& outcomes, Classification c) {
  std::vector<std::size_t> ranks;
  for (const auto& o : outcomes) {
    if (o.classification == c) ranks.push_back(*o.reformulated_rank);
  }
  return summarize(ranks);
}

const std::size_t& bucket_ref(const BucketCounts& c, Classification k) {
  switch (k) {
    case Classification::kImproved: return c.improved;
    case Classification::kWorsened: return c.worsened;
    case Classification::kPreserved: return c.preserved;
    case Classification::kExcluded: return c.excluded;
  }
  return c.excluded;
}

constexpr Classification kBuckets[] = {Classification::kImproved, Classification::kWorsened,
                                       Classification::kPreserved, Classification::kExcluded};

}  // namespace

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::kImproved: return "improved";
    case Classification::kWorsened: return "worsened";
    case Classification::kPreserved: return "preserved";
    case Classification::kExcluded: return "excluded";
  }
  return "?";
}

Classification classify(Rank baseline, Rank reformulated) {
  if (!baseline || !reformulated) return Classification::kExcluded;
  if (*reformulated < *baseline) return Classification::kImproved;
  if (*reformulated > *baseline) return Classification::kWorsened;
  return Classification::kPreserved;
}

double quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidArgument("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

RankSummary summarize(std::span<const std::size_t> ranks) {
  RankSummary s;
  if (ranks.empty()) return s;
  std::vector<double> v(ranks.begin(), ranks.end());
  std::sort(v.begin(), v.end());
  s.count = v.size();
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  s.q1 = quantile(v, 0.25);
  s.q2 = quantile(v, 0.5);
  s.q3 = quantile(v, 0.75);
  s.min = v.front();
  s.max = v.back();
  return s;
}

MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("Mann-Whitney U needs two non-empty samples");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;

  std::vector<std::pair<double, bool>> pooled;  // value, from a
  pooled.reserve(a.size() + b.size());
  for (double x : a) pooled.emplace_back(x, true);
  for (double x : b) pooled.emplace_back(x, false);
  std::sort(pooled.begin(), pooled.end());

  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
    const double t = static_cast<double>(j - i);
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].second) rank_sum_a += avg_rank;
    }
    tie_term += t * t * t - t;
    i = j;
  }

  MwuResult r;
  r.u_a = rank_sum_a - na * (na + 1.0) / 2.0;
  r.u_statistic = std::min(r.u_a, na * nb - r.u_a);
  r.mean_rank_difference = std::accumulate(a.begin(), a.end(), 0.0) / na -
                           std::accumulate(b.begin(), b.end(), 0.0) / nb;

  const double mu = na * nb / 2.0;
  const double variance = n > 1.0 ? na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0))) : 0.0;
  if (variance <= 0.0) {
    r.z = 0.0;
    r.p_value = 1.0;
    return r;
  }
  const double diff = std::max(0.0, std::abs(r.u_a - mu) - 0.5);
  r.z = std::copysign(diff / std::sqrt(variance), r.u_a - mu);
  r.p_value = std::min(1.0, std::erfc(std::abs(r.z) / std::sqrt(2.0)));
  return r;
}

std::vector<QueryRecord> read_queries(std::istream& in, const std::string& name) {
  std::vector<QueryRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3 || trim(fields[0]).empty() || trim(fields[1]).empty()) {
      throw InvalidArgument(fmt::format("{}:{}: expected query_id<TAB>title<TAB>gold_ids", name, lineno));
    }
    QueryRecord q;
    q.query_id = std::string(trim(fields[0]));
    q.text = std::string(fields[1]);
    for (auto g : split(fields[2], ';')) {
      g = trim(g);
      if (!g.empty()) q.gold_docs.emplace(g);
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<QueryRecord> read_queries(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open queries file");
  return read_queries(in, path.string());
}

Rank baseline_rank(const QueryRecord& q, const search::Retriever& retriever) {
  return rank_for(textprep::verbatim_terms(q.text, q.query_id), q, retriever);
}

DatasetFilter filter_dataset(std::span<const QueryRecord> queries,
                             const search::Retriever& retriever, std::size_t min_rank) {
  std::vector<std::string> missing;
  for (const auto& q : queries) {
    if (q.gold_docs.empty()) missing.push_back(q.query_id);
  }
  if (!missing.empty()) {
    throw InvalidArgument(fmt::format("queries without gold documents: {}", fmt::join(missing, ", ")));
  }
  DatasetFilter out;
  for (const auto& q : queries) {
    const auto rank = baseline_rank(q, retriever);
    if (!rank) {
      out.not_retrieved.push_back(q.query_id);
    } else if (*rank <= min_rank) {
      out.already_good.push_back(q.query_id);
    } else {
      out.kept.push_back(q);
    }
  }
  return out;
}

std::string_view display_name(Technique t) {
  switch (t) {
    case Technique::kAll: return "QUICKAR_ALL";
    case Technique::kProjectOnly: return "QUICKAR_P";
    case Technique::kCrowdOnly: return "QUICKAR_SO";
    case Technique::kReductionOnly: return "QUICKAR_red";
    case Technique::kRocchio: return "Rocchio";
    case Technique::kPreprocessed: return "Baseline_preprocessed";
  }
  return "?";
}

std::string_view token(Technique t) {
  switch (t) {
    case Technique::kAll: return "all";
    case Technique::kProjectOnly: return "p";
    case Technique::kCrowdOnly: return "so";
    case Technique::kReductionOnly: return "red";
    case Technique::kRocchio: return "rocchio";
    case Technique::kPreprocessed: return "pre";
  }
  return "?";
}

std::optional<Technique> parse_technique(std::string_view tok) {
  for (auto t : {Technique::kAll, Technique::kProjectOnly, Technique::kCrowdOnly,
                 Technique::kReductionOnly, Technique::kRocchio, Technique::kPreprocessed}) {
    if (token(t) == tok) return t;
  }
  return std::nullopt;
}

std::vector<double> TechniqueResult::retrieved_ranks() const {
  std::vector<double> out;
  for (const auto& o : outcomes) {
    if (o.reformulated_rank) out.push_back(static_cast<double>(*o.reformulated_rank));
  }
  return out;
}

TechniqueResult evaluate(std::span<const QueryRecord> queries, const EvalContext& ctx,
                         Technique technique, unsigned jobs) {
  const reformulation::Reformulator reformulator(ctx.retriever, ctx.db, ctx.stops, ctx.oracle,
                                                 ctx.config);
  TechniqueResult result;
  result.technique = technique;
  result.outcomes.resize(queries.size());
  parallel_chunks(queries.size(), jobs, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      result.outcomes[i] = evaluate_one(queries[i], ctx, technique, reformulator);
    }
  });
  std::stable_sort(result.outcomes.begin(), result.outcomes.end(),
                   [](const EvalOutcome& x, const EvalOutcome& y) { return x.query_id < y.query_id; });
  for (const auto& o : result.outcomes) {
    switch (o.classification) {
      case Classification::kImproved: ++result.counts.improved; break;
      case Classification::kWorsened: ++result.counts.worsened; break;
      case Classification::kPreserved: ++result.counts.preserved; break;
      case Classification::kExcluded: ++result.counts.excluded; break;
    }
  }
  result.improved = bucket_summary(result.outcomes, Classification::kImproved);
  result.worsened = bucket_summary(result.outcomes, Classification::kWorsened);
  result.preserved = bucket_summary(result.outcomes, Classification::kPreserved);
  return result;
}

EvalReport run_evaluation(std::span<const QueryRecord> queries, const EvalContext& ctx,
                          std::span<const Technique> techniques, unsigned jobs) {
  EvalReport report;
  report.input_queries = queries.size();
  for (auto t : techniques) report.results.push_back(evaluate(queries, ctx, t, jobs));

  const auto all = std::find_if(report.results.begin(), report.results.end(),
                                [](const TechniqueResult& r) { return r.technique == Technique::kAll; });
  if (all == report.results.end()) return report;
  const auto a = all->retrieved_ranks();
  for (const auto& other : report.results) {
    if (other.technique == Technique::kAll || other.technique == Technique::kPreprocessed) continue;
    const auto b = other.retrieved_ranks();
    if (a.empty() || b.empty()) continue;
    report.comparisons.push_back(Comparison{Technique::kAll, other.technique, mann_whitney_u(a, b)});
  }
  return report;
}

double bucket_percent(const BucketCounts& c, std::size_t bucket_count, bool strict) {
  const std::size_t denom = strict ? c.total() - c.excluded : c.total();
  return denom == 0 ? 0.0 : 100.0 * static_cast<double>(bucket_count) / static_cast<double>(denom);
}

std::string render_table(const EvalReport& report) {
  std::string out;
  auto line = [&](const std::string& s) {
    out += s;
    out += '\n';
  };
  line("Query reformulation evaluation");
  line(fmt::format("queries evaluated: {}", report.input_queries));
  if (report.already_good || report.not_retrieved) {
    line(fmt::format("dropped by dataset filter: {} with baseline rank <= 10, {} not retrieved",
                     report.already_good, report.not_retrieved));
  }
  line(fmt::format("percentage denominator: {}",
                   report.strict ? "retrieved queries only (strict)" : "all evaluated queries"));
  line("");

  auto cell = [&](const TechniqueResult& r, Classification k) {
    const auto n = bucket_ref(r.counts, k);
    if (report.strict && k == Classification::kExcluded) return fmt::format("{}", n);
    return fmt::format("{} ({}%)", n, fixed(bucket_percent(r.counts, n, report.strict), 2));
  };
  line(fmt::format("{:<22} {:>7}  {:<16} {:<16} {:<16} {:<16}", "Technique", "Queries", "Improved",
                   "Worsened", "Preserved", "Excluded"));
  for (const auto& r : report.results) {
    line(fmt::format("{:<22} {:>7}  {:<16} {:<16} {:<16} {:<16}", display_name(r.technique),
                     r.counts.total(), cell(r, Classification::kImproved),
                     cell(r, Classification::kWorsened), cell(r, Classification::kPreserved),
                     cell(r, Classification::kExcluded)));
  }
  line("");
  line("Rank of first relevant document after reformulation, per bucket");
  line(fmt::format("{:<22} {:<10} {:>6} {:>9} {:>8} {:>8} {:>8} {:>6} {:>6}", "Technique", "Bucket",
                   "Count", "Mean", "Q1", "Q2", "Q3", "Min", "Max"));
  for (const auto& r : report.results) {
    const std::pair<Classification, const RankSummary*> rows[] = {
        {Classification::kImproved, &r.improved},
        {Classification::kWorsened, &r.worsened},
        {Classification::kPreserved, &r.preserved}};
    for (const auto& [k, s] : rows) {
      line(fmt::format("{:<22} {:<10} {:>6} {:>9} {:>8} {:>8} {:>8} {:>6} {:>6}",
                       display_name(r.technique), to_string(k), s->count, fixed(s->mean, 2),
                       fixed(s->q1, 2), fixed(s->q2, 2), fixed(s->q3, 2), fixed(s->min, 0),
                       fixed(s->max, 0)));
    }
  }
  line("");
  line("Mann-Whitney U tests (two-sided; MRD = mean rank difference)");
  line(fmt::format("{:<40} {:>10} {:>10} {:>10}", "Technique pair", "U", "p-value", "MRD"));
  for (const auto& c : report.comparisons) {
    line(fmt::format("{:<40} {:>10} {:>10} {:>10}",
                     fmt::format("{} vs. {}", display_name(c.a), display_name(c.b)),
                     fixed(c.test.u_statistic, 1), fixed(c.test.p_value, 4),
                     fixed(c.test.mean_rank_difference, 2)));
  }
  return out;
}

std::string render_tsv(const EvalReport& report) {
  std::string out = "#quickar-report\t1\n";
  out += fmt::format("meta\tqueries\t{}\n", report.input_queries);
  out += fmt::format("meta\tfiltered_already_good\t{}\n", report.already_good);
  out += fmt::format("meta\tfiltered_not_retrieved\t{}\n", report.not_retrieved);
  out += fmt::format("meta\tstrict\t{}\n", report.strict ? 1 : 0);
  for (const auto& r : report.results) {
    for (auto k : kBuckets) {
      const auto n = bucket_ref(r.counts, k);
      const bool no_pct = report.strict && k == Classification::kExcluded;
      out += fmt::format("bucket\t{}\t{}\t{}\t{}\n", display_name(r.technique), to_string(k), n,
                         no_pct ? std::string("-") : fixed(bucket_percent(r.counts, n, report.strict), 2));
    }
  }
  for (const auto& r : report.results) {
    const std::pair<Classification, const RankSummary*> rows[] = {
        {Classification::kImproved, &r.improved},
        {Classification::kWorsened, &r.worsened},
        {Classification::kPreserved, &r.preserved}};
    for (const auto& [k, s] : rows) {
      out += fmt::format("summary\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", display_name(r.technique),
                         to_string(k), s->count, fixed(s->mean, 4), fixed(s->q1, 4), fixed(s->q2, 4),
                         fixed(s->q3, 4), fixed(s->min, 0), fixed(s->max, 0));
    }
  }
  for (const auto& c : report.comparisons) {
    out += fmt::format("mwu\t{}\t{}\t{}\t{}\t{}\t{}\n", display_name(c.a), display_name(c.b),
                       fixed(c.test.u_statistic, 4), fixed(c.test.z, 6), fixed(c.test.p_value, 6),
                       fixed(c.test.mean_rank_difference, 4));
  }
  return out;
}

std::string render_outcomes(const EvalReport& report) {
  std::string out = "technique\tquery_id\tbaseline_rank\treformulated_rank\tclassification\tnote\tquery\n";
  for (const auto& r : report.results) {
    for (const auto& o : r.outcomes) {
      out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\n", display_name(r.technique), o.query_id,
                         rank_text(o.baseline_rank), rank_text(o.reformulated_rank),
                         to_string(o.classification), o.note, o.reformulated_query);
    }
  }
  return out;
}

void emit_report(const EvalReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create report directory");
  const std::pair<const char*, std::string> files[] = {{"report.txt", render_table(report)},
                                                       {"report.tsv", render_tsv(report)},
                                                       {"outcomes.tsv", render_outcomes(report)}};
  for (const auto& [name, body] : files) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot write report");
    out << body;
    out.flush();
    if (!out) throw IoError(path.string(), "write failed");
  }
}

}  // namespace quickar::eval
