#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quickar/adjacency_db.hpp"
#include "quickar/noun_oracle.hpp"
#include "quickar/reformulator.hpp"
#include "quickar/rocchio.hpp"
#include "quickar/vsm_search.hpp"

namespace quickar::eval {

using reformulation::QueryRecord;
using search::Rank;

enum class Classification { kImproved, kWorsened, kPreserved, kExcluded };

std::string_view to_string(Classification c);

/// Both ranks retrieved: compare them. Otherwise the query is excluded.
Classification classify(Rank baseline, Rank reformulated);

struct EvalOutcome {
  std::string query_id;
  Rank baseline_rank;
  Rank reformulated_rank;
  Classification classification = Classification::kExcluded;
  /// Why a query was excluded, or which variant supplied the rank.
  std::string note;
  std::string reformulated_query;
};

struct RankSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Linear interpolation between closest ranks ("type 7"). `sorted` must be
/// non-empty and ascending.
double quantile(std::span<const double> sorted, double p);

/// Count, mean, quartiles and range; all zero for an empty sample.
RankSummary summarize(std::span<const std::size_t> ranks);

struct MwuResult {
  /// min(U_a, U_b).
  double u_statistic = 0.0;
  /// U of sample a: rank sum of a minus n_a (n_a + 1) / 2.
  double u_a = 0.0;
  double z = 0.0;
  /// Two-sided.
  double p_value = 1.0;
  /// mean(a) - mean(b); negative means sample a sits closer to the top.
  double mean_rank_difference = 0.0;
};

/// Two-sided Mann-Whitney U test by normal approximation with tie and
/// continuity correction. Throws InvalidArgument on an empty sample.
MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Reads `query_id<TAB>title<TAB>gold1;gold2;...`.
std::vector<QueryRecord> read_queries(std::istream& in, const std::string& name);
std::vector<QueryRecord> read_queries(const std::filesystem::path& path);

/// Rank of the first gold document for the verbatim title.
Rank baseline_rank(const QueryRecord& q, const search::Retriever& retriever);

struct DatasetFilter {
  std::vector<QueryRecord> kept;
  std::vector<std::string> already_good;   // baseline rank <= 10
  std::vector<std::string> not_retrieved;  // no gold document retrieved
};

/// Keeps queries whose verbatim baseline retrieves a gold document below
/// rank 10. Throws InvalidArgument naming every query with an empty gold set.
DatasetFilter filter_dataset(std::span<const QueryRecord> queries,
                             const search::Retriever& retriever, std::size_t min_rank = 10);

enum class Technique { kAll, kProjectOnly, kCrowdOnly, kReductionOnly, kRocchio, kPreprocessed };

/// Display name, e.g. "QUICKAR_ALL".
std::string_view display_name(Technique t);
/// CLI token: all, p, so, red, rocchio, pre.
std::string_view token(Technique t);
std::optional<Technique> parse_technique(std::string_view token);

struct EvalContext {
  const search::Retriever& retriever;
  const adjacency::AdjacencyDatabase& db;
  const textprep::StopList& stops;
  const NounOracle& oracle;
  reformulation::ReformulatorConfig config;
  rocchio::RocchioConfig rocchio;
};

struct BucketCounts {
  std::size_t improved = 0;
  std::size_t worsened = 0;
  std::size_t preserved = 0;
  std::size_t excluded = 0;

  std::size_t total() const noexcept { return improved + worsened + preserved + excluded; }
};

struct TechniqueResult {
  Technique technique = Technique::kAll;
  std::vector<EvalOutcome> outcomes;  // sorted by query_id
  BucketCounts counts;
  RankSummary improved;
  RankSummary worsened;
  RankSummary preserved;

  /// Reformulated ranks of every query that retrieved a gold document.
  std::vector<double> retrieved_ranks() const;
};

/// Runs one technique over the queries. For QUICKAR_ALL the reduction-only
/// query is tried first and kept when it already beats the baseline.
TechniqueResult evaluate(std::span<const QueryRecord> queries, const EvalContext& ctx,
                         Technique technique, unsigned jobs = 1);

struct Comparison {
  Technique a;
  Technique b;
  MwuResult test;
};

struct EvalReport {
  std::size_t input_queries = 0;
  std::size_t already_good = 0;
  std::size_t not_retrieved = 0;
  bool strict = false;
  std::vector<TechniqueResult> results;
  std::vector<Comparison> comparisons;
};

/// Evaluates every technique and compares QUICKAR_ALL (when present) against
/// each other reformulating technique.
EvalReport run_evaluation(std::span<const QueryRecord> queries, const EvalContext& ctx,
                          std::span<const Technique> techniques, unsigned jobs = 1);

/// Share of a bucket in percent. With `strict`, excluded queries leave the
/// denominator.
double bucket_percent(const BucketCounts& c, std::size_t bucket_count, bool strict);

std::string render_table(const EvalReport& report);
std::string render_tsv(const EvalReport& report);
std::string render_outcomes(const EvalReport& report);

/// Writes report.txt, report.tsv and outcomes.tsv into `dir`.
void emit_report(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace quickar::eval
