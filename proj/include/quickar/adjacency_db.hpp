#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "quickar/textprep.hpp"

namespace quickar::adjacency {

struct TitleRecord {
  std::int64_t question_id = 0;
  std::string title;
  std::vector<std::string> tags;
};

/// Counts of dump lines that were rejected while reading.
struct DumpStats {
  std::size_t lines = 0;
  std::size_t malformed = 0;
  std::size_t duplicate_ids = 0;
};

/// Reads the `question_id<TAB>title<TAB>tag1;tag2` dump format. Malformed
/// lines and repeated ids are skipped and counted, never fatal.
std::vector<TitleRecord> read_dump(std::istream& in, DumpStats* stats = nullptr);
std::vector<TitleRecord> read_dump(const std::filesystem::path& path, DumpStats* stats = nullptr);

/// Keeps the records whose tag list contains `required_tag`.
std::vector<TitleRecord> filter_titles(std::span<const TitleRecord> dump,
                                       std::string_view required_tag);

/// How co-occurrences within one title are tallied.
enum class Counting {
  kOccurrence,  // every windowed pair occurrence adds one
  kBinary,      // a pair adds at most one per title
};

struct BuildMeta {
  int window = 2;
  std::string stoplist_sha;
  std::string source;
  Counting counting = Counting::kOccurrence;

  friend bool operator==(const BuildMeta&, const BuildMeta&) = default;
};

using NeighborMap = std::unordered_map<std::string, std::uint64_t>;

/// Weighted neighbor row of one word. Refers into the database it came from.
struct AdjacencyVector {
  std::string_view owner;
  const NeighborMap& weights;

  bool empty() const noexcept { return weights.empty(); }
};

/// Symmetric word -> neighbor -> count table mined from question titles.
class AdjacencyDatabase {
 public:
  AdjacencyDatabase() = default;
  explicit AdjacencyDatabase(BuildMeta meta) : meta_(std::move(meta)) {}

  const BuildMeta& meta() const noexcept { return meta_; }
  BuildMeta& meta() noexcept { return meta_; }

  std::size_t vocab_size() const noexcept { return entries_.size(); }
  /// Sum of counts over unordered pairs.
  std::uint64_t total_pair_count() const noexcept { return total_pairs_; }

  AdjacencyVector neighbors(std::string_view word) const;
  std::uint64_t cooccurrence_count(std::string_view a, std::string_view b) const;
  bool contains(std::string_view word) const;

  /// Adds `count` to the unordered pair {a, b}. Self pairs are ignored.
  void add_pair(const std::string& a, const std::string& b, std::uint64_t count = 1);
  /// Folds another partial build into this one. Order of merges does not
  /// affect the result.
  void merge(const AdjacencyDatabase& other);

  /// Words in ascending order.
  std::vector<std::string> sorted_words() const;
  const std::unordered_map<std::string, NeighborMap>& entries() const noexcept { return entries_; }

  friend bool operator==(const AdjacencyDatabase& a, const AdjacencyDatabase& b);

 private:
  BuildMeta meta_;
  std::unordered_map<std::string, NeighborMap> entries_;
  std::uint64_t total_pairs_ = 0;
};

struct BuildOptions {
  int window = 2;
  Counting counting = Counting::kOccurrence;
  std::string source;
  unsigned jobs = 1;
};

/// Preprocesses each title (split only, stop words removed) and counts every
/// pair of distinct words whose positions differ by less than the window.
AdjacencyDatabase build(std::span<const TitleRecord> titles, const textprep::StopList& stops,
                        const BuildOptions& options = {});

/// Text format:
///   #window=2
///   #stoplist_sha=<hex>
///   #source=<id>
///   word<TAB>neighbor:count,neighbor:count
///   ...
///   #pairs=<total_pair_count>
/// Body lines are sorted by word, neighbors by name. Binary-counted databases
/// carry an extra `#counting=binary` header line.
void save(const AdjacencyDatabase& db, std::ostream& out);
void save(const AdjacencyDatabase& db, const std::filesystem::path& path);
AdjacencyDatabase load(std::istream& in, const std::string& name);
AdjacencyDatabase load(const std::filesystem::path& path);

}  // namespace quickar::adjacency
