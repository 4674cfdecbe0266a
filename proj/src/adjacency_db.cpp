#include "quickar/adjacency_db.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <unordered_set>
#include <utility>

#include "quickar/error.hpp"
#include "quickar/parallel.hpp"

namespace quickar::adjacency {

namespace {

const NeighborMap kNoNeighbors;

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

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
  Int v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

std::optional<TitleRecord> parse_record(std::string_view line) {
  const auto fields = split(line, '\t');
  if (fields.size() != 3) return std::nullopt;
  auto id = parse_int<std::int64_t>(fields[0]);
  if (!id || fields[1].empty()) return std::nullopt;
  TitleRecord rec;
  rec.question_id = *id;
  rec.title = std::string(fields[1]);
  for (auto tag : split(fields[2], ';')) {
    auto t = textprep::to_lower(tag);
    t.erase(0, t.find_first_not_of(' '));
    t.erase(t.find_last_not_of(' ') + 1);
    if (!t.empty()) rec.tags.push_back(std::move(t));
  }
  return rec;
}

std::vector<std::string> title_terms(const TitleRecord& rec, const textprep::StopList& stops) {
  return textprep::preprocess(rec.title, stops, textprep::SplitMode::kSplitOnly).normalized_terms();
}

void count_title(AdjacencyDatabase& db, const std::vector<std::string>& terms, int window,
                 Counting counting) {
  const auto n = terms.size();
  const auto span = static_cast<std::size_t>(window);
  if (counting == Counting::kOccurrence) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n && j - i < span; ++j) {
        if (terms[i] != terms[j]) db.add_pair(terms[i], terms[j]);
      }
    }
    return;
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n && j - i < span; ++j) {
      if (terms[i] == terms[j]) continue;
      auto key = std::minmax(terms[i], terms[j]);
      if (seen.emplace(key.first, key.second).second) db.add_pair(terms[i], terms[j]);
    }
  }
}

}  // namespace

std::vector<TitleRecord> read_dump(std::istream& in, DumpStats* stats) {
  DumpStats local;
  std::vector<TitleRecord> out;
  std::unordered_set<std::int64_t> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++local.lines;
    auto rec = parse_record(line);
    if (!rec) {
      ++local.malformed;
      continue;
    }
    if (!ids.insert(rec->question_id).second) {
      ++local.duplicate_ids;
      continue;
    }
    out.push_back(std::move(*rec));
  }
  if (stats) *stats = local;
  return out;
}

std::vector<TitleRecord> read_dump(const std::filesystem::path& path, DumpStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open title dump");
  return read_dump(in, stats);
}

std::vector<TitleRecord> filter_titles(std::span<const TitleRecord> dump,
                                       std::string_view required_tag) {
  std::vector<TitleRecord> out;
  for (const auto& rec : dump) {
    if (std::find(rec.tags.begin(), rec.tags.end(), required_tag) != rec.tags.end()) {
      out.push_back(rec);
    }
  }
  return out;
}

AdjacencyVector AdjacencyDatabase::neighbors(std::string_view word) const {
  auto it = entries_.find(std::string(word));
  if (it == entries_.end()) return AdjacencyVector{word, kNoNeighbors};
  return AdjacencyVector{it->first, it->second};
}

std::uint64_t AdjacencyDatabase::cooccurrence_count(std::string_view a, std::string_view b) const {
  auto it = entries_.find(std::string(a));
  if (it == entries_.end()) return 0;
  auto jt = it->second.find(std::string(b));
  return jt == it->second.end() ? 0 : jt->second;
}

bool AdjacencyDatabase::contains(std::string_view word) const {
  return entries_.find(std::string(word)) != entries_.end();
}

void AdjacencyDatabase::add_pair(const std::string& a, const std::string& b, std::uint64_t count) {
  if (a == b || count == 0) return;
  entries_[a][b] += count;
  entries_[b][a] += count;
  total_pairs_ += count;
}

void AdjacencyDatabase::merge(const AdjacencyDatabase& other) {
  for (const auto& [word, row] : other.entries_) {
    auto& mine = entries_[word];
    for (const auto& [neighbor, count] : row) mine[neighbor] += count;
  }
  total_pairs_ += other.total_pairs_;
}

std::vector<std::string> AdjacencyDatabase::sorted_words() const {
  std::vector<std::string> words;
  words.reserve(entries_.size());
  for (const auto& [w, _] : entries_) words.push_back(w);
  std::sort(words.begin(), words.end());
  return words;
}

bool operator==(const AdjacencyDatabase& a, const AdjacencyDatabase& b) {
  return a.meta_ == b.meta_ && a.total_pairs_ == b.total_pairs_ && a.entries_ == b.entries_;
}

AdjacencyDatabase build(std::span<const TitleRecord> titles, const textprep::StopList& stops,
                        const BuildOptions& options) {
  if (options.window < 2) throw InvalidArgument("window must be at least 2");
  BuildMeta meta{options.window, stops.sha256(), options.source, options.counting};

  std::vector<AdjacencyDatabase> partials(std::max(1u, options.jobs));
  const auto used = parallel_chunks(titles.size(), options.jobs, [&](std::size_t c, std::size_t b,
                                                                      std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      count_title(partials[c], title_terms(titles[i], stops), options.window, options.counting);
    }
  });

  AdjacencyDatabase db(std::move(meta));
  for (std::size_t c = 0; c < used; ++c) db.merge(partials[c]);
  return db;
}

void save(const AdjacencyDatabase& db, std::ostream& out) {
  const auto& meta = db.meta();
  out << "#window=" << meta.window << '\n';
  out << "#stoplist_sha=" << meta.stoplist_sha << '\n';
  out << "#source=" << meta.source << '\n';
  if (meta.counting == Counting::kBinary) out << "#counting=binary\n";
  for (const auto& word : db.sorted_words()) {
    const auto& row = db.neighbors(word).weights;
    std::vector<std::pair<std::string_view, std::uint64_t>> sorted(row.begin(), row.end());
    std::sort(sorted.begin(), sorted.end());
    out << word << '\t';
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (i) out << ',';
      out << sorted[i].first << ':' << sorted[i].second;
    }
    out << '\n';
  }
  out << "#pairs=" << db.total_pair_count() << '\n';
}

void save(const AdjacencyDatabase& db, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot write adjacency database");
  save(db, out);
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

AdjacencyDatabase load(std::istream& in, const std::string& name) {
  BuildMeta meta;
  bool have_window = false;
  std::optional<std::uint64_t> trailer;
  std::unordered_map<std::string, NeighborMap> rows;
  std::uint64_t directed_sum = 0;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (trailer) throw CorruptionError(name, "content after #pairs trailer");
    const auto where = " (line " + std::to_string(lineno) + ")";
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw CorruptionError(name, "bad header" + where);
      const auto key = std::string_view(line).substr(1, eq - 1);
      const auto value = std::string_view(line).substr(eq + 1);
      if (key == "window") {
        auto w = parse_int<int>(value);
        if (!w || *w < 2) throw CorruptionError(name, "bad window" + where);
        meta.window = *w;
        have_window = true;
      } else if (key == "stoplist_sha") {
        meta.stoplist_sha = std::string(value);
      } else if (key == "source") {
        meta.source = std::string(value);
      } else if (key == "counting") {
        if (value != "binary") throw CorruptionError(name, "unknown counting mode" + where);
        meta.counting = Counting::kBinary;
      } else if (key == "pairs") {
        trailer = parse_int<std::uint64_t>(value);
        if (!trailer) throw CorruptionError(name, "bad #pairs trailer" + where);
      } else {
        throw CorruptionError(name, "unknown header key" + where);
      }
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw CorruptionError(name, "bad row" + where);
    auto& row = rows[line.substr(0, tab)];
    if (!row.empty()) throw CorruptionError(name, "duplicate row" + where);
    for (auto cell : split(std::string_view(line).substr(tab + 1), ',')) {
      const auto colon = cell.rfind(':');
      if (colon == std::string_view::npos || colon == 0) {
        throw CorruptionError(name, "bad neighbor entry" + where);
      }
      auto count = parse_int<std::uint64_t>(cell.substr(colon + 1));
      if (!count || *count == 0) throw CorruptionError(name, "bad count" + where);
      row[std::string(cell.substr(0, colon))] = *count;
      directed_sum += *count;
    }
  }
  if (!trailer) throw CorruptionError(name, "missing #pairs trailer (truncated?)");
  if (!have_window) throw CorruptionError(name, "missing #window header");
  if (directed_sum != 2 * *trailer) throw CorruptionError(name, "pair checksum mismatch");

  AdjacencyDatabase db(std::move(meta));
  for (const auto& [word, row] : rows) {
    for (const auto& [neighbor, count] : row) {
      auto other = rows.find(neighbor);
      if (neighbor == word || other == rows.end() || !other->second.count(word) ||
          other->second.at(word) != count) {
        throw CorruptionError(name, "asymmetric entry " + word + "/" + neighbor);
      }
      if (word < neighbor) db.add_pair(word, neighbor, count);
    }
  }
  return db;
}

AdjacencyDatabase load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open adjacency database");
  return load(in, path.string());
}

}  // namespace quickar::adjacency
