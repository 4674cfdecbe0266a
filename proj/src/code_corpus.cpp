#include "quickar/code_corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <regex>
#include <sstream>

#include "quickar/bundled_data.hpp"
#include "quickar/error.hpp"
#include "quickar/parallel.hpp"

namespace quickar::corpus {

namespace fs = std::filesystem;

namespace {

enum class CharClass : std::uint8_t { kCode, kComment, kLiteral };

// Classifies every byte of a C-family source as code, comment or literal.
std::vector<CharClass> classify(std::string_view s) {
  std::vector<CharClass> cls(s.size(), CharClass::kCode);
  std::size_t i = 0;
  const auto n = s.size();
  auto mark = [&](std::size_t from, std::size_t to, CharClass c) {
    for (std::size_t k = from; k < to && k < n; ++k) cls[k] = c;
  };
  while (i < n) {
    const char c = s[i];
    if (c == '/' && i + 1 < n && s[i + 1] == '/') {
      auto end = s.find('\n', i);
      if (end == std::string_view::npos) end = n;
      mark(i, end, CharClass::kComment);
      i = end;
    } else if (c == '/' && i + 1 < n && s[i + 1] == '*') {
      auto end = s.find("*/", i + 2);
      end = end == std::string_view::npos ? n : end + 2;
      mark(i, end, CharClass::kComment);
      i = end;
    } else if (c == '"' && s.substr(i, 3) == "\"\"\"") {
      auto end = s.find("\"\"\"", i + 3);
      end = end == std::string_view::npos ? n : end + 3;
      mark(i, end, CharClass::kLiteral);
      i = end;
    } else if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < n && s[j] != c && s[j] != '\n') j += (s[j] == '\\') ? 2 : 1;
      j = std::min(n, j + 1);
      mark(i, j, CharClass::kLiteral);
      i = j;
    } else {
      ++i;
    }
  }
  return cls;
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

const std::vector<std::string>& control_words() {
  static const std::vector<std::string> kWords = {
      "if",     "for",  "while", "switch", "catch",  "synchronized", "return", "new",
      "else",   "do",   "try",   "throw",  "assert", "sizeof",       "case",   "foreach",
      "using",  "lock", "fixed", "when",   "elseif", "with"};
  return kWords;
}

bool is_type_header(const std::string& code) {
  static const std::regex kTypeKeyword(
      R"((^|[^\w$.])(class|interface|enum|struct|union|namespace)(\s|$))");
  static const std::regex kRecord(R"((^|[^\w$.])record\s+[A-Za-z_$][\w$]*\s*[<(])");
  static const std::regex kAnonymous(R"((^|[^\w$])new\s+[\w$.<>,\s\[\]]+\([^;]*\)\s*$)");
  // Parenthesised content never carries a type keyword at header level.
  std::string flat;
  int depth = 0;
  for (char c : code) {
    if (c == '(') ++depth;
    if (depth == 0) flat.push_back(c);
    if (c == ')' && depth > 0) --depth;
  }
  return std::regex_search(flat, kTypeKeyword) || std::regex_search(code, kRecord) ||
         std::regex_search(code, kAnonymous);
}

// Returns the method name when `code` (comment and literal free) looks like
// a method signature ending right before a `{`.
std::optional<std::string> method_name(const std::string& code) {
  static const std::regex kTail(
      R"(^\s*(throws\s+[\w$.<>,\s]+|(\s*(const|noexcept|override|final|volatile|&|&&))*)\s*$)");
  const auto close = code.rfind(')');
  if (close == std::string::npos) return std::nullopt;
  if (!std::regex_match(code.substr(close + 1), kTail)) return std::nullopt;

  int depth = 0;
  std::size_t open = std::string::npos;
  for (std::size_t i = close + 1; i-- > 0;) {
    if (code[i] == ')') ++depth;
    if (code[i] == '(' && --depth == 0) {
      open = i;
      break;
    }
  }
  if (open == std::string::npos) return std::nullopt;

  std::size_t end = open;
  while (end > 0 && std::isspace(static_cast<unsigned char>(code[end - 1]))) --end;
  std::size_t begin = end;
  while (begin > 0 && is_ident_char(code[begin - 1])) --begin;
  if (begin > 0 && code[begin - 1] == '~') --begin;
  if (begin == end) return std::nullopt;
  std::string name = code.substr(begin, end - begin);
  if (std::isdigit(static_cast<unsigned char>(name[0]))) return std::nullopt;
  const auto& ctl = control_words();
  if (std::find(ctl.begin(), ctl.end(), name) != ctl.end()) return std::nullopt;

  const auto prefix = code.substr(0, begin);
  int pdepth = 0;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    const char c = prefix[i];
    if (c == '(') ++pdepth;
    if (c == ')') --pdepth;
    if (pdepth == 0 && c == '=') return std::nullopt;
    if (pdepth == 0 && c == '-' && i + 1 < prefix.size() && prefix[i + 1] == '>') return std::nullopt;
  }
  auto last = prefix.find_last_not_of(" \t\r\n");
  if (last != std::string::npos && prefix[last] == '.') return std::nullopt;
  static const std::regex kNewBefore(R"((^|[^\w$])new\s*$)");
  if (std::regex_search(prefix, kNewBefore)) return std::nullopt;
  return name;
}

enum class Scope { kType, kMethod, kBlock };

struct OpenScope {
  Scope kind;
  std::size_t unit_start = 0;
  std::string name;
};

bool all_types(const std::vector<OpenScope>& stack) {
  return std::all_of(stack.begin(), stack.end(),
                     [](const OpenScope& s) { return s.kind == Scope::kType; });
}

std::string code_only(std::string_view s, const std::vector<CharClass>& cls, std::size_t from,
                      std::size_t to) {
  std::string out(s.substr(from, to - from));
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (cls[from + k] != CharClass::kCode && out[k] != '\n') out[k] = ' ';
  }
  return out;
}

SplitResult whole_file(std::string_view source, bool unbalanced) {
  SplitResult r;
  r.units.push_back(MethodUnit{"", std::string(source)});
  r.whole_file = true;
  r.unbalanced = unbalanced;
  return r;
}

bool is_source_file(const fs::path& p, const std::vector<std::string>& exts) {
  const auto ext = p.extension().string();
  return std::find(exts.begin(), exts.end(), ext) != exts.end();
}

std::vector<fs::path> list_files(const fs::path& root, const std::vector<std::string>* exts) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec),
       end;
       it != end; it.increment(ec)) {
    if (ec) break;
    if (!it->is_regular_file(ec)) continue;
    if (exts && !is_source_file(it->path(), *exts)) continue;
    files.push_back(it->path());
  }
  std::sort(files.begin(), files.end(), [&](const fs::path& a, const fs::path& b) {
    return a.lexically_relative(root).generic_string() < b.lexically_relative(root).generic_string();
  });
  return files;
}

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buf.str();
}

void check_doc_id(const std::string& id) {
  if (id.empty() || id[0] == '#' || id.find_first_of("\t\n\r") != std::string::npos) {
    throw InvalidArgument("document id is empty, starts with '#' or contains a tab/newline: " + id);
  }
}

struct FileJob {
  fs::path path;
  std::string rel;
  bool split = true;
};

struct FileOutput {
  std::vector<Document> docs;
  bool unreadable = false;
  bool whole_file = false;
  bool unbalanced = false;
};

}  // namespace

SplitResult split_methods(std::string_view source) {
  const auto cls = classify(source);
  SplitResult result;
  std::vector<OpenScope> stack;
  std::size_t header_start = 0;

  for (std::size_t i = 0; i < source.size(); ++i) {
    if (cls[i] != CharClass::kCode) continue;
    const char c = source[i];
    if (c == ';') {
      header_start = i + 1;
    } else if (c == '{') {
      OpenScope scope;
      scope.kind = Scope::kBlock;
      if (all_types(stack)) {
        const auto header = code_only(source, cls, header_start, i);
        if (is_type_header(header)) {
          scope.kind = Scope::kType;
        } else if (auto name = method_name(header)) {
          scope.kind = Scope::kMethod;
          scope.name = std::move(*name);
          auto start = header_start;
          while (start < i && std::isspace(static_cast<unsigned char>(source[start]))) ++start;
          scope.unit_start = start;
        }
      }
      stack.push_back(std::move(scope));
      header_start = i + 1;
    } else if (c == '}') {
      if (stack.empty()) return whole_file(source, true);
      auto top = std::move(stack.back());
      stack.pop_back();
      if (top.kind == Scope::kMethod) {
        result.units.push_back(MethodUnit{
            std::move(top.name), std::string(source.substr(top.unit_start, i + 1 - top.unit_start))});
      }
      header_start = i + 1;
    }
  }
  if (!stack.empty()) return whole_file(source, true);
  if (result.units.empty()) return whole_file(source, false);
  return result;
}

std::string strip_comments(std::string_view source) {
  const auto cls = classify(source);
  std::string out(source);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (cls[i] == CharClass::kComment && out[i] != '\n') out[i] = ' ';
  }
  return out;
}

Document Document::make(std::string doc_id, textprep::TermSequence terms) {
  Document d;
  d.doc_id = std::move(doc_id);
  terms.source_id = d.doc_id;
  for (const auto& t : terms.tokens) ++d.term_counts[t.normalized];
  d.terms = std::move(terms);
  return d;
}

Corpus::Corpus(std::vector<Document> documents, CorpusMeta meta)
    : documents_(std::move(documents)), meta_(std::move(meta)) {
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const auto& doc = documents_[i];
    if (!by_id_.emplace(doc.doc_id, i).second) {
      throw InvalidArgument("duplicate document id: " + doc.doc_id);
    }
    for (const auto& [term, count] : doc.term_counts) {
      ++doc_freq_[term];
      postings_[term].push_back(Posting{static_cast<std::uint32_t>(i), count});
    }
  }
}

std::uint32_t Corpus::doc_freq(std::string_view word) const {
  auto it = doc_freq_.find(std::string(word));
  return it == doc_freq_.end() ? 0 : it->second;
}

const std::vector<Posting>& Corpus::postings(std::string_view word) const {
  static const std::vector<Posting> kEmpty;
  auto it = postings_.find(std::string(word));
  return it == postings_.end() ? kEmpty : it->second;
}

std::optional<std::size_t> Corpus::find(std::string_view doc_id) const {
  auto it = by_id_.find(std::string(doc_id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

bool operator==(const Corpus& a, const Corpus& b) {
  if (!(a.meta_ == b.meta_) || a.documents_.size() != b.documents_.size()) return false;
  for (std::size_t i = 0; i < a.documents_.size(); ++i) {
    const auto& x = a.documents_[i];
    const auto& y = b.documents_[i];
    if (x.doc_id != y.doc_id || !(x.terms == y.terms) || x.term_counts != y.term_counts) return false;
  }
  return true;
}

const textprep::StopList& java_keywords() {
  static const auto kKeywords =
      textprep::StopList::parse(bundled::java_keywords(), "<bundled:java_keywords.txt>");
  return kKeywords;
}

textprep::TermSequence document_terms(std::string_view text, const textprep::StopList& stops,
                                      const textprep::StopList& keywords, std::string doc_id) {
  auto seq = textprep::preprocess(text, stops, textprep::SplitMode::kSplitAndKeepWhole,
                                  std::move(doc_id));
  std::erase_if(seq.tokens, [&](const textprep::Token& t) { return keywords.contains(t.normalized); });
  return seq;
}

Corpus build_corpus(const CorpusOptions& options, const textprep::StopList& stops,
                    const textprep::StopList& keywords, CorpusStats* stats) {
  std::vector<FileJob> jobs;
  if (options.source_root) {
    if (!fs::is_directory(*options.source_root)) {
      throw IoError(options.source_root->string(), "source root is not a directory");
    }
    for (auto& p : list_files(*options.source_root, &options.extensions)) {
      auto rel = p.lexically_relative(*options.source_root).generic_string();
      jobs.push_back(FileJob{std::move(p), std::move(rel), true});
    }
  }
  if (options.pre_split_root) {
    if (!fs::is_directory(*options.pre_split_root)) {
      throw IoError(options.pre_split_root->string(), "pre-split root is not a directory");
    }
    for (auto& p : list_files(*options.pre_split_root, nullptr)) {
      auto rel = p.lexically_relative(*options.pre_split_root).generic_string();
      jobs.push_back(FileJob{std::move(p), std::move(rel), false});
    }
  }

  std::vector<FileOutput> outputs(jobs.size());
  parallel_chunks(jobs.size(), options.jobs, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto& job = jobs[i];
      auto& out = outputs[i];
      auto text = read_file(job.path);
      if (!text) {
        out.unreadable = true;
        continue;
      }
      if (options.strip_comments) *text = strip_comments(*text);
      if (!job.split) {
        check_doc_id(job.rel);
        out.docs.push_back(Document::make(job.rel, document_terms(*text, stops, keywords, job.rel)));
        continue;
      }
      auto split = split_methods(*text);
      out.whole_file = split.whole_file;
      out.unbalanced = split.unbalanced;
      for (std::size_t k = 0; k < split.units.size(); ++k) {
        const auto& unit = split.units[k];
        auto id = split.whole_file ? job.rel
                                   : job.rel + "#" + std::to_string(k + 1) + ":" + unit.name;
        check_doc_id(id);
        auto terms = document_terms(unit.text, stops, keywords, id);
        out.docs.push_back(Document::make(std::move(id), std::move(terms)));
      }
    }
  });

  CorpusStats local;
  std::vector<Document> docs;
  for (auto& out : outputs) {
    ++local.files;
    local.unreadable += out.unreadable;
    local.whole_file_fallbacks += out.whole_file;
    local.unbalanced += out.unbalanced;
    for (auto& d : out.docs) docs.push_back(std::move(d));
  }
  if (stats) *stats = local;
  return Corpus(std::move(docs), CorpusMeta{stops.sha256(), keywords.sha256(), options.source_label});
}

double document_frequency_ratio(const Corpus& corpus, std::string_view word) {
  if (corpus.n_docs() == 0) throw InvalidArgument("document frequency ratio of an empty corpus");
  return static_cast<double>(corpus.doc_freq(word)) / static_cast<double>(corpus.n_docs());
}

void save(const Corpus& corpus, std::ostream& out) {
  out << "#format=quickar-corpus-1\n";
  out << "#stoplist_sha=" << corpus.meta().stoplist_sha << '\n';
  out << "#keywords_sha=" << corpus.meta().keywords_sha << '\n';
  out << "#source=" << corpus.meta().source << '\n';
  std::size_t tokens = 0;
  for (const auto& doc : corpus.documents()) {
    out << doc.doc_id << '\t';
    bool first = true;
    for (const auto& t : doc.terms.tokens) {
      if (!first) out << ' ';
      first = false;
      if (t.origin == textprep::TokenOrigin::kCamelPart) out << '+';
      out << t.surface;
    }
    out << '\n';
    tokens += doc.terms.size();
  }
  out << "#docs=" << corpus.n_docs() << '\n';
  out << "#tokens=" << tokens << '\n';
}

void save(const Corpus& corpus, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot write corpus index");
  save(corpus, out);
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

Corpus load(std::istream& in, const std::string& name) {
  CorpusMeta meta;
  std::vector<Document> docs;
  std::optional<std::size_t> n_docs;
  std::optional<std::size_t> n_tokens;
  bool have_format = false;
  std::size_t tokens = 0;

  auto parse_count = [&](std::string_view v) {
    std::size_t x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size()) throw CorruptionError(name, "bad trailer");
    return x;
  };

  std::string line;
  while (std::getline(in, line)) {
    if (n_tokens) throw CorruptionError(name, "content after trailer");
    if (!line.empty() && line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw CorruptionError(name, "bad header");
      const auto key = line.substr(1, eq - 1);
      const auto value = line.substr(eq + 1);
      if (key == "format") {
        if (value != "quickar-corpus-1") throw CorruptionError(name, "unsupported format " + value);
        have_format = true;
      } else if (key == "stoplist_sha") {
        meta.stoplist_sha = value;
      } else if (key == "keywords_sha") {
        meta.keywords_sha = value;
      } else if (key == "source") {
        meta.source = value;
      } else if (key == "docs") {
        n_docs = parse_count(value);
      } else if (key == "tokens") {
        if (!n_docs) throw CorruptionError(name, "#tokens before #docs");
        n_tokens = parse_count(value);
      } else {
        throw CorruptionError(name, "unknown header key " + key);
      }
      continue;
    }
    if (n_docs) throw CorruptionError(name, "document after #docs trailer");
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw CorruptionError(name, "bad document line");
    auto id = line.substr(0, tab);
    textprep::TermSequence seq;
    std::istringstream words(line.substr(tab + 1));
    std::string w;
    while (words >> w) {
      textprep::Token t;
      if (w[0] == '+') {
        t.origin = textprep::TokenOrigin::kCamelPart;
        w.erase(0, 1);
      }
      if (w.empty()) throw CorruptionError(name, "empty token in " + id);
      t.normalized = textprep::to_lower(w);
      t.surface = std::move(w);
      seq.tokens.push_back(std::move(t));
    }
    tokens += seq.size();
    docs.push_back(Document::make(std::move(id), std::move(seq)));
  }
  if (!have_format) throw CorruptionError(name, "missing #format header");
  if (!n_docs || !n_tokens) throw CorruptionError(name, "missing trailer (truncated?)");
  if (*n_docs != docs.size() || *n_tokens != tokens) throw CorruptionError(name, "checksum mismatch");
  try {
    return Corpus(std::move(docs), std::move(meta));
  } catch (const InvalidArgument& e) {
    throw CorruptionError(name, e.what());
  }
}

Corpus load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open corpus index");
  return load(in, path.string());
}

}  // namespace quickar::corpus
