#include "quickar/textprep.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "quickar/bundled_data.hpp"
#include "quickar/digest.hpp"
#include "quickar/error.hpp"

namespace quickar::textprep {

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_word_char(char c) {
  return is_upper(c) || is_lower(c) || is_digit(c) || static_cast<unsigned char>(c) >= 0x80;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> TermSequence::normalized_terms() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.normalized);
  return out;
}

StopList::StopList(std::set<std::string> words, std::string source_path)
    : source_path_(std::move(source_path)) {
  for (const auto& w : words) {
    auto n = to_lower(trim(w));
    if (!n.empty()) words_.insert(std::move(n));
  }
}

StopList StopList::parse(std::string_view text, std::string source_path) {
  std::set<std::string> words;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) words.insert(std::string(line));
    pos = eol + 1;
  }
  return StopList(std::move(words), std::move(source_path));
}

StopList StopList::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open stop list");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

const StopList& StopList::standard() {
  static const StopList kStandard = parse(bundled::stopwords(), "<bundled:stopwords.txt>");
  return kStandard;
}

bool StopList::contains(std::string_view normalized) const {
  return words_.find(normalized) != words_.end();
}

std::string StopList::sha256() const {
  std::string joined;
  for (const auto& w : words_) {
    joined += w;
    joined += '\n';
  }
  return sha256_hex(joined);
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (is_upper(c)) c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_char(text[i])) ++i;
    const auto start = i;
    while (i < text.size() && is_word_char(text[i])) ++i;
    if (i > start) {
      auto frag = text.substr(start, i - start);
      if (!all_digits(frag)) out.emplace_back(frag);
    }
  }
  return out;
}

std::vector<std::string> split_camel(std::string_view token) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 1; i < token.size(); ++i) {
    const char prev = token[i - 1];
    const char cur = token[i];
    bool boundary = false;
    if (is_upper(cur) && (is_lower(prev) || is_digit(prev))) {
      boundary = true;
    } else if (is_upper(cur) && is_upper(prev) && i + 1 < token.size() && is_lower(token[i + 1])) {
      // "XMLHttp": the last capital of a run starts the next word.
      boundary = true;
    }
    if (boundary) {
      parts.emplace_back(token.substr(start, i - start));
      start = i;
    }
  }
  if (start < token.size()) parts.emplace_back(token.substr(start));
  return parts;
}

TermSequence preprocess(std::string_view text, const StopList& stops, SplitMode mode,
                        std::string source_id) {
  TermSequence seq;
  seq.source_id = std::move(source_id);
  auto emit = [&](std::string surface, TokenOrigin origin) {
    auto normalized = to_lower(surface);
    if (stops.contains(normalized)) return;
    seq.tokens.push_back(Token{std::move(surface), std::move(normalized), origin});
  };
  for (auto& raw : tokenize(text)) {
    auto parts = split_camel(raw);
    if (parts.size() <= 1) {
      emit(std::move(raw), TokenOrigin::kWhole);
      continue;
    }
    for (auto& part : parts) {
      if (!all_digits(part)) emit(std::move(part), TokenOrigin::kCamelPart);
    }
    if (mode == SplitMode::kSplitAndKeepWhole) emit(std::move(raw), TokenOrigin::kWhole);
  }
  return seq;
}

TermSequence verbatim_terms(std::string_view text, std::string source_id) {
  TermSequence seq;
  seq.source_id = std::move(source_id);
  for (auto& raw : tokenize(text)) {
    auto normalized = to_lower(raw);
    seq.tokens.push_back(Token{std::move(raw), std::move(normalized), TokenOrigin::kWhole});
  }
  return seq;
}

}  // namespace quickar::textprep
