#include "quickar/noun_oracle.hpp"

#include "quickar/bundled_data.hpp"

namespace quickar {

LexiconNounOracle::LexiconNounOracle()
    : LexiconNounOracle(textprep::StopList::parse(bundled::non_nouns(), "<bundled:non_nouns.txt>"),
                        textprep::StopList::parse(bundled::nominal_whitelist(),
                                                  "<bundled:nominal_whitelist.txt>")) {}

LexiconNounOracle::LexiconNounOracle(textprep::StopList non_nouns, textprep::StopList whitelist)
    : non_nouns_(std::move(non_nouns)), whitelist_(std::move(whitelist)) {}

bool LexiconNounOracle::in_lexicon(std::string_view w) const {
  if (non_nouns_.contains(w)) return true;
  if (w.size() > 3 && w.ends_with("es") && non_nouns_.contains(w.substr(0, w.size() - 2))) return true;
  if (w.size() > 2 && w.ends_with('s') && !w.ends_with("ss") &&
      non_nouns_.contains(w.substr(0, w.size() - 1))) {
    return true;
  }
  return false;
}

bool LexiconNounOracle::is_nominal(std::string_view normalized, bool from_identifier) const {
  if (from_identifier) return true;
  if (normalized.empty() || in_lexicon(normalized)) return false;
  if (whitelist_.contains(normalized)) return true;
  if (normalized.size() >= 5 && normalized.ends_with("ing")) return false;
  if (normalized.size() >= 4 && normalized.ends_with("ed")) return false;
  return true;
}

}  // namespace quickar
