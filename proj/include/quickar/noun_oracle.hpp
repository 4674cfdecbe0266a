#pragma once

#include <string_view>

#include "quickar/textprep.hpp"

namespace quickar {

/// Decides whether a term is nominal (noun-like). `from_identifier` is true
/// for terms that came out of camel-case identifiers.
class NounOracle {
 public:
  virtual ~NounOracle() = default;
  virtual bool is_nominal(std::string_view normalized, bool from_identifier) const = 0;
};

/// Default oracle: identifier-derived terms are nominal; plain words are
/// rejected when listed in a non-noun lexicon (verbs also match their -s/-es
/// forms) or when they end in -ing / -ed and are not whitelisted.
class LexiconNounOracle final : public NounOracle {
 public:
  /// Uses the bundled lexicon and whitelist.
  LexiconNounOracle();
  LexiconNounOracle(textprep::StopList non_nouns, textprep::StopList whitelist);

  bool is_nominal(std::string_view normalized, bool from_identifier) const override;

 private:
  bool in_lexicon(std::string_view w) const;

  textprep::StopList non_nouns_;
  textprep::StopList whitelist_;
};

/// Accepts every term. Useful for isolating scoring behaviour in tests.
class AcceptAllNounOracle final : public NounOracle {
 public:
  bool is_nominal(std::string_view, bool) const override { return true; }
};

}  // namespace quickar
