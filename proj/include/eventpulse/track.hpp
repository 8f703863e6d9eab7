#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eventpulse/tweet.hpp"

namespace eventpulse {

/// Splits on every byte that is not an ASCII letter/digit (bytes >= 0x80 count as letters),
/// returning lowercased tokens.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !detail::is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && detail::is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) tokens.push_back(detail::ascii_lower(text.substr(i, j - i)));
    i = j;
  }
  return tokens;
}

/// A term with a leading "#" stripped and case folded.
inline std::string normalize_term(std::string_view term) {
  if (!term.empty() && term.front() == '#') term.remove_prefix(1);
  return detail::ascii_lower(term);
}

/// True iff some term equals one of the tweet's hashtags or a whole token of its text.
inline bool matches_track(const Tweet& tweet, std::span<const std::string> track_terms) {
  std::vector<std::string> tokens;
  bool tokenized = false;
  for (const auto& raw : track_terms) {
    auto term = normalize_term(raw);
    if (term.empty()) continue;
    for (const auto& tag : tweet.hashtags)
      if (detail::ascii_lower(tag) == term) return true;
    if (!tokenized) {
      tokens = tokenize(tweet.text);
      tokenized = true;
    }
    // Terms that span several tokens ("euskal herria") match a contiguous token run.
    auto term_tokens = tokenize(term);
    if (term_tokens.empty() || term_tokens.size() > tokens.size()) continue;
    for (std::size_t i = 0; i + term_tokens.size() <= tokens.size(); ++i) {
      bool all = true;
      for (std::size_t k = 0; k < term_tokens.size() && all; ++k) all = tokens[i + k] == term_tokens[k];
      if (all) return true;
    }
  }
  return false;
}

}  // namespace eventpulse
