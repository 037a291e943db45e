#pragma once

#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace macroflow {

class Corpus;

// Trims, and collapses every internal run of ASCII whitespace to one space.
// All other bytes are left untouched.
std::string normalize_body(std::string_view raw);

// Number of UTF-8 code points (bytes that are not continuation bytes).
std::size_t char_length(std::string_view text);

// A normalized macro body. The body, not the name, is the unit that is
// tracked through the corpus.
class MacroKey {
 public:
  MacroKey() = default;
  explicit MacroKey(std::string_view raw_body) : body_(normalize_body(raw_body)) {}

  const std::string& body() const { return body_; }
  std::size_t length() const { return char_length(body_); }

  friend auto operator<=>(const MacroKey&, const MacroKey&) = default;

 private:
  std::string body_;
};

struct MacroUse {
  std::string name;  // without the leading backslash
  std::string body;  // raw, as written in the source

  friend bool operator==(const MacroUse&, const MacroUse&) = default;
};

struct Extraction {
  std::vector<MacroUse> macros;
  std::size_t unbalanced = 0;  // definitions dropped for unbalanced braces
  std::size_t malformed = 0;   // definitions without a recognizable name or body
};

// Collects \newcommand, \renewcommand, \providecommand (and their starred
// forms) and \def definitions in source order. Commented-out text is ignored,
// bodies of recognized definitions are not searched for nested definitions,
// and repeated (name, body) pairs are reported once.
Extraction extract_macros(std::string_view source);

struct MacroFilter {
  std::size_t min_body_len = 20;  // keep bodies strictly longer than this
  std::size_t min_authors = 30;   // keep bodies with at least this many users
};

// Bodies passing both filters; the user count is the number of distinct
// authors over every paper that uses the body.
std::set<MacroKey> trackable_macros(const Corpus& corpus, const MacroFilter& filter);

}  // namespace macroflow

template <>
struct std::hash<macroflow::MacroKey> {
  std::size_t operator()(const macroflow::MacroKey& key) const noexcept {
    return std::hash<std::string>{}(key.body());
  }
};
