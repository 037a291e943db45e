#include "macroflow/macro_extract.hpp"

#include <algorithm>
#include <optional>
#include <utility>

#include "macroflow/corpus.hpp"

namespace macroflow {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool is_name_char(char c) { return is_letter(c) || c == '@'; }

// Drops everything from an unescaped % to the end of its line.
std::string strip_comments(std::string_view src) {
  std::string out;
  out.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    char c = src[i];
    if (c == '\\' && i + 1 < src.size()) {
      out.push_back(c);
      out.push_back(src[++i]);
      continue;
    }
    if (c == '%') {
      while (i < src.size() && src[i] != '\n') ++i;
      if (i < src.size()) out.push_back('\n');
      continue;
    }
    out.push_back(c);
  }
  return out;
}

class DefinitionScanner {
 public:
  explicit DefinitionScanner(std::string_view text) : text_(text) {}

  Extraction run() {
    Extraction out;
    std::set<std::pair<std::string, std::string>> seen;
    while (pos_ < text_.size()) {
      if (text_[pos_] != '\\') {
        ++pos_;
        continue;
      }
      std::size_t start = pos_++;
      std::string word = read_word();
      if (word.empty()) {
        ++pos_;  // control symbol such as \\ or \{
        continue;
      }
      Outcome result;
      if (word == "newcommand" || word == "renewcommand" || word == "providecommand") {
        if (peek() == '*') ++pos_;
        result = newcommand_form();
      } else if (word == "def") {
        result = def_form();
      } else {
        continue;
      }
      switch (result.status) {
        case Status::ok:
          if (seen.emplace(result.use.name, result.use.body).second) out.macros.push_back(std::move(result.use));
          break;
        case Status::unbalanced:
          ++out.unbalanced;
          pos_ = result.resume;
          break;
        case Status::malformed:
          ++out.malformed;
          pos_ = std::max(pos_, start + 1);
          break;
      }
    }
    return out;
  }

 private:
  enum class Status { ok, unbalanced, malformed };
  struct Outcome {
    Status status = Status::malformed;
    MacroUse use;
    std::size_t resume = 0;
  };

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  std::string read_word() {
    std::size_t begin = pos_;
    while (pos_ < text_.size() && is_letter(text_[pos_])) ++pos_;
    return std::string(text_.substr(begin, pos_ - begin));
  }

  // Reads a control sequence name after its backslash.
  std::optional<std::string> read_cs_name() {
    std::size_t begin = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    if (pos_ == begin) {
      if (pos_ >= text_.size() || is_space(text_[pos_])) return std::nullopt;
      ++pos_;
    }
    return std::string(text_.substr(begin, pos_ - begin));
  }

  // On '{', returns the index of its matching '}', or npos.
  std::size_t match_brace(std::size_t open) const {
    int depth = 0;
    for (std::size_t j = open; j < text_.size(); ++j) {
      char c = text_[j];
      if (c == '\\') {
        ++j;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) return j;
      }
    }
    return std::string_view::npos;
  }

  // Skips a [...] group, honoring braces inside it.
  bool skip_optional_arg() {
    skip_space();
    if (peek() != '[') return true;
    int depth = 0;
    for (std::size_t j = pos_ + 1; j < text_.size(); ++j) {
      char c = text_[j];
      if (c == '\\') {
        ++j;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth < 0) return false;
      } else if (c == ']' && depth == 0) {
        pos_ = j + 1;
        return true;
      }
    }
    return false;
  }

  Outcome read_body(std::string name) {
    Outcome out;
    if (peek() != '{') return out;
    std::size_t open = pos_;
    std::size_t close = match_brace(open);
    if (close == std::string_view::npos) {
      out.status = Status::unbalanced;
      out.resume = open + 1;
      return out;
    }
    out.status = Status::ok;
    out.use = {std::move(name), std::string(text_.substr(open + 1, close - open - 1))};
    pos_ = close + 1;
    return out;
  }

  Outcome newcommand_form() {
    skip_space();
    std::optional<std::string> name;
    if (peek() == '{') {
      ++pos_;
      skip_space();
      if (peek() != '\\') return {};
      ++pos_;
      name = read_cs_name();
      skip_space();
      if (!name || peek() != '}') return {};
      ++pos_;
    } else if (peek() == '\\') {
      ++pos_;
      name = read_cs_name();
      if (!name) return {};
    } else {
      return {};
    }
    if (!skip_optional_arg() || !skip_optional_arg()) return {};
    skip_space();
    return read_body(std::move(*name));
  }

  Outcome def_form() {
    skip_space();
    if (peek() != '\\') return {};
    ++pos_;
    std::optional<std::string> name = read_cs_name();
    if (!name) return {};
    // Parameter text runs up to the first unescaped opening brace.
    while (pos_ < text_.size() && text_[pos_] != '{') {
      if (text_[pos_] == '}') return {};
      if (text_[pos_] == '\\') ++pos_;
      ++pos_;
    }
    return read_body(std::move(*name));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string normalize_body(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::size_t char_length(std::string_view text) {
  std::size_t n = 0;
  for (unsigned char c : text)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

Extraction extract_macros(std::string_view source) {
  std::string cleaned = strip_comments(source);
  return DefinitionScanner(cleaned).run();
}

std::set<MacroKey> trackable_macros(const Corpus& corpus, const MacroFilter& filter) {
  std::set<MacroKey> out;
  for (MacroIndex m = 0; m < corpus.macros().size(); ++m) {
    const MacroKey& key = corpus.macro(m);
    if (key.length() > filter.min_body_len && corpus.distinct_users(m) >= filter.min_authors) out.insert(key);
  }
  return out;
}

}  // namespace macroflow
