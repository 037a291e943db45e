#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "macroflow/macro_extract.hpp"

namespace macroflow {

// Calendar month; the time resolution of the whole toolkit.
struct Month {
  int year = 1900;
  int month = 1;

  // Accepts "YYYY-MM" in 1900-01..2100-12. Throws std::invalid_argument.
  static Month parse(std::string_view text);
  static Month from_index(int index) { return {index / 12, index % 12 + 1}; }

  int index() const { return year * 12 + (month - 1); }
  std::string str() const;

  friend auto operator<=>(const Month&, const Month&) = default;
};

inline int months_between(Month from, Month to) { return to.index() - from.index(); }

// Lexically normalized author identifier: trimmed, ASCII case-folded, with
// internal whitespace runs collapsed to a single space.
class AuthorId {
 public:
  AuthorId() = default;
  // Throws std::invalid_argument when nothing is left after normalization.
  explicit AuthorId(std::string_view raw);

  const std::string& str() const { return value_; }

  friend auto operator<=>(const AuthorId&, const AuthorId&) = default;

 private:
  std::string value_;
};

std::string normalize_author(std::string_view raw);

struct Paper {
  std::string id;
  Month date;
  std::vector<AuthorId> authors;
  std::vector<MacroUse> macro_uses;
};

using PaperPos = std::size_t;       // index into the chronologically sorted papers
using AuthorIndex = std::uint32_t;  // index into Corpus::authors()
using MacroIndex = std::uint32_t;   // index into Corpus::macros()

// One paper's use of a body. A paper listing the same body under several
// names keeps the first name.
struct MacroOccurrence {
  PaperPos paper;
  std::string name;
};

// Immutable, chronologically ordered corpus. Papers are sorted by (date, id);
// "earlier" everywhere in the toolkit means earlier in this order.
class Corpus {
 public:
  Corpus() = default;
  // Validates and indexes. Throws CorpusError on duplicate ids, empty or
  // repeated authors, or empty macro names.
  explicit Corpus(std::vector<Paper> papers);

  std::size_t size() const { return papers_.size(); }
  bool empty() const { return papers_.empty(); }
  std::span<const Paper> papers() const { return papers_; }
  const Paper& paper(PaperPos pos) const { return papers_.at(pos); }

  std::optional<PaperPos> find_paper(std::string_view id) const;
  PaperPos position_of(std::string_view id) const;  // throws LookupError

  // Sorted.
  const std::vector<AuthorId>& authors() const { return authors_; }
  const AuthorId& author(AuthorIndex index) const { return authors_.at(index); }
  std::optional<AuthorIndex> find_author(const AuthorId& author) const;
  AuthorIndex author_index(const AuthorId& author) const;  // throws LookupError

  // Author indices of a paper, in the paper's author order.
  std::span<const AuthorIndex> paper_authors(PaperPos pos) const { return paper_authors_.at(pos); }
  // Chronological positions of an author's papers.
  std::span<const PaperPos> papers_of(AuthorIndex author) const { return author_papers_.at(author); }
  std::span<const PaperPos> papers_of(const AuthorId& author) const {
    return papers_of(author_index(author));
  }

  // Sorted by body.
  const std::vector<MacroKey>& macros() const { return macros_; }
  const MacroKey& macro(MacroIndex index) const { return macros_.at(index); }
  std::optional<MacroIndex> find_macro(const MacroKey& key) const;
  MacroIndex macro_index(const MacroKey& key) const;  // throws LookupError

  // Distinct bodies used by a paper, in order of first appearance.
  std::span<const MacroIndex> paper_macros(PaperPos pos) const { return paper_macros_.at(pos); }
  // One entry per paper using the body, chronological.
  std::span<const MacroOccurrence> occurrences(MacroIndex macro) const { return occurrences_.at(macro); }
  // Distinct authors over all papers using the body.
  std::size_t distinct_users(MacroIndex macro) const { return distinct_users_.at(macro); }

  // Copy holding only the first `end` papers.
  Corpus prefix(PaperPos end) const;

 private:
  std::vector<Paper> papers_;
  std::unordered_map<std::string, PaperPos> paper_index_;
  std::vector<AuthorId> authors_;
  std::unordered_map<std::string, AuthorIndex> author_lookup_;
  std::vector<std::vector<AuthorIndex>> paper_authors_;
  std::vector<std::vector<PaperPos>> author_papers_;
  std::vector<MacroKey> macros_;
  std::unordered_map<std::string, MacroIndex> macro_lookup_;
  std::vector<std::vector<MacroIndex>> paper_macros_;
  std::vector<std::vector<MacroOccurrence>> occurrences_;
  std::vector<std::size_t> distinct_users_;
};

enum class LoadMode { pre_extracted, raw_latex };

struct LoadReport {
  std::size_t records = 0;
  std::size_t unbalanced_definitions = 0;
  std::size_t malformed_definitions = 0;
};

// JSON Lines, one paper per line; blank lines are skipped. Throws CorpusError
// naming the offending line.
Corpus parse_corpus(std::istream& in, LoadMode mode, LoadReport* report = nullptr);
Corpus load_corpus(const std::filesystem::path& path, LoadMode mode, LoadReport* report = nullptr);

// Writes the pre-extracted JSON Lines form, in corpus order.
void write_corpus(std::ostream& out, const Corpus& corpus);

// Papers by `author` strictly before the paper at `pos`.
std::size_t global_experience(const Corpus& corpus, AuthorIndex author, PaperPos pos);
// Papers by `author` strictly before `pos` that use `macro`.
std::size_t local_experience(const Corpus& corpus, AuthorIndex author, MacroIndex macro, PaperPos pos);

// Identifier-based forms; throw LookupError for unknown authors, papers or macros.
std::size_t global_experience(const Corpus& corpus, const AuthorId& author, std::string_view before_paper);
std::size_t local_experience(const Corpus& corpus, const AuthorId& author, const MacroKey& macro,
                             std::string_view before_paper);

// Precomputed per-(author, macro) usage positions for repeated local queries.
class ExperienceLedger {
 public:
  explicit ExperienceLedger(const Corpus& corpus);

  std::size_t global(AuthorIndex author, PaperPos pos) const;
  std::size_t local(AuthorIndex author, MacroIndex macro, PaperPos pos) const;

 private:
  const Corpus* corpus_;
  std::unordered_map<std::uint64_t, std::vector<PaperPos>> uses_;
};

}  // namespace macroflow

template <>
struct std::hash<macroflow::AuthorId> {
  std::size_t operator()(const macroflow::AuthorId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
