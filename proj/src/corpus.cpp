#include "macroflow/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "macroflow/error.hpp"

namespace macroflow {

namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

int parse_int(std::string_view digits) {
  int value = 0;
  auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || end != digits.data() + digits.size())
    throw std::invalid_argument("not a number");
  return value;
}

}  // namespace

Month Month::parse(std::string_view text) {
  auto bad = [&] { return std::invalid_argument(fmt::format("invalid date '{}', expected YYYY-MM", text)); };
  if (text.size() != 7 || text[4] != '-') throw bad();
  for (std::size_t i : {0, 1, 2, 3, 5, 6})
    if (text[i] < '0' || text[i] > '9') throw bad();
  Month m{parse_int(text.substr(0, 4)), parse_int(text.substr(5, 2))};
  if (m.month < 1 || m.month > 12) throw bad();
  if (m.year < 1900 || m.year > 2100)
    throw std::invalid_argument(fmt::format("date '{}' outside 1900-01..2100-12", text));
  return m;
}

std::string Month::str() const { return fmt::format("{:04d}-{:02d}", year, month); }

std::string normalize_author(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : raw) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
  }
  return out;
}

AuthorId::AuthorId(std::string_view raw) : value_(normalize_author(raw)) {
  if (value_.empty()) throw std::invalid_argument("empty author identifier");
}

Corpus::Corpus(std::vector<Paper> papers) : papers_(std::move(papers)) {
  std::stable_sort(papers_.begin(), papers_.end(), [](const Paper& a, const Paper& b) {
    if (a.date != b.date) return a.date < b.date;
    return a.id < b.id;
  });

  std::set<AuthorId> author_set;
  std::set<MacroKey> macro_set;
  for (const Paper& p : papers_) {
    if (p.id.empty()) throw CorpusError("paper with empty id");
    if (!paper_index_.emplace(p.id, paper_index_.size()).second)
      throw CorpusError(fmt::format("duplicate paper id '{}'", p.id));
    if (p.authors.empty()) throw CorpusError(fmt::format("paper '{}' has no authors", p.id));
    std::set<AuthorId> seen;
    for (const AuthorId& a : p.authors) {
      if (a.str().empty()) throw CorpusError(fmt::format("paper '{}' has an empty author", p.id));
      if (!seen.insert(a).second)
        throw CorpusError(fmt::format("paper '{}' lists author '{}' twice", p.id, a.str()));
      author_set.insert(a);
    }
    for (const MacroUse& use : p.macro_uses) {
      if (use.name.empty()) throw CorpusError(fmt::format("paper '{}' has a macro with an empty name", p.id));
      macro_set.insert(MacroKey(use.body));
    }
  }

  authors_.assign(author_set.begin(), author_set.end());
  for (std::size_t i = 0; i < authors_.size(); ++i)
    author_lookup_.emplace(authors_[i].str(), static_cast<AuthorIndex>(i));
  macros_.assign(macro_set.begin(), macro_set.end());
  for (std::size_t i = 0; i < macros_.size(); ++i)
    macro_lookup_.emplace(macros_[i].body(), static_cast<MacroIndex>(i));

  paper_authors_.resize(papers_.size());
  paper_macros_.resize(papers_.size());
  author_papers_.resize(authors_.size());
  occurrences_.resize(macros_.size());
  distinct_users_.assign(macros_.size(), 0);

  for (PaperPos pos = 0; pos < papers_.size(); ++pos) {
    const Paper& p = papers_[pos];
    for (const AuthorId& a : p.authors) {
      AuthorIndex idx = author_lookup_.at(a.str());
      paper_authors_[pos].push_back(idx);
      author_papers_[idx].push_back(pos);
    }
    for (const MacroUse& use : p.macro_uses) {
      MacroIndex idx = macro_lookup_.at(normalize_body(use.body));
      auto& listed = paper_macros_[pos];
      if (std::find(listed.begin(), listed.end(), idx) != listed.end()) continue;
      listed.push_back(idx);
      occurrences_[idx].push_back({pos, use.name});
    }
  }

  std::vector<std::uint32_t> stamp(authors_.size(), 0);
  for (MacroIndex m = 0; m < macros_.size(); ++m) {
    std::size_t users = 0;
    for (const MacroOccurrence& occ : occurrences_[m])
      for (AuthorIndex a : paper_authors_[occ.paper])
        if (stamp[a] != m + 1) {
          stamp[a] = m + 1;
          ++users;
        }
    distinct_users_[m] = users;
  }
}

std::optional<PaperPos> Corpus::find_paper(std::string_view id) const {
  auto it = paper_index_.find(std::string(id));
  if (it == paper_index_.end()) return std::nullopt;
  return it->second;
}

PaperPos Corpus::position_of(std::string_view id) const {
  if (auto pos = find_paper(id)) return *pos;
  throw LookupError(fmt::format("unknown paper '{}'", id));
}

std::optional<AuthorIndex> Corpus::find_author(const AuthorId& author) const {
  auto it = author_lookup_.find(author.str());
  if (it == author_lookup_.end()) return std::nullopt;
  return it->second;
}

AuthorIndex Corpus::author_index(const AuthorId& author) const {
  if (auto idx = find_author(author)) return *idx;
  throw LookupError(fmt::format("unknown author '{}'", author.str()));
}

std::optional<MacroIndex> Corpus::find_macro(const MacroKey& key) const {
  auto it = macro_lookup_.find(key.body());
  if (it == macro_lookup_.end()) return std::nullopt;
  return it->second;
}

MacroIndex Corpus::macro_index(const MacroKey& key) const {
  if (auto idx = find_macro(key)) return *idx;
  throw LookupError(fmt::format("unknown macro body '{}'", key.body()));
}

Corpus Corpus::prefix(PaperPos end) const {
  end = std::min(end, papers_.size());
  return Corpus(std::vector<Paper>(papers_.begin(), papers_.begin() + static_cast<std::ptrdiff_t>(end)));
}

namespace {

using nlohmann::json;

const json& require(const json& record, const char* field, std::size_t line) {
  auto it = record.find(field);
  if (it == record.end()) throw CorpusError(fmt::format("missing field \"{}\"", field), line);
  return *it;
}

std::string require_string(const json& record, const char* field, std::size_t line) {
  const json& value = require(record, field, line);
  if (!value.is_string()) throw CorpusError(fmt::format("field \"{}\" must be a string", field), line);
  return value.get<std::string>();
}

std::string strip_backslash(std::string name) {
  if (!name.empty() && name.front() == '\\') name.erase(0, 1);
  return name;
}

Paper parse_record(const json& record, LoadMode mode, std::size_t line, LoadReport& report) {
  if (!record.is_object()) throw CorpusError("record is not a JSON object", line);
  Paper p;
  p.id = require_string(record, "id", line);
  if (p.id.empty()) throw CorpusError("empty paper id", line);
  try {
    p.date = Month::parse(require_string(record, "date", line));
  } catch (const std::invalid_argument& e) {
    throw CorpusError(e.what(), line);
  }

  const json& authors = require(record, "authors", line);
  if (!authors.is_array() || authors.empty())
    throw CorpusError("field \"authors\" must be a non-empty array", line);
  for (const json& a : authors) {
    if (!a.is_string()) throw CorpusError("author entries must be strings", line);
    try {
      p.authors.emplace_back(a.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw CorpusError(e.what(), line);
    }
  }

  if (mode == LoadMode::pre_extracted) {
    const json& macros = require(record, "macros", line);
    if (!macros.is_array()) throw CorpusError("field \"macros\" must be an array", line);
    for (const json& m : macros) {
      if (!m.is_object()) throw CorpusError("macro entries must be objects", line);
      MacroUse use{strip_backslash(require_string(m, "name", line)), require_string(m, "body", line)};
      if (use.name.empty()) throw CorpusError("macro with empty name", line);
      p.macro_uses.push_back(std::move(use));
    }
  } else {
    Extraction ex = extract_macros(require_string(record, "source", line));
    report.unbalanced_definitions += ex.unbalanced;
    report.malformed_definitions += ex.malformed;
    p.macro_uses = std::move(ex.macros);
  }
  return p;
}

}  // namespace

Corpus parse_corpus(std::istream& in, LoadMode mode, LoadReport* report) {
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  std::vector<Paper> papers;
  std::unordered_map<std::string, std::size_t> id_line;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return is_space(c); })) continue;
    json record;
    try {
      record = json::parse(text);
    } catch (const json::parse_error& e) {
      throw CorpusError(fmt::format("malformed JSON: {}", e.what()), line);
    }
    Paper p = parse_record(record, mode, line, rep);
    auto [it, fresh] = id_line.emplace(p.id, line);
    if (!fresh) throw CorpusError(fmt::format("duplicate paper id '{}' (first seen on line {})", p.id, it->second), line);
    std::set<AuthorId> seen;
    for (const AuthorId& a : p.authors)
      if (!seen.insert(a).second) throw CorpusError(fmt::format("author '{}' listed twice", a.str()), line);
    papers.push_back(std::move(p));
    ++rep.records;
  }
  return Corpus(std::move(papers));
}

Corpus load_corpus(const std::filesystem::path& path, LoadMode mode, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw CorpusError(fmt::format("cannot open corpus file '{}'", path.string()));
  return parse_corpus(in, mode, report);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const Paper& p : corpus.papers()) {
    nlohmann::ordered_json record;
    record["id"] = p.id;
    record["date"] = p.date.str();
    auto& authors = record["authors"] = nlohmann::ordered_json::array();
    for (const AuthorId& a : p.authors) authors.push_back(a.str());
    auto& macros = record["macros"] = nlohmann::ordered_json::array();
    for (const MacroUse& use : p.macro_uses) macros.push_back({{"name", use.name}, {"body", use.body}});
    out << record.dump() << '\n';
  }
}

std::size_t global_experience(const Corpus& corpus, AuthorIndex author, PaperPos pos) {
  auto papers = corpus.papers_of(author);
  return static_cast<std::size_t>(std::lower_bound(papers.begin(), papers.end(), pos) - papers.begin());
}

std::size_t local_experience(const Corpus& corpus, AuthorIndex author, MacroIndex macro, PaperPos pos) {
  std::size_t count = 0;
  for (PaperPos p : corpus.papers_of(author)) {
    if (p >= pos) break;
    auto used = corpus.paper_macros(p);
    if (std::find(used.begin(), used.end(), macro) != used.end()) ++count;
  }
  return count;
}

std::size_t global_experience(const Corpus& corpus, const AuthorId& author, std::string_view before_paper) {
  AuthorIndex a = corpus.author_index(author);
  return global_experience(corpus, a, corpus.position_of(before_paper));
}

std::size_t local_experience(const Corpus& corpus, const AuthorId& author, const MacroKey& macro,
                             std::string_view before_paper) {
  AuthorIndex a = corpus.author_index(author);
  MacroIndex m = corpus.macro_index(macro);
  return local_experience(corpus, a, m, corpus.position_of(before_paper));
}

namespace {
std::uint64_t ledger_key(AuthorIndex a, MacroIndex m) { return (std::uint64_t{a} << 32) | m; }
}  // namespace

ExperienceLedger::ExperienceLedger(const Corpus& corpus) : corpus_(&corpus) {
  for (MacroIndex m = 0; m < corpus.macros().size(); ++m)
    for (const MacroOccurrence& occ : corpus.occurrences(m))
      for (AuthorIndex a : corpus.paper_authors(occ.paper)) uses_[ledger_key(a, m)].push_back(occ.paper);
}

std::size_t ExperienceLedger::global(AuthorIndex author, PaperPos pos) const {
  return global_experience(*corpus_, author, pos);
}

std::size_t ExperienceLedger::local(AuthorIndex author, MacroIndex macro, PaperPos pos) const {
  auto it = uses_.find(ledger_key(author, macro));
  if (it == uses_.end()) return 0;
  const auto& v = it->second;
  return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), pos) - v.begin());
}

}  // namespace macroflow
