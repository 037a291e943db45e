#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "macroflow/corpus.hpp"
#include "macroflow/logistic.hpp"

namespace macroflow {

// Macro bodies by spread, counted on all distinct users regardless of the
// tracking filter.
enum class MacroSet { all, wide_spread, narrow_spread };
enum class LifeStage { full, early };

inline constexpr std::size_t wide_spread_min_users = 251;  // more than 250
inline constexpr std::size_t narrow_spread_min_users = 20;
inline constexpr std::size_t narrow_spread_max_users = 250;
inline constexpr std::size_t early_life_papers = 40;
inline constexpr std::size_t max_curve_x = 40;

bool in_macro_set(const Corpus& corpus, MacroIndex macro, MacroSet set);

const char* to_string(MacroSet set);
const char* to_string(LifeStage life);
MacroSet parse_macro_set(std::string_view text);  // throws std::invalid_argument

struct NameChangeEvent {
  std::size_t x = 0;  // use index, starting at 2
  bool changed = false;
  PaperPos paper = 0;
};

// One event per use of the body after the author's first, comparing the name
// with the one at the previous use.
std::vector<NameChangeEvent> name_change_events(const Corpus& corpus, AuthorIndex author, MacroIndex macro);
std::vector<NameChangeEvent> name_change_events(const Corpus& corpus, const AuthorId& author, const MacroKey& macro);

struct CurvePoint {
  std::size_t x = 0;
  std::size_t events = 0;
  std::size_t changes = 0;
  std::optional<double> f;  // empty when no event has this x
};

struct NameChangeCurve {
  std::size_t theta = 0;
  MacroSet macro_set = MacroSet::all;
  LifeStage life = LifeStage::full;
  std::size_t authors = 0;  // |A|
  std::vector<CurvePoint> points;  // x = 2..40
};

// Pools events over authors with more than `theta` papers and bodies in
// `set`. Early life keeps events on the author's first 40 papers. Throws
// EmptyInputError when no author qualifies.
NameChangeCurve name_change_curve(const Corpus& corpus, std::size_t theta, MacroSet set, LifeStage life,
                                  unsigned jobs = 1);

struct Thresholds {
  std::size_t p20 = 0;
  std::size_t p80 = 0;
  std::size_t eligible = 0;
};

inline constexpr std::size_t min_threshold_authors = 5;

// Nearest-rank 20th and 80th percentiles of the paper counts that are at
// least `theta`. Throws EmptyInputError with fewer than 5 such counts.
Thresholds percentile_thresholds(std::vector<std::size_t> paper_counts, std::size_t theta);
Thresholds percentile_thresholds(const Corpus& corpus, std::size_t theta);

enum class AuthorFeature { name_change_rate, coauthor_count, total_macro_uses, distinct_bodies };

const char* to_string(AuthorFeature feature);
AuthorFeature parse_author_feature(std::string_view text);  // throws std::invalid_argument

// Feature value over the author's first `theta` papers only. The name-change
// rate is NaN when those papers hold no event.
double author_feature(const Corpus& corpus, AuthorIndex author, std::size_t theta, AuthorFeature feature);

struct FitnessClassTask {
  std::size_t theta = 0;
  Thresholds thresholds;
  std::vector<AuthorIndex> low;   // fewer papers than p20
  std::vector<AuthorIndex> high;  // more papers than p80
};

inline constexpr std::size_t min_class_authors = 10;

// Throws EmptyInputError when either class has fewer than 10 authors.
FitnessClassTask build_fitness_classes(const Corpus& corpus, std::size_t theta);

struct AuthorPrediction {
  double accuracy = 0.0;
  std::size_t n_low = 0;
  std::size_t n_high = 0;
};

// Single-feature logistic classifier of high versus low fitness.
AuthorPrediction predict_author_fitness(const Corpus& corpus, std::size_t theta, AuthorFeature feature,
                                        std::uint64_t seed, const LogisticOptions& options = {});
AuthorPrediction predict_author_fitness(const Corpus& corpus, const FitnessClassTask& task, AuthorFeature feature,
                                        std::uint64_t seed, const LogisticOptions& options = {});

}  // namespace macroflow
