#include "macroflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "macroflow/random.hpp"

namespace macroflow {

void validate(const SynthConfig& c) {
  auto prob = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(fmt::format("{} must lie in [0, 1], got {}", what, p));
  };
  prob(c.invention_rate, "invention rate");
  prob(c.transmission_probability, "transmission probability");
  prob(c.independent_invention_rate, "independent invention rate");
  prob(c.name_change_rate, "name change rate");
  prob(c.repeat_collaborator, "repeat collaborator probability");
  if (c.n_authors == 0 || c.n_papers == 0 || c.months_span <= 0)
    throw std::invalid_argument("author, paper and month counts must be positive");
  if (c.team_min < 1 || c.team_max < c.team_min)
    throw std::invalid_argument(fmt::format("infeasible team sizes [{}, {}]", c.team_min, c.team_max));
  if (static_cast<std::size_t>(c.team_max) > c.n_authors)
    throw std::invalid_argument(fmt::format("team size {} exceeds {} authors", c.team_max, c.n_authors));
  if (c.activity_exponent <= 1.0) throw std::invalid_argument("activity exponent must exceed 1");
  if (c.career_months <= 0) throw std::invalid_argument("career length must be positive");
  if (c.name_change_decay <= 0.0 || c.name_change_decay > 1.0)
    throw std::invalid_argument("name change decay must lie in (0, 1]");
}

namespace {

struct MacroState {
  PlantedMacro planted;
  std::vector<std::string> names;
};

// Bodies are unique per macro, already normalized and always longer than the
// default 20-character tracking threshold.
std::string make_body(std::size_t id, bool fancy) {
  if (fancy) return fmt::format("\\text{{${{\\hat{{\\mathbf{{w{:05d}}}}}}}$}}_{{#1}}", id);
  return fmt::format("\\operatorname{{w{:05d}}}\\left(#1\\right)", id);
}

class Simulator {
 public:
  Simulator(const SynthConfig& config, const FitnessEffects& effects)
      : c_(config), e_(effects), rng_(config.seed) {}

  SynthResult run(bool plant_pairs) {
    validate(c_);
    make_authors();
    make_pools();
    std::vector<Paper> papers;
    papers.reserve(c_.n_papers);
    for (std::size_t i = 0; i < c_.n_papers; ++i) papers.push_back(make_paper(i));
    if (plant_pairs) add_follow_ups(papers);
    for (auto& m : macros_) truth_.macros.push_back(std::move(m.planted));
    truth_.effects = e_;
    return {Corpus(std::move(papers)), std::move(truth_)};
  }

 private:
  void make_authors() {
    const std::size_t n = c_.n_authors;
    weights_.resize(n);
    centers_.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
      const double u = 1.0 - rng_.uniform();
      weights_[a] = std::min(std::floor(std::pow(u, -1.0 / (c_.activity_exponent - 1.0))),
                             static_cast<double>(c_.n_papers));
      centers_[a] = rng_.between(0, c_.months_span - 1);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return weights_[x] < weights_[y]; });
    // Mid-rank quantiles: equal weights share one quantile.
    std::vector<double> quantile(n, 0.0);
    for (std::size_t lo = 0; lo < n;) {
      std::size_t hi = lo;
      while (hi + 1 < n && weights_[order[hi + 1]] == weights_[order[lo]]) ++hi;
      const double mid = n > 1 ? 0.5 * static_cast<double>(lo + hi) / static_cast<double>(n - 1) : 0.0;
      for (std::size_t r = lo; r <= hi; ++r) quantile[order[r]] = mid;
      lo = hi + 1;
    }
    rates_.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
      rates_[a] = std::clamp(c_.name_change_rate * (1.0 + e_.loyalty * (1.0 - 2.0 * quantile[a])), 0.0, 1.0);
      ids_.emplace_back(fmt::format("a{:05d}", a));
      truth_.authors.push_back({ids_.back(), weights_[a], quantile[a], rates_[a]});
    }
    carried_.resize(n);
    collaborators_.resize(n);
    papers_written_.assign(n, 0);
  }

  void make_pools() {
    pools_.resize(static_cast<std::size_t>(c_.months_span));
    cumulative_.resize(pools_.size());
    for (int t = 0; t < c_.months_span; ++t) {
      auto& pool = pools_[static_cast<std::size_t>(t)];
      for (std::size_t a = 0; a < c_.n_authors; ++a) {
        const double half = c_.career_months * std::sqrt(weights_[a]);
        if (std::abs(t - centers_[a]) <= half) pool.push_back(static_cast<AuthorIndex>(a));
      }
      if (pool.size() < static_cast<std::size_t>(c_.team_max)) {
        // Too few careers cover this month: fall back to everyone.
        pool.resize(c_.n_authors);
        std::iota(pool.begin(), pool.end(), 0);
      }
      auto& cum = cumulative_[static_cast<std::size_t>(t)];
      double total = 0.0;
      for (AuthorIndex a : pool) cum.push_back(total += weights_[a]);
    }
  }

  AuthorIndex weighted_pick(int month, const std::vector<AuthorIndex>& team) {
    const auto& pool = pools_[static_cast<std::size_t>(month)];
    const auto& cum = cumulative_[static_cast<std::size_t>(month)];
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double x = rng_.uniform() * cum.back();
      auto k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), x) - cum.begin());
      AuthorIndex a = pool[std::min(k, pool.size() - 1)];
      if (std::find(team.begin(), team.end(), a) == team.end()) return a;
    }
    for (AuthorIndex a : pool)
      if (std::find(team.begin(), team.end(), a) == team.end()) return a;
    throw std::logic_error("active pool exhausted");
  }

  int team_size() {
    std::vector<double> w;
    double total = 0.0;
    for (int s = c_.team_min; s <= c_.team_max; ++s) w.push_back(total += std::exp(-c_.team_shape * (s - c_.team_min)));
    const double x = rng_.uniform() * total;
    return c_.team_min + static_cast<int>(std::upper_bound(w.begin(), w.end(), x) - w.begin());
  }

  std::vector<AuthorIndex> make_team(int month) {
    std::vector<AuthorIndex> team;
    const int size = team_size();
    team.push_back(weighted_pick(month, team));
    const auto& active = pools_[static_cast<std::size_t>(month)];
    while (static_cast<int>(team.size()) < size) {
      const auto& past = collaborators_[team.front()];
      AuthorIndex next = 0;
      bool found = false;
      if (!past.empty() && rng_.bernoulli(c_.repeat_collaborator)) {
        AuthorIndex cand = past[rng_.index(past.size())];
        if (std::find(team.begin(), team.end(), cand) == team.end() &&
            std::binary_search(active.begin(), active.end(), cand)) {
          next = cand;
          found = true;
        }
      }
      if (!found) next = weighted_pick(month, team);
      team.push_back(next);
    }
    return team;
  }

  // The member most attached to its names (lowest rename rate) writes the
  // macro; ties are broken uniformly.
  AuthorIndex writer(const std::vector<AuthorIndex>& candidates) {
    double best = 2.0;
    std::vector<AuthorIndex> tied;
    for (AuthorIndex a : candidates) {
      if (rates_[a] < best) {
        best = rates_[a];
        tied.clear();
      }
      if (rates_[a] == best) tied.push_back(a);
    }
    return tied[rng_.index(tied.size())];
  }

  bool carries(AuthorIndex a, std::size_t m) const { return carried_[a].contains(m); }

  std::size_t new_macro(const std::string& paper) {
    const std::size_t id = macros_.size();
    MacroState s;
    if (e_.macro_appeal > 0.0) {
      s.planted.high_tier = rng_.bernoulli(0.5);
      s.planted.appeal = s.planted.high_tier ? 1.0 : 1.0 - 0.8 * e_.macro_appeal;
      const bool match_tier = rng_.bernoulli(0.5 + 0.5 * e_.macro_appeal);
      s.planted.body = make_body(id, match_tier ? s.planted.high_tier : !s.planted.high_tier);
    } else {
      s.planted.body = make_body(id, rng_.bernoulli(0.5));
    }
    s.planted.inventing_paper = paper;
    for (char v = 'a'; v <= 'e'; ++v) s.names.push_back(fmt::format("w{}{}", id, v));
    macros_.push_back(std::move(s));
    return id;
  }

  // The writer keeps or renames its current name for the macro; the whole
  // team then adopts the paper's name.
  std::string paper_name(std::size_t m, AuthorIndex writer, const std::vector<AuthorIndex>& team) {
    const auto& names = macros_[m].names;
    const std::uint64_t key = (std::uint64_t{writer} << 32) | m;
    auto it = current_name_.find(key);
    std::size_t name = it == current_name_.end() ? rng_.index(names.size()) : it->second;
    const double rate = rates_[writer] * std::pow(c_.name_change_decay, static_cast<double>(papers_written_[writer]));
    if (it != current_name_.end() && rng_.bernoulli(rate)) name = (name + 1 + rng_.index(names.size() - 1)) % names.size();
    for (AuthorIndex a : team) current_name_[(std::uint64_t{a} << 32) | m] = name;
    return names[name];
  }

  Paper make_paper(std::size_t i) {
    const int month = static_cast<int>(i * static_cast<std::size_t>(c_.months_span) / c_.n_papers);
    Paper p;
    p.id = fmt::format("p{:06d}", i);
    p.date = Month::from_index(c_.start.index() + month);
    std::vector<AuthorIndex> team = make_team(month);
    for (AuthorIndex a : team) p.authors.push_back(ids_[a]);

    // Carried macros in ascending id order, each with its carriers in team order.
    std::map<std::size_t, std::vector<AuthorIndex>> carried;
    for (AuthorIndex a : team)
      for (std::size_t m : carried_[a]) carried[m].push_back(a);

    std::vector<std::pair<std::size_t, AuthorIndex>> used;  // (macro, writer)
    std::vector<std::pair<std::size_t, std::vector<AuthorIndex>>> learned;
    for (const auto& [m, carriers] : carried) {
      const double p_stamp =
          1.0 - std::pow(1.0 - c_.transmission_probability * macros_[m].planted.appeal, static_cast<double>(carriers.size()));
      if (!rng_.bernoulli(p_stamp)) continue;
      used.emplace_back(m, writer(carriers));
      std::vector<AuthorIndex> learners;
      for (AuthorIndex a : team)
        if (!carries(a, m)) learners.push_back(a);
      for (AuthorIndex t : carriers)
        for (AuthorIndex l : learners) {
          const auto& origin = origin_.at((std::uint64_t{t} << 32) | m);
          truth_.transmissions.push_back({m, ids_[t], ids_[l], p.id, origin.first, origin.second});
        }
      learned.emplace_back(m, std::move(learners));
    }

    if (!macros_.empty() && rng_.bernoulli(c_.independent_invention_rate)) {
      for (int attempt = 0; attempt < 20; ++attempt) {
        std::size_t m = rng_.index(macros_.size());
        if (carried.contains(m)) continue;
        macros_[m].planted.independent_papers.push_back(p.id);
        used.emplace_back(m, writer(team));
        learned.emplace_back(m, team);
        for (AuthorIndex a : team) origin_[(std::uint64_t{a} << 32) | m] = {p.id, true};
        break;
      }
    }

    if (rng_.bernoulli(c_.invention_rate)) {
      std::size_t m = new_macro(p.id);
      used.emplace_back(m, writer(team));
      learned.emplace_back(m, team);
      for (AuthorIndex a : team) origin_[(std::uint64_t{a} << 32) | m] = {p.id, true};
    }

    for (auto& [m, writer] : used) p.macro_uses.push_back({paper_name(m, writer, team), macros_[m].planted.body});
    for (auto& [m, learners] : learned)
      for (AuthorIndex l : learners) {
        carried_[l].insert(m);
        origin_.try_emplace((std::uint64_t{l} << 32) | m, p.id, false);
      }
    for (AuthorIndex a : team) {
      ++papers_written_[a];
      for (AuthorIndex b : team)
        if (a != b && std::find(collaborators_[a].begin(), collaborators_[a].end(), b) == collaborators_[a].end())
          collaborators_[a].push_back(b);
    }
    return p;
  }

  void add_follow_ups(std::vector<Paper>& papers) {
    // Internal transmission: the learner teaches the same macro later on.
    std::unordered_set<std::uint64_t> teaches;
    std::unordered_map<std::string, AuthorIndex> index;
    for (std::size_t a = 0; a < ids_.size(); ++a) index.emplace(ids_[a].str(), static_cast<AuthorIndex>(a));
    for (const auto& t : truth_.transmissions) teaches.insert((std::uint64_t{index.at(t.teacher.str())} << 32) | t.macro);
    std::unordered_map<std::string, std::unordered_set<std::uint64_t>> internal_at;  // paper -> pair keys
    for (const auto& t : truth_.transmissions) {
      AuthorIndex a = index.at(t.teacher.str()), b = index.at(t.learner.str());
      if (!teaches.contains((std::uint64_t{b} << 32) | t.macro)) continue;
      internal_at[t.paper].insert((std::uint64_t{std::min(a, b)} << 32) | std::max(a, b));
    }

    std::unordered_set<std::uint64_t> seen;
    const std::size_t n = papers.size();
    const int last = c_.start.index() + c_.months_span - 1;
    std::size_t serial = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<AuthorIndex> team;
      for (const auto& a : papers[i].authors) team.push_back(index.at(a.str()));
      std::sort(team.begin(), team.end());
      for (std::size_t x = 0; x < team.size(); ++x)
        for (std::size_t y = x + 1; y < team.size(); ++y) {
          const std::uint64_t key = (std::uint64_t{team[x]} << 32) | team[y];
          if (!seen.insert(key).second) continue;
          PlantedPair pair{ids_[team[x]], ids_[team[y]], papers[i].id, false, 0};
          auto it = internal_at.find(papers[i].id);
          pair.internal = it != internal_at.end() && it->second.contains(key);
          const double lambda = e_.collab_base + (pair.internal ? e_.collab_boost : 0.0);
          pair.follow_ups = static_cast<std::size_t>(rng_.poisson(lambda));
          const int first = papers[i].date.index();
          for (std::size_t f = 0; f < pair.follow_ups; ++f) {
            Paper q;
            q.id = fmt::format("f{:06d}", serial++);
            q.date = Month::from_index(std::min(last, first + 1 + rng_.between(0, 23)));
            if (q.date.index() <= first) q.date = Month::from_index(first + 1);
            q.authors = {pair.u, pair.v};
            papers.push_back(std::move(q));
          }
          truth_.pairs.push_back(std::move(pair));
        }
    }
  }

  const SynthConfig& c_;
  FitnessEffects e_;
  Rng rng_;
  GroundTruth truth_;
  std::vector<AuthorId> ids_;
  std::vector<double> weights_;
  std::vector<int> centers_;
  std::vector<double> rates_;
  std::vector<std::vector<AuthorIndex>> pools_;
  std::vector<std::vector<double>> cumulative_;
  std::vector<std::set<std::size_t>> carried_;
  std::vector<std::vector<AuthorIndex>> collaborators_;
  std::vector<std::size_t> papers_written_;
  std::vector<MacroState> macros_;
  std::unordered_map<std::uint64_t, std::size_t> current_name_;
  std::unordered_map<std::uint64_t, std::pair<std::string, bool>> origin_;  // first use per (author, macro)
};

}  // namespace

SynthResult generate(const SynthConfig& config) { return Simulator(config, FitnessEffects{}).run(false); }

SynthResult plant_fitness_bias(const SynthConfig& config, const FitnessEffects& effects) {
  return Simulator(config, effects).run(true);
}

nlohmann::ordered_json config_to_json(const SynthConfig& c) {
  nlohmann::ordered_json j;
  j["n_authors"] = c.n_authors;
  j["n_papers"] = c.n_papers;
  j["start"] = c.start.str();
  j["months_span"] = c.months_span;
  j["team_min"] = c.team_min;
  j["team_max"] = c.team_max;
  j["team_shape"] = c.team_shape;
  j["activity_exponent"] = c.activity_exponent;
  j["career_months"] = c.career_months;
  j["repeat_collaborator"] = c.repeat_collaborator;
  j["invention_rate"] = c.invention_rate;
  j["transmission_probability"] = c.transmission_probability;
  j["independent_invention_rate"] = c.independent_invention_rate;
  j["name_change_rate"] = c.name_change_rate;
  j["name_change_decay"] = c.name_change_decay;
  j["seed"] = c.seed;
  return j;
}

nlohmann::ordered_json truth_to_json(const GroundTruth& truth, const SynthConfig& config) {
  nlohmann::ordered_json j;
  j["config"] = config_to_json(config);
  j["effects"] = {{"collab_base", truth.effects.collab_base},
                  {"collab_boost", truth.effects.collab_boost},
                  {"loyalty", truth.effects.loyalty},
                  {"macro_appeal", truth.effects.macro_appeal}};
  auto& macros = j["macros"] = nlohmann::ordered_json::array();
  for (const auto& m : truth.macros)
    macros.push_back({{"body", m.body},
                      {"inventing_paper", m.inventing_paper},
                      {"independent_papers", m.independent_papers},
                      {"tier", m.high_tier ? "high" : "low"},
                      {"appeal", m.appeal}});
  auto& events = j["transmissions"] = nlohmann::ordered_json::array();
  for (const auto& t : truth.transmissions)
    events.push_back({{"body", truth.macros.at(t.macro).body},
                      {"teacher", t.teacher.str()},
                      {"learner", t.learner.str()},
                      {"paper", t.paper},
                      {"teacher_origin", t.teacher_origin},
                      {"teacher_from_source", t.teacher_from_source}});
  auto& authors = j["authors"] = nlohmann::ordered_json::array();
  for (const auto& a : truth.authors)
    authors.push_back({{"author", a.id.str()},
                       {"weight", a.weight},
                       {"quantile", a.quantile},
                       {"name_change_rate", a.name_change_rate}});
  auto& pairs = j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& p : truth.pairs)
    pairs.push_back({{"u", p.u.str()},
                     {"v", p.v.str()},
                     {"first_paper", p.first_paper},
                     {"internal", p.internal},
                     {"follow_ups", p.follow_ups}});
  return j;
}

namespace {

using EdgeTuple = std::tuple<std::string, std::string, std::string, std::string>;  // origin, learner, paper, teacher

std::vector<EdgeTuple> planted_edges(const GroundTruth& truth, std::size_t macro) {
  std::vector<EdgeTuple> out;
  for (const auto& t : truth.transmissions) {
    if (t.macro != macro) continue;
    std::string origin = t.teacher_from_source ? "source:" + t.teacher_origin : "author:" + t.teacher.str();
    out.emplace_back(std::move(origin), t.learner.str(), t.paper, t.teacher.str());
  }
  return out;
}

std::vector<EdgeTuple> graph_edges(const InheritanceGraph& g) {
  std::vector<EdgeTuple> out;
  for (const auto& e : g.edges()) {
    const GraphNode& src = g.node(e.src);
    std::string origin = src.kind == NodeKind::source ? "source:" + src.paper : "author:" + src.author.str();
    out.emplace_back(std::move(origin), g.node(e.dst).author.str(), e.paper, e.src_author.str());
  }
  return out;
}

void diff(std::vector<EdgeTuple> want, std::vector<EdgeTuple> got, MismatchReport& r) {
  std::sort(want.begin(), want.end());
  std::sort(got.begin(), got.end());
  r.expected += want.size();
  r.found += got.size();
  std::vector<EdgeTuple> only;
  std::set_difference(want.begin(), want.end(), got.begin(), got.end(), std::back_inserter(only));
  r.missing += only.size();
  only.clear();
  std::set_difference(got.begin(), got.end(), want.begin(), want.end(), std::back_inserter(only));
  r.extra += only.size();
}

}  // namespace

MismatchReport edge_mismatches(const InheritanceGraph& graph, const GroundTruth& truth) {
  MismatchReport r;
  const std::string& body = graph.macro().body();
  auto it = std::find_if(truth.macros.begin(), truth.macros.end(), [&](const PlantedMacro& m) { return m.body == body; });
  std::vector<EdgeTuple> want;
  if (it != truth.macros.end()) want = planted_edges(truth, static_cast<std::size_t>(it - truth.macros.begin()));
  diff(std::move(want), graph_edges(graph), r);
  return r;
}

MismatchReport edge_mismatches(std::span<const InheritanceGraph> graphs, const GroundTruth& truth) {
  MismatchReport r;
  std::unordered_map<std::string, std::size_t> by_body;
  for (std::size_t m = 0; m < truth.macros.size(); ++m) by_body.emplace(truth.macros[m].body, m);
  std::vector<std::vector<EdgeTuple>> want(truth.macros.size());
  for (const auto& t : truth.transmissions) {
    std::string origin = t.teacher_from_source ? "source:" + t.teacher_origin : "author:" + t.teacher.str();
    want[t.macro].emplace_back(std::move(origin), t.learner.str(), t.paper, t.teacher.str());
  }
  std::vector<char> covered(truth.macros.size(), 0);
  for (const auto& g : graphs) {
    auto it = by_body.find(g.macro().body());
    if (it == by_body.end()) {
      diff({}, graph_edges(g), r);
      continue;
    }
    covered[it->second] = 1;
    diff(want[it->second], graph_edges(g), r);
  }
  for (std::size_t m = 0; m < want.size(); ++m)
    if (!covered[m]) diff(std::move(want[m]), {}, r);
  return r;
}

}  // namespace macroflow
