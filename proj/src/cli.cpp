#include "macroflow/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "macroflow/corpus.hpp"
#include "macroflow/error.hpp"
#include "macroflow/fitness_author.hpp"
#include "macroflow/fitness_collab.hpp"
#include "macroflow/fitness_macro.hpp"
#include "macroflow/graph_stats.hpp"
#include "macroflow/inheritance.hpp"
#include "macroflow/macro_extract.hpp"
#include "macroflow/random.hpp"
#include "macroflow/synth.hpp"

namespace macroflow::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

class MismatchError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string corpus;
  std::string out = ".";
  bool raw = false;
  std::size_t min_body_len = 20;
  std::size_t min_authors = 30;
  std::uint64_t seed = 1;
  std::size_t repeats = 1;
  unsigned jobs = 1;
  std::vector<std::size_t> theta{10, 20, 30};
  std::vector<std::size_t> k{10, 20};
  std::vector<std::string> features;
  std::string width_stat = "median";
  bool permute = false;
  bool plant = false;
  SynthConfig synth;
  FitnessEffects effects;
};

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string num(double v) { return fmt::format("{}", v); }

class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
    if (!out_) throw Error(fmt::format("cannot write '{}'", path.string()));
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << csv_field(cells[i]);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

fs::path out_dir(const Options& o) {
  fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(fmt::format("cannot create output directory '{}': {}", o.out, ec.message()));
  return dir;
}

Corpus load(const Options& o) {
  if (o.corpus.empty()) throw UsageError("--corpus is required");
  return load_corpus(o.corpus, o.raw ? LoadMode::raw_latex : LoadMode::pre_extracted);
}

std::string macro_id(MacroIndex m) { return fmt::format("m{:05d}", m); }

std::vector<MacroIndex> tracked(const Corpus& corpus, const Options& o) {
  std::vector<MacroIndex> out;
  for (const MacroKey& key : trackable_macros(corpus, {o.min_body_len, o.min_authors}))
    out.push_back(corpus.macro_index(key));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<InheritanceGraph> tracked_graphs(const Corpus& corpus, const Options& o, std::vector<MacroIndex>& ids) {
  ids = tracked(corpus, o);
  return build_all_graphs(corpus, ids, o.jobs);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

// extract: one row per distinct body.
int cmd_extract(const Options& o, std::ostream& out) {
  LoadReport report;
  if (o.corpus.empty()) throw UsageError("--corpus is required");
  Corpus corpus = load_corpus(o.corpus, o.raw ? LoadMode::raw_latex : LoadMode::pre_extracted, &report);
  const auto keep = trackable_macros(corpus, {o.min_body_len, o.min_authors});
  CsvFile csv(out_dir(o) / "macros.csv",
              {"macro_id", "body", "length", "distinct_users", "papers", "first_paper", "first_date", "trackable"});
  for (MacroIndex m = 0; m < corpus.macros().size(); ++m) {
    const MacroKey& key = corpus.macro(m);
    auto occ = corpus.occurrences(m);
    const Paper& first = corpus.paper(occ.front().paper);
    csv.row({macro_id(m), key.body(), std::to_string(key.length()), std::to_string(corpus.distinct_users(m)),
             std::to_string(occ.size()), first.id, first.date.str(), keep.contains(key) ? "1" : "0"});
  }
  out << fmt::format("{} papers, {} bodies, {} trackable", corpus.size(), corpus.macros().size(), keep.size());
  if (o.raw)
    out << fmt::format(", {} unbalanced and {} malformed definitions skipped", report.unbalanced_definitions,
                       report.malformed_definitions);
  out << '\n';
  return ok;
}

int cmd_build_graphs(const Options& o, std::ostream& out) {
  Corpus corpus = load(o);
  std::vector<MacroIndex> ids;
  auto graphs = tracked_graphs(corpus, o, ids);
  const fs::path dir = out_dir(o);
  fs::create_directories(dir / "graphs");
  CsvFile csv(dir / "graphs_summary.csv", {"macro_id", "body", "nodes", "author_nodes", "sources", "edges",
                                           "internal_edges", "terminal_edges", "largest_reachable_fraction",
                                           "max_depth"});
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const InheritanceGraph& g = graphs[i];
    write_text(dir / "graphs" / (macro_id(ids[i]) + ".json"), graph_to_json(g).dump(1) + "\n");
    std::size_t internal = 0;
    for (const auto& e : g.edges()) internal += e.kind == EdgeKind::internal;
    const NodeId seed = find_seed(g);
    csv.row({macro_id(ids[i]), g.macro().body(), std::to_string(g.nodes().size()),
             std::to_string(g.author_node_count()), std::to_string(g.sources().size()),
             std::to_string(g.edges().size()), std::to_string(internal),
             std::to_string(g.edges().size() - internal), num(largest_reachable_fraction(g)),
             std::to_string(bfs_tree(g, seed).max_depth)});
  }
  out << fmt::format("{} graphs written to {}\n", graphs.size(), (dir / "graphs").string());
  return ok;
}

int cmd_stats(const Options& o, std::ostream& out) {
  Corpus corpus = load(o);
  std::vector<MacroIndex> ids;
  auto graphs = tracked_graphs(corpus, o, ids);
  if (graphs.empty()) throw EmptyInputError("no graphs: no macro passes the tracking filters");
  const WidthStatistic stat = o.width_stat == "mean" ? WidthStatistic::mean : WidthStatistic::median;
  const fs::path dir = out_dir(o);

  std::vector<double> fractions;
  for (const auto& g : graphs) fractions.push_back(largest_reachable_fraction(g));
  CdfSeries reach = cdf(fractions);
  CsvFile reach_csv(dir / "cdf.csv", {"largest_reachable_fraction", "cdf"});
  for (std::size_t i = 0; i < reach.values.size(); ++i) reach_csv.row({num(reach.values[i]), num(reach.fractions[i])});

  auto diffs = experience_differences(graphs, corpus);
  CsvFile exp_csv(dir / "experience_cdf.csv", {"experience_difference", "cdf"});
  if (!diffs.empty()) {
    CdfSeries exp = cdf(diffs);
    for (std::size_t i = 0; i < exp.values.size(); ++i) exp_csv.row({num(exp.values[i]), num(exp.fractions[i])});
  }

  CsvFile depth_csv(dir / "depth_profile.csv", {"group", "trees", "depth", "mean_months", "width_stat"});
  for (const DepthProfile& p : depth_profile(graphs, stat))
    for (std::size_t d = 0; d < p.mean_months.size(); ++d)
      depth_csv.row({std::to_string(p.group), std::to_string(p.trees), std::to_string(d), num(p.mean_months[d]),
                     num(p.width[d])});

  std::ofstream trees(dir / "bfs_trees.jsonl", std::ios::binary);
  if (!trees) throw Error("cannot write bfs_trees.jsonl");
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const InheritanceGraph& g = graphs[i];
    const NodeId seed = find_seed(g);
    BfsTree tree = bfs_tree(g, seed);
    nlohmann::ordered_json j;
    j["macro_id"] = macro_id(ids[i]);
    j["seed"] = seed;
    j["seed_paper"] = g.node(seed).paper;
    j["max_depth"] = tree.max_depth;
    auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
    for (NodeId n : tree.order) {
      nlohmann::ordered_json node{{"node", n}, {"depth", tree.depth[n]}};
      node["parent_edge"] = tree.parent[n] ? nlohmann::ordered_json(*tree.parent[n]) : nlohmann::ordered_json();
      nodes.push_back(std::move(node));
    }
    trees << j.dump() << '\n';
  }
  out << fmt::format("{} graphs, {} edges summarized\n", graphs.size(), diffs.size());
  return ok;
}

int cmd_collab(const Options& o, std::ostream& out, std::ostream& err) {
  Corpus corpus = load(o);
  std::vector<MacroIndex> ids;
  auto graphs = tracked_graphs(corpus, o, ids);
  auto pairs = enumerate_first_collaborations(corpus, graphs);
  if (o.permute) pairs = permute_edge_classes(std::move(pairs), o.seed);
  const fs::path dir = out_dir(o);
  CsvFile csv(dir / "collab_fitness.csv",
              {"setting", "bin_start_year", "n_pairs", "wins", "ties", "win_percentage"});
  std::size_t done = 0;
  std::string last_error;
  for (Setting s : {Setting::internal_vs_nonedge, Setting::internal_vs_terminal, Setting::terminal_vs_nonedge,
                    Setting::edge_vs_nonedge}) {
    try {
      MatchedComparison r = match_and_compare(pairs, s, o.seed);
      std::size_t wins = 0, ties = 0;
      for (const BinResult& b : r.bins) {
        csv.row({to_string(s), std::to_string(b.bin_start_year), std::to_string(b.n_pairs), std::to_string(b.wins),
                 std::to_string(b.ties), num(b.win_percentage)});
        wins += b.wins;
        ties += b.ties;
      }
      csv.row({to_string(s), "all", std::to_string(r.matched), std::to_string(wins), std::to_string(ties),
               num(r.win_percentage)});
      out << fmt::format("{}: {} matched, {} dropped, win {:.2f}%\n", to_string(s), r.matched, r.dropped_treatments,
                         r.win_percentage);
      ++done;
    } catch (const EmptyInputError& e) {
      err << "warning: " << e.what() << '\n';
      last_error = e.what();
    }
  }
  if (done == 0) throw EmptyInputError(last_error.empty() ? "no collaboration pairs" : last_error);
  return ok;
}

std::vector<AuthorFeature> author_features(const Options& o) {
  std::vector<AuthorFeature> out;
  if (o.features.empty())
    return {AuthorFeature::name_change_rate, AuthorFeature::coauthor_count, AuthorFeature::total_macro_uses,
            AuthorFeature::distinct_bodies};
  for (const auto& f : o.features) out.push_back(parse_author_feature(f));
  return out;
}

int cmd_author(const Options& o, std::ostream& out, std::ostream& err) {
  Corpus corpus = load(o);
  const auto features = author_features(o);
  const fs::path dir = out_dir(o);
  CsvFile curves(dir / "name_change_curves.csv", {"theta", "macro_set", "life", "x", "f", "events"});
  CsvFile results(dir / "author_fitness.csv", {"theta", "feature", "seed", "accuracy", "n_low", "n_high"});
  CsvFile thresholds(dir / "thresholds.csv", {"theta", "p20", "p80", "eligible"});
  std::size_t done = 0;
  std::string last_error;
  auto attempt = [&](auto&& fn) {
    try {
      fn();
      ++done;
    } catch (const EmptyInputError& e) {
      err << "warning: " << e.what() << '\n';
      last_error = e.what();
    }
  };
  for (std::size_t theta : o.theta) {
    for (MacroSet set : {MacroSet::all, MacroSet::wide_spread, MacroSet::narrow_spread})
      for (LifeStage life : {LifeStage::full, LifeStage::early})
        attempt([&] {
          NameChangeCurve c = name_change_curve(corpus, theta, set, life, o.jobs);
          for (const CurvePoint& p : c.points)
            curves.row({std::to_string(theta), to_string(set), to_string(life), std::to_string(p.x),
                        p.f ? num(*p.f) : "", std::to_string(p.events)});
        });
    attempt([&] {
      FitnessClassTask task = build_fitness_classes(corpus, theta);
      thresholds.row({std::to_string(theta), std::to_string(task.thresholds.p20), std::to_string(task.thresholds.p80),
                      std::to_string(task.thresholds.eligible)});
      for (AuthorFeature f : features)
        for (std::size_t r = 0; r < o.repeats; ++r) {
          const std::uint64_t seed = o.seed + r;
          AuthorPrediction p = predict_author_fitness(corpus, task, f, seed);
          results.row({std::to_string(theta), to_string(f), std::to_string(seed), num(p.accuracy),
                       std::to_string(p.n_low), std::to_string(p.n_high)});
          out << fmt::format("theta {} {} seed {}: accuracy {:.3f} ({} low, {} high)\n", theta, to_string(f), seed,
                             p.accuracy, p.n_low, p.n_high);
        }
    });
  }
  if (done == 0) throw EmptyInputError(last_error);
  return ok;
}

int cmd_macro(const Options& o, std::ostream& out, std::ostream& err) {
  Corpus corpus = load(o);
  std::vector<FeatureSubset> subsets;
  if (o.features.empty())
    subsets = {FeatureSubset::all, FeatureSubset::speed, FeatureSubset::non_speed, FeatureSubset::body,
               FeatureSubset::structural};
  for (const auto& f : o.features) subsets.push_back(parse_feature_subset(f));
  std::vector<MacroIndex> candidates;
  for (MacroIndex m = 0; m < corpus.macros().size(); ++m)
    if (corpus.macro(m).length() > o.min_body_len) candidates.push_back(m);

  const fs::path dir = out_dir(o);
  CsvFile results(dir / "macro_fitness.csv", {"k", "feature_subset", "seed", "accuracy", "n_instances"});
  CsvFile sigma_csv(dir / "sigma_table.csv", {"k", "sigma", "instances"});
  std::vector<std::string> header{"k", "macro_id", "fitness", "label"};
  for (auto name : macro_feature_names) header.emplace_back(name);
  CsvFile dump(dir / "macro_features.csv", header);
  std::size_t done = 0;
  std::string last_error;
  for (std::size_t k : o.k) {
    try {
      MacroTask task = build_macro_task(corpus, candidates, k, o.jobs);
      sigma_csv.row({std::to_string(k), std::to_string(task.sigma), std::to_string(task.macros.size())});
      for (std::size_t i = 0; i < task.macros.size(); ++i) {
        std::vector<std::string> row{std::to_string(k), macro_id(task.macros[i]),
                                     std::to_string(corpus.distinct_users(task.macros[i])),
                                     std::to_string(task.labels[i])};
        for (double v : task.features[i].values()) row.push_back(num(v));
        dump.row(row);
      }
      for (FeatureSubset s : subsets)
        for (std::size_t r = 0; r < o.repeats; ++r) {
          const std::uint64_t seed = o.seed + r;
          MacroPrediction p = train_predict(task, s, seed);
          results.row({std::to_string(k), to_string(s), std::to_string(seed), num(p.accuracy),
                       std::to_string(p.n_instances)});
          out << fmt::format("k {} {} seed {}: accuracy {:.3f} over {} macros (sigma {})\n", k, to_string(s), seed,
                             p.accuracy, p.n_instances, task.sigma);
        }
      ++done;
    } catch (const EmptyInputError& e) {
      err << "warning: " << e.what() << '\n';
      last_error = e.what();
    }
  }
  if (done == 0) throw EmptyInputError(last_error);
  return ok;
}

SynthResult synthesize(const Options& o) {
  SynthConfig c = o.synth;
  c.seed = o.seed;
  return o.plant ? plant_fitness_bias(c, o.effects) : generate(c);
}

int cmd_synth(const Options& o, std::ostream& out) {
  SynthResult r = synthesize(o);
  const fs::path dir = out_dir(o);
  std::ostringstream corpus;
  write_corpus(corpus, r.corpus);
  write_text(dir / "corpus.jsonl", corpus.str());
  SynthConfig c = o.synth;
  c.seed = o.seed;
  write_text(dir / "ground_truth.json", truth_to_json(r.truth, c).dump(1) + "\n");
  out << fmt::format("{} papers, {} authors, {} macros, {} planted transmissions\n", r.corpus.size(),
                     r.corpus.authors().size(), r.corpus.macros().size(), r.truth.transmissions.size());
  return ok;
}

int cmd_verify(const Options& o, std::ostream& out) {
  SynthResult r = synthesize(o);
  std::vector<MacroIndex> all(r.corpus.macros().size());
  for (MacroIndex m = 0; m < all.size(); ++m) all[m] = m;
  auto graphs = build_all_graphs(r.corpus, all, o.jobs);
  MismatchReport report = edge_mismatches(graphs, r.truth);
  std::size_t violations = 0;
  std::string first_violation;
  for (const auto& g : graphs) {
    auto problems = check_invariants(g);
    if (!problems.empty() && first_violation.empty()) first_violation = g.macro().body() + ": " + problems.front();
    violations += problems.size();
  }
  out << fmt::format("{} graphs, {} planted edges, {} reconstructed edges\n", graphs.size(), report.expected,
                     report.found);
  out << fmt::format("{} mismatched edges ({} missing, {} extra)\n", report.total(), report.missing, report.extra);
  out << fmt::format("{} invariant violations\n", violations);
  if (!o.out.empty() && o.out != ".") {
    nlohmann::ordered_json j{{"graphs", graphs.size()},           {"planted_edges", report.expected},
                             {"reconstructed_edges", report.found}, {"missing", report.missing},
                             {"extra", report.extra},             {"invariant_violations", violations}};
    write_text(out_dir(o) / "verify_report.json", j.dump(1) + "\n");
  }
  if (report.total() > 0)
    throw MismatchError(fmt::format("{} mismatched edges ({} missing, {} extra)", report.total(), report.missing,
                                    report.extra));
  if (violations > 0) throw MismatchError(fmt::format("{} invariant violations; first: {}", violations, first_violation));
  return ok;
}

std::string quoted(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out;
}

int report_error(std::ostream& err, Status status, std::string_view code, std::string_view message) {
  err << fmt::format("error: code={} message=\"{}\"\n", code, quoted(message));
  return status;
}

void add_common(CLI::App* sub, Options& o, bool needs_corpus) {
  if (needs_corpus) {
    sub->add_option("--corpus", o.corpus, "Corpus in JSON Lines form")->required();
    sub->add_flag("--raw", o.raw, "Corpus records carry LaTeX source instead of extracted macros");
  }
  sub->add_option("--out", o.out, "Output directory")->capture_default_str();
  sub->add_option("--jobs", o.jobs, "Worker threads")->envname("MACROFLOW_JOBS")->check(CLI::Range(1u, 1024u));
  sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
}

void add_filters(CLI::App* sub, Options& o) {
  sub->add_option("--min-body-len", o.min_body_len, "Track bodies longer than this")->capture_default_str();
  sub->add_option("--min-authors", o.min_authors, "Track bodies with at least this many users")->capture_default_str();
}

void add_synth(CLI::App* sub, Options& o) {
  SynthConfig& c = o.synth;
  sub->add_option("--authors", c.n_authors, "Author pool size")->capture_default_str();
  sub->add_option("--papers", c.n_papers, "Papers to generate")->capture_default_str();
  sub->add_option("--months", c.months_span, "Months spanned")->capture_default_str();
  sub->add_option("--team-min", c.team_min, "Smallest team")->capture_default_str();
  sub->add_option("--team-max", c.team_max, "Largest team")->capture_default_str();
  sub->add_option("--invention-rate", c.invention_rate, "New macros per paper")->capture_default_str();
  sub->add_option("--transmission", c.transmission_probability, "Stamp probability per carrier")
      ->capture_default_str();
  sub->add_option("--epsilon", c.independent_invention_rate, "Independent use rate")->capture_default_str();
  sub->add_option("--name-change-rate", c.name_change_rate, "Baseline rename rate")->capture_default_str();
  sub->add_flag("--plant", o.plant, "Add follow-up papers and planted fitness effects");
  sub->add_option("--collab-base", o.effects.collab_base, "Mean follow-ups per pair")->capture_default_str();
  sub->add_option("--collab-boost", o.effects.collab_boost, "Extra follow-ups for internal pairs")
      ->capture_default_str();
  sub->add_option("--loyalty", o.effects.loyalty, "Loyalty effect size")->capture_default_str();
  sub->add_option("--macro-appeal", o.effects.macro_appeal, "Macro appeal effect size")->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Macro inheritance analysis of LaTeX corpora", "macroflow"};
  app.require_subcommand(1, 1);

  auto* extract = app.add_subcommand("extract", "Write the macro inventory");
  add_common(extract, o, true);
  add_filters(extract, o);

  auto* build = app.add_subcommand("build-graphs", "Build inheritance graphs for trackable macros");
  add_common(build, o, true);
  add_filters(build, o);

  auto* stats = app.add_subcommand("stats", "Reachability and experience CDFs, depth profiles, BFS trees");
  add_common(stats, o, true);
  add_filters(stats, o);
  stats->add_option("--width-stat", o.width_stat, "Width statistic")
      ->check(CLI::IsMember({"median", "mean"}))
      ->capture_default_str();

  auto* collab = app.add_subcommand("collab-fitness", "Matched comparison of collaboration longevity");
  add_common(collab, o, true);
  add_filters(collab, o);
  collab->add_flag("--permute", o.permute, "Shuffle edge classes within months first (null model)");

  auto* author = app.add_subcommand("author-fitness", "Name-change curves and author fitness prediction");
  add_common(author, o, true);
  author->add_option("--theta", o.theta, "Paper thresholds")->delimiter(',')->capture_default_str();
  author->add_option("--features", o.features, "Features: name-change-rate, coauthor-count, total-macro-uses, "
                                                "distinct-bodies")
      ->delimiter(',');
  author->add_option("--repeats", o.repeats, "Seeds per task, counting up from --seed")->capture_default_str();

  auto* macro = app.add_subcommand("macro-fitness", "Sigma table and macro fitness prediction");
  add_common(macro, o, true);
  macro->add_option("--min-body-len", o.min_body_len, "Use bodies longer than this")->capture_default_str();
  macro->add_option("--k", o.k, "Adopter thresholds")->delimiter(',')->capture_default_str();
  macro->add_option("--features", o.features, "Subsets: all, speed, non-speed, body, structural")->delimiter(',');
  macro->add_option("--repeats", o.repeats, "Seeds per task, counting up from --seed")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  add_common(synth, o, false);
  add_synth(synth, o);

  auto* verify = app.add_subcommand("verify", "Generate, reconstruct and diff against ground truth");
  add_common(verify, o, false);
  add_synth(verify, o);
  verify->get_option("--out")->default_str("");
  o.out = "";

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    return report_error(err, usage_error, "usage", e.what());
  }
  if (o.out.empty() && !verify->parsed()) o.out = ".";

  try {
    if (extract->parsed()) return cmd_extract(o, out);
    if (build->parsed()) return cmd_build_graphs(o, out);
    if (stats->parsed()) return cmd_stats(o, out);
    if (collab->parsed()) return cmd_collab(o, out, err);
    if (author->parsed()) return cmd_author(o, out, err);
    if (macro->parsed()) return cmd_macro(o, out, err);
    if (synth->parsed()) return cmd_synth(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
  } catch (const UsageError& e) {
    return report_error(err, usage_error, "usage", e.what());
  } catch (const std::invalid_argument& e) {
    return report_error(err, usage_error, "usage", e.what());
  } catch (const CorpusError& e) {
    return report_error(err, corpus_error, "corpus", e.what());
  } catch (const EmptyInputError& e) {
    return report_error(err, empty_input, "empty-input", e.what());
  } catch (const MismatchError& e) {
    return report_error(err, mismatch, "mismatch", e.what());
  } catch (const std::exception& e) {
    return report_error(err, failure, "internal", e.what());
  }
  return report_error(err, usage_error, "usage", "no subcommand");
}

}  // namespace macroflow::cli
