// Command-line front end: run, subpops, oracle, synth.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "dispex/errors.hpp"
#include "dispex/pipeline.hpp"
#include "dispex/report.hpp"
#include "dispex/synthkit.hpp"
#include "dispex/util.hpp"

namespace {

using namespace dispex;
using nlohmann::json;

// Every config field as an optional flag of the same name.
struct Overrides {
  std::string config;
  std::optional<std::string> dataset, dag, outcome, g1, g2, mode, selector, linkage;
  std::vector<std::string> attributes;  // NAME=KIND
  std::optional<double> sigma, tau, alpha;
  std::optional<std::size_t> k, num_clusters, max_rows, beam_width, max_treatment_predicates,
      min_arm, max_subpop_predicates;
  std::optional<int> bins, workers;
  std::optional<std::uint64_t> seed;
  std::optional<bool> exhaustive_treatments, force_brute_force;
  std::string format = "json";
  std::string output;
  bool timings_in_report = false;

  void attach(CLI::App* app, bool with_selector) {
    app->add_option("--config", config, "JSON config file");
    app->add_option("--dataset", dataset, "CSV dataset path");
    app->add_option("--dag", dag, "DAG edge-list path");
    app->add_option("--attribute", attributes, "NAME=KIND (immutable, mutable, outcome, auxiliary)");
    app->add_option("--outcome", outcome);
    app->add_option("--g1", g1, "pattern for group 1");
    app->add_option("--g2", g2, "pattern for group 2");
    app->add_option("--mode", mode, "g1_above, g1_below or reverse_of_global");
    app->add_option("--sigma", sigma);
    app->add_option("--tau", tau);
    app->add_option("--alpha", alpha);
    app->add_option("--k", k);
    app->add_option("--num_clusters", num_clusters);
    app->add_option("--max_rows", max_rows);
    app->add_option("--beam_width", beam_width);
    app->add_option("--max_treatment_predicates", max_treatment_predicates);
    app->add_option("--min_arm", min_arm);
    app->add_option("--max_subpop_predicates", max_subpop_predicates);
    app->add_option("--bins", bins);
    app->add_option("--workers", workers, "0 = available parallelism");
    app->add_option("--seed", seed);
    if (with_selector) app->add_option("--selector", selector, "greedy, brute_force or topk");
    app->add_option("--linkage", linkage, "single, complete or average");
    app->add_option("--exhaustive_treatments", exhaustive_treatments);
    app->add_option("--force_brute_force", force_brute_force);
    app->add_option("--format", format, "json or markdown");
    app->add_option("--output,-o", output, "write the report here instead of stdout");
  }

  PipelineConfig resolve() const {
    PipelineConfig c = config.empty() ? PipelineConfig{} : load_config(config);
    if (dataset) c.dataset = *dataset;
    if (dag) c.dag = *dag;
    for (const auto& a : attributes) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) throw InputError("--attribute expects NAME=KIND, got '" + a + "'");
      c.attributes[a.substr(0, eq)] = parse_attribute_kind(a.substr(eq + 1));
    }
    if (outcome) c.outcome = *outcome;
    if (g1) c.g1 = *g1;
    if (g2) c.g2 = *g2;
    if (mode) c.mode = parse_direction_mode(*mode);
    if (sigma) c.sigma = *sigma;
    if (tau) c.tau = *tau;
    if (alpha) c.alpha = *alpha;
    if (k) c.k = *k;
    if (num_clusters) c.num_clusters = *num_clusters;
    if (max_rows) c.max_rows = *max_rows;
    if (beam_width) c.beam_width = *beam_width;
    if (max_treatment_predicates) c.max_treatment_predicates = *max_treatment_predicates;
    if (min_arm) c.min_arm = *min_arm;
    if (max_subpop_predicates) c.max_subpop_predicates = *max_subpop_predicates;
    if (bins) c.bins = *bins;
    if (workers) c.workers = *workers;
    if (seed) c.seed = *seed;
    if (selector) c.selector = parse_selector(*selector);
    if (linkage) c.linkage = parse_linkage(*linkage);
    if (exhaustive_treatments) c.exhaustive_treatments = *exhaustive_treatments;
    if (force_brute_force) c.force_brute_force = *force_brute_force;
    c.validate();
    return c;
  }
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write '" + p.string() + "'");
  out << text;
}

std::string render(const ExplanationReport& r, const Overrides& o) {
  const auto fmt = parse_report_format(o.format);
  if (fmt == ReportFormat::Json) return render_json(r, o.timings_in_report);
  return render_markdown(r);
}

int cmd_run(const Overrides& o, bool oracle) {
  auto cfg = o.resolve();
  if (oracle) cfg.selector = SelectorKind::BruteForce;
  const auto report = run(cfg);
  for (const auto& t : report.timings) {
    std::cerr << "stage " << t.stage << ": " << format_double(t.seconds) << " s\n";
  }
  emit(render(report, o), o.output);
  return 0;
}

json subpop_json(const Subpopulation& s) {
  auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  return json{{"pattern", s.pattern.to_string()}, {"support", s.support},
              {"size_g1", s.size_g1()},           {"size_g2", s.size_g2()},
              {"avg_g1", num(s.avg_g1)},          {"avg_g2", num(s.avg_g2)}};
}

int cmd_subpops(const Overrides& o, const std::vector<double>& sweep) {
  auto cfg = o.resolve();
  if (cfg.dataset.empty()) throw InputError("dataset path is not set");
  SchemaConfig schema;
  schema.kinds = cfg.attributes;
  schema.kinds[cfg.outcome] = AttributeKind::Outcome;
  schema.bins = cfg.bins;
  const auto ds = load_csv(cfg.dataset, schema);

  json out;
  if (!sweep.empty()) {
    // Candidate count per sigma, for picking sigma at the elbow.
    out = json::array();
    for (double s : sweep) {
      auto c = cfg;
      c.sigma = s;
      const auto listing = list_subpopulations(ds, c);
      out.push_back(json{{"sigma", s},
                         {"mined", listing.mined.size()},
                         {"filtered", listing.filtered.size()}});
    }
  } else {
    const auto listing = list_subpopulations(ds, cfg);
    json mined = json::array(), filtered = json::array();
    for (const auto& s : listing.mined) mined.push_back(subpop_json(s));
    for (const auto& s : listing.filtered) filtered.push_back(subpop_json(s));
    out = json{{"sigma", cfg.sigma},
               {"global_avg_g1", listing.global_avg_g1},
               {"global_avg_g2", listing.global_avg_g2},
               {"mined", mined},
               {"filtered", filtered}};
  }
  emit(out.dump(2) + "\n", o.output);
  return 0;
}

int cmd_synth(const std::string& preset, std::size_t n, std::uint64_t seed,
              const std::string& out_dir) {
  synth::ScmSpec spec;
  if (preset == "planted") {
    spec = synth::planted_benchmark(n, seed);
  } else if (preset == "null") {
    spec = synth::null_model(n, seed);
  } else if (preset == "confounded") {
    spec = synth::confounded_single(n, seed, 5.0, 0.0);
  } else {
    throw InputError("unknown preset '" + preset + "' (planted, null, confounded)");
  }
  const auto data = synth::generate(spec);
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "data.csv", synth::to_csv(data.dataset));
  write_file(dir / "dag.txt", data.dag.serialize());

  json attrs = json::object();
  for (const auto& [name, kind] : synth::schema_config(spec).kinds) {
    attrs[name] = std::string(to_string(kind));
  }
  json cfg{{"dataset", "data.csv"}, {"dag", "dag.txt"},         {"attributes", attrs},
           {"outcome", spec.outcome_name}, {"g1", spec.g1.to_string()},
           {"g2", spec.g2.to_string()},    {"seed", seed}};
  write_file(dir / "config.json", cfg.dump(2) + "\n");

  json truth = json::array();
  for (const auto& t : data.truth) {
    truth.push_back(json{{"subpopulation", t.subpopulation.to_string()},
                         {"treatment", t.treatment.to_string()},
                         {"effect_g1", t.effect_g1},
                         {"effect_g2", t.effect_g2},
                         {"true_delta", t.true_delta}});
  }
  write_file(dir / "truth.json", truth.dump(2) + "\n");
  std::cerr << "wrote " << data.dataset.size() << " rows to " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine causal explanations for an outcome gap between two groups"};
  app.require_subcommand(1);

  Overrides run_o, subpop_o, oracle_o;
  auto* run_cmd = app.add_subcommand("run", "full pipeline");
  run_o.attach(run_cmd, true);
  run_cmd->add_flag("--timings", run_o.timings_in_report, "include stage timings in the JSON");

  auto* subpops_cmd = app.add_subcommand("subpops", "frequent subpopulations only");
  subpop_o.attach(subpops_cmd, false);
  std::vector<double> sweep;
  subpops_cmd->add_option("--sigma-sweep", sweep, "report candidate counts for these sigmas")
      ->delimiter(',');

  auto* oracle_cmd = app.add_subcommand("oracle", "full pipeline with the brute-force selector");
  oracle_o.attach(oracle_cmd, false);

  auto* synth_cmd = app.add_subcommand("synth", "emit a synthetic dataset");
  std::string preset = "planted", out_dir = "synth_out";
  std::size_t n = 10'000;
  std::uint64_t seed = 0;
  synth_cmd->add_option("--preset", preset, "planted, null or confounded");
  synth_cmd->add_option("--n", n);
  synth_cmd->add_option("--seed", seed);
  synth_cmd->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run_cmd) return cmd_run(run_o, false);
    if (*oracle_cmd) return cmd_run(oracle_o, true);
    if (*subpops_cmd) return cmd_subpops(subpop_o, sweep);
    if (*synth_cmd) return cmd_synth(preset, n, seed, out_dir);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.input_error() ? 1 : 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CombinatorialGuard& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
