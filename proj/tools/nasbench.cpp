// nasbench: command-line front end for the search-space library.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nasbench/nasbench.hpp"

namespace {

using namespace nasbench;

struct Common {
  std::string oracle = "synthetic:seed=1";
  std::string index;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out = "-";
};

void write_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path == "-") {
    fn(std::cout);
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing to standard output");
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  fn(f);
  f.close();
  if (!f) throw IoError("failed writing '" + path + "'");
}

std::shared_ptr<const SpaceIndex> load_index(const Common& c) {
  std::string path = c.index;
  if (path.empty()) {
    if (const char* env = std::getenv("NASBENCH_INDEX")) path = env;
  }
  if (path.empty()) throw ConfigError("no index given: pass --index or set NASBENCH_INDEX");
  return std::make_shared<const SpaceIndex>(read_index(path));
}

// "synthetic:seed=N[,locality=x][,ruggedness=y]" or "tabular:PATH".
std::unique_ptr<Oracle> load_oracle(const Common& c, std::shared_ptr<const SpaceIndex> index) {
  const std::string& sel = c.oracle;
  if (sel.rfind("tabular:", 0) == 0) {
    const std::string path = sel.substr(8);
    if (path.empty()) throw ConfigError("tabular oracle needs a path: tabular:<metrics.jsonl>");
    return load_tabular(std::move(index), path);
  }
  if (sel.rfind("synthetic:", 0) == 0) {
    std::uint64_t seed = 0;
    bool have_seed = false;
    SurrogateParams params;
    std::string rest = sel.substr(10);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const std::size_t comma = std::min(rest.find(',', pos), rest.size());
      const std::string item = rest.substr(pos, comma - pos);
      const std::size_t eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("bad oracle option '" + item + "' (expected key=value)");
      const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
      try {
        std::size_t used = 0;
        if (key == "seed") {
          seed = std::stoull(value, &used);
          have_seed = true;
        } else if (key == "locality") {
          params.locality = std::stod(value, &used);
        } else if (key == "ruggedness") {
          params.ruggedness = std::stod(value, &used);
        } else {
          throw ConfigError("unknown synthetic oracle option '" + key + "'");
        }
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::logic_error&) {
        throw ConfigError("bad value for oracle option '" + key + "': '" + value + "'");
      }
      pos = comma + 1;
    }
    if (!have_seed) throw ConfigError("synthetic oracle needs seed=<n>");
    return make_synthetic(std::move(index), seed, params);
  }
  throw ConfigError("oracle must be synthetic:seed=<n> or tabular:<path> (got '" + sel + "')");
}

void add_common(CLI::App* app, Common& c, bool oracle, bool index, bool seed) {
  if (oracle)
    app->add_option("--oracle", c.oracle,
                    "Metrics source: synthetic:seed=<n>[,locality=<x>][,ruggedness=<y>] or tabular:<metrics.jsonl>");
  if (index) app->add_option("--index", c.index, "Space index file (default: $NASBENCH_INDEX)");
  if (seed) app->add_option("--seed", c.seed, "Random seed");
  app->add_option("--jobs", c.jobs, "Worker threads; output does not depend on it")->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "Output file, - for standard output");
}

std::string one_line(std::string msg) {
  for (auto& ch : msg)
    if (ch == '\n') ch = ' ';
  return msg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell search-space enumeration, metrics queries, search benchmarks and landscape analyses."};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", "nasbench 1.0");
  Common c;
  std::function<void()> action;

  // enumerate
  int max_vertices = kMaxVertices, max_edges = kMaxEdges;
  auto* enumerate = app.add_subcommand("enumerate", "Enumerate canonical cells and write a space index");
  enumerate->add_option("--max-vertices", max_vertices, "Largest vertex count, input and output included")
      ->check(CLI::Range(2, kMaxVertices));
  enumerate->add_option("--max-edges", max_edges, "Largest edge count")->check(CLI::Range(0, kMaxEdges));
  add_common(enumerate, c, false, false, false);
  enumerate->callback([&] {
    action = [&] {
      const SpaceIndex index = enumerate_space(max_vertices, max_edges, c.jobs);
      write_output(c.out, [&](std::ostream& o) { write_index(index, o); });
      if (c.out != "-") std::cout << "count=" << index.size() << '\n';
    };
  });

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Structural histograms of a space index (JSON)");
  add_common(stats_cmd, c, false, true, false);
  stats_cmd->callback([&] {
    action = [&] {
      const auto index = load_index(c);
      const auto s = space_stats(*index);
      write_output(c.out, [&](std::ostream& o) { o << stats_to_json(*index, s).dump(2) << '\n'; });
    };
  });

  // query
  std::string spec_text;
  int epochs = kMaxEpochs;
  auto* query_cmd = app.add_subcommand("query", "Look up one evaluation record (JSON)");
  query_cmd->add_option("--spec", spec_text, "Cell as \"matrix=<row-major bits>;ops=<op,...>\"")->required();
  query_cmd->add_option("--epochs", epochs, "Epoch budget: 4, 12, 36 or 108");
  add_common(query_cmd, c, true, true, true);
  query_cmd->callback([&] {
    action = [&] {
      const ModelSpec spec = parse_spec(spec_text);
      require_budget(epochs);
      const auto oracle = load_oracle(c, load_index(c));
      Rng rng = Rng::stream(c.seed, "query");
      const auto r = query(*oracle, spec, epochs, rng);
      nlohmann::json j = record_to_json(r);
      j["mean_test_acc_108"] = mean_test_accuracy(*oracle, r.digest);
      write_output(c.out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
    };
  });

  // params
  SkeletonConfig skeleton;
  bool with_plan = false;
  auto* params_cmd = app.add_subcommand("params", "Trainable parameter count of the network built from a cell (JSON)");
  params_cmd->add_option("--spec", spec_text, "Cell as \"matrix=<row-major bits>;ops=<op,...>\"")->required();
  params_cmd->add_option("--stem-channels", skeleton.stem_channels, "Stem output channels");
  params_cmd->add_option("--stacks", skeleton.num_stacks, "Number of stacks");
  params_cmd->add_option("--cells-per-stack", skeleton.cells_per_stack, "Cells per stack");
  params_cmd->add_option("--classes", skeleton.num_classes, "Output classes");
  params_cmd->add_flag("--plan", with_plan, "Include the layer-by-layer plan");
  add_common(params_cmd, c, false, false, false);
  params_cmd->callback([&] {
    action = [&] {
      const ModelSpec spec = parse_spec(spec_text);
      const NetworkPlan plan = build_plan(spec, skeleton);
      const auto m = structural_metrics(spec);
      nlohmann::json j{{"spec", to_text(prune(spec))},
                       {"digest", canonical_hash(spec).hex()},
                       {"parameter_count", parameter_count(plan)},
                       {"depth", m.depth},
                       {"width", m.width}};
      if (with_plan) j["plan"] = plan_to_json(plan);
      write_output(c.out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
    };
  });

  // bench
  SearchConfig cfg;
  std::string algo = "re";
  int runs = 500, grid_points = 41;
  std::string ecdf_out, traces_dir;
  auto* bench = app.add_subcommand("bench", "Repeated search runs; writes the regret curve CSV");
  bench->add_option("--algo", algo, "Algorithm: rs, re, nre, reinforce or hb");
  bench->add_option("--budget", cfg.time_budget, "Simulated training-time budget per run (seconds)");
  bench->add_option("--runs", runs, "Independent runs")->check(CLI::PositiveNumber);
  bench->add_option("--ps", cfg.population_size, "Evolution population size");
  bench->add_option("--ts", cfg.tournament_size, "Evolution tournament size");
  bench->add_option("--lr", cfg.learning_rate, "REINFORCE learning rate");
  bench->add_option("--baseline-decay", cfg.baseline_decay, "REINFORCE reward-baseline decay");
  bench->add_option("--eta", cfg.eta, "Hyperband halving rate (only 3 is supported)");
  bench->add_option("--grid-points", grid_points, "Log-spaced time points over four decades up to the budget")
      ->check(CLI::Range(2, 100000));
  bench->add_option("--ecdf-out", ecdf_out, "Also write the final-regret ECDF CSV here");
  bench->add_option("--traces-dir", traces_dir, "Also write one trace CSV per run into this directory");
  add_common(bench, c, true, true, true);
  bench->callback([&] {
    action = [&] {
      cfg.algorithm = parse_algorithm(algo);
      cfg.seed = c.seed;
      cfg.validate();
      const auto oracle = load_oracle(c, load_index(c));
      const double best = best_cell(*oracle).mean_test_accuracy;
      const auto traces = repeat_runs(*oracle, cfg, runs, c.jobs);
      const auto grid = log_grid(cfg.time_budget, grid_points);
      const auto curve = regret_curve(traces, *oracle, grid, best);
      write_output(c.out, [&](std::ostream& o) { write_regret_csv(o, curve); });
      if (!ecdf_out.empty()) {
        const auto e = robustness_ecdf(traces, *oracle, cfg.time_budget, best);
        write_output(ecdf_out, [&](std::ostream& o) { write_ecdf_csv(o, e); });
      }
      if (!traces_dir.empty()) {
        std::filesystem::create_directories(traces_dir);
        for (std::size_t i = 0; i < traces.size(); ++i) {
          char name[32];
          std::snprintf(name, sizeof name, "run_%05zu.csv", i);
          write_output((std::filesystem::path(traces_dir) / name).string(),
                       [&](std::ostream& o) { write_trace_csv(o, traces[i], *oracle, best); });
        }
      }
    };
  });

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Landscape and dataset analyses (CSV)");
  analyze->require_subcommand(1);

  std::size_t walk = 100000;
  int max_lag = 40;
  auto* rwa_cmd = analyze->add_subcommand("rwa", "Random-walk autocorrelation: lag,sqrt_lag,autocorr");
  rwa_cmd->add_option("--walk", walk, "Walk length in steps");
  rwa_cmd->add_option("--max-lag", max_lag, "Largest lag")->check(CLI::PositiveNumber);
  add_common(rwa_cmd, c, true, true, true);
  rwa_cmd->callback([&] {
    action = [&] {
      const auto oracle = load_oracle(c, load_index(c));
      Rng rng = Rng::stream(c.seed, "rwa");
      const auto ac = rwa(*oracle, walk, max_lag, rng);
      write_output(c.out, [&](std::ostream& o) { write_rwa_csv(o, ac); });
    };
  });

  std::size_t samples = 10000;
  std::string peak_hex;
  auto* fdc_cmd = analyze->add_subcommand(
      "fdc", "Fitness-distance correlation against a peak: peak,samples,fdc then distance,cells,mean_valid_acc");
  fdc_cmd->add_option("--samples", samples, "Cells drawn uniformly from the index")->check(CLI::PositiveNumber);
  fdc_cmd->add_option("--peak", peak_hex, "Peak digest (default: best cell by mean test accuracy)");
  add_common(fdc_cmd, c, true, true, true);
  fdc_cmd->callback([&] {
    action = [&] {
      const auto oracle = load_oracle(c, load_index(c));
      Digest peak;
      if (peak_hex.empty()) {
        peak = best_cell(*oracle).digest;
      } else {
        const auto d = Digest::from_hex(peak_hex);
        if (!d) throw ConfigError("--peak must be a 32-character hex digest");
        peak = *d;
      }
      Rng rng = Rng::stream(c.seed, "fdc");
      std::vector<std::size_t> sample(samples);
      for (auto& i : sample) i = static_cast<std::size_t>(rng.below(oracle->index().size()));
      const auto r = fdc(*oracle, sample, peak);
      std::map<int, std::vector<double>> by_distance;
      for (std::size_t i = 0; i < r.distance.size(); ++i)
        by_distance[static_cast<int>(r.distance[i])].push_back(r.fitness[i]);
      write_output(c.out, [&](std::ostream& o) {
        o << "peak,samples,fdc\n" << peak.hex() << ',' << samples << ',' << format_real(r.fdc) << "\n\n";
        o << "distance,cells,mean_valid_acc\n";
        for (const auto& [d, f] : by_distance) o << d << ',' << f.size() << ',' << format_real(stats::mean(f)) << '\n';
      });
    };
  });

  auto* op_cmd = analyze->add_subcommand(
      "opmatrix", "Operation replacement effects: from,to,count,mean_acc_delta,mean_rel_time_delta");
  add_common(op_cmd, c, true, true, false);
  op_cmd->callback([&] {
    action = [&] {
      const auto oracle = load_oracle(c, load_index(c));
      const auto m = op_replacement_matrix(*oracle, c.jobs);
      write_output(c.out, [&](std::ostream& o) { write_opmatrix_csv(o, m); });
    };
  });

  auto* ecdf_cmd = analyze->add_subcommand(
      "ecdf", "Accuracy and inter-trial noise ECDFs: metric,value,cum_fraction (metric = train|valid|test|noise)");
  ecdf_cmd->add_option("--epochs", epochs, "Epoch budget: 4, 12, 36 or 108");
  add_common(ecdf_cmd, c, true, true, false);
  ecdf_cmd->callback([&] {
    action = [&] {
      require_budget(epochs);
      const auto oracle = load_oracle(c, load_index(c));
      const auto e = accuracy_ecdf(*oracle, epochs, c.jobs);
      write_output(c.out, [&](std::ostream& o) { write_accuracy_ecdf_csv(o, e); });
    };
  });

  int max_d = 10;
  std::size_t volume_samples = 1000000;
  std::string peaks_mode = "top";
  auto* volume_cmd = analyze->add_subcommand(
      "volume", "Fraction of raw encodings near the peak cells: distance,fraction,ci_half_width");
  volume_cmd->add_option("--max-d", max_d, "Largest distance")->check(CLI::Range(0, kEncodedPositions));
  volume_cmd->add_option("--samples", volume_samples, "Monte Carlo sample size")->check(CLI::PositiveNumber);
  volume_cmd->add_option("--peaks", peaks_mode,
                         "top: best cell plus cells within two standard errors of it; best: the best cell only")
      ->check(CLI::IsMember({"top", "best"}));
  add_common(volume_cmd, c, true, true, true);
  volume_cmd->callback([&] {
    action = [&] {
      const auto oracle = load_oracle(c, load_index(c));
      const std::vector<Digest> peaks =
          peaks_mode == "best" ? std::vector<Digest>{best_cell(*oracle).digest} : top_cells(*oracle, c.jobs);
      Rng rng = Rng::stream(c.seed, "volume");
      const auto v = volume_within_distance(oracle->index(), peaks, max_d, volume_samples, rng, c.jobs);
      write_output(c.out, [&](std::ostream& o) { write_volume_csv(o, v); });
    };
  });

  int budget_a = 36, budget_b = 108;
  double top_percent = 10.0;
  auto* rank_cmd = analyze->add_subcommand(
      "rankcorr", "Spearman correlation between budgets: budget_a,budget_b,top_percent,cells,spearman");
  rank_cmd->add_option("--budget-a", budget_a, "First epoch budget");
  rank_cmd->add_option("--budget-b", budget_b, "Budget used to select the top cells");
  rank_cmd->add_option("--top", top_percent, "Top percentage of cells kept")->check(CLI::Range(0.0, 100.0));
  add_common(rank_cmd, c, true, true, false);
  rank_cmd->callback([&] {
    action = [&] {
      const auto oracle = load_oracle(c, load_index(c));
      const auto r = budget_rank_correlation(*oracle, budget_a, budget_b, top_percent, c.jobs);
      write_output(c.out, [&](std::ostream& o) {
        o << "budget_a,budget_b,top_percent,cells,spearman\n"
          << budget_a << ',' << budget_b << ',' << format_real(top_percent) << ',' << r.cells << ','
          << format_real(r.rho) << '\n';
      });
    };
  });

  auto* dw_cmd = analyze->add_subcommand(
      "depthwidth", "Mean accuracy and training time by depth and width: group,key,cells,mean_valid_acc,mean_time_s");
  add_common(dw_cmd, c, true, true, false);
  dw_cmd->callback([&] {
    action = [&] {
      const auto oracle = load_oracle(c, load_index(c));
      const auto p = depth_width_profile(*oracle, c.jobs);
      write_output(c.out, [&](std::ostream& o) { write_depthwidth_csv(o, p); });
    };
  });

  // convert-metrics
  std::string metrics_in;
  auto* convert = app.add_subcommand(
      "convert-metrics",
      "Validate a JSON-lines metrics file against the index and write it normalized and sorted. Records may "
      "name the cell by \"spec\" (\"matrix=...;ops=...\") instead of \"digest\".");
  convert->add_option("--in", metrics_in, "Input metrics file")->required();
  add_common(convert, c, false, true, false);
  convert->callback([&] {
    action = [&] {
      const auto index = load_index(c);
      std::ifstream in(metrics_in, std::ios::binary);
      if (!in) throw IoError("cannot open metrics file '" + metrics_in + "'");
      std::vector<EvaluationRecord> records;
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = metrics_in + ":" + std::to_string(line_no);
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
          throw SchemaError(where + ": invalid JSON (" + e.what() + ")");
        }
        if (j.is_object() && j.contains("spec") && !j.contains("digest")) {
          if (!j["spec"].is_string()) throw SchemaError(where + ": spec must be a string");
          const ModelSpec spec = parse_spec(j["spec"].get<std::string>());
          if (!is_valid(spec)) throw SchemaError(where + ": spec is not a valid cell");
          j["digest"] = canonical_hash(spec).hex();
          j.erase("spec");
        }
        records.push_back(record_from_json(j, where));
      }
      const TabularOracle oracle(index, records);  // completeness check
      std::sort(records.begin(), records.end(), [](const EvaluationRecord& a, const EvaluationRecord& b) {
        return std::tie(a.digest, a.epochs, a.trial) < std::tie(b.digest, b.epochs, b.trial);
      });
      write_output(c.out, [&](std::ostream& o) {
        for (const auto& r : records) o << record_to_json(r).dump() << '\n';
      });
      std::cerr << "validated " << records.size() << " records for " << index->size() << " cells\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (action) action();
  } catch (const std::exception& e) {
    std::cerr << "nasbench: error: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}
