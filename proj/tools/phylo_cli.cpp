#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "phylo/experiments.hpp"

using phylo::ConfigError;
using phylo::ExperimentConfig;
using phylo::ExperimentOutput;

namespace {

// Applied only when given on the command line: flags override --config, which overrides defaults.
struct Overrides {
  std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> list;

  template <class T, class Set>
  CLI::Option* add(CLI::App* app, const std::string& name, const std::string& help, Set set) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(name, *value, help);
    list.push_back({opt, [value, set](ExperimentConfig& c) { set(c, *value); }});
    return opt;
  }

  void apply(ExperimentConfig& c) const {
    for (const auto& [opt, set] : list)
      if (opt->count() > 0) set(c);
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  return f;
}

void emit(const ExperimentConfig& c, const ExperimentOutput& o) {
  if (!o.report.empty()) std::cerr << o.report;
  if (c.out.empty()) {
    phylo::write_csv(std::cout, o.points);
    if (!o.summary.rows.empty()) {
      std::cout << "\n";
      phylo::write_csv(std::cout, o.summary);
    }
    return;
  }
  {
    auto f = open_out(c.out);
    phylo::write_csv(f, o.points);
  }
  {
    auto f = open_out(c.out + ".summary.csv");
    phylo::write_csv(f, o.summary);
  }
  {
    phylo::Table timing{{"row", "seconds"}, {}};
    for (size_t i = 0; i < o.seconds.size(); ++i)
      timing.rows.push_back({std::to_string(i), phylo::format_number(o.seconds[i])});
    auto f = open_out(c.out + ".timing.csv");
    phylo::write_csv(f, timing);
  }
  if (o.battery) {
    auto f = open_out(c.out + ".battery.json");
    f << o.battery->dump(2) << "\n";
  }
  if (c.plot && !o.plot.empty()) {
    auto f = open_out(c.out + ".svg");
    phylo::write_svg(f, o);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phylogeny inference experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  Overrides ov;
  app.add_option("--config", config_path, "JSON config file");
  ov.add<std::uint64_t>(&app, "--seed", "Master seed", [](auto& c, auto v) { c.seed = v; });
  ov.add<int>(&app, "--threads", "Worker threads", [](auto& c, auto v) { c.threads = v; });
  ov.add<std::string>(&app, "--out", "Output path (stdout when absent)", [](auto& c, auto v) { c.out = v; });
  auto* plot = app.add_flag("--plot", "Also write <out>.svg");
  ov.add<double>(&app, "--f", "Minimum edge weight", [](auto& c, auto v) { c.f = v; });
  ov.add<double>(&app, "--g", "Maximum edge weight", [](auto& c, auto v) { c.g = v; });
  ov.add<long long>(&app, "--upsilon", "Grid resolution", [](auto& c, auto v) { c.upsilon = v; });
  ov.add<int>(&app, "--trials", "Trials per point", [](auto& c, auto v) { c.trials = v; });
  ov.add<std::vector<int>>(&app, "--k-grid", "Sequence lengths", [](auto& c, auto v) { c.k_grid = v; })
      ->delimiter(',');

  // Tree selection shared by simulate, distance and battery-power.
  auto tree_options = [&](CLI::App* sub) {
    ov.add<int>(sub, "--height", "Homogeneous tree height", [](auto& c, auto v) {
      c.tree.kind = "homogeneous";
      c.tree.h = v;
      c.candidate.h = v;
    });
    ov.add<std::string>(sub, "--newick", "Reference tree as a Newick string", [](auto& c, auto v) {
      c.tree.kind = "newick";
      c.tree.newick = v;
    });
    ov.add<std::string>(sub, "--tree-file", "Reference tree Newick file", [](auto& c, auto v) {
      c.tree.kind = "newick";
      c.tree.file = v;
      c.tree.newick.clear();
    });
    ov.add<int>(sub, "--random", "Random regular tree with this many leaves", [](auto& c, auto v) {
      c.tree.kind = "random";
      c.tree.n = v;
    });
    ov.add<std::uint64_t>(sub, "--tree-seed", "Seed of the random tree", [](auto& c, auto v) { c.tree.seed = v; });
  };
  auto candidate_options = [&](CLI::App* sub) {
    ov.add<std::vector<int>>(sub, "--swap", "Candidate: reference with heap vertices u,v swapped",
                             [](auto& c, auto v) {
                               c.candidate.kind = "swap";
                               c.candidate.swap = v;
                             })
        ->delimiter(',');
    ov.add<std::string>(sub, "--other", "Candidate tree as a Newick string", [](auto& c, auto v) {
      c.candidate.kind = "newick";
      c.candidate.newick = v;
    });
    ov.add<std::string>(sub, "--other-file", "Candidate tree Newick file", [](auto& c, auto v) {
      c.candidate.kind = "newick";
      c.candidate.file = v;
      c.candidate.newick.clear();
    });
  };
  auto grids = [&](CLI::App* sub) {
    ov.add<std::vector<int>>(sub, "--h-grid", "Heights", [](auto& c, auto v) { c.h_grid = v; })->delimiter(',');
    ov.add<std::vector<double>>(sub, "--g-grid", "Weights g", [](auto& c, auto v) { c.g_grid = v; })
        ->delimiter(',');
  };

  auto* simulate = app.add_subcommand("simulate", "Sample an alignment");
  tree_options(simulate);
  ov.add<int>(simulate, "--k", "Sites", [](auto& c, auto v) { c.k = v; });
  ov.add<int>(simulate, "--r", "States", [](auto& c, auto v) { c.r = v; });
  ov.add<std::string>(simulate, "--sampler", "markov | cluster", [](auto& c, auto v) { c.sampler = v; });

  auto* infer = app.add_subcommand("infer", "Maximum-likelihood phylogeny");
  ov.add<std::string>(infer, "--alignment", "Alignment file (.fa/.fasta read as FASTA)",
                      [](auto& c, auto v) { c.alignment = v; });
  ov.add<std::string>(infer, "--candidates", "Candidate trees, one Newick per line",
                      [](auto& c, auto v) { c.candidates_file = v; });
  ov.add<std::string>(infer, "--mode", "auto | candidates | topology | exhaustive",
                      [](auto& c, auto v) { c.mode = v; });

  auto* asr = app.add_subcommand("asr", "Root reconstruction accuracy and flow bound");
  grids(asr);

  auto* distance = app.add_subcommand("distance", "Swap and blow-up distances");
  tree_options(distance);
  candidate_options(distance);
  ov.add<int>(distance, "--ell", "Level spacing of the upper bound", [](auto& c, auto v) { c.ell = v; });

  auto* battery = app.add_subcommand("battery-power", "Battery construction and error curve");
  tree_options(battery);
  candidate_options(battery);
  ov.add<int>(battery, "--ell", "Level spacing", [](auto& c, auto v) { c.ell = v; });

  auto* tv = app.add_subcommand("tv-curve", "k-site total variation against blow-up distance");
  ov.add<int>(tv, "--n", "Leaves", [](auto& c, auto v) { c.n = v; });
  ov.add<int>(tv, "--constructions", "Tree pairs", [](auto& c, auto v) { c.constructions = v; });

  auto* phase = app.add_subcommand("phase-transition", "ML success against k on homogeneous trees");
  grids(phase);
  ov.add<std::string>(phase, "--mode", "auto | candidates | topology | exhaustive",
                      [](auto& c, auto v) { c.mode = v; });
  ov.add<double>(phase, "--success-level", "Success fraction defining k90",
                 [](auto& c, auto v) { c.success_level = v; });
  auto* full = phase->add_flag("--full-grid", "Run every k even after k90 is reached");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig c;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read " + config_path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config JSON: ") + e.what());
      }
      c = phylo::config_from_json(j, c);
    }
    ov.apply(c);
    if (plot->count() > 0) c.plot = true;
    if (full->count() > 0) c.early_stop = false;
    c.experiment = app.get_subcommands().front()->get_name();

    if (c.experiment == "simulate") {
      if (c.out.empty()) {
        phylo::run_simulate(c, std::cout);
      } else {
        std::ostringstream buf;
        phylo::run_simulate(c, buf);
        auto f = open_out(c.out);
        f << buf.str();
      }
      return 0;
    }
    emit(c, phylo::run_experiment(c));
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const phylo::ScaleLimit& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
