#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "phylo/phylogeny.hpp"

namespace phylo {

// Invalid or inconsistent configuration (CLI exit code 2).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Requested mode cannot run at this scale (CLI exit code 3).
struct ScaleLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TreeSpec {
  // homogeneous | random | newick | swap (the reference tree with `swap` applied)
  std::string kind = "homogeneous";
  int h = 3;
  int n = 8;
  std::string newick;
  std::string file;
  std::uint64_t seed = 1;
  std::vector<int> swap;  // heap indices u, v
};

struct ExperimentConfig {
  std::string experiment;
  int r = 2;
  double f = 0.1;
  double g = 0.2;
  Units upsilon = 10;
  TreeSpec tree{"homogeneous", 4, 16, {}, {}, 1, {}};
  TreeSpec candidate{"swap", 4, 16, {}, {}, 1, {15, 19}};
  std::vector<int> k_grid{4, 8, 16, 32, 64};
  int k = 100;
  int trials = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;
  bool plot = false;

  std::string sampler = "markov";         // simulate
  std::string mode = "auto";              // phase-transition, infer: auto | candidates | topology | exhaustive
  std::vector<int> h_grid{2, 3, 4, 5};    // phase-transition, asr
  std::vector<double> g_grid{0.2, 0.6};   // phase-transition, asr
  std::optional<int> ell;                 // battery-power
  int constructions = 10;                 // tv-curve
  int n = 5;                              // tv-curve
  std::string alignment;                  // infer
  std::string candidates_file;            // infer: one Newick per line
  double success_level = 0.9;             // phase-transition
  bool early_stop = true;                 // phase-transition: stop a (h, g) sweep at its k90
};

nlohmann::json config_to_json(const ExperimentConfig& c);
// Unknown keys and ill-typed values raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
// f <= g, upsilon >= 1/f, both on the grid, k-grid strictly increasing, counts non-negative.
void validate_config(const ExperimentConfig& c);

Phylogeny build_tree(const TreeSpec& spec, const ExperimentConfig& c, const Phylogeny* reference = nullptr);

// Cells are preformatted; numbers use a fixed shortest-round-trip-safe format.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ExperimentOutput {
  // One row per measured point; every row echoes the effective configuration.
  Table points;
  Table summary;
  // Wall time per point row, kept out of the CSV so that it stays byte-reproducible.
  std::vector<double> seconds;
  std::string report;
  std::optional<nlohmann::json> battery;
  std::vector<PlotSeries> plot;
  std::string plot_title, x_label, y_label;
  bool log_x = true, log_y = false;
};

std::string format_number(double x);
std::string csv_escape(const std::string& s);
void write_csv(std::ostream& out, const Table& t);
void write_svg(std::ostream& out, const ExperimentOutput& o);

struct LinearFit {
  double intercept = 0;
  double slope = 0;
  double r_squared = 0;
  int points = 0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

ExperimentOutput run_battery_power(const ExperimentConfig& c);
ExperimentOutput run_tv_curve(const ExperimentConfig& c);
ExperimentOutput run_phase_transition(const ExperimentConfig& c);
ExperimentOutput run_asr(const ExperimentConfig& c);
ExperimentOutput run_distance(const ExperimentConfig& c);
ExperimentOutput run_infer(const ExperimentConfig& c);
void run_simulate(const ExperimentConfig& c, std::ostream& out);

ExperimentOutput run_experiment(const ExperimentConfig& c);

}  // namespace phylo
