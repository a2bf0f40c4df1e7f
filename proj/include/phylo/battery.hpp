#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "phylo/coloring.hpp"

namespace phylo {

enum class Regime { homogeneous, many_red, large_overlap };
enum class Proximity { proximal, semi_proximal, non_proximal };
// Which construction produced a panel.
enum class PanelOrigin { homogeneous, cohanging, far, close, overlap };

const char* regime_name(Regime r);
const char* proximity_name(Proximity p);
const char* origin_name(PanelOrigin o);

struct BatteryParams {
  int ell = 2;
  int wp = 1;
  double gamma = 4;
  int gamma_t = 4;
  Units g_units = 1;
  double beta = 2;
  // Constant in the regime boundary |O#| >= blowup / (10 c_overlap).
  double c_overlap = 1;
};

// Smallest l >= 2 with 2^l / (2^l - wp)^2 <= exp(-2 l g'), g' the midpoint of g and ln sqrt 2.
// Throws std::domain_error when g is not below ln sqrt 2 or no l <= 30 works.
int default_ell(double g, int wp);
BatteryParams default_params(Regime r, int ell, Units g_units);

struct TestPanel {
  RestrictedSubtree y0, z0, y_sharp, z_sharp;
  // Test vertices in the reference tree.
  int y_vertex = -1, z_vertex = -1;
  Units d0 = 0, d_sharp = 0;
  int graph0 = 0, graph_sharp = 0;
  Proximity prox0 = Proximity::proximal, prox_sharp = Proximity::proximal;
  int alpha = 1;
  PanelOrigin origin = PanelOrigin::homogeneous;
  // R-vertex, or reference-tree overlap edge for the large-overlap construction.
  int anchor = -1;
};

struct Battery {
  Regime regime = Regime::homogeneous;
  BatteryParams params;
  TreeRef t0, t_sharp;
  std::vector<TestPanel> panels;
};

Proximity classify(int graph_distance, const BatteryParams& p);

// Panel on the G-clusters of y and z and their candidate-tree matchings, if it meets every pair
// requirement; `why` receives the first failure otherwise.
std::optional<TestPanel> make_panel(const Coloring& c, int y, int z, const BatteryParams& p, PanelOrigin origin,
                                    int anchor, std::string* why = nullptr);

struct PanelFailure {
  int anchor;
  std::string reason;
};

struct PanelSet {
  std::vector<TestPanel> panels;
  std::vector<PanelFailure> failures;
};

PanelSet build_panels_homogeneous(const Coloring& c, const BatteryParams& p);
// Expects a coloring after recolor_black.
PanelSet build_panels_many_r(const Coloring& c, const BatteryParams& p);

struct QuartetWitnesses {
  int useful_edge;
  std::array<int, 4> witnesses;  // y_i, z_i, y_j, z_j in the reference tree
  Split split0;                  // over (y_i, z_i, y_j, z_j)
  Split split_sharp;
};

struct OverlapPanelSet : PanelSet {
  std::vector<QuartetWitnesses> quartets;
};

OverlapPanelSet build_panels_large_overlap(const Coloring& c, const Overlap& o, const BatteryParams& p);

enum class SparsifyMode { candidate_tree, both_trees };

// Greedy: keep each surviving panel in order and drop later panels within the rejection radius.
std::vector<TestPanel> sparsify(const std::vector<TestPanel>& panels, const BatteryParams& p, SparsifyMode mode);

// Edge set of the forest of a panel on one side.
std::vector<int> panel_forest(const TestPanel& panel, bool sharp_side, const BatteryParams& p);

struct ValidationReport {
  bool ok = true;
  std::string first_failure;
  std::vector<std::string> failures;
};

ValidationReport validate_battery(const Battery& b);

struct BuildOptions {
  std::optional<Regime> regime;
  std::optional<int> ell;
  std::optional<double> c_overlap;
};

struct BuildReport {
  Regime regime = Regime::homogeneous;
  int red = 0, yellow = 0, black = 0;
  int overlap_sharp = 0, overlap0 = 0;
  int blowup = -1;
  bool regime_mismatch = false;
  int candidates = 0;
  std::vector<PanelFailure> failures;
  ValidationReport validation;
};

// Colors, picks the regime, builds, sparsifies and validates.
Battery build_battery(const Phylogeny& t0, const Phylogeny& t_sharp, const BuildOptions& opts, BuildReport* report = nullptr);

}  // namespace phylo
