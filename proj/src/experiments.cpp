#include "phylo/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "phylo/alignment.hpp"
#include "phylo/ancestral.hpp"
#include "phylo/battery.hpp"
#include "phylo/battery_json.hpp"
#include "phylo/blowup.hpp"
#include "phylo/coloring.hpp"
#include "phylo/divergence.hpp"
#include "phylo/enumerate.hpp"
#include "phylo/ml.hpp"
#include "phylo/newick.hpp"
#include "phylo/parallel.hpp"
#include "phylo/random_tree.hpp"
#include "phylo/rng.hpp"
#include "phylo/sampler.hpp"
#include "phylo/statistic.hpp"
#include "phylo/swap.hpp"
#include "phylo/tree_metric.hpp"

namespace phylo {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

Units grid_units(double w, Units upsilon, const char* what) {
  try {
    return to_units(w, upsilon);
  } catch (const InvalidTree&) {
    throw ConfigError(std::string(what) + " is not on the 1/upsilon grid");
  }
}

json spec_to_json(const TreeSpec& s) {
  return {{"kind", s.kind}, {"h", s.h},         {"n", s.n},      {"newick", s.newick},
          {"file", s.file}, {"seed", s.seed}, {"swap", s.swap}};
}

TreeSpec spec_from_json(const json& j, TreeSpec s) {
  if (!j.is_object()) throw ConfigError("tree spec must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "kind") s.kind = v.get<std::string>();
    else if (key == "h") s.h = v.get<int>();
    else if (key == "n") s.n = v.get<int>();
    else if (key == "newick") s.newick = v.get<std::string>();
    else if (key == "file") s.file = v.get<std::string>();
    else if (key == "seed") s.seed = v.get<std::uint64_t>();
    else if (key == "swap") s.swap = v.get<std::vector<int>>();
    else throw ConfigError("unknown tree spec key: " + key);
  }
  return s;
}

// Columns shared by every point row.
const std::vector<std::string> kCommon{"experiment", "n", "g", "k", "trials", "successes", "error", "std_error", "seed"};

struct RowBuilder {
  const ExperimentConfig& c;
  std::string echo;

  explicit RowBuilder(const ExperimentConfig& cfg) : c(cfg) {
    json j = config_to_json(cfg);
    // Execution settings that never change a number.
    j.erase("threads");
    j.erase("out");
    j.erase("plot");
    echo = j.dump();
  }

  Table table(const std::vector<std::string>& extra) const {
    Table t;
    t.columns = kCommon;
    t.columns.insert(t.columns.end(), extra.begin(), extra.end());
    t.columns.push_back("config");
    return t;
  }

  std::vector<std::string> row(std::string n, std::string g, std::string k, std::string trials,
                               std::string successes, std::string error, std::string se,
                               const std::vector<std::string>& extra) const {
    std::vector<std::string> r{c.experiment, n, g, k, trials, successes, error, se, std::to_string(c.seed)};
    r.insert(r.end(), extra.begin(), extra.end());
    r.push_back(echo);
    return r;
  }

  Table summary(const std::vector<std::string>& columns) const {
    Table t;
    t.columns = {"experiment"};
    t.columns.insert(t.columns.end(), columns.begin(), columns.end());
    t.columns.push_back("config");
    return t;
  }

  std::vector<std::string> summary_row(const std::vector<std::string>& cells) const {
    std::vector<std::string> r{c.experiment};
    r.insert(r.end(), cells.begin(), cells.end());
    r.push_back(echo);
    return r;
  }
};

std::string num(double x) { return format_number(x); }
std::string num(long long x) { return std::to_string(x); }
std::string num(int x) { return std::to_string(x); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Units f_units(const ExperimentConfig& c) { return grid_units(c.f, c.upsilon, "f"); }
Units g_units(const ExperimentConfig& c) { return grid_units(c.g, c.upsilon, "g"); }

}  // namespace

json config_to_json(const ExperimentConfig& c) {
  json j{{"experiment", c.experiment},
         {"r", c.r},
         {"f", c.f},
         {"g", c.g},
         {"upsilon", c.upsilon},
         {"tree", spec_to_json(c.tree)},
         {"candidate", spec_to_json(c.candidate)},
         {"k_grid", c.k_grid},
         {"k", c.k},
         {"trials", c.trials},
         {"seed", c.seed},
         {"threads", c.threads},
         {"out", c.out},
         {"plot", c.plot},
         {"sampler", c.sampler},
         {"mode", c.mode},
         {"h_grid", c.h_grid},
         {"g_grid", c.g_grid},
         {"constructions", c.constructions},
         {"n", c.n},
         {"alignment", c.alignment},
         {"candidates_file", c.candidates_file},
         {"success_level", c.success_level},
         {"early_stop", c.early_stop}};
  j["ell"] = c.ell ? json(*c.ell) : json(nullptr);
  return j;
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "experiment") c.experiment = v.get<std::string>();
      else if (key == "r") c.r = v.get<int>();
      else if (key == "f") c.f = v.get<double>();
      else if (key == "g") c.g = v.get<double>();
      else if (key == "upsilon") c.upsilon = v.get<Units>();
      else if (key == "tree") c.tree = spec_from_json(v, c.tree);
      else if (key == "candidate") c.candidate = spec_from_json(v, c.candidate);
      else if (key == "k_grid") c.k_grid = v.get<std::vector<int>>();
      else if (key == "k") c.k = v.get<int>();
      else if (key == "trials") c.trials = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "threads") c.threads = v.get<int>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "plot") c.plot = v.get<bool>();
      else if (key == "sampler") c.sampler = v.get<std::string>();
      else if (key == "mode") c.mode = v.get<std::string>();
      else if (key == "h_grid") c.h_grid = v.get<std::vector<int>>();
      else if (key == "g_grid") c.g_grid = v.get<std::vector<double>>();
      else if (key == "ell") c.ell = v.is_null() ? std::nullopt : std::optional<int>(v.get<int>());
      else if (key == "constructions") c.constructions = v.get<int>();
      else if (key == "n") c.n = v.get<int>();
      else if (key == "alignment") c.alignment = v.get<std::string>();
      else if (key == "candidates_file") c.candidates_file = v.get<std::string>();
      else if (key == "success_level") c.success_level = v.get<double>();
      else if (key == "early_stop") c.early_stop = v.get<bool>();
      else throw ConfigError("unknown config key: " + key);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("ill-typed config value: ") + e.what());
  }
  return c;
}

void validate_config(const ExperimentConfig& c) {
  if (c.upsilon < 1) throw ConfigError("upsilon must be at least 1");
  if (!(c.f > 0)) throw ConfigError("f must be positive");
  if (c.f > c.g) throw ConfigError("f must not exceed g");
  if (c.f * static_cast<double>(c.upsilon) < 1 - 1e-9) throw ConfigError("upsilon must be at least 1/f");
  f_units(c);
  g_units(c);
  if (c.r < 2) throw ConfigError("r must be at least 2");
  if (c.r != 2 && c.experiment != "simulate") throw ConfigError("only simulate supports r > 2");
  for (size_t i = 0; i < c.k_grid.size(); ++i) {
    if (c.k_grid[i] < 0) throw ConfigError("k-grid entries must be non-negative");
    if (i > 0 && c.k_grid[i] <= c.k_grid[i - 1]) throw ConfigError("k-grid must be strictly increasing");
  }
  if (c.k < 0) throw ConfigError("k must be non-negative");
  if (c.trials < 0) throw ConfigError("trials must be non-negative");
  if (c.threads < 1) throw ConfigError("threads must be positive");
  if (c.constructions < 0) throw ConfigError("constructions must be non-negative");
  if (!(c.success_level > 0 && c.success_level <= 1)) throw ConfigError("success_level must lie in (0, 1]");
  for (int h : c.h_grid)
    if (h < 1) throw ConfigError("h-grid entries must be positive");
  for (double g : c.g_grid) grid_units(g, c.upsilon, "g-grid entry");
  if (c.sampler != "markov" && c.sampler != "cluster") throw ConfigError("sampler must be markov or cluster");
  if (c.ell && *c.ell < 1) throw ConfigError("ell must be positive");
}

Phylogeny build_tree(const TreeSpec& s, const ExperimentConfig& c, const Phylogeny* reference) {
  try {
    if (s.kind == "homogeneous") return build_homogeneous(s.h, g_units(c), c.upsilon);
    if (s.kind == "random") return random_phylogeny(s.n, f_units(c), g_units(c), c.upsilon, s.seed);
    if (s.kind == "newick") {
      std::string text = s.newick.empty() ? read_file(s.file) : s.newick;
      while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
      return parse_newick(text, c.upsilon);
    }
    if (s.kind == "swap") {
      if (!reference) throw ConfigError("a swap tree needs a reference tree");
      if (s.swap.size() != 2) throw ConfigError("swap needs two heap indices");
      return swap_apply(*reference, {s.swap[0], s.swap[1]});
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad tree spec: ") + e.what());
  }
  throw ConfigError("unknown tree kind: " + s.kind);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_csv(std::ostream& out, const Table& t) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_escape(cells[i]);
    out << "\n";
  };
  line(t.columns);
  for (const auto& r : t.rows) line(r);
}

void write_svg(std::ostream& out, const ExperimentOutput& o) {
  const double w = 640, h = 420, left = 70, right = 160, top = 40, bottom = 60;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  auto tx = [&](double x) { return o.log_x ? std::log10(x) : x; };
  auto ty = [&](double y) { return o.log_y ? std::log10(y) : y; };
  auto usable = [&](double x, double y) {
    return std::isfinite(tx(x)) && std::isfinite(ty(y)) && (!o.log_x || x > 0) && (!o.log_y || y > 0);
  };
  for (const auto& s : o.plot)
    for (size_t i = 0; i < s.x.size(); ++i)
      if (usable(s.x[i], s.y[i])) {
        x0 = std::min(x0, tx(s.x[i]));
        x1 = std::max(x1, tx(s.x[i]));
        y0 = std::min(y0, ty(s.y[i]));
        y1 = std::max(y1, ty(s.y[i]));
      }
  if (!(x0 < x1)) x0 -= 1, x1 += 1;
  if (!(y0 < y1)) y0 -= 1, y1 += 1;
  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * (w - left - right); };
  auto py = [&](double y) { return h - bottom - (ty(y) - y0) / (y1 - y0) * (h - top - bottom); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << o.plot_title << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
      << "\" stroke=\"black\"/>\n";
  auto label = [&](double v, bool log) { return format_number(log ? std::pow(10.0, v) : v); };
  out << "<text x=\"" << left << "\" y=\"" << h - bottom + 16 << "\" font-size=\"11\">" << label(x0, o.log_x)
      << "</text>\n";
  out << "<text x=\"" << w - right << "\" y=\"" << h - bottom + 16 << "\" font-size=\"11\" text-anchor=\"end\">"
      << label(x1, o.log_x) << "</text>\n";
  out << "<text x=\"" << left - 4 << "\" y=\"" << h - bottom << "\" font-size=\"11\" text-anchor=\"end\">"
      << label(y0, o.log_y) << "</text>\n";
  out << "<text x=\"" << left - 4 << "\" y=\"" << top + 10 << "\" font-size=\"11\" text-anchor=\"end\">"
      << label(y1, o.log_y) << "</text>\n";
  out << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 20 << "\" text-anchor=\"middle\" font-size=\"12\">"
      << o.x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << (top + h - bottom) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 "
      << (top + h - bottom) / 2 << ")\" text-anchor=\"middle\">" << o.y_label << "</text>\n";
  for (size_t s = 0; s < o.plot.size(); ++s) {
    const auto& series = o.plot[s];
    const char* color = colors[s % 7];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < series.x.size(); ++i)
      if (usable(series.x[i], series.y[i])) out << px(series.x[i]) << "," << py(series.y[i]) << " ";
    out << "\"/>\n";
    out << "<text x=\"" << w - right + 8 << "\" y=\"" << top + 14 * (s + 1) << "\" font-size=\"11\" fill=\"" << color
        << "\">" << series.name << "</text>\n";
  }
  out << "</svg>\n";
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit f;
  f.points = static_cast<int>(x.size());
  if (x.size() < 2) return f;
  double n = static_cast<double>(x.size()), mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0 ? 1.0 : sxy * sxy / (sxx * syy);
  return f;
}

ExperimentOutput run_battery_power(const ExperimentConfig& c) {
  validate_config(c);
  RowBuilder rb(c);
  ExperimentOutput o;
  Phylogeny t0 = build_tree(c.tree, c);
  Phylogeny t1 = build_tree(c.candidate, c, &t0);
  if (t0.num_leaves() != t1.num_leaves()) throw ConfigError("trees have different leaf counts");
  BuildOptions opts;
  opts.ell = c.ell;
  BuildReport rep;
  Battery b;
  try {
    b = build_battery(t0, t1, opts, &rep);
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("no default ell: ") + e.what());
  }
  std::ostringstream report;
  report << "regime " << regime_name(rep.regime) << (rep.regime_mismatch ? " (forced)" : "") << "\n";
  report << "ell " << b.params.ell << " wp " << b.params.wp << " Gamma " << format_number(b.params.gamma)
         << " gamma_t " << b.params.gamma_t << "\n";
  report << "colors R " << rep.red << " Y " << rep.yellow << " B " << rep.black << "\n";
  report << "overlap candidate " << rep.overlap_sharp << " reference " << rep.overlap0 << "\n";
  report << "panels " << rep.candidates << " built, " << b.panels.size() << " kept\n";
  for (const auto& f : rep.failures) report << "  skipped at vertex " << f.anchor << ": " << f.reason << "\n";
  for (size_t i = 0; i < b.panels.size(); ++i) {
    const auto& p = b.panels[i];
    report << "  panel " << i << " " << origin_name(p.origin) << " alpha " << p.alpha << " d0 " << p.d0 << " d# "
           << p.d_sharp << " " << proximity_name(p.prox0) << "/" << proximity_name(p.prox_sharp) << "\n";
  }
  report << "validation " << (rep.validation.ok ? "pass" : "FAIL: " + rep.validation.first_failure) << "\n";
  o.report = report.str();
  o.battery = battery_to_json(b);
  o.points = rb.table({"ref_error", "sharp_error", "panels"});
  o.summary = rb.summary({"panels", "points_fitted", "intercept", "slope", "r_squared", "rate_per_panel"});
  if (!rep.validation.ok) return o;
  int panels = static_cast<int>(b.panels.size());
  std::string n = num(t0.num_leaves()), g = num(c.g);
  if (panels == 0) return o;
  DistinguishingTest test(b, 100000, derive_seed(c.seed, {0x6d65616eULL}));
  std::vector<double> ks, logs;
  PlotSeries curve{"max error", {}, {}};
  for (int k : c.k_grid) {
    auto start = Clock::now();
    auto e = test.empirical_error(k, c.trials, derive_seed(c.seed, {static_cast<std::uint64_t>(k)}), c.threads);
    double worst = std::max(e.ref_error, e.sharp_error);
    double se = e.ref_error >= e.sharp_error ? e.ref_std_error : e.sharp_std_error;
    long long failures = std::llround(worst * c.trials);
    o.points.rows.push_back(rb.row(n, g, num(k), num(c.trials), num(c.trials - failures), num(worst), num(se),
                                   {num(e.ref_error), num(e.sharp_error), num(panels)}));
    o.seconds.push_back(seconds_since(start));
    curve.x.push_back(k);
    curve.y.push_back(worst);
    if (worst > 0) {
      ks.push_back(k);
      logs.push_back(std::log(worst));
    }
  }
  auto fit = fit_line(ks, logs);
  o.summary.rows.push_back(rb.summary_row({num(panels), num(fit.points), num(fit.intercept), num(fit.slope),
                                           num(fit.r_squared), num(-fit.slope / panels)}));
  o.plot = {curve};
  o.plot_title = "distinguishing test error";
  o.x_label = "sites k";
  o.y_label = "max error";
  o.log_x = false;
  o.log_y = true;
  return o;
}

namespace {

struct TvConstruction {
  Phylogeny reference;
  Phylogeny one;  // one edge reweighted
  Phylogeny two;  // a second edge reweighted as well
};

Units flipped(Units w, Units lo, Units hi) { return w - lo > hi - w ? lo : hi; }

TvConstruction tv_construction(const ExperimentConfig& c, int index) {
  Units lo = f_units(c), hi = g_units(c);
  if (lo == hi) throw ConfigError("tv-curve needs f < g to reweight edges");
  for (std::uint64_t attempt = 0;; ++attempt) {
    auto seed = derive_seed(c.seed, {static_cast<std::uint64_t>(index), attempt});
    Phylogeny t0 = random_phylogeny(c.n, lo, hi, c.upsilon, seed);
    Rng rng(derive_seed(seed, {1}));
    int e1 = rng.below(t0.num_edges());
    int e2 = rng.below(t0.num_edges() - 1);
    if (e2 >= e1) ++e2;
    Phylogeny t1 = t0.with_units(e1, flipped(t0.edge(e1).units, lo, hi));
    Phylogeny t2 = t1.with_units(e2, flipped(t0.edge(e2).units, lo, hi));
    if (c.n > kBlowupExactMaxLeaves) throw ScaleLimit("tv-curve needs exact blow-up distances (n <= 8)");
    if (blowup_distance_exact(t0, t1) == 1 && blowup_distance_exact(t0, t2) == 2) return {t0, t1, t2};
    if (attempt > 1000) throw std::runtime_error("no tv-curve construction found");
  }
}

}  // namespace

ExperimentOutput run_tv_curve(const ExperimentConfig& c) {
  validate_config(c);
  if (c.n < 4) throw ConfigError("tv-curve needs n >= 4");
  RowBuilder rb(c);
  ExperimentOutput o;
  o.points = rb.table({"construction", "delta_bl", "tv"});
  o.summary = rb.summary({"construction", "delta_bl", "points_fitted", "a", "b", "r_squared"});
  std::map<int, std::vector<double>> rates;
  for (int i = 0; i < c.constructions; ++i) {
    auto pair = tv_construction(c, i);
    for (int delta : {1, 2}) {
      const Phylogeny& q = delta == 1 ? pair.one : pair.two;
      std::vector<double> ks, logs;
      PlotSeries curve{"pair " + std::to_string(i) + " delta " + std::to_string(delta), {}, {}};
      for (int k : c.k_grid) {
        auto start = Clock::now();
        auto seed = derive_seed(c.seed, {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(delta),
                                         static_cast<std::uint64_t>(k), 0x7476ULL});
        auto tv = estimate_tv_k(pair.reference, q, k, c.trials, seed, c.threads);
        // Bayes error of the best test at equal priors.
        double error = (1 - tv.mean) / 2;
        o.points.rows.push_back(rb.row(num(c.n), num(c.g), num(k), num(c.trials), "", num(error),
                                       num(tv.std_error / 2), {num(i), num(delta), num(tv.mean)}));
        o.seconds.push_back(seconds_since(start));
        curve.x.push_back(k);
        curve.y.push_back(tv.mean);
        if (tv.mean < 1 && c.trials > 0) {
          ks.push_back(k);
          logs.push_back(std::log(1 - tv.mean));
        }
      }
      auto fit = fit_line(ks, logs);
      rates[delta].push_back(-fit.slope);
      o.summary.rows.push_back(rb.summary_row({num(i), num(delta), num(fit.points), num(std::exp(fit.intercept)),
                                               num(-fit.slope), num(fit.r_squared)}));
      o.plot.push_back(curve);
    }
  }
  for (auto& [delta, bs] : rates) {
    double mean = 0;
    for (double b : bs) mean += b;
    mean = bs.empty() ? 0 : mean / bs.size();
    o.summary.rows.push_back(rb.summary_row({"mean", num(delta), num(static_cast<int>(bs.size())), "", num(mean), ""}));
  }
  o.plot_title = "k-site total variation";
  o.x_label = "sites k";
  o.y_label = "TV";
  o.log_x = false;
  return o;
}

ExperimentOutput run_phase_transition(const ExperimentConfig& c) {
  validate_config(c);
  RowBuilder rb(c);
  ExperimentOutput o;
  o.points = rb.table({"h", "mode", "candidates"});
  o.summary = rb.summary({"h", "n", "g", "mode", "k90"});
  std::map<double, std::vector<std::pair<int, int>>> k90s;
  for (double gv : c.g_grid) {
    PlotSeries curve{"g " + format_number(gv), {}, {}};
    for (int h : c.h_grid) {
      Units gu = grid_units(gv, c.upsilon, "g-grid entry");
      Phylogeny t0 = build_homogeneous(h, gu, c.upsilon);
      int n = t0.num_leaves();
      std::string mode = c.mode == "auto" ? (h <= 3 ? "topology" : "candidates") : c.mode;
      MlSpace space;
      space.grid = {f_units(c), std::max(gu, g_units(c)), c.upsilon};
      if (mode == "candidates") {
        space.mode = MlMode::candidates;
        space.candidates.push_back(t0);
        if (h >= 2)
          for (auto& t : swap_neighbors(t0).neighbors) space.candidates.push_back(t);
      } else if (mode == "topology") {
        space.mode = MlMode::topology;
        if (n > space.enumeration_limit)
          throw ScaleLimit("topology mode enumerates all topologies and is limited to n <= " +
                           std::to_string(space.enumeration_limit) + "; use candidates mode for h >= 4");
        if (n < 3) throw ScaleLimit("topology mode needs n >= 3");
      } else if (mode == "exhaustive") {
        space.mode = MlMode::exhaustive;
        double values = static_cast<double>(space.grid.values().size());
        if (n > 6 || static_cast<double>(double_factorial(2 * n - 5)) * std::pow(values, 2 * n - 3) >
                         static_cast<double>(space.max_candidates))
          throw ScaleLimit("exhaustive mode is limited to n <= 6 and a small weight grid");
      } else {
        throw ConfigError("mode must be auto, candidates, topology or exhaustive");
      }
      std::string key = canonical_topology(t0);
      int k90 = -1;
      for (int k : c.k_grid) {
        if (c.trials == 0) break;
        auto start = Clock::now();
        std::vector<char> ok(c.trials, 0);
        parallel_for(c.trials, c.threads, [&](int t) {
          auto seed = derive_seed(c.seed, {static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(gu),
                                           static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(t)});
          auto r = ml_estimate(sample_markov(t0, k, seed), space);
          ok[t] = !r.tie && canonical_topology(r.winner) == key;
        });
        int successes = 0;
        for (char v : ok) successes += v;
        double err = 1 - static_cast<double>(successes) / c.trials;
        o.points.rows.push_back(rb.row(num(n), num(gv), num(k), num(c.trials), num(successes), num(err),
                                       num(std::sqrt(err * (1 - err) / c.trials)),
                                       {num(h), mode, num(static_cast<int>(space.mode == MlMode::candidates
                                                                               ? space.candidates.size()
                                                                               : 0))}));
        o.seconds.push_back(seconds_since(start));
        curve.x.push_back(n);
        if (successes >= c.success_level * c.trials - 1e-9) {
          k90 = k;
          if (c.early_stop) break;
        }
      }
      curve.x.resize(curve.y.size());
      if (k90 > 0) {
        curve.x.push_back(n);
        curve.y.push_back(k90);
      }
      k90s[gv].push_back({n, k90});
      o.summary.rows.push_back(
          rb.summary_row({num(h), num(n), num(gv), mode, k90 > 0 ? num(k90) : std::string("")}));
    }
    o.plot.push_back(curve);
  }
  for (auto& [gv, list] : k90s) {
    if (list.size() < 2) continue;
    auto [n0, k0] = list.front();
    auto [n1, k1] = list.back();
    std::string ratio = k0 > 0 && k1 > 0 ? num(static_cast<double>(k1) / k0) : std::string("");
    o.summary.rows.push_back(rb.summary_row({"ratio", num(n1) + "/" + num(n0), num(gv), "", ratio}));
  }
  o.plot_title = "sites needed for 90% ML success";
  o.x_label = "leaves n";
  o.y_label = "k90";
  o.log_y = true;
  return o;
}

ExperimentOutput run_asr(const ExperimentConfig& c) {
  validate_config(c);
  RowBuilder rb(c);
  ExperimentOutput o;
  o.points = rb.table({"h", "mode", "accuracy", "posterior_gap", "gap_std_error", "flow_bound", "bound_holds"});
  o.summary = rb.summary({"h_values", "all_bounds_hold"});
  bool all = true;
  for (double gv : c.g_grid) {
    Units gu = grid_units(gv, c.upsilon, "g-grid entry");
    PlotSeries acc{"accuracy g " + format_number(gv), {}, {}};
    for (int h : c.h_grid) {
      auto start = Clock::now();
      Phylogeny t = build_homogeneous(h, gu, c.upsilon);
      RootedShape shape = shape_of(t, t.effective_root());
      EvalMode mode = shape.num_leaves() <= kExactSubtreeLeafLimit ? EvalMode::exact : EvalMode::monte_carlo;
      if (mode == EvalMode::monte_carlo && c.trials == 0) throw ConfigError("Monte Carlo accuracy needs trials > 0");
      auto seed = derive_seed(c.seed, {static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(gu)});
      auto a = reconstruction_accuracy(shape, mode, c.trials, seed);
      auto gap = posterior_gap(shape, mode, c.trials, derive_seed(seed, {1}));
      double bound = flow_bound(shape);
      bool holds = gap.mean + 3 * gap.std_error >= bound;
      all = all && holds;
      std::string mname = mode == EvalMode::exact ? "exact" : "monte_carlo";
      std::string trials = mode == EvalMode::exact ? "0" : num(c.trials);
      o.points.rows.push_back(rb.row(num(shape.num_leaves()), num(gv), "", trials, "", num(1 - a.probability),
                                     num(a.std_error),
                                     {num(h), mname, num(a.probability), num(gap.mean), num(gap.std_error),
                                      num(bound), holds ? "1" : "0"}));
      o.seconds.push_back(seconds_since(start));
      acc.x.push_back(h);
      acc.y.push_back(a.probability);
    }
    o.plot.push_back(acc);
  }
  std::string hs;
  for (int h : c.h_grid) hs += (hs.empty() ? "" : " ") + std::to_string(h);
  o.summary.rows.push_back(rb.summary_row({hs, all ? "1" : "0"}));
  o.plot_title = "root reconstruction accuracy";
  o.x_label = "depth h";
  o.y_label = "P[correct]";
  o.log_x = false;
  return o;
}

ExperimentOutput run_distance(const ExperimentConfig& c) {
  validate_config(c);
  RowBuilder rb(c);
  ExperimentOutput o;
  auto start = Clock::now();
  Phylogeny a = build_tree(c.tree, c);
  Phylogeny b = build_tree(c.candidate, c, &a);
  if (a.num_leaves() != b.num_leaves()) throw ConfigError("trees have different leaf counts");
  int n = a.num_leaves();
  o.points = rb.table({"metric_equal", "swap_distance", "blowup_exact", "blowup_upper_bound"});
  o.summary = rb.summary({"note"});
  bool equal = tree_metric(a) == tree_metric(b);
  std::string swap, exact, upper;
  std::string note;
  try {
    auto la = homogeneous_layout(a), lb = homogeneous_layout(b);
    if (la.h == lb.h && la.g_units == lb.g_units) {
      if (la.h <= kSwapExactMaxLevels) swap = num(swap_distance_exact(a, b));
      else note += "swap distance: exact search limited to h <= 3; ";
    }
  } catch (const std::invalid_argument&) {
    note += "swap distance: trees are not a homogeneous pair; ";
  }
  if (n <= kBlowupExactMaxLeaves) exact = num(blowup_distance_exact(a, b));
  else note += "blow-up distance: exact search limited to n <= 8; ";
  if (n >= 3) upper = num(blowup_upper_bound(a, b, c.ell.value_or(2)));
  o.points.rows.push_back(rb.row(num(n), num(c.g), "", "", "", "", "", {equal ? "1" : "0", swap, exact, upper}));
  o.seconds.push_back(seconds_since(start));
  o.summary.rows.push_back(rb.summary_row({note}));
  return o;
}

ExperimentOutput run_infer(const ExperimentConfig& c) {
  validate_config(c);
  RowBuilder rb(c);
  ExperimentOutput o;
  if (c.alignment.empty()) throw ConfigError("infer needs an alignment file");
  std::ifstream in(c.alignment);
  if (!in) throw ConfigError("cannot read " + c.alignment);
  Alignment a;
  try {
    auto ends_with = [&](const std::string& s) {
      return c.alignment.size() >= s.size() && c.alignment.compare(c.alignment.size() - s.size(), s.size(), s) == 0;
    };
    a = ends_with(".fa") || ends_with(".fasta") ? read_fasta(in) : read_alignment(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad alignment: ") + e.what());
  }
  MlSpace space;
  space.grid = {f_units(c), g_units(c), c.upsilon};
  std::string mode = c.mode == "auto" ? (c.candidates_file.empty() ? "topology" : "candidates") : c.mode;
  if (mode == "candidates") {
    space.mode = MlMode::candidates;
    std::istringstream lines(read_file(c.candidates_file));
    std::string line;
    while (std::getline(lines, line))
      if (line.find(';') != std::string::npos) {
        try {
          space.candidates.push_back(parse_newick(line, c.upsilon));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(std::string("bad candidate tree: ") + e.what());
        }
      }
    if (space.candidates.empty()) throw ConfigError("candidate file holds no trees");
  } else if (mode == "topology") {
    space.mode = MlMode::topology;
  } else if (mode == "exhaustive") {
    space.mode = MlMode::exhaustive;
  } else {
    throw ConfigError("mode must be auto, candidates, topology or exhaustive");
  }
  auto start = Clock::now();
  MlResult r;
  try {
    r = ml_estimate(a, space);
  } catch (const std::length_error& e) {
    throw ScaleLimit(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  o.points = rb.table({"mode", "log_likelihood", "scored", "tie", "winner"});
  o.summary = rb.summary({"winner"});
  o.points.rows.push_back(rb.row(num(a.leaves()), num(c.g), num(a.sites()), "", "", "", "",
                                 {mode, num(r.score.value), num(r.scored), r.tie ? "1" : "0", to_newick(r.winner)}));
  o.seconds.push_back(seconds_since(start));
  o.summary.rows.push_back(rb.summary_row({to_newick(r.winner)}));
  return o;
}

void run_simulate(const ExperimentConfig& c, std::ostream& out) {
  validate_config(c);
  Phylogeny t = build_tree(c.tree, c);
  Alignment a = c.sampler == "markov" ? sample_markov(t, c.k, c.seed, c.r) : sample_random_cluster(t, c.k, c.seed, c.r);
  write_alignment(out, a);
}

ExperimentOutput run_experiment(const ExperimentConfig& c) {
  if (c.experiment == "battery-power") return run_battery_power(c);
  if (c.experiment == "tv-curve") return run_tv_curve(c);
  if (c.experiment == "phase-transition") return run_phase_transition(c);
  if (c.experiment == "asr") return run_asr(c);
  if (c.experiment == "distance") return run_distance(c);
  if (c.experiment == "infer") return run_infer(c);
  throw ConfigError("unknown experiment: " + c.experiment);
}

}  // namespace phylo
