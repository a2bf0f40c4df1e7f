#include "phylo/newick.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

namespace phylo {

namespace {

struct Node {
  std::vector<int> children;
  std::string name;
  double length = -1;
};

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  std::vector<Node> parse(int& top) {
    skip();
    top = node();
    skip();
    if (pos_ >= s_.size() || s_[pos_] != ';') fail("expected ';'");
    ++pos_;
    skip();
    if (pos_ != s_.size()) fail("trailing characters");
    return std::move(nodes_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidTree("newick: " + what + " at offset " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  int node() {
    int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      while (true) {
        int c = node();
        nodes_[id].children.push_back(c);
        skip();
        if (pos_ >= s_.size()) fail("unterminated group");
        if (s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (s_[pos_] == ')') {
          ++pos_;
          break;
        }
        fail("expected ',' or ')'");
      }
    }
    skip();
    std::string name;
    while (pos_ < s_.size() && !std::strchr("(),:;", s_[pos_]) && !std::isspace(static_cast<unsigned char>(s_[pos_])))
      name += s_[pos_++];
    nodes_[id].name = name;
    skip();
    if (pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;
      skip();
      size_t used = 0;
      try {
        nodes_[id].length = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad branch length");
      }
      pos_ += used;
    }
    return id;
  }

  const std::string& s_;
  size_t pos_ = 0;
  std::vector<Node> nodes_;
};

}  // namespace

Phylogeny parse_newick(const std::string& text, Units upsilon) {
  int top = 0;
  std::vector<Node> nodes = Parser(text).parse(top);
  std::map<int, int> leaf_of;  // label -> node
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    bool top_leaf = i == top && nodes[i].children.size() == 1 && !nodes[i].name.empty();
    if (!nodes[i].children.empty() && !top_leaf) continue;
    int label = 0;
    try {
      size_t used = 0;
      label = std::stoi(nodes[i].name, &used);
      if (used != nodes[i].name.size()) throw InvalidTree("");
    } catch (const std::exception&) {
      throw InvalidTree("newick: leaf names must be integers 1..n, got '" + nodes[i].name + "'");
    }
    if (!leaf_of.emplace(label - 1, i).second) throw InvalidTree("newick: duplicate leaf label");
  }
  int n = static_cast<int>(leaf_of.size());
  std::vector<int> leaf_vertex(n);
  int expect = 0;
  for (auto [label, node] : leaf_of) {
    if (label != expect++) throw InvalidTree("newick: leaf labels must be exactly 1..n");
    leaf_vertex[label] = node;
  }
  std::vector<Edge> edges;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
    for (int c : nodes[i].children) {
      if (nodes[c].length < 0) throw InvalidTree("newick: missing branch length");
      edges.push_back({i, c, to_units(nodes[c].length, upsilon)});
    }
  std::optional<int> root;
  if (nodes[top].children.size() == 2) root = top;
  if (nodes[top].children.size() == 1 && nodes[top].name.empty()) throw InvalidTree("newick: unary root");
  return Phylogeny::from_edges(static_cast<int>(nodes.size()), std::move(edges), std::move(leaf_vertex), upsilon, root);
}

int newick_precision(Units upsilon) {
  // Exact when upsilon divides a power of ten.
  long long ten = 1;
  for (int p = 0; p <= 17; ++p, ten *= 10)
    if (ten % upsilon == 0) return std::max(p, 1);
  // Otherwise enough digits for the parser's grid tolerance.
  return static_cast<int>(std::ceil(std::log10(static_cast<double>(upsilon)))) + 8;
}

std::string to_newick(const Phylogeny& t) {
  int prec = newick_precision(t.upsilon());
  int start = t.effective_root();
  if (!t.root() && t.is_leaf(start) && t.num_leaves() > 1) start = t.neighbors(start)[0].vertex;
  RootedView view(t, start);
  std::vector<int> min_label(t.num_vertices(), 1 << 30);
  for (auto it = view.preorder.rbegin(); it != view.preorder.rend(); ++it) {
    int v = *it;
    if (t.is_leaf(v)) min_label[v] = t.label_of(v);
    for (int c : view.children[v]) min_label[v] = std::min(min_label[v], min_label[c]);
  }
  std::function<std::string(int)> rec = [&](int v) {
    std::string s;
    auto kids = view.children[v];
    std::sort(kids.begin(), kids.end(), [&](int a, int b) { return min_label[a] < min_label[b]; });
    if (t.is_leaf(v) && kids.empty()) {
      s = std::to_string(t.label_of(v) + 1);
    } else {
      s = "(";
      for (size_t i = 0; i < kids.size(); ++i) {
        if (i) s += ",";
        s += rec(kids[i]);
      }
      s += ")";
      if (t.is_leaf(v)) s += std::to_string(t.label_of(v) + 1);
    }
    if (v != start) {
      char buf[64];
      std::snprintf(buf, sizeof buf, ":%.*f", prec, t.weight(view.parent_edge[v]));
      s += buf;
    }
    return s;
  };
  return rec(start) + ";";
}

}  // namespace phylo
