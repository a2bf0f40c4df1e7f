#include "phylo/alignment.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace phylo {

Alignment::Alignment(int k, int n, int r) : k_(k), n_(n), r_(r), data_(static_cast<size_t>(k) * n, 0) {
  if (k < 0 || n < 0 || r < 2) throw std::invalid_argument("bad alignment dimensions");
}

Alignment Alignment::prefix(int k) const {
  if (k > k_) throw std::out_of_range("prefix longer than alignment");
  Alignment a(k, n_, r_);
  std::copy(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(k) * n_, a.data_.begin());
  return a;
}

Alignment Alignment::concat(const Alignment& other) const {
  if (other.n_ != n_ || other.r_ != r_) throw std::invalid_argument("incompatible alignments");
  Alignment a(k_ + other.k_, n_, r_);
  std::copy(data_.begin(), data_.end(), a.data_.begin());
  std::copy(other.data_.begin(), other.data_.end(), a.data_.begin() + static_cast<std::ptrdiff_t>(data_.size()));
  return a;
}

void write_alignment(std::ostream& out, const Alignment& a) {
  out << a.sites() << ' ' << a.leaves() << ' ' << a.states() << '\n';
  std::string line(a.leaves(), ' ');
  for (int i = 0; i < a.sites(); ++i) {
    for (int j = 0; j < a.leaves(); ++j) {
      int s = a.state(i, j);
      line[j] = a.states() == 2 ? (s == 0 ? '+' : '-') : static_cast<char>('0' + s);
    }
    out << line << '\n';
  }
}

Alignment read_alignment(std::istream& in) {
  int k = 0, n = 0, r = 0;
  std::string header;
  if (!std::getline(in, header)) throw AlignmentFormatError("missing header");
  std::istringstream hs(header);
  if (!(hs >> k >> n >> r) || k < 0 || n < 0 || r < 2 || r > 10) throw AlignmentFormatError("bad header '" + header + "'");
  Alignment a(k, n, r);
  std::string line;
  for (int i = 0; i < k; ++i) {
    if (!std::getline(in, line)) throw AlignmentFormatError("fewer sites than the header states");
    // U+2212 MINUS SIGN is accepted for '-'.
    std::string norm;
    for (size_t p = 0; p < line.size(); ++p) {
      if (line.compare(p, 3, "\xE2\x88\x92") == 0) {
        norm += '-';
        p += 2;
      } else if (line[p] != '\r' && line[p] != ' ') {
        norm += line[p];
      }
    }
    if (static_cast<int>(norm.size()) != n) throw AlignmentFormatError("site " + std::to_string(i) + " has wrong length");
    for (int j = 0; j < n; ++j) {
      char c = norm[j];
      int s = -1;
      if (r == 2 && c == '+') s = 0;
      else if (r == 2 && c == '-') s = 1;
      else if (c >= '0' && c < '0' + r) s = c - '0';
      if (s < 0) throw AlignmentFormatError(std::string("invalid state '") + c + "'");
      a.set(i, j, s);
    }
  }
  return a;
}

Alignment read_fasta(std::istream& in) {
  std::map<int, std::string> seqs;
  std::string line;
  int current = -1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '>') {
      try {
        current = std::stoi(line.substr(1)) - 1;
      } catch (const std::exception&) {
        throw AlignmentFormatError("taxon names must be integers 1..n");
      }
      if (current < 0 || !seqs.emplace(current, "").second) throw AlignmentFormatError("bad or duplicate taxon");
      continue;
    }
    if (current < 0) throw AlignmentFormatError("sequence before header");
    seqs[current] += line;
  }
  int n = static_cast<int>(seqs.size());
  if (n == 0) throw AlignmentFormatError("no sequences");
  if (seqs.rbegin()->first != n - 1) throw AlignmentFormatError("taxa must be numbered 1..n");
  int k = static_cast<int>(seqs.begin()->second.size());
  Alignment a(k, n, 4);
  for (auto& [taxon, s] : seqs) {
    if (static_cast<int>(s.size()) != k) throw AlignmentFormatError("sequences differ in length");
    for (int i = 0; i < k; ++i) {
      static const std::string alphabet = "ACGT";
      auto pos = alphabet.find(static_cast<char>(std::toupper(static_cast<unsigned char>(s[i]))));
      if (pos == std::string::npos) throw AlignmentFormatError("non-ACGT character");
      a.set(i, taxon, static_cast<int>(pos));
    }
  }
  return a;
}

}  // namespace phylo
