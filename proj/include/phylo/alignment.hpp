#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace phylo {

// k sites by n leaves; column a is leaf label a. States are 0..r-1 (state 0 is spin +1).
class Alignment {
 public:
  Alignment() = default;
  Alignment(int k, int n, int r);

  int sites() const { return k_; }
  int leaves() const { return n_; }
  int states() const { return r_; }

  std::uint8_t state(int site, int leaf) const { return data_[static_cast<size_t>(site) * n_ + leaf]; }
  int spin(int site, int leaf) const { return state(site, leaf) == 0 ? 1 : -1; }
  void set(int site, int leaf, int s) { data_[static_cast<size_t>(site) * n_ + leaf] = static_cast<std::uint8_t>(s); }
  const std::uint8_t* row(int site) const { return data_.data() + static_cast<size_t>(site) * n_; }
  std::uint8_t* row(int site) { return data_.data() + static_cast<size_t>(site) * n_; }

  // Sites [0, k).
  Alignment prefix(int k) const;
  Alignment concat(const Alignment& other) const;

  bool operator==(const Alignment&) const = default;

 private:
  int k_ = 0;
  int n_ = 0;
  int r_ = 2;
  std::vector<std::uint8_t> data_;
};

void write_alignment(std::ostream& out, const Alignment& a);
Alignment read_alignment(std::istream& in);
// Taxon names must be integers 1..n; A,C,G,T map to states 0..3.
Alignment read_fasta(std::istream& in);

struct AlignmentFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace phylo
