#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sparcs::rank {

// Dense count table over two discrete variables (row levels x column levels).
class ContingencyTable {
 public:
  ContingencyTable(std::size_t rows, std::size_t cols);
  // Levels must be < the corresponding table dimension; sizes are taken as
  // max level + 1 when built from codes.
  static ContingencyTable from_codes(std::span<const std::uint32_t> x, std::span<const std::uint32_t> y);

  void add(std::size_t row, std::size_t col, double count = 1.0);
  double at(std::size_t row, std::size_t col) const { return counts_[row * cols_ + col]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double total() const;
  ContingencyTable transposed() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> counts_;
};

// Pearson statistic sum (O - E)^2 / E with E = row_total * col_total / n,
// after dropping empty rows and columns. 0 when fewer than two non-empty
// rows or columns remain.
double chi_square(const ContingencyTable& table);

// Empirical mutual information in nats; empty cells contribute 0.
double mutual_information(const ContingencyTable& table);

}  // namespace sparcs::rank
