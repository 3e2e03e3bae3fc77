#include "sparcs/rank/contingency.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparcs::rank {

ContingencyTable::ContingencyTable(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), counts_(rows * cols, 0.0) {}

ContingencyTable ContingencyTable::from_codes(std::span<const std::uint32_t> x,
                                              std::span<const std::uint32_t> y) {
  if (x.size() != y.size()) throw std::invalid_argument("contingency: length mismatch");
  std::uint32_t max_x = 0;
  std::uint32_t max_y = 0;
  for (auto v : x) max_x = std::max(max_x, v);
  for (auto v : y) max_y = std::max(max_y, v);
  ContingencyTable table(x.empty() ? 0 : max_x + 1, y.empty() ? 0 : max_y + 1);
  for (std::size_t i = 0; i < x.size(); ++i) table.counts_[x[i] * table.cols_ + y[i]] += 1.0;
  return table;
}

void ContingencyTable::add(std::size_t row, std::size_t col, double count) {
  if (row >= rows_ || col >= cols_) throw std::out_of_range("contingency cell out of range");
  counts_[row * cols_ + col] += count;
}

double ContingencyTable::total() const {
  double t = 0.0;
  for (double c : counts_) t += c;
  return t;
}

ContingencyTable ContingencyTable::transposed() const {
  ContingencyTable t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t.counts_[c * rows_ + r] = at(r, c);
  }
  return t;
}

namespace {

struct Margins {
  std::vector<double> rows;
  std::vector<double> cols;
  double n = 0.0;
};

Margins margins(const ContingencyTable& t) {
  Margins m{std::vector<double>(t.rows(), 0.0), std::vector<double>(t.cols(), 0.0), 0.0};
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) {
      m.rows[r] += t.at(r, c);
      m.cols[c] += t.at(r, c);
    }
  }
  for (double v : m.rows) m.n += v;
  return m;
}

}  // namespace

double chi_square(const ContingencyTable& table) {
  const Margins m = margins(table);
  const auto nonempty = [](const std::vector<double>& v) {
    return std::count_if(v.begin(), v.end(), [](double x) { return x > 0.0; });
  };
  if (nonempty(m.rows) < 2 || nonempty(m.cols) < 2) return 0.0;
  double stat = 0.0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (m.rows[r] == 0.0) continue;
    for (std::size_t c = 0; c < table.cols(); ++c) {
      if (m.cols[c] == 0.0) continue;
      const double expected = m.rows[r] * m.cols[c] / m.n;
      const double diff = table.at(r, c) - expected;
      stat += diff * diff / expected;
    }
  }
  return stat;
}

double mutual_information(const ContingencyTable& table) {
  const Margins m = margins(table);
  if (m.n == 0.0) return 0.0;
  double mi = 0.0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      const double o = table.at(r, c);
      if (o == 0.0) continue;
      mi += (o / m.n) * std::log(o * m.n / (m.rows[r] * m.cols[c]));
    }
  }
  // Rounding can leave a tiny negative value for independent tables.
  return std::max(0.0, mi);
}

}  // namespace sparcs::rank
