#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kanbench {

// Dense row-major matrix of doubles. Small helper, not a linear algebra
// library: the models only ever need element access and row views.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix gather_rows(const Matrix& src,
                          std::span<const std::size_t> indices) {
  Matrix out(indices.size(), src.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    auto s = src.row(indices[r]);
    auto d = out.row(r);
    for (std::size_t c = 0; c < s.size(); ++c) d[c] = s[c];
  }
  return out;
}

template <class T>
std::vector<T> gather(const std::vector<T>& src,
                      std::span<const std::size_t> indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(src[i]);
  return out;
}

}  // namespace kanbench
