#pragma once

#include <cstddef>
#include <vector>

#include "pungan/errors.hpp"

namespace pungan {

// Dense row-major matrix of doubles. Column vectors are n x 1 matrices.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> d);

  static Matrix zeros(std::size_t r, std::size_t c) { return Matrix(r, c); }
  static Matrix column(std::vector<double> values);

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Matrix& other) const {
    return rows == other.rows && cols == other.cols;
  }
  bool is_vector() const { return cols == 1; }
  bool is_scalar() const { return rows == 1 && cols == 1; }
  double scalar() const;

  void fill(double v) { std::fill(data.begin(), data.end(), v); }
  bool all_finite() const;
};

// Standard product, no tape involvement. Throws ShapeError on a.cols != b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);

// Numerically stable softmax (max subtraction) over a column vector.
// Throws ShapeError on empty or non-vector input.
Matrix softmax(const Matrix& logits);

// p <- p - lr * g elementwise. Throws ShapeError on shape mismatch.
void sgd_step(Matrix& params, const Matrix& grad, double learning_rate);

}  // namespace pungan
