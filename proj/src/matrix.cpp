#include "pungan/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace pungan {

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> d)
    : rows(r), cols(c), data(std::move(d)) {
  if (data.size() != rows * cols) {
    throw ShapeError("matrix: data length " + std::to_string(data.size()) +
                     " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix Matrix::column(std::vector<double> values) {
  const std::size_t n = values.size();
  return Matrix(n, 1, std::move(values));
}

double Matrix::scalar() const {
  if (!is_scalar()) {
    throw ShapeError("matrix: scalar() on a " + std::to_string(rows) + "x" +
                     std::to_string(cols) + " matrix");
  }
  return data[0];
}

bool Matrix::all_finite() const {
  return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) {
    throw ShapeError("matmul: " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                     " times " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
  }
  Matrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = &a.data[i * a.cols];
    double* orow = &out.data[i * b.cols];
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = &b.data[k * b.cols];
      for (std::size_t j = 0; j < b.cols; ++j) {
        orow[j] += aik * brow[j];
      }
    }
  }
  return out;
}

Matrix softmax(const Matrix& logits) {
  if (logits.size() == 0 || !logits.is_vector()) {
    throw ShapeError("softmax: expected a non-empty column vector");
  }
  const double mx = *std::max_element(logits.data.begin(), logits.data.end());
  Matrix out(logits.rows, 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.rows; ++i) {
    out.data[i] = std::exp(logits.data[i] - mx);
    sum += out.data[i];
  }
  for (double& v : out.data) v /= sum;
  return out;
}

void sgd_step(Matrix& params, const Matrix& grad, double learning_rate) {
  if (!params.same_shape(grad)) {
    throw ShapeError("sgd_step: parameter and gradient shapes differ");
  }
  for (std::size_t i = 0; i < params.data.size(); ++i) {
    params.data[i] -= learning_rate * grad.data[i];
  }
}

}  // namespace pungan
