#pragma once

// Dense row-major tensor of 64-bit reals plus the raw numeric kernels
// the rest of the engine is built from. Kernels are pure functions;
// gradient recording lives in autodiff.hpp on top of these.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sggen/error.hpp"

namespace sggen {

using Shape = std::vector<std::int64_t>;

std::string shape_str(const Shape& s);

class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(Shape shape);  // zero filled
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor full(Shape shape, double value);
  static Tensor vector(std::vector<double> data);  // 1-d

  const Shape& shape() const { return shape_; }
  int ndim() const { return static_cast<int>(shape_.size()); }
  std::int64_t dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& vec() { return data_; }
  const std::vector<double>& vec() const { return data_; }

  double& at(std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
  double at(std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }
  double& at(std::int64_t i, std::int64_t j) {
    return data_[static_cast<std::size_t>(i * shape_[1] + j)];
  }
  double at(std::int64_t i, std::int64_t j) const {
    return data_[static_cast<std::size_t>(i * shape_[1] + j)];
  }
  double& at(std::int64_t i, std::int64_t j, std::int64_t k) {
    return data_[static_cast<std::size_t>((i * shape_[1] + j) * shape_[2] + k)];
  }
  double at(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return data_[static_cast<std::size_t>((i * shape_[1] + j) * shape_[2] + k)];
  }

  bool all_finite() const;
  // Throws NumericError naming `what` if any value is NaN/Inf.
  void ensure_finite(const std::string& what) const;

  Tensor reshaped(Shape new_shape) const;

  bool operator==(const Tensor& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

 private:
  Shape shape_;
  std::vector<double> data_;
};

// ---- matrix kernels (strict 2-d) ----

Tensor matmul(const Tensor& a, const Tensor& b);     // [m,k]x[k,n]
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // a * b^T, [m,k]x[n,k]
Tensor matmul_tn(const Tensor& a, const Tensor& b);  // a^T * b, [k,m]x[k,n]

// ---- elementwise / broadcast ----

Tensor add(const Tensor& a, const Tensor& b);       // identical shapes
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);  // identical shapes
Tensor scale(const Tensor& a, double c);
Tensor add_rowvec(const Tensor& a, const Tensor& v);   // [m,n] + [n]
Tensor mul_colvec(const Tensor& a, const Tensor& c);   // row i of a scaled by c[i]
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);

// ---- normalizations ----

// Numerically stable softmax along `axis` (negative axes count from the end).
Tensor softmax(const Tensor& v, int axis = -1);
Tensor log_softmax(const Tensor& v, int axis = -1);

// Per-row normalization over the last axis: subtract the mean, divide by
// sqrt(variance + eps), then scale/shift by gain and bias (both [n]).
Tensor layer_norm(const Tensor& v, const Tensor& gain, const Tensor& bias,
                  double eps = 1e-5);

// ---- structure ----

Tensor concat(std::span<const Tensor> parts, int axis);
Tensor concat(const Tensor& a, const Tensor& b, int axis);
Tensor gather_rows(const Tensor& a, std::span<const std::int64_t> rows);

// ---- reductions ----

double sum(const Tensor& a);
// Index of the maximum value; ties resolve to the lowest index.
std::int64_t argmax(const Tensor& a);

}  // namespace sggen
