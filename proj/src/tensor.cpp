#include "sggen/tensor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sggen {

namespace {

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<MatRM>;
using MapC = Eigen::Map<const MatRM>;

std::int64_t shape_product(const Shape& s) {
  std::int64_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

void require_2d(const Tensor& t, const char* who) {
  if (t.ndim() != 2) {
    throw ShapeError(std::string(who) + ": expected a 2-d tensor, got shape " +
                     shape_str(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* who) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(who) + ": shape mismatch " + shape_str(a.shape()) +
                     " vs " + shape_str(b.shape()));
  }
}

// Resolves an axis (possibly negative) and returns (outer, n, inner) strides
// so that element (o, i, in) of the flattened view maps to o*n*inner + i*inner + in.
struct AxisView {
  std::int64_t outer, n, inner;
};

AxisView axis_view(const Tensor& t, int axis, const char* who) {
  const int nd = t.ndim();
  if (axis < 0) axis += nd;
  if (axis < 0 || axis >= nd) {
    throw ShapeError(std::string(who) + ": axis out of range for shape " +
                     shape_str(t.shape()));
  }
  AxisView v{1, t.dim(axis), 1};
  for (int i = 0; i < axis; ++i) v.outer *= t.dim(i);
  for (int i = axis + 1; i < nd; ++i) v.inner *= t.dim(i);
  if (v.n == 0) throw ShapeError(std::string(who) + ": empty axis");
  return v;
}

}  // namespace

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << ',';
    os << s[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  for (auto d : shape_) {
    if (d <= 0) throw ShapeError("tensor dimensions must be positive: " + shape_str(shape_));
  }
  data_.assign(static_cast<std::size_t>(shape_product(shape_)), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (auto d : shape_) {
    if (d <= 0) throw ShapeError("tensor dimensions must be positive: " + shape_str(shape_));
  }
  if (shape_product(shape_) != static_cast<std::int64_t>(data_.size())) {
    throw ShapeError("data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_str(shape_));
  }
}

Tensor Tensor::full(Shape shape, double value) {
  Tensor t(std::move(shape));
  std::fill(t.data_.begin(), t.data_.end(), value);
  return t;
}

Tensor Tensor::vector(std::vector<double> data) {
  Shape s{static_cast<std::int64_t>(data.size())};
  return Tensor(std::move(s), std::move(data));
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Tensor::ensure_finite(const std::string& what) const {
  if (!all_finite()) throw NumericError("non-finite value in " + what);
}

Tensor Tensor::reshaped(Shape new_shape) const {
  if (shape_product(new_shape) != size()) {
    throw ShapeError("reshape " + shape_str(shape_) + " -> " + shape_str(new_shape) +
                     " changes element count");
  }
  return Tensor(std::move(new_shape), data_);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_2d(a, "matmul");
  require_2d(b, "matmul");
  if (a.dim(1) != b.dim(0)) {
    throw ShapeError("matmul: inner dimensions disagree, " + shape_str(a.shape()) +
                     " x " + shape_str(b.shape()));
  }
  Tensor out({a.dim(0), b.dim(1)});
  MapM(out.data(), a.dim(0), b.dim(1)).noalias() =
      MapC(a.data(), a.dim(0), a.dim(1)) * MapC(b.data(), b.dim(0), b.dim(1));
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require_2d(a, "matmul_nt");
  require_2d(b, "matmul_nt");
  if (a.dim(1) != b.dim(1)) {
    throw ShapeError("matmul_nt: inner dimensions disagree, " + shape_str(a.shape()) +
                     " x " + shape_str(b.shape()) + "^T");
  }
  Tensor out({a.dim(0), b.dim(0)});
  MapM(out.data(), a.dim(0), b.dim(0)).noalias() =
      MapC(a.data(), a.dim(0), a.dim(1)) * MapC(b.data(), b.dim(0), b.dim(1)).transpose();
  return out;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  require_2d(a, "matmul_tn");
  require_2d(b, "matmul_tn");
  if (a.dim(0) != b.dim(0)) {
    throw ShapeError("matmul_tn: inner dimensions disagree, " + shape_str(a.shape()) +
                     "^T x " + shape_str(b.shape()));
  }
  Tensor out({a.dim(1), b.dim(1)});
  MapM(out.data(), a.dim(1), b.dim(1)).noalias() =
      MapC(a.data(), a.dim(0), a.dim(1)).transpose() * MapC(b.data(), b.dim(0), b.dim(1));
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out = a;
  const double* pb = b.data();
  double* po = out.data();
  for (std::int64_t i = 0; i < out.size(); ++i) po[i] += pb[i];
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  Tensor out = a;
  const double* pb = b.data();
  double* po = out.data();
  for (std::int64_t i = 0; i < out.size(); ++i) po[i] -= pb[i];
  return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "hadamard");
  Tensor out = a;
  const double* pb = b.data();
  double* po = out.data();
  for (std::int64_t i = 0; i < out.size(); ++i) po[i] *= pb[i];
  return out;
}

Tensor scale(const Tensor& a, double c) {
  Tensor out = a;
  for (double& v : out.vec()) v *= c;
  return out;
}

Tensor add_rowvec(const Tensor& a, const Tensor& v) {
  require_2d(a, "add_rowvec");
  if (v.ndim() != 1 || v.dim(0) != a.dim(1)) {
    throw ShapeError("add_rowvec: vector shape " + shape_str(v.shape()) +
                     " does not match row width of " + shape_str(a.shape()));
  }
  Tensor out = a;
  const std::int64_t m = a.dim(0), n = a.dim(1);
  for (std::int64_t i = 0; i < m; ++i) {
    double* row = out.data() + i * n;
    const double* pv = v.data();
    for (std::int64_t j = 0; j < n; ++j) row[j] += pv[j];
  }
  return out;
}

Tensor mul_colvec(const Tensor& a, const Tensor& c) {
  require_2d(a, "mul_colvec");
  const std::int64_t m = a.dim(0), n = a.dim(1);
  if (c.size() != m) {
    throw ShapeError("mul_colvec: scale vector " + shape_str(c.shape()) +
                     " does not match row count of " + shape_str(a.shape()));
  }
  Tensor out = a;
  for (std::int64_t i = 0; i < m; ++i) {
    double* row = out.data() + i * n;
    const double s = c.at(i);
    for (std::int64_t j = 0; j < n; ++j) row[j] *= s;
  }
  return out;
}

Tensor relu(const Tensor& a) {
  Tensor out = a;
  for (double& v : out.vec()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor sigmoid(const Tensor& a) {
  Tensor out = a;
  for (double& v : out.vec()) v = 1.0 / (1.0 + std::exp(-v));
  return out;
}

Tensor tanh(const Tensor& a) {
  Tensor out = a;
  for (double& v : out.vec()) v = std::tanh(v);
  return out;
}

Tensor softmax(const Tensor& v, int axis) {
  const AxisView av = axis_view(v, axis, "softmax");
  Tensor out = v;
  double* p = out.data();
  for (std::int64_t o = 0; o < av.outer; ++o) {
    for (std::int64_t in = 0; in < av.inner; ++in) {
      double* base = p + o * av.n * av.inner + in;
      double mx = base[0];
      for (std::int64_t i = 1; i < av.n; ++i) mx = std::max(mx, base[i * av.inner]);
      double total = 0.0;
      for (std::int64_t i = 0; i < av.n; ++i) {
        const double e = std::exp(base[i * av.inner] - mx);
        base[i * av.inner] = e;
        total += e;
      }
      for (std::int64_t i = 0; i < av.n; ++i) base[i * av.inner] /= total;
    }
  }
  return out;
}

Tensor log_softmax(const Tensor& v, int axis) {
  const AxisView av = axis_view(v, axis, "log_softmax");
  Tensor out = v;
  double* p = out.data();
  for (std::int64_t o = 0; o < av.outer; ++o) {
    for (std::int64_t in = 0; in < av.inner; ++in) {
      double* base = p + o * av.n * av.inner + in;
      double mx = base[0];
      for (std::int64_t i = 1; i < av.n; ++i) mx = std::max(mx, base[i * av.inner]);
      double total = 0.0;
      for (std::int64_t i = 0; i < av.n; ++i) total += std::exp(base[i * av.inner] - mx);
      const double lse = mx + std::log(total);
      for (std::int64_t i = 0; i < av.n; ++i) base[i * av.inner] -= lse;
    }
  }
  return out;
}

Tensor layer_norm(const Tensor& v, const Tensor& gain, const Tensor& bias, double eps) {
  if (v.ndim() < 1) throw ShapeError("layer_norm: scalar input");
  const std::int64_t n = v.dim(v.ndim() - 1);
  if (gain.ndim() != 1 || gain.dim(0) != n || bias.ndim() != 1 || bias.dim(0) != n) {
    throw ShapeError("layer_norm: gain/bias must be length " + std::to_string(n));
  }
  const std::int64_t rows = v.size() / n;
  Tensor out = v;
  for (std::int64_t r = 0; r < rows; ++r) {
    double* row = out.data() + r * n;
    double mean = 0.0;
    for (std::int64_t j = 0; j < n; ++j) mean += row[j];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
      const double d = row[j] - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + eps);
    for (std::int64_t j = 0; j < n; ++j) {
      row[j] = (row[j] - mean) * inv * gain.at(j) + bias.at(j);
    }
  }
  return out;
}

Tensor concat(std::span<const Tensor> parts, int axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const int nd = parts[0].ndim();
  if (axis < 0) axis += nd;
  if (axis < 0 || axis >= nd) throw ShapeError("concat: axis out of range");
  Shape out_shape = parts[0].shape();
  for (std::size_t p = 1; p < parts.size(); ++p) {
    if (parts[p].ndim() != nd) throw ShapeError("concat: rank mismatch");
    for (int i = 0; i < nd; ++i) {
      if (i == axis) continue;
      if (parts[p].dim(i) != out_shape[static_cast<std::size_t>(i)]) {
        throw ShapeError("concat: non-concatenated axes must agree, " +
                         shape_str(parts[p].shape()) + " vs " + shape_str(parts[0].shape()));
      }
    }
    out_shape[static_cast<std::size_t>(axis)] += parts[p].dim(axis);
  }
  Tensor out(out_shape);
  std::int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= out_shape[static_cast<std::size_t>(i)];
  for (int i = axis + 1; i < nd; ++i) inner *= out_shape[static_cast<std::size_t>(i)];
  std::int64_t offset = 0;  // along the concat axis
  for (const Tensor& part : parts) {
    const std::int64_t pn = part.dim(axis);
    for (std::int64_t o = 0; o < outer; ++o) {
      const double* src = part.data() + o * pn * inner;
      double* dst = out.data() + (o * out_shape[static_cast<std::size_t>(axis)] + offset) * inner;
      std::copy(src, src + pn * inner, dst);
    }
    offset += pn;
  }
  return out;
}

Tensor concat(const Tensor& a, const Tensor& b, int axis) {
  const Tensor parts[2] = {a, b};
  return concat(std::span<const Tensor>(parts, 2), axis);
}

Tensor gather_rows(const Tensor& a, std::span<const std::int64_t> rows) {
  require_2d(a, "gather_rows");
  const std::int64_t n = a.dim(1);
  Tensor out({static_cast<std::int64_t>(rows.size()), n});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::int64_t src = rows[r];
    if (src < 0 || src >= a.dim(0)) {
      throw ShapeError("gather_rows: row " + std::to_string(src) + " out of range");
    }
    std::copy(a.data() + src * n, a.data() + (src + 1) * n,
              out.data() + static_cast<std::int64_t>(r) * n);
  }
  return out;
}

double sum(const Tensor& a) {
  return std::accumulate(a.vec().begin(), a.vec().end(), 0.0);
}

std::int64_t argmax(const Tensor& a) {
  if (a.empty()) throw ShapeError("argmax: empty tensor");
  std::int64_t best = 0;
  for (std::int64_t i = 1; i < a.size(); ++i) {
    if (a.at(i) > a.at(best)) best = i;
  }
  return best;
}

}  // namespace sggen
