#include "advmod/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace advmod {

std::size_t shape_size(const std::vector<std::size_t>& dims) {
  std::size_t n = 1;
  for (std::size_t d : dims) n *= d;
  return n;
}

std::string shape_str(const std::vector<std::size_t>& dims) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) os << ',';
    os << dims[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(std::vector<std::size_t> dims)
    : shape(std::move(dims)), data(shape_size(shape), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> dims, std::vector<double> values)
    : shape(std::move(dims)), data(std::move(values)) {
  if (shape_size(shape) != data.size()) {
    throw std::invalid_argument("tensor: " + shape_str(shape) + " does not hold " +
                                std::to_string(data.size()) + " values");
  }
}

Tensor Tensor::zeros(std::vector<std::size_t> dims) { return Tensor(std::move(dims)); }

Tensor Tensor::full(std::vector<std::size_t> dims, double value) {
  Tensor t(std::move(dims));
  for (double& v : t.data) v = value;
  return t;
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape.size()) {
    throw std::invalid_argument("tensor: axis " + std::to_string(axis) +
                                " out of range for " + shape_str(shape));
  }
  return shape[axis];
}

double& Tensor::at(std::size_t row, std::size_t col) {
  return data[row * shape[1] + col];
}

double Tensor::at(std::size_t row, std::size_t col) const {
  return data[row * shape[1] + col];
}

double& Tensor::at(std::size_t batch, std::size_t pos, std::size_t depth) {
  return data[(batch * shape[1] + pos) * shape[2] + depth];
}

double Tensor::at(std::size_t batch, std::size_t pos, std::size_t depth) const {
  return data[(batch * shape[1] + pos) * shape[2] + depth];
}

Tensor Tensor::reshaped(std::vector<std::size_t> dims) const {
  if (shape_size(dims) != data.size()) {
    throw std::invalid_argument("tensor: cannot reshape " + shape_str(shape) +
                                " to " + shape_str(dims));
  }
  return Tensor(std::move(dims), data);
}

bool Tensor::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.shape[1] != b.shape[0]) {
    throw std::invalid_argument("matmul: incompatible shapes " + shape_str(a.shape) +
                                " x " + shape_str(b.shape));
  }
  const std::size_t m = a.shape[0], k = a.shape[1], n = b.shape[1];
  Tensor out({m, n});
  // i-k-j order keeps the inner loop contiguous in both b and out.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a.data[i * k + p];
      const double* brow = &b.data[p * n];
      double* orow = &out.data[i * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  return out;
}

Tensor hcat(const Tensor& left, const Tensor& right) {
  if (left.rank() != 2 || right.rank() != 2 || left.shape[0] != right.shape[0]) {
    throw std::invalid_argument("hcat: incompatible shapes " + shape_str(left.shape) +
                                " and " + shape_str(right.shape));
  }
  const std::size_t rows = left.shape[0], a = left.shape[1], b = right.shape[1];
  Tensor out({rows, a + b});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < a; ++c) out.at(r, c) = left.at(r, c);
    for (std::size_t c = 0; c < b; ++c) out.at(r, a + c) = right.at(r, c);
  }
  return out;
}

Tensor col_slice(const Tensor& t, std::size_t begin, std::size_t count) {
  if (t.rank() != 2 || begin + count > t.shape[1]) {
    throw std::invalid_argument("col_slice: [" + std::to_string(begin) + "," +
                                std::to_string(begin + count) + ") out of range for " +
                                shape_str(t.shape));
  }
  const std::size_t rows = t.shape[0];
  Tensor out({rows, count});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < count; ++c) out.at(r, c) = t.at(r, begin + c);
  }
  return out;
}

void add_inplace(Tensor& dst, const Tensor& src) {
  if (!dst.same_shape(src)) {
    throw std::invalid_argument("add: shape mismatch " + shape_str(dst.shape) +
                                " vs " + shape_str(src.shape));
  }
  for (std::size_t i = 0; i < dst.size(); ++i) dst.data[i] += src.data[i];
}

void scale_inplace(Tensor& t, double factor) {
  for (double& v : t.data) v *= factor;
}

}  // namespace advmod
