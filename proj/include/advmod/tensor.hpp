#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace advmod {

/**
 * Dense row-major tensor of 64-bit reals with explicit shape.
 *
 * No broadcasting, no graph: the layer stack defines its backward passes
 * explicitly, so this stays a plain value carrier plus a few checked
 * kernels. Shape mismatches throw std::invalid_argument.
 */
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims);
  Tensor(std::vector<std::size_t> dims, std::vector<double> values);

  static Tensor zeros(std::vector<std::size_t> dims);
  static Tensor full(std::vector<std::size_t> dims, double value);

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t axis) const;

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  // Rank-2 and rank-3 accessors; strides computed from shape.
  double& at(std::size_t row, std::size_t col);
  double at(std::size_t row, std::size_t col) const;
  double& at(std::size_t batch, std::size_t pos, std::size_t depth);
  double at(std::size_t batch, std::size_t pos, std::size_t depth) const;

  /// Same data, new shape (element counts must agree).
  Tensor reshaped(std::vector<std::size_t> dims) const;

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
  bool all_finite() const;
};

std::size_t shape_size(const std::vector<std::size_t>& dims);
std::string shape_str(const std::vector<std::size_t>& dims);

/// Exact dense product of [m,k] x [k,n] in 64-bit arithmetic.
Tensor matmul(const Tensor& a, const Tensor& b);

/// Concatenate [rows, a] and [rows, b] along columns into [rows, a+b].
Tensor hcat(const Tensor& left, const Tensor& right);

/// Columns [begin, begin+count) of a rank-2 tensor.
Tensor col_slice(const Tensor& t, std::size_t begin, std::size_t count);

void add_inplace(Tensor& dst, const Tensor& src);
void scale_inplace(Tensor& t, double factor);

}  // namespace advmod
