#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hardattn {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Sizes in this project stay below ~64x64.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool is_zero() const noexcept;
  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);

/// m * v. Throws DimensionError unless m.cols() == v.size().
Vector matvec(const Matrix& m, std::span<const double> v);

/// Writes m * v into out (out.size() == m.rows()).
void matvec_into(const Matrix& m, std::span<const double> v, std::span<double> out);

/// Accumulates m^T * v into out (out.size() == m.cols(), v.size() == m.rows()).
void matvec_transposed_add(const Matrix& m, std::span<const double> v, std::span<double> out);

/// m += scale * (u outer v).
void add_outer(Matrix& m, std::span<const double> u, std::span<const double> v, double scale = 1.0);

/// Softmax with max-subtraction. Throws InvalidArgument on empty input.
Vector softmax_stable(std::span<const double> v);

/// In-place variant used on hot paths.
void softmax_in_place(std::span<double> v);

double sigmoid(double x) noexcept;

/// log(1 + exp(x)) without overflow.
double softplus(double x) noexcept;

struct MeanVar {
  double mean;
  double var;
};

/// Population mean and variance (divides by |v|). Throws InvalidArgument on empty input.
MeanVar mean_var(std::span<const double> v);

bool all_finite(std::span<const double> v) noexcept;

}  // namespace hardattn
