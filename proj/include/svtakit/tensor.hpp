#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace svtakit {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense third-order tensor, stored row-major with the first index slowest:
/// entry (i, j, k) lives at (i * d2 + j) * d3 + k.
class Tensor3 {
 public:
  Tensor3(int d1, int d2, int d3);
  Tensor3(int d1, int d2, int d3, std::vector<double> data);

  int dim1() const noexcept { return d1_; }
  int dim2() const noexcept { return d2_; }
  int dim3() const noexcept { return d3_; }

  double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }
  double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }

  std::span<const double> data() const noexcept { return data_; }

  /// The d2 x d3 matrix obtained by fixing the first index.
  Eigen::Map<const RowMajorMatrix> slice(int i) const;

  /// T(M1, M2, M3)(a, b, c) = sum T(i, j, k) M1(i, a) M2(j, b) M3(k, c).
  Tensor3 contract(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2,
                   const Eigen::MatrixXd& m3) const;

  /// T(I, x, y): contract modes 2 and 3 with vectors.
  Eigen::VectorXd apply(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  friend bool operator==(const Tensor3& a, const Tensor3& b) = default;

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * static_cast<std::size_t>(d2_) + static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(d3_) +
           static_cast<std::size_t>(k);
  }

  int d1_;
  int d2_;
  int d3_;
  std::vector<double> data_;
};

/// Kronecker product: (A (x) B)((i, i'), (j, j'), (k, k')) = A(i,j,k) B(i',j',k'),
/// with the pair (i, i') flattened to i * B.dim + i'.
Tensor3 kron(const Tensor3& a, const Tensor3& b);

}  // namespace svtakit
