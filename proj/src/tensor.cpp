#include "svtakit/tensor.hpp"

#include <cmath>

#include "svtakit/error.hpp"

namespace svtakit {

Tensor3::Tensor3(int d1, int d2, int d3)
    : Tensor3(d1, d2, d3,
              std::vector<double>(static_cast<std::size_t>(d1) * static_cast<std::size_t>(d2) *
                                      static_cast<std::size_t>(d3),
                                  0.0)) {}

Tensor3::Tensor3(int d1, int d2, int d3, std::vector<double> data)
    : d1_(d1), d2_(d2), d3_(d3), data_(std::move(data)) {
  if (d1 < 0 || d2 < 0 || d3 < 0) raise(Errc::InvalidArgument, "negative tensor dimension");
  const auto expected = static_cast<std::size_t>(d1) * static_cast<std::size_t>(d2) *
                        static_cast<std::size_t>(d3);
  if (data_.size() != expected) {
    raise(Errc::InvalidArgument, "tensor data has " + std::to_string(data_.size()) +
                                     " entries, expected " + std::to_string(expected));
  }
}

Eigen::Map<const RowMajorMatrix> Tensor3::slice(int i) const {
  return {data_.data() + index(i, 0, 0), d2_, d3_};
}

Tensor3 Tensor3::contract(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2,
                          const Eigen::MatrixXd& m3) const {
  if (m1.rows() != d1_ || m2.rows() != d2_ || m3.rows() != d3_) {
    raise(Errc::InvalidArgument, "contraction matrix dimensions do not match the tensor");
  }
  const auto e1 = static_cast<int>(m1.cols());
  const auto e2 = static_cast<int>(m2.cols());
  const auto e3 = static_cast<int>(m3.cols());

  // Mode 3: rows (i, j), columns k.
  Eigen::Map<const RowMajorMatrix> flat(data_.data(), static_cast<Eigen::Index>(d1_) * d2_, d3_);
  RowMajorMatrix step3 = flat * m3;  // (d1 d2) x e3

  // Mode 2, one first-index slab at a time.
  RowMajorMatrix step2(d1_, static_cast<Eigen::Index>(e2) * e3);
  for (int i = 0; i < d1_; ++i) {
    RowMajorMatrix slab = m2.transpose() * step3.middleRows(static_cast<Eigen::Index>(i) * d2_, d2_);
    step2.row(i) = Eigen::Map<const Eigen::RowVectorXd>(slab.data(), slab.size());
  }

  // Mode 1.
  RowMajorMatrix step1 = m1.transpose() * step2;  // e1 x (e2 e3)
  return Tensor3(e1, e2, e3, std::vector<double>(step1.data(), step1.data() + step1.size()));
}

Eigen::VectorXd Tensor3::apply(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  Eigen::VectorXd out(d1_);
  for (int i = 0; i < d1_; ++i) out(i) = x.dot(slice(i) * y);
  return out;
}

double Tensor3::frobenius_norm() const {
  double acc = 0.0;
  for (double v : data_) acc += v * v;
  return std::sqrt(acc);
}

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool Tensor3::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor3 kron(const Tensor3& a, const Tensor3& b) {
  Tensor3 out(a.dim1() * b.dim1(), a.dim2() * b.dim2(), a.dim3() * b.dim3());
  for (int i = 0; i < a.dim1(); ++i)
    for (int j = 0; j < a.dim2(); ++j)
      for (int k = 0; k < a.dim3(); ++k) {
        const double v = a(i, j, k);
        if (v == 0.0) continue;
        for (int i2 = 0; i2 < b.dim1(); ++i2)
          for (int j2 = 0; j2 < b.dim2(); ++j2)
            for (int k2 = 0; k2 < b.dim3(); ++k2) {
              out(i * b.dim1() + i2, j * b.dim2() + j2, k * b.dim3() + k2) = v * b(i2, j2, k2);
            }
      }
  return out;
}

}  // namespace svtakit
