#pragma once

#include <Eigen/Dense>

#include "svtakit/tensor.hpp"

namespace svtakit::detail {

// Q(X, Y)(i, i') = sum T_A(i,j,k) T_B(i',j',k') X(j,j') Y(k,k').
Eigen::MatrixXd bilinear(const Tensor3& ta, const Tensor3& tb, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& y);

// L(G)(m,m') = sum T(i,m,k) T(i',m',k') G(i,i') H(k,k')
//            + sum T(i,k,m) T(i',k',m') G(i,i') H(k,k').
Eigen::MatrixXd context_map(const Tensor3& t, const Eigen::MatrixXd& g, const Eigen::MatrixXd& h);

}  // namespace svtakit::detail
