// SPDX-License-Identifier: Apache-2.0
//
// csisense - Wi-Fi channel state information sensing toolkit
// Copyright (C) 2026 The csisense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "csisense/error.hpp"
#include "csisense/preprocess.hpp"

namespace csisense {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Economy factorization H = U diag(S) V^T with min(t, d) singular values in
// non-increasing order.
template <typename Scalar>
struct SvdResult {
  MatrixX<Scalar> U;
  VectorX<Scalar> S;
  MatrixX<Scalar> V;

  MatrixX<Scalar> reconstruct() const { return U * S.asDiagonal() * V.transpose(); }
};

namespace detail {

template <typename Derived>
void require_finite_matrix(const Eigen::MatrixBase<Derived>& h) {
  if (h.rows() < 1 || h.cols() < 1) throw std::invalid_argument("matrix must be non-empty");
  if (!h.allFinite()) throw NumericError("matrix contains non-finite entries");
}

// Tall case (t >= d): Householder QR, then one-sided Jacobi SVD of the d x d
// triangular factor.
template <typename Scalar>
SvdResult<Scalar> tall_svd(const MatrixX<Scalar>& h, bool want_u) {
  const Index d = h.cols();
  Eigen::HouseholderQR<MatrixX<Scalar>> qr(h);
  MatrixX<Scalar> r = qr.matrixQR().topRows(d).template triangularView<Eigen::Upper>();
  const unsigned opts = want_u ? (Eigen::ComputeFullU | Eigen::ComputeFullV) : Eigen::ComputeFullV;
  Eigen::JacobiSVD<MatrixX<Scalar>> jac(r, opts);
  SvdResult<Scalar> out;
  out.S = jac.singularValues();
  out.V = jac.matrixV();
  if (want_u) {
    out.U = MatrixX<Scalar>::Identity(h.rows(), d);
    out.U.topRows(d) = jac.matrixU();
    out.U = qr.householderQ() * out.U;
  }
  return out;
}

} // namespace detail

template <typename Derived>
SvdResult<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& h) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite_matrix(h);
  if (h.rows() >= h.cols()) {
    return detail::tall_svd<Scalar>(h.eval(), true);
  }
  auto t = detail::tall_svd<Scalar>(h.transpose().eval(), true);
  return {std::move(t.V), std::move(t.S), std::move(t.U)};
}

// H - sum_{i <= k} s_i u_i v_i^T, computed as H (I - V_k V_k^T) in the tall case.
template <typename Derived>
MatrixX<typename Derived::Scalar> remove_top_components(const Eigen::MatrixBase<Derived>& h, Index k = 1) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite_matrix(h);
  if (k < 0) throw std::invalid_argument("component count must be non-negative");
  const Index r = std::min(h.rows(), h.cols());
  k = std::min(k, r);
  MatrixX<Scalar> out = h;
  if (k == 0) return out;
  if (h.rows() >= h.cols()) {
    const auto f = detail::tall_svd<Scalar>(h.eval(), false);
    const auto vk = f.V.leftCols(k);
    out.noalias() -= (h * vk) * vk.transpose();
  } else {
    const auto f = detail::tall_svd<Scalar>(h.transpose().eval(), false);
    const auto uk = f.V.leftCols(k);
    out.noalias() -= uk * (uk.transpose() * h);
  }
  return out;
}

enum class SvdScope { PerPair30, Stacked120 };

struct SvdMode {
  SvdScope scope = SvdScope::Stacked120;
  Index removed_components = 1;
};

// Zero the largest singular value(s) either per Tx-Rx pair block or over the
// stacked matrix of all streams. Shape and stream map are unchanged.
StreamMatrix remove_background(const StreamMatrix& m, const SvdMode& mode = {});

} // namespace csisense
