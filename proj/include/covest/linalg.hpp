// SPDX-License-Identifier: Apache-2.0
//
// covest - spatial channel covariance estimation for hybrid antenna arrays
// Copyright (C) 2026 The covest authors
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

#ifndef COVEST_LINALG_HPP
#define COVEST_LINALG_HPP

#include <armadillo>

namespace covest::linalg
{
    // Pseudoinverse of a Hermitian PSD matrix. Eigenvalues below rel_tol * lambda_max
    // are treated as zero.
    arma::cx_mat hermitian_pinv(const arma::cx_mat &g, double rel_tol);

    // (A)^{-1/2} for Hermitian positive definite A. Throws numerical_error when the
    // smallest eigenvalue is below rel_floor * lambda_max.
    arma::cx_mat hermitian_inv_sqrt(const arma::cx_mat &a, double rel_floor = 1e-12);

    struct DominantSubspace
    {
        arma::cx_mat basis;     // N x m, columns sorted by descending eigenvalue
        arma::vec eigenvalues;  // all eigenvalues, descending
        bool tie_at_cut = false;
    };

    // Dominant m-dimensional eigenspace of a Hermitian matrix.
    DominantSubspace dominant_subspace(const arma::cx_mat &r, arma::uword m);

    // Orthonormal basis for the column span (thin QR, rank-revealing by R diagonal).
    arma::cx_mat orthonormal_basis(const arma::cx_mat &a, double rel_tol = 1e-10);

    arma::cx_mat hermitian_part(const arma::cx_mat &a);
}

#endif
