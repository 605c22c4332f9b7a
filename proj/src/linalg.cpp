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

#include "covest/linalg.hpp"
#include "covest/errors.hpp"

#include <cmath>

namespace covest::linalg
{
    arma::cx_mat hermitian_part(const arma::cx_mat &a)
    {
        return 0.5 * (a + a.t());
    }

    arma::cx_mat hermitian_pinv(const arma::cx_mat &g, double rel_tol)
    {
        arma::vec lambda;
        arma::cx_mat u;
        if (!arma::eig_sym(lambda, u, hermitian_part(g)))
            throw numerical_error("hermitian_pinv: eigendecomposition failed.");

        const double lmax = lambda.n_elem ? arma::max(arma::abs(lambda)) : 0.0;
        arma::vec inv(lambda.n_elem, arma::fill::zeros);
        for (arma::uword i = 0; i < lambda.n_elem; ++i)
            if (lambda(i) > rel_tol * lmax && lambda(i) > 0.0)
                inv(i) = 1.0 / lambda(i);

        return u * arma::diagmat(inv) * u.t();
    }

    arma::cx_mat hermitian_inv_sqrt(const arma::cx_mat &a, double rel_floor)
    {
        arma::vec lambda;
        arma::cx_mat u;
        if (!arma::eig_sym(lambda, u, hermitian_part(a)))
            throw numerical_error("hermitian_inv_sqrt: eigendecomposition failed.");

        const double lmax = lambda.max();
        if (!(lmax > 0.0) || lambda.min() < rel_floor * lmax)
            throw numerical_error("hermitian_inv_sqrt: matrix is rank deficient.");

        return u * arma::diagmat(1.0 / arma::sqrt(lambda)) * u.t();
    }

    DominantSubspace dominant_subspace(const arma::cx_mat &r, arma::uword m)
    {
        arma::vec lambda;
        arma::cx_mat u;
        if (!arma::eig_sym(lambda, u, hermitian_part(r)))
            throw numerical_error("dominant_subspace: eigendecomposition failed.");

        // eig_sym returns ascending order
        DominantSubspace out;
        out.eigenvalues = arma::flipud(lambda);
        u = arma::fliplr(u);
        m = std::min<arma::uword>(m, u.n_cols);
        if (m == 0)
        {
            out.basis.set_size(r.n_rows, 0);
            return out;
        }
        out.basis = u.cols(0, m - 1);

        if (m < lambda.n_elem)
        {
            const double scale = std::max(std::abs(out.eigenvalues(0)), 1e-300);
            out.tie_at_cut = std::abs(out.eigenvalues(m - 1) - out.eigenvalues(m)) <= 1e-12 * scale &&
                             out.eigenvalues(m - 1) > 1e-12 * scale;
        }
        return out;
    }

    arma::cx_mat orthonormal_basis(const arma::cx_mat &a, double rel_tol)
    {
        arma::cx_mat u;
        arma::vec s;
        arma::cx_mat v;
        if (!arma::svd_econ(u, s, v, a, "left"))
            throw numerical_error("orthonormal_basis: SVD failed.");
        if (s.is_empty() || s(0) == 0.0)
            return arma::cx_mat(a.n_rows, 0);
        arma::uword rank = 0;
        while (rank < s.n_elem && s(rank) > rel_tol * s(0))
            ++rank;
        return u.cols(0, rank - 1);
    }
}
