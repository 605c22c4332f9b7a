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

#include "covest/cpd_als.hpp"
#include "covest/errors.hpp"
#include "covest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace covest
{
    namespace
    {
        // Fit is exact to working precision; further sweeps only shuffle rounding noise.
        constexpr double exact_fit = 1e-14;

        arma::cx_mat random_factor(arma::uword rows, arma::uword rank, Rng &rng)
        {
            std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
            arma::cx_mat f(rows, rank);
            for (arma::uword c = 0; c < rank; ++c)
                for (arma::uword r = 0; r < rows; ++r)
                {
                    const double re = gauss(rng);
                    const double im = gauss(rng);
                    f(r, c) = cx(re, im);
                }
            return f;
        }

        arma::cx_mat svd_factor(const arma::cx_mat &y_unfold, arma::uword rank, Rng &rng)
        {
            arma::cx_mat u;
            arma::vec s;
            arma::cx_mat v;
            arma::cx_mat f = random_factor(y_unfold.n_rows, rank, rng);
            if (arma::svd_econ(u, s, v, y_unfold, "left"))
            {
                const arma::uword take = std::min<arma::uword>(rank, u.n_cols);
                f.cols(0, take - 1) = u.cols(0, take - 1);
            }
            return f;
        }

        double relative_residual(const arma::cx_mat &y_unfold, const arma::cx_mat &f, const arma::cx_mat &kr,
                                 double y_norm)
        {
            return arma::norm(y_unfold - f * kr.st(), "fro") / y_norm;
        }

        // Move column norms of B and C into G; leaves [[B,C,G]] unchanged.
        void balance(FactorTriple &f)
        {
            for (arma::uword r = 0; r < f.rank(); ++r)
            {
                const double nb = arma::norm(f.f1.col(r));
                const double nc = arma::norm(f.f2.col(r));
                if (nb > 0.0 && nc > 0.0)
                {
                    f.f1.col(r) /= nb;
                    f.f2.col(r) /= nc;
                    f.f3.col(r) *= nb * nc;
                }
            }
        }
    }

    std::optional<FactorTriple> gevd_factors(const ComplexTensor3 &y, arma::uword rank, Rng &rng)
    {
        const Dims3 dims = y.dims();
        std::normal_distribution<double> gauss(0.0, 1.0);

        std::optional<FactorTriple> best;
        double best_sep = -1.0;

        for (int s = 1; s <= 3; ++s)
        {
            // the two remaining modes, lo varies fastest inside a row of the mode-s unfolding
            const int lo = s == 1 ? 2 : 1;
            const int hi = s == 3 ? 2 : 3;
            const arma::uword n_lo = dims[lo - 1], n_hi = dims[hi - 1], n_s = dims[s - 1];
            if (n_lo < rank || n_hi < rank || n_s < 2)
                continue;

            arma::cx_mat u_lo, v_tmp, u_hi;
            arma::vec sv;
            if (!arma::svd_econ(u_lo, sv, v_tmp, unfold(y, lo), "left") ||
                !arma::svd_econ(u_hi, sv, v_tmp, unfold(y, hi), "left"))
                continue;
            u_lo = u_lo.cols(0, rank - 1);
            u_hi = u_hi.cols(0, rank - 1);

            const arma::cx_mat ys = unfold(y, s);
            arma::cx_mat s_a(rank, rank, arma::fill::zeros), s_b(rank, rank, arma::fill::zeros);
            for (arma::uword i = 0; i < n_s; ++i)
            {
                const arma::cx_mat slice = arma::reshape(ys.row(i).st(), n_lo, n_hi);
                const arma::cx_mat core = u_lo.t() * slice * arma::conj(u_hi);
                const cx wa(gauss(rng), gauss(rng));
                const cx wb(gauss(rng), gauss(rng));
                s_a += wa * core;
                s_b += wb * core;
            }

            arma::cx_mat s_b_inv;
            if (!arma::inv(s_b_inv, s_b))
                continue;
            arma::cx_vec lambda;
            arma::cx_mat vecs;
            if (!arma::eig_gen(lambda, vecs, arma::cx_mat(s_a * s_b_inv), "balance"))
                continue;

            // Separation of the generalized eigenvalues decides how well conditioned the split is.
            double sep = std::numeric_limits<double>::infinity();
            const double scale = arma::abs(lambda).max();
            for (arma::uword a = 0; a < rank; ++a)
                for (arma::uword b = a + 1; b < rank; ++b)
                    sep = std::min(sep, std::abs(lambda(a) - lambda(b)) / scale);
            if (rank == 1)
                sep = 1.0;
            if (!(sep > best_sep))
                continue;

            arma::cx_mat f_lo = u_lo * vecs;
            arma::cx_mat k;
            if (!arma::pinv(k, f_lo))
                continue;
            // Y_(lo) = F_lo (F_a kr F_b)^T; the coefficient columns are rank-one in the other two modes.
            const int a_mode = lo == 3 ? 2 : 3; // slower of the two remaining modes
            const int b_mode = 6 - lo - a_mode;
            const arma::cx_mat coef = (k * unfold(y, lo)).st();
            arma::cx_mat f_a(dims[a_mode - 1], rank), f_b(dims[b_mode - 1], rank);
            for (arma::uword r = 0; r < rank; ++r)
            {
                arma::cx_mat u, v;
                arma::vec sig;
                const arma::cx_mat m = arma::reshape(coef.col(r), dims[b_mode - 1], dims[a_mode - 1]);
                if (!arma::svd_econ(u, sig, v, m))
                    break;
                f_b.col(r) = sig(0) * u.col(0);
                f_a.col(r) = arma::conj(v.col(0));
            }

            FactorTriple f;
            arma::cx_mat *slots[3] = {&f.f1, &f.f2, &f.f3};
            *slots[lo - 1] = f_lo;
            *slots[a_mode - 1] = f_a;
            *slots[b_mode - 1] = f_b;
            best = f;
            best_sep = sep;
        }
        return best;
    }

    AlsInit parse_als_init(const std::string &name)
    {
        if (name == "random")
            return AlsInit::random;
        if (name == "svd_warm")
            return AlsInit::svd_warm;
        if (name == "gevd")
            return AlsInit::gevd;
        throw config_error("Unknown ALS init mode '" + name + "'.");
    }

    std::string to_string(AlsInit init)
    {
        switch (init)
        {
        case AlsInit::random:
            return "random";
        case AlsInit::svd_warm:
            return "svd_warm";
        case AlsInit::gevd:
            return "gevd";
        }
        return "?";
    }

    void AlsOptions::validate() const
    {
        if (rank < 1)
            throw config_error("ALS rank must be at least 1.");
        if (!(rel_tol > 0.0))
            throw config_error("ALS rel_tol must be positive.");
        if (n_restarts < 1)
            throw config_error("ALS needs at least one restart.");
        if (max_iters < 1)
            throw config_error("ALS max_iters must be at least 1.");
        if (!(pinv_tol > 0.0))
            throw config_error("ALS pinv_tol must be positive.");
    }

    arma::cx_mat als_update_mode(const arma::cx_mat &y_unfold, const arma::cx_mat &f_a, const arma::cx_mat &f_b,
                                 double pinv_tol)
    {
        if (f_a.n_cols != f_b.n_cols)
            throw dimension_error("als_update_mode: factor column counts differ.");
        if (f_a.n_rows * f_b.n_rows != y_unfold.n_cols)
            throw dimension_error("als_update_mode: Khatri-Rao rows do not match the unfolding.");

        const arma::cx_mat kr = khatri_rao(f_a, f_b);
        const arma::cx_mat gram = (f_a.t() * f_a) % (f_b.t() * f_b);
        return y_unfold * arma::conj(kr * linalg::hermitian_pinv(gram, pinv_tol));
    }

    AlsResult cpd_als(const ComplexTensor3 &y, const AlsOptions &opts, Rng &rng)
    {
        opts.validate();
        if (!y.is_finite())
            throw domain_error("cpd_als: input tensor has non-finite entries.");

        const auto [n1, n2, n3] = y.dims();
        const arma::uword bound = std::min({n2 * n3, n1 * n3, n1 * n2});
        if (opts.rank > bound)
            throw dimension_error("cpd_als: rank " + std::to_string(opts.rank) + " exceeds the sanity bound " +
                                  std::to_string(bound) + ".");

        const arma::cx_mat y1 = unfold(y, 1);
        const arma::cx_mat y2 = unfold(y, 2);
        const arma::cx_mat y3 = unfold(y, 3);
        const double y_norm = tensor_norm(y);
        const arma::uword r = opts.rank;

        AlsResult best;
        best.diagnostics.final_residual = std::numeric_limits<double>::infinity();

        if (y_norm == 0.0)
        {
            best.factors = {arma::cx_mat(n1, r, arma::fill::zeros), arma::cx_mat(n2, r, arma::fill::zeros),
                            arma::cx_mat(n3, r, arma::fill::zeros)};
            best.diagnostics.final_residual = 0.0;
            return best;
        }

        for (arma::uword restart = 0; restart < opts.n_restarts; ++restart)
        {
            FactorTriple f;
            std::optional<FactorTriple> algebraic;
            if (opts.init == AlsInit::gevd && restart == 0)
                algebraic = gevd_factors(y, r, rng);
            if (algebraic)
                f = *algebraic;
            else if (opts.init == AlsInit::svd_warm && restart == 0)
            {
                f.f2 = svd_factor(y2, r, rng);
                f.f3 = svd_factor(y3, r, rng);
            }
            else
            {
                f.f2 = random_factor(n2, r, rng);
                f.f3 = random_factor(n3, r, rng);
            }
            if (!algebraic)
                f.f1.set_size(n1, r);

            std::vector<double> history;
            history.reserve(3 * opts.max_iters);
            double previous = std::numeric_limits<double>::infinity();
            double current = previous;
            arma::uword iter = 0;

            while (iter < opts.max_iters)
            {
                ++iter;
                f.f1 = als_update_mode(y1, f.f3, f.f2, opts.pinv_tol);
                history.push_back(relative_residual(y1, f.f1, khatri_rao(f.f3, f.f2), y_norm));

                f.f2 = als_update_mode(y2, f.f3, f.f1, opts.pinv_tol);
                history.push_back(relative_residual(y2, f.f2, khatri_rao(f.f3, f.f1), y_norm));

                f.f3 = als_update_mode(y3, f.f2, f.f1, opts.pinv_tol);
                current = relative_residual(y3, f.f3, khatri_rao(f.f2, f.f1), y_norm);
                history.push_back(current);

                balance(f);

                if (!std::isfinite(current))
                    throw numerical_error("cpd_als: residual became non-finite.");
                if (current <= exact_fit)
                    break;
                if (std::isfinite(previous) && std::abs(previous - current) <= opts.rel_tol * previous)
                    break;
                previous = current;
            }

            if (current < best.diagnostics.final_residual)
            {
                best.factors = std::move(f);
                best.diagnostics.final_residual = current;
                best.diagnostics.iterations = iter;
                best.diagnostics.restart_index = restart;
                best.diagnostics.fit_history = std::move(history);
            }
        }
        return best;
    }
}
