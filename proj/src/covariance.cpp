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

#include "covest/covariance.hpp"
#include "covest/channel.hpp"
#include "covest/errors.hpp"
#include "covest/linalg.hpp"

#include <cmath>
#include <limits>

namespace covest
{
    namespace
    {
        const double pi = arma::datum::pi;

        double folded_difference(double a, double b)
        {
            const double d = fold_to_half_plane(a) - fold_to_half_plane(b);
            return std::remainder(d, pi);
        }
    }

    CovarianceMatrix true_covariance(const FactorTriple &factors, arma::uword k_sbcr, arma::uword t_frm)
    {
        factors.validate();
        const arma::cx_mat &a = factors.f1;
        const arma::cx_mat &c = factors.f2;
        const arma::cx_mat &g = factors.f3;
        // H_(1) H_(1)^* = A (G kr C)^T conj(G kr C) A^* = A ((G^*G) o (C^*C))^T A^*
        const arma::cx_mat inner = ((g.t() * g) % (c.t() * c)).st();
        const double scale = 1.0 / static_cast<double>(k_sbcr * t_frm);
        return {linalg::hermitian_part(scale * a * inner * a.t())};
    }

    CovarianceMatrix reconstruct_covariance(const arma::cx_mat &a_hat, const arma::cx_vec &delta_hat,
                                            const arma::cx_mat &c_hat, const arma::cx_mat &g_hat,
                                            arma::uword k_sbcr, arma::uword t_frm)
    {
        const arma::uword r = a_hat.n_cols;
        if (delta_hat.n_elem != r || c_hat.n_cols != r || g_hat.n_cols != r)
            throw dimension_error("reconstruct_covariance: inconsistent column counts.");

        // B^ = W^* A^ D, so the channel unfolding estimate is A^ D (G^ kr C^)^T.
        const arma::cx_mat inner = ((g_hat.t() * g_hat) % (c_hat.t() * c_hat)).st();
        const arma::cx_mat ad = a_hat * arma::diagmat(delta_hat);
        const double scale = 1.0 / static_cast<double>(k_sbcr * t_frm);
        return {linalg::hermitian_part(scale * ad * inner * ad.t())};
    }

    arma::cx_mat steering_from_estimates(const std::vector<AoaEstimate> &est, arma::uword n_ant)
    {
        arma::cx_mat a(n_ant, est.size());
        for (arma::uword l = 0; l < est.size(); ++l)
        {
            cx p = 1.0;
            for (arma::uword n = 0; n < n_ant; ++n)
            {
                a(n, l) = p;
                p *= est[l].z_hat;
            }
        }
        return a;
    }

    arma::cx_vec scalings_from_estimates(const std::vector<AoaEstimate> &est)
    {
        arma::cx_vec d(est.size());
        for (arma::uword l = 0; l < est.size(); ++l)
            d(l) = est[l].delta_hat;
        return d;
    }

    RpeResult rpe_from_subspace(const CovarianceMatrix &r_true, const arma::cx_mat &u_est, arma::uword m_rf)
    {
        if (u_est.n_rows != r_true.n())
            throw dimension_error("rpe: subspace and covariance sizes differ.");
        if (m_rf == 0 || m_rf > r_true.n())
            throw dimension_error("rpe: m_rf must lie in [1, N_ant].");

        const linalg::DominantSubspace truth = linalg::dominant_subspace(r_true.r, m_rf);
        RpeResult out;
        out.m_rf = m_rf;
        out.tie_at_cut = truth.tie_at_cut;
        out.trace_den = std::real(arma::trace(truth.basis.t() * r_true.r * truth.basis));
        if (!(out.trace_den > 0.0))
            throw domain_error("rpe: true covariance is zero.");
        out.trace_num = u_est.n_cols ? std::max(0.0, std::real(arma::trace(u_est.t() * r_true.r * u_est))) : 0.0;
        out.eta = out.trace_num / out.trace_den;
        return out;
    }

    RpeResult rpe(const CovarianceMatrix &r_true, const CovarianceMatrix &r_est, arma::uword m_rf)
    {
        if (r_est.n() != r_true.n())
            throw dimension_error("rpe: covariance sizes differ.");
        const linalg::DominantSubspace est = linalg::dominant_subspace(r_est.r, m_rf);

        // Directions with (numerically) zero eigenvalue carry no estimate; drop them rather
        // than letting an arbitrary null-space basis count towards eta.
        arma::uword keep = 0;
        const double top = est.eigenvalues.is_empty() ? 0.0 : est.eigenvalues(0);
        while (keep < est.basis.n_cols && est.eigenvalues(keep) > 1e-10 * top)
            ++keep;
        const arma::cx_mat basis = keep ? arma::cx_mat(est.basis.cols(0, keep - 1)) : arma::cx_mat(r_est.n(), 0);

        RpeResult out = rpe_from_subspace(r_true, basis, m_rf);
        out.tie_at_cut = out.tie_at_cut || est.tie_at_cut;
        return out;
    }

    std::vector<arma::uword> hungarian_assignment(const arma::mat &cost)
    {
        // Jonker-Volgenant style shortest augmenting path, O(n^3). 1-based internal arrays.
        const arma::uword n = cost.n_rows;
        if (cost.n_cols != n)
            throw dimension_error("hungarian_assignment: cost matrix must be square.");
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
        std::vector<arma::uword> p(n + 1, 0), way(n + 1, 0);

        for (arma::uword i = 1; i <= n; ++i)
        {
            p[0] = i;
            arma::uword j0 = 0;
            std::vector<double> minv(n + 1, inf);
            std::vector<char> used(n + 1, 0);
            do
            {
                used[j0] = 1;
                const arma::uword i0 = p[j0];
                double delta = inf;
                arma::uword j1 = 0;
                for (arma::uword j = 1; j <= n; ++j)
                {
                    if (used[j])
                        continue;
                    const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if (cur < minv[j])
                    {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if (minv[j] < delta)
                    {
                        delta = minv[j];
                        j1 = j;
                    }
                }
                for (arma::uword j = 0; j <= n; ++j)
                {
                    if (used[j])
                    {
                        u[p[j]] += delta;
                        v[j] -= delta;
                    }
                    else
                        minv[j] -= delta;
                }
                j0 = j1;
            } while (p[j0] != 0);
            do
            {
                const arma::uword j1 = way[j0];
                p[j0] = p[j1];
                j0 = j1;
            } while (j0 != 0);
        }

        std::vector<arma::uword> assignment(n, 0);
        for (arma::uword j = 1; j <= n; ++j)
            if (p[j] != 0)
                assignment[p[j] - 1] = j - 1;
        return assignment;
    }

    double aoa_mse(const arma::vec &phi_true, const arma::vec &phi_est)
    {
        if (phi_true.n_elem != phi_est.n_elem)
            throw dimension_error("aoa_mse: length mismatch.");
        const arma::uword l = phi_true.n_elem;
        if (l == 0)
            return 0.0;

        arma::mat cost(l, l);
        for (arma::uword i = 0; i < l; ++i)
            for (arma::uword j = 0; j < l; ++j)
            {
                const double d = folded_difference(phi_true(i), phi_est(j));
                cost(i, j) = d * d;
            }

        const std::vector<arma::uword> match = hungarian_assignment(cost);
        double total = 0.0;
        for (arma::uword i = 0; i < l; ++i)
            total += cost(i, match[i]);
        return total / static_cast<double>(l);
    }

    double rpe_lower_bound(const arma::vec &phi_true, const arma::vec &crlb_phi, arma::uword n_ant,
                           double spacing_ratio)
    {
        if (phi_true.n_elem != crlb_phi.n_elem)
            throw dimension_error("rpe_lower_bound: length mismatch.");
        if (phi_true.is_empty())
            return 0.0;
        const double n = static_cast<double>(n_ant);
        double acc = 0.0;
        for (arma::uword l = 0; l < phi_true.n_elem; ++l)
        {
            if (crlb_phi(l) < 0.0)
                throw domain_error("rpe_lower_bound: negative CRLB.");
            const double c = std::cos(phi_true(l));
            acc += c * c * crlb_phi(l);
        }
        return n * n * pi * pi * spacing_ratio * spacing_ratio / (3.0 * static_cast<double>(phi_true.n_elem)) * acc;
    }
}
