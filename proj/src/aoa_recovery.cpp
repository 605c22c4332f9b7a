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

#include "covest/aoa_recovery.hpp"
#include "covest/errors.hpp"
#include "covest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace covest
{
    namespace
    {
        const double pi = arma::datum::pi;

        arma::cx_vec powers(cx z, arma::uword n)
        {
            arma::cx_vec a(n);
            cx p = 1.0;
            for (arma::uword i = 0; i < n; ++i)
            {
                a(i) = p;
                p *= z;
            }
            return a;
        }

        // |b^* W^* a(w)|^2 / ||W^* a(w)||^2 and its first two derivatives in the electrical angle w.
        struct Ratio
        {
            double value, d1, d2;
        };

        Ratio ratio_derivatives(const arma::cx_vec &b_hat, const arma::cx_mat &w, double omega)
        {
            const arma::uword n = w.n_rows;
            const arma::cx_vec a = powers(std::polar(1.0, omega), n);
            arma::cx_vec da(n), dda(n);
            for (arma::uword i = 0; i < n; ++i)
            {
                da(i) = cx(0.0, double(i)) * a(i);
                dda(i) = -double(i * i) * a(i);
            }
            const arma::cx_vec u = w.t() * a, du = w.t() * da, ddu = w.t() * dda;

            const cx s = arma::cdot(b_hat, u), ds = arma::cdot(b_hat, du), dds = arma::cdot(b_hat, ddu);
            const double p = std::norm(s);
            const double dp = 2.0 * std::real(std::conj(s) * ds);
            const double ddp = 2.0 * (std::norm(ds) + std::real(std::conj(s) * dds));

            const double q = std::real(arma::cdot(u, u));
            const double dq = 2.0 * std::real(arma::cdot(u, du));
            const double ddq = 2.0 * (std::real(arma::cdot(du, du)) + std::real(arma::cdot(u, ddu)));

            const double num1 = dp * q - p * dq;
            return {p / q, num1 / (q * q), (ddp * q - p * ddq) / (q * q) - 2.0 * dq * num1 / (q * q * q)};
        }

        // Newton ascent on the ratio; the rooting step already lands next to the maximum, so this
        // only removes the sqrt(eps) error eigenvalue solvers leave on (near) double roots.
        double polish(const arma::cx_vec &b_hat, const arma::cx_mat &w, double omega)
        {
            Ratio r = ratio_derivatives(b_hat, w, omega);
            for (int it = 0; it < 20 && r.d2 < 0.0; ++it)
            {
                const double step = -r.d1 / r.d2;
                if (!(std::abs(step) > 1e-15) || std::abs(step) > 0.1)
                    break;
                const Ratio next = ratio_derivatives(b_hat, w, omega + step);
                if (!(next.value >= r.value))
                    break;
                omega += step;
                r = next;
            }
            return omega;
        }
    }

    arma::cx_vec aoa_polynomial_coeffs(const arma::cx_vec &b_hat, const arma::cx_mat &w)
    {
        if (b_hat.n_elem != w.n_cols)
            throw dimension_error("aoa_polynomial_coeffs: b_hat length does not match the combiner.");
        const double b2 = arma::cdot(b_hat, b_hat).real();
        if (!(b2 > 0.0))
            throw domain_error("aoa_polynomial_coeffs: b_hat is zero.");

        const arma::uword m = b_hat.n_elem;
        const arma::uword n = w.n_rows;
        const arma::cx_mat inner = b2 * arma::eye<arma::cx_mat>(m, m) - b_hat * b_hat.t();
        const arma::cx_mat q = linalg::hermitian_part(w * inner * w.t());

        // a^*(z) Q a(z) = sum_{n1,n2} Q(n1,n2) z^(n2 - n1) for |z| = 1
        arma::cx_vec coeffs(2 * n - 1, arma::fill::zeros);
        for (arma::uword n2 = 0; n2 < n; ++n2)
            for (arma::uword n1 = 0; n1 < n; ++n1)
                coeffs(n2 + n - 1 - n1) += q(n1, n2);
        return coeffs;
    }

    arma::cx_vec polynomial_roots(const arma::cx_vec &coeffs_ascending)
    {
        const double scale = arma::max(arma::abs(coeffs_ascending));
        if (!(scale > 0.0))
            throw numerical_error("polynomial_roots: zero polynomial.");

        arma::uword hi = coeffs_ascending.n_elem - 1;
        while (hi > 0 && std::abs(coeffs_ascending(hi)) <= 1e-14 * scale)
            --hi;
        arma::uword lo = 0;
        while (lo < hi && std::abs(coeffs_ascending(lo)) <= 1e-14 * scale)
            ++lo;

        // zero roots from vanishing low-order coefficients
        arma::cx_vec zeros(lo, arma::fill::zeros);
        const arma::uword degree = hi - lo;
        if (degree == 0)
            return zeros;

        arma::cx_mat companion(degree, degree, arma::fill::zeros);
        const cx lead = coeffs_ascending(hi);
        for (arma::uword j = 0; j < degree; ++j)
            companion(0, j) = -coeffs_ascending(hi - 1 - j) / lead;
        for (arma::uword i = 1; i < degree; ++i)
            companion(i, i - 1) = 1.0;

        arma::cx_vec roots;
        arma::cx_mat vecs;
        if (!arma::eig_gen(roots, vecs, companion, "balance") || !roots.is_finite())
        {
            std::ostringstream os;
            os << "polynomial_roots: eigenvalue solver did not converge for coefficients";
            for (const cx &c : coeffs_ascending)
                os << ' ' << c;
            throw numerical_error(os.str());
        }
        return arma::join_cols(roots, zeros);
    }

    AoaEstimate recover_aoa(const arma::cx_vec &b_hat, const HybridCombiner &comb, double spacing_ratio)
    {
        const arma::cx_mat &w = comb.w;
        const arma::uword n = w.n_rows;
        const arma::cx_vec coeffs = aoa_polynomial_coeffs(b_hat, w);

        std::vector<cx> candidates;
        if (n == 1)
        {
            candidates.push_back(1.0);
        }
        else
        {
            // Multiplying by z^{N-1} makes the ascending vector an ordinary polynomial.
            const arma::cx_vec roots = polynomial_roots(coeffs);

            // Roots come in pairs (w, 1/conj(w)); keep the N-1 inside the unit circle. Sorting by
            // magnitude and taking the first N-1 also collapses on-circle pairs to one member each.
            std::vector<arma::uword> order(roots.n_elem);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](arma::uword a, arma::uword b)
                             { return std::abs(roots(a)) < std::abs(roots(b)); });
            const arma::uword keep = std::min<arma::uword>(n - 1, roots.n_elem);
            for (arma::uword i = 0; i < keep; ++i)
            {
                const cx r = roots(order[i]);
                const double mag = std::abs(r);
                if (mag > 0.0)
                    candidates.push_back(r / mag);
            }
            if (candidates.empty())
                candidates.push_back(roots(order[0]) / std::abs(roots(order[0])));
        }

        AoaEstimate best;
        double best_metric = -1.0;
        double best_corr = -1.0;
        for (const cx &z : candidates)
        {
            const arma::cx_vec bw = w.t() * powers(z, n);
            const double corr = std::norm(arma::cdot(b_hat, bw));
            const double denom = arma::cdot(bw, bw).real();
            if (!(denom > 0.0))
                continue;
            const double metric = corr / denom;
            const bool better = metric > best_metric * (1.0 + 1e-12) ||
                                (std::abs(metric - best_metric) <= 1e-12 * best_metric && corr > best_corr);
            if (better)
            {
                best_metric = metric;
                best_corr = corr;
                best.z_hat = z;
                best.delta_hat = arma::cdot(bw, b_hat) / denom;
            }
        }
        if (best_metric < 0.0)
            throw numerical_error("recover_aoa: no admissible root candidate.");

        if (n > 1)
        {
            const double omega = polish(b_hat, w, std::arg(best.z_hat));
            best.z_hat = std::polar(1.0, std::remainder(omega, 2.0 * pi));
            const arma::cx_vec bw = w.t() * powers(best.z_hat, n);
            best.delta_hat = arma::cdot(bw, b_hat) / arma::cdot(bw, bw).real();
        }

        const double s = std::arg(best.z_hat) / (2.0 * pi * spacing_ratio);
        best.phi_hat = std::asin(std::clamp(s, -1.0, 1.0));
        return best;
    }

    std::vector<AoaEstimate> recover_aoas(const arma::cx_mat &b_hat, const HybridCombiner &comb, double spacing_ratio)
    {
        std::vector<AoaEstimate> out;
        out.reserve(b_hat.n_cols);
        for (arma::uword l = 0; l < b_hat.n_cols; ++l)
            out.push_back(recover_aoa(b_hat.col(l), comb, spacing_ratio));
        return out;
    }
}
