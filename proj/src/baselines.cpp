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

#include "covest/baselines.hpp"
#include "covest/channel.hpp"
#include "covest/errors.hpp"
#include "covest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace covest
{
    namespace
    {
        const double pi = arma::datum::pi;

        arma::cx_vec steering_from_sine(double s, arma::uword n_ant, double spacing_ratio)
        {
            const double step = 2.0 * pi * spacing_ratio * s;
            arma::cx_vec a(n_ant);
            for (arma::uword n = 0; n < n_ant; ++n)
                a(n) = std::polar(1.0, step * static_cast<double>(n));
            return a;
        }
    }

    arma::cx_mat sample_covariance_y(const ComplexTensor3 &y)
    {
        const arma::cx_mat y1 = unfold(y, 1);
        const double fibers = static_cast<double>(std::max<arma::uword>(y1.n_cols, 1));
        return linalg::hermitian_part(y1 * y1.t() / fibers);
    }

    arma::vec music_pseudospectrum(const arma::cx_mat &noise_basis, const HybridCombiner &comb, double spacing_ratio,
                                   const arma::vec &sin_grid)
    {
        const arma::uword n = comb.n_ant();
        arma::cx_mat steer(n, sin_grid.n_elem);
        for (arma::uword i = 0; i < sin_grid.n_elem; ++i)
            steer.col(i) = steering_from_sine(sin_grid(i), n, spacing_ratio);
        const arma::cx_mat proj = noise_basis.t() * (comb.w.t() * steer);
        const arma::rowvec denom = arma::sum(arma::square(arma::abs(proj)), 0);
        arma::vec out(sin_grid.n_elem);
        for (arma::uword i = 0; i < out.n_elem; ++i)
            out(i) = 1.0 / std::max(denom(i), 1e-300);
        return out;
    }

    MusicResult music_estimate(const ComplexTensor3 &y, const HybridCombiner &comb, arma::uword l,
                               double spacing_ratio, arma::uword grid_size)
    {
        const arma::uword m = comb.m_rf();
        if (y.dim(1) != m)
            throw dimension_error("music_estimate: measurement and combiner disagree on M_RF.");
        if (l >= m)
            throw not_applicable_error("music_estimate: need l < M_RF (l = " + std::to_string(l) + ", M_RF = " +
                                       std::to_string(m) + ").");
        if (l == 0)
            return {arma::vec(), arma::cx_mat(comb.n_ant(), 0)};
        if (grid_size < 3)
            throw config_error("music_estimate: grid needs at least 3 points.");

        arma::vec lambda;
        arma::cx_mat u;
        if (!arma::eig_sym(lambda, u, sample_covariance_y(y)))
            throw numerical_error("music_estimate: eigendecomposition failed.");
        // ascending: the first m - l eigenvectors span the noise subspace
        const arma::cx_mat noise = u.cols(0, m - l - 1);

        const double g = static_cast<double>(grid_size);
        arma::vec grid(grid_size);
        for (arma::uword i = 0; i < grid_size; ++i)
            grid(i) = -1.0 + 2.0 * static_cast<double>(i) / g;
        const arma::vec spec = music_pseudospectrum(noise, comb, spacing_ratio, grid);

        // With half-wavelength spacing sin = -1 and sin = 1 alias, so the grid is circular.
        const bool circular = std::abs(spacing_ratio - 0.5) < 1e-12;
        std::vector<arma::uword> peaks;
        for (arma::uword i = 0; i < grid_size; ++i)
        {
            const bool has_left = circular || i > 0;
            const bool has_right = circular || i + 1 < grid_size;
            const double left = has_left ? spec((i + grid_size - 1) % grid_size) : -1.0;
            const double right = has_right ? spec((i + 1) % grid_size) : -1.0;
            if (spec(i) > left && spec(i) >= right)
                peaks.push_back(i);
        }
        std::stable_sort(peaks.begin(), peaks.end(), [&](arma::uword a, arma::uword b)
                         { return spec(a) > spec(b); });

        // Fewer peaks than paths: pad with the next-largest grid values.
        if (peaks.size() < l)
        {
            std::vector<arma::uword> order(grid_size);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](arma::uword a, arma::uword b)
                             { return spec(a) > spec(b); });
            for (arma::uword i : order)
            {
                if (peaks.size() >= l)
                    break;
                if (std::find(peaks.begin(), peaks.end(), i) == peaks.end())
                    peaks.push_back(i);
            }
        }

        const double step = 2.0 / g;
        MusicResult out;
        out.aoas_rad.set_size(l);
        for (arma::uword k = 0; k < l; ++k)
        {
            const arma::uword i = peaks[k];
            double s = grid(i);
            const bool has_left = circular || i > 0;
            const bool has_right = circular || i + 1 < grid_size;
            if (has_left && has_right)
            {
                // parabolic fit in log domain around the peak
                const double ym = std::log(spec((i + grid_size - 1) % grid_size));
                const double y0 = std::log(spec(i));
                const double yp = std::log(spec((i + 1) % grid_size));
                const double den = ym - 2.0 * y0 + yp;
                if (den < 0.0)
                    s += 0.5 * step * (ym - yp) / den;
            }
            if (s >= 1.0)
                s -= circular ? 2.0 : 0.0;
            if (s < -1.0)
                s += circular ? 2.0 : 0.0;
            out.aoas_rad(k) = std::asin(std::clamp(s, -1.0, 1.0));
        }

        out.subspace = linalg::orthonormal_basis(array_responses(out.aoas_rad, comb.n_ant(), spacing_ratio));
        return out;
    }

    Dictionary build_dictionary(arma::uword n_ant, arma::uword n_grid, double spacing_ratio)
    {
        if (n_grid < 2)
            throw config_error("build_dictionary: n_grid must be at least 2.");
        Dictionary d;
        d.grid_sines.set_size(n_grid);
        d.grid_angles.set_size(n_grid);
        d.a_d.set_size(n_ant, n_grid);
        for (arma::uword i = 0; i < n_grid; ++i)
        {
            const double s = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n_grid);
            d.grid_sines(i) = s;
            d.grid_angles(i) = std::asin(s);
            d.a_d.col(i) = steering_from_sine(s, n_ant, spacing_ratio);
        }
        return d;
    }

    SompResult somp_estimate(const ComplexTensor3 &y, const HybridCombiner &comb, const Dictionary &dict,
                             arma::uword l)
    {
        if (dict.a_d.n_rows != comb.n_ant())
            throw dimension_error("somp_estimate: dictionary and combiner disagree on N_ant.");
        if (y.dim(1) != comb.m_rf())
            throw dimension_error("somp_estimate: measurement and combiner disagree on M_RF.");
        if (l > dict.a_d.n_cols)
            throw dimension_error("somp_estimate: sparsity exceeds the dictionary size.");

        const arma::uword n = comb.n_ant();
        const arma::cx_mat y1 = unfold(y, 1);
        const arma::cx_mat phi = comb.w.t() * dict.a_d;
        const arma::rowvec atom_norm = arma::sqrt(arma::sum(arma::square(arma::abs(phi)), 0));

        SompResult out;
        out.covariance.r.zeros(n, n);
        arma::cx_mat residual = y1;
        out.residual_norms.push_back(arma::norm(residual, "fro"));
        if (l == 0)
            return out;

        std::vector<char> taken(phi.n_cols, 0);
        arma::cx_mat coeffs;
        for (arma::uword round = 0; round < l; ++round)
        {
            const arma::cx_mat corr = phi.t() * residual;
            const arma::vec energy = arma::sum(arma::square(arma::abs(corr)), 1);
            arma::uword best = phi.n_cols;
            double best_val = -1.0;
            for (arma::uword i = 0; i < phi.n_cols; ++i)
            {
                if (taken[i] || !(atom_norm(i) > 0.0))
                    continue;
                const double v = energy(i) / (atom_norm(i) * atom_norm(i));
                if (v > best_val)
                {
                    best_val = v;
                    best = i;
                }
            }
            if (best == phi.n_cols)
                break;
            taken[best] = 1;
            out.support.push_back(best);

            const arma::uvec idx = arma::conv_to<arma::uvec>::from(out.support);
            const arma::cx_mat phi_s = phi.cols(idx);
            if (!arma::solve(coeffs, phi_s, y1, arma::solve_opts::no_approx))
                coeffs = arma::pinv(phi_s) * y1;
            residual = y1 - phi_s * coeffs;
            out.residual_norms.push_back(arma::norm(residual, "fro"));
        }

        const arma::uvec idx = arma::conv_to<arma::uvec>::from(out.support);
        const arma::cx_mat a_s = dict.a_d.cols(idx);
        const double fibers = static_cast<double>(y1.n_cols);
        out.covariance.r = linalg::hermitian_part(a_s * (coeffs * coeffs.t()) * a_s.t() / fibers);
        out.aoas_rad = dict.grid_angles.elem(idx);
        return out;
    }
}
