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

#include "covest/crlb.hpp"
#include "covest/errors.hpp"
#include "covest/linalg.hpp"

#include <cmath>
#include <string>

namespace covest
{
    namespace
    {
        const double pi = arma::datum::pi;
        constexpr double max_condition = 1e12;

        // Inverse of a Hermitian positive definite matrix with a conditioning check.
        template <typename Mat>
        Mat checked_inverse(const Mat &a, const char *what)
        {
            arma::vec lambda;
            Mat u;
            if (!arma::eig_sym(lambda, u, Mat(0.5 * (a + a.t()))))
                throw numerical_error(std::string("CRLB: eigendecomposition of ") + what + " failed.");
            const double lmax = lambda.max();
            const double lmin = lambda.min();
            if (!(lmax > 0.0) || !(lmin > lmax / max_condition))
                throw numerical_error(std::string("CRLB: degenerate scene, ") + what + " is singular (condition number " +
                                      std::to_string(lmin > 0.0 ? lmax / lmin : arma::datum::inf) + ").");
            return u * arma::diagmat(1.0 / lambda) * u.t();
        }

        arma::cx_mat effective_steering(const ChannelScene &scene, const HybridCombiner &comb)
        {
            if (comb.n_ant() != scene.n_ant)
                throw dimension_error("CRLB: combiner and scene disagree on N_ant.");
            return comb.w.t() * array_responses(scene.aoas_rad, scene.n_ant, scene.spacing_ratio);
        }

        arma::cx_mat delay_factor(const ChannelScene &scene)
        {
            arma::cx_mat c(scene.k_sbcr, scene.n_paths());
            for (arma::uword l = 0; l < scene.n_paths(); ++l)
                c.col(l) = pulse_coeffs(scene.delays(l), scene.k_sbcr, scene.n_cp);
            return c;
        }

        arma::vec positive_diagonal(const arma::mat &inv)
        {
            arma::vec d = inv.diag();
            if (arma::any(d <= 0.0))
                throw numerical_error("CRLB: non-positive bound, FIM is not positive definite.");
            return d;
        }
    }

    arma::cx_mat FimBlocks::omega1() const
    {
        return arma::join_rows(arma::cx_mat(phi_tau, arma::mat(arma::size(phi_tau), arma::fill::zeros)), phi_g,
                               arma::conj(phi_g));
    }

    arma::cx_mat FimBlocks::omega2() const
    {
        const arma::uword l = n_paths();
        const arma::uword tl = gg.n_rows;
        arma::cx_mat o(l + 2 * tl, l + 2 * tl, arma::fill::zeros);
        o.submat(0, 0, l - 1, l - 1) = arma::cx_mat(tau_tau, arma::mat(l, l, arma::fill::zeros));
        o.submat(0, l, l - 1, l + tl - 1) = tau_g;
        o.submat(0, l + tl, l - 1, l + 2 * tl - 1) = arma::conj(tau_g);
        o.submat(l, 0, l + tl - 1, l - 1) = tau_g.t();
        o.submat(l, l, l + tl - 1, l + tl - 1) = gg;
        o.submat(l + tl, 0, l + 2 * tl - 1, l - 1) = tau_g.st();
        o.submat(l + tl, l + tl, l + 2 * tl - 1, l + 2 * tl - 1) = arma::conj(gg);
        return o;
    }

    arma::cx_mat FimBlocks::assemble() const
    {
        const arma::uword l = n_paths();
        const arma::cx_mat o1 = omega1();
        const arma::cx_mat o2 = omega2();
        const arma::uword n = l + o2.n_rows;
        arma::cx_mat full(n, n);
        full.submat(0, 0, l - 1, l - 1) = arma::cx_mat(phi_phi, arma::mat(l, l, arma::fill::zeros));
        full.submat(0, l, l - 1, n - 1) = o1;
        full.submat(l, 0, n - 1, l - 1) = o1.t();
        full.submat(l, l, n - 1, n - 1) = o2;
        return full;
    }

    double log_likelihood(const ComplexTensor3 &y, const ChannelScene &params, const HybridCombiner &comb, double sigma,
                          int mode)
    {
        if (!(sigma > 0.0))
            throw domain_error("log_likelihood: sigma must be positive.");
        const FactorTriple f = channel_factors(params);
        const arma::cx_mat b = comb.w.t() * f.f1;
        if (y.dim(1) != b.n_rows || y.dim(2) != f.f2.n_rows || y.dim(3) != f.f3.n_rows)
            throw dimension_error("log_likelihood: measurement and parameter dimensions differ.");

        arma::cx_mat model;
        switch (mode)
        {
        case 1:
            model = b * khatri_rao(f.f3, f.f2).st();
            break;
        case 2:
            model = f.f2 * khatri_rao(f.f3, b).st();
            break;
        case 3:
            model = f.f3 * khatri_rao(f.f2, b).st();
            break;
        default:
            throw dimension_error("log_likelihood: mode must be 1, 2 or 3.");
        }
        const double resid = std::pow(arma::norm(unfold(y, mode) - model, "fro"), 2);
        const double mkt = static_cast<double>(y.n_elem());
        return -mkt * std::log(pi * sigma * sigma) - resid / (sigma * sigma);
    }

    arma::cx_vec steering_derivative(double phi, arma::uword n_ant, double spacing_ratio, const HybridCombiner &comb)
    {
        arma::cx_vec a = array_response(phi, n_ant, spacing_ratio);
        const cx scale(0.0, 2.0 * pi * spacing_ratio * std::cos(phi));
        for (arma::uword n = 0; n < n_ant; ++n)
            a(n) *= scale * static_cast<double>(n);
        return comb.w.t() * a;
    }

    arma::cx_mat steering_derivatives(const ChannelScene &scene, const HybridCombiner &comb)
    {
        arma::cx_mat bd(comb.m_rf(), scene.n_paths());
        for (arma::uword l = 0; l < scene.n_paths(); ++l)
            bd.col(l) = steering_derivative(scene.aoas_rad(l), scene.n_ant, scene.spacing_ratio, comb);
        return bd;
    }

    arma::cx_mat delay_derivatives(const ChannelScene &scene)
    {
        arma::cx_mat cd(scene.k_sbcr, scene.n_paths());
        for (arma::uword l = 0; l < scene.n_paths(); ++l)
            cd.col(l) = pulse_coeffs_derivative(scene.delays(l), scene.k_sbcr, scene.n_cp);
        return cd;
    }

    FimBlocks fim_blocks(const ChannelScene &scene, const HybridCombiner &comb, double sigma)
    {
        if (!(sigma > 0.0))
            throw domain_error("fim_blocks: sigma must be positive.");
        scene.validate();

        const arma::cx_mat b = effective_steering(scene, comb);
        const arma::cx_mat bd = steering_derivatives(scene, comb);
        const arma::cx_mat c = delay_factor(scene);
        const arma::cx_mat cd = delay_derivatives(scene);
        const arma::cx_mat &g = scene.gains;

        const double s2 = sigma * sigma;
        const arma::cx_mat bb = b.t() * b;
        const arma::cx_mat cc = c.t() * c;
        const arma::cx_mat ggram = g.t() * g;

        FimBlocks out;
        out.sigma = sigma;
        out.t_frm = scene.t_frm;
        out.gram_bc = bb % cc;
        out.phi_phi = (2.0 / s2) * arma::real(((bd.t() * bd) % cc % ggram).st());
        out.tau_tau = (2.0 / s2) * arma::real((bb % (cd.t() * cd) % ggram).st());
        out.phi_tau = (2.0 / s2) * arma::real(((b.t() * bd) % (cd.t() * c) % ggram).st());
        out.gg = (1.0 / s2) * arma::kron(out.gram_bc.st(), arma::eye<arma::cx_mat>(scene.t_frm, scene.t_frm));
        out.phi_g = (1.0 / s2) * khatri_rao((b.t() * bd) % cc, g).st();
        out.tau_g = (1.0 / s2) * khatri_rao(bb % (c.t() * cd), g).st();
        return out;
    }

    arma::vec crlb_phi(const FimBlocks &blocks)
    {
        const double s2 = blocks.sigma * blocks.sigma;
        const arma::uword t = blocks.t_frm;

        // Omega_gg^{-1} = sigma^2 (P^T)^{-1} kron I_T with P = B^*B o C^*C.
        const arma::cx_mat p_inv = checked_inverse(arma::cx_mat(blocks.gram_bc.st()), "B^*B o C^*C");
        const arma::cx_mat gg_inv = s2 * arma::kron(p_inv, arma::eye<arma::cx_mat>(t, t));

        // Eliminate g and conj(g); the two contributions are complex conjugates of each other.
        const arma::mat f_pp = blocks.phi_phi - 2.0 * arma::real(blocks.phi_g * gg_inv * blocks.phi_g.t());
        const arma::mat f_pt = blocks.phi_tau - 2.0 * arma::real(blocks.phi_g * gg_inv * blocks.tau_g.t());
        const arma::mat f_tt = blocks.tau_tau - 2.0 * arma::real(blocks.tau_g * gg_inv * blocks.tau_g.t());

        const arma::mat schur = f_pp - f_pt * checked_inverse(f_tt, "delay information") * f_pt.t();
        return positive_diagonal(checked_inverse(schur, "Schur complement"));
    }

    arma::vec crlb_phi_dense(const FimBlocks &blocks)
    {
        const arma::cx_mat o1 = blocks.omega1();
        const arma::cx_mat o2_inv = checked_inverse(blocks.omega2(), "Omega_2");
        const arma::cx_mat schur = arma::cx_mat(blocks.phi_phi, arma::mat(arma::size(blocks.phi_phi), arma::fill::zeros)) -
                                   o1 * o2_inv * o1.t();
        return positive_diagonal(checked_inverse(arma::mat(arma::real(schur)), "Schur complement"));
    }

    arma::vec music_crlb(const ChannelScene &scene, const HybridCombiner &comb, double sigma, MusicCrlbScale scale)
    {
        if (!(sigma > 0.0))
            throw domain_error("music_crlb: sigma must be positive.");
        scene.validate();
        if (scene.n_paths() > comb.m_rf())
            throw not_applicable_error("music_crlb: L = " + std::to_string(scene.n_paths()) + " exceeds M_RF = " +
                                       std::to_string(comb.m_rf()) + ".");

        const arma::cx_mat b = effective_steering(scene, comb);
        const arma::cx_mat bd = steering_derivatives(scene, comb);
        const arma::cx_mat c = delay_factor(scene);
        const arma::cx_mat &g = scene.gains;

        const arma::cx_mat bb_inv = checked_inverse(arma::cx_mat(b.t() * b), "B^*B");
        const arma::cx_mat proj = arma::eye<arma::cx_mat>(b.n_rows, b.n_rows) - b * bb_inv * b.t();
        const arma::cx_mat h = bd.t() * proj * bd;

        // sum_{t,k} Z^* H Z with Z = diag(g_t o c_k) collapses to H o (G^*G) o (C^*C).
        const arma::mat info = arma::real(h % (g.t() * g) % (c.t() * c));
        const double factor = scale == MusicCrlbScale::noise_power ? sigma * sigma / 2.0 : sigma / 2.0;
        return factor * positive_diagonal(checked_inverse(info, "MUSIC information"));
    }
}
