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

#include <catch_amalgamated.hpp>

#include "covest/acquisition.hpp"
#include "covest/channel.hpp"
#include "covest/crlb.hpp"
#include "covest/errors.hpp"

#include "fim_oracle.hpp"

using namespace covest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    const double deg = arma::datum::pi / 180.0;

    ChannelScene tiny_scene(arma::uword n, arma::uword k, arma::uword t, arma::uword l, std::uint64_t seed)
    {
        SceneConfig cfg;
        cfg.n_ant = n;
        cfg.k_sbcr = k;
        cfg.t_frm = t;
        cfg.n_cp = 2;
        cfg.n_paths = l;
        Rng rng(seed);
        return draw_scene(cfg, rng);
    }

    HybridCombiner combiner(arma::uword n, arma::uword m, std::uint64_t seed)
    {
        Rng rng(seed);
        return whitened_combiner(draw_rf_combiner(n, m, rng));
    }

    HybridCombiner identity(arma::uword n)
    {
        HybridCombiner c;
        c.w_rf = c.w = c.w_bb = arma::eye<arma::cx_mat>(n, n);
        return c;
    }

    // Reference configuration: 64 antennas, 8 RF chains, six fixed paths.
    ChannelScene reference_scene(std::uint64_t seed)
    {
        SceneConfig cfg;
        cfg.n_ant = 64;
        cfg.k_sbcr = 128;
        cfg.t_frm = 20;
        cfg.n_cp = 32;
        cfg.fixed_aoas_rad = arma::vec{-66, 13, 49, -7, 81, 62} * deg;
        cfg.fixed_delays = arma::vec{0, 4.34, 7.13, 17.05, 21.08, 25.73};
        Rng rng(seed);
        return draw_scene(cfg, rng);
    }

    double rel(const arma::mat &a, const arma::mat &b)
    {
        return oracle::rel_frobenius(arma::cx_mat(a, arma::zeros(arma::size(a))),
                                     arma::cx_mat(b, arma::zeros(arma::size(b))));
    }

    void require_blocks_match(const FimBlocks &fb, const oracle::NumericFim &num, double tol)
    {
        CHECK(rel(fb.phi_phi, num.phi_phi) <= tol);
        CHECK(rel(fb.tau_tau, num.tau_tau) <= tol);
        CHECK(rel(fb.phi_tau, num.phi_tau) <= tol);
        CHECK(oracle::rel_frobenius(fb.gg, num.gg) <= tol);
        CHECK(oracle::rel_frobenius(fb.phi_g, num.phi_g) <= tol);
        CHECK(oracle::rel_frobenius(fb.tau_g, num.tau_g) <= tol);
    }
}

TEST_CASE("log-likelihood of noiseless data", "[crlb]")
{
    const ChannelScene s = tiny_scene(5, 4, 3, 2, 1);
    const HybridCombiner comb = combiner(5, 3, 1);
    Rng rng(1);
    const ComplexTensor3 y = measure(channel_tensor(s).tensor, comb, 0.0, rng);
    const double sigma = 0.4;
    const double expected = -double(3 * 4 * 3) * std::log(arma::datum::pi * sigma * sigma);
    for (int mode = 1; mode <= 3; ++mode)
        REQUIRE_THAT(log_likelihood(y, s, comb, sigma, mode), WithinRel(expected, 1e-12));
    REQUIRE_THROWS_AS(log_likelihood(y, s, comb, sigma, 4), dimension_error);
}

TEST_CASE("log-likelihood agrees across unfoldings on noisy data", "[crlb]")
{
    const ChannelScene s = tiny_scene(6, 5, 4, 2, 2);
    const HybridCombiner comb = combiner(6, 3, 2);
    Rng rng(2);
    const ComplexTensor3 y = measure(channel_tensor(s).tensor, comb, 0.5, rng);
    const double f1 = log_likelihood(y, s, comb, 0.5, 1);
    REQUIRE_THAT(log_likelihood(y, s, comb, 0.5, 2), WithinRel(f1, 1e-12));
    REQUIRE_THAT(log_likelihood(y, s, comb, 0.5, 3), WithinRel(f1, 1e-12));
}

TEST_CASE("log-likelihood gradient in the gains", "[crlb]")
{
    const ChannelScene s = tiny_scene(5, 4, 3, 2, 3);
    const HybridCombiner comb = combiner(5, 3, 3);
    const double sigma = 0.3;
    Rng rng(3);
    const ComplexTensor3 y = measure(channel_tensor(s).tensor, comb, sigma, rng);
    const arma::cx_vec resid = arma::vectorise(y.cube()) - oracle::noiseless_mean(s, comb);

    for (arma::uword idx = 0; idx < s.gains.n_elem; ++idx)
        for (cx dir : {cx(1, 0), cx(0, 1)})
        {
            // d mean / d(gain) along dir, then the analytic directional derivative of f
            ChannelScene e = s;
            e.gains.zeros();
            e.gains(idx) = dir;
            const arma::cx_vec dmu = oracle::noiseless_mean(e, comb);
            const double analytic = 2.0 / (sigma * sigma) * std::real(arma::cdot(dmu, resid));

            const double h = 1e-6;
            ChannelScene plus = s, minus = s;
            plus.gains(idx) += h * dir;
            minus.gains(idx) -= h * dir;
            const double fd = (log_likelihood(y, plus, comb, sigma) - log_likelihood(y, minus, comb, sigma)) / (2 * h);
            REQUIRE_THAT(fd, WithinAbs(analytic, 1e-5 * (1.0 + std::abs(analytic))));
        }
}

TEST_CASE("steering derivative examples", "[crlb]")
{
    const HybridCombiner comb = combiner(8, 4, 4);
    REQUIRE(arma::norm(steering_derivative(arma::datum::pi / 2, 8, 0.5, comb)) <= 1e-14);

    const arma::cx_vec d = steering_derivative(0.0, 2, 0.5, identity(2));
    REQUIRE(std::abs(d(0)) == 0.0);
    REQUIRE(std::abs(d(1) - cx(0.0, arma::datum::pi)) <= 1e-15);

    for (double phi : {0.3, -1.0, 1.4})
    {
        const double h = 1e-6;
        const arma::cx_vec fd =
            comb.w.t() * (array_response(phi + h, 8, 0.5) - array_response(phi - h, 8, 0.5)) / (2 * h);
        const arma::cx_vec an = steering_derivative(phi, 8, 0.5, comb);
        REQUIRE(arma::norm(an - fd) <= 1e-6 * arma::norm(an));
    }
}

TEST_CASE("FIM blocks match the numerical oracle", "[crlb][oracle]")
{
    struct Case
    {
        arma::uword n, m, k, t, l;
    };
    for (const Case c : {Case{3, 2, 3, 2, 1}, Case{4, 3, 3, 2, 2}})
        for (std::uint64_t seed = 1; seed <= 5; ++seed)
        {
            const ChannelScene s = tiny_scene(c.n, c.k, c.t, c.l, seed);
            const HybridCombiner comb = combiner(c.n, c.m, seed);
            const double sigma = 0.7;
            const FimBlocks fb = fim_blocks(s, comb, sigma);
            const oracle::NumericFim num = oracle::numeric_fim(s, comb, sigma);
            require_blocks_match(fb, num, 1e-3);
        }
}

TEST_CASE("bound matches the inverse of the numerical FIM", "[crlb][oracle]")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        const ChannelScene s = tiny_scene(6, 5, 3, 2, seed);
        const HybridCombiner comb = combiner(6, 4, seed);
        const FimBlocks fb = fim_blocks(s, comb, 0.5);
        const arma::vec ref = oracle::numeric_crlb_phi(oracle::numeric_fim(s, comb, 0.5));
        const arma::vec structured = crlb_phi(fb);
        const arma::vec dense = crlb_phi_dense(fb);
        for (arma::uword l = 0; l < 2; ++l)
        {
            REQUIRE_THAT(structured(l), WithinRel(ref(l), 1e-4));
            REQUIRE_THAT(dense(l), WithinRel(structured(l), 1e-8));
        }
    }
}

TEST_CASE("single path with flat delay and gains", "[crlb]")
{
    ChannelScene s;
    s.n_ant = 8;
    s.k_sbcr = 6;
    s.t_frm = 4;
    s.n_cp = 2;
    s.aoas_rad = {0.35};
    s.delays = {0.0};
    s.gains = arma::cx_mat(4, 1, arma::fill::ones);
    const HybridCombiner comb = combiner(8, 4, 5);
    const double sigma = 0.2;
    const FimBlocks fb = fim_blocks(s, comb, sigma);
    const arma::cx_vec bd = steering_derivative(0.35, 8, 0.5, comb);
    const double expected = 2.0 / (sigma * sigma) * 6 * 4 * std::pow(arma::norm(bd), 2);
    REQUIRE_THAT(fb.phi_phi(0, 0), WithinRel(expected, 1e-12));
}

TEST_CASE("FIM scales with 1/sigma^2", "[crlb]")
{
    const ChannelScene s = tiny_scene(6, 5, 3, 2, 6);
    const HybridCombiner comb = combiner(6, 3, 6);
    const arma::cx_mat f1 = fim_blocks(s, comb, 0.5).assemble();
    const arma::cx_mat f2 = fim_blocks(s, comb, 1.0).assemble();
    REQUIRE(arma::norm(f2 - 0.25 * f1, "fro") <= 1e-12 * arma::norm(f2, "fro"));
}

TEST_CASE("assembled FIM is Hermitian PSD", "[crlb][property]")
{
    for (std::uint64_t seed = 1; seed <= 15; ++seed)
    {
        const arma::uword l = 1 + seed % 3;
        const ChannelScene s = tiny_scene(8, 6, 3, l, seed);
        const HybridCombiner comb = combiner(8, 4, seed);
        const FimBlocks fb = fim_blocks(s, comb, 0.8);
        const arma::cx_mat f = fb.assemble();
        REQUIRE(f.n_rows == 2 * l * (3 + 1));
        REQUIRE(arma::norm(f - f.t(), "fro") <= 1e-10 * arma::norm(f, "fro"));
        const arma::vec ev = arma::eig_sym(f);
        REQUIRE(ev.min() >= -1e-8 * ev.max());

        REQUIRE(arma::norm(fb.phi_phi - fb.phi_phi.t(), "fro") <= 1e-12 * arma::norm(fb.phi_phi, "fro"));
        REQUIRE(arma::norm(fb.tau_tau - fb.tau_tau.t(), "fro") <= 1e-12 * arma::norm(fb.tau_tau, "fro"));
        const arma::vec evg = arma::eig_sym(arma::cx_mat(0.5 * (fb.gg + fb.gg.t())));
        REQUIRE(evg.min() >= -1e-10 * evg.max());

        // Schur complement on the angles
        const arma::cx_mat o1 = fb.omega1();
        const arma::cx_mat schur = arma::cx_mat(fb.phi_phi, arma::zeros(l, l)) - o1 * arma::pinv(fb.omega2()) * o1.t();
        const arma::vec evs = arma::eig_sym(arma::cx_mat(0.5 * (schur + schur.t())));
        REQUIRE(evs.min() >= -1e-8 * ev.max());
    }
}

TEST_CASE("bound scales exactly with sigma^2", "[crlb][property]")
{
    const ChannelScene s = tiny_scene(8, 6, 3, 2, 7);
    const HybridCombiner comb = combiner(8, 4, 7);
    const arma::vec ref = crlb_phi(fim_blocks(s, comb, 1.0));
    for (double sigma : {0.01, 0.3, 2.0, 30.0})
    {
        const arma::vec b = crlb_phi(fim_blocks(s, comb, sigma));
        for (arma::uword l = 0; l < 2; ++l)
            REQUIRE_THAT(b(l), WithinRel(sigma * sigma * ref(l), 1e-10));
    }
}

TEST_CASE("nuisance parameters can only raise the bound", "[crlb][property]")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
        const ChannelScene s = tiny_scene(8, 6, 3, 3, seed);
        const HybridCombiner comb = combiner(8, 4, seed);
        const FimBlocks fb = fim_blocks(s, comb, 0.5);
        const arma::vec b = crlb_phi(fb);
        const arma::vec known = arma::inv_sympd(fb.phi_phi).eval().diag();
        for (arma::uword l = 0; l < 3; ++l)
            REQUIRE(b(l) >= known(l) * (1.0 - 1e-10));
    }
}

TEST_CASE("reference configuration bound falls a decade per 10 dB", "[crlb]")
{
    const ChannelScene s = reference_scene(1);
    const HybridCombiner comb = combiner(64, 8, 1);
    std::vector<double> means;
    for (double snr : {-10.0, 0.0, 10.0, 20.0})
        means.push_back(arma::mean(crlb_phi(fim_blocks(s, comb, std::pow(10.0, -snr / 20.0)))));
    for (std::size_t i = 1; i < means.size(); ++i)
        REQUIRE_THAT(std::log10(means[i - 1] / means[i]), WithinAbs(1.0, 1e-8));
}

TEST_CASE("MUSIC bound scaling and single source form", "[crlb]")
{
    const ChannelScene s = tiny_scene(8, 6, 3, 2, 8);
    const HybridCombiner comb = combiner(8, 4, 8);
    const arma::vec ref = music_crlb(s, comb, 1.0);
    for (double sigma : {0.1, 3.0})
    {
        const arma::vec b = music_crlb(s, comb, sigma);
        for (arma::uword l = 0; l < 2; ++l)
            REQUIRE_THAT(b(l), WithinRel(sigma * sigma * ref(l), 1e-10));
        const arma::vec printed = music_crlb(s, comb, sigma, MusicCrlbScale::printed_sigma);
        for (arma::uword l = 0; l < 2; ++l)
            REQUIRE_THAT(printed(l), WithinRel(sigma * ref(l), 1e-10));
    }

    // One source, identity combiner: sigma^2 / (2 h sum_{t,k} |g_t c_k|^2) with h = d^* P_perp d.
    const ChannelScene one = tiny_scene(8, 6, 3, 1, 9);
    const double sigma = 0.4;
    const arma::cx_vec a = array_response(one.aoas_rad(0), 8, 0.5);
    const arma::cx_vec d = steering_derivative(one.aoas_rad(0), 8, 0.5, identity(8));
    const arma::cx_mat proj = arma::eye<arma::cx_mat>(8, 8) - a * a.t() / 8.0;
    const double h = std::real(arma::cdot(d, proj * d));
    const arma::cx_vec c = pulse_coeffs(one.delays(0), 6, 2);
    double power = 0.0;
    for (arma::uword t = 0; t < 3; ++t)
        for (arma::uword k = 0; k < 6; ++k)
            power += std::norm(one.gains(t, 0) * c(k));
    REQUIRE_THAT(music_crlb(one, identity(8), sigma)(0), WithinRel(sigma * sigma / (2.0 * h * power), 1e-10));
}

TEST_CASE("MUSIC bound needs fewer paths than RF chains", "[crlb]")
{
    const ChannelScene s = tiny_scene(8, 6, 3, 5, 10);
    REQUIRE_THROWS_AS(music_crlb(s, combiner(8, 4, 10), 1.0), not_applicable_error);
}

TEST_CASE("degenerate scenes raise a numerical error", "[crlb]")
{
    ChannelScene s = tiny_scene(8, 6, 3, 2, 11);
    s.aoas_rad(1) = s.aoas_rad(0);
    s.delays(1) = s.delays(0);
    REQUIRE_THROWS_AS(crlb_phi(fim_blocks(s, combiner(8, 4, 11), 1.0)), numerical_error);
    REQUIRE_THROWS_AS(fim_blocks(s, combiner(8, 4, 11), 0.0), domain_error);
}
