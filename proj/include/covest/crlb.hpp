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

#ifndef COVEST_CRLB_HPP
#define COVEST_CRLB_HPP

#include "covest/acquisition.hpp"
#include "covest/channel.hpp"
#include "covest/tensor.hpp"

#include <armadillo>

namespace covest
{
    // Fisher information blocks for theta = [phi; tau; g; conj(g)], g = vec(G) with G of size T x L
    // (frame index fastest). All blocks follow the convention E[score * score^*].
    struct FimBlocks
    {
        arma::mat phi_phi;   // L x L
        arma::mat tau_tau;   // L x L
        arma::mat phi_tau;   // L x L
        arma::cx_mat gg;     // TL x TL
        arma::cx_mat phi_g;  // L x TL
        arma::cx_mat tau_g;  // L x TL

        double sigma = 1.0;
        arma::uword t_frm = 0;
        arma::cx_mat gram_bc; // (B^* B o C^* C), L x L; gg = (1/sigma^2) gram_bc^T kron I_T

        arma::uword n_paths() const { return phi_phi.n_rows; }

        // Omega_1 = [phi_tau, phi_g, conj(phi_g)], L x (L + 2TL).
        arma::cx_mat omega1() const;

        // Omega_2: the nuisance block over [tau; g; conj(g)].
        arma::cx_mat omega2() const;

        // The full 2L(T+1) square FIM.
        arma::cx_mat assemble() const;
    };

    // f(theta) = -M K T ln(pi sigma^2) - ||Y_(n) - X_(n)||^2 / sigma^2, evaluated on the mode-n unfolding.
    double log_likelihood(const ComplexTensor3 &y, const ChannelScene &params, const HybridCombiner &comb, double sigma,
                          int mode = 1);

    // d/dphi W^* a(phi) = j 2 pi (d/lambda) cos(phi) W^* diag(0..N-1) a(phi).
    arma::cx_vec steering_derivative(double phi, arma::uword n_ant, double spacing_ratio, const HybridCombiner &comb);

    // Columns steering_derivative(phi_l) for every path of the scene.
    arma::cx_mat steering_derivatives(const ChannelScene &scene, const HybridCombiner &comb);

    // Columns dc(tau_l)/dtau for every path of the scene.
    arma::cx_mat delay_derivatives(const ChannelScene &scene);

    FimBlocks fim_blocks(const ChannelScene &scene, const HybridCombiner &comb, double sigma);

    // CRLB(phi_l) = [(Omega_phiphi - Omega_1 Omega_2^{-1} Omega_1^*)^{-1}]_{ll}.
    // Eliminates g through the Kronecker structure of Omega_gg, then tau. Throws
    // numerical_error when a block is singular (condition number above 1e12).
    arma::vec crlb_phi(const FimBlocks &blocks);

    // Same bound through a dense inversion of Omega_2; used to cross-check crlb_phi.
    arma::vec crlb_phi_dense(const FimBlocks &blocks);

    enum class MusicCrlbScale
    {
        noise_power,  // sigma^2 / 2
        printed_sigma // sigma / 2
    };

    // Subspace-method bound diag((s/2) (sum_{t,k} Re(Z_tk^* Bd^* P_B^perp Bd Z_tk))^{-1}).
    // Throws not_applicable_error when L > M_RF.
    arma::vec music_crlb(const ChannelScene &scene, const HybridCombiner &comb, double sigma,
                         MusicCrlbScale scale = MusicCrlbScale::noise_power);
}

#endif
