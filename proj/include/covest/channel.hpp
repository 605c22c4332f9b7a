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

#ifndef COVEST_CHANNEL_HPP
#define COVEST_CHANNEL_HPP

#include "covest/tensor.hpp"

#include <armadillo>
#include <optional>
#include <random>

namespace covest
{
    using Rng = std::mt19937_64;

    // Ground truth of a multipath scene seen by an N_ant-element ULA.
    struct ChannelScene
    {
        arma::vec aoas_rad;          // L angles in (-pi, pi]
        arma::vec delays;            // L delays in units of the sample duration, within [0, n_cp]
        arma::cx_mat gains;          // T_frm x L path gains g_{t,l}
        arma::uword n_ant = 0;
        arma::uword k_sbcr = 0;
        arma::uword t_frm = 0;
        arma::uword n_cp = 0;
        double spacing_ratio = 0.5;  // element spacing over wavelength

        arma::uword n_paths() const { return aoas_rad.n_elem; }

        // Throws dimension_error / domain_error when the fields are inconsistent.
        void validate() const;
    };

    // Clusters of subrays sharing one delay per cluster.
    struct ClusterConfig
    {
        arma::uword n_clusters = 6;
        arma::uword n_subrays = 10;
        double angular_spread_rad = 2.0 * arma::datum::pi / 180.0; // Laplacian scale
    };

    struct SceneConfig
    {
        arma::uword n_ant = 64;
        arma::uword k_sbcr = 128;
        arma::uword t_frm = 20;
        arma::uword n_cp = 32;
        double spacing_ratio = 0.5;
        arma::uword n_paths = 6;               // discrete-path mode
        std::optional<ClusterConfig> clusters; // clustered mode when set

        // Deterministic AoAs / delays; gains are still drawn. Discrete mode only.
        std::optional<arma::vec> fixed_aoas_rad;
        std::optional<arma::vec> fixed_delays;
    };

    // Normalized sinc, sin(pi x) / (pi x).
    double sinc(double x);

    // d/dx sinc(x); 4th-order Taylor expansion for |x| < 1e-4.
    double sinc_derivative(double x);

    // a(phi): element n (0-based) is exp(j 2 pi spacing_ratio n sin(phi)).
    arma::cx_vec array_response(double phi, arma::uword n_ant, double spacing_ratio);

    // Columns array_response(phis(l)).
    arma::cx_mat array_responses(const arma::vec &phis, arma::uword n_ant, double spacing_ratio);

    // c_k = sum_{d=0}^{n_cp-1} sinc(d - tau) exp(-j 2 pi k d / k_sbcr), k = 0..k_sbcr-1.
    arma::cx_vec pulse_coeffs(double tau, arma::uword k_sbcr, arma::uword n_cp);

    // dc_k/dtau = -sum_d sinc'(d - tau) exp(-j 2 pi k d / k_sbcr).
    arma::cx_vec pulse_coeffs_derivative(double tau, arma::uword k_sbcr, arma::uword n_cp);

    // Draw a random scene. AoAs uniform on (-pi, pi], delays uniform on [0, n_cp],
    // gains i.i.d. CN(0, 1/L). In clustered mode every subray of a cluster shares the
    // cluster delay and its AoA is the cluster center plus a Laplacian offset.
    ChannelScene draw_scene(const SceneConfig &cfg, Rng &rng);

    struct ChannelTensor
    {
        ComplexTensor3 tensor; // N_ant x K_sbcr x T_frm
        FactorTriple factors;  // (A, C, G)
    };

    // Factor matrices A (steering), C (pulse coefficients), G (gains) and H = [[A, C, G]].
    FactorTriple channel_factors(const ChannelScene &scene);
    ChannelTensor channel_tensor(const ChannelScene &scene);

    // Fold an angle into [-pi/2, pi/2] keeping sin(phi), i.e. resolve the ULA front-back ambiguity.
    double fold_to_half_plane(double phi);

    // Wrap into (-pi, pi].
    double wrap_angle(double phi);
}

#endif
