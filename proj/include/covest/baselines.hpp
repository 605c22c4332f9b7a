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

#ifndef COVEST_BASELINES_HPP
#define COVEST_BASELINES_HPP

#include "covest/acquisition.hpp"
#include "covest/covariance.hpp"
#include "covest/tensor.hpp"

#include <armadillo>
#include <vector>

namespace covest
{
    // (1/(T K)) sum_{t,k} y_tk y_tk^* over the mode-1 fibers.
    arma::cx_mat sample_covariance_y(const ComplexTensor3 &y);

    struct MusicResult
    {
        arma::vec aoas_rad;    // l peak angles in [-pi/2, pi/2], strongest first
        arma::cx_mat subspace; // N_ant x l orthonormal basis of span{a(phi_l)}
    };

    // 1 / (b_W^*(phi) U_n U_n^* b_W(phi)) on a sin-uniform grid, b_W(phi) = W^* a(phi).
    arma::vec music_pseudospectrum(const arma::cx_mat &noise_basis, const HybridCombiner &comb, double spacing_ratio,
                                   const arma::vec &sin_grid);

    // Subspace estimate from the l largest pseudospectrum peaks (parabolic refinement).
    // Throws not_applicable_error when l >= M_RF.
    MusicResult music_estimate(const ComplexTensor3 &y, const HybridCombiner &comb, arma::uword l,
                               double spacing_ratio = 0.5, arma::uword grid_size = 2048);

    struct Dictionary
    {
        arma::cx_mat a_d;        // N_ant x N_grid
        arma::vec grid_angles;   // radians
        arma::vec grid_sines;    // sin of the grid angles, uniform on [-1, 1)
    };

    Dictionary build_dictionary(arma::uword n_ant, arma::uword n_grid, double spacing_ratio = 0.5);

    struct SompResult
    {
        std::vector<arma::uword> support;   // dictionary indices in selection order
        CovarianceMatrix covariance;        // (1/(TK)) A_S X_S X_S^* A_S^*
        std::vector<double> residual_norms; // Frobenius norm of the residual, before round 1 and after each round
        arma::vec aoas_rad;                 // grid angles of the support
    };

    // Simultaneous OMP over all T K measurement fibers, l rounds.
    SompResult somp_estimate(const ComplexTensor3 &y, const HybridCombiner &comb, const Dictionary &dict,
                             arma::uword l);
}

#endif
