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

#ifndef COVEST_CPD_ALS_HPP
#define COVEST_CPD_ALS_HPP

#include "covest/channel.hpp"
#include "covest/tensor.hpp"

#include <armadillo>
#include <optional>
#include <string>
#include <vector>

namespace covest
{
    enum class AlsInit
    {
        random,   // i.i.d. CN(0,1) factors
        svd_warm, // leading left singular vectors of the mode-2 / mode-3 unfoldings
        gevd      // algebraic start from a generalized eigendecomposition of two slice mixtures
    };

    AlsInit parse_als_init(const std::string &name);
    std::string to_string(AlsInit init);

    struct AlsOptions
    {
        arma::uword rank = 1;
        arma::uword max_iters = 500;
        double rel_tol = 1e-8; // stop when the relative change of the fit drops below this
        arma::uword n_restarts = 3;
        AlsInit init = AlsInit::gevd; // first restart only; later restarts are random
        double pinv_tol = 1e-10;

        void validate() const;
    };

    struct AlsDiagnostics
    {
        double final_residual = 0.0;      // ||Y - [[B,C,G]]|| / ||Y||
        arma::uword iterations = 0;       // full sweeps of the winning restart
        arma::uword restart_index = 0;    // which restart won
        std::vector<double> fit_history;  // relative residual after every half-step of the winning restart
    };

    struct AlsResult
    {
        FactorTriple factors;
        AlsDiagnostics diagnostics;
    };

    // One least-squares block update, Y_(n) ((F_a kr F_b)^T)^+, evaluated through the
    // Gram matrix (F_a^* F_a) o (F_b^* F_b) and a truncated pseudoinverse.
    arma::cx_mat als_update_mode(const arma::cx_mat &y_unfold, const arma::cx_mat &f_a, const arma::cx_mat &f_b,
                                 double pinv_tol);

    // Algebraic rank-R CPD: mixes the slices along one mode into two matrices whose
    // generalized eigenvectors give the factor of another mode, then splits the remaining
    // Khatri-Rao columns into rank-one pairs. Exact for noiseless input when two modes have
    // at least R entries and the slice mixtures separate the components. Tries every usable
    // slicing mode and keeps the best separated one. Empty when no mode is usable.
    std::optional<FactorTriple> gevd_factors(const ComplexTensor3 &y, arma::uword rank, Rng &rng);

    // Rank-R CPD of y by alternating least squares with restarts; the lowest final residual wins.
    AlsResult cpd_als(const ComplexTensor3 &y, const AlsOptions &opts, Rng &rng);
}

#endif
