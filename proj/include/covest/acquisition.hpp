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

#ifndef COVEST_ACQUISITION_HPP
#define COVEST_ACQUISITION_HPP

#include "covest/channel.hpp"
#include "covest/tensor.hpp"

#include <armadillo>

namespace covest
{
    // Hybrid receive combiner W = W_RF W_BB with W_BB = (W_RF^* W_RF)^{-1/2}, so W^* W = I.
    struct HybridCombiner
    {
        arma::cx_mat w_rf; // N_ant x M_RF, unit-modulus entries
        arma::cx_mat w_bb; // M_RF x M_RF
        arma::cx_mat w;    // N_ant x M_RF

        arma::uword n_ant() const { return w.n_rows; }
        arma::uword m_rf() const { return w.n_cols; }
    };

    // Random phase-shifter network: entries exp(j theta), theta ~ U[0, 2 pi).
    arma::cx_mat draw_rf_combiner(arma::uword n_ant, arma::uword m_rf, Rng &rng);

    // Attach the whitening baseband stage. Throws numerical_error for rank-deficient w_rf.
    HybridCombiner whitened_combiner(const arma::cx_mat &w_rf);

    // Y = H x_1 W^* + N with N i.i.d. CN(0, sigma^2). The training symbols are unit modulus
    // and already removed, so they do not appear here.
    ComplexTensor3 measure(const ComplexTensor3 &h, const HybridCombiner &comb, double sigma, Rng &rng);

    // Tensor of i.i.d. CN(0, sigma^2) entries.
    ComplexTensor3 complex_gaussian_tensor(const Dims3 &dims, double sigma, Rng &rng);
}

#endif
