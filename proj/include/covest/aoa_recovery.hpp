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

#ifndef COVEST_AOA_RECOVERY_HPP
#define COVEST_AOA_RECOVERY_HPP

#include "covest/acquisition.hpp"

#include <armadillo>
#include <vector>

namespace covest
{
    struct AoaEstimate
    {
        double phi_hat = 0.0; // radians in [-pi/2, pi/2]
        cx z_hat = 1.0;       // unit-modulus root, z = exp(j 2 pi (d/lambda) sin phi)
        cx delta_hat = 0.0;   // complex scaling of the effective steering column
    };

    // Coefficients of p(z) = a^*(z) Q a(z) on the unit circle,
    // Q = W (||b||^2 I - b b^*) W^*. Entry i holds the coefficient of z^(i - N + 1),
    // i.e. the vector runs from z^{-(N-1)} to z^{N-1}; coef(-m) = conj(coef(m)).
    arma::cx_vec aoa_polynomial_coeffs(const arma::cx_vec &b_hat, const arma::cx_mat &w);

    // Roots of sum_i coeffs(i) z^i (coeffs in ascending powers) from the companion matrix.
    // Leading coefficients that vanish relative to the largest one are trimmed first.
    arma::cx_vec polynomial_roots(const arma::cx_vec &coeffs_ascending);

    // Root-based AoA search for one estimated steering column b_hat = W^* a(phi) delta.
    AoaEstimate recover_aoa(const arma::cx_vec &b_hat, const HybridCombiner &comb, double spacing_ratio);

    // recover_aoa for every column of B_hat.
    std::vector<AoaEstimate> recover_aoas(const arma::cx_mat &b_hat, const HybridCombiner &comb, double spacing_ratio);
}

#endif
