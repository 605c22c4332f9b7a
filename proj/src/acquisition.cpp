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

#include "covest/acquisition.hpp"
#include "covest/errors.hpp"
#include "covest/linalg.hpp"

#include <cmath>
#include <string>

namespace covest
{
    arma::cx_mat draw_rf_combiner(arma::uword n_ant, arma::uword m_rf, Rng &rng)
    {
        if (m_rf == 0 || n_ant == 0)
            throw config_error("RF combiner dimensions must be positive.");
        if (m_rf > n_ant)
            throw config_error("M_RF (" + std::to_string(m_rf) + ") cannot exceed N_ant (" + std::to_string(n_ant) + ").");

        std::uniform_real_distribution<double> phase(0.0, 2.0 * arma::datum::pi);
        arma::cx_mat w(n_ant, m_rf);
        for (arma::uword c = 0; c < m_rf; ++c)
            for (arma::uword r = 0; r < n_ant; ++r)
                w(r, c) = std::polar(1.0, phase(rng));
        return w;
    }

    HybridCombiner whitened_combiner(const arma::cx_mat &w_rf)
    {
        HybridCombiner comb;
        comb.w_rf = w_rf;
        comb.w_bb = linalg::hermitian_inv_sqrt(w_rf.t() * w_rf, 1e-12);
        comb.w = w_rf * comb.w_bb;
        return comb;
    }

    ComplexTensor3 complex_gaussian_tensor(const Dims3 &dims, double sigma, Rng &rng)
    {
        ComplexTensor3 n(dims);
        if (sigma == 0.0)
            return n;
        std::normal_distribution<double> gauss(0.0, sigma / std::sqrt(2.0));
        for (cx &v : n.cube())
        {
            const double re = gauss(rng);
            const double im = gauss(rng);
            v = cx(re, im);
        }
        return n;
    }

    ComplexTensor3 measure(const ComplexTensor3 &h, const HybridCombiner &comb, double sigma, Rng &rng)
    {
        if (!(sigma >= 0.0))
            throw domain_error("measure: sigma must be non-negative.");
        if (h.dim(1) != comb.n_ant())
            throw dimension_error("measure: channel has " + std::to_string(h.dim(1)) + " antennas, combiner expects " +
                                  std::to_string(comb.n_ant()) + ".");

        ComplexTensor3 y = mode1_product(h, comb.w.t());
        if (sigma > 0.0)
            y += complex_gaussian_tensor(y.dims(), sigma, rng);
        return y;
    }
}
