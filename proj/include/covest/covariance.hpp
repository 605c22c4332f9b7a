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

#ifndef COVEST_COVARIANCE_HPP
#define COVEST_COVARIANCE_HPP

#include "covest/aoa_recovery.hpp"
#include "covest/tensor.hpp"

#include <armadillo>
#include <vector>

namespace covest
{
    // Hermitian PSD spatial covariance.
    struct CovarianceMatrix
    {
        arma::cx_mat r;

        arma::uword n() const { return r.n_rows; }
    };

    struct RpeResult
    {
        double eta = 0.0;
        arma::uword m_rf = 0;
        double trace_num = 0.0; // Tr(U~^* R U~)
        double trace_den = 0.0; // Tr(U^* R U)
        bool tie_at_cut = false; // eigenvalue tie at the m_rf boundary of either matrix
    };

    // R = (1/(K T)) A ((G^* G) o (C^* C))^T A^*, from the channel factors (A, C, G). This is the
    // sample covariance of the mode-1 fibers.
    CovarianceMatrix true_covariance(const FactorTriple &factors, arma::uword k_sbcr, arma::uword t_frm);

    // R~ = (1/(K T)) A^ D ((G^^* G^) o (C^^* C^))^T D^* A^^* with D = diag(delta_hat).
    CovarianceMatrix reconstruct_covariance(const arma::cx_mat &a_hat, const arma::cx_vec &delta_hat,
                                            const arma::cx_mat &c_hat, const arma::cx_mat &g_hat,
                                            arma::uword k_sbcr, arma::uword t_frm);

    // Steering matrix and scalings from a set of AoA estimates.
    arma::cx_mat steering_from_estimates(const std::vector<AoaEstimate> &est, arma::uword n_ant);
    arma::cx_vec scalings_from_estimates(const std::vector<AoaEstimate> &est);

    // eta = Tr(U~^* R U~) / Tr(U^* R U), U and U~ the dominant m_rf eigenvectors of r_true and r_est.
    RpeResult rpe(const CovarianceMatrix &r_true, const CovarianceMatrix &r_est, arma::uword m_rf);

    // Same metric when the estimate is already a subspace (orthonormal columns), as for MUSIC.
    RpeResult rpe_from_subspace(const CovarianceMatrix &r_true, const arma::cx_mat &u_est, arma::uword m_rf);

    // Mean squared AoA error after optimal one-to-one matching. Angles are folded into
    // [-pi/2, pi/2] and differences wrapped modulo pi.
    double aoa_mse(const arma::vec &phi_true, const arma::vec &phi_est);

    // Minimum-cost perfect assignment on a square cost matrix (Hungarian algorithm).
    // Returns assignment[row] = column.
    std::vector<arma::uword> hungarian_assignment(const arma::mat &cost);

    // Lower bound on 1 - E[eta] from per-path AoA bounds:
    //   (N^2 pi^2 (d/lambda)^2 / (3 L)) sum_l cos^2(phi_l) CRLB(phi_l).
    double rpe_lower_bound(const arma::vec &phi_true, const arma::vec &crlb_phi, arma::uword n_ant,
                           double spacing_ratio);
}

#endif
