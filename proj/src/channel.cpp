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

#include "covest/channel.hpp"
#include "covest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace covest
{
    namespace
    {
        const double pi = arma::datum::pi;

        void check_delay(double tau, arma::uword k_sbcr, arma::uword n_cp)
        {
            if (k_sbcr == 0 || n_cp == 0)
                throw dimension_error("pulse_coeffs: k_sbcr and n_cp must be positive.");
            if (!(tau >= 0.0 && tau <= static_cast<double>(n_cp)))
                throw domain_error("pulse_coeffs: delay " + std::to_string(tau) + " outside [0, " +
                                   std::to_string(n_cp) + "].");
        }

        template <typename Kernel>
        arma::cx_vec delay_transform(double tau, arma::uword k_sbcr, arma::uword n_cp, Kernel kernel)
        {
            arma::vec taps(n_cp);
            for (arma::uword d = 0; d < n_cp; ++d)
                taps(d) = kernel(static_cast<double>(d) - tau);

            arma::cx_vec out(k_sbcr);
            for (arma::uword k = 0; k < k_sbcr; ++k)
            {
                cx acc = 0.0;
                for (arma::uword d = 0; d < n_cp; ++d)
                {
                    // reduce k*d mod K first so the phase stays exact for large products
                    const double phase = -2.0 * pi * static_cast<double>((k * d) % k_sbcr) / static_cast<double>(k_sbcr);
                    acc += taps(d) * std::polar(1.0, phase);
                }
                out(k) = acc;
            }
            return out;
        }

        double laplace_sample(double scale, Rng &rng)
        {
            std::uniform_real_distribution<double> u(-0.5, 0.5);
            double x = u(rng);
            while (std::abs(x) >= 0.5)
                x = u(rng);
            return -scale * (x < 0.0 ? -1.0 : 1.0) * std::log1p(-2.0 * std::abs(x));
        }

        double uniform_angle(Rng &rng)
        {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            return pi - 2.0 * pi * u(rng); // (-pi, pi]
        }
    }

    void ChannelScene::validate() const
    {
        const arma::uword l = aoas_rad.n_elem;
        if (l == 0)
            throw dimension_error("ChannelScene: at least one path is required.");
        if (delays.n_elem != l || gains.n_cols != l)
            throw dimension_error("ChannelScene: AoA, delay and gain path counts differ.");
        if (gains.n_rows != t_frm)
            throw dimension_error("ChannelScene: gain matrix must have t_frm rows.");
        if (n_ant == 0 || k_sbcr == 0 || t_frm == 0 || n_cp == 0)
            throw dimension_error("ChannelScene: dimensions must be positive.");
        for (double tau : delays)
            if (!(tau >= 0.0 && tau <= static_cast<double>(n_cp)))
                throw domain_error("ChannelScene: delay outside [0, n_cp].");
    }

    double sinc(double x)
    {
        if (x == 0.0)
            return 1.0;
        const double px = pi * x;
        return std::sin(px) / px;
    }

    double sinc_derivative(double x)
    {
        if (std::abs(x) < 1e-4)
        {
            const double p2 = pi * pi;
            return -p2 * x / 3.0 + p2 * p2 * x * x * x / 30.0;
        }
        return (std::cos(pi * x) - sinc(x)) / x;
    }

    arma::cx_vec array_response(double phi, arma::uword n_ant, double spacing_ratio)
    {
        const double step = 2.0 * pi * spacing_ratio * std::sin(phi);
        arma::cx_vec a(n_ant);
        for (arma::uword n = 0; n < n_ant; ++n)
            a(n) = std::polar(1.0, step * static_cast<double>(n));
        return a;
    }

    arma::cx_mat array_responses(const arma::vec &phis, arma::uword n_ant, double spacing_ratio)
    {
        arma::cx_mat a(n_ant, phis.n_elem);
        for (arma::uword l = 0; l < phis.n_elem; ++l)
            a.col(l) = array_response(phis(l), n_ant, spacing_ratio);
        return a;
    }

    arma::cx_vec pulse_coeffs(double tau, arma::uword k_sbcr, arma::uword n_cp)
    {
        check_delay(tau, k_sbcr, n_cp);
        return delay_transform(tau, k_sbcr, n_cp, [](double x)
                               { return sinc(x); });
    }

    arma::cx_vec pulse_coeffs_derivative(double tau, arma::uword k_sbcr, arma::uword n_cp)
    {
        check_delay(tau, k_sbcr, n_cp);
        return delay_transform(tau, k_sbcr, n_cp, [](double x)
                               { return -sinc_derivative(x); });
    }

    double wrap_angle(double phi)
    {
        double w = std::remainder(phi, 2.0 * pi); // [-pi, pi]
        if (w <= -pi)
            w += 2.0 * pi;
        return w;
    }

    double fold_to_half_plane(double phi)
    {
        return std::asin(std::clamp(std::sin(phi), -1.0, 1.0));
    }

    ChannelScene draw_scene(const SceneConfig &cfg, Rng &rng)
    {
        ChannelScene s;
        s.n_ant = cfg.n_ant;
        s.k_sbcr = cfg.k_sbcr;
        s.t_frm = cfg.t_frm;
        s.n_cp = cfg.n_cp;
        s.spacing_ratio = cfg.spacing_ratio;

        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double ncp = static_cast<double>(cfg.n_cp);

        if (cfg.clusters)
        {
            const ClusterConfig &cc = *cfg.clusters;
            if (cc.n_clusters * cc.n_subrays == 0)
                throw config_error("Clustered scene needs at least one cluster and one subray.");
            if (!(cc.angular_spread_rad > 0.0))
                throw config_error("Angular spread must be positive.");

            const arma::uword l = cc.n_clusters * cc.n_subrays;
            s.aoas_rad.set_size(l);
            s.delays.set_size(l);
            for (arma::uword c = 0; c < cc.n_clusters; ++c)
            {
                const double center = uniform_angle(rng);
                const double delay = ncp * unit(rng);
                for (arma::uword r = 0; r < cc.n_subrays; ++r)
                {
                    const arma::uword idx = c * cc.n_subrays + r;
                    s.aoas_rad(idx) = wrap_angle(center + laplace_sample(cc.angular_spread_rad, rng));
                    s.delays(idx) = delay;
                }
            }
        }
        else
        {
            const arma::uword l = cfg.fixed_aoas_rad ? cfg.fixed_aoas_rad->n_elem : cfg.n_paths;
            if (l == 0)
                throw config_error("Scene needs at least one path.");

            if (cfg.fixed_aoas_rad)
                s.aoas_rad = *cfg.fixed_aoas_rad;
            else
            {
                s.aoas_rad.set_size(l);
                for (arma::uword i = 0; i < l; ++i)
                    s.aoas_rad(i) = uniform_angle(rng);
            }

            if (cfg.fixed_delays)
            {
                if (cfg.fixed_delays->n_elem != l)
                    throw config_error("Fixed delays and AoAs differ in length.");
                s.delays = *cfg.fixed_delays;
            }
            else
            {
                s.delays.set_size(l);
                for (arma::uword i = 0; i < l; ++i)
                    s.delays(i) = ncp * unit(rng);
            }
        }

        const arma::uword l = s.aoas_rad.n_elem;
        std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 / static_cast<double>(l)));
        s.gains.set_size(cfg.t_frm, l);
        for (arma::uword c = 0; c < l; ++c)
            for (arma::uword t = 0; t < cfg.t_frm; ++t)
            {
                const double re = gauss(rng);
                const double im = gauss(rng);
                s.gains(t, c) = cx(re, im);
            }

        s.validate();
        return s;
    }

    FactorTriple channel_factors(const ChannelScene &scene)
    {
        scene.validate();
        FactorTriple f;
        f.f1 = array_responses(scene.aoas_rad, scene.n_ant, scene.spacing_ratio);
        f.f2.set_size(scene.k_sbcr, scene.n_paths());
        for (arma::uword l = 0; l < scene.n_paths(); ++l)
            f.f2.col(l) = pulse_coeffs(scene.delays(l), scene.k_sbcr, scene.n_cp);
        f.f3 = scene.gains;
        return f;
    }

    ChannelTensor channel_tensor(const ChannelScene &scene)
    {
        ChannelTensor out;
        out.factors = channel_factors(scene);
        out.tensor = from_factors(out.factors);
        return out;
    }
}
