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

#ifndef COVEST_HARNESS_HPP
#define COVEST_HARNESS_HPP

#include "covest/channel.hpp"
#include "covest/cpd_als.hpp"
#include "covest/crlb.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace covest
{
    enum class SweepAxis
    {
        snr_db,
        t_frm,
        l_ch
    };

    enum class Method
    {
        cpd,
        music,
        somp,
        crlb,
        music_crlb
    };

    std::string to_string(SweepAxis axis);
    std::string to_string(Method method);
    SweepAxis parse_sweep_axis(const std::string &name);
    Method parse_method(const std::string &name);
    std::vector<Method> parse_method_list(const std::string &comma_separated);

    struct ExperimentConfig
    {
        SceneConfig scene;              // dimensions and scene mode
        arma::uword m_rf = 8;
        double snr_db = 0.0;            // used unless the SNR is swept
        SweepAxis axis = SweepAxis::snr_db;
        std::vector<double> values{0.0};
        std::vector<Method> methods{Method::cpd, Method::music, Method::somp, Method::crlb, Method::music_crlb};
        arma::uword n_trials = 10;
        std::uint64_t base_seed = 1;
        arma::uword threads = 1;
        AlsOptions als{0};              // als.rank == 0 selects the rank automatically
        arma::uword music_grid = 2048;
        arma::uword somp_grid = 0;      // 0 selects 2 * N_ant
        MusicCrlbScale music_crlb_scale = MusicCrlbScale::noise_power;
        std::string output_dir = "covest_out";

        // Throws config_error.
        void validate() const;

        bool has(Method m) const;
    };

    ExperimentConfig config_from_json(const nlohmann::json &j);
    nlohmann::json to_json(const ExperimentConfig &cfg);
    ExperimentConfig load_config(const std::string &path);

    // Fixed-angle configuration with N=64, M=8, L=6, K=128, T=20 swept over SNR.
    ExperimentConfig demo_config();

    // Config with the sweep value applied to the swept field.
    ExperimentConfig apply_sweep_value(const ExperimentConfig &cfg, double value);

    // sigma for SNR = 1 / sigma^2.
    double sigma_from_snr_db(double snr_db);

    // Per-trial seed: base_seed xor a mix of the sweep value bits and the trial index.
    std::uint64_t trial_seed(std::uint64_t base_seed, double sweep_value, arma::uword trial_index);

    struct MetricValue
    {
        std::string method;
        std::string metric;
        std::optional<double> value; // empty when the method did not apply
    };

    struct TrialRecord
    {
        double sweep_value = 0.0;
        arma::uword trial_index = 0;
        std::uint64_t seed = 0;
        std::vector<MetricValue> metrics;
        std::vector<std::string> notes; // per-method errors recorded as null results
        double wall_time_s = 0.0;

        std::optional<double> get(const std::string &method, const std::string &metric) const;
    };

    // Draw one scene and combiner, measure once, and run every enabled method on the same Y.
    TrialRecord run_trial(const ExperimentConfig &cfg, double sweep_value, arma::uword trial_index);

    struct AggregateRow
    {
        double sweep_value = 0.0;
        std::string method;
        std::string metric;
        double mean = 0.0;
        double median = 0.0;
        double p10 = 0.0;
        double p90 = 0.0;
        arma::uword n_effective = 0;
    };

    struct SweepResult
    {
        std::vector<TrialRecord> trials; // ordered by (sweep value index, trial index)
        std::vector<AggregateRow> rows;
    };

    // Linear-interpolated quantile of an unsorted sample, q in [0, 1].
    double quantile(std::vector<double> sample, double q);

    std::vector<AggregateRow> aggregate(const std::vector<TrialRecord> &trials, const std::vector<double> &values);

    // Runs all (value, trial) pairs, trials in parallel on cfg.threads workers.
    SweepResult sweep(const ExperimentConfig &cfg);

    std::string results_csv(const std::vector<AggregateRow> &rows);
    std::string trials_csv(const std::vector<TrialRecord> &trials);
    nlohmann::json metadata(const ExperimentConfig &cfg);

    // Writes results.csv, trials.csv and meta.json into cfg.output_dir. Throws io_error.
    void write_outputs(const ExperimentConfig &cfg, const SweepResult &result);

    std::string version_string();
}

#endif
