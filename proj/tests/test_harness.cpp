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

#include <catch_amalgamated.hpp>

#include "covest/errors.hpp"
#include "covest/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace covest;

namespace
{
    ExperimentConfig small_config()
    {
        ExperimentConfig cfg;
        cfg.scene.n_ant = 16;
        cfg.scene.k_sbcr = 16;
        cfg.scene.t_frm = 6;
        cfg.scene.n_cp = 4;
        cfg.scene.n_paths = 2;
        cfg.m_rf = 6;
        cfg.values = {10.0};
        cfg.n_trials = 3;
        cfg.music_grid = 256;
        return cfg;
    }

    std::size_t count_lines(const std::string &s)
    {
        return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
    }
}

TEST_CASE("trial seeds are deterministic and distinct", "[harness]")
{
    REQUIRE(trial_seed(1, 0.0, 0) == trial_seed(1, 0.0, 0));
    REQUIRE(trial_seed(1, 0.0, 0) != trial_seed(1, 0.0, 1));
    REQUIRE(trial_seed(1, 0.0, 0) != trial_seed(1, 10.0, 0));
    REQUIRE(trial_seed(1, 0.0, 0) != trial_seed(2, 0.0, 0));
}

TEST_CASE("run_trial is reproducible", "[harness]")
{
    const ExperimentConfig cfg = small_config();
    const TrialRecord a = run_trial(cfg, 10.0, 2);
    const TrialRecord b = run_trial(cfg, 10.0, 2);
    REQUIRE(a.seed == b.seed);
    REQUIRE(a.metrics.size() == b.metrics.size());
    for (std::size_t i = 0; i < a.metrics.size(); ++i)
    {
        REQUIRE(a.metrics[i].method == b.metrics[i].method);
        REQUIRE(a.metrics[i].metric == b.metrics[i].metric);
        REQUIRE(a.metrics[i].value.has_value() == b.metrics[i].value.has_value());
        if (a.metrics[i].value)
            REQUIRE(*a.metrics[i].value == *b.metrics[i].value);
    }
}

TEST_CASE("noiseless CPD trial captures the covariance", "[harness]")
{
    ExperimentConfig cfg = small_config();
    cfg.methods = {Method::cpd};
    for (arma::uword t = 0; t < 5; ++t)
    {
        const TrialRecord rec = run_trial(cfg, 300.0, t);
        REQUIRE(rec.get("cpd", "eta").value() >= 0.999);
        REQUIRE(rec.get("cpd", "aoa_mse").value() <= 1e-8);
    }
}

TEST_CASE("MUSIC is null when paths reach the RF chain count", "[harness]")
{
    ExperimentConfig cfg = small_config();
    cfg.scene.n_paths = 6;
    cfg.methods = {Method::music, Method::music_crlb};
    const TrialRecord rec = run_trial(cfg, 10.0, 0);
    REQUIRE_FALSE(rec.get("music", "eta").has_value());
    REQUIRE_FALSE(rec.get("music_crlb", "crlb_phi").has_value());
    REQUIRE(rec.notes.size() == 2);
}

TEST_CASE("sweep shape and aggregation", "[harness]")
{
    ExperimentConfig cfg = small_config();
    cfg.values = {0.0, 20.0};
    cfg.methods = {Method::cpd, Method::crlb};
    const SweepResult res = sweep(cfg);
    REQUIRE(res.trials.size() == 6);
    REQUIRE(res.trials[0].sweep_value == 0.0);
    REQUIRE(res.trials[3].sweep_value == 20.0);
    REQUIRE(res.trials[4].trial_index == 1);

    // cpd: 4 metrics, crlb: 2 metrics, per sweep value
    REQUIRE(res.rows.size() == 12);
    for (const AggregateRow &row : res.rows)
    {
        std::vector<double> sample;
        for (const TrialRecord &t : res.trials)
            if (t.sweep_value == row.sweep_value)
                if (auto x = t.get(row.method, row.metric))
                    sample.push_back(*x);
        REQUIRE(row.n_effective == sample.size());
        if (sample.empty())
        {
            REQUIRE(std::isnan(row.mean));
            continue;
        }
        double sum = 0.0;
        for (double x : sample)
            sum += x;
        REQUIRE(row.mean == Catch::Approx(sum / sample.size()).epsilon(1e-14));
        REQUIRE(row.p10 <= row.median);
        REQUIRE(row.median <= row.p90);
    }
}

TEST_CASE("quantile interpolates linearly", "[harness]")
{
    REQUIRE(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
    REQUIRE(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
    REQUIRE(quantile({0.0, 10.0}, 0.1) == Catch::Approx(1.0));
    REQUIRE(quantile({5.0}, 0.9) == 5.0);
    REQUIRE(std::isnan(quantile({}, 0.5)));
}

TEST_CASE("results do not depend on the worker count", "[harness]")
{
    ExperimentConfig cfg = small_config();
    cfg.values = {0.0, 10.0};
    cfg.methods = {Method::cpd, Method::somp};
    cfg.threads = 1;
    const std::string one = results_csv(sweep(cfg).rows);
    cfg.threads = 3;
    const std::string three = results_csv(sweep(cfg).rows);
    REQUIRE(one == three);
}

TEST_CASE("demo configuration runs end to end", "[harness]")
{
    ExperimentConfig cfg = demo_config();
    cfg.values = {10.0};
    cfg.n_trials = 1;
    const SweepResult res = sweep(cfg);
    bool has_mse = false, has_crlb = false;
    for (const AggregateRow &row : res.rows)
    {
        has_mse |= row.method == "cpd" && row.metric == "aoa_mse" && row.n_effective == 1;
        has_crlb |= row.method == "crlb" && row.metric == "crlb_phi" && row.n_effective == 1;
    }
    REQUIRE(has_mse);
    REQUIRE(has_crlb);
}

TEST_CASE("config parsing", "[harness]")
{
    const nlohmann::json j = nlohmann::json::parse(R"({
        "n_ant": 32, "m_rf": 4, "k_sbcr": 16, "t_frm": 5, "n_cp": 8,
        "scene": {"mode": "discrete", "n_paths": 3},
        "sweep": {"axis": "t_frm", "values": [5, 10]},
        "methods": ["cpd", "music"],
        "n_trials": 7, "base_seed": 99,
        "als": {"max_iters": 50, "n_restarts": 2}
    })");
    const ExperimentConfig cfg = config_from_json(j);
    REQUIRE(cfg.scene.n_ant == 32);
    REQUIRE(cfg.m_rf == 4);
    REQUIRE(cfg.scene.n_paths == 3);
    REQUIRE(cfg.axis == SweepAxis::t_frm);
    REQUIRE(cfg.values == std::vector<double>{5.0, 10.0});
    REQUIRE(cfg.methods == std::vector<Method>{Method::cpd, Method::music});
    REQUIRE(cfg.n_trials == 7);
    REQUIRE(cfg.base_seed == 99);
    REQUIRE(cfg.als.max_iters == 50);
    REQUIRE(cfg.als.init == AlsOptions{}.init);
    REQUIRE(apply_sweep_value(cfg, 10.0).scene.t_frm == 10);

    const ExperimentConfig back = config_from_json(to_json(cfg));
    REQUIRE(to_json(back) == to_json(cfg));

    REQUIRE(parse_method_list("cpd,somp") == std::vector<Method>{Method::cpd, Method::somp});
    REQUIRE_THROWS_AS(parse_method("esprit"), config_error);
    REQUIRE_THROWS_AS(parse_sweep_axis("k"), config_error);
}

TEST_CASE("invalid configs are rejected", "[harness]")
{
    auto bad = [](const char *text)
    { return config_from_json(nlohmann::json::parse(text)).validate(); };
    REQUIRE_THROWS_AS(bad(R"({"m_rf": 100, "n_ant": 8})"), config_error);
    REQUIRE_THROWS_AS(bad(R"({"sweep": {"axis": "snr_db", "values": []}})"), config_error);
    REQUIRE_THROWS_AS(bad(R"({"sweep": {"axis": "l_ch", "values": [2.5]}})"), config_error);
    REQUIRE_THROWS_AS(bad(R"({"n_trials": 0})"), config_error);
    REQUIRE_THROWS_AS(bad(R"({"scene": {"mode": "spherical"}})"), config_error);
    REQUIRE_THROWS_AS(bad(R"({"n_ant": "many"})"), config_error);
    REQUIRE_THROWS_AS(load_config("/nonexistent/covest.json"), io_error);
}

TEST_CASE("output files", "[harness]")
{
    ExperimentConfig cfg = small_config();
    cfg.n_trials = 2;
    cfg.methods = {Method::cpd, Method::music};
    const SweepResult res = sweep(cfg);

    const std::string results = results_csv(res.rows);
    REQUIRE(results.rfind("sweep_value,method,metric,mean,median,p10,p90,n_effective\n", 0) == 0);
    REQUIRE(count_lines(results) == 1 + res.rows.size());

    const std::string trials = trials_csv(res.trials);
    REQUIRE(trials.rfind("sweep_value,trial,seed,method,metric,value,wall_time_s\n", 0) == 0);
    REQUIRE(count_lines(trials) == 1 + 2 * 6);

    const nlohmann::json meta = metadata(cfg);
    REQUIRE(meta.at("version") == version_string());
    REQUIRE(meta.at("config").at("n_trials") == 2);

    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "covest_test_outputs";
    std::filesystem::remove_all(dir);
    cfg.output_dir = dir.string();
    write_outputs(cfg, res);
    for (const char *name : {"results.csv", "trials.csv", "meta.json"})
        REQUIRE(std::filesystem::exists(dir / name));
    std::ifstream in(dir / "results.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    REQUIRE(ss.str() == results);
    std::filesystem::remove_all(dir);

    cfg.output_dir = "/proc/covest_cannot_write_here";
    REQUIRE_THROWS_AS(write_outputs(cfg, res), io_error);
}
