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

#include "covest/errors.hpp"
#include "covest/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace
{
    enum ExitCode
    {
        exit_ok = 0,
        exit_config = 2,
        exit_io = 3,
        exit_numerical = 4
    };

    int run_and_write(const covest::ExperimentConfig &cfg)
    {
        const covest::SweepResult result = covest::sweep(cfg);
        covest::write_outputs(cfg, result);
        std::cout << "wrote " << result.trials.size() << " trials, " << result.rows.size() << " rows to "
                  << cfg.output_dir << "\n";
        return exit_ok;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Spatial channel covariance estimation experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", covest::version_string());

    std::string config_path, out_dir, methods;
    std::uint64_t seed = 0;
    arma::uword trials = 0, threads = 0;

    CLI::App *sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep from a JSON config");
    sweep_cmd->add_option("--config", config_path, "JSON config file")->required();
    sweep_cmd->add_option("--out", out_dir, "output directory");
    sweep_cmd->add_option("--seed", seed, "base seed");
    sweep_cmd->add_option("--trials", trials, "trials per sweep value");
    sweep_cmd->add_option("--methods", methods, "comma separated subset of cpd,music,somp,crlb,music_crlb");
    sweep_cmd->add_option("--threads", threads, "worker threads");

    CLI::App *crlb_cmd = app.add_subcommand("crlb", "Bound curves only, no estimation");
    crlb_cmd->add_option("--config", config_path, "JSON config file")->required();
    crlb_cmd->add_option("--out", out_dir, "output directory");
    crlb_cmd->add_option("--seed", seed, "base seed");
    crlb_cmd->add_option("--trials", trials, "gain draws per sweep value");

    CLI::App *demo_cmd = app.add_subcommand("demo", "Reference configuration at reduced trial count");
    demo_cmd->add_option("--out", out_dir, "output directory");
    demo_cmd->add_option("--trials", trials, "trials per sweep value");
    demo_cmd->add_option("--threads", threads, "worker threads");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    try
    {
        covest::ExperimentConfig cfg =
            demo_cmd->parsed() ? covest::demo_config() : covest::load_config(config_path);

        if (!out_dir.empty())
            cfg.output_dir = out_dir;
        if (trials)
            cfg.n_trials = trials;
        if (threads)
            cfg.threads = threads;
        if (sweep_cmd->count("--seed") || crlb_cmd->count("--seed"))
            cfg.base_seed = seed;
        if (!methods.empty())
            cfg.methods = covest::parse_method_list(methods);

        if (crlb_cmd->parsed())
        {
            std::vector<covest::Method> bounds;
            for (covest::Method m : cfg.methods)
                if (m == covest::Method::crlb || m == covest::Method::music_crlb)
                    bounds.push_back(m);
            if (bounds.empty())
                bounds = {covest::Method::crlb, covest::Method::music_crlb};
            cfg.methods = bounds;
        }

        cfg.validate();
        return run_and_write(cfg);
    }
    catch (const covest::config_error &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const covest::io_error &e)
    {
        std::cerr << "I/O error: " << e.what() << "\n";
        return exit_io;
    }
    catch (const covest::numerical_error &e)
    {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    }
}
