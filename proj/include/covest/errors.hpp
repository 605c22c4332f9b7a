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

#ifndef COVEST_ERRORS_HPP
#define COVEST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace covest
{
    // Shapes or lengths that do not fit together.
    class dimension_error : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Argument outside the domain of the operation (negative sigma, delay beyond the CP, ...).
    class domain_error : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    // A numerical routine failed or the problem is too ill-conditioned to answer.
    class numerical_error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Method cannot run for this configuration (e.g. MUSIC with L >= M_RF).
    class not_applicable_error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class config_error : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    class io_error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
}

#endif
