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
#include "covest/tensor.hpp"

#include <random>

using namespace covest;
using Catch::Matchers::WithinAbs;

namespace
{
    ComplexTensor3 random_tensor(arma::uword a, arma::uword b, arma::uword c, unsigned seed)
    {
        arma::arma_rng::set_seed(seed);
        return ComplexTensor3(arma::randn<arma::cx_cube>(a, b, c));
    }

    FactorTriple random_factors(const Dims3 &d, arma::uword r, unsigned seed)
    {
        arma::arma_rng::set_seed(seed);
        return {arma::randn<arma::cx_mat>(d[0], r), arma::randn<arma::cx_mat>(d[1], r),
                arma::randn<arma::cx_mat>(d[2], r)};
    }

    // Index-map tensor, 1-based values i1 + 2(i2-1) + 4(i3-1).
    ComplexTensor3 index_tensor()
    {
        ComplexTensor3 t(2, 2, 2);
        for (arma::uword i1 = 0; i1 < 2; ++i1)
            for (arma::uword i2 = 0; i2 < 2; ++i2)
                for (arma::uword i3 = 0; i3 < 2; ++i3)
                    t(i1, i2, i3) = cx(double(i1 + 1 + 2 * i2 + 4 * i3), 0.0);
        return t;
    }

    // Direct evaluation of the mode-n column index, independent of the library's storage.
    cx unfold_entry(const ComplexTensor3 &t, int mode, arma::uword row, arma::uword col)
    {
        const Dims3 d = t.dims();
        if (mode == 1)
            return t(row, col % d[1], col / d[1]);
        if (mode == 2)
            return t(col % d[0], row, col / d[0]);
        return t(col % d[0], col / d[0], row);
    }
}

TEST_CASE("unfold of 2x2x2 index tensor", "[tensor]")
{
    const arma::cx_mat m1 = unfold(index_tensor(), 1);
    const arma::mat expected{{1, 3, 5, 7}, {2, 4, 6, 8}};
    REQUIRE(arma::approx_equal(arma::real(m1), expected, "absdiff", 0.0));
    REQUIRE(arma::norm(arma::imag(m1), "fro") == 0.0);
}

TEST_CASE("unfold column layout matches explicit index map", "[tensor]")
{
    const ComplexTensor3 t = random_tensor(3, 4, 5, 11);
    for (int mode = 1; mode <= 3; ++mode)
    {
        const arma::cx_mat m = unfold(t, mode);
        REQUIRE(m.n_rows == t.dim(mode));
        REQUIRE(m.n_elem == t.n_elem());
        for (arma::uword r = 0; r < m.n_rows; ++r)
            for (arma::uword c = 0; c < m.n_cols; ++c)
                REQUIRE(m(r, c) == unfold_entry(t, mode, r, c));
    }
}

TEST_CASE("fold inverts the index-map unfold", "[tensor]")
{
    const arma::cx_mat m{{1, 3, 5, 7}, {2, 4, 6, 8}};
    const ComplexTensor3 t = fold(m, 1, {2, 2, 2});
    REQUIRE(arma::approx_equal(t.cube(), index_tensor().cube(), "absdiff", 0.0));
}

TEST_CASE("scalar tensor unfolds and folds to itself", "[tensor]")
{
    ComplexTensor3 t(1, 1, 1);
    t(0, 0, 0) = cx(2.5, -1.0);
    for (int mode = 1; mode <= 3; ++mode)
    {
        const arma::cx_mat m = unfold(t, mode);
        REQUIRE(m.n_rows == 1);
        REQUIRE(m.n_cols == 1);
        REQUIRE(m(0, 0) == cx(2.5, -1.0));
        REQUIRE(fold(m, mode, {1, 1, 1})(0, 0, 0) == cx(2.5, -1.0));
    }
}

TEST_CASE("fold rejects a wrong shape", "[tensor]")
{
    const arma::cx_mat m(2, 3, arma::fill::zeros);
    REQUIRE_THROWS_AS(fold(m, 1, {2, 2, 2}), dimension_error);
    REQUIRE_THROWS_AS(fold(arma::cx_mat(2, 4), 4, {2, 2, 2}), dimension_error);
}

TEST_CASE("round trip for every shape up to 5x5x5", "[tensor][property]")
{
    unsigned seed = 1;
    for (arma::uword a = 1; a <= 5; ++a)
        for (arma::uword b = 1; b <= 5; ++b)
            for (arma::uword c = 1; c <= 5; ++c)
            {
                const ComplexTensor3 t = random_tensor(a, b, c, seed++);
                for (int mode = 1; mode <= 3; ++mode)
                {
                    const ComplexTensor3 back = fold(unfold(t, mode), mode, t.dims());
                    REQUIRE(arma::approx_equal(back.cube(), t.cube(), "absdiff", 0.0));
                }
            }
}

TEST_CASE("norm equals Frobenius norm of every unfolding", "[tensor][property]")
{
    unsigned seed = 300;
    for (arma::uword a = 1; a <= 5; ++a)
        for (arma::uword c = 1; c <= 5; ++c)
        {
            const ComplexTensor3 t = random_tensor(a, 3, c, seed++);
            const double n = tensor_norm(t);
            for (int mode = 1; mode <= 3; ++mode)
                REQUIRE_THAT(arma::norm(unfold(t, mode), "fro"), WithinAbs(n, 1e-13 * n));
        }
}

TEST_CASE("tensor norm examples", "[tensor]")
{
    REQUIRE(tensor_norm(ComplexTensor3(2, 3, 4)) == 0.0);
    ComplexTensor3 t(1, 1, 1);
    t(0, 0, 0) = cx(3.0, 4.0);
    REQUIRE_THAT(tensor_norm(t), WithinAbs(5.0, 1e-15));
}

TEST_CASE("khatri_rao of identity and ones", "[tensor]")
{
    const arma::cx_mat a = arma::eye<arma::cx_mat>(2, 2);
    const arma::cx_mat b(2, 2, arma::fill::ones);
    const arma::cx_mat k = khatri_rao(a, b);
    const arma::mat expected{{1, 0}, {1, 0}, {0, 1}, {0, 1}};
    REQUIRE(arma::approx_equal(arma::real(k), expected, "absdiff", 0.0));
}

TEST_CASE("khatri_rao Gram is the Hadamard product of Grams", "[tensor]")
{
    arma::arma_rng::set_seed(5);
    const arma::cx_mat a = arma::randn<arma::cx_mat>(4, 3);
    const arma::cx_mat b = arma::randn<arma::cx_mat>(5, 3);
    const arma::cx_mat k = khatri_rao(a, b);
    const arma::cx_mat lhs = k.t() * k;
    const arma::cx_mat rhs = (a.t() * a) % (b.t() * b);
    REQUIRE(arma::norm(lhs - rhs, "fro") <= 1e-12 * arma::norm(rhs, "fro"));
}

TEST_CASE("rank-one khatri_rao is a Kronecker product", "[tensor]")
{
    arma::arma_rng::set_seed(6);
    const arma::cx_vec a = arma::randn<arma::cx_vec>(3);
    const arma::cx_vec b = arma::randn<arma::cx_vec>(4);
    REQUIRE(arma::approx_equal(khatri_rao(a, b), arma::cx_mat(arma::kron(a, b)), "absdiff", 0.0));
    REQUIRE_THROWS_AS(khatri_rao(arma::cx_mat(2, 2), arma::cx_mat(2, 3)), dimension_error);
}

TEST_CASE("mode-1 product", "[tensor]")
{
    const ComplexTensor3 t = random_tensor(2, 2, 2, 7);
    REQUIRE(arma::approx_equal(mode1_product(t, arma::eye<arma::cx_mat>(2, 2)).cube(), t.cube(), "absdiff", 0.0));

    arma::arma_rng::set_seed(8);
    const arma::cx_mat m = arma::randn<arma::cx_mat>(3, 2);
    const ComplexTensor3 via_matrix = fold(m * unfold(t, 1), 1, {3, 2, 2});
    REQUIRE(arma::approx_equal(mode1_product(t, m).cube(), via_matrix.cube(), "absdiff", 1e-14));

    REQUIRE(tensor_norm(mode1_product(t, arma::cx_mat(4, 2, arma::fill::zeros))) == 0.0);
    REQUIRE(mode1_product(t, arma::cx_mat(4, 2)).dims() == Dims3{4, 2, 2});
}

TEST_CASE("from_factors rank one is an outer product", "[tensor]")
{
    const FactorTriple f = random_factors({3, 4, 2}, 1, 9);
    const ComplexTensor3 t = from_factors(f);
    for (arma::uword m = 0; m < 3; ++m)
        for (arma::uword k = 0; k < 4; ++k)
            for (arma::uword s = 0; s < 2; ++s)
                REQUIRE(std::abs(t(m, k, s) - f.f1(m, 0) * f.f2(k, 0) * f.f3(s, 0)) <= 1e-14);
}

TEST_CASE("from_factors unfoldings have Khatri-Rao structure", "[tensor]")
{
    const FactorTriple f = random_factors({4, 5, 3}, 3, 10);
    const ComplexTensor3 t = from_factors(f);
    const double scale = tensor_norm(t);
    REQUIRE(arma::norm(unfold(t, 1) - f.f1 * khatri_rao(f.f3, f.f2).st(), "fro") <= 1e-13 * scale);
    REQUIRE(arma::norm(unfold(t, 2) - f.f2 * khatri_rao(f.f3, f.f1).st(), "fro") <= 1e-13 * scale);
    REQUIRE(arma::norm(unfold(t, 3) - f.f3 * khatri_rao(f.f2, f.f1).st(), "fro") <= 1e-13 * scale);
}

TEST_CASE("zero factor column contributes nothing", "[tensor]")
{
    FactorTriple f = random_factors({3, 3, 3}, 2, 12);
    FactorTriple g = f;
    g.f1 = arma::join_rows(f.f1, arma::cx_mat(3, 1, arma::fill::zeros));
    g.f2 = arma::join_rows(f.f2, arma::randn<arma::cx_mat>(3, 1));
    g.f3 = arma::join_rows(f.f3, arma::randn<arma::cx_mat>(3, 1));
    REQUIRE(arma::approx_equal(from_factors(g).cube(), from_factors(f).cube(), "absdiff", 1e-14));
}

TEST_CASE("from_factors is invariant to compensated column scaling", "[tensor][property]")
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.2, 3.0), ph(-3.14, 3.14);
    for (unsigned rep = 0; rep < 20; ++rep)
    {
        const FactorTriple f = random_factors({4, 3, 5}, 3, 100 + rep);
        FactorTriple g = f;
        for (arma::uword r = 0; r < 3; ++r)
        {
            const cx db = std::polar(u(rng), ph(rng));
            const cx dc = std::polar(u(rng), ph(rng));
            g.f1.col(r) *= db;
            g.f2.col(r) *= dc;
            g.f3.col(r) /= (db * dc);
        }
        const ComplexTensor3 a = from_factors(f), b = from_factors(g);
        REQUIRE(arma::abs(a.cube() - b.cube()).max() <= 1e-12 * arma::abs(a.cube()).max());
    }
}

TEST_CASE("from_factors is invariant to a common column permutation", "[tensor][property]")
{
    const FactorTriple f = random_factors({3, 4, 2}, 4, 14);
    const arma::uvec perm{2, 0, 3, 1};
    const FactorTriple g{f.f1.cols(perm), f.f2.cols(perm), f.f3.cols(perm)};
    const ComplexTensor3 a = from_factors(f), b = from_factors(g);
    REQUIRE(arma::abs(a.cube() - b.cube()).max() <= 1e-14 * arma::abs(a.cube()).max());
}

TEST_CASE("factor triple validation", "[tensor]")
{
    FactorTriple f{arma::cx_mat(2, 2), arma::cx_mat(3, 2), arma::cx_mat(4, 3)};
    REQUIRE_THROWS_AS(f.validate(), dimension_error);
    FactorTriple empty{arma::cx_mat(2, 0), arma::cx_mat(3, 0), arma::cx_mat(4, 0)};
    REQUIRE_THROWS_AS(empty.validate(), dimension_error);
}
