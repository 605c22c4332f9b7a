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

#include "covest/tensor.hpp"
#include "covest/errors.hpp"

#include <string>

namespace covest
{
    namespace
    {
        void check_mode(int mode)
        {
            if (mode < 1 || mode > 3)
                throw dimension_error("Tensor mode must be 1, 2 or 3, got " + std::to_string(mode) + ".");
        }
    }

    ComplexTensor3::ComplexTensor3(arma::uword i1, arma::uword i2, arma::uword i3)
        : data_(i1, i2, i3, arma::fill::zeros)
    {
    }

    ComplexTensor3::ComplexTensor3(const Dims3 &dims)
        : ComplexTensor3(dims[0], dims[1], dims[2])
    {
    }

    ComplexTensor3::ComplexTensor3(arma::cx_cube data)
        : data_(std::move(data))
    {
    }

    arma::uword ComplexTensor3::dim(int mode) const
    {
        check_mode(mode);
        return dims()[mode - 1];
    }

    arma::cx_vec ComplexTensor3::fiber1(arma::uword i2, arma::uword i3) const
    {
        return arma::cx_vec(data_.slice(i3).col(i2));
    }

    ComplexTensor3 &ComplexTensor3::operator+=(const ComplexTensor3 &other)
    {
        if (dims() != other.dims())
            throw dimension_error("Tensor sum: dimension mismatch.");
        data_ += other.data_;
        return *this;
    }

    ComplexTensor3 &ComplexTensor3::operator*=(cx alpha)
    {
        data_ *= alpha;
        return *this;
    }

    ComplexTensor3 operator+(ComplexTensor3 a, const ComplexTensor3 &b)
    {
        a += b;
        return a;
    }

    ComplexTensor3 operator-(ComplexTensor3 a, const ComplexTensor3 &b)
    {
        if (a.dims() != b.dims())
            throw dimension_error("Tensor difference: dimension mismatch.");
        a.cube() -= b.cube();
        return a;
    }

    ComplexTensor3 operator*(cx alpha, ComplexTensor3 t)
    {
        t *= alpha;
        return t;
    }

    void FactorTriple::validate() const
    {
        if (f1.n_cols == 0)
            throw dimension_error("Factor matrices need at least one column.");
        if (f2.n_cols != f1.n_cols || f3.n_cols != f1.n_cols)
            throw dimension_error("Factor matrices must share the same column count.");
    }

    arma::cx_mat unfold(const ComplexTensor3 &t, int mode)
    {
        check_mode(mode);
        const auto [n1, n2, n3] = t.dims();
        const arma::cx_cube &c = t.cube();

        if (mode == 1)
            return arma::cx_mat(c.memptr(), n1, n2 * n3);

        arma::cx_mat m;
        if (mode == 2)
        {
            m.set_size(n2, n1 * n3);
            for (arma::uword i3 = 0; i3 < n3; ++i3)
                for (arma::uword i2 = 0; i2 < n2; ++i2)
                    for (arma::uword i1 = 0; i1 < n1; ++i1)
                        m(i2, i1 + i3 * n1) = c(i1, i2, i3);
        }
        else
        {
            m.set_size(n3, n1 * n2);
            for (arma::uword i3 = 0; i3 < n3; ++i3)
                for (arma::uword i2 = 0; i2 < n2; ++i2)
                    for (arma::uword i1 = 0; i1 < n1; ++i1)
                        m(i3, i1 + i2 * n1) = c(i1, i2, i3);
        }
        return m;
    }

    ComplexTensor3 fold(const arma::cx_mat &m, int mode, const Dims3 &dims)
    {
        check_mode(mode);
        const auto [n1, n2, n3] = dims;
        const arma::uword rows = dims[mode - 1];
        const arma::uword cols = (n1 * n2 * n3) / (rows == 0 ? 1 : rows);
        if (m.n_rows != rows || m.n_cols != cols)
            throw dimension_error("fold: matrix is " + std::to_string(m.n_rows) + "x" + std::to_string(m.n_cols) +
                                  ", expected " + std::to_string(rows) + "x" + std::to_string(cols) + ".");

        ComplexTensor3 t(dims);
        arma::cx_cube &c = t.cube();
        if (mode == 1)
        {
            std::copy(m.begin(), m.end(), c.begin());
        }
        else if (mode == 2)
        {
            for (arma::uword i3 = 0; i3 < n3; ++i3)
                for (arma::uword i2 = 0; i2 < n2; ++i2)
                    for (arma::uword i1 = 0; i1 < n1; ++i1)
                        c(i1, i2, i3) = m(i2, i1 + i3 * n1);
        }
        else
        {
            for (arma::uword i3 = 0; i3 < n3; ++i3)
                for (arma::uword i2 = 0; i2 < n2; ++i2)
                    for (arma::uword i1 = 0; i1 < n1; ++i1)
                        c(i1, i2, i3) = m(i3, i1 + i2 * n1);
        }
        return t;
    }

    arma::cx_mat khatri_rao(const arma::cx_mat &a, const arma::cx_mat &b)
    {
        if (a.n_cols != b.n_cols)
            throw dimension_error("khatri_rao: column counts differ (" + std::to_string(a.n_cols) + " vs " +
                                  std::to_string(b.n_cols) + ").");
        arma::cx_mat out(a.n_rows * b.n_rows, a.n_cols);
        for (arma::uword r = 0; r < a.n_cols; ++r)
            out.col(r) = arma::kron(a.col(r), b.col(r));
        return out;
    }

    ComplexTensor3 mode1_product(const ComplexTensor3 &t, const arma::cx_mat &m)
    {
        const auto [n1, n2, n3] = t.dims();
        if (m.n_cols != n1)
            throw dimension_error("mode1_product: matrix has " + std::to_string(m.n_cols) +
                                  " columns, tensor mode-1 size is " + std::to_string(n1) + ".");
        arma::cx_mat y = m * unfold(t, 1);
        return fold(y, 1, {m.n_rows, n2, n3});
    }

    ComplexTensor3 from_factors(const FactorTriple &f)
    {
        f.validate();
        // Mode-1 unfolding of [[F1, F2, F3]] is F1 (F3 kr F2)^T.
        arma::cx_mat y1 = f.f1 * khatri_rao(f.f3, f.f2).st();
        return fold(y1, 1, f.dims());
    }

    double tensor_norm(const ComplexTensor3 &t)
    {
        return arma::norm(arma::vectorise(t.cube()), 2);
    }
}
