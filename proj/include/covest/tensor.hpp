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

#ifndef COVEST_TENSOR_HPP
#define COVEST_TENSOR_HPP

#include <armadillo>
#include <array>
#include <complex>

namespace covest
{
    using cx = std::complex<double>;
    using Dims3 = std::array<arma::uword, 3>;

    // Dense third-order complex tensor of size I1 x I2 x I3.
    //
    // Entries are stored with i1 fastest, then i2, then i3. With this layout the raw
    // storage already is the mode-1 unfolding. All indices are 0-based; the formulas in
    // the docs use 1-based (i1, i2, i3).
    class ComplexTensor3
    {
    public:
        ComplexTensor3() = default;
        ComplexTensor3(arma::uword i1, arma::uword i2, arma::uword i3);
        explicit ComplexTensor3(const Dims3 &dims);
        explicit ComplexTensor3(arma::cx_cube data);

        Dims3 dims() const { return {data_.n_rows, data_.n_cols, data_.n_slices}; }
        arma::uword dim(int mode) const; // mode in {1,2,3}
        arma::uword n_elem() const { return data_.n_elem; }

        cx &operator()(arma::uword i1, arma::uword i2, arma::uword i3) { return data_(i1, i2, i3); }
        const cx &operator()(arma::uword i1, arma::uword i2, arma::uword i3) const { return data_(i1, i2, i3); }

        const arma::cx_cube &cube() const { return data_; }
        arma::cx_cube &cube() { return data_; }

        // Mode-1 fiber (:, i2, i3).
        arma::cx_vec fiber1(arma::uword i2, arma::uword i3) const;

        bool is_finite() const { return data_.is_finite(); }

        ComplexTensor3 &operator+=(const ComplexTensor3 &other);
        ComplexTensor3 &operator*=(cx alpha);

    private:
        arma::cx_cube data_;
    };

    ComplexTensor3 operator+(ComplexTensor3 a, const ComplexTensor3 &b);
    ComplexTensor3 operator-(ComplexTensor3 a, const ComplexTensor3 &b);
    ComplexTensor3 operator*(cx alpha, ComplexTensor3 t);

    // Factor matrices of a rank-R CPD: F1 (I1 x R), F2 (I2 x R), F3 (I3 x R).
    struct FactorTriple
    {
        arma::cx_mat f1;
        arma::cx_mat f2;
        arma::cx_mat f3;

        arma::uword rank() const { return f1.n_cols; }
        Dims3 dims() const { return {f1.n_rows, f2.n_rows, f3.n_rows}; }

        // Throws dimension_error unless all three share a column count >= 1.
        void validate() const;
    };

    // Mode-n unfolding. Element (i1,i2,i3) lands in row i_n and column
    //   j = 1 + sum_{k != n} (i_k - 1) prod_{m < k, m != n} I_m       (1-based).
    arma::cx_mat unfold(const ComplexTensor3 &t, int mode);

    // Inverse of unfold for the given target dimensions.
    ComplexTensor3 fold(const arma::cx_mat &m, int mode, const Dims3 &dims);

    // Column-wise Kronecker product: column r is kron(A(:,r), B(:,r)).
    arma::cx_mat khatri_rao(const arma::cx_mat &a, const arma::cx_mat &b);

    // t x_1 M, i.e. unfold(result,1) = M * unfold(t,1).
    ComplexTensor3 mode1_product(const ComplexTensor3 &t, const arma::cx_mat &m);

    // sum_r F1(:,r) o F2(:,r) o F3(:,r)
    ComplexTensor3 from_factors(const FactorTriple &f);

    double tensor_norm(const ComplexTensor3 &t);
}

#endif
