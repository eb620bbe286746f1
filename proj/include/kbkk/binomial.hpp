/**
 * Binomial systems x^E = c: equation i reads prod_j x_j^{E_ij} = c_i.
 *
 * Integer column operations reduce E to a lower-triangular T = E V with V
 * unimodular. Writing log x = V log z turns the system into T log z = log c,
 * which is solved row by row; row i contributes |T_ii| branches, so there are
 * |det E| solutions in total. Everything is done on complex logarithms so
 * large exponents cannot overflow.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "kbkk/common.hpp"
#include "kbkk/polynomial.hpp"

namespace kbkk {

using IntMatrix = std::vector<std::vector<long long>>;

namespace detail {

inline long long checked_mul_sub(long long a, long long q, long long b) {
    long long prod = 0, out = 0;
    if (__builtin_mul_overflow(q, b, &prod) || __builtin_sub_overflow(a, prod, &out))
        throw ComputeError("integer overflow while reducing an exponent matrix");
    return out;
}

}  // namespace detail

/// Lower-triangular T and unimodular V with E V = T.
struct ColumnReduction {
    IntMatrix T;
    IntMatrix V;
};

inline ColumnReduction column_reduce(const IntMatrix& E) {
    const std::size_t n = E.size();
    for (const auto& row : E)
        if (row.size() != n) throw std::invalid_argument("exponent matrix must be square");
    ColumnReduction r{E, IntMatrix(n, std::vector<long long>(n, 0))};
    for (std::size_t i = 0; i < n; ++i) r.V[i][i] = 1;
    auto& T = r.T;
    auto col_op = [&](std::size_t dst, std::size_t src, long long q) {  // col_dst -= q col_src
        for (std::size_t k = 0; k < n; ++k) {
            T[k][dst] = detail::checked_mul_sub(T[k][dst], q, T[k][src]);
            r.V[k][dst] = detail::checked_mul_sub(r.V[k][dst], q, r.V[k][src]);
        }
    };
    auto col_swap = [&](std::size_t a, std::size_t b) {
        for (std::size_t k = 0; k < n; ++k) {
            std::swap(T[k][a], T[k][b]);
            std::swap(r.V[k][a], r.V[k][b]);
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        // Euclid on row i over columns i..n-1.
        while (true) {
            std::size_t pivot = n;
            for (std::size_t c = i; c < n; ++c)
                if (T[i][c] != 0 && (pivot == n || std::llabs(T[i][c]) < std::llabs(T[i][pivot]))) pivot = c;
            if (pivot == n) throw ComputeError("singular exponent matrix");
            bool done = true;
            for (std::size_t c = i; c < n; ++c) {
                if (c == pivot || T[i][c] == 0) continue;
                col_op(c, pivot, T[i][c] / T[i][pivot]);
                if (T[i][c] != 0) done = false;
            }
            if (done) {
                col_swap(i, pivot);
                break;
            }
        }
    }
    return r;
}

/// All |det E| solutions of x^E = rhs (rhs entries must be nonzero).
inline std::vector<CVector> solve_binomial_system(const IntMatrix& E, const std::vector<Complex>& rhs) {
    const std::size_t n = E.size();
    if (rhs.size() != n) throw std::invalid_argument("one right-hand side per equation required");
    for (const auto& c : rhs)
        if (c == Complex{}) throw std::invalid_argument("binomial right-hand sides must be nonzero");
    const auto red = column_reduce(E);
    const double two_pi = 2.0 * std::numbers::pi;

    std::vector<CVector> out;
    std::vector<Complex> L(n);  // log z, imaginary parts kept in (-pi, pi]
    auto wrap = [&](Complex v) {
        double im = std::remainder(v.imag(), two_pi);
        return Complex{v.real(), im};
    };
    auto emit = [&] {
        CVector x(static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) {
            Complex lx{};
            for (std::size_t k = 0; k < n; ++k) lx += static_cast<double>(red.V[j][k]) * L[k];
            x[static_cast<Eigen::Index>(j)] = std::exp(wrap(lx));
        }
        out.push_back(std::move(x));
    };
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == n) {
            emit();
            return;
        }
        Complex base = std::log(rhs[i]);
        for (std::size_t k = 0; k < i; ++k) base -= static_cast<double>(red.T[i][k]) * L[k];
        const long long d = red.T[i][i];
        const long long branches = std::llabs(d);
        for (long long m = 0; m < branches; ++m) {
            L[i] = wrap((base + Complex{0.0, two_pi * static_cast<double>(m)}) / static_cast<double>(d));
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    return out;
}

/// max_i |x^{E_i} / rhs_i - 1|
inline double binomial_residual(const IntMatrix& E, const std::vector<Complex>& rhs, const CVector& x) {
    double worst = 0.0;
    for (std::size_t i = 0; i < E.size(); ++i) {
        Complex v{1.0, 0.0};
        for (std::size_t j = 0; j < E.size(); ++j) v *= std::pow(x[static_cast<Eigen::Index>(j)], static_cast<int>(E[i][j]));
        worst = std::max(worst, std::abs(v / rhs[i] - 1.0));
    }
    return worst;
}

}  // namespace kbkk
