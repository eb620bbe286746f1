/**
 * Polynomial formulations of the Kuramoto equilibrium equations
 *
 *     0 = omega_i - (1/N) sum_j K_ij sin(theta_i - theta_j),   i = 1..N-1,
 *
 * with theta_N = 0, plus the closed-form Bezout and binomial root bounds.
 *
 * Exp formulation (variables x1, y1, ..., x_{N-1}, y_{N-1}; x = e^{I theta},
 * y = e^{-I theta}). Since sin(a - b) = (x_a y_b - x_b y_a) / (2I), each
 * coupling equation is multiplied through by 2*I*N:
 *
 *     sum_j K_ij (x_i y_j - x_j y_i) - 2 I N omega_i = 0,   x_N = y_N = 1
 *     x_i y_i - 1 = 0
 *
 * SinCos formulation (variables s1, c1, ...; s = sin theta, c = cos theta):
 *
 *     omega_i - (1/N) sum_j K_ij (s_i c_j - s_j c_i) = 0,   s_N = 0, c_N = 1
 *     s_i^2 + c_i^2 - 1 = 0
 *
 * Terms with K_ij = 0 are never created, so supports follow the graph.
 */
#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "kbkk/bigint.hpp"
#include "kbkk/graph.hpp"
#include "kbkk/polynomial.hpp"

namespace kbkk {

/// Recorded in outputs: the scale applied to the exp coupling equations.
inline constexpr const char* kExpNormalization = "coupling equations multiplied by 2*I*N";

inline PolynomialSystem build_exp_system(const KuramotoInstance& inst) {
    inst.validate();
    const std::size_t N = inst.size();
    const std::size_t m = N - 1;
    const std::size_t nv = 2 * m;
    const Complex I{0.0, 1.0};
    const double dn = static_cast<double>(N);

    PolynomialSystem sys;
    sys.tag = Formulation::Exp;
    for (std::size_t i = 0; i < m; ++i) {
        sys.var_names.push_back("x" + std::to_string(i + 1));
        sys.var_names.push_back("y" + std::to_string(i + 1));
    }
    auto unit = [&](std::initializer_list<std::size_t> vars) {
        Exponent a(nv, 0);
        for (auto v : vars) ++a[v];
        return a;
    };
    auto xv = [](std::size_t i) { return 2 * i; };
    auto yv = [](std::size_t i) { return 2 * i + 1; };

    for (std::size_t i = 0; i < m; ++i) {
        Polynomial p(nv);
        for (std::size_t j = 0; j < N; ++j) {
            if (j == i) continue;
            const Complex k = inst.graph(i, j);
            if (k == Complex{}) continue;
            if (j == N - 1) {
                p.add(unit({xv(i)}), k);
                p.add(unit({yv(i)}), -k);
            } else {
                p.add(unit({xv(i), yv(j)}), k);
                p.add(unit({xv(j), yv(i)}), -k);
            }
        }
        p.add(unit({}), -2.0 * I * dn * inst.omega[i]);
        sys.polys.push_back(std::move(p));
    }
    for (std::size_t i = 0; i < m; ++i) {
        Polynomial c(nv);
        c.add(unit({xv(i), yv(i)}), 1.0);
        c.add(unit({}), -1.0);
        sys.polys.push_back(std::move(c));
    }
    return sys;
}

inline PolynomialSystem build_sincos_system(const KuramotoInstance& inst) {
    inst.validate();
    const std::size_t N = inst.size();
    const std::size_t m = N - 1;
    const std::size_t nv = 2 * m;
    const double dn = static_cast<double>(N);

    PolynomialSystem sys;
    sys.tag = Formulation::SinCos;
    for (std::size_t i = 0; i < m; ++i) {
        sys.var_names.push_back("s" + std::to_string(i + 1));
        sys.var_names.push_back("c" + std::to_string(i + 1));
    }
    auto mono = [&](std::initializer_list<std::pair<std::size_t, int>> powers) {
        Exponent a(nv, 0);
        for (auto [v, e] : powers) a[v] += e;
        return a;
    };
    auto sv = [](std::size_t i) { return 2 * i; };
    auto cv = [](std::size_t i) { return 2 * i + 1; };

    for (std::size_t i = 0; i < m; ++i) {
        Polynomial p(nv);
        p.add(mono({}), inst.omega[i]);
        for (std::size_t j = 0; j < N; ++j) {
            if (j == i) continue;
            const Complex k = inst.graph(i, j);
            if (k == Complex{}) continue;
            if (j == N - 1) {
                p.add(mono({{sv(i), 1}}), -k / dn);
            } else {
                p.add(mono({{sv(i), 1}, {cv(j), 1}}), -k / dn);
                p.add(mono({{sv(j), 1}, {cv(i), 1}}), k / dn);
            }
        }
        sys.polys.push_back(std::move(p));
    }
    for (std::size_t i = 0; i < m; ++i) {
        Polynomial c(nv);
        c.add(mono({{sv(i), 2}}), 1.0);
        c.add(mono({{cv(i), 2}}), 1.0);
        c.add(mono({}), -1.0);
        sys.polys.push_back(std::move(c));
    }
    return sys;
}

/// Product of the total degrees.
inline BigInt bezout_bound(const PolynomialSystem& sys) {
    if (!sys.is_square()) throw std::invalid_argument("Bezout bound needs a square system");
    BigInt b = 1;
    for (const auto& p : sys.polys) b *= p.degree();
    return b;
}

/// C(2(N-1), N-1).
inline BigInt binomial_bound(std::size_t n_nodes) {
    if (n_nodes < 2) throw InvalidSize("binomial bound needs at least 2 nodes");
    const std::size_t m = n_nodes - 1;
    BigInt c = 1;
    for (std::size_t k = 1; k <= m; ++k) {
        c *= static_cast<unsigned long>(m + k);
        c /= static_cast<unsigned long>(k);
    }
    return c;
}

/**
 * Right-hand side of the Kuramoto ODE for nodes 1..N-1 at phases theta
 * (length N; complex parameters are allowed).
 */
inline std::vector<Complex> kuramoto_rhs(const KuramotoInstance& inst, const std::vector<double>& theta) {
    const std::size_t N = inst.size();
    if (theta.size() != N) throw std::invalid_argument("theta must have one entry per node");
    std::vector<Complex> r(N - 1);
    for (std::size_t i = 0; i + 1 < N; ++i) {
        Complex sum{};
        for (std::size_t j = 0; j < N; ++j)
            if (j != i) sum += inst.graph(i, j) * std::sin(theta[i] - theta[j]);
        r[i] = inst.omega[i] - sum / static_cast<double>(N);
    }
    return r;
}

/// Point of the exp system corresponding to phases theta (theta_N must be 0).
inline CVector exp_point_from_angles(const std::vector<double>& theta) {
    const std::size_t m = theta.size() - 1;
    CVector x(static_cast<Eigen::Index>(2 * m));
    for (std::size_t i = 0; i < m; ++i) {
        x[static_cast<Eigen::Index>(2 * i)] = std::polar(1.0, theta[i]);
        x[static_cast<Eigen::Index>(2 * i + 1)] = std::polar(1.0, -theta[i]);
    }
    return x;
}

/// Maps a value of the exp coupling polynomial i back to the ODE right-hand side.
inline Complex exp_value_to_rhs(Complex value, std::size_t n_nodes) {
    return -value / (Complex{0.0, 2.0} * static_cast<double>(n_nodes));
}

struct AngleRecovery {
    enum class Status { Torus, NonTorus };
    Status status = Status::NonTorus;
    std::vector<double> theta;  // length N with theta_N = 0; empty when NonTorus
    double torus_defect = 0.0;  // max_i | |x_i| - 1 |
};

/**
 * Phases of an exp-system solution. Rejected as NonTorus when some |x_i|
 * deviates from 1 by more than tau_torus. Throws if `point` is not a solution.
 */
inline AngleRecovery recover_angles(const PolynomialSystem& sys, const CVector& point, double tau_torus = 1e-6,
                                    double residual_tol = 1e-8) {
    if (sys.tag != Formulation::Exp) throw std::invalid_argument("angle recovery needs an exp-formulation system");
    const double res = sys.residual(point);
    if (!(res <= residual_tol))
        throw std::invalid_argument("not a solution: residual " + std::to_string(res) + " exceeds " +
                                    std::to_string(residual_tol));
    const std::size_t m = sys.num_vars() / 2;
    AngleRecovery out;
    for (std::size_t i = 0; i < m; ++i)
        out.torus_defect = std::max(out.torus_defect, std::abs(std::abs(point[static_cast<Eigen::Index>(2 * i)]) - 1.0));
    if (out.torus_defect > tau_torus) return out;
    out.status = AngleRecovery::Status::Torus;
    out.theta.resize(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double a = std::arg(point[static_cast<Eigen::Index>(2 * i)]);
        if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;  // (-pi, pi]
        out.theta[i] = a;
    }
    return out;
}

}  // namespace kbkk
