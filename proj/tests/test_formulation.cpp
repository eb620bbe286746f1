#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "kbkk/formulation.hpp"
#include "kbkk/mixed_volume.hpp"

using namespace kbkk;

namespace {

using PointSet = std::set<Point>;

PointSet support_set(const Polynomial& p) {
    PointSet s;
    for (const auto& t : p.terms()) s.insert(t.exponents);
    return s;
}

KuramotoInstance unit_instance(WeightedGraph g, Complex omega_scale = 0.3) {
    KuramotoInstance inst{std::move(g), {}};
    for (std::size_t i = 0; i < inst.size(); ++i) inst.omega.push_back(omega_scale * static_cast<double>(i + 1));
    return inst;
}

KuramotoInstance complete_instance(std::size_t n) {
    auto one = ScalarSampler::constant(1.0);
    return unit_instance(make_complete(n, one));
}

// Expected exp-system supports straight from the graph pattern.
std::vector<PointSet> expected_exp_supports(const KuramotoInstance& inst) {
    const std::size_t N = inst.size(), m = N - 1;
    auto e = [&](std::initializer_list<std::size_t> vars) {
        Point p(2 * m, 0);
        for (auto v : vars) ++p[v];
        return p;
    };
    std::vector<PointSet> out;
    for (std::size_t i = 0; i < m; ++i) {
        PointSet s{e({})};
        for (std::size_t j = 0; j < N; ++j) {
            if (j == i || inst.graph(i, j) == Complex{}) continue;
            if (j == N - 1) {
                s.insert(e({2 * i}));
                s.insert(e({2 * i + 1}));
            } else {
                s.insert(e({2 * i, 2 * j + 1}));
                s.insert(e({2 * j, 2 * i + 1}));
            }
        }
        out.push_back(s);
    }
    for (std::size_t i = 0; i < m; ++i) out.push_back({e({2 * i, 2 * i + 1}), e({})});
    return out;
}

// Right-hand side of the Kuramoto ODE, written out independently.
std::vector<Complex> ode_rhs(const KuramotoInstance& inst, const std::vector<double>& th) {
    const std::size_t N = inst.size();
    std::vector<Complex> r;
    for (std::size_t i = 0; i + 1 < N; ++i) {
        Complex acc = inst.omega[i];
        for (std::size_t j = 0; j < N; ++j) acc -= inst.graph(i, j) * std::sin(th[i] - th[j]) / double(N);
        r.push_back(acc);
    }
    return r;
}

}  // namespace

TEST(ExpSystem, ThreeNodeCompleteGraphSupports) {
    const auto sys = build_exp_system(complete_instance(3));
    ASSERT_EQ(sys.size(), 4u);
    EXPECT_EQ(sys.var_names, (std::vector<std::string>{"x1", "y1", "x2", "y2"}));
    EXPECT_EQ(sys.tag, Formulation::Exp);
    const std::vector<PointSet> expected{
        {{1, 0, 0, 1}, {0, 1, 1, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 0}},
        {{0, 1, 1, 0}, {1, 0, 0, 1}, {0, 0, 1, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}},
        {{1, 1, 0, 0}, {0, 0, 0, 0}},
        {{0, 0, 1, 1}, {0, 0, 0, 0}},
    };
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(support_set(sys.polys[k]), expected[k]) << "equation " << k + 1;
    EXPECT_EQ(support_of(sys.polys[2]), Support({{1, 1, 0, 0}, {0, 0, 0, 0}}));
}

TEST(ExpSystem, ThreeNodeCoefficients) {
    // K12 = 2, K13 = 3, K23 = 5, omega = (0.1, 0.2, -0.3); equation 1 times 2*I*3:
    // 2 (x1 y2 - x2 y1) + 3 (x1 - y1) - 6 I 0.1
    WeightedGraph g(3);
    g.set_symmetric(0, 1, 2.0);
    g.set_symmetric(0, 2, 3.0);
    g.set_symmetric(1, 2, 5.0);
    const auto sys = build_exp_system({g, {0.1, 0.2, -0.3}});
    const auto& p = sys.polys[0];
    EXPECT_EQ(p.coefficient_of({1, 0, 0, 1}), Complex(2.0));
    EXPECT_EQ(p.coefficient_of({0, 1, 1, 0}), Complex(-2.0));
    EXPECT_EQ(p.coefficient_of({1, 0, 0, 0}), Complex(3.0));
    EXPECT_EQ(p.coefficient_of({0, 1, 0, 0}), Complex(-3.0));
    EXPECT_NEAR(std::abs(p.coefficient_of({0, 0, 0, 0}) - Complex(0.0, -0.6)), 0.0, 1e-15);
    const auto& q = sys.polys[1];
    EXPECT_EQ(q.coefficient_of({0, 1, 1, 0}), Complex(2.0));
    EXPECT_EQ(q.coefficient_of({0, 0, 1, 0}), Complex(5.0));
    EXPECT_EQ(q.coefficient_of({0, 0, 0, 1}), Complex(-5.0));
}

TEST(ExpSystem, TwoNodeExample) {
    // K12 = 1, omega = 0 gives {x1 - y1, x1 y1 - 1}.
    WeightedGraph g(2);
    g.set_symmetric(0, 1, 1.0);
    const auto sys = build_exp_system({g, {0.0, 0.0}});
    ASSERT_EQ(sys.size(), 2u);
    EXPECT_EQ(sys.polys[0].terms().size(), 2u);
    EXPECT_EQ(sys.polys[0].coefficient_of({1, 0}), Complex(1.0));
    EXPECT_EQ(sys.polys[0].coefficient_of({0, 1}), Complex(-1.0));
    EXPECT_EQ(sys.polys[1].coefficient_of({1, 1}), Complex(1.0));
    EXPECT_EQ(sys.polys[1].coefficient_of({0, 0}), Complex(-1.0));
    CVector one(2);
    one << 1.0, 1.0;
    EXPECT_EQ(sys.residual(one), 0.0);
    EXPECT_EQ(dump_system(sys), "(1, 0) * x1^1 + (-1, 0) * y1^1\n(1, 0) * x1^1 y1^1 + (-1, 0)\n");
}

TEST(ExpSystem, PathGraphOmitsMissingEdges) {
    auto one = ScalarSampler::constant(1.0);
    const auto inst = unit_instance(make_path(3, one));
    const auto sys = build_exp_system(inst);
    // node 1 is not adjacent to the pinned node 3: no x1, y1 monomials
    EXPECT_EQ(support_set(sys.polys[0]), (PointSet{{1, 0, 0, 1}, {0, 1, 1, 0}, {0, 0, 0, 0}}));
    EXPECT_EQ(support_set(sys.polys[1]), (PointSet{{0, 1, 1, 0}, {1, 0, 0, 1}, {0, 0, 1, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}}));
}

TEST(ExpSystem, SupportsFollowTheGraph) {
    std::mt19937_64 gen(31);
    auto w = ScalarSampler::default_real_weights(1);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + gen() % 6;
        const auto inst = unit_instance(make_erdos_renyi(n, 0.5, w, gen()));
        const auto sys = build_exp_system(inst);
        const auto expected = expected_exp_supports(inst);
        ASSERT_EQ(sys.size(), expected.size());
        for (std::size_t k = 0; k < sys.size(); ++k) EXPECT_EQ(support_set(sys.polys[k]), expected[k]);
    }
}

TEST(ExpSystem, RealParametersGiveRealCoefficients) {
    const auto sys = build_exp_system(complete_instance(5));
    for (const auto& p : sys.polys)
        for (const auto& t : p.terms()) {
            if (std::all_of(t.exponents.begin(), t.exponents.end(), [](int e) { return e == 0; }) &&
                &p - &sys.polys[0] < 4)
                EXPECT_EQ(t.coefficient.real(), 0.0);  // -2 I N omega is imaginary
            else
                EXPECT_EQ(t.coefficient.imag(), 0.0);
        }
}

TEST(SubstitutionIdentity, ReproducesKuramotoRightHandSide) {
    Rng rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(7);
        const bool complex_params = trial % 2 == 1;
        auto w = complex_params ? ScalarSampler::default_complex_weights(rng.next())
                                : ScalarSampler::default_real_weights(rng.next());
        KuramotoInstance inst{trial % 3 == 0 ? make_complete(n, w) : make_erdos_renyi(n, 0.6, w, rng.next()), {}};
        for (std::size_t i = 0; i < n; ++i)
            inst.omega.emplace_back(rng.uniform(-1, 1), complex_params ? rng.uniform(-1, 1) : 0.0);
        std::vector<double> theta(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) theta[i] = rng.uniform(-std::numbers::pi, std::numbers::pi);

        const auto sys = build_exp_system(inst);
        const CVector v = sys.evaluate(exp_point_from_angles(theta));
        const auto rhs = ode_rhs(inst, theta);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            worst = std::max(worst, std::abs(exp_value_to_rhs(v[static_cast<Eigen::Index>(i)], n) - rhs[i]));
            worst = std::max(worst, std::abs(v[static_cast<Eigen::Index>(n - 1 + i)]));  // x y - 1
        }
        const auto lib = kuramoto_rhs(inst, theta);
        for (std::size_t i = 0; i + 1 < n; ++i) EXPECT_LT(std::abs(lib[i] - rhs[i]), 1e-14);
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(SinCosSystem, ThreeNodePatterns) {
    const auto sys = build_sincos_system(complete_instance(3));
    EXPECT_EQ(sys.var_names, (std::vector<std::string>{"s1", "c1", "s2", "c2"}));
    EXPECT_EQ(sys.tag, Formulation::SinCos);
    // s1 c2, s2 c1, s1 (from the pinned node), constant
    EXPECT_EQ(support_set(sys.polys[0]), (PointSet{{1, 0, 0, 1}, {0, 1, 1, 0}, {1, 0, 0, 0}, {0, 0, 0, 0}}));
    EXPECT_EQ(support_set(sys.polys[1]), (PointSet{{0, 1, 1, 0}, {1, 0, 0, 1}, {0, 0, 1, 0}, {0, 0, 0, 0}}));
    for (std::size_t k = 2; k < 4; ++k) EXPECT_EQ(sys.polys[k].terms().size(), 3u);
}

TEST(SinCosSystem, TwoNodeExample) {
    WeightedGraph g(2);
    g.set_symmetric(0, 1, 1.5);
    const auto sys = build_sincos_system({g, {0.2, -0.2}});
    const auto& p = sys.polys[0];
    EXPECT_EQ(p.terms().size(), 2u);
    EXPECT_EQ(p.coefficient_of({0, 0}), Complex(0.2));
    EXPECT_EQ(p.coefficient_of({1, 0}), Complex(-0.75));
    EXPECT_EQ(support_set(sys.polys[1]), (PointSet{{2, 0}, {0, 2}, {0, 0}}));
}

TEST(SinCosSystem, SolutionsFromAngles) {
    // At an equilibrium of the ODE, (sin, cos) is a root of the sincos system.
    WeightedGraph g(2);
    g.set_symmetric(0, 1, 1.0);
    const double omega = 0.2;
    const auto sys = build_sincos_system({g, {omega, -omega}});
    const double th = std::asin(2.0 * omega);  // omega = (K / N) sin(theta)
    CVector x(2);
    x << std::sin(th), std::cos(th);
    EXPECT_LT(sys.residual(x), 1e-15);
}

TEST(Bounds, BezoutValues) {
    EXPECT_EQ(bezout_bound(build_exp_system(complete_instance(3))), 16);
    EXPECT_EQ(bezout_bound(build_exp_system(complete_instance(4))), 64);
    // N = 2: the coupling equation is linear in both formulations
    EXPECT_EQ(bezout_bound(build_exp_system(complete_instance(2))), 2);
    EXPECT_EQ(bezout_bound(build_sincos_system(complete_instance(2))), 2);
    auto one = ScalarSampler::constant(1.0);
    for (std::size_t n = 3; n <= 15; ++n) {
        const BigInt expect = BigInt(1) << (2 * (n - 1));
        EXPECT_EQ(bezout_bound(build_exp_system(unit_instance(make_path(n, one)))), expect);
        EXPECT_EQ(bezout_bound(build_exp_system(unit_instance(make_ring(n, one)))), expect);
        EXPECT_EQ(bezout_bound(build_sincos_system(unit_instance(make_ring(n, one)))), expect);
    }
}

TEST(Bounds, BinomialValues) {
    const std::vector<std::string> table{"6",      "20",      "70",       "252",      "924",
                                         "3432",   "12870",   "48620",    "184756",   "705432",
                                         "2704156", "10400600", "40116600"};
    for (std::size_t n = 3; n <= 15; ++n) EXPECT_EQ(to_string(binomial_bound(n)), table[n - 3]) << "N = " << n;
    EXPECT_EQ(binomial_bound(2), 2);
    EXPECT_EQ(to_string(binomial_bound(40)), "27217014869199032015600");  // C(78, 39)
    EXPECT_THROW(binomial_bound(1), InvalidSize);
}

TEST(Evaluation, ConstraintPolynomial) {
    Polynomial p(2);
    p.add({1, 1}, 1.0).add({0, 0}, -1.0);
    CVector x(2);
    x << 2.0, 0.5;
    EXPECT_EQ(p.evaluate(x), Complex{});
    const Complex a(0.3, -1.2), b(2.0, 0.7);
    x << a, b;
    EXPECT_EQ(p.derivative(0, x), b);
    EXPECT_EQ(p.derivative(1, x), a);
}

TEST(Evaluation, JacobianMatchesFiniteDifferences) {
    Rng rng(8);
    for (auto build : {build_exp_system, build_sincos_system}) {
        auto w = ScalarSampler::default_complex_weights(3);
        KuramotoInstance inst{make_complete(4, w), {Complex(0.1, 0.2), 0.3, Complex(-0.2, 0.1), 0.0}};
        const auto sys = build(inst);
        for (int trial = 0; trial < 10; ++trial) {
            CVector x(6);
            for (auto& v : x) v = Complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
            const CMatrix J = sys.jacobian(x);
            const double h = 1e-6;
            for (Eigen::Index k = 0; k < 6; ++k) {
                CVector xp = x, xm = x;
                xp[k] += h;
                xm[k] -= h;
                const CVector fd = (sys.evaluate(xp) - sys.evaluate(xm)) / (2 * h);
                EXPECT_LT((fd - J.col(k)).cwiseAbs().maxCoeff(), 1e-7);
            }
        }
        CVector bad(3);
        EXPECT_THROW(sys.evaluate(bad), std::invalid_argument);
    }
}

TEST(Polynomial, MergesAndDropsTerms) {
    Polynomial p(2);
    p.add({1, 0}, 1.0).add({1, 0}, 2.0).add({0, 1}, 0.0);
    EXPECT_EQ(p.terms().size(), 1u);
    EXPECT_EQ(p.coefficient_of({1, 0}), Complex(3.0));
    p.add({1, 0}, -3.0);
    EXPECT_TRUE(p.empty());
    EXPECT_THROW(p.add({1}, 1.0), std::invalid_argument);
    EXPECT_THROW(p.add({-1, 0}, 1.0), std::invalid_argument);
}

TEST(RecoverAngles, TorusPoints) {
    auto one = ScalarSampler::constant(1.0);
    const auto sys3 = build_exp_system({make_complete(3, one), {0.0, 0.0, 0.0}});
    CVector ones = CVector::Ones(4);
    const auto r = recover_angles(sys3, ones);
    ASSERT_EQ(r.status, AngleRecovery::Status::Torus);
    EXPECT_EQ(r.theta, (std::vector<double>{0.0, 0.0, 0.0}));

    const auto sys2 = build_exp_system({make_complete(2, one), {0.0, 0.0}});
    CVector anti(2);
    anti << -1.0, -1.0;
    const auto a = recover_angles(sys2, anti);
    ASSERT_EQ(a.status, AngleRecovery::Status::Torus);
    EXPECT_DOUBLE_EQ(a.theta[0], std::numbers::pi);
    EXPECT_EQ(a.theta[1], 0.0);
    // the negative-zero branch still lands on +pi
    anti << Complex(-1.0, -0.0), Complex(-1.0, 0.0);
    EXPECT_DOUBLE_EQ(recover_angles(sys2, anti).theta[0], std::numbers::pi);
}

TEST(RecoverAngles, RejectsOffTorusAndNonSolutions) {
    // x1 = 2, y1 = 1/2 solves the two-node system with K = 1 and omega_1 = 1.5 / (4 I).
    auto one = ScalarSampler::constant(1.0);
    const Complex w = Complex(1.5) / Complex(0.0, 4.0);
    const auto sys = build_exp_system({make_complete(2, one), {w, -w}});
    CVector x(2);
    x << 2.0, 0.5;
    ASSERT_LT(sys.residual(x), 1e-14);
    const auto r = recover_angles(sys, x);
    EXPECT_EQ(r.status, AngleRecovery::Status::NonTorus);
    EXPECT_TRUE(r.theta.empty());
    EXPECT_NEAR(r.torus_defect, 1.0, 1e-15);

    x << 1.0, 0.5;
    EXPECT_THROW(recover_angles(sys, x), std::invalid_argument);
    const auto sc = build_sincos_system({make_complete(2, one), {0.0, 0.0}});
    EXPECT_THROW(recover_angles(sc, x), std::invalid_argument);
}

TEST(Instance, OmegaLengthIsChecked) {
    auto one = ScalarSampler::constant(1.0);
    KuramotoInstance inst{make_complete(3, one), {0.0, 0.0}};
    EXPECT_THROW(build_exp_system(inst), std::invalid_argument);
    EXPECT_THROW(build_sincos_system(inst), std::invalid_argument);
}
