/**
 * Polyhedral homotopy solver.
 *
 * Stage 1 solves a start system G with the target's supports and random
 * complex coefficients g. For each mixed cell (normal alpha) of a generic
 * lifting w, substituting x = t^alpha y into
 *
 *     G_i(x, t) = sum_q g_q x^q t^{w(q)}
 *
 * and dividing by the minimal power of t gives sum_q g_q y^q t^{gamma_q} with
 * gamma_q >= 0, vanishing exactly on the cell's pair. At t = 0 this is a
 * binomial system with |det| roots. Paths are tracked in the log-scale
 * parameter r with t = exp(-exp(r)), which spreads the wildly different
 * powers gamma_q evenly over the path; at t = 1 we have y = x.
 *
 * Stage 2 follows the G roots to the target F along
 * H = (1 - u) gamma G + u F with a random unit gamma (the gamma trick).
 *
 * A total-degree homotopy (start system x_i^{d_i} - 1) is available as an
 * independent cross-check.
 */
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <thread>
#include <vector>

#include "kbkk/binomial.hpp"
#include "kbkk/formulation.hpp"
#include "kbkk/mixed_volume.hpp"
#include "kbkk/tracker.hpp"

namespace kbkk {

enum class SolveMode { Polyhedral, TotalDegree };

inline const char* mode_name(SolveMode m) { return m == SolveMode::Polyhedral ? "polyhedral" : "total-degree"; }

/// Term list of a system (terms in polynomial order) and its coefficients.
struct CompiledSystem {
    TermList terms;
    std::vector<Complex> coeffs;
    std::vector<std::size_t> offset;  // first term index of each polynomial
};

inline CompiledSystem compile_system(const PolynomialSystem& sys) {
    if (!sys.is_square()) throw std::invalid_argument("homotopy solving needs a square system");
    CompiledSystem out{TermList(sys.size(), sys.num_vars()), {}, {}};
    for (std::size_t i = 0; i < sys.size(); ++i) {
        out.offset.push_back(out.terms.size());
        for (const auto& t : sys.polys[i].terms()) {
            out.terms.add(i, t.exponents);
            out.coeffs.push_back(t.coefficient);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Start system

struct StartCell {
    IntMatrix exponents;             // row i: b_i - a_i
    std::vector<Complex> rhs;        // -g_a / g_b
    std::vector<double> powers;      // gamma_q per term (0 on the cell's pairs)
    std::vector<CVector> solutions;  // roots of the binomial system
};

struct StartSystem {
    CompiledSystem random;  // G: target supports, random coefficients
    std::vector<StartCell> cells;

    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& c : cells) n += c.solutions.size();
        return n;
    }
};

/**
 * Random-coefficient start system with one binomial system per mixed cell.
 * `lifted` must be the lifting of exactly the supports of `sys`.
 */
inline StartSystem build_start_system(const PolynomialSystem& sys, const std::vector<MixedCell>& cells,
                                      const std::vector<LiftedSupport>& lifted, std::uint64_t seed) {
    StartSystem st{compile_system(sys), {}};
    const std::size_t n = sys.size();
    if (lifted.size() != n) throw ComputeError("lifting does not match the system");
    for (std::size_t i = 0; i < n; ++i)
        if (!(lifted[i].base == support_of(sys.polys[i]))) throw ComputeError("lifting does not match the system");
    Rng rng(seed);
    for (auto& c : st.random.coeffs) c = rng.unit_circle();

    for (const auto& cell : cells) {
        if (cell.pairs.size() != n || cell.normal.size() != n) throw ComputeError("mixed cell has the wrong size");
        StartCell sc;
        sc.powers.assign(st.random.terms.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& pts = lifted[i].base.points;
            const auto [a, b] = cell.pairs[i];
            std::vector<long long> row(n);
            for (std::size_t j = 0; j < n; ++j) row[j] = pts[b][j] - pts[a][j];
            sc.exponents.push_back(row);
            const Complex ga = st.random.coeffs[st.random.offset[i] + a];
            const Complex gb = st.random.coeffs[st.random.offset[i] + b];
            sc.rhs.push_back(-ga / gb);
            auto inner = [&](std::size_t q) {
                Rational v = lifted[i].lifts[q];
                for (std::size_t j = 0; j < n; ++j) v += cell.normal[j] * pts[q][j];
                return v;
            };
            const Rational beta = inner(a);
            if (inner(b) != beta) throw ComputeError("mixed cell normal does not certify its pair");
            for (std::size_t q = 0; q < pts.size(); ++q) {
                const Rational g = inner(q) - beta;
                if (q != a && q != b && g <= 0) throw ComputeError("mixed cell normal is not a strict minimizer");
                sc.powers[st.random.offset[i] + q] = static_cast<double>(g);
            }
        }
        sc.solutions = solve_binomial_system(sc.exponents, sc.rhs);
        if (BigInt(sc.solutions.size()) != cell.volume) throw ComputeError("binomial root count differs from cell volume");
        st.cells.push_back(std::move(sc));
    }
    return st;
}

/// Stage-1 homotopy of one cell, parametrized by u in [0, 1].
class PolyhedralHomotopy : public CoefficientHomotopy {
  public:
    PolyhedralHomotopy(const CompiledSystem& random, const std::vector<double>& powers)
        : CoefficientHomotopy(random.terms), g_(random.coeffs), powers_(powers) {
        double pmin = std::numeric_limits<double>::infinity(), pmax = 0.0;
        for (double p : powers_)
            if (p > 0) {
                pmin = std::min(pmin, p);
                pmax = std::max(pmax, p);
            }
        if (pmax == 0.0) pmin = pmax = 1.0;
        // start where every nonzero power is below e^-40, end where t^p >= 1 - 1e-12
        r0_ = std::log(40.0 / pmin);
        r1_ = std::log(1e-12 / pmax);
    }

    void coefficients(double u, std::vector<Complex>& c, std::vector<Complex>& dc) const override {
        const double r = r0_ + u * (r1_ - r0_);
        const double s = -std::exp(r);  // log t
        c.resize(g_.size());
        dc.resize(g_.size());
        for (std::size_t k = 0; k < g_.size(); ++k) {
            const double p = powers_[k];
            const double e = p == 0.0 ? 1.0 : std::exp(p * s);
            c[k] = g_[k] * e;
            dc[k] = g_[k] * (p * s * e * (r1_ - r0_));
        }
    }

    bool watch_divergence() const override { return false; }
    bool geometric_endgame() const override { return false; }

  private:
    std::vector<Complex> g_;
    std::vector<double> powers_;
    double r0_ = 0, r1_ = 0;
};

// ---------------------------------------------------------------------------
// Solution sets

struct Solution {
    CVector x;
    double residual = 0.0;
    double condition = 0.0;
    std::size_t path = 0;       // index of the path that produced it
    bool on_torus = false;      // exp: |x_i| = 1; sincos: real coordinates
    std::vector<double> theta;  // phases (length N, last = 0) when on_torus
};

struct SolutionCounts {
    std::size_t paths_tracked = 0;
    std::size_t converged = 0;
    std::size_t diverged = 0;
    std::size_t singular = 0;
    std::size_t failed = 0;
    std::size_t zero_or_infinite = 0;  // converged endpoints outside the torus (C*)^n
    std::size_t distinct_nonzero = 0;
    std::size_t torus_count = 0;
};

struct SolutionSet {
    std::vector<Solution> solutions;
    SolutionCounts counts;
    std::vector<PathResult> paths;
    bool complete = true;        // false: some path failed or jumped; counts are lower bounds
    BigInt root_bound = 0;       // number of paths started (BKK or Bezout)
    SolveMode mode = SolveMode::Polyhedral;
    Formulation formulation = Formulation::Other;
    TrackerConfig config;
    Complex gamma;
    double seconds = 0.0;
    std::size_t start_failures = 0;  // stage-1 paths that never reached the start system G
    std::size_t restarts = 0;        // fresh polyhedral solves needed (see SolveOptions)
};

namespace detail {

template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& fn) {
    if (threads <= 1 || count < 2) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::vector<std::thread> pool;
    const unsigned t = std::min<std::size_t>(threads, count);
    for (unsigned w = 0; w < t; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t k = w; k < count; k += t) fn(k);
        });
    for (auto& th : pool) th.join();
}

inline bool same_point(const CVector& a, const CVector& b, double tol) {
    return inf_norm(a - b) <= tol * std::max(1.0, std::min(inf_norm(a), inf_norm(b)));
}

inline TrackerConfig tightened(const TrackerConfig& cfg, int attempt) {
    TrackerConfig c = cfg;
    const double f = std::pow(0.25, attempt);
    c.step_max = cfg.step_max * f;
    c.step_init = std::max(cfg.step_min, std::min(cfg.step_init * f, c.step_max));
    c.max_steps = cfg.max_steps * (attempt + 1);
    return c;
}

inline Complex draw_gamma(const TrackerConfig& cfg, int index) {
    if (index == 0 && cfg.gamma != Complex{}) return cfg.gamma;
    Rng rng(derive_seed(cfg.rng_seed, "gamma", static_cast<std::uint64_t>(index)));
    return rng.unit_circle();
}

inline void classify(const PolynomialSystem& sys, const TrackerConfig& cfg, Solution& s) {
    if (sys.tag == Formulation::Exp) {
        const auto r = recover_angles(sys, s.x, 1e-6, std::max(cfg.residual_tol, s.residual));
        s.on_torus = r.status == AngleRecovery::Status::Torus;
        s.theta = r.theta;
    } else if (sys.tag == Formulation::SinCos) {
        double im = 0.0;
        for (const auto& v : s.x) im = std::max(im, std::abs(v.imag()));
        s.on_torus = im <= 1e-6 * std::max(1.0, inf_norm(s.x));
        if (s.on_torus) {
            const std::size_t m = static_cast<std::size_t>(s.x.size()) / 2;
            s.theta.assign(m + 1, 0.0);
            for (std::size_t i = 0; i < m; ++i)
                s.theta[i] = std::atan2(s.x[static_cast<Eigen::Index>(2 * i)].real(),
                                        s.x[static_cast<Eigen::Index>(2 * i + 1)].real());
        }
    }
}

}  // namespace detail

/**
 * Tracks every start root to the target, retrying failed paths with smaller
 * steps (and, from the second retry on, a fresh gamma), then deduplicates.
 * `make` builds the stage-2 homotopy for a given gamma; `post`, if set,
 * rewrites each raw path result (e.g. back from projective coordinates).
 */
template <class MakeHomotopy>
void track_to_target(const PolynomialSystem& sys, const std::vector<CVector>& starts, const TrackerConfig& cfg,
                     MakeHomotopy&& make, SolutionSet& out,
                     const std::function<void(PathResult&)>& post = {}, bool retry_diverged = false) {
    const Complex gamma0 = detail::draw_gamma(cfg, 0);
    out.gamma = gamma0;
    const auto base = make(gamma0);
    std::vector<PathResult> paths(starts.size());

    // attempt > 0 tightens the steps; gamma index > 0 switches to a fresh gamma
    auto run = [&](std::size_t k, int attempt, int gi) {
        const auto tc = detail::tightened(cfg, attempt);
        PathResult r = gi == 0 ? track_path(*base, starts[k], tc)
                               : track_path(*make(detail::draw_gamma(cfg, gi)), starts[k], tc);
        r.retries = attempt;
        if (post) post(r);
        return r;
    };

    // Failed paths: first smaller steps, then fresh gammas as well. With
    // `retry_diverged` (start systems whose root count is exact for generic
    // targets) an escaping path is re-tracked with fresh gammas and kept as
    // diverged only if it escapes every time.
    detail::parallel_for(starts.size(), cfg.threads, [&](std::size_t k) {
        paths[k] = run(k, 0, 0);
        for (int a = 1; a <= cfg.max_retries_per_path && paths[k].status == PathStatus::Failed; ++a)
            paths[k] = run(k, a, a - 1);
        for (int a = 1; retry_diverged && a <= cfg.max_retries_per_path && paths[k].status == PathStatus::Diverged; ++a) {
            auto r = run(k, a, a);
            if (r.status != PathStatus::Failed) paths[k] = std::move(r);
        }
    });

    // Two paths landing on the same regular root means one of them jumped;
    // both are re-tracked with smaller steps along the same homotopy.
    auto accepted = [&](const PathResult& r) {
        if (r.status != PathStatus::Converged) return false;
        for (const auto& v : r.endpoint)
            if (!(std::abs(v) > cfg.zero_tol && std::abs(v) < 1.0 / cfg.zero_tol)) return false;
        return true;
    };
    auto find_jumps = [&] {
        std::set<std::size_t> involved;
        for (std::size_t k = 0; k < paths.size(); ++k) {
            if (!accepted(paths[k])) continue;
            for (std::size_t j = 0; j < k; ++j)
                if (accepted(paths[j]) && detail::same_point(paths[j].endpoint, paths[k].endpoint, cfg.dedup_tol)) {
                    involved.insert(j);
                    involved.insert(k);
                }
        }
        return std::vector<std::size_t>(involved.begin(), involved.end());
    };
    bool jumps_left = false;
    for (int round = 1;; ++round) {
        const auto dup = find_jumps();
        if (dup.empty()) break;
        if (round > cfg.max_retries_per_path) {
            jumps_left = true;
            break;
        }
        detail::parallel_for(dup.size(), cfg.threads, [&](std::size_t d) { paths[dup[d]] = run(dup[d], round + 1, 0); });
    }

    // Aggregate in path order.
    auto& cnt = out.counts;
    for (std::size_t k = 0; k < paths.size(); ++k) {
        const auto& r = paths[k];
        switch (r.status) {
            case PathStatus::Converged: ++cnt.converged; break;
            case PathStatus::Diverged: ++cnt.diverged; break;
            case PathStatus::Singular: ++cnt.singular; break;
            case PathStatus::Failed: ++cnt.failed; break;
        }
        if (r.status != PathStatus::Converged) continue;
        if (!accepted(r)) {
            ++cnt.zero_or_infinite;
            continue;
        }
        bool dup = false;
        for (const auto& s : out.solutions)
            if (detail::same_point(s.x, r.endpoint, cfg.dedup_tol)) {
                dup = true;
                break;
            }
        if (dup) continue;
        Solution s;
        s.x = r.endpoint;
        s.residual = r.residual;
        s.condition = r.condition;
        s.path = k;
        detail::classify(sys, cfg, s);
        out.solutions.push_back(std::move(s));
    }
    cnt.distinct_nonzero = out.solutions.size();
    for (const auto& s : out.solutions) cnt.torus_count += s.on_torus;
    if (cnt.failed > 0 || jumps_left) out.complete = false;
    out.paths = std::move(paths);
}

/**
 * A linear homotopy in projective coordinates (x_1..x_n, h): every equation
 * is homogenized to its degree and a random affine patch a.(x, h) = 1 is
 * appended, identical in start and target. Paths then stay bounded: roots at
 * infinity show up as h -> 0 and large finite roots as small h, instead of
 * as blow-up of the affine coordinates.
 */
struct ProjectiveSystem {
    TermList terms;                      // n + 1 equations in n + 1 variables, h last
    std::vector<Complex> start, target;  // coefficient vectors
    std::vector<Complex> patch;          // a_1..a_n, a_h

    CVector lift(const CVector& x) const {
        const Eigen::Index n = x.size();
        CVector z(n + 1);
        z.head(n) = x;
        z[n] = 1.0;
        Complex dot{};
        for (Eigen::Index j = 0; j <= n; ++j) dot += patch[static_cast<std::size_t>(j)] * z[j];
        return z / dot;
    }
};

inline ProjectiveSystem homogenize(const TermList& terms, const std::vector<Complex>& start,
                                   const std::vector<Complex>& target, std::uint64_t seed) {
    const std::size_t n = terms.num_vars();
    if (terms.num_eqs() != n) throw std::invalid_argument("homogenization needs a square system");
    std::vector<int> deg(n, 0);
    auto degree = [](const Exponent& e) {
        int d = 0;
        for (auto v : e) d += v;
        return d;
    };
    for (std::size_t k = 0; k < terms.size(); ++k) deg[terms.eq(k)] = std::max(deg[terms.eq(k)], degree(terms.exponent(k)));
    ProjectiveSystem ps{TermList(n + 1, n + 1), start, target, {}};
    for (std::size_t k = 0; k < terms.size(); ++k) {
        Exponent e = terms.exponent(k);
        e.push_back(deg[terms.eq(k)] - degree(e));
        ps.terms.add(terms.eq(k), e);
    }
    Rng rng(seed);
    for (std::size_t j = 0; j <= n; ++j) {
        ps.patch.push_back(rng.unit_circle());
        Exponent e(n + 1, 0);
        e[j] = 1;
        ps.terms.add(n, e);
        ps.start.push_back(ps.patch.back());
        ps.target.push_back(ps.patch.back());
    }
    ps.terms.add(n, Exponent(n + 1, 0));
    ps.start.push_back(-1.0);
    ps.target.push_back(-1.0);
    return ps;
}

/**
 * Total-degree start system G_i = x_i^{d_i} - 1 (d_i the degree of equation
 * i), written on the union of the supports of G and the target so that both
 * share one term list.
 */
struct TotalDegreeStart {
    TermList terms;
    std::vector<Complex> start, target;  // coefficients of G and of the target
    std::vector<CVector> starts;         // roots of unity, lexicographic
    BigInt root_bound = 1;               // product of the degrees
};

inline TotalDegreeStart build_total_degree_start(const PolynomialSystem& sys) {
    const auto compiled = compile_system(sys);
    TotalDegreeStart td{compiled.terms, {}, compiled.coeffs, {}, 1};
    td.start.assign(td.target.size(), Complex{});
    std::vector<int> degs;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const int d = sys.polys[i].degree();
        if (d < 1) throw ComputeError("total-degree start system needs non-constant equations");
        degs.push_back(d);
        td.root_bound *= d;
        Exponent lead(sys.num_vars(), 0);
        lead[i] = d;
        for (const auto& [e, g] : {std::pair{lead, Complex{1.0}}, std::pair{Exponent(sys.num_vars(), 0), Complex{-1.0}}}) {
            std::size_t idx = td.terms.size();
            for (std::size_t k = compiled.offset[i]; k < compiled.offset[i] + sys.polys[i].terms().size(); ++k)
                if (td.terms.exponent(k) == e) idx = k;
            if (idx == td.terms.size()) {
                td.terms.add(i, e);
                td.target.push_back(0.0);
                td.start.push_back(0.0);
            }
            td.start[idx] = g;
        }
    }
    std::vector<int> idx(sys.size(), 0);
    while (true) {
        CVector x(static_cast<Eigen::Index>(sys.size()));
        for (std::size_t i = 0; i < sys.size(); ++i)
            x[static_cast<Eigen::Index>(i)] = std::polar(1.0, 2.0 * std::numbers::pi * idx[i] / degs[i]);
        td.starts.push_back(x);
        std::size_t p = 0;
        while (p < idx.size() && ++idx[p] == degs[p]) idx[p++] = 0;
        if (p == idx.size()) break;
    }
    return td;
}

namespace detail {

/**
 * Maps a projective endpoint (x, h) back to x / h and re-evaluates it on the
 * affine target. |h| <= zero_tol |(x, h)|, or |h| still shrinking like a
 * power of (1 - u) on a path that did not land cleanly, means the path went
 * to infinity.
 */
inline void dehomogenize(PathResult& r, const CompiledSystem& target, const TrackerConfig& cfg) {
    const Eigen::Index n = r.endpoint.size() - 1;
    const CVector z = r.endpoint;
    // Genuine escape happens only as u -> 1. Reaching h ~ 0 before the endgame
    // means the path jumped onto the spurious solutions at infinity that
    // homogenizing a sparse system introduces, which is a tracking failure.
    // (Escapes inside the endgame can be spurious too; see retry_diverged.)
    if (!z.allFinite() || (r.status != PathStatus::Converged && r.final_u < cfg.endgame_start_t)) {
        r.status = PathStatus::Failed;
        return;
    }
    const Complex h = z[n];
    const double rel = std::abs(h) / std::max(inf_norm(z), std::numeric_limits<double>::min());
    bool at_infinity = !(rel > cfg.zero_tol);
    if (!at_infinity && r.status != PathStatus::Converged && r.sample.size() == z.size()) {
        const double gap = 1.0 - r.final_u;
        const double rel_mid = std::abs(r.sample[n]) / inf_norm(r.sample);
        at_infinity = gap > 0 && r.sample_gap > gap && rel_mid > 0 &&
                      std::log(rel_mid / rel) >= kEscapeGrowth * std::log(r.sample_gap / gap);
    }
    r.endpoint = h != Complex{} ? CVector(z.head(n) / h) : CVector(z.head(n));
    if (at_infinity) {
        r.status = PathStatus::Diverged;
        return;
    }
    if (r.status == PathStatus::Failed || r.status == PathStatus::Diverged) return;

    CVector x = r.endpoint;
    newton(target.terms, target.coeffs, x, cfg.newton_tol, cfg.newton_max_iters);
    CVector f, f0;
    CMatrix J;
    target.terms.evaluate(x, target.coeffs, f, &J);
    target.terms.evaluate(r.endpoint, target.coeffs, f0);
    if (!(inf_norm(f) <= inf_norm(f0))) {
        x = r.endpoint;
        f = f0;
        target.terms.evaluate(x, target.coeffs, f, &J);
    }
    r.endpoint = x;
    r.residual = inf_norm(f);
    r.condition = torus_condition_number(J, x);
    const bool singular = !(r.condition < cfg.singular_cond);
    if (r.residual <= cfg.residual_tol) r.status = singular ? PathStatus::Singular : PathStatus::Converged;
    else if (singular && r.residual <= std::sqrt(cfg.residual_tol)) r.status = PathStatus::Singular;
    else r.status = PathStatus::Failed;
}

}  // namespace detail

struct SolveOptions {
    SolveMode mode = SolveMode::Polyhedral;
    /// Polyhedral mode: fresh solves (new lifting, start system and gamma) tried
    /// when a solve ends incomplete, e.g. because a random start system G had
    /// roots too badly scaled to track in double precision.
    int restarts = 2;
};

namespace detail {

inline SolutionSet solve_once(const PolynomialSystem& sys, const TrackerConfig& cfg, const SolveOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    SolutionSet out;
    out.mode = opt.mode;
    out.formulation = sys.tag;
    out.config = cfg;
    const auto target = compile_system(sys);

    std::vector<CVector> starts;
    // Stage 2, shared by both modes: (1 - u) gamma G + u F in projective coordinates.
    auto track_projective = [&](const TermList& terms, const std::vector<Complex>& g, const std::vector<Complex>& f) {
        const auto ps = homogenize(terms, g, f, derive_seed(cfg.rng_seed, "patch"));
        std::vector<CVector> lifted;
        for (const auto& x : starts) lifted.push_back(ps.lift(x));
        auto make = [&](Complex gamma) {
            return std::make_unique<LinearHomotopy>(ps.terms, ps.start, ps.target, gamma, false);
        };
        track_to_target(sys, lifted, cfg, make, out, [&](PathResult& r) { detail::dehomogenize(r, target, cfg); },
                        opt.mode == SolveMode::Polyhedral);
    };
    if (opt.mode == SolveMode::Polyhedral) {
        const auto mv = mixed_volume_detailed(supports_of(sys), {.seed = derive_seed(cfg.rng_seed, "lifting")});
        out.root_bound = mv.value;
        if (mv.value == 0) {  // no roots in (C*)^n for generic coefficients (e.g. a disconnected graph)
            out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return out;
        }
        const auto st = build_start_system(sys, mv.cells, mv.lifted, derive_seed(cfg.rng_seed, "start"));

        // Stage 1: one path per binomial root.
        struct Job {
            std::size_t cell, root;
        };
        std::vector<Job> jobs;
        for (std::size_t c = 0; c < st.cells.size(); ++c)
            for (std::size_t r = 0; r < st.cells[c].solutions.size(); ++r) jobs.push_back({c, r});
        std::vector<PolyhedralHomotopy> homotopies;
        for (const auto& c : st.cells) homotopies.emplace_back(st.random, c.powers);

        std::vector<CVector> roots(jobs.size());
        std::vector<char> ok(jobs.size(), 0);
        auto stage1 = [&](std::size_t k, int attempt) {
            const auto& job = jobs[k];
            const auto r = track_path(homotopies[job.cell], st.cells[job.cell].solutions[job.root],
                                      detail::tightened(cfg, attempt));
            // Roots of G can be badly scaled, so an absolute residual test is too
            // strict here: reaching u = 1 and a converging Newton refinement suffice.
            if (r.final_u < 1.0 || !r.endpoint.allFinite()) return false;
            CVector x = r.endpoint;
            if (!detail::newton(st.random.terms, st.random.coeffs, x, cfg.newton_tol, 2 * cfg.newton_max_iters)
                     .converged)
                return false;
            roots[k] = x;
            return true;
        };
        detail::parallel_for(jobs.size(), cfg.threads, [&](std::size_t k) {
            for (int a = 0; a <= cfg.max_retries_per_path && !ok[k]; ++a) ok[k] = stage1(k, a);
        });
        // G is generic: its roots are distinct. A repeat means a path jumped.
        for (int round = 1; round <= cfg.max_retries_per_path + 1; ++round) {
            std::set<std::size_t> dup;
            for (std::size_t k = 0; k < jobs.size(); ++k) {
                if (!ok[k]) continue;
                for (std::size_t j = 0; j < k; ++j)
                    if (ok[j] && detail::same_point(roots[j], roots[k], cfg.dedup_tol)) {
                        dup.insert(j);
                        dup.insert(k);
                    }
            }
            if (dup.empty()) break;
            const std::vector<std::size_t> redo(dup.begin(), dup.end());
            detail::parallel_for(redo.size(), cfg.threads, [&](std::size_t d) {
                const std::size_t k = redo[d];
                ok[k] = round <= cfg.max_retries_per_path && stage1(k, round + 1);
            });
        }
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            if (ok[k]) starts.push_back(roots[k]);
            else ++out.start_failures;
        }
        track_projective(st.random.terms, st.random.coeffs, target.coeffs);
    } else {
        const auto td = build_total_degree_start(sys);
        out.root_bound = td.root_bound;
        starts = td.starts;
        track_projective(td.terms, td.start, td.target);
    }
    out.counts.paths_tracked = starts.size() + out.start_failures;
    if (out.start_failures > 0) {
        out.counts.failed += out.start_failures;
        out.complete = false;
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace detail

/**
 * All isolated roots of `sys` in (C*)^n. Deterministic for a fixed
 * cfg.rng_seed (also with several threads). Restart r > 0 runs with seed
 * derive_seed(cfg.rng_seed, "restart", r); the reported config keeps the
 * caller's seed and `restarts` records how many were needed.
 */
inline SolutionSet solve_system(const PolynomialSystem& sys, const TrackerConfig& cfg, const SolveOptions& opt = {}) {
    cfg.validate();
    if (opt.restarts < 0) throw std::invalid_argument("restarts must be >= 0");
    SolutionSet out = detail::solve_once(sys, cfg, opt);
    double seconds = out.seconds;
    const int budget = opt.mode == SolveMode::Polyhedral ? opt.restarts : 0;
    for (int r = 1; r <= budget && !out.complete; ++r) {
        TrackerConfig c = cfg;
        c.rng_seed = derive_seed(cfg.rng_seed, "restart", static_cast<std::uint64_t>(r));
        auto next = detail::solve_once(sys, c, opt);
        seconds += next.seconds;
        next.config = cfg;
        next.restarts = static_cast<std::size_t>(r);
        out = std::move(next);
    }
    out.seconds = seconds;
    return out;
}

/**
 * Phase vectors of the torus solutions, each re-checked against the Kuramoto
 * right-hand side (max-norm <= residual_tol).
 */
inline std::vector<std::vector<double>> real_equilibria(const SolutionSet& solset, const KuramotoInstance& inst) {
    std::vector<std::vector<double>> out;
    for (const auto& s : solset.solutions) {
        if (!s.on_torus) continue;
        double worst = 0.0;
        for (const auto& r : kuramoto_rhs(inst, s.theta)) worst = std::max(worst, std::abs(r));
        if (worst <= solset.config.residual_tol) out.push_back(s.theta);
    }
    return out;
}

}  // namespace kbkk
