/**
 * Predictor-corrector path tracking for coefficient homotopies
 *
 *     H(x, u) = sum_k c_k(u) x^{a_k},   u in [0, 1],
 *
 * where every term k belongs to one equation and only the coefficients move.
 * Both the polyhedral stage and the linear (gamma-trick) stage are of this
 * form. The predictor is classical RK4 on dx/du = -H_x^{-1} H_u; the corrector
 * is Newton's method; the step adapts to the corrector iteration count.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "kbkk/common.hpp"
#include "kbkk/polynomial.hpp"

namespace kbkk {

struct TrackerConfig {
    double step_init = 0.01;
    double step_min = 1e-13;
    double step_max = 0.1;
    double newton_tol = 1e-10;     // relative size of the last Newton update
    int newton_max_iters = 6;
    double residual_tol = 1e-8;    // endpoint acceptance (max-norm of the target residual)
    double dedup_tol = 1e-6;
    double zero_tol = 1e-8;        // |x_i| <= zero_tol or >= 1/zero_tol counts as zero / infinite
    double endgame_start_t = 0.9;
    double endgame_gap = 1e-12;    // tracking stops at u = 1 - endgame_gap before landing at u = 1
    double landing_tol = 1e-4;     // relative slack on the final move to u = 1 beyond the linear prediction
    double singular_cond = 1e10;   // condition number (log coordinates, rows equilibrated) marking a singular endpoint
    int max_retries_per_path = 3;
    long max_steps = 200000;
    Complex gamma{0.0, 0.0};       // 0 = draw from the seed
    std::uint64_t rng_seed = 1;
    unsigned threads = 1;

    void validate() const {
        if (!(step_min > 0 && step_min <= step_init && step_init <= step_max))
            throw std::invalid_argument("tracker steps must satisfy 0 < step_min <= step_init <= step_max");
        if (!(newton_tol > 0 && residual_tol > 0 && dedup_tol > 0 && zero_tol > 0 && zero_tol < 1))
            throw std::invalid_argument("tolerances must be positive (and zero_tol < 1)");
        if (!(endgame_start_t > 0 && endgame_start_t < 1)) throw std::invalid_argument("endgame_start_t must lie in (0, 1)");
        if (!(endgame_gap > 0 && endgame_gap < 1 - endgame_start_t && landing_tol > 0))
            throw std::invalid_argument("endgame_gap must lie in (0, 1 - endgame_start_t) and landing_tol be positive");
        if (newton_max_iters < 2) throw std::invalid_argument("newton_max_iters must be at least 2");
        if (max_retries_per_path < 0) throw std::invalid_argument("max_retries_per_path must be non-negative");
        if (gamma != Complex{} && std::abs(std::abs(gamma) - 1.0) > 1e-12)
            throw std::invalid_argument("gamma must have unit modulus");
    }
};

enum class PathStatus { Converged, Diverged, Singular, Failed };

inline const char* status_name(PathStatus s) {
    switch (s) {
        case PathStatus::Converged: return "converged";
        case PathStatus::Diverged: return "diverged";
        case PathStatus::Singular: return "singular";
        case PathStatus::Failed: return "failed";
    }
    return "?";
}

struct PathResult {
    CVector endpoint;
    PathStatus status = PathStatus::Failed;
    double residual = 0.0;
    double condition = 0.0;  // 2-norm condition number of the Jacobian at the endpoint
    long steps = 0;
    long rejected = 0;
    double final_u = 0.0;
    int retries = 0;
    // Point sampled at u = 1 - sample_gap (about 1000 endgame_gap) when the
    // endgame approaches u = 1 geometrically; empty otherwise.
    CVector sample;
    double sample_gap = 0.0;
};

/**
 * Monomial list shared by all coefficient vectors of a homotopy: term k
 * contributes c_k x^{a_k} to equation eq[k].
 */
class TermList {
  public:
    TermList(std::size_t num_eqs, std::size_t num_vars) : num_eqs_(num_eqs), num_vars_(num_vars) {}

    std::size_t add(std::size_t eq, const Exponent& a) {
        if (eq >= num_eqs_ || a.size() != num_vars_) throw std::invalid_argument("term does not fit the term list");
        Term t;
        t.eq = eq;
        for (std::size_t v = 0; v < a.size(); ++v)
            if (a[v] != 0) t.powers.push_back({v, a[v]});
        terms_.push_back(std::move(t));
        exps_.push_back(a);
        return terms_.size() - 1;
    }

    std::size_t size() const noexcept { return terms_.size(); }
    std::size_t num_eqs() const noexcept { return num_eqs_; }
    std::size_t num_vars() const noexcept { return num_vars_; }
    std::size_t eq(std::size_t k) const { return terms_[k].eq; }
    const Exponent& exponent(std::size_t k) const { return exps_[k]; }

    /// f = H(x), optionally J = H_x and fu = sum dc_k x^{a_k}.
    void evaluate(const CVector& x, const std::vector<Complex>& c, CVector& f, CMatrix* J = nullptr,
                  const std::vector<Complex>* dc = nullptr, CVector* fu = nullptr) const {
        const auto ne = static_cast<Eigen::Index>(num_eqs_);
        f.setZero(ne);
        if (J) J->setZero(ne, static_cast<Eigen::Index>(num_vars_));
        if (fu) fu->setZero(ne);
        for (std::size_t k = 0; k < terms_.size(); ++k) {
            const auto& t = terms_[k];
            const auto e = static_cast<Eigen::Index>(t.eq);
            // factor values x_v^p and their derivatives p x_v^(p-1)
            Complex vals[8], ders[8];
            const std::size_t nf = t.powers.size();
            Complex mono{1.0, 0.0};
            if (nf <= 8) {
                for (std::size_t q = 0; q < nf; ++q) {
                    const auto [v, p] = t.powers[q];
                    const Complex xv = x[static_cast<Eigen::Index>(v)];
                    Complex pw{1.0, 0.0};
                    for (int r = 1; r < p; ++r) pw *= xv;
                    ders[q] = static_cast<double>(p) * pw;
                    vals[q] = pw * xv;
                    mono *= vals[q];
                }
            } else {
                mono = Polynomial::monomial(exps_[k], x);
            }
            f[e] += c[k] * mono;
            if (fu) (*fu)[e] += (*dc)[k] * mono;
            if (J && c[k] != Complex{}) {
                if (nf <= 8) {
                    for (std::size_t q = 0; q < nf; ++q) {
                        Complex d = c[k] * ders[q];
                        for (std::size_t o = 0; o < nf; ++o)
                            if (o != q) d *= vals[o];
                        (*J)(e, static_cast<Eigen::Index>(t.powers[q].first)) += d;
                    }
                } else {
                    Polynomial p(num_vars_);
                    p.add(exps_[k], c[k]);
                    for (const auto& [v, pw] : t.powers) (*J)(e, static_cast<Eigen::Index>(v)) += p.derivative(v, x);
                }
            }
        }
    }

  private:
    struct Term {
        std::size_t eq = 0;
        std::vector<std::pair<std::size_t, int>> powers;
    };
    std::size_t num_eqs_, num_vars_;
    std::vector<Term> terms_;
    std::vector<Exponent> exps_;
};

/// A homotopy whose coefficients c(u) (and c'(u)) are known in closed form.
class CoefficientHomotopy {
  public:
    explicit CoefficientHomotopy(TermList terms) : terms_(std::move(terms)) {}
    virtual ~CoefficientHomotopy() = default;

    const TermList& terms() const noexcept { return terms_; }
    virtual void coefficients(double u, std::vector<Complex>& c, std::vector<Complex>& dc) const = 0;

    /// Marks paths whose coordinates blow up as diverged rather than failed.
    virtual bool watch_divergence() const { return true; }

    /// Approach u = 1 geometrically and check the landing (see track_path).
    virtual bool geometric_endgame() const { return true; }

  private:
    TermList terms_;
};

/// c(u) = (1 - u) gamma c_start + u c_target
class LinearHomotopy : public CoefficientHomotopy {
  public:
    LinearHomotopy(TermList terms, std::vector<Complex> start, std::vector<Complex> target, Complex gamma,
                   bool watch_divergence = true)
        : CoefficientHomotopy(std::move(terms)),
          start_(std::move(start)),
          target_(std::move(target)),
          gamma_(gamma),
          watch_(watch_divergence) {
        if (start_.size() != this->terms().size() || target_.size() != this->terms().size())
            throw std::invalid_argument("coefficient vectors must match the term list");
    }

    void coefficients(double u, std::vector<Complex>& c, std::vector<Complex>& dc) const override {
        c.resize(start_.size());
        dc.resize(start_.size());
        for (std::size_t k = 0; k < start_.size(); ++k) {
            c[k] = (1.0 - u) * gamma_ * start_[k] + u * target_[k];
            dc[k] = target_[k] - gamma_ * start_[k];
        }
    }

    bool watch_divergence() const override { return watch_; }

  private:
    std::vector<Complex> start_, target_;
    Complex gamma_;
    bool watch_;
};

namespace detail {

inline double inf_norm(const CVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

struct NewtonOutcome {
    bool converged = false;
    int iterations = 0;
};

/// Newton's method on H(., u) with a contraction safeguard.
inline NewtonOutcome newton(const TermList& terms, const std::vector<Complex>& c, CVector& x, double tol, int max_iters) {
    CVector f;
    CMatrix J;
    double prev = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        terms.evaluate(x, c, f, &J);
        Eigen::PartialPivLU<CMatrix> lu(J);
        const CVector dx = lu.solve(-f);
        if (!dx.allFinite()) return {false, it};
        const double step = inf_norm(dx);
        x += dx;
        if (step <= tol * std::max(1.0, inf_norm(x))) return {true, it};
        if (it > 1 && step > 0.1 * prev) return {false, it};  // not contracting
        prev = step;
    }
    return {false, max_iters};
}

inline double condition_number(const CMatrix& J) {
    Eigen::JacobiSVD<CMatrix> svd(J);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 0.0;
    const double smin = s[s.size() - 1];
    return smin > 0 ? s[0] / smin : std::numeric_limits<double>::infinity();
}

/**
 * Condition number of J diag(x) with equilibrated rows: the Jacobian in
 * logarithmic coordinates, which does not grow merely because a root has
 * some very large and some very small coordinates.
 */
inline double torus_condition_number(const CMatrix& J, const CVector& x) {
    CMatrix A = J;
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        const double s = std::abs(x[j]);
        if (s > 0) A.col(j) *= s;
    }
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const double r = A.row(i).cwiseAbs().maxCoeff();
        if (r > 0) A.row(i) /= r;
    }
    return condition_number(A);
}

}  // namespace detail

/**
 * Refines x at the end of the homotopy (u = 1) and classifies it.
 */
inline void finish_endpoint(const CoefficientHomotopy& H, CVector x, const TrackerConfig& cfg, PathResult& out) {
    std::vector<Complex> c, dc;
    H.coefficients(1.0, c, dc);
    const auto& terms = H.terms();
    // Sharpen: plain Newton without the contraction test, keeping the best iterate.
    CVector f;
    CMatrix J;
    terms.evaluate(x, c, f, &J);
    CVector best = x;
    double best_res = detail::inf_norm(f);
    for (int it = 0; it < 12 && x.allFinite(); ++it) {
        const CVector dx = Eigen::PartialPivLU<CMatrix>(J).solve(-f);
        if (!dx.allFinite()) break;
        x += dx;
        terms.evaluate(x, c, f, &J);
        const double res = detail::inf_norm(f);
        if (res < best_res) {
            best_res = res;
            best = x;
        }
        if (detail::inf_norm(dx) <= 1e-15 * std::max(1.0, detail::inf_norm(x))) break;
    }
    terms.evaluate(best, c, f, &J);
    out.endpoint = best;
    out.residual = best_res;
    out.condition = detail::torus_condition_number(J, best);
    const bool singular = !(out.condition < cfg.singular_cond);
    if (H.watch_divergence() && detail::inf_norm(best) >= 1.0 / cfg.zero_tol) out.status = PathStatus::Diverged;
    else if (best_res <= cfg.residual_tol) out.status = singular ? PathStatus::Singular : PathStatus::Converged;
    else if (singular && best_res <= std::sqrt(cfg.residual_tol)) out.status = PathStatus::Singular;
    else out.status = PathStatus::Failed;
}

/// Smallest growth exponent of |x| in 1 / (1 - u) taken as escape to infinity.
inline constexpr double kEscapeGrowth = 0.05;

/// Tracks one path from u = 0 (where `start` must be a root) to u = 1.
inline PathResult track_path(const CoefficientHomotopy& H, const CVector& start, const TrackerConfig& cfg) {
    const auto& terms = H.terms();
    const Eigen::Index n = static_cast<Eigen::Index>(terms.num_vars());
    if (start.size() != n) throw std::invalid_argument("start point has the wrong dimension");
    PathResult out;
    std::vector<Complex> c, dc;
    CVector x = start, f, fu;
    CMatrix J;

    H.coefficients(0.0, c, dc);
    if (!detail::newton(terms, c, x, cfg.newton_tol, cfg.newton_max_iters).converged) {
        out.endpoint = x;
        out.status = PathStatus::Failed;
        return out;
    }

    // Velocity dx/du at (x, u).
    auto velocity = [&](const CVector& p, double u, CVector& v) {
        H.coefficients(u, c, dc);
        terms.evaluate(p, c, f, &J, &dc, &fu);
        v = Eigen::PartialPivLU<CMatrix>(J).solve(-fu);
        return v.allFinite();
    };

    double u = 0.0, h = cfg.step_init;
    CVector k1, k2, k3, k4;
    const double divergence_bound = 1.0 / cfg.zero_tol;
    // Paths that escape to infinity blow up only as u -> 1; stepping straight
    // onto u = 1 would let the corrector snap them onto some finite root. So in
    // the endgame the step is capped at half the remaining distance and
    // tracking stops at 1 - endgame_gap; the landing is checked below.
    const bool geometric = H.geometric_endgame();
    const bool watch = H.watch_divergence();
    auto endgame = [&] { return u >= cfg.endgame_start_t; };
    // x is sampled once 1 - u drops below 1000 endgame_gap. A path escaping to
    // infinity grows like (1 - u)^(-1/m); one reaching a regular root moves
    // linearly, so its final move to u = 1 is about gap / mid_gap of the move
    // since the sample.
    double& mid_gap = out.sample_gap;
    CVector& mid_x = out.sample;
    while (u < 1.0 && !(geometric && 1.0 - u <= cfg.endgame_gap)) {
        if (out.steps + out.rejected >= cfg.max_steps) break;
        double hmax = endgame() ? 0.25 * cfg.step_max : cfg.step_max;
        if (geometric && endgame()) hmax = std::min(hmax, 0.5 * (1.0 - u));
        h = std::min({h, hmax, 1.0 - u});
        const bool last = h >= 1.0 - u;
        const double un = last ? 1.0 : u + h;

        bool ok = velocity(x, u, k1) && velocity(x + 0.5 * h * k1, u + 0.5 * h, k2) &&
                  velocity(x + 0.5 * h * k2, u + 0.5 * h, k3) && velocity(x + h * k3, un, k4);
        CVector xn;
        detail::NewtonOutcome corr;
        if (ok) {
            xn = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            H.coefficients(un, c, dc);
            corr = detail::newton(terms, c, xn, cfg.newton_tol, cfg.newton_max_iters);
            ok = corr.converged;
        }
        if (ok) {
            x = xn;
            u = un;
            ++out.steps;
            if (geometric && mid_gap == 0.0 && 1.0 - u <= 1e3 * cfg.endgame_gap) {
                mid_gap = 1.0 - u;
                mid_x = x;
            }
            if (corr.iterations <= 1) h = std::min(2.0 * h, hmax);
            else if (corr.iterations > 3) h *= 0.5;
            if (watch && u >= cfg.endgame_start_t && detail::inf_norm(x) >= divergence_bound) {
                out.endpoint = x;
                out.final_u = u;
                out.status = PathStatus::Diverged;
                return out;
            }
        } else {
            ++out.rejected;
            h *= 0.5;
            if (h < cfg.step_min) break;
        }
    }
    out.final_u = u;
    if (geometric && u < 1.0 && 1.0 - u <= cfg.endgame_gap) {
        const double gap = 1.0 - u, norm = detail::inf_norm(x);
        const bool sampled = mid_gap > gap;
        const double mid_norm = sampled ? detail::inf_norm(mid_x) : 0.0;
        const bool escaping = watch && (norm >= std::sqrt(divergence_bound) ||
                                        (sampled && mid_norm > 0.0 &&
                                         std::log(norm / mid_norm) >= kEscapeGrowth * std::log(mid_gap / gap)));
        const double expected_move =
            sampled ? 10.0 * detail::inf_norm(x - mid_x) * gap / (mid_gap - gap) : 0.0;
        finish_endpoint(H, x, cfg, out);
        // A larger landing move than the linear approach predicts means the
        // path was still escaping and Newton snapped onto some other root.
        if (out.status == PathStatus::Converged &&
            detail::inf_norm(out.endpoint - x) > expected_move + cfg.landing_tol * std::max(1.0, norm)) {
            out.endpoint = x;
            out.status = PathStatus::Failed;
        }
        if (out.status == PathStatus::Failed && escaping) out.status = PathStatus::Diverged;
        return out;
    }
    if (u < 1.0) {
        // Step underflow (or step budget) near the end. Where paths may escape,
        // a regular root is expected to be approached smoothly, so only a
        // singular landing is trusted; a path whose modulus grows like a
        // power of 1 / (1 - u) is escaping.
        if (u >= cfg.endgame_start_t) {
            CVector v;
            const double norm = detail::inf_norm(x);
            const bool escaping =
                watch && (norm >= std::sqrt(divergence_bound) ||
                          (velocity(x, u, v) && (1.0 - u) * detail::inf_norm(v) >= kEscapeGrowth * std::max(1.0, norm)));
            finish_endpoint(H, x, cfg, out);
            if (watch && out.status == PathStatus::Converged) {
                out.endpoint = x;
                out.status = PathStatus::Failed;
            }
            if (out.status == PathStatus::Failed && escaping) out.status = PathStatus::Diverged;
        } else {
            out.endpoint = x;
            out.status = PathStatus::Failed;
        }
        return out;
    }
    finish_endpoint(H, x, cfg, out);
    return out;
}

}  // namespace kbkk
