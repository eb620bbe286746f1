/**
 * Exact linear feasibility by integer (fraction-free) pivoting.
 *
 * A `Dictionary<Int>` keeps every basic variable as an integer row over a
 * common positive denominator D,
 *
 *     D * x_B[r] = T[r][0] + sum_c T[r][c] * x_N[c],
 *
 * and pivots with the Bareiss update, so all entries stay integer minors of
 * the input. Decision variables are free; each constraint a.x >= b or a.x = b
 * brings its own slack. Free variables are pivoted into the basis as soon as
 * some constraint mentions them and never leave. Equality slacks are pivoted
 * out and their columns deleted. Feasibility is then restored with the
 * least-index criss-cross rule, which terminates and yields an exact Farkas
 * row when the system is infeasible.
 *
 * Constraints can be added after a feasibility check, which is how the mixed
 * cell enumeration extends a parent node without starting over.
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kbkk/bigint.hpp"
#include "kbkk/checked_int.hpp"

namespace kbkk {

enum class VarKind : std::uint8_t { Free, Slack, Equality };

template <class Int>
class Dictionary {
  public:
    explicit Dictionary(std::size_t num_free) : cols_(num_free) {
        for (std::size_t v = 0; v < num_free; ++v) {
            kind_.push_back(VarKind::Free);
            where_.push_back(-static_cast<long>(v) - 1);
            col_var_.push_back(v);
        }
    }

    std::size_t num_free() const noexcept { return num_free_count(); }
    std::size_t rows() const noexcept { return row_var_.size(); }
    std::size_t cols() const noexcept { return cols_; }
    bool infeasible() const noexcept { return infeasible_; }
    const Int& denominator() const noexcept { return D_; }

    /// Adds a.x >= b (or a.x = b). `a` has one entry per decision variable.
    /// Returns the id of the new slack variable.
    std::size_t add_constraint(std::span<const Int> a, const Int& b, bool equality) {
        const std::size_t stride = cols_ + 1;
        std::vector<Int> row(stride, Int(0));
        row[0] = -(b * D_);
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (a[j] == Int(0)) continue;
            const long w = where_[j];
            if (w >= 0) {
                const Int* src = &T_[static_cast<std::size_t>(w) * stride];
                for (std::size_t c = 0; c < stride; ++c)
                    if (src[c] != Int(0)) row[c] += a[j] * src[c];
            } else {
                row[static_cast<std::size_t>(-w)] += a[j] * D_;
            }
        }
        const std::size_t var = kind_.size();
        kind_.push_back(equality ? VarKind::Equality : VarKind::Slack);
        where_.push_back(static_cast<long>(row_var_.size()));
        row_var_.push_back(var);
        T_.insert(T_.end(), row.begin(), row.end());

        const std::size_t r = row_var_.size() - 1;
        if (equality) {
            // Prefer a free column so the decision variable becomes basic.
            std::size_t best = 0;
            for (std::size_t c = 1; c <= cols_; ++c) {
                if (at(r, c) == Int(0)) continue;
                if (best == 0 || (kind_[col_var_[c - 1]] == VarKind::Free &&
                                  kind_[col_var_[best - 1]] != VarKind::Free))
                    best = c;
            }
            last_equality_dependent_ = best == 0;
            if (best == 0) {
                if (at(r, 0) != Int(0)) infeasible_ = true;
                remove_row(r);
            } else {
                pivot(r, best);
                remove_column(best);
            }
        }
        absorb_free_columns();
        return var;
    }

    std::size_t add_constraint(std::initializer_list<Int> a, const Int& b, bool equality) {
        std::vector<Int> v(a);
        return add_constraint(std::span<const Int>(v), b, equality);
    }

    /// Least-index criss-cross on the constrained rows. Returns feasibility.
    bool make_feasible() {
        if (infeasible_) return false;
        while (true) {
            std::size_t r = npos, rvar = npos;
            for (std::size_t i = 0; i < rows(); ++i) {
                const std::size_t v = row_var_[i];
                if (kind_[v] == VarKind::Free) continue;
                if (sign(at(i, 0)) < 0 && v < rvar) {
                    r = i;
                    rvar = v;
                }
            }
            if (r == npos) return true;
            std::size_t c = npos, cvar = npos;
            for (std::size_t j = 1; j <= cols_; ++j) {
                const std::size_t v = col_var_[j - 1];
                if (kind_[v] == VarKind::Free) continue;
                if (sign(at(r, j)) > 0 && v < cvar) {
                    c = j;
                    cvar = v;
                }
            }
            if (c == npos) {
                infeasible_ = true;
                farkas_row_var_ = rvar;
                return false;
            }
            pivot(r, c);
        }
    }

    enum class OptStatus { Optimal, Unbounded, Infeasible };

    /// Maximizes a free decision variable with Bland's rule (call after make_feasible).
    OptStatus maximize(std::size_t var) {
        if (!make_feasible()) return OptStatus::Infeasible;
        if (where_[var] < 0) return OptStatus::Unbounded;  // untouched by every constraint
        while (true) {
            const auto rt = static_cast<std::size_t>(where_[var]);
            std::size_t c = npos, cvar = npos;
            for (std::size_t j = 1; j <= cols_; ++j) {
                const std::size_t v = col_var_[j - 1];
                if (kind_[v] == VarKind::Free) continue;
                if (sign(at(rt, j)) > 0 && v < cvar) {
                    c = j;
                    cvar = v;
                }
            }
            if (c == npos) return OptStatus::Optimal;
            std::size_t r = npos, rvar = npos;
            for (std::size_t i = 0; i < rows(); ++i) {
                const std::size_t v = row_var_[i];
                if (kind_[v] == VarKind::Free || sign(at(i, c)) >= 0) continue;
                if (r == npos) {
                    r = i;
                    rvar = v;
                    continue;
                }
                // at(i,0)/(-at(i,c)) vs at(r,0)/(-at(r,c))
                const Int lhs = at(i, 0) * (-at(r, c));
                const Int rhs = at(r, 0) * (-at(i, c));
                if (lhs < rhs || (lhs == rhs && v < rvar)) {
                    r = i;
                    rvar = v;
                }
            }
            if (r == npos) return OptStatus::Unbounded;
            pivot(r, c);
        }
    }

    /// Current value of a variable as numerator over denominator().
    Int numerator(std::size_t var) const {
        const long w = where_[var];
        return w >= 0 ? at(static_cast<std::size_t>(w), 0) : Int(0);
    }

    Rational value(std::size_t var) const { return Rational(to_big(numerator(var)), to_big(D_)); }

    bool is_basic(std::size_t var) const { return where_[var] >= 0; }
    VarKind kind(std::size_t var) const { return kind_[var]; }
    std::size_t num_vars() const noexcept { return kind_.size(); }

    /// True when the most recent equality was a combination of earlier ones
    /// (its row vanished; it was dropped or made the system infeasible).
    bool last_equality_dependent() const noexcept { return last_equality_dependent_; }

    /// Basic slack whose row certified infeasibility (npos otherwise).
    std::size_t farkas_row_var() const noexcept { return farkas_row_var_; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  private:
    std::size_t num_free_count() const {
        return static_cast<std::size_t>(std::count(kind_.begin(), kind_.end(), VarKind::Free));
    }

    Int& at(std::size_t r, std::size_t c) { return T_[r * (cols_ + 1) + c]; }
    const Int& at(std::size_t r, std::size_t c) const { return T_[r * (cols_ + 1) + c]; }

    void pivot(std::size_t r, std::size_t s) {
        const std::size_t stride = cols_ + 1;
        const Int prs = at(r, s);
        Int* pr = &T_[r * stride];
        for (std::size_t i = 0; i < rows(); ++i) {
            if (i == r) continue;
            Int* pi = &T_[i * stride];
            const Int pis = pi[s];
            for (std::size_t j = 0; j < stride; ++j) {
                if (j == s) continue;
                if (pis == Int(0)) {
                    if (pi[j] != Int(0)) pi[j] = (prs * pi[j]) / D_;
                } else {
                    pi[j] = (prs * pi[j] - pis * pr[j]) / D_;
                }
            }
        }
        for (std::size_t j = 0; j < stride; ++j)
            if (j != s) pr[j] = -pr[j];
        pr[s] = D_;
        D_ = prs;
        if (sign(D_) < 0) {
            D_ = -D_;
            for (auto& t : T_) t = -t;
        }
        const std::size_t leaving = row_var_[r];
        const std::size_t entering = col_var_[s - 1];
        row_var_[r] = entering;
        col_var_[s - 1] = leaving;
        where_[entering] = static_cast<long>(r);
        where_[leaving] = -static_cast<long>(s);
    }

    // The last column moves into slot s.
    void remove_column(std::size_t s) {
        const std::size_t stride = cols_ + 1;
        const std::size_t last = cols_;
        std::vector<Int> next;
        next.reserve(rows() * cols_);
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t j = 0; j < cols_; ++j) next.push_back(T_[i * stride + (j == s ? last : j)]);
        T_.swap(next);
        where_[col_var_[s - 1]] = deleted;
        if (s != last) {
            col_var_[s - 1] = col_var_[last - 1];
            where_[col_var_[s - 1]] = -static_cast<long>(s);
        }
        col_var_.pop_back();
        --cols_;
    }

    void remove_row(std::size_t r) {
        const std::size_t stride = cols_ + 1;
        const std::size_t last = rows() - 1;
        if (r != last) {
            std::copy_n(&T_[last * stride], stride, &T_[r * stride]);
            row_var_[r] = row_var_[last];
            where_[row_var_[r]] = static_cast<long>(r);
        }
        T_.resize(last * stride);
        row_var_.pop_back();
    }

    // Every free nonbasic column with a nonzero in a constrained row enters the basis.
    void absorb_free_columns() {
        bool again = true;
        while (again) {
            again = false;
            for (std::size_t c = 1; c <= cols_ && !again; ++c) {
                if (kind_[col_var_[c - 1]] != VarKind::Free) continue;
                for (std::size_t i = 0; i < rows(); ++i) {
                    if (kind_[row_var_[i]] == VarKind::Free || at(i, c) == Int(0)) continue;
                    pivot(i, c);
                    again = true;
                    break;
                }
            }
        }
    }

    static constexpr long deleted = static_cast<long>(-(1L << 40));

    std::size_t cols_;
    std::vector<Int> T_;
    Int D_ = Int(1);
    std::vector<VarKind> kind_;
    std::vector<long> where_;  // >= 0 row index; < 0 -(column index); `deleted`
    std::vector<std::size_t> row_var_;
    std::vector<std::size_t> col_var_;
    bool infeasible_ = false;
    bool last_equality_dependent_ = false;
    std::size_t farkas_row_var_ = npos;
};

// ---------------------------------------------------------------------------
// Rational front end

enum class Relation { GreaterEqual, LessEqual, Equal, Greater, Less };

struct LinearConstraint {
    std::vector<Rational> coeffs;
    Relation relation = Relation::GreaterEqual;
    Rational rhs;
};

struct FeasibilityResult {
    bool feasible = false;
    std::vector<Rational> witness;
};

namespace detail {

struct IntegerRow {
    std::vector<BigInt> a;
    BigInt b;
    bool equality = false;
    bool strict = false;
};

inline IntegerRow integerize(const LinearConstraint& c, std::size_t dim) {
    if (c.coeffs.size() != dim) throw std::invalid_argument("constraint length does not match dimension");
    BigInt l = 1;
    auto fold = [&](const Rational& q) {
        const BigInt den = boost::multiprecision::denominator(q);
        l = boost::multiprecision::lcm(l, den);
    };
    for (const auto& q : c.coeffs) fold(q);
    fold(c.rhs);
    IntegerRow row;
    const bool flip = c.relation == Relation::LessEqual || c.relation == Relation::Less;
    for (const auto& q : c.coeffs) {
        BigInt v = boost::multiprecision::numerator(q) * (l / boost::multiprecision::denominator(q));
        row.a.push_back(flip ? BigInt(-v) : v);
    }
    BigInt v = boost::multiprecision::numerator(c.rhs) * (l / boost::multiprecision::denominator(c.rhs));
    row.b = flip ? BigInt(-v) : v;
    row.equality = c.relation == Relation::Equal;
    row.strict = c.relation == Relation::Greater || c.relation == Relation::Less;
    return row;
}

template <class Int>
Int from_big(const BigInt& v) {
    if constexpr (std::is_same_v<Int, BigInt>) {
        return v;
    } else {
        static const BigInt lim = (BigInt(1) << 126);
        if (abs(v) >= lim) throw IntegerOverflow();
        const bool neg = v.sign() < 0;
        BigInt u = neg ? BigInt(-v) : v;
        const auto lo = static_cast<std::uint64_t>(u & BigInt(0xFFFFFFFFFFFFFFFFULL));
        const auto hi = static_cast<std::uint64_t>(u >> 64);
        __int128 r = (static_cast<__int128>(hi) << 64) | lo;
        return CheckedInt128::from_raw(neg ? -r : r);
    }
}

template <class Int>
FeasibilityResult solve_feasibility(const std::vector<IntegerRow>& rows, std::size_t dim) {
    const bool any_strict = std::any_of(rows.begin(), rows.end(), [](const IntegerRow& r) { return r.strict; });
    // With strict rows: a.x - t >= b, t <= 1, maximize t.
    const std::size_t nf = dim + (any_strict ? 1 : 0);
    Dictionary<Int> dict(nf);
    std::vector<Int> a(nf);
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < dim; ++j) a[j] = from_big<Int>(r.a[j]);
        if (any_strict) a[dim] = r.strict ? Int(-1) : Int(0);
        dict.add_constraint(std::span<const Int>(a), from_big<Int>(r.b), r.equality);
    }
    FeasibilityResult out;
    if (any_strict) {
        std::fill(a.begin(), a.end(), Int(0));
        a[dim] = Int(-1);
        dict.add_constraint(std::span<const Int>(a), Int(-1), false);
        if (dict.maximize(dim) != Dictionary<Int>::OptStatus::Optimal) return out;
        if (dict.value(dim) <= 0) return out;
    } else if (!dict.make_feasible()) {
        return out;
    }
    out.feasible = true;
    for (std::size_t j = 0; j < dim; ++j) out.witness.push_back(dict.value(j));
    return out;
}

}  // namespace detail

/**
 * Exact feasibility of a system of rational linear constraints in `dim`
 * unknowns. Strict constraints are honoured exactly. The witness satisfies
 * every constraint.
 */
inline FeasibilityResult lp_feasible(std::span<const LinearConstraint> constraints, std::size_t dim) {
    std::vector<detail::IntegerRow> rows;
    rows.reserve(constraints.size());
    for (const auto& c : constraints) rows.push_back(detail::integerize(c, dim));
    try {
        return detail::solve_feasibility<CheckedInt128>(rows, dim);
    } catch (const IntegerOverflow&) {
        return detail::solve_feasibility<BigInt>(rows, dim);
    }
}

inline FeasibilityResult lp_feasible(const std::vector<LinearConstraint>& constraints, std::size_t dim) {
    return lp_feasible(std::span<const LinearConstraint>(constraints), dim);
}

/// True iff `x` satisfies every constraint exactly.
inline bool satisfies(std::span<const LinearConstraint> constraints, const std::vector<Rational>& x) {
    for (const auto& c : constraints) {
        Rational lhs = 0;
        for (std::size_t j = 0; j < x.size(); ++j) lhs += c.coeffs[j] * x[j];
        switch (c.relation) {
            case Relation::GreaterEqual: if (!(lhs >= c.rhs)) return false; break;
            case Relation::LessEqual: if (!(lhs <= c.rhs)) return false; break;
            case Relation::Equal: if (!(lhs == c.rhs)) return false; break;
            case Relation::Greater: if (!(lhs > c.rhs)) return false; break;
            case Relation::Less: if (!(lhs < c.rhs)) return false; break;
        }
    }
    return true;
}

}  // namespace kbkk
