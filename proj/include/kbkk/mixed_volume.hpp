/**
 * Mixed volume of Newton polytopes (the BKK root count) by random integer
 * lifting and mixed cell enumeration.
 *
 * A mixed cell of the lifted supports A_1..A_n is a choice of one pair
 * {a_i, b_i} per support together with an inner normal alpha such that, for
 * every i, a_i and b_i are the only minimizers of q.alpha + w(q) over A_i.
 * Summing |det(b_i - a_i)| over all mixed cells gives n! Vol-normalized mixed
 * volume, i.e. the number of isolated roots in the algebraic torus of a
 * generic system with these supports.
 *
 * The search is depth-first over supports. Each node carries an exact
 * dictionary (see lp.hpp) of the inequalities collected so far; children add
 * the rows of the next support and are pruned when the dictionary becomes
 * infeasible. Every pruning decision and every leaf is exact.
 */
#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kbkk/bigint.hpp"
#include "kbkk/checked_int.hpp"
#include "kbkk/common.hpp"
#include "kbkk/lp.hpp"
#include "kbkk/polynomial.hpp"

namespace kbkk {

using Point = std::vector<int>;

struct Support {
    std::vector<Point> points;

    Support() = default;
    explicit Support(std::vector<Point> pts) : points(std::move(pts)) { validate(); }

    std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }
    std::size_t size() const { return points.size(); }

    void validate() const {
        if (points.empty()) throw std::invalid_argument("support must be nonempty");
        std::set<Point> seen;
        for (const auto& p : points) {
            if (p.size() != points.front().size()) throw std::invalid_argument("support points differ in dimension");
            if (!seen.insert(p).second) throw std::invalid_argument("support has a repeated point");
        }
    }

    bool operator==(const Support&) const = default;
};

struct LiftedSupport {
    Support base;
    std::vector<std::int64_t> lifts;
};

struct MixedCell {
    std::vector<std::array<std::size_t, 2>> pairs;  // one point-index pair per support
    std::vector<Rational> normal;                    // inner normal alpha (last lifted coordinate = 1)
    BigInt volume;                                   // |det(b_i - a_i)|
};

class NonGenericLifting : public ComputeError {
  public:
    NonGenericLifting() : ComputeError("lifting is not generic (tie on a lower facet)") {}
};

inline Support support_of(const Polynomial& p) {
    std::vector<Point> pts;
    for (const auto& t : p.terms()) pts.push_back(t.exponents);
    if (pts.empty()) throw std::invalid_argument("the zero polynomial has no support");
    return Support(std::move(pts));
}

inline std::vector<Support> supports_of(const PolynomialSystem& sys) {
    std::vector<Support> out;
    for (const auto& p : sys.polys) out.push_back(support_of(p));
    return out;
}

inline std::vector<LiftedSupport> random_lifting(const std::vector<Support>& supports, std::uint64_t seed,
                                                 std::uint64_t bound = std::uint64_t{1} << 16) {
    Rng rng(seed);
    std::vector<LiftedSupport> out;
    for (const auto& s : supports) {
        LiftedSupport l{s, {}};
        for (std::size_t k = 0; k < s.size(); ++k) l.lifts.push_back(static_cast<std::int64_t>(rng.below(bound)));
        out.push_back(std::move(l));
    }
    return out;
}

struct EnumerationStats {
    std::uint64_t nodes = 0;
    std::uint64_t lp_checks = 0;
    std::uint64_t pruned = 0;
    bool used_bigint = false;
};

namespace detail {

template <class Int>
class CellSearch {
  public:
    explicit CellSearch(const std::vector<LiftedSupport>& lifted) : lifted_(lifted), n_(lifted.size()) {
        order_.resize(n_);
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        for (std::size_t i = 0; i < n_; ++i) edges_.push_back(lower_edges(i));
        // fewest candidate edges first; ties keep the input order
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::size_t a, std::size_t b) { return edges_[a].size() < edges_[b].size(); });
    }

    std::vector<MixedCell> run(EnumerationStats& stats) {
        stats_ = &stats;
        cells_.clear();
        for (const auto& e : edges_)
            if (e.empty()) return {};
        chosen_.assign(n_, {0, 0});
        partner_.assign(n_, 0);
        Dictionary<Int> root(n_);
        descend(root, 0);
        return std::move(cells_);
    }

  private:
    using Edge = std::array<std::size_t, 2>;

    Int lift(std::size_t i, std::size_t k) const { return Int(static_cast<long long>(lifted_[i].lifts[k])); }
    const Point& pt(std::size_t i, std::size_t k) const { return lifted_[i].base.points[k]; }

    std::vector<Int> diff_row(std::size_t i, std::size_t c, std::size_t a) const {
        std::vector<Int> row(n_);
        for (std::size_t j = 0; j < n_; ++j) row[j] = Int(static_cast<long long>(pt(i, c)[j] - pt(i, a)[j]));
        return row;
    }

    // Rows making point a of support i a (weak) minimizer. Returns the slack
    // id of each row, indexed by point (npos for a itself).
    std::vector<std::size_t> add_point_rows(Dictionary<Int>& d, std::size_t i, std::size_t a) const {
        std::vector<std::size_t> slack(lifted_[i].base.size(), Dictionary<Int>::npos);
        for (std::size_t c = 0; c < lifted_[i].base.size(); ++c) {
            if (c == a) continue;
            const auto row = diff_row(i, c, a);
            slack[c] = d.add_constraint(std::span<const Int>(row), lift(i, a) - lift(i, c), false);
        }
        return slack;
    }

    // Turns the (a, b) row into an equality. False if dependent or infeasible.
    bool add_pair_equality(Dictionary<Int>& d, std::size_t i, const Edge& e) const {
        const auto row = diff_row(i, e[1], e[0]);
        d.add_constraint(std::span<const Int>(row), lift(i, e[0]) - lift(i, e[1]), true);
        if (d.last_equality_dependent() || d.infeasible()) return false;
        ++stats_->lp_checks;
        return d.make_feasible();
    }

    // Pairs of support i that are lower edges of its own lifted hull.
    std::vector<Edge> lower_edges(std::size_t i) {
        EnumerationStats dummy;
        auto* saved = stats_;
        stats_ = &dummy;
        std::vector<Edge> out;
        const std::size_t m = lifted_[i].base.size();
        for (std::size_t a = 0; a < m; ++a) {
            Dictionary<Int> base(n_);
            add_point_rows(base, i, a);
            for (std::size_t b = a + 1; b < m; ++b) {
                Dictionary<Int> d = base;
                if (add_pair_equality(d, i, {a, b})) out.push_back({a, b});
            }
        }
        stats_ = saved;
        return out;
    }

    void descend(const Dictionary<Int>& parent, std::size_t depth) {
        ++stats_->nodes;
        if (depth == n_) {
            record_leaf(parent);
            return;
        }
        const std::size_t i = order_[depth];
        const std::size_t m = lifted_[i].base.size();

        // One-point test: only points that can still be minimizers spawn pairs.
        std::vector<std::optional<Dictionary<Int>>> at_point(m);
        std::vector<std::vector<std::size_t>> slacks(m);
        std::vector<char> candidate(m, 0);
        for (const auto& e : edges_[i]) candidate[e[0]] = candidate[e[1]] = 1;
        for (std::size_t a = 0; a < m; ++a) {
            if (!candidate[a]) continue;
            Dictionary<Int> d = parent;
            slacks[a] = add_point_rows(d, i, a);
            ++stats_->lp_checks;
            if (d.make_feasible()) at_point[a].emplace(std::move(d));
            else ++stats_->pruned;
        }
        for (const auto& e : edges_[i]) {
            if (!at_point[e[0]] || !at_point[e[1]]) continue;
            Dictionary<Int> child = *at_point[e[0]];
            if (!add_pair_equality(child, i, e)) {
                ++stats_->pruned;
                continue;
            }
            chosen_[i] = e;
            partner_[i] = slacks[e[0]][e[1]];
            descend(child, depth + 1);
        }
    }

    void record_leaf(const Dictionary<Int>& d) {
        if (d.cols() != 0) throw ComputeError("mixed cell leaf with free directions left");
        std::vector<char> is_partner(d.num_vars(), 0);
        for (auto v : partner_) is_partner[v] = 1;
        for (std::size_t v = n_; v < d.num_vars(); ++v) {
            if (is_partner[v] || d.kind(v) != VarKind::Slack || !d.is_basic(v)) continue;
            if (sign(d.numerator(v)) == 0) throw NonGenericLifting();
        }
        MixedCell cell;
        cell.pairs = chosen_;
        for (std::size_t j = 0; j < n_; ++j) cell.normal.push_back(d.value(j));
        cell.volume = to_big(d.denominator());
        cells_.push_back(std::move(cell));
    }

    const std::vector<LiftedSupport>& lifted_;
    std::size_t n_;
    std::vector<std::size_t> order_;
    std::vector<std::vector<Edge>> edges_;
    std::vector<Edge> chosen_;
    std::vector<std::size_t> partner_;  // slack id of the row that became each pair's equality
    std::vector<MixedCell> cells_;
    EnumerationStats* stats_ = nullptr;
};

inline void check_square(const std::vector<Support>& supports) {
    const std::size_t n = supports.size();
    if (n == 0) throw std::invalid_argument("need at least one support");
    for (const auto& s : supports) {
        s.validate();
        if (s.dim() != n)
            throw std::invalid_argument("mixed volume needs n supports in dimension n (got " + std::to_string(n) +
                                        " supports of dimension " + std::to_string(s.dim()) + ")");
    }
}

}  // namespace detail

/**
 * All fine mixed cells of the subdivision induced by `lifted`.
 * Throws NonGenericLifting when the lifting produces a tie.
 */
inline std::vector<MixedCell> enumerate_mixed_cells(const std::vector<LiftedSupport>& lifted,
                                                    EnumerationStats* stats = nullptr) {
    std::vector<Support> bases;
    for (const auto& l : lifted) {
        if (l.lifts.size() != l.base.size()) throw std::invalid_argument("one lift value per support point required");
        bases.push_back(l.base);
    }
    detail::check_square(bases);
    EnumerationStats local;
    EnumerationStats& st = stats ? *stats : local;
    try {
        detail::CellSearch<CheckedInt128> search(lifted);
        return search.run(st);
    } catch (const IntegerOverflow&) {
        st = EnumerationStats{};
        st.used_bigint = true;
        detail::CellSearch<BigInt> search(lifted);
        return search.run(st);
    }
}

inline BigInt sum_cell_volumes(const std::vector<MixedCell>& cells) {
    BigInt total = 0;
    for (const auto& c : cells) total += c.volume;
    return total;
}

struct MixedVolumeOptions {
    std::uint64_t seed = 1;
    int max_relifts = 8;
};

struct MixedVolumeResult {
    BigInt value;
    std::vector<LiftedSupport> lifted;
    std::vector<MixedCell> cells;
    int relifts = 0;
    EnumerationStats stats;
};

/// Mixed volume together with the lifting and cells that produced it.
inline MixedVolumeResult mixed_volume_detailed(const std::vector<Support>& supports, const MixedVolumeOptions& opt = {}) {
    detail::check_square(supports);
    MixedVolumeResult out;
    for (const auto& s : supports)
        if (s.size() < 2) {
            out.value = 0;
            return out;
        }
    for (int attempt = 0; attempt <= opt.max_relifts; ++attempt) {
        out.lifted = random_lifting(supports, derive_seed(opt.seed, "lifting", static_cast<std::uint64_t>(attempt)));
        try {
            out.stats = {};
            out.cells = enumerate_mixed_cells(out.lifted, &out.stats);
            out.value = sum_cell_volumes(out.cells);
            out.relifts = attempt;
            return out;
        } catch (const NonGenericLifting&) {
        }
    }
    throw ComputeError("no generic lifting found after " + std::to_string(opt.max_relifts + 1) + " attempts");
}

/// Normalized mixed volume MV(conv A_1, ..., conv A_n); MV of n unit simplices is 1.
inline BigInt mixed_volume(const std::vector<Support>& supports, std::uint64_t seed = 1) {
    return mixed_volume_detailed(supports, {.seed = seed}).value;
}

inline BigInt bkk_bound(const PolynomialSystem& sys, std::uint64_t seed = 1) {
    if (!sys.is_square()) throw std::invalid_argument("BKK bound needs a square system");
    return mixed_volume(supports_of(sys), seed);
}

// ---------------------------------------------------------------------------
// Support files: one support per line, points as ';'-separated ','-tuples.

inline std::string write_supports(const std::vector<Support>& supports) {
    std::ostringstream out;
    for (const auto& s : supports) {
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (k) out << ';';
            for (std::size_t j = 0; j < s.points[k].size(); ++j) out << (j ? "," : "") << s.points[k][j];
        }
        out << '\n';
    }
    return out.str();
}

inline std::vector<Support> read_supports(const std::string& text) {
    std::vector<Support> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<Point> pts;
        std::istringstream ls(line);
        std::string tuple;
        while (std::getline(ls, tuple, ';')) {
            Point p;
            std::istringstream ts(tuple);
            std::string v;
            while (std::getline(ts, v, ',')) {
                try {
                    std::size_t used = 0;
                    p.push_back(std::stoi(v, &used));
                    if (v.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(v);
                } catch (const std::exception&) {
                    throw ParseError("bad integer '" + v + "'", "line " + std::to_string(lineno));
                }
            }
            pts.push_back(std::move(p));
        }
        try {
            out.emplace_back(std::move(pts));
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), "line " + std::to_string(lineno));
        }
    }
    return out;
}

}  // namespace kbkk
