/**
 * Brute-force mixed volume, used to cross-check the cell enumeration.
 *
 * Vol(l_1 Q_1 + ... + l_n Q_n) is a homogeneous polynomial of degree n in the
 * l_i. Its l_1...l_n coefficient is recovered exactly from the values on the
 * grid l in {0,1}^n by the mixed difference
 *
 *     MV = sum over subsets S of (-1)^(n-|S|) Vol(sum_{i in S} Q_i),
 *
 * with every volume computed exactly from a placing triangulation of the
 * Minkowski sum. Exponential in n and in the point counts, so the dimension is
 * capped at 4.
 */
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "kbkk/bigint.hpp"
#include "kbkk/mixed_volume.hpp"

namespace kbkk {

namespace detail {

// Determinant of a small integer matrix by fraction-free elimination.
inline BigInt small_det(std::vector<std::vector<BigInt>> m) {
    const std::size_t n = m.size();
    BigInt prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && m[p][k] == 0) ++p;
        if (p == n) return 0;
        if (p != k) {
            std::swap(m[p], m[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

// det[v_1 - v_0, ..., v_{d-1} - v_0, q - v_0] with q given scaled by `scale`.
inline BigInt orientation(const std::vector<Point>& pts, const std::vector<std::size_t>& facet,
                          const std::vector<BigInt>& q, const BigInt& scale) {
    const std::size_t d = q.size();
    std::vector<std::vector<BigInt>> m;
    const Point& o = pts[facet[0]];
    for (std::size_t k = 1; k < facet.size(); ++k) {
        std::vector<BigInt> row(d);
        for (std::size_t j = 0; j < d; ++j) row[j] = (pts[facet[k]][j] - o[j]) * scale;
        m.push_back(std::move(row));
    }
    std::vector<BigInt> last(d);
    for (std::size_t j = 0; j < d; ++j) last[j] = q[j] - o[j] * scale;
    m.push_back(std::move(last));
    return small_det(std::move(m));
}

}  // namespace detail

/// d! times the Euclidean volume of conv(points); 0 when not full-dimensional.
inline BigInt normalized_volume(std::vector<Point> pts) {
    if (pts.empty()) return 0;
    const std::size_t d = pts.front().size();
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    // Initial simplex: grow an affinely independent set greedily.
    std::vector<std::size_t> simplex{0};
    for (std::size_t k = 1; k < pts.size() && simplex.size() < d + 1; ++k) {
        std::vector<std::vector<BigInt>> rows;
        for (std::size_t s = 1; s < simplex.size(); ++s) {
            std::vector<BigInt> r(d);
            for (std::size_t j = 0; j < d; ++j) r[j] = pts[simplex[s]][j] - pts[simplex[0]][j];
            rows.push_back(r);
        }
        std::vector<BigInt> r(d);
        for (std::size_t j = 0; j < d; ++j) r[j] = pts[k][j] - pts[simplex[0]][j];
        rows.push_back(r);
        // rank test through the Gram determinant of the candidate rows
        std::vector<std::vector<BigInt>> gram(rows.size(), std::vector<BigInt>(rows.size()));
        for (std::size_t a = 0; a < rows.size(); ++a)
            for (std::size_t b = 0; b < rows.size(); ++b)
                for (std::size_t j = 0; j < d; ++j) gram[a][b] += rows[a][j] * rows[b][j];
        if (detail::small_det(gram) != 0) simplex.push_back(k);
    }
    if (simplex.size() < d + 1) return 0;

    // Interior reference point: the simplex centroid, scaled by d + 1.
    const BigInt scale = static_cast<long>(d + 1);
    std::vector<BigInt> centroid(d, 0);
    for (auto v : simplex)
        for (std::size_t j = 0; j < d; ++j) centroid[j] += pts[v][j];

    struct Facet {
        std::vector<std::size_t> v;  // sorted vertex indices
        int inner_sign;              // sign of orientation() at the centroid
    };
    std::vector<Facet> facets;
    auto make_facet = [&](std::vector<std::size_t> v) {
        std::sort(v.begin(), v.end());
        const int s = sign(detail::orientation(pts, v, centroid, scale));
        facets.push_back({std::move(v), s});
    };
    BigInt total = 0;
    {
        std::vector<std::vector<BigInt>> rows;
        for (std::size_t s = 1; s <= d; ++s) {
            std::vector<BigInt> r(d);
            for (std::size_t j = 0; j < d; ++j) r[j] = pts[simplex[s]][j] - pts[simplex[0]][j];
            rows.push_back(r);
        }
        total = abs(detail::small_det(rows));
        for (std::size_t drop = 0; drop <= d; ++drop) {
            std::vector<std::size_t> f;
            for (std::size_t s = 0; s <= d; ++s)
                if (s != drop) f.push_back(simplex[s]);
            make_facet(f);
        }
    }

    std::set<std::size_t> used(simplex.begin(), simplex.end());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (used.count(k)) continue;
        std::vector<BigInt> q(d);
        for (std::size_t j = 0; j < d; ++j) q[j] = BigInt(pts[k][j]) * scale;
        std::vector<char> visible(facets.size(), 0);
        bool any = false;
        for (std::size_t f = 0; f < facets.size(); ++f) {
            const int s = sign(detail::orientation(pts, facets[f].v, q, scale));
            if (s != 0 && s != facets[f].inner_sign) {
                visible[f] = 1;
                any = true;
                // the new simplex over this facet
                std::vector<std::vector<BigInt>> rows;
                for (std::size_t a = 1; a < facets[f].v.size(); ++a) {
                    std::vector<BigInt> r(d);
                    for (std::size_t j = 0; j < d; ++j) r[j] = pts[facets[f].v[a]][j] - pts[facets[f].v[0]][j];
                    rows.push_back(r);
                }
                std::vector<BigInt> r(d);
                for (std::size_t j = 0; j < d; ++j) r[j] = pts[k][j] - pts[facets[f].v[0]][j];
                rows.push_back(r);
                total += abs(detail::small_det(rows));
            }
        }
        if (!any) continue;
        // Horizon ridges belong to exactly one visible facet.
        std::map<std::vector<std::size_t>, int> ridge_count;
        for (std::size_t f = 0; f < facets.size(); ++f) {
            if (!visible[f]) continue;
            for (std::size_t drop = 0; drop < facets[f].v.size(); ++drop) {
                std::vector<std::size_t> r;
                for (std::size_t a = 0; a < facets[f].v.size(); ++a)
                    if (a != drop) r.push_back(facets[f].v[a]);
                ++ridge_count[r];
            }
        }
        std::vector<Facet> kept;
        for (std::size_t f = 0; f < facets.size(); ++f)
            if (!visible[f]) kept.push_back(std::move(facets[f]));
        facets = std::move(kept);
        for (const auto& [ridge, count] : ridge_count) {
            if (count != 1) continue;
            auto f = ridge;
            f.push_back(k);
            make_facet(std::move(f));
        }
        used.insert(k);
    }
    return total;
}

inline std::vector<Point> minkowski_sum(const std::vector<const Support*>& parts, std::size_t dim) {
    std::set<Point> acc{Point(dim, 0)};
    for (const auto* s : parts) {
        std::set<Point> next;
        for (const auto& a : acc)
            for (const auto& b : s->points) {
                Point c(dim);
                for (std::size_t j = 0; j < dim; ++j) c[j] = a[j] + b[j];
                next.insert(std::move(c));
            }
        acc = std::move(next);
    }
    return {acc.begin(), acc.end()};
}

/// Exact mixed volume by inclusion-exclusion over Minkowski sums (n <= 4).
inline BigInt brute_force_mixed_volume(const std::vector<Support>& supports) {
    detail::check_square(supports);
    const std::size_t n = supports.size();
    if (n > 4) throw std::invalid_argument("brute-force mixed volume is limited to dimension 4");
    BigInt acc = 0;
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        std::vector<const Support*> parts;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) parts.push_back(&supports[i]);
        const BigInt v = normalized_volume(minkowski_sum(parts, n));
        if ((n - parts.size()) % 2 == 0) acc += v;
        else acc -= v;
    }
    BigInt fact = 1;
    for (std::size_t k = 2; k <= n; ++k) fact *= static_cast<long>(k);
    if (acc % fact != 0) throw ComputeError("mixed difference is not divisible by n!");
    return acc / fact;
}

}  // namespace kbkk
