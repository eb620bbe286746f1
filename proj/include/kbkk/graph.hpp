/**
 * Weighted oscillator networks, the standard graph families and the
 * Kuramoto instance (coupling matrix plus natural frequencies).
 *
 * Node indices are 0-based in memory; files and messages use 1-based labels.
 * The last node (index n-1) is the pinned reference oscillator.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "kbkk/common.hpp"

namespace kbkk {

class WeightedGraph {
  public:
    WeightedGraph() = default;

    explicit WeightedGraph(std::size_t n) : n_(n), weights_(n * n, Complex{}) {
        if (n < 2) throw InvalidSize("a graph needs at least 2 nodes, got " + std::to_string(n));
    }

    std::size_t size() const noexcept { return n_; }

    const Complex& operator()(std::size_t i, std::size_t j) const { return weights_[i * n_ + j]; }

    /// Sets one directed entry. Diagonal entries must stay zero.
    void set(std::size_t i, std::size_t j, Complex w) {
        if (i == j && w != Complex{})
            throw std::invalid_argument("nonzero diagonal weight at node " + std::to_string(i + 1));
        weights_[i * n_ + j] = w;
    }

    void set_symmetric(std::size_t i, std::size_t j, Complex w) {
        set(i, j, w);
        set(j, i, w);
    }

    bool adjacent(std::size_t i, std::size_t j) const {
        return (*this)(i, j) != Complex{} || (*this)(j, i) != Complex{};
    }

    bool is_symmetric() const {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }

    /// Number of unordered pairs {i, j} with a nonzero weight in either direction.
    std::size_t edge_count() const {
        std::size_t count = 0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if (adjacent(i, j)) ++count;
        return count;
    }

    std::size_t degree(std::size_t i) const {
        std::size_t d = 0;
        for (std::size_t j = 0; j < n_; ++j)
            if (j != i && adjacent(i, j)) ++d;
        return d;
    }

    bool operator==(const WeightedGraph&) const = default;

  private:
    std::size_t n_ = 0;
    std::vector<Complex> weights_;
};

struct KuramotoInstance {
    WeightedGraph graph;
    std::vector<Complex> omega;

    std::size_t size() const noexcept { return graph.size(); }

    void validate() const {
        if (omega.size() != graph.size())
            throw std::invalid_argument("omega has " + std::to_string(omega.size()) +
                                        " entries but the graph has " +
                                        std::to_string(graph.size()) + " nodes");
    }

    bool has_real_parameters() const {
        for (const auto& w : omega)
            if (w.imag() != 0.0) return false;
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < size(); ++j)
                if (graph(i, j).imag() != 0.0) return false;
        return true;
    }

    bool operator==(const KuramotoInstance&) const = default;
};

/**
 * Source of scalar values for weights and frequencies.
 *
 * Descriptor syntax (also used on the command line):
 *   const:<re>[:<im>]        constant value
 *   uniform:<lo>:<hi>        real, uniform on [lo, hi]
 *   annulus:<rmin>:<rmax>    complex, uniform on the annulus rmin <= |z| <= rmax
 *   disk                     complex, uniform on the unit disk
 */
class ScalarSampler {
  public:
    enum class Kind { Constant, UniformReal, Annulus, Disk };

    static ScalarSampler constant(Complex value) { return ScalarSampler(Kind::Constant, value.real(), value.imag(), 0); }
    static ScalarSampler uniform_real(double lo, double hi, std::uint64_t seed) {
        return ScalarSampler(Kind::UniformReal, lo, hi, seed);
    }
    static ScalarSampler annulus(double rmin, double rmax, std::uint64_t seed) {
        return ScalarSampler(Kind::Annulus, rmin, rmax, seed);
    }
    static ScalarSampler unit_disk(std::uint64_t seed) { return ScalarSampler(Kind::Disk, 0, 1, seed); }

    /// Default coupling sampler: real, uniform on [0.5, 1.5].
    static ScalarSampler default_real_weights(std::uint64_t seed) { return uniform_real(0.5, 1.5, seed); }
    /// Complex coupling sampler for genericity experiments.
    static ScalarSampler default_complex_weights(std::uint64_t seed) { return annulus(0.5, 1.5, seed); }

    static ScalarSampler parse(const std::string& descriptor, std::uint64_t seed);

    Complex operator()() {
        switch (kind_) {
            case Kind::Constant: return {a_, b_};
            case Kind::UniformReal: return {rng_.uniform(a_, b_), 0.0};
            case Kind::Annulus: {
                // area-uniform radius
                const double r = std::sqrt(rng_.uniform(a_ * a_, b_ * b_));
                return r * rng_.unit_circle();
            }
            case Kind::Disk: return std::sqrt(rng_.uniform()) * rng_.unit_circle();
        }
        return {};
    }

    Kind kind() const noexcept { return kind_; }
    bool is_real() const noexcept { return kind_ == Kind::UniformReal || (kind_ == Kind::Constant && b_ == 0.0); }
    std::string describe() const;

  private:
    ScalarSampler(Kind k, double a, double b, std::uint64_t seed) : kind_(k), a_(a), b_(b), rng_(seed) {}

    Kind kind_;
    double a_, b_;
    Rng rng_;
};

inline std::string ScalarSampler::describe() const {
    auto num = [](double v) {
        std::string s = std::to_string(v);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    };
    switch (kind_) {
        case Kind::Constant: return b_ == 0.0 ? "const:" + num(a_) : "const:" + num(a_) + ":" + num(b_);
        case Kind::UniformReal: return "uniform:" + num(a_) + ":" + num(b_);
        case Kind::Annulus: return "annulus:" + num(a_) + ":" + num(b_);
        case Kind::Disk: return "disk";
    }
    return {};
}

inline ScalarSampler ScalarSampler::parse(const std::string& descriptor, std::uint64_t seed) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = descriptor.find(':', start);
        parts.push_back(descriptor.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    auto number = [&](std::size_t k) {
        try {
            std::size_t used = 0;
            const double v = std::stod(parts.at(k), &used);
            if (used != parts[k].size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("bad sampler descriptor '" + descriptor + "'");
        }
    };
    const auto& kind = parts[0];
    if (kind == "const" && (parts.size() == 2 || parts.size() == 3))
        return constant({number(1), parts.size() == 3 ? number(2) : 0.0});
    if (kind == "uniform" && parts.size() == 3) return uniform_real(number(1), number(2), seed);
    if (kind == "annulus" && parts.size() == 3) return annulus(number(1), number(2), seed);
    if (kind == "disk" && parts.size() == 1) return unit_disk(seed);
    throw std::invalid_argument("bad sampler descriptor '" + descriptor + "'");
}

inline WeightedGraph make_complete(std::size_t n, ScalarSampler& weights) {
    WeightedGraph g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) g.set_symmetric(i, j, weights());
    return g;
}

inline WeightedGraph make_path(std::size_t n, ScalarSampler& weights) {
    WeightedGraph g(n);
    for (std::size_t i = 0; i + 1 < n; ++i) g.set_symmetric(i, i + 1, weights());
    return g;
}

inline WeightedGraph make_ring(std::size_t n, ScalarSampler& weights) {
    if (n < 3) throw InvalidSize("a ring needs at least 3 nodes, got " + std::to_string(n));
    WeightedGraph g = make_path(n, weights);
    g.set_symmetric(n - 1, 0, weights());
    return g;
}

/**
 * Gilbert G(n, p): every pair {i, j}, i > j, is an edge independently with
 * probability p. The edge pattern depends only on `seed`; weights come from
 * the sampler's own stream.
 */
inline WeightedGraph make_erdos_renyi(std::size_t n, double p, ScalarSampler& weights, std::uint64_t seed) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("edge probability must lie in (0, 1]");
    WeightedGraph g(n);
    Rng rng(seed);
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (rng.uniform() < p) g.set_symmetric(i, j, weights());
    return g;
}

/// True iff the nonzero pattern of the weights forms a single component.
inline bool is_connected(const WeightedGraph& g) {
    const std::size_t n = g.size();
    if (n == 0) return false;
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < n; ++v) {
            if (!seen[v] && g.adjacent(u, v)) {
                seen[v] = true;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    return reached == n;
}

}  // namespace kbkk
