/**
 * Random instances of the standard graph families with reproducible seeds.
 *
 * One root seed is split per purpose: "graph" (edge pattern, one stream per
 * attempt), "graph-p" (edge probability when drawn), and "params" (couplings
 * and natural frequencies), so each part can be replayed on its own.
 */
#pragma once

#include <cmath>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "kbkk/graph.hpp"

namespace kbkk {

enum class Family { Complete, Path, Ring, ErdosRenyi };

inline Family parse_family(const std::string& s) {
    if (s == "complete") return Family::Complete;
    if (s == "path") return Family::Path;
    if (s == "ring") return Family::Ring;
    if (s == "erdos_renyi" || s == "er") return Family::ErdosRenyi;
    throw std::invalid_argument("unknown graph family '" + s + "' (complete, path, ring, erdos_renyi)");
}

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Complete: return "complete";
        case Family::Path: return "path";
        case Family::Ring: return "ring";
        case Family::ErdosRenyi: return "erdos_renyi";
    }
    return "?";
}

inline std::size_t family_min_n(Family f) { return f == Family::Ring ? 3 : 2; }

enum class ParamKind { Real, Complex };

inline ParamKind parse_param_kind(const std::string& s) {
    if (s == "real") return ParamKind::Real;
    if (s == "complex") return ParamKind::Complex;
    throw std::invalid_argument("random parameters must be 'real' or 'complex', got '" + s + "'");
}

/// Sampler descriptors used when none is given explicitly.
inline std::string default_weights(ParamKind k) { return k == ParamKind::Real ? "uniform:0.5:1.5" : "annulus:0.5:1.5"; }
inline std::string default_omega(ParamKind k) { return k == ParamKind::Real ? "uniform:-1:1" : "disk"; }

struct GenerateOptions {
    Family family = Family::Complete;
    std::size_t n = 3;
    std::optional<double> p;        // Erdos-Renyi only; drawn from (ln n / n, 1] when absent
    bool require_connected = false;  // Erdos-Renyi only
    int max_attempts = 10000;
    ParamKind kind = ParamKind::Real;
    std::string weights;  // sampler descriptors; empty = default for `kind`
    std::string omega;
    std::uint64_t seed = 1;
};

struct GeneratedInstance {
    KuramotoInstance instance;
    double p = 1.0;
    int attempts = 1;
    std::string weights, omega;

    nlohmann::json meta(const GenerateOptions& opt) const {
        nlohmann::json m{{"family", family_name(opt.family)}, {"seed", opt.seed},
                         {"weights", weights},                {"omega", omega}};
        if (opt.family == Family::ErdosRenyi) {
            m["p"] = p;
            m["attempts"] = attempts;
        }
        return m;
    }
};

/// Lower end of the edge-probability range used for random graphs: ln(n) / n.
inline double connectivity_threshold(std::size_t n) { return std::log(static_cast<double>(n)) / static_cast<double>(n); }

inline GeneratedInstance generate_instance(const GenerateOptions& opt) {
    if (opt.n < family_min_n(opt.family))
        throw InvalidSize(std::string(family_name(opt.family)) + " graphs need at least " +
                          std::to_string(family_min_n(opt.family)) + " nodes, got " + std::to_string(opt.n));
    GeneratedInstance out;
    out.weights = opt.weights.empty() ? default_weights(opt.kind) : opt.weights;
    out.omega = opt.omega.empty() ? default_omega(opt.kind) : opt.omega;
    auto w = ScalarSampler::parse(out.weights, derive_seed(opt.seed, "params", 0));
    auto om = ScalarSampler::parse(out.omega, derive_seed(opt.seed, "params", 1));

    switch (opt.family) {
        case Family::Complete: out.instance.graph = make_complete(opt.n, w); break;
        case Family::Path: out.instance.graph = make_path(opt.n, w); break;
        case Family::Ring: out.instance.graph = make_ring(opt.n, w); break;
        case Family::ErdosRenyi: {
            if (opt.p) {
                out.p = *opt.p;
            } else {
                const double lo = std::min(connectivity_threshold(opt.n), 1.0);
                Rng r(derive_seed(opt.seed, "graph-p"));
                out.p = 1.0 - (1.0 - lo) * r.uniform();  // uniform on (lo, 1]
            }
            if (!(out.p > 0.0 && out.p <= 1.0)) throw std::invalid_argument("edge probability must lie in (0, 1]");
            for (out.attempts = 1;; ++out.attempts) {
                out.instance.graph =
                    make_erdos_renyi(opt.n, out.p, w, derive_seed(opt.seed, "graph", static_cast<std::uint64_t>(out.attempts - 1)));
                if (!opt.require_connected || is_connected(out.instance.graph)) break;
                if (out.attempts >= opt.max_attempts)
                    throw ComputeError("no connected graph after " + std::to_string(opt.max_attempts) +
                                       " attempts; use a larger p (connectivity needs p > ln(N)/N = " +
                                       std::to_string(connectivity_threshold(opt.n)) + ")");
            }
            break;
        }
    }
    for (std::size_t i = 0; i < opt.n; ++i) out.instance.omega.push_back(om());
    return out;
}

}  // namespace kbkk
