/**
 * Bezout, binomial and BKK bounds of one instance, with CSV/JSON output.
 */
#pragma once

#include <chrono>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "kbkk/formulation.hpp"
#include "kbkk/mixed_volume.hpp"

namespace kbkk {

struct BoundsReport {
    std::size_t n_nodes = 0;
    BigInt bezout = 0;     // of the exp formulation
    BigInt binomial = 0;
    std::optional<BigInt> bkk_sincos;
    std::optional<BigInt> bkk_exp;
    std::optional<BigInt> generic_root_count;
    std::uint64_t seed = 1;
    double seconds_sincos = 0.0, seconds_exp = 0.0;
    nlohmann::json meta;  // instance provenance (family, samplers, ...)

    static std::string csv_header() { return "n,bezout,binomial,bkk_sincos,bkk_exp,generic_root_count"; }

    std::string csv_row() const {
        auto opt = [](const std::optional<BigInt>& v) { return v ? to_string(*v) : std::string(); };
        std::ostringstream out;
        out << n_nodes << ',' << to_string(bezout) << ',' << to_string(binomial) << ',' << opt(bkk_sincos) << ','
            << opt(bkk_exp) << ',' << opt(generic_root_count);
        return out.str();
    }

    /// Big integers are written as decimal strings so no precision is lost.
    /// Timings are left out so equal inputs give byte-identical files.
    nlohmann::json to_json() const {
        auto opt = [](const std::optional<BigInt>& v) { return v ? nlohmann::json(to_string(*v)) : nlohmann::json(); };
        nlohmann::json j{{"n", n_nodes},
                         {"bezout", to_string(bezout)},
                         {"binomial", to_string(binomial)},
                         {"bkk_sincos", opt(bkk_sincos)},
                         {"bkk_exp", opt(bkk_exp)},
                         {"generic_root_count", opt(generic_root_count)},
                         {"seed", seed},
                         {"exp_normalization", kExpNormalization}};
        if (!meta.is_null()) j["meta"] = meta;
        return j;
    }
};

struct BoundsOptions {
    bool sincos = true;
    bool exp = true;
    std::uint64_t seed = 1;  // lifting seed; the values themselves do not depend on it
};

inline BoundsReport compute_bounds(const KuramotoInstance& inst, const BoundsOptions& opt = {}) {
    BoundsReport r;
    r.n_nodes = inst.size();
    r.seed = opt.seed;
    const auto exp_sys = build_exp_system(inst);
    r.bezout = bezout_bound(exp_sys);
    r.binomial = binomial_bound(inst.size());
    auto timed = [&](const PolynomialSystem& sys, double& seconds) {
        const auto t0 = std::chrono::steady_clock::now();
        BigInt v = mixed_volume(supports_of(sys), derive_seed(opt.seed, "lifting"));
        seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return v;
    };
    if (opt.sincos) r.bkk_sincos = timed(build_sincos_system(inst), r.seconds_sincos);
    if (opt.exp) r.bkk_exp = timed(exp_sys, r.seconds_exp);
    return r;
}

}  // namespace kbkk
