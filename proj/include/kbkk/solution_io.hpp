/**
 * Solution files: a JSON document per solve and a one-row CSV summary.
 *
 * Complex numbers are written as [re, im] pairs. Wall-clock time is not
 * written, so a fixed seed reproduces the files byte for byte.
 */
#pragma once

#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "kbkk/homotopy.hpp"

namespace kbkk {

namespace detail {

inline nlohmann::json complex_pair(Complex z) { return nlohmann::json::array({z.real() + 0.0, z.imag() + 0.0}); }

}  // namespace detail

inline nlohmann::json tracker_config_json(const TrackerConfig& c) {
    return {{"step_init", c.step_init},
            {"step_min", c.step_min},
            {"step_max", c.step_max},
            {"newton_tol", c.newton_tol},
            {"newton_max_iters", c.newton_max_iters},
            {"residual_tol", c.residual_tol},
            {"dedup_tol", c.dedup_tol},
            {"zero_tol", c.zero_tol},
            {"endgame_start_t", c.endgame_start_t},
            {"endgame_gap", c.endgame_gap},
            {"landing_tol", c.landing_tol},
            {"singular_cond", c.singular_cond},
            {"max_retries_per_path", c.max_retries_per_path},
            {"max_steps", c.max_steps},
            {"seed", c.rng_seed}};
}

inline nlohmann::json counts_json(const SolutionCounts& c) {
    return {{"paths_tracked", c.paths_tracked}, {"converged", c.converged},
            {"diverged", c.diverged},           {"singular", c.singular},
            {"failed", c.failed},               {"zero_or_infinite", c.zero_or_infinite},
            {"distinct_nonzero", c.distinct_nonzero}, {"torus", c.torus_count}};
}

inline nlohmann::json solution_set_to_json(const SolutionSet& s, const nlohmann::json& meta = {}) {
    nlohmann::json sols = nlohmann::json::array();
    for (const auto& x : s.solutions) {
        nlohmann::json coords = nlohmann::json::array();
        for (const auto& v : x.x) coords.push_back(detail::complex_pair(v));
        nlohmann::json j{{"coordinates", coords},
                         {"residual", x.residual},
                         {"condition", x.condition},
                         {"path", x.path},
                         {"on_torus", x.on_torus}};
        if (x.on_torus) j["theta"] = x.theta;
        sols.push_back(std::move(j));
    }
    nlohmann::json j{{"formulation", formulation_name(s.formulation)},
                     {"mode", mode_name(s.mode)},
                     {"root_bound", to_string(s.root_bound)},
                     {"complete", s.complete},
                     {"restarts", s.restarts},
                     {"gamma", detail::complex_pair(s.gamma)},
                     {"config", tracker_config_json(s.config)},
                     {"counts", counts_json(s.counts)},
                     {"solutions", sols}};
    if (!meta.is_null()) j["meta"] = meta;
    return j;
}

inline std::string solution_csv_header() {
    return "label,n,formulation,mode,root_bound,paths_tracked,converged,diverged,singular,failed,zero_or_infinite,"
           "distinct_nonzero,torus,complete,max_residual";
}

inline std::string solution_csv_row(const std::string& label, std::size_t n_nodes, const SolutionSet& s) {
    double worst = 0.0;
    for (const auto& x : s.solutions) worst = std::max(worst, x.residual);
    const auto& c = s.counts;
    std::ostringstream out;
    out << label << ',' << n_nodes << ',' << formulation_name(s.formulation) << ',' << mode_name(s.mode) << ','
        << to_string(s.root_bound) << ',' << c.paths_tracked << ',' << c.converged << ',' << c.diverged << ','
        << c.singular << ',' << c.failed << ',' << c.zero_or_infinite << ',' << c.distinct_nonzero << ','
        << c.torus_count << ',' << (s.complete ? "true" : "false") << ',' << worst;
    return out.str();
}

}  // namespace kbkk
