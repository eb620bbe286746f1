/**
 * JSON instance files:
 *
 *   {"n": 3, "edges": [[1, 2, 1.0], [1, 3, 0.5, 0.1]], "omega": [[1.0], [-0.5, 0.0], [-0.5]]}
 *
 * Node labels are 1-based. An edge entry [i, j, re, im] sets K(i,j) and, unless
 * the file also lists [j, i, ...], K(j,i). `im` defaults to 0. Omega entries
 * may also be bare numbers. Unknown top-level keys (e.g. "meta") are ignored.
 */
#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "kbkk/graph.hpp"

namespace kbkk {

namespace detail {

inline Complex parse_scalar_pair(const nlohmann::json& j, std::size_t offset, const std::string& where) {
    if (j.is_number()) {
        if (offset != 0) throw ParseError("expected an array", where);
        return {j.get<double>(), 0.0};
    }
    if (!j.is_array() || j.size() < offset + 1 || j.size() > offset + 2)
        throw ParseError("expected [re] or [re, im]", where);
    for (std::size_t k = offset; k < j.size(); ++k)
        if (!j[k].is_number()) throw ParseError("expected a number", where + "[" + std::to_string(k) + "]");
    return {j[offset].get<double>(), j.size() == offset + 2 ? j[offset + 1].get<double>() : 0.0};
}

inline nlohmann::json scalar_json(Complex z) {
    auto a = nlohmann::json::array({z.real()});
    if (z.imag() != 0.0) a.push_back(z.imag());
    return a;
}

}  // namespace detail

inline KuramotoInstance instance_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("instance must be a JSON object", "$");
    if (!doc.contains("n") || !doc["n"].is_number_integer()) throw ParseError("missing integer field", "n");
    const auto n_signed = doc["n"].get<long long>();
    if (n_signed < 2) throw ParseError("n must be at least 2", "n");
    const auto n = static_cast<std::size_t>(n_signed);

    KuramotoInstance inst{WeightedGraph(n), {}};
    std::map<std::pair<std::size_t, std::size_t>, Complex> listed;

    if (doc.contains("edges")) {
        const auto& edges = doc["edges"];
        if (!edges.is_array()) throw ParseError("expected an array", "edges");
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const std::string where = "edges[" + std::to_string(k) + "]";
            const auto& e = edges[k];
            if (!e.is_array() || e.size() < 3 || e.size() > 4) throw ParseError("expected [i, j, re, im]", where);
            if (!e[0].is_number_integer() || !e[1].is_number_integer())
                throw ParseError("node labels must be integers", where);
            const auto i = e[0].get<long long>(), j = e[1].get<long long>();
            if (i < 1 || j < 1 || i > n_signed || j > n_signed)
                throw ParseError("node label out of range 1.." + std::to_string(n), where);
            const Complex w = detail::parse_scalar_pair(e, 2, where);
            if (i == j && w != Complex{}) throw ParseError("nonzero diagonal weight", where);
            listed[{static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)}] = w;
        }
    }
    for (const auto& [ij, w] : listed) {
        const auto [i, j] = ij;
        if (i == j) continue;
        inst.graph.set(i, j, w);
        if (!listed.contains({j, i})) inst.graph.set(j, i, w);
    }

    if (!doc.contains("omega") || !doc["omega"].is_array()) throw ParseError("missing array field", "omega");
    const auto& om = doc["omega"];
    if (om.size() != n)
        throw ParseError("dimension mismatch: omega has " + std::to_string(om.size()) + " entries, n = " +
                             std::to_string(n),
                         "omega");
    for (std::size_t k = 0; k < n; ++k)
        inst.omega.push_back(detail::parse_scalar_pair(om[k], 0, "omega[" + std::to_string(k) + "]"));
    return inst;
}

inline KuramotoInstance load_instance(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), "byte " + std::to_string(e.byte));
    }
    return instance_from_json(doc);
}

inline KuramotoInstance load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance file", path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_instance(ss.str());
}

inline nlohmann::json instance_to_json(const KuramotoInstance& inst, const nlohmann::json& meta = {}) {
    inst.validate();
    const std::size_t n = inst.size();
    nlohmann::json doc;
    doc["n"] = n;
    auto edges = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!inst.graph.adjacent(i, j)) continue;
            const Complex w = inst.graph(i, j);
            auto e = nlohmann::json::array({i + 1, j + 1, w.real()});
            if (w.imag() != 0.0) e.push_back(w.imag());
            edges.push_back(e);
            const Complex back = inst.graph(j, i);
            if (back != w) {
                auto r = nlohmann::json::array({j + 1, i + 1, back.real()});
                if (back.imag() != 0.0) r.push_back(back.imag());
                edges.push_back(r);
            }
        }
    }
    doc["edges"] = edges;
    auto om = nlohmann::json::array();
    for (const auto& w : inst.omega) om.push_back(detail::scalar_json(w));
    doc["omega"] = om;
    if (!meta.is_null()) doc["meta"] = meta;
    return doc;
}

inline std::string save_instance(const KuramotoInstance& inst, const nlohmann::json& meta = {}) {
    return instance_to_json(inst, meta).dump() + "\n";
}

}  // namespace kbkk
