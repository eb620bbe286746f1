// kbkk: root-count bounds and homotopy solves for Kuramoto equilibrium systems.
//
//   kbkk gen    --family ring --n 5 --weights const:1 --out ring5.json
//   kbkk bounds --family complete --n-range 3:8
//   kbkk solve  --family complete --n 4 --random-params complex --seed 7
//   kbkk table  --family erdos_renyi --n 5 --samples 10 --rows bkk_exp,generic_count
//
// Exit codes: 0 success / complete certificate, 1 usage error, 2 compute
// error, 3 incomplete certificate. Timings go to stderr only, so stdout and
// --out files are reproducible for a fixed --seed.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kbkk/bounds.hpp"
#include "kbkk/families.hpp"
#include "kbkk/homotopy.hpp"
#include "kbkk/instance_io.hpp"
#include "kbkk/solution_io.hpp"

using namespace kbkk;

namespace {

enum Exit { kOk = 0, kUsage = 1, kCompute = 2, kIncomplete = 3 };

struct InstanceFlags {
    std::string file;
    std::string family;
    std::size_t n = 0;
    std::string n_range;
    std::optional<double> p;
    bool require_connected = false;
    std::string random_params;  // empty: real, except complex for `table`
    std::string default_params = "real";
    std::string weights, omega;

    std::string params() const { return random_params.empty() ? default_params : random_params; }
};

struct Common {
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    bool quiet = false;
};

struct TolFlags {
    TrackerConfig cfg;
    int restarts = SolveOptions{}.restarts;
};

// Every flag also reads KBKK_<NAME> from the environment (--tol-newton -> KBKK_TOL_NEWTON).
std::string env_name(const std::string& flag) {
    std::string s = "KBKK_";
    for (char c : flag.substr(flag.find_first_not_of('-'))) s += c == '-' ? '_' : static_cast<char>(std::toupper(c));
    return s;
}

template <class T>
CLI::Option* flag(CLI::App* app, const std::string& name, T& var, const std::string& help) {
    return app->add_option(name, var, help)->envname(env_name(name));
}

void add_common(CLI::App* app, Common& c, bool with_format = true) {
    flag(app, "--seed", c.seed, "root seed; every random stream is derived from it")->capture_default_str();
    flag(app, "--out", c.out, "output file (default: stdout)");
    if (with_format) flag(app, "--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app->add_flag("--quiet", c.quiet, "no timing report on stderr")->envname("KBKK_QUIET");
}

void add_instance(CLI::App* app, InstanceFlags& f, bool with_range) {
    flag(app, "--file", f.file, "instance file (JSON)");
    flag(app, "--family", f.family, "graph family")
        ->check(CLI::IsMember({"complete", "path", "ring", "erdos_renyi", "er"}));
    flag(app, "--n", f.n, "number of nodes")->check(CLI::PositiveNumber);
    if (with_range) flag(app, "--n-range", f.n_range, "node counts a:b (inclusive)");
    flag(app, "--p", f.p, "edge probability for erdos_renyi (default: drawn from (ln N / N, 1])");
    app->add_flag("--require-connected", f.require_connected, "resample erdos_renyi graphs until connected")
        ->envname("KBKK_REQUIRE_CONNECTED");
    flag(app, "--random-params", f.random_params, "parameter samplers when generating (default: real; complex for table)")
        ->check(CLI::IsMember({"real", "complex"}));
    flag(app, "--weights", f.weights, "coupling sampler: const:re[:im] | uniform:lo:hi | annulus:rmin:rmax | disk");
    flag(app, "--omega", f.omega, "frequency sampler (same syntax as --weights)");
}

void add_tolerances(CLI::App* app, TolFlags& t) {
    auto& c = t.cfg;
    flag(app, "--tol-newton", c.newton_tol, "relative Newton step tolerance")->capture_default_str();
    flag(app, "--tol-residual", c.residual_tol, "endpoint residual tolerance (max-norm)")->capture_default_str();
    flag(app, "--tol-dedup", c.dedup_tol, "distance under which endpoints are identified")->capture_default_str();
    flag(app, "--tol-zero", c.zero_tol, "modulus counted as zero (and its inverse as infinite)")->capture_default_str();
    flag(app, "--tol-singular", c.singular_cond, "condition number marking a singular endpoint")->capture_default_str();
    flag(app, "--tol-landing", c.landing_tol, "relative slack of the final move to t = 1")->capture_default_str();
    flag(app, "--endgame-start", c.endgame_start_t, "t from which the endgame starts")->capture_default_str();
    flag(app, "--max-retries", c.max_retries_per_path, "retries per failed path")->capture_default_str();
    flag(app, "--restarts", t.restarts, "fresh polyhedral solves after an incomplete one")->capture_default_str();
    flag(app, "--threads", c.threads, "worker threads for path tracking")->capture_default_str();
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& s) {
    const auto colon = s.find(':');
    try {
        if (colon == std::string::npos) throw std::invalid_argument("");
        std::size_t used_a = 0, used_b = 0;
        const long a = std::stol(s.substr(0, colon), &used_a);
        const long b = std::stol(s.substr(colon + 1), &used_b);
        if (used_a != colon || used_b != s.size() - colon - 1 || a < 1 || b < a) throw std::invalid_argument("");
        return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
    } catch (const std::exception&) {
        throw std::invalid_argument("--n-range expects a:b with 1 <= a <= b, got '" + s + "'");
    }
}

GenerateOptions generate_options(const InstanceFlags& f, std::size_t n, std::uint64_t seed) {
    if (f.family.empty()) throw std::invalid_argument("give either --file or --family");
    GenerateOptions o;
    o.family = parse_family(f.family);
    o.n = n;
    o.p = f.p;
    o.require_connected = f.require_connected;
    o.kind = parse_param_kind(f.params());
    o.weights = f.weights;
    o.omega = f.omega;
    o.seed = seed;
    if (o.family != Family::ErdosRenyi && (f.p || f.require_connected))
        throw std::invalid_argument("--p and --require-connected apply to erdos_renyi only");
    return o;
}

struct Loaded {
    KuramotoInstance instance;
    nlohmann::json meta;
};

Loaded load_one(const InstanceFlags& f, std::uint64_t seed) {
    if (!f.file.empty()) {
        if (!f.family.empty()) throw std::invalid_argument("--file and --family are mutually exclusive");
        return {load_instance_file(f.file), {{"file", f.file}}};
    }
    if (f.n == 0) throw std::invalid_argument("--family needs --n");
    const auto o = generate_options(f, f.n, seed);
    const auto g = generate_instance(o);
    return {g.instance, g.meta(o)};
}

std::vector<std::size_t> node_counts(const InstanceFlags& f) {
    if (!f.n_range.empty()) {
        if (f.n != 0) throw std::invalid_argument("--n and --n-range are mutually exclusive");
        const auto [a, b] = parse_range(f.n_range);
        std::vector<std::size_t> ns;
        for (std::size_t n = a; n <= b; ++n) ns.push_back(n);
        return ns;
    }
    if (f.n == 0) throw std::invalid_argument("give --n or --n-range");
    return {f.n};
}

void emit(const Common& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(c.out);
    if (!out) throw std::invalid_argument("cannot write '" + c.out + "'");
    out << text;
}

class Stopwatch {
  public:
    explicit Stopwatch(const Common& c) : quiet_(c.quiet) {}
    void report(const std::string& what) const {
        if (quiet_) return;
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        std::fprintf(stderr, "%s: %.3f s\n", what.c_str(), s);
    }

  private:
    bool quiet_;
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------- gen

int cmd_gen(const InstanceFlags& f, const Common& c) {
    Stopwatch sw(c);
    if (!f.file.empty()) throw std::invalid_argument("gen does not read --file");
    const auto inst = load_one(f, c.seed);
    emit(c, save_instance(inst.instance, inst.meta));
    sw.report("gen");
    return kOk;
}

// ---------------------------------------------------------------- bounds

BoundsOptions bounds_options(const std::string& formulation, std::uint64_t seed) {
    BoundsOptions o;
    o.sincos = formulation != "exp";
    o.exp = formulation != "sincos";
    o.seed = seed;
    return o;
}

int cmd_bounds(const InstanceFlags& f, const Common& c, const std::string& formulation) {
    Stopwatch sw(c);
    std::vector<BoundsReport> reports;
    if (!f.file.empty()) {
        if (!f.n_range.empty()) throw std::invalid_argument("--n-range needs --family");
        const auto inst = load_one(f, c.seed);
        reports.push_back(compute_bounds(inst.instance, bounds_options(formulation, c.seed)));
        reports.back().meta = inst.meta;
    } else {
        for (std::size_t n : node_counts(f)) {
            const auto o = generate_options(f, n, c.seed);
            const auto g = generate_instance(o);
            reports.push_back(compute_bounds(g.instance, bounds_options(formulation, c.seed)));
            reports.back().meta = g.meta(o);
            if (!c.quiet)
                std::fprintf(stderr, "n=%zu: sincos %.3f s, exp %.3f s\n", n, reports.back().seconds_sincos,
                             reports.back().seconds_exp);
        }
    }
    std::ostringstream out;
    if (c.format == "csv") {
        out << BoundsReport::csv_header() << '\n';
        for (const auto& r : reports) out << r.csv_row() << '\n';
    } else {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : reports) j.push_back(r.to_json());
        out << (j.size() == 1 ? j[0] : j).dump(2) << '\n';
    }
    emit(c, out.str());
    sw.report("bounds");
    return kOk;
}

// ---------------------------------------------------------------- solve

int cmd_solve(const InstanceFlags& f, const Common& c, const TolFlags& t, const std::string& formulation,
              const std::string& mode, const std::string& csv_path) {
    Stopwatch sw(c);
    const auto inst = load_one(f, c.seed);
    TrackerConfig cfg = t.cfg;
    cfg.rng_seed = derive_seed(c.seed, "solve");
    SolveOptions opt;
    opt.mode = mode == "total-degree" ? SolveMode::TotalDegree : SolveMode::Polyhedral;
    opt.restarts = t.restarts;

    std::vector<std::pair<std::string, PolynomialSystem>> systems;
    if (formulation != "sincos") systems.emplace_back("exp", build_exp_system(inst.instance));
    if (formulation != "exp") systems.emplace_back("sincos", build_sincos_system(inst.instance));

    const bool real = inst.instance.has_real_parameters();
    nlohmann::json doc = nlohmann::json::object();
    std::ostringstream csv;
    csv << solution_csv_header() << '\n';
    bool complete = true;
    for (const auto& [name, sys] : systems) {
        const auto s = solve_system(sys, cfg, opt);
        complete = complete && s.complete;
        nlohmann::json j = solution_set_to_json(s, {{"instance", inst.meta}, {"seed", c.seed}});
        if (real) {
            auto eq = nlohmann::json::array();
            for (const auto& th : real_equilibria(s, inst.instance)) eq.push_back(th);
            j["real_equilibria"] = eq;
        }
        doc[name] = std::move(j);
        csv << solution_csv_row(name, inst.instance.size(), s) << '\n';
        if (!c.quiet)
            std::fprintf(stderr, "%s: %zu distinct nonzero roots of %s paths, %zu on the torus, %.3f s%s\n", name.c_str(),
                         s.counts.distinct_nonzero, to_string(s.root_bound).c_str(), s.counts.torus_count, s.seconds,
                         s.complete ? "" : " (incomplete certificate)");
    }
    const std::string json_text = (systems.size() == 1 ? doc.begin().value() : doc).dump(2) + "\n";
    if (!c.out.empty()) {
        // --out receives the solution file; the summary still goes to stdout.
        emit(c, json_text);
        std::cout << csv.str();
    } else {
        std::cout << (c.format == "json" ? json_text : csv.str());
    }
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw std::invalid_argument("cannot write '" + csv_path + "'");
        out << csv.str();
    }
    sw.report("solve");
    return complete ? kOk : kIncomplete;
}

// ---------------------------------------------------------------- table

struct TableFlags {
    std::vector<std::string> rows{"bezout", "binomial", "bkk_sincos", "bkk_exp", "generic_count"};
    std::size_t samples = 10;
    std::size_t solve_cap = 7;
};

// Cell sentinels: "skipped" (solve above --solve-cap), "error" (computation
// failed), and a trailing '*' on an incomplete certificate (count is a lower bound).
int cmd_table(const InstanceFlags& f, const Common& c, const TolFlags& t, const TableFlags& tf) {
    Stopwatch sw(c);
    if (!f.file.empty()) throw std::invalid_argument("table generates its instances; --file is not accepted");
    if (f.family.empty()) throw std::invalid_argument("table needs --family");
    static const std::vector<std::string> known{"bezout", "binomial", "bkk_sincos", "bkk_exp", "generic_count"};
    for (const auto& r : tf.rows)
        if (std::find(known.begin(), known.end(), r) == known.end())
            throw std::invalid_argument("unknown table row '" + r + "'");
    const bool random_family = parse_family(f.family) == Family::ErdosRenyi;
    if (random_family && tf.samples < 1) throw std::invalid_argument("--samples must be at least 1");

    // Columns: node counts, or sample indices for random graphs (one node count).
    struct Column {
        std::string label;
        std::size_t n;
        std::uint64_t seed;
    };
    std::vector<Column> cols;
    if (random_family) {
        const auto ns = node_counts(f);
        if (ns.size() != 1) throw std::invalid_argument("random-graph tables take a single --n");
        for (std::size_t k = 0; k < tf.samples; ++k)
            cols.push_back({std::to_string(k + 1), ns[0], derive_seed(c.seed, "sample", k)});
    } else {
        for (std::size_t n : node_counts(f)) cols.push_back({std::to_string(n), n, derive_seed(c.seed, "column", n)});
    }
    std::vector<std::string> rows;
    if (random_family) rows = {"p", "edges"};
    for (const auto& r : known)
        if (std::find(tf.rows.begin(), tf.rows.end(), r) != tf.rows.end()) rows.push_back(r);
    auto want = [&](const std::string& r) { return std::find(rows.begin(), rows.end(), r) != rows.end(); };

    std::map<std::string, std::vector<std::string>> cells;
    bool any_error = false, any_incomplete = false;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        const auto& col = cols[k];
        auto fail = [&](const std::string& row, const std::exception& e) {
            cells[row].push_back("error");
            any_error = true;
            std::fprintf(stderr, "column %s, row %s: %s\n", col.label.c_str(), row.c_str(), e.what());
        };
        GeneratedInstance g;
        try {
            g = generate_instance(generate_options(f, col.n, col.seed));
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception& e) {
            for (const auto& r : rows) fail(r, e);
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        if (want("p")) {
            std::ostringstream p;
            p << g.p;
            cells["p"].push_back(p.str());
        }
        if (want("edges")) cells["edges"].push_back(std::to_string(g.instance.graph.edge_count()));
        const auto exp_sys = build_exp_system(g.instance);
        if (want("bezout")) cells["bezout"].push_back(to_string(bezout_bound(exp_sys)));
        if (want("binomial")) cells["binomial"].push_back(to_string(binomial_bound(col.n)));
        for (const auto& [row, sincos] : {std::pair{"bkk_sincos", true}, std::pair{"bkk_exp", false}}) {
            if (!want(row)) continue;
            try {
                const auto sys = sincos ? build_sincos_system(g.instance) : exp_sys;
                cells[row].push_back(to_string(mixed_volume(supports_of(sys), derive_seed(c.seed, "lifting"))));
            } catch (const std::exception& e) {
                fail(row, e);
            }
        }
        if (want("generic_count")) {
            if (col.n > tf.solve_cap) {
                cells["generic_count"].push_back("skipped");
            } else {
                try {
                    TrackerConfig cfg = t.cfg;
                    cfg.rng_seed = derive_seed(c.seed, "solve", k);
                    const auto s = solve_system(exp_sys, cfg, {.restarts = t.restarts});
                    cells["generic_count"].push_back(std::to_string(s.counts.distinct_nonzero) + (s.complete ? "" : "*"));
                    any_incomplete = any_incomplete || !s.complete;
                } catch (const std::exception& e) {
                    fail("generic_count", e);
                }
            }
        }
        if (!c.quiet)
            std::fprintf(stderr, "column %s: %.3f s\n", col.label.c_str(),
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }

    std::ostringstream out;
    if (c.format == "csv") {
        out << (random_family ? "sample" : "n");
        for (const auto& col : cols) out << ',' << col.label;
        out << '\n';
        for (const auto& r : rows) {
            out << r;
            for (const auto& v : cells[r]) out << ',' << v;
            out << '\n';
        }
    } else {
        nlohmann::json j{{"family", family_name(parse_family(f.family))},
                         {"seed", c.seed},
                         {"random_params", f.params()},
                         {"solve_cap", tf.solve_cap}};
        auto labels = nlohmann::json::array();
        for (const auto& col : cols) labels.push_back(col.label);
        j["columns"] = labels;
        j["rows"] = nlohmann::json::object();
        for (const auto& r : rows) j["rows"][r] = cells[r];
        out << j.dump(2) << '\n';
    }
    emit(c, out.str());
    sw.report("table");
    if (any_error) return kCompute;
    return any_incomplete ? kIncomplete : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Root-count bounds and homotopy solves for Kuramoto equilibrium systems"};
    app.require_subcommand(1);

    InstanceFlags inst;
    Common common;
    TolFlags tol;
    std::string formulation = "both";
    std::string mode = "polyhedral";
    std::string csv_path;
    TableFlags table;

    auto* gen = app.add_subcommand("gen", "generate an instance file");
    add_instance(gen, inst, false);
    add_common(gen, common, false);

    auto* bounds = app.add_subcommand("bounds", "Bezout, binomial and BKK bounds");
    add_instance(bounds, inst, true);
    add_common(bounds, common);
    flag(bounds, "--formulation", formulation, "which BKK bounds to compute")
        ->check(CLI::IsMember({"exp", "sincos", "both"}))
        ->capture_default_str();

    auto* solve = app.add_subcommand("solve", "all isolated nonzero roots by homotopy continuation");
    add_instance(solve, inst, false);
    add_common(solve, common);
    add_tolerances(solve, tol);
    std::string solve_formulation = "exp";
    flag(solve, "--formulation", solve_formulation, "system(s) to solve")
        ->check(CLI::IsMember({"exp", "sincos", "both"}))
        ->capture_default_str();
    flag(solve, "--mode", mode, "start system")->check(CLI::IsMember({"polyhedral", "total-degree"}))->capture_default_str();
    flag(solve, "--csv", csv_path, "also write the CSV summary to this file");

    auto* tab = app.add_subcommand("table", "bounds and generic root counts over a family");
    add_instance(tab, inst, true);
    add_common(tab, common);
    add_tolerances(tab, tol);
    flag(tab, "--rows", table.rows, "rows to compute")->delimiter(',')->capture_default_str();
    flag(tab, "--samples", table.samples, "columns of a random-graph table")->capture_default_str();
    flag(tab, "--solve-cap", table.solve_cap, "largest N for which generic_count is solved")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }
    if (tab->parsed()) inst.default_params = "complex";

    try {
        tol.cfg.validate();
        if (gen->parsed()) return cmd_gen(inst, common);
        if (bounds->parsed()) return cmd_bounds(inst, common, formulation);
        if (solve->parsed()) return cmd_solve(inst, common, tol, solve_formulation, mode, csv_path);
        return cmd_table(inst, common, tol, table);
    } catch (const std::invalid_argument& e) {  // also InvalidSize
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kCompute;
    }
}
