#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "polyuniq/polyuniq.hpp"

using namespace polyuniq;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_non_unique = 1;
constexpr int exit_error = 2;

struct Config
{
    std::string matrix;
    std::string weights;
    std::string norm = "l1";
    std::string lambda = "1";
    std::string mode = "pen";
    std::string response;
    std::string route = "both";
    std::string plot_kind = "dual";
    std::string out;
    std::string format = "json";
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    std::size_t cap = 0;
    std::size_t dim = 0;
    std::size_t rows = 2;
    std::size_t max_iter = 20000;
    double tol = 1e-9;
    bool no_restart = false;
    bool timing = false;
};

struct CliError : std::runtime_error
{
    CliError(std::string kind, const std::string& what) : std::runtime_error(what), kind(std::move(kind)) {}
    std::string kind;
};

Caps caps_for(const Config& cfg)
{
    Caps caps = Caps::from_env();
    if (cfg.cap) {
        caps.slope_dim = cfg.cap;
        caps.cube_dim = cfg.cap;
    }
    return caps;
}

RationalMatrix load(const Config& cfg)
{
    if (cfg.matrix.empty()) throw CliError("usage", "--matrix is required");
    return load_matrix(cfg.matrix);
}

/** Norm from --norm/--weights/--lambda. A lambda given with slope multiplies the weights. */
PolytopeNorm make_norm(const Config& cfg, std::size_t p)
{
    const Rational lambda = parse_rational(cfg.lambda);
    if (lambda <= 0) throw CliError("usage", "--lambda must be positive");
    if (cfg.norm == "l1") return PolytopeNorm::l1(p, lambda);
    if (cfg.norm == "sup") return PolytopeNorm::sup(p, lambda);
    if (cfg.norm == "slope") {
        if (cfg.weights.empty()) throw CliError("usage", "--weights is required for the slope norm");
        Vec<Rational> w = parse_rational_list(cfg.weights);
        if (w.size() != p)
            throw CliError("usage", "--weights has " + std::to_string(w.size()) + " entries, matrix has " +
                                        std::to_string(p) + " columns");
        for (auto& v : w) v *= lambda;
        return PolytopeNorm::slope(w);
    }
    throw CliError("usage", "unknown norm '" + cfg.norm + "'");
}

Vec<Rational> load_response(const Config& cfg, std::size_t n)
{
    if (cfg.response.empty()) throw CliError("usage", "--response is required");
    Vec<Rational> y = parse_rational_list(cfg.response);
    if (y.size() != n)
        throw CliError("usage", "--response has " + std::to_string(y.size()) + " entries, matrix has " + std::to_string(n) + " rows");
    return y;
}

SolverOptions solver_options(const Config& cfg)
{
    SolverOptions o;
    o.max_iter = cfg.max_iter;
    o.tol = cfg.tol;
    o.restart = !cfg.no_restart;
    return o;
}

void emit(const Config& cfg, const std::string& text)
{
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw CliError("io", "cannot write '" + cfg.out + "'");
    f << text;
}

ordered_json envelope(const std::string& command, const Config& cfg)
{
    ordered_json j;
    j["command"] = command;
    ordered_json inputs;
    if (!cfg.matrix.empty()) inputs["matrix"] = json_matrix(load(cfg));
    j["inputs"] = inputs;
    return j;
}

int cmd_uniqueness(const Config& cfg, ordered_json& rep)
{
    RationalMatrix x = load(cfg);
    const Caps caps = caps_for(cfg);
    if (cfg.mode == "bp") {
        if (x.cols() > caps.cube_dim)
            throw CapExceeded("p = " + std::to_string(x.cols()) + " exceeds the cube enumeration cap " + std::to_string(caps.cube_dim));
        auto r = check_uniqueness_bp(x, caps);
        rep["inputs"]["mode"] = "bp";
        rep["result"] = report_to_json(r);
        return r.unique_for_all_y ? exit_ok : exit_non_unique;
    }
    PolytopeNorm n = make_norm(cfg, x.cols());
    rep["inputs"]["mode"] = "pen";
    rep["inputs"]["norm"] = norm_to_json(n);
    auto r = check_uniqueness(x, n, caps);
    rep["result"] = report_to_json(r);
    return r.unique_for_all_y ? exit_ok : exit_non_unique;
}

Route parse_route(const std::string& s)
{
    if (s == "geometric") return Route::geometric;
    if (s == "analytic") return Route::analytic;
    if (s == "both") return Route::both;
    throw CliError("usage", "unknown route '" + s + "'");
}

int cmd_accessible(const Config& cfg, ordered_json& rep)
{
    RationalMatrix x = load(cfg);
    const Caps caps = caps_for(cfg);
    std::vector<AccessibilityReport> list;
    if (cfg.norm == "slope") {
        PolytopeNorm n = make_norm(cfg, x.cols());
        rep["inputs"]["norm"] = norm_to_json(n);
        list = accessible_slope_models(x, n.weights, parse_route(cfg.route), caps);
    } else if (cfg.norm == "l1" || cfg.mode == "bp") {
        const Rational lambda = parse_rational(cfg.lambda);
        rep["inputs"]["norm"] = norm_to_json(PolytopeNorm::l1(x.cols(), lambda));
        list = accessible_sign_vectors(x, parse_route(cfg.route), lambda, caps);
    } else {
        throw CliError("usage", "accessible supports --norm l1 (sign vectors, LASSO and basis pursuit) or --norm slope");
    }
    rep["inputs"]["route"] = cfg.route;
    ordered_json items = ordered_json::array();
    std::size_t count = 0;
    for (const auto& r : list) {
        count += r.accessible ? 1 : 0;
        items.push_back(report_to_json(r));
    }
    rep["result"]["accessible_count"] = count;
    rep["result"]["pattern_count"] = list.size();
    rep["result"]["patterns"] = items;
    return exit_ok;
}

ordered_json solution_json(const Solution<Rational>& s)
{
    ordered_json j;
    j["point"] = json_vec(s.point);
    j["objective"] = to_string(s.objective);
    j["route"] = route_name(s.route);
    j["certified"] = s.certified;
    j["exact"] = s.polished;
    j["iterations"] = s.iterations;
    j["certificate"] = s.certificate ? certificate_to_json(*s.certificate) : ordered_json(nullptr);
    return j;
}

int cmd_solve(const Config& cfg, ordered_json& rep)
{
    RationalMatrix x = load(cfg);
    Vec<Rational> y = load_response(cfg, x.rows());
    rep["inputs"]["response"] = json_vec(y);
    if (cfg.mode == "bp") {
        rep["inputs"]["mode"] = "bp";
        BpSolution s = solve_bp(x, y);
        ordered_json j;
        j["point"] = json_vec(s.point);
        j["l1_value"] = to_string(s.value);
        j["route"] = "lp";
        j["certified"] = s.certified;
        j["dual"] = s.dual ? json_vec(*s.dual) : ordered_json(nullptr);
        j["sign_vector"] = sign_vector(s.point);
        rep["result"] = j;
        return exit_ok;
    }
    PolytopeNorm n = make_norm(cfg, x.cols());
    rep["inputs"]["mode"] = "pen";
    rep["inputs"]["norm"] = norm_to_json(n);
    Solution<Rational> s = solve_penalized_exact(x, y, n, solver_options(cfg));
    if (!s.certified) {
        Solution<double> f = solve_penalized(to_double(x), to_double(y), n, solver_options(cfg));
        ordered_json j;
        j["point"] = f.point;
        j["objective"] = f.objective;
        j["route"] = route_name(f.route);
        j["certified"] = f.certified;
        j["exact"] = false;
        j["iterations"] = f.iterations;
        j["certificate"] = f.certificate ? certificate_to_json(*f.certificate) : ordered_json(nullptr);
        rep["result"] = j;
        if (!f.certified) {
            rep["error"] = {{"kind", "uncertified"}, {"message", "iteration cap reached before certification"}};
            return exit_error;
        }
        return exit_ok;
    }
    ordered_json j = solution_json(s);
    j["model"] = mdl(s.point);
    j["residual"] = json_vec(y - x * s.point);
    rep["result"] = j;
    return exit_ok;
}

int cmd_decompose(const Config& cfg, ordered_json& rep)
{
    RationalMatrix x = load(cfg);
    Vec<Rational> y = load_response(cfg, x.rows());
    rep["inputs"]["response"] = json_vec(y);
    PolytopeNorm n = make_norm(cfg, x.cols());
    rep["inputs"]["norm"] = norm_to_json(n);
    ordered_json j;
    if (n.kind == PolytopeNorm::Kind::slope && n.strict_weights()) {
        auto c = classify_response(x, n.weights, y, solver_options(cfg), caps_for(cfg));
        j["model"] = c.model;
        j["beta"] = json_vec(c.beta);
        j["residual"] = json_vec(c.residual);
        j["fitted"] = json_vec(x * c.beta);
        j["dual_point"] = json_vec(transpose_times(x, c.residual));
        j["face"] = face_to_json(c.face);
        j["ambiguous"] = c.ambiguous;
        j["solution"] = solution_json(c.solution);
    } else {
        auto np = null_set_projection(x, n, y, solver_options(cfg));
        j["beta"] = json_vec(np.beta);
        j["residual"] = json_vec(np.residual);
        j["fitted"] = json_vec(x * np.beta);
        j["exact"] = np.exact;
        j["pattern"] = n.kind == PolytopeNorm::Kind::l1 ? sign_vector(np.beta) : mdl(np.beta);
    }
    rep["result"] = j;
    return exit_ok;
}

int cmd_models(const Config& cfg, ordered_json& rep)
{
    std::size_t p = cfg.dim;
    std::optional<Vec<Rational>> w;
    if (!cfg.weights.empty()) {
        w = parse_rational_list(cfg.weights);
        if (p == 0) p = w->size();
        if (w->size() != p) throw CliError("usage", "--weights length does not match --dim");
    }
    if (p == 0) throw CliError("usage", "--dim or --weights is required");
    Caps caps = caps_for(cfg);
    auto models = enumerate_models(p, caps.slope_dim);
    rep["inputs"]["dim"] = p;
    if (w) rep["inputs"]["weights"] = json_vec(*w);
    ordered_json items = ordered_json::array();
    for (const auto& m : models) {
        ordered_json j;
        j["model"] = m;
        j["level"] = sup_level(m);
        if (w) j["face"] = face_to_json(model_to_face(m, *w), true);
        items.push_back(j);
    }
    rep["result"]["count"] = models.size();
    rep["result"]["models"] = items;
    return exit_ok;
}

int cmd_genericity(const Config& cfg, ordered_json& rep, std::string& csv)
{
    if (cfg.dim == 0) throw CliError("usage", "--dim (number of columns p) is required");
    std::optional<PolytopeNorm> n;
    if (cfg.mode != "bp") n = make_norm(cfg, cfg.dim);
    const Caps caps = caps_for(cfg);
    auto res = genericity_experiment(cfg.rows, cfg.dim, n, cfg.trials, cfg.seed, caps);
    rep["inputs"]["rows"] = cfg.rows;
    rep["inputs"]["dim"] = cfg.dim;
    rep["inputs"]["mode"] = cfg.mode;
    if (n) rep["inputs"]["norm"] = norm_to_json(*n);
    rep["inputs"]["trials"] = cfg.trials;
    rep["inputs"]["seed"] = cfg.seed;
    rep["result"]["unique_count"] = res.unique_count;
    rep["result"]["fraction"] = res.fraction;
    ordered_json rows = ordered_json::array();
    std::ostringstream c;
    c << "trial,unique,rank,faces_checked\n";
    for (const auto& t : res.trials) {
        rows.push_back({{"trial", t.index}, {"unique", t.unique}, {"rank", t.rank}, {"faces_checked", t.faces_checked}});
        c << t.index << "," << (t.unique ? 1 : 0) << "," << t.rank << "," << t.faces_checked << "\n";
    }
    rep["result"]["trials"] = rows;
    csv = c.str();
    return exit_ok;
}

std::string cmd_plot(const Config& cfg)
{
    if (cfg.plot_kind == "dual") {
        std::optional<RationalMatrix> x;
        std::size_t p = 2;
        if (!cfg.matrix.empty()) {
            x = load(cfg);
            p = x->cols();
        }
        if (p != 2) throw UnsupportedDimension("dual-ball plots need p = 2");
        PolytopeNorm n = make_norm(cfg, p);
        return dual_ball_svg(n, x ? &*x : nullptr);
    }
    if (cfg.plot_kind == "null") {
        RationalMatrix x = load(cfg);
        PolytopeNorm n = make_norm(cfg, x.cols());
        if (cfg.response.empty()) return null_polytope_svg(x, n);
        Vec<Rational> y = load_response(cfg, x.rows());
        auto np = null_set_projection(x, n, y, solver_options(cfg));
        return null_polytope_svg(x, n, &y, &np.residual);
    }
    throw CliError("usage", "unknown plot kind '" + cfg.plot_kind + "'");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact uniqueness and accessibility analysis for polytope-norm penalized least squares"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI/TOML file");
    Config cfg;

    auto add_common = [&](CLI::App* sc) {
        sc->add_option("--matrix", cfg.matrix, "Matrix file (CSV of decimal or p/q literals, or JSON)");
        sc->add_option("--weights", cfg.weights, "SLOPE weights, comma separated");
        sc->add_option("--norm", cfg.norm, "Penalty norm")->check(CLI::IsMember({"l1", "sup", "slope"}));
        sc->add_option("--lambda", cfg.lambda, "Tuning parameter multiplying the norm");
        sc->add_option("--mode", cfg.mode, "Penalized least squares or basis pursuit")->check(CLI::IsMember({"pen", "bp"}));
        sc->add_option("--cap", cfg.cap, "Enumeration cap on p")->check(CLI::PositiveNumber);
        sc->add_option("--out", cfg.out, "Output path (default stdout)");
        sc->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv", "svg"}));
        sc->add_flag("--timing", cfg.timing, "Include elapsed time in the report");
    };
    auto add_solver = [&](CLI::App* sc) {
        sc->add_option("--response", cfg.response, "Response vector y, comma separated");
        sc->add_option("--max-iter", cfg.max_iter, "Iteration cap for the first-order solver");
        sc->add_option("--tol", cfg.tol, "Certification tolerance for floating-point solutions");
        sc->add_flag("--no-restart", cfg.no_restart, "Disable function-value restarts");
    };

    auto* uniq = app.add_subcommand("uniqueness", "Decide uniqueness of the minimizer for all responses");
    add_common(uniq);
    auto* acc = app.add_subcommand("accessible", "List accessible sign vectors or SLOPE models");
    add_common(acc);
    acc->add_option("--route", cfg.route, "Decision route")->check(CLI::IsMember({"geometric", "analytic", "both"}));
    auto* solve = app.add_subcommand("solve", "Solve at a response and certify");
    add_common(solve);
    add_solver(solve);
    auto* dec = app.add_subcommand("decompose", "Split a response into fitted part and null-set projection");
    add_common(dec);
    add_solver(dec);
    auto* models = app.add_subcommand("models", "Enumerate SLOPE models (and their faces)");
    add_common(models);
    models->add_option("--dim", cfg.dim, "Dimension p");
    auto* gen = app.add_subcommand("genericity", "Monte Carlo uniqueness fraction over Gaussian designs");
    add_common(gen);
    gen->add_option("--dim", cfg.dim, "Number of columns p");
    gen->add_option("--rows", cfg.rows, "Number of rows n");
    gen->add_option("--trials", cfg.trials, "Number of trials")->check(CLI::PositiveNumber);
    gen->add_option("--seed", cfg.seed, "Random seed");
    auto* plot = app.add_subcommand("plot", "SVG of a 2-D dual ball or null polytope");
    add_common(plot);
    add_solver(plot);
    plot->add_option("--kind", cfg.plot_kind, "Plot type")->check(CLI::IsMember({"dual", "null"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_error;
    }

    CLI::App* sc = app.get_subcommands().front();
    const std::string name = sc->get_name();
    const auto start = std::chrono::steady_clock::now();
    ordered_json rep;
    int code = exit_ok;
    try {
        if (name == "plot") {
            emit(cfg, cmd_plot(cfg));
            return exit_ok;
        }
        rep = envelope(name, cfg);
        std::string csv;
        if (name == "uniqueness") code = cmd_uniqueness(cfg, rep);
        else if (name == "accessible") code = cmd_accessible(cfg, rep);
        else if (name == "solve") code = cmd_solve(cfg, rep);
        else if (name == "decompose") code = cmd_decompose(cfg, rep);
        else if (name == "models") code = cmd_models(cfg, rep);
        else if (name == "genericity") code = cmd_genericity(cfg, rep, csv);

        if (cfg.format == "csv") {
            if (name != "genericity") throw CliError("usage", "CSV output is only available for genericity");
            emit(cfg, csv);
            return code;
        }
        if (cfg.format == "svg") throw CliError("usage", "SVG output is only available for plot");
        if (cfg.timing)
            rep["timing_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        emit(cfg, rep.dump(2) + "\n");
        return code;
    } catch (const CliError& e) {
        std::cerr << "error (" << e.kind << "): " << e.what() << "\n";
    } catch (const ParseError& e) {
        std::cerr << "error (parse): " << e.what() << "\n";
    } catch (const CapExceeded& e) {
        std::cerr << "error (cap exceeded): " << e.what() << "\n";
    } catch (const InvalidWeights& e) {
        std::cerr << "error (invalid weights): " << e.what() << "\n";
    } catch (const UnsupportedDimension& e) {
        std::cerr << "error (unsupported dimension): " << e.what() << "\n";
    } catch (const NotInColumnSpace& e) {
        std::cerr << "error (inconsistent): " << e.what() << "\n";
    } catch (const UncertifiedSolve& e) {
        std::cerr << "error (uncertified): " << e.what() << "\n";
        ordered_json j;
        j["command"] = name;
        j["error"] = {{"kind", "uncertified"}, {"message", e.what()}};
        j["best_iterate"] = e.best_iterate;
        try {
            emit(cfg, j.dump(2) + "\n");
        } catch (...) {
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return exit_error;
}
