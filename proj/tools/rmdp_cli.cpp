// Command line front end: validate | solve | waterpour | kappa | bench

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmdp/bench.hpp"
#include "rmdp/dispersion.hpp"
#include "rmdp/io.hpp"
#include "rmdp/robust_bellman.hpp"
#include "rmdp/solver.hpp"
#include "rmdp/water_pouring.hpp"

using namespace rmdp;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

std::vector<std::string> split(const std::string& text, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

numvec parse_numbers(const std::string& text) {
    numvec out;
    for (const auto& s : split(text)) {
        std::size_t used = 0;
        const double x = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
        out.push_back(x);
    }
    if (out.empty()) throw std::invalid_argument("empty number list");
    return out;
}

void print_vector(std::ostream& out, const char* name, const numvec& v) {
    out << name << ":";
    for (double x : v) out << ' ' << x;
    out << '\n';
}

int cmd_validate(const std::string& path) {
    const MdpDocument doc = load_mdp_file(path);
    auto problems = validate_mdp(doc.mdp, file_sum_tolerance);
    const auto radii = doc.uncertainty.validate(doc.mdp.num_states, doc.mdp.num_actions);
    problems.insert(problems.end(), radii.begin(), radii.end());
    for (const auto& p : problems) std::cout << "violation: " << p << '\n';
    if (!problems.empty()) return exit_failed;
    for (const auto& w : radii_feasibility_warnings(doc.mdp, doc.uncertainty)) std::cout << w << '\n';
    std::cout << "ok\n";
    return exit_ok;
}

int cmd_solve(const std::string& path, double eps, std::size_t max_sweeps, const std::string& out_path) {
    const MdpDocument doc = load_mdp_file(path);
    auto problems = validate_mdp(doc.mdp, file_sum_tolerance);
    const auto radii = doc.uncertainty.validate(doc.mdp.num_states, doc.mdp.num_actions);
    problems.insert(problems.end(), radii.begin(), radii.end());
    if (!problems.empty()) {
        for (const auto& p : problems) std::cerr << "violation: " << p << '\n';
        return exit_failed;
    }
    SolveConfig cfg;
    cfg.target_eps = eps;
    cfg.max_sweeps = max_sweeps;
    const SolveResult res = solve(doc.mdp, doc.uncertainty, cfg);

    std::optional<PropertyReport> props;
    if (doc.uncertainty.rect == Rect::s) {
        const OperatorOutput op = s_optimal_operator(doc.mdp, doc.uncertainty, res.value);
        props = verify_properties(doc.mdp, doc.uncertainty, res.value, op);
    }
    const std::string report = solve_report(res, doc, props);
    if (out_path.empty() || out_path == "-") {
        std::cout << report;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << report;
    }
    if (!res.converged) {
        std::cerr << "not converged after " << res.sweeps << " sweeps (residual "
                  << res.final_residual << ")\n";
        return exit_failed;
    }
    return exit_ok;
}

int cmd_waterpour(const std::string& b_text, double alpha, const std::string& p_text, double tol) {
    WaterPouringProblem prob{parse_numbers(b_text), alpha, NormParam::parse(p_text)};
    std::sort(prob.b.begin(), prob.b.end(), std::greater<>());
    const WaterPouringResult r = solve_water_pouring(prob, tol);
    std::cout.precision(17);
    std::cout << "zeta: " << r.zeta << '\n' << "chi: " << r.chi << '\n';
    print_vector(std::cout, "weights", r.weights);
    std::cout << "residual: " << r.residual << '\n';
    return exit_ok;
}

int cmd_kappa(const std::string& v_text, const std::string& p_text, double tol) {
    const numvec v = parse_numbers(v_text);
    const NormParam p = NormParam::parse(p_text);
    const bool closed = p.is_inf() || p.is(1.0) || p.is(2.0);
    const DispersionResult d = closed ? dispersion_closed(v, p) : dispersion_search(v, p, tol);
    const DispersionResult pen = kappa_for_penalty(v, p, tol);
    std::cout.precision(17);
    std::cout << "omega: " << d.omega << '\n'
              << "kappa: " << d.kappa << '\n'
              << "iterations: " << d.iterations << '\n'
              << "penalty_index: " << conjugate(p).to_string() << '\n'
              << "penalty_kappa: " << pen.kappa << '\n';
    return exit_ok;
}

int cmd_bench(const std::string& sizes, const std::string& ps, const std::string& rects,
              std::size_t trials, std::uint64_t seed, double eps, double gamma,
              const std::string& out_path, const std::string& ratio_path) {
    BenchConfig cfg;
    for (const auto& item : split(sizes)) {
        const auto x = item.find('x');
        if (x == std::string::npos) throw std::invalid_argument("size must look like 50x10");
        cfg.sizes.emplace_back(std::stoul(item.substr(0, x)), std::stoul(item.substr(x + 1)));
    }
    for (const auto& item : split(ps)) cfg.ps.push_back(NormParam::parse(item));
    for (const auto& item : split(rects)) cfg.rects.push_back(parse_rect(item));
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.eps = eps;
    cfg.gamma = gamma;

    const BenchRun run = run_bench(cfg);
    if (out_path.empty() || out_path == "-") {
        write_bench_csv(std::cout, run.records);
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        write_bench_csv(out, run.records);
    }
    std::string rpath = ratio_path;
    if (rpath.empty() && !out_path.empty() && out_path != "-") rpath = out_path + ".ratios.csv";
    if (!rpath.empty()) {
        std::ofstream out(rpath);
        if (!out) throw std::runtime_error("cannot write " + rpath);
        write_ratio_csv(out, run.ratios);
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust MDP solver for L_p rectangular uncertainty sets"};
    app.require_subcommand(1);

    std::string path, out_path, ratio_path, b_text, v_text, p_text = "2";
    std::string sizes = "50x10,100x20", ps = "1,2,inf", rects = "none,sa,s";
    double eps = 1e-6, alpha = 0.0, tol = 1e-12, gamma = 0.9;
    std::size_t max_sweeps = 100000, trials = 1;
    std::uint64_t seed = 42;

    auto* validate = app.add_subcommand("validate", "check a model file");
    validate->add_option("file", path, "model file")->required();

    auto* solve_cmd = app.add_subcommand("solve", "robust value iteration");
    solve_cmd->add_option("file", path, "model file")->required();
    solve_cmd->add_option("--eps", eps, "target sup-norm error");
    solve_cmd->add_option("--max-sweeps", max_sweeps, "sweep limit");
    solve_cmd->add_option("--out", out_path, "output file (default stdout)");

    auto* pour = app.add_subcommand("waterpour", "solve one water-pouring problem");
    pour->add_option("--b", b_text, "comma separated values")->required();
    pour->add_option("--alpha", alpha, "penalty coefficient");
    pour->add_option("--p", p_text, "norm index or inf");
    pour->add_option("--tol", tol, "bisection tolerance");

    auto* kappa = app.add_subcommand("kappa", "p-mean and p-variance of a vector");
    kappa->add_option("--v", v_text, "comma separated values")->required();
    kappa->add_option("--p", p_text, "norm index or inf");
    kappa->add_option("--tol", tol, "bisection tolerance");

    auto* bench = app.add_subcommand("bench", "time solves on random models");
    bench->add_option("--sizes", sizes, "list of SxA, e.g. 50x10,100x20");
    bench->add_option("--p", ps, "list of norm indices");
    bench->add_option("--rect", rects, "list of none, sa, s");
    bench->add_option("--trials", trials, "instances per size");
    bench->add_option("--seed", seed, "seed of the first instance");
    bench->add_option("--eps", eps, "target sup-norm error");
    bench->add_option("--gamma", gamma, "discount");
    bench->add_option("--out", out_path, "CSV file (default stdout)");
    bench->add_option("--ratios", ratio_path, "ratio CSV (default <out>.ratios.csv)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) return cmd_validate(path);
        if (*solve_cmd) return cmd_solve(path, eps, max_sweeps, out_path);
        if (*pour) return cmd_waterpour(b_text, alpha, p_text, tol);
        if (*kappa) return cmd_kappa(v_text, p_text, tol);
        if (*bench)
            return cmd_bench(sizes, ps, rects, trials, seed, eps, gamma, out_path, ratio_path);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
