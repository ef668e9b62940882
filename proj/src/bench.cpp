#include "rmdp/bench.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include "rmdp/solver.hpp"

namespace rmdp {

Mdp random_mdp(std::size_t S, std::size_t A, double gamma, std::mt19937_64& rng) {
    Mdp m(S, A, gamma);
    std::exponential_distribution<double> expo(1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t a = 0; a < A; ++a) {
            auto row = m.transition(s, a);
            double sum = 0.0;
            for (double& x : row) sum += (x = expo(rng));
            for (double& x : row) x /= sum;
            m.r(s, a) = unit(rng);
        }
    return m;
}

UncertaintySpec bench_uncertainty(Rect rect, NormParam p, std::size_t S, std::size_t A) {
    const double r = 0.1 / double(S);
    return UncertaintySpec::uniform(rect, p, S, A, r, r);
}

namespace {

struct Timing {
    std::size_t sweeps = 0;
    double wall = 0.0;
    double kappa_fraction = 0.0;
};

Timing time_solve(const Mdp& m, const UncertaintySpec& u, const BenchConfig& cfg) {
    SolveConfig sc;
    sc.target_eps = cfg.eps;
    Timing t;
    t.wall = std::numeric_limits<double>::infinity();
    double spent = 0.0;
    for (std::size_t rep = 0; rep < cfg.min_repeats || spent < cfg.min_timing_seconds; ++rep) {
        const SolveResult r = solve(m, u, sc);
        spent += r.total_seconds;
        if (r.total_seconds < t.wall) {
            t.wall = r.total_seconds;
            t.sweeps = r.sweeps;
            t.kappa_fraction = r.total_seconds > 0 ? r.kappa_seconds / r.total_seconds : 0.0;
        }
    }
    return t;
}

} // namespace

BenchRun run_bench(const BenchConfig& cfg) {
    BenchRun run;
    const bool report_none = std::find(cfg.rects.begin(), cfg.rects.end(), Rect::none) != cfg.rects.end();
    for (const auto& [S, A] : cfg.sizes) {
        for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
            std::mt19937_64 rng(cfg.seed + trial);
            const Mdp m = random_mdp(S, A, cfg.gamma, rng);

            const Timing base = time_solve(m, UncertaintySpec::none(), cfg);
            const double base_tps = base.wall / double(base.sweeps);
            if (report_none)
                run.records.push_back({S, A, "none", "none", base.sweeps, base.wall, base_tps,
                                       base.kappa_fraction});

            for (Rect rect : cfg.rects) {
                if (rect == Rect::none) continue;
                for (NormParam p : cfg.ps) {
                    const Timing t = time_solve(m, bench_uncertainty(rect, p, S, A), cfg);
                    const double tps = t.wall / double(t.sweeps);
                    run.records.push_back({S, A, p.to_string(), to_string(rect), t.sweeps, t.wall,
                                           tps, t.kappa_fraction});
                    run.ratios.push_back({S, A, p.to_string(), to_string(rect), trial, tps / base_tps});
                }
            }
        }
    }
    return run;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
    out << "S,A,p,rect,sweeps,wall_time_seconds,time_per_sweep,kappa_time_fraction\n";
    const auto old = out.precision(17);
    for (const auto& r : records)
        out << r.S << ',' << r.A << ',' << r.p << ',' << r.rect << ',' << r.sweeps << ','
            << r.wall_time_seconds << ',' << r.time_per_sweep << ',' << r.kappa_time_fraction << '\n';
    out.precision(old);
}

void write_ratio_csv(std::ostream& out, const std::vector<BenchRatio>& ratios) {
    out << "S,A,p,rect,trial,ratio\n";
    const auto old = out.precision(17);
    for (const auto& r : ratios)
        out << r.S << ',' << r.A << ',' << r.p << ',' << r.rect << ',' << r.trial << ',' << r.ratio
            << '\n';
    out.precision(old);
}

} // namespace rmdp
