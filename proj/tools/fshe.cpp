// fshe -- configuration-driven experiment runner.
//
// Subcommands:
//   simulate  Monte Carlo moments of the pathwise solver  -> moments.csv
//   scan-xi   Lyapunov slope scan over noise levels        -> phase.csv
//   fit-rho   chaos-term t-scaling fits (fbm time)         -> rho.csv
//   verify    run every identity/estimate check            -> verify.json
//
// Exit codes: 0 success/finding, 2 invalid config, 3 verification failure,
// 4 numerical failure.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "fshe/bounds.hpp"
#include "fshe/config.hpp"
#include "fshe/moments.hpp"
#include "fshe/outputs.hpp"
#include "fshe/parallel.hpp"
#include "fshe/verify.hpp"

namespace {

using namespace fshe;

struct VerificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int run_simulate(const config::ExperimentConfig& cfg, bool emit_plot_data) {
    if (cfg.temporal.kind != covariance::TemporalKind::white)
        throw std::invalid_argument("simulate requires a white-in-time noise config");
    const auto basis = spectral::build_basis(cfg.alpha, cfg.N, cfg.M);
    const auto grid = noise::NoiseGrid::uniform(cfg.dt, cfg.steps(), cfg.M);
    const auto factor = noise::build_space_cov(grid, cfg.spatial);
    const auto u0 = cfg.u0.grid_values(basis);

    moments::McConfig mc;
    mc.p_list = cfg.p_list;
    mc.t_steps = cfg.t_steps();
    mc.x_points = cfg.x_points;
    mc.replicates = cfg.replicates;
    mc.seed = cfg.seed;
    mc.config_hash = cfg.hash();
    mc.threads = cfg.threads;
    const covariance::NoiseSpec spec{cfg.xi, cfg.spatial, cfg.temporal};
    const auto est = moments::mc_moments(basis, spec, factor, cfg.sigma, u0, grid, mc);
    if (!est.usable)
        throw VerificationFailure("all paths diverged; estimate unusable");

    std::filesystem::create_directories(cfg.out_dir);
    outputs::CsvWriter csv(cfg.out_dir + "/moments.csv",
                           "t,x,p,estimate,ci_half,n_diverged,seed,config_hash");
    for (std::size_t ip = 0; ip < est.p_list.size(); ++ip)
        for (std::size_t it = 0; it < est.t_grid.size(); ++it)
            for (std::size_t ix = 0; ix < est.x_points.size(); ++ix)
                csv.row(est.t_grid[it], est.x_points[ix], est.p_list[ip],
                        est.estimates[ip](it, ix), est.ci_half[ip](it, ix),
                        est.n_diverged, (unsigned long long)cfg.seed, mc.config_hash);
    if (emit_plot_data) {
        outputs::CsvWriter plot(cfg.out_dir + "/plot_moment_vs_t.dat", "t,estimate");
        for (std::size_t it = 0; it < est.t_grid.size(); ++it)
            plot.row(est.t_grid[it], est.estimates[0](it, 0));
    }
    return 0;
}

int run_scan_xi(const config::ExperimentConfig& cfg, bool emit_plot_data) {
    if (cfg.sigma.kind != solver::SigmaKind::identity)
        throw std::invalid_argument("scan-xi uses the renewal oracle; sigma must be identity");
    const auto basis = spectral::build_basis(cfg.alpha, cfg.N, cfg.M);
    const auto u0 = cfg.u0.grid_values(basis);
    const double mu1 = basis.eigenvalues[0];
    const double e = 2.0 * cfg.alpha / (cfg.alpha - cfg.spatial.beta);
    const auto& sc = cfg.scan;
    const int n_xi = int(sc.xi_list.size());

    std::vector<moments::LinFit> fits(n_xi);
    parallel_for(n_xi, cfg.threads, [&](std::int64_t i) {
        const double xi = sc.xi_list[i];
        // step size scaled with the expected growth so the left-rectangle
        // bias stays proportional across the scan
        const double rate_est = 1.1 * std::pow(xi, e) + 2.0 * mu1;
        const double dt = std::min(sc.dt_max, 0.08 / rate_est);
        const int K = int(std::ceil(sc.T / dt));
        std::vector<int> snaps;
        for (int k = 0; k <= K; ++k)
            if (k * dt >= sc.window_lo - 1e-12) snaps.push_back(k);
        if (snaps.size() > 120) {
            std::vector<int> thin;
            for (std::size_t s = 0; s < snaps.size(); s += snaps.size() / 100)
                thin.push_back(snaps[s]);
            snaps.swap(thin);
        }
        const auto ren =
            moments::renewal_second_moment(basis, xi, cfg.spatial, u0, dt, snaps);
        std::vector<double> tt, lf;
        for (std::size_t s = 0; s < ren.t_grid.size(); ++s) {
            tt.push_back(ren.t_grid[s]);
            lf.push_back(moments::renewal_log_diag(basis, ren, int(s), sc.x));
        }
        fits[i] = moments::lyapunov_fit(tt, lf, sc.window_lo, sc.window_hi);
    });

    double bracket_lo = std::nan(""), bracket_hi = std::nan("");
    for (int i = 0; i + 1 < n_xi; ++i)
        if (fits[i].slope < 0.0 && fits[i + 1].slope >= 0.0) {
            bracket_lo = sc.xi_list[i];
            bracket_hi = sc.xi_list[i + 1];
            break;
        }

    std::filesystem::create_directories(cfg.out_dir);
    outputs::CsvWriter csv(cfg.out_dir + "/phase.csv",
                           "xi,slope,slope_ci,bracket_lo,bracket_hi,seed,config_hash");
    const std::string hash = cfg.hash();
    for (int i = 0; i < n_xi; ++i)
        csv.row(sc.xi_list[i], fits[i].slope, 1.96 * fits[i].slope_se, bracket_lo,
                bracket_hi, (unsigned long long)cfg.seed, hash);
    if (emit_plot_data) {
        outputs::CsvWriter plot(cfg.out_dir + "/plot_slope_vs_xi_pow.dat",
                                "xi_pow,slope");
        for (int i = 0; i < n_xi; ++i)
            plot.row(std::pow(sc.xi_list[i], e), fits[i].slope);
        // the displayed white-noise bound curves with the growth coefficient
        // fitted from the scan itself
        std::vector<double> xs, ys;
        for (int i = 0; i < n_xi; ++i)
            if (fits[i].slope > 0.0) {
                xs.push_back(std::pow(sc.xi_list[i], e));
                ys.push_back(fits[i].slope);
            }
        if (xs.size() >= 2) {
            const auto affine = moments::linear_fit(xs, ys);
            bounds::BoundParams bp;
            bp.alpha = cfg.alpha;
            bp.beta = cfg.spatial.beta;
            bp.mu1 = mu1;
            bp.p = 2.0;
            bp.xi = sc.xi_list[n_xi - 1];
            bp.c2 = affine.slope;
            bp.C2 = affine.slope;
            const auto curve = bounds::thm1_curve(bp);
            outputs::CsvWriter bc(cfg.out_dir + "/plot_thm1_curve.csv", "t,lower,upper");
            for (int k = 1; k <= 40; ++k) {
                const double t = sc.T * k / 40.0;
                bc.row(t, curve.log_lower(t), curve.log_upper(t));
            }
        }
    }
    return 0;
}

int run_fit_rho(const config::ExperimentConfig& cfg, bool emit_plot_data) {
    if (cfg.sigma.kind != solver::SigmaKind::identity)
        throw std::invalid_argument("fit-rho requires sigma = identity (chaos series)");
    if (cfg.temporal.kind != covariance::TemporalKind::fbm)
        throw std::invalid_argument("fit-rho requires an fbm temporal kernel");
    const auto basis = spectral::build_basis(cfg.alpha, cfg.N, cfg.M);
    const auto u0 = cfg.u0.grid_values(basis);
    const double mu1 = basis.eigenvalues[0];
    const auto& ch = cfg.chaos;
    const int T = int(ch.t_grid.size());
    const double rho_ref =
        bounds::rho_exponent(cfg.alpha, cfg.spatial.beta, cfg.temporal.H);

    // term values: rows n = 1..n_max, columns over the t grid
    std::vector<std::vector<moments::ChaosTerm>> terms(ch.n_max,
                                                       std::vector<moments::ChaosTerm>(T));
    std::vector<double> g2(T, 0.0);
    for (int it = 0; it < T; ++it) {
        moments::ChaosConfig cc;
        cc.n_max = ch.n_max;
        cc.seed = cfg.seed;
        cc.job = std::uint64_t(it);
        cc.threads = cfg.threads;
        cc.lambda_cell = ch.lambda_cell;
        // orders run separately so each gets its own sample budget
        for (int n = 1; n <= ch.n_max; ++n) {
            moments::ChaosConfig one = cc;
            one.n_min = one.n_max = n;
            one.samples = ch.samples[std::min<std::size_t>(n - 1, ch.samples.size() - 1)];
            const auto res = moments::chaos_second_moment_fbm(
                basis, cfg.xi, cfg.spatial, cfg.temporal.H, u0, ch.t_grid[it], ch.x, one);
            if (n == 1) g2[it] = res.g_squared;
            terms[n - 1][it] = res.terms[0];
        }
    }

    std::vector<moments::LinFit> exps(ch.n_max);
    for (int n = 1; n <= ch.n_max; ++n) {
        std::vector<double> lx, ly;
        for (int it = 0; it < T; ++it) {
            lx.push_back(std::log(ch.t_grid[it]));
            ly.push_back(std::log(terms[n - 1][it].value) + 2.0 * mu1 * ch.t_grid[it]);
        }
        exps[n - 1] = moments::linear_fit(lx, ly);
    }

    std::filesystem::create_directories(cfg.out_dir);
    outputs::CsvWriter csv(
        cfg.out_dir + "/rho.csv",
        "n,t,term,mc_error,low_precision,fitted_exponent,rho_reference,seed,config_hash");
    const std::string hash = cfg.hash();
    for (int n = 1; n <= ch.n_max; ++n)
        for (int it = 0; it < T; ++it)
            csv.row(n, ch.t_grid[it], terms[n - 1][it].value, terms[n - 1][it].mc_error,
                    int(terms[n - 1][it].low_precision), exps[n - 1].slope, rho_ref,
                    (unsigned long long)cfg.seed, hash);
    if (emit_plot_data)
        for (int n = 1; n <= ch.n_max; ++n) {
            outputs::CsvWriter plot(
                cfg.out_dir + "/plot_term_scaling_n" + std::to_string(n) + ".dat",
                "log_t,log_term_normalized");
            for (int it = 0; it < T; ++it)
                plot.row(std::log(ch.t_grid[it]),
                         std::log(terms[n - 1][it].value) + 2.0 * mu1 * ch.t_grid[it]);
        }
    return 0;
}

int run_verify(const config::ExperimentConfig& cfg) {
    const auto checks = verify::run_all(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(cfg.out_dir + "/verify.json");
    out << verify::to_json(checks, cfg.hash(), cfg.seed);
    out.close();
    bool all_pass = true;
    for (const auto& c : checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.check << " (margin "
                  << outputs::fmt(c.margin) << ")\n";
        all_pass = all_pass && c.pass;
    }
    if (!all_pass) throw VerificationFailure("one or more verification checks failed");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional stochastic heat equation laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed_override = 0;
    bool has_seed = false;
    std::string out_override;
    bool emit_plot_data = false;

    for (const char* name : {"simulate", "scan-xi", "fit-rho", "verify"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--seed", seed_override, "override the config seed")
            ->each([&](const std::string&) { has_seed = true; });
        sub->add_option("--out", out_override, "override the output directory");
        sub->add_flag("--emit-plot-data", emit_plot_data,
                      "also write gnuplot-ready two-column files");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string cmd = app.get_subcommands().front()->get_name();

    try {
        auto cfg = fshe::config::load_config(config_path);
        if (has_seed) cfg.seed = seed_override;
        if (!out_override.empty()) cfg.out_dir = out_override;
        fshe::config::validate(cfg);
        if (cmd == "simulate") return run_simulate(cfg, emit_plot_data);
        if (cmd == "scan-xi") return run_scan_xi(cfg, emit_plot_data);
        if (cmd == "fit-rho") return run_fit_rho(cfg, emit_plot_data);
        return run_verify(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << nlohmann::json{{"error", "config"}, {"message", e.what()}}.dump()
                  << "\n";
        return 2;
    } catch (const VerificationFailure& e) {
        std::cerr << nlohmann::json{{"error", "verification"}, {"message", e.what()}}.dump()
                  << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", "numerical"}, {"message", e.what()}}.dump()
                  << "\n";
        return 4;
    }
}
