#include "fshe/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace fshe::config {

using nlohmann::json;

Eigen::VectorXd U0Spec::grid_values(const spectral::SpectralBasis& b) const {
    Eigen::VectorXd u(b.M);
    if (kind == "constant") {
        u.setConstant(value);
    } else if (kind == "cosine") {
        for (int j = 0; j < b.M; ++j)
            u[j] = value * std::cos(3.14159265358979323846 * b.nodes[j] / 2.0);
    } else {
        throw std::invalid_argument("u0 kind must be 'constant' or 'cosine'");
    }
    return u;
}

namespace {

std::vector<double> geometric(double lo, double hi, int k) {
    std::vector<double> v(k);
    for (int i = 0; i < k; ++i)
        v[i] = lo * std::pow(hi / lo, double(i) / double(k - 1));
    return v;
}

covariance::SpatialKernel parse_spatial(const json& j) {
    const std::string kind = j.value("kind", "riesz");
    if (kind == "white") return covariance::SpatialKernel::make_white(j.value("d", 1));
    if (kind == "riesz")
        return covariance::SpatialKernel::make_riesz(j.value("beta", 0.5), j.value("d", 1));
    if (kind == "bessel")
        return covariance::SpatialKernel::make_bessel(j.value("eta", 1.0), j.value("d", 1));
    if (kind == "fractional")
        return covariance::SpatialKernel::make_fractional(
            j.value("hurst", std::vector<double>{0.75}));
    throw std::invalid_argument("unknown spatial kernel kind: " + kind);
}

covariance::TemporalKernel parse_temporal(const json& j) {
    const std::string kind = j.value("kind", "white");
    if (kind == "white") return covariance::TemporalKernel::make_white();
    if (kind == "fbm") return covariance::TemporalKernel::make_fbm(j.value("H", 0.75));
    throw std::invalid_argument("unknown temporal kernel kind: " + kind);
}

solver::SigmaSpec parse_sigma(const json& j) {
    const std::string kind = j.value("kind", "identity");
    if (kind == "identity") return solver::SigmaSpec::identity();
    if (kind == "linear") return solver::SigmaSpec::linear(j.value("lambda", 1.0));
    if (kind == "sine") return solver::SigmaSpec::sine_perturbed(j.value("lambda", 0.5));
    throw std::invalid_argument("unknown sigma kind: " + kind);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    if (j.contains("operator")) {
        const auto& op = j["operator"];
        c.alpha = op.value("alpha", c.alpha);
        c.N = op.value("N", c.N);
        c.M = op.value("M", c.M);
    }
    if (j.contains("noise")) {
        const auto& nz = j["noise"];
        c.xi = nz.value("xi", c.xi);
        if (nz.contains("spatial")) c.spatial = parse_spatial(nz["spatial"]);
        if (nz.contains("temporal")) c.temporal = parse_temporal(nz["temporal"]);
    }
    if (j.contains("sigma")) c.sigma = parse_sigma(j["sigma"]);
    if (j.contains("u0")) {
        c.u0.kind = j["u0"].value("kind", c.u0.kind);
        c.u0.value = j["u0"].value("value", c.u0.value);
    }
    c.epsilon = j.value("epsilon", c.epsilon);
    if (j.contains("grids")) {
        const auto& g = j["grids"];
        c.dt = g.value("dt", c.dt);
        c.T = g.value("T", c.T);
        c.t_points = g.value("t_points", c.t_points);
        c.x_points = g.value("x_points", c.x_points);
    }
    c.p_list = j.value("p_list", c.p_list);
    c.replicates = j.value("replicates", c.replicates);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.out_dir = j.value("out_dir", c.out_dir);
    if (j.contains("scan")) {
        const auto& s = j["scan"];
        c.scan.xi_list = s.value("xi_list", c.scan.xi_list);
        c.scan.T = s.value("T", c.scan.T);
        c.scan.window_lo = s.value("window_lo", c.scan.window_lo);
        c.scan.window_hi = s.value("window_hi", c.scan.window_hi);
        c.scan.x = s.value("x", c.scan.x);
        c.scan.dt_max = s.value("dt_max", c.scan.dt_max);
    }
    if (j.contains("chaos")) {
        const auto& h = j["chaos"];
        c.chaos.t_grid = h.value("t_grid", c.chaos.t_grid);
        c.chaos.n_max = h.value("n_max", c.chaos.n_max);
        c.chaos.x = h.value("x", c.chaos.x);
        c.chaos.samples = h.value("samples", c.chaos.samples);
        c.chaos.lambda_cell = h.value("lambda_cell", c.chaos.lambda_cell);
    }
    if (c.scan.xi_list.empty()) c.scan.xi_list = geometric(0.05, 8.0, 12);
    if (c.chaos.t_grid.empty()) c.chaos.t_grid = geometric(0.004, 0.032, 8);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

int ExperimentConfig::steps() const {
    const double k = T / dt;
    const int ki = int(std::lround(k));
    if (ki < 1 || std::abs(k - ki) > 1e-9 * std::max(1.0, k))
        throw std::invalid_argument("grids: T must be a positive multiple of dt");
    return ki;
}

std::vector<int> ExperimentConfig::t_steps() const {
    std::vector<int> out;
    for (double t : t_points) {
        const double k = t / dt;
        const int ki = int(std::lround(k));
        if (ki < 0 || std::abs(k - ki) > 1e-9 * std::max(1.0, k))
            throw std::invalid_argument("grids: every t_point must be a multiple of dt");
        out.push_back(ki);
    }
    return out;
}

std::string ExperimentConfig::hash() const {
    // canonical serialization of the hashed fields only
    json j;
    j["operator"] = {{"alpha", alpha}, {"N", N}, {"M", M}};
    json sp;
    switch (spatial.kind) {
        case covariance::SpatialKind::white: sp = {{"kind", "white"}, {"d", spatial.d}}; break;
        case covariance::SpatialKind::riesz:
            sp = {{"kind", "riesz"}, {"beta", spatial.beta}, {"d", spatial.d}};
            break;
        case covariance::SpatialKind::bessel:
            sp = {{"kind", "bessel"}, {"eta", spatial.bessel_eta}, {"d", spatial.d}};
            break;
        case covariance::SpatialKind::fractional:
            sp = {{"kind", "fractional"}, {"hurst", spatial.hurst}};
            break;
    }
    json tp = (temporal.kind == covariance::TemporalKind::white)
                  ? json{{"kind", "white"}}
                  : json{{"kind", "fbm"}, {"H", temporal.H}};
    j["noise"] = {{"xi", xi}, {"spatial", sp}, {"temporal", tp}};
    j["sigma"] = {{"kind", int(sigma.kind)}, {"lambda", sigma.lambda}};
    j["u0"] = {{"kind", u0.kind}, {"value", u0.value}};
    j["epsilon"] = epsilon;
    j["grids"] = {{"dt", dt}, {"T", T}, {"t_points", t_points}, {"x_points", x_points}};
    j["p_list"] = p_list;
    j["replicates"] = replicates;
    j["seed"] = seed;
    j["scan"] = {{"xi_list", scan.xi_list}, {"T", scan.T},
                 {"window", {scan.window_lo, scan.window_hi}}, {"x", scan.x},
                 {"dt_max", scan.dt_max}};
    j["chaos"] = {{"t_grid", chaos.t_grid}, {"n_max", chaos.n_max}, {"x", chaos.x},
                  {"samples", chaos.samples}, {"lambda_cell", chaos.lambda_cell}};
    const std::string s = j.dump();  // nlohmann emits objects with sorted keys
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

void validate(const ExperimentConfig& cfg) {
    if (!(cfg.alpha > 0.0) || cfg.alpha > 2.0)
        throw std::invalid_argument("operator.alpha must lie in (0, 2]");
    if (cfg.N < 1 || cfg.M < 2 * cfg.N)
        throw std::invalid_argument("operator: need N >= 1 and M >= 2N");
    if (cfg.xi < 0.0) throw std::invalid_argument("noise.xi must be >= 0");
    cfg.steps();
    cfg.t_steps();
    const auto dal = covariance::dalang_check(cfg.spatial, cfg.alpha, 1);
    if (!dal.holds)
        throw std::invalid_argument("Dalang condition fails: " + dal.rule);
    const auto basis = spectral::build_basis(cfg.alpha, cfg.N, cfg.M);
    const auto rep = solver::validate_assumptions(basis, cfg.u0.grid_values(basis),
                                                  cfg.epsilon, cfg.sigma);
    if (!rep.ok) {
        std::string msg = "assumption validation failed:";
        for (const auto& f : rep.failures) msg += " " + f + ";";
        throw std::invalid_argument(msg);
    }
}

}  // namespace fshe::config
