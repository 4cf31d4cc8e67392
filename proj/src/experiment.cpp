#include "gsp/experiment.hpp"

#include "gsp/coop_system.hpp"
#include "gsp/linear_solver.hpp"
#include "gsp/semilinear_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace gsp {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        config_error(fmt::format("field '{}' has the wrong type", key));
    }
}

double positive(const json& j, const char* key, double fallback) {
    const double v = get_or<double>(j, key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) config_error(fmt::format("field '{}' must be positive", key));
    return v;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    if (!j.is_object()) config_error(fmt::format("'{}' must be an object", where));
    for (const auto& [k, _] : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) == allowed.end()) {
            config_error(fmt::format("unknown key '{}' in {}", k, where));
        }
    }
}

NonlinearitySpec parse_nonlinearity(const json& j) {
    check_keys(j, {"type", "value", "kappa", "K", "s"}, "nonlinearity");
    NonlinearitySpec s;
    s.type = get_or<std::string>(j, "type", "rational");
    if (s.type == "constant") {
        s.value = positive(j, "value", 1.0);
    } else if (s.type == "rational" || s.type == "exp_decay") {
        s.kappa = get_or<double>(j, "kappa", 1.0);
        s.K = get_or<double>(j, "K", 2.0);
        s.s = get_or<double>(j, "s", 1.0);
        if (!(s.kappa >= 0.0 && s.K > 0.0 && s.kappa <= s.K)) config_error("nonlinearity needs 0 <= kappa <= K, K > 0");
    } else {
        config_error(fmt::format("unknown nonlinearity type '{}'", s.type));
    }
    return s;
}

Nonlinearity build(const NonlinearitySpec& s) {
    if (s.type == "constant") return Nonlinearity::constant(s.value);
    if (s.type == "exp_decay") return Nonlinearity::exp_decay(s.kappa, s.K, s.s);
    return Nonlinearity::rational(s.kappa, s.K);
}

RadialPotential build(const PotentialSpec& s) {
    if (s.type == "exp") return RadialPotential::exponential(s.r0);
    if (s.type == "table") return RadialPotential::from_csv(s.table, s.r0);
    return RadialPotential::power(s.c, s.s, s.r0);
}

std::string fmt17(double v) { return fmt::format("{:.17g}", v); }

} // namespace

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

ExperimentConfig parse_config(const std::string& text, const fs::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        config_error(fmt::format("config is not valid JSON: {}", e.what()));
    }
    check_keys(j,
               {"potential", "space_dim", "grid", "mode", "max_sector", "margin", "forcing", "nonlinearity",
                "nonlinearities", "matrix", "mu", "solver", "solutions", "output_dir", "seed"},
               "config");

    ExperimentConfig cfg;
    cfg.source = text;

    if (!j.contains("potential")) config_error("missing 'potential'");
    const json& pj = j.at("potential");
    check_keys(pj, {"type", "c", "s", "R0", "path"}, "potential");
    cfg.potential.type = get_or<std::string>(pj, "type", "power");
    cfg.potential.r0 = get_or<double>(pj, "R0", 0.0);
    if (cfg.potential.type == "power") {
        cfg.potential.c = get_or<double>(pj, "c", 0.0);
        cfg.potential.s = positive(pj, "s", 2.0);
    } else if (cfg.potential.type == "table") {
        if (!pj.contains("path")) config_error("table potential needs 'path'");
        fs::path p = get_or<std::string>(pj, "path", "");
        cfg.potential.table = p.is_absolute() ? p : base_dir / p;
    } else if (cfg.potential.type != "exp") {
        config_error(fmt::format("unknown potential type '{}'", cfg.potential.type));
    }

    cfg.space_dim = get_or<int>(j, "space_dim", 1);
    if (cfg.space_dim < 1 || cfg.space_dim > 64) config_error("space_dim must be in 1..64");

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, {"points_per_unit", "spectral_scale", "truncation_factor", "r_max", "n"}, "grid");
        cfg.points_per_unit = positive(g, "points_per_unit", cfg.points_per_unit);
        cfg.spectral_scale = positive(g, "spectral_scale", cfg.spectral_scale);
        cfg.truncation_factor = positive(g, "truncation_factor", cfg.truncation_factor);
        if (g.contains("r_max") != g.contains("n")) config_error("grid needs both 'r_max' and 'n' or neither");
        if (g.contains("r_max")) {
            cfg.r_max = positive(g, "r_max", 1.0);
            const int n = get_or<int>(g, "n", 0);
            if (n < 3) config_error("grid 'n' must be at least 3");
            cfg.n = static_cast<std::size_t>(n);
        }
    }

    const std::string mode = get_or<std::string>(j, "mode", "eigen");
    if (mode == "eigen") cfg.mode = Mode::Eigen;
    else if (mode == "linear") cfg.mode = Mode::Linear;
    else if (mode == "semilinear") cfg.mode = Mode::Semilinear;
    else if (mode == "system") cfg.mode = Mode::System;
    else config_error(fmt::format("unknown mode '{}'", mode));

    cfg.max_sector = get_or<int>(j, "max_sector", 8);
    if (cfg.max_sector < 1) config_error("max_sector must be >= 1");
    cfg.margin = get_or<double>(j, "margin", 0.5);
    if (!(cfg.margin > 0.0 && cfg.margin < 1.0)) config_error("margin must lie in (0, 1)");
    cfg.seed = get_or<std::uint64_t>(j, "seed", 42);

    if (j.contains("forcing")) {
        const json& f = j.at("forcing");
        check_keys(f, {"type", "weight"}, "forcing");
        cfg.forcing = get_or<std::string>(f, "type", "groundstate");
        if (cfg.forcing != "groundstate" && cfg.forcing != "groundstate_plus_second") {
            config_error(fmt::format("unknown forcing '{}'", cfg.forcing));
        }
        cfg.forcing_weight = get_or<double>(f, "weight", 0.5);
    }

    if (j.contains("nonlinearity")) cfg.nonlinearities.push_back(parse_nonlinearity(j.at("nonlinearity")));
    if (j.contains("nonlinearities")) {
        const json& arr = j.at("nonlinearities");
        if (!arr.is_array()) config_error("'nonlinearities' must be an array");
        for (const auto& e : arr) cfg.nonlinearities.push_back(parse_nonlinearity(e));
    }
    if (cfg.mode == Mode::Semilinear && cfg.nonlinearities.size() != 1) {
        config_error("semilinear mode needs exactly one nonlinearity");
    }
    if (cfg.mode == Mode::System) {
        if (cfg.nonlinearities.size() == 1) cfg.nonlinearities.push_back(cfg.nonlinearities.front());
        if (cfg.nonlinearities.size() != 2) config_error("system mode needs two nonlinearities");
        if (!j.contains("matrix")) config_error("system mode needs 'matrix'");
        const json& m = j.at("matrix");
        check_keys(m, {"a", "b", "c", "d"}, "matrix");
        for (const char* k : {"a", "b", "c", "d"}) {
            if (!m.contains(k)) config_error(fmt::format("matrix is missing '{}'", k));
        }
        cfg.a = get_or<double>(m, "a", 0.0);
        cfg.b = get_or<double>(m, "b", 0.0);
        cfg.c = get_or<double>(m, "c", 0.0);
        cfg.d = get_or<double>(m, "d", 0.0);
    }

    if (cfg.mode != Mode::Eigen) {
        if (!j.contains("mu")) config_error("missing 'mu'");
        const json& mu = j.at("mu");
        check_keys(mu, {"offsets", "sweep"}, "mu");
        if (mu.contains("offsets")) cfg.offsets = get_or<std::vector<double>>(mu, "offsets", {});
        if (mu.contains("sweep")) {
            const json& s = mu.at("sweep");
            check_keys(s, {"from_offset", "to_offset", "steps"}, "sweep");
            const double from = get_or<double>(s, "from_offset", 0.0);
            const double to = get_or<double>(s, "to_offset", 0.0);
            const int steps = get_or<int>(s, "steps", 0);
            if (steps < 1) config_error("sweep steps must be >= 1");
            for (int k = 0; k < steps; ++k) {
                cfg.offsets.push_back(steps == 1 ? from : from + (to - from) * k / (steps - 1));
            }
        }
        if (cfg.offsets.empty()) config_error("no mu values requested");
        for (double o : cfg.offsets) {
            if (!std::isfinite(o) || std::abs(o) < 1e-14) config_error("mu offsets must be finite and nonzero");
        }
        std::sort(cfg.offsets.begin(), cfg.offsets.end());
        cfg.offsets.erase(std::unique(cfg.offsets.begin(), cfg.offsets.end()), cfg.offsets.end());
    }

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        check_keys(s, {"damping", "max_iter", "tol_x"}, "solver");
        cfg.damping = get_or<double>(s, "damping", cfg.damping);
        if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) config_error("damping must lie in (0, 1]");
        cfg.max_iter = get_or<int>(s, "max_iter", cfg.max_iter);
        if (cfg.max_iter < 1) config_error("max_iter must be >= 1");
        cfg.tol_x = positive(s, "tol_x", cfg.tol_x);
    }

    if (j.contains("solutions")) {
        const json& s = j.at("solutions");
        if (s.is_boolean()) cfg.all_solutions = s.get<bool>();
        else if (s.is_array()) cfg.solution_offsets = get_or<std::vector<double>>(j, "solutions", {});
        else config_error("'solutions' must be a boolean or a list of offsets");
    }
    if (j.contains("output_dir")) cfg.output_dir = get_or<std::string>(j, "output_dir", "gsp_out");
    return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) config_error(fmt::format("cannot read config '{}'", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::MalformedInput:
    case ErrorKind::InvalidArgument:
    case ErrorKind::NotCooperative:
    case ErrorKind::NonPositivePotential:
    case ErrorKind::NotIncreasing:
    case ErrorKind::HypothesisViolated:
        return 2;
    case ErrorKind::WindowViolation:
    case ErrorKind::BracketEscape:
    case ErrorKind::RectangleEscape:
        return 4;
    default:
        return 3;
    }
}

namespace {

struct Row {
    double mu = 0.0;
    double offset = 0.0;
    std::string branch;
    double u1 = 0.0;
    double min_ratio = 0.0, max_ratio = 0.0;
    double min_ratio_2 = std::numeric_limits<double>::quiet_NaN();
    double max_ratio_2 = std::numeric_limits<double>::quiet_NaN();
    double x_norm = 0.0;
    double lower = std::numeric_limits<double>::quiet_NaN();
    double upper = std::numeric_limits<double>::quiet_NaN();
    double gs_bound = std::numeric_limits<double>::quiet_NaN();
    double xnorm_bound = std::numeric_limits<double>::quiet_NaN();
    bool in_window = false;
    bool certified = false;
    bool requested = false; // a certificate was asked for at this mu
    int iterations = 0;
    double uniqueness_gap = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> u, u2; // kept for solution files
};

struct PointResult {
    std::optional<Row> row;
    std::optional<Error> error;
};

bool flagged(const ExperimentConfig& cfg, double offset) {
    if (cfg.all_solutions) return true;
    return std::any_of(cfg.solution_offsets.begin(), cfg.solution_offsets.end(),
                       [&](double o) { return std::abs(o - offset) <= 1e-12 * std::max(1.0, std::abs(o)); });
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::ConfigError, fmt::format("cannot write '{}'", path.string()));
    out << text;
}

} // namespace

RunOutcome run_experiment(ExperimentConfig cfg, const RunOverrides& ov) {
    const auto t0 = std::chrono::steady_clock::now();
    if (ov.points_per_unit) {
        if (!(*ov.points_per_unit > 0.0)) throw Error(ErrorKind::ConfigError, "--grid-scale must be positive");
        cfg.points_per_unit = *ov.points_per_unit;
        if (cfg.r_max) cfg.n = static_cast<std::size_t>(std::ceil(*ov.points_per_unit * *cfg.r_max));
    }
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.output_dir) cfg.output_dir = *ov.output_dir;
    const std::string hash =
        fnv1a_hex(cfg.source + fmt::format("|ppu={:.17g}|seed={}", cfg.points_per_unit, cfg.seed));

    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw Error(ErrorKind::ConfigError, fmt::format("cannot create '{}'", cfg.output_dir.string()));

    const RadialPotential pot = build(cfg.potential);
    GridOptions gopt;
    gopt.truncation_factor = cfg.truncation_factor;
    const Grid grid = cfg.r_max ? Grid(cfg.space_dim, *cfg.r_max, *cfg.n)
                                : build_grid(pot, cfg.space_dim, cfg.spectral_scale, cfg.points_per_unit, gopt);
    const SpectrumSummary spec = compute_spectrum(grid, pot, cfg.max_sector);
    const DiscreteOperator op = assemble(grid, pot, 0);
    const WindowEstimate win = estimate_c0_delta0(spec, op, cfg.margin);
    const double probe = probe_resolvent_bound(op, spec.phi, spec.Lambda - 0.5 * win.delta0, cfg.seed);

    std::optional<ClassPReport> classp;
    try {
        classp = validate_class_P(pot, std::max(16.0 * grid.r_max(), 4.0 * pot.r0() + 1.0), 0.1);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::InvalidArgument) throw;
    }

    std::vector<Nonlinearity> nls;
    for (const auto& s : cfg.nonlinearities) nls.push_back(build(s));
    std::optional<CoopMatrix> A;
    if (cfg.mode == Mode::System) A = analyze_matrix(cfg.a, cfg.b, cfg.c, cfg.d);

    ojson sj;
    sj["config_hash"] = hash;
    sj["seed"] = cfg.seed;
    sj["potential"] = pot.name();
    sj["space_dim"] = cfg.space_dim;
    sj["r_max"] = grid.r_max();
    sj["n"] = grid.size();
    sj["h"] = grid.h();
    sj["truncation_adequate"] = truncation_adequate(grid, pot, spec.lambda2, cfg.truncation_factor);
    sj["Lambda"] = spec.Lambda;
    sj["lambda2"] = spec.lambda2;
    sj["lambda2_sector"] = spec.lambda2_sector;
    sj["max_sector"] = spec.max_sector;
    sj["sector_minima"] = spec.sector_minima;
    sj["radial_eigenvalues"] = spec.radial_eigs;
    sj["eigen_residual"] = spec.eigen_residual;
    sj["delta0"] = win.delta0;
    sj["c0"] = win.c0;
    sj["c0_floor"] = win.c0_floor;
    sj["c0_probe"] = probe;
    sj["margin"] = cfg.margin;
    if (classp) {
        sj["class_p"] = {{"pass", classp->pass}, {"r_test", classp->r_test}, {"tail_near", classp->tail_near},
                         {"tail_far", classp->tail_far}, {"decay_ratio", classp->decay_ratio}};
    }
    if (cfg.mode == Mode::Semilinear) {
        sj["kappa"] = nls[0].kappa();
        sj["K"] = nls[0].K();
        sj["delta"] = window_semilinear(nls[0], win);
        sj["delta_statement"] = std::min(win.delta0, nls[0].kappa() / (win.c0 * nls[0].K()));
    }
    std::vector<double> forcing;
    if (cfg.mode == Mode::Linear) {
        forcing = spec.phi;
        if (cfg.forcing == "groundstate_plus_second") {
            if (spec.radial_u.size() < 2) throw Error(ErrorKind::ConvergenceFailure, "second radial mode unavailable");
            for (std::size_t i = 0; i < forcing.size(); ++i) forcing[i] += cfg.forcing_weight * spec.radial_u[1][i];
        }
        const GroundstateVector fd = decompose(grid, forcing, spec.phi);
        const double spread = win.c0 * x_norm(fd.perp, spec.phi);
        sj["f1"] = fd.c1;
        sj["delta1"] = spread > 0.0 ? fd.c1 / spread : std::numeric_limits<double>::infinity();
        sj["delta"] = std::min(win.delta0, spread > 0.0 ? fd.c1 / spread : win.delta0);
    }
    if (A) {
        const auto [kappa, K] = shared_bounds(nls[0], nls[1]);
        const auto [kp, kP] = transformed_bounds(*A, kappa, K);
        sj["Lambda_star"] = spec.Lambda - A->xi1;
        sj["xi1"] = A->xi1;
        sj["xi2"] = A->xi2;
        sj["Y"] = {A->Y[0], A->Y[1]};
        sj["kappa"] = kappa;
        sj["K"] = K;
        sj["kappa_prime"] = kp;
        sj["K_prime"] = kP;
        sj["delta"] = std::min({win.delta0, kp / (2.0 * win.c0 * kP), 0.5 * (A->xi1 - A->xi2),
                                spec.lambda2 - spec.Lambda});
    }
    sj["mu_offsets"] = cfg.offsets;

    // one task per mu; results land in offset order regardless of completion order
    const double base = A ? spec.Lambda - A->xi1 : spec.Lambda;
    auto solve_point = [&](double offset) -> PointResult {
        PointResult pr;
        Row r;
        r.offset = offset;
        r.mu = base + offset;
        r.requested = true;
        try {
            SemilinearOptions sopt;
            sopt.damping = cfg.damping;
            sopt.max_iter = cfg.max_iter;
            sopt.tol_x = cfg.tol_x;
            if (cfg.mode == Mode::Linear) {
                const LinearProblem lp{op, spec, r.mu, forcing};
                const LinearCertificate cert = certify_theorem1(lp, win);
                r.branch = offset < 0.0 ? "MP" : "AMP";
                r.u1 = cert.solution.c1;
                r.min_ratio = cert.ratio.min;
                r.max_ratio = cert.ratio.max;
                r.x_norm = cert.solution.x_norm;
                r.gs_bound = cert.bound;
                r.xnorm_bound = std::abs(cert.f1 / (spec.Lambda - r.mu)) + win.c0 * cert.f_perp_x;
                r.in_window = cert.in_window;
                r.requested = cert.in_window;
                r.certified = cert.certified();
                r.u = cert.solution.values;
            } else if (cfg.mode == Mode::Semilinear) {
                const SemilinearProblem sp{op, spec, win, nls[0], r.mu};
                const SemilinearReport rep = solve_semilinear(sp, sopt);
                const Bracket br = make_bracket(nls[0], spec.phi, spec.Lambda, r.mu);
                r.branch = to_string(rep.branch);
                r.u1 = rep.solution.c1;
                r.min_ratio = rep.ratio.min;
                r.max_ratio = rep.ratio.max;
                r.x_norm = rep.solution.x_norm;
                r.lower = br.lower_coef;
                r.upper = br.upper_coef;
                r.gs_bound = nls[0].kappa() / (spec.Lambda - r.mu);
                r.xnorm_bound = rep.xnorm_bound;
                r.in_window = true;
                r.requested = nls[0].has_lower_bound();
                r.certified = rep.certified();
                r.iterations = rep.iterations;
                r.uniqueness_gap = rep.uniqueness.two_start_gap;
                r.u = rep.solution.values;
            } else {
                const SystemProblem sp{op, spec, win, *A, nls[0], nls[1], r.mu};
                const SystemReport rep = solve_system(sp, sopt);
                const RatioRange q1 = ratio_range(rep.u1.values, spec.phi);
                const RatioRange q2 = ratio_range(rep.u2.values, spec.phi);
                r.branch = to_string(rep.branch);
                r.u1 = rep.u1.c1;
                r.min_ratio = q1.min;
                r.max_ratio = q1.max;
                r.min_ratio_2 = q2.min;
                r.max_ratio_2 = q2.max;
                r.x_norm = std::max(rep.u1.x_norm, rep.u2.x_norm);
                r.lower = rep.rectangle.lower_coef[0];
                r.upper = rep.rectangle.upper_coef[0];
                r.gs_bound = rep.branch == Branch::MP ? rep.rectangle.lower_coef[0] : rep.rectangle.upper_coef[0];
                r.xnorm_bound = std::max({std::abs(rep.rectangle.lower_coef[0]), std::abs(rep.rectangle.upper_coef[0]),
                                          std::abs(rep.rectangle.lower_coef[1]), std::abs(rep.rectangle.upper_coef[1])});
                r.in_window = true;
                r.certified = rep.certified();
                r.iterations = rep.iterations;
                r.uniqueness_gap = rep.two_start_gap;
                r.u = rep.u1.values;
                r.u2 = rep.u2.values;
            }
            pr.row = std::move(r);
        } catch (const Error& e) {
            pr.error = e;
        }
        return pr;
    };

    std::vector<std::future<PointResult>> tasks;
    for (double o : cfg.offsets) tasks.push_back(std::async(std::launch::async, solve_point, o));
    std::vector<PointResult> results;
    for (auto& t : tasks) results.push_back(t.get());

    RunOutcome outcome;
    std::string csv =
        "mu,offset,branch,u1_component,min_ratio,max_ratio,min_ratio_2,max_ratio_2,x_norm,lower_bound,upper_bound,"
        "gs_bound,xnorm_bound,in_window,certified,iterations,uniqueness_gap\n";
    for (const PointResult& pr : results) {
        if (pr.error) {
            if (outcome.exit_code == 0) {
                outcome.exit_code = exit_code_for(pr.error->kind());
                outcome.message = pr.error->what();
            }
            continue;
        }
        const Row& r = *pr.row;
        csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", fmt17(r.mu), fmt17(r.offset), r.branch,
                           fmt17(r.u1), fmt17(r.min_ratio), fmt17(r.max_ratio), fmt17(r.min_ratio_2),
                           fmt17(r.max_ratio_2), fmt17(r.x_norm), fmt17(r.lower), fmt17(r.upper), fmt17(r.gs_bound),
                           fmt17(r.xnorm_bound), r.in_window ? 1 : 0, r.certified ? 1 : 0, r.iterations,
                           fmt17(r.uniqueness_gap));
        ++outcome.rows;
        if (r.requested && !r.certified && outcome.exit_code == 0) {
            outcome.exit_code = 4;
            outcome.message = fmt::format("certificate failed at mu offset {:.6g}", r.offset);
        }
        if (flagged(cfg, r.offset)) {
            const auto radii = grid.radii();
            std::string sol = r.u2.empty() ? "r,phi,u\n" : "r,phi,u1,u2\n";
            for (std::size_t i = 0; i < r.u.size(); ++i) {
                sol += fmt::format("{},{},{}", fmt17(radii[i]), fmt17(spec.phi[i]), fmt17(r.u[i]));
                if (!r.u2.empty()) sol += "," + fmt17(r.u2[i]);
                sol += "\n";
            }
            write_text(cfg.output_dir / fmt::format("solution_{:.10g}.csv", r.mu), sol);
        }
    }

    write_text(cfg.output_dir / "spectrum.json", sj.dump(2) + "\n");
    if (cfg.mode != Mode::Eigen) write_text(cfg.output_dir / "sweep.csv", csv);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text(cfg.output_dir / "timing.json", fmt::format("{{\"wall_seconds\": {:.6f}}}\n", wall));
    return outcome;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_number(const std::string& s, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::MalformedInput, fmt::format("line {}: '{}' is not a number", line, s));
    }
}

} // namespace

void write_report(const fs::path& sweep_csv, const fs::path& out_dir) {
    std::ifstream in(sweep_csv);
    if (!in) throw Error(ErrorKind::MalformedInput, fmt::format("cannot read '{}'", sweep_csv.string()));
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::MalformedInput, "empty sweep file");
    const std::vector<std::string> header = split_csv(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* need : {"mu", "branch", "min_ratio", "max_ratio", "x_norm", "gs_bound", "xnorm_bound", "certified"}) {
        if (!col.count(need)) throw Error(ErrorKind::MalformedInput, fmt::format("sweep file lacks column '{}'", need));
    }

    std::string gsp = "mu,branch,min_ratio,max_ratio,bound,certified\n";
    std::string blow = "mu,x_norm,xnorm_bound,certified\n";
    std::size_t lineno = 1, rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> f = split_csv(line);
        if (f.size() != header.size()) {
            throw Error(ErrorKind::MalformedInput, fmt::format("line {}: expected {} fields, got {}", lineno, header.size(), f.size()));
        }
        const std::string& branch = f[col["branch"]];
        if (branch != "MP" && branch != "AMP") {
            throw Error(ErrorKind::MalformedInput, fmt::format("line {}: unknown branch '{}'", lineno, branch));
        }
        const double mu = parse_number(f[col["mu"]], lineno);
        const double cert = parse_number(f[col["certified"]], lineno);
        gsp += fmt::format("{},{},{},{},{},{}\n", fmt17(mu), branch, fmt17(parse_number(f[col["min_ratio"]], lineno)),
                           fmt17(parse_number(f[col["max_ratio"]], lineno)),
                           fmt17(parse_number(f[col["gs_bound"]], lineno)), cert != 0.0 ? 1 : 0);
        blow += fmt::format("{},{},{},{}\n", fmt17(mu), fmt17(parse_number(f[col["x_norm"]], lineno)),
                            fmt17(parse_number(f[col["xnorm_bound"]], lineno)), cert != 0.0 ? 1 : 0);
        ++rows;
    }
    if (rows == 0) throw Error(ErrorKind::MalformedInput, "sweep file has no rows");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    write_text(out_dir / "gsp_curve.csv", gsp);
    write_text(out_dir / "blowup_curve.csv", blow);
}

} // namespace gsp
