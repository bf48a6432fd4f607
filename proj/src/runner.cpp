#include "nlab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "nlab/gev.hpp"
#include "nlab/io.hpp"
#include "nlab/solver.hpp"
#include "nlab/talenti.hpp"

namespace nlab {

using nlohmann::json;

namespace {

std::vector<double> parse_csv_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ','))
        if (!part.empty()) out.push_back(std::stod(part));
    return out;
}

double param_double(const RunOptions& opt, const std::string& key, double dflt) {
    auto it = opt.params.find(key);
    return it == opt.params.end() ? dflt : std::stod(it->second);
}

int param_int(const RunOptions& opt, const std::string& key, int dflt) {
    auto it = opt.params.find(key);
    return it == opt.params.end() ? dflt : std::stoi(it->second);
}

std::string param_str(const RunOptions& opt, const std::string& key, const std::string& dflt) {
    auto it = opt.params.find(key);
    return it == opt.params.end() ? dflt : it->second;
}

json config_json(const ProblemConfig& cfg) {
    json j;
    j["dim_N"] = cfg.dim_N;
    j["p"] = cfg.p;
    j["q"] = cfg.q;
    j["s"] = cfg.s;
    j["delta"] = cfg.delta;
    j["r"] = cfg.r;
    j["lambda"] = cfg.lambda;
    j["mode"] = to_string(cfg.mode);
    j["strictness"] = to_string(cfg.strictness);
    j["grid_n"] = cfg.grid_n;
    j["domain_lo"] = {cfg.domain_lo[0], cfg.domain_lo[1], cfg.domain_lo[2]};
    j["domain_side"] = {cfg.domain_side[0], cfg.domain_side[1], cfg.domain_side[2]};
    j["weight_a"] = cfg.weight_a.describe();
    j["weight_b"] = cfg.weight_b.describe();
    return j;
}

void require_valid(const ProblemConfig& cfg) {
    auto v = validate_config(cfg);
    if (!v.empty()) {
        std::string msg = "config violates:";
        for (const auto& s : v) msg += "\n  " + s;
        throw SpecError(msg);
    }
}

DiscreteField field_from_params(const RunOptions& opt, GridPtr g) {
    std::array<double, 3> c{0, 0, 0};
    double min_side = g->side()[0];
    for (int a = 0; a < g->dim(); ++a) {
        c[a] = g->lo()[a] + g->side()[a] / 2;
        min_side = std::min(min_side, g->side()[a]);
    }
    auto it = opt.params.find("field_center");
    if (it != opt.params.end()) {
        auto xs = parse_csv_doubles(it->second);
        for (std::size_t a = 0; a < xs.size() && a < 3; ++a) c[a] = xs[a];
    }
    const double radius = param_double(opt, "field_radius", 0.3 * min_side);
    const double amp = param_double(opt, "field_amplitude", 1.0);
    return make_bump(g, c, radius, amp);
}

json solve_report_json(const SolveReport& rep, const VerifyReport& ver) {
    json j;
    j["branch"] = to_string(rep.branch);
    j["J"] = rep.J;
    j["P"] = rep.breakdown.P;
    j["Q"] = rep.breakdown.Q;
    j["A"] = rep.breakdown.A;
    j["B"] = rep.breakdown.B;
    j["residual_sup"] = rep.residual_sup;
    j["residual_scaled"] = rep.residual_scaled;
    j["gamma_pp_at_1"] = rep.gamma_pp_at_1;
    j["iterations"] = rep.iterations;
    j["starts_tried"] = rep.starts_tried;
    j["start_index"] = rep.start_index;
    j["nonnegativized"] = rep.nonnegativized;
    j["converged"] = rep.converged;
    j["lambda0_hat"] = rep.lambda0_hat;
    j["e_lambda"] = rep.e_lambda_value;
    json checks = json::array();
    for (const auto& item : ver.items) {
        checks.push_back({{"name", item.name},
                          {"pass", item.pass},
                          {"value", item.value},
                          {"tolerance", item.tolerance}});
    }
    j["verify"] = {{"pass", ver.pass}, {"items", checks}};
    return j;
}

std::string field_csv(const DiscreteField& u) {
    const Grid& g = u.grid();
    std::vector<std::string> header;
    header.push_back("x");
    header.push_back("y");
    if (g.dim() == 3) header.push_back("z");
    header.push_back("u");
    CsvWriter csv(header);
    for (std::int64_t k = 0; k < u.size(); ++k) {
        auto x = g.interior_coord(k);
        std::vector<double> row;
        for (int a = 0; a < g.dim(); ++a) row.push_back(x[a]);
        row.push_back(u[k]);
        csv.add_row(row);
    }
    return csv.str();
}

json constants_json(const ConstantsReport& c) {
    json j;
    j["grid_n"] = c.grid_n;
    j["S_rp"] = c.S_rp;
    j["S_rq"] = c.S_rq;
    j["S_p"] = c.S_p;
    j["lambda_1p"] = c.lambda_1p;
    j["lambda_1q"] = c.lambda_1q;
    j["norm_a"] = c.norm_a;
    j["norm_a_inf"] = c.norm_a_inf;
    j["norm_b_inf"] = c.norm_b_inf;
    j["lambda0"] = c.lambda0;
    j["m_exp"] = c.m_exp;
    j["K_Np"] = c.K_Np;
    if (c.C_delta) j["C_delta"] = *c.C_delta;
    if (c.c_inf) j["c_inf"] = *c.c_inf;
    if (c.C_inf) j["C_inf"] = *c.C_inf;
    if (c.Lambda0) j["Lambda0"] = *c.Lambda0;
    if (c.LambdaBar0) j["LambdaBar0"] = *c.LambdaBar0;
    if (c.bn_window)
        j["bn_window"] = {{"cond1", c.bn_window->cond1},
                          {"cond2", c.bn_window->cond2},
                          {"admissible", c.bn_window->admissible}};
    return j;
}

RunResult run_validate(const ProblemConfig& cfg) {
    RunResult out;
    auto v = validate_config(cfg);
    json j;
    j["config"] = config_json(cfg);
    j["violations"] = v;
    j["valid"] = v.empty();
    out.json = j.dump(2);
    out.exit_code = v.empty() ? 0 : 2;
    return out;
}

RunResult run_constants(const ProblemConfig& cfg, const RunOptions& opt) {
    require_valid(cfg);
    RunResult out;
    GridPtr g = build_grid(cfg);
    auto rep = compute_constants(cfg, g, opt.seed);
    json j = constants_json(rep);
    j["config"] = config_json(cfg);
    out.json = j.dump(2);
    return out;
}

RunResult run_fibering(const ProblemConfig& cfg, const RunOptions& opt) {
    require_valid(cfg);
    RunResult out;
    GridPtr g = build_grid(cfg);
    const Weights w = sample_weights(cfg, g);
    AssemblyPtr asm_ = build_assembly(g, cfg.s, cfg.q);
    DiscreteField u = field_from_params(opt, g);
    const EnergyBreakdown bd = energy_breakdown(u, cfg, w, *asm_);
    FiberingReport rep = fibering_roots(bd, cfg);
    const double t_lo = param_double(opt, "t_lo", 1e-3);
    const double t_hi = param_double(opt, "t_hi", 1e3);
    const int count = param_int(opt, "t_count", 400);
    sample_gamma(rep, bd, cfg, t_lo, t_hi, count);

    json j;
    j["config"] = config_json(cfg);
    j["case"] = to_string(rep.case_label);
    j["no_roots"] = rep.no_roots;
    j["P"] = bd.P;
    j["Q"] = bd.Q;
    j["A"] = bd.A;
    j["B"] = bd.B;
    j["J"] = bd.J;
    if (rep.t_max) j["t_max"] = *rep.t_max;
    if (rep.t1) j["t1"] = *rep.t1;
    if (rep.t2) j["t2"] = *rep.t2;
    if (rep.ddgamma_t1) j["ddgamma_t1"] = *rep.ddgamma_t1;
    if (rep.ddgamma_t2) j["ddgamma_t2"] = *rep.ddgamma_t2;
    out.json = j.dump(2);

    CsvWriter csv({"t", "gamma", "dgamma", "ddgamma"});
    for (const auto& s : rep.samples) csv.add_row({s[0], s[1], s[2], s[3]});
    out.tables.emplace_back("fibering", csv.str());
    return out;
}

RunResult run_solve(const ProblemConfig& cfg, const RunOptions& opt) {
    require_valid(cfg);
    RunResult out;
    GridPtr g = build_grid(cfg);
    const Weights w = sample_weights(cfg, g);
    AssemblyPtr asm_ = build_assembly(g, cfg.s, cfg.q);
    SolverOptions sopt;
    sopt.seed = opt.seed;
    sopt.deterministic = opt.deterministic;
    sopt.force = opt.force;
    sopt.tol_residual = param_double(opt, "tol_residual", 1e-6);
    sopt.max_iterations = param_int(opt, "max_iterations", 10000);
    sopt.minus_starts = param_int(opt, "minus_starts", 8);

    std::vector<Branch> branches;
    if (opt.branch == "plus") branches = {Branch::plus};
    else if (opt.branch == "minus") branches = {Branch::minus};
    else if (opt.branch == "both") branches = {Branch::plus, Branch::minus};
    else throw SpecError("unknown branch: " + opt.branch);

    json j;
    j["config"] = config_json(cfg);
    json reports = json::array();
    for (Branch b : branches) {
        SolveReport rep = solve_branch(b, cfg, w, *asm_, sopt);
        sopt.lambda0_hat = rep.lambda0_hat;  // reuse across branches
        VerifyReport ver = verify_solution(rep, cfg, w, *asm_);
        reports.push_back(solve_report_json(rep, ver));
        out.tables.emplace_back(std::string("u_") + to_string(b), field_csv(rep.u));
    }
    j["reports"] = reports;
    out.json = j.dump(2);
    return out;
}

RunResult run_sweep(const ProblemConfig& cfg, const RunOptions& opt) {
    require_valid(cfg);
    RunResult out;
    GridPtr g = build_grid(cfg);
    const Weights w = sample_weights(cfg, g);
    AssemblyPtr asm_ = build_assembly(g, cfg.s, cfg.q);
    auto it = opt.params.find("lambdas");
    if (it == opt.params.end()) throw SpecError("sweep needs the lambdas parameter");
    const std::vector<double> lambdas = parse_csv_doubles(it->second);

    std::vector<Branch> branches;
    if (opt.branch == "plus") branches = {Branch::plus};
    else if (opt.branch == "minus") branches = {Branch::minus};
    else branches = {Branch::plus, Branch::minus};

    SolverOptions sopt;
    sopt.seed = opt.seed;
    sopt.deterministic = opt.deterministic;
    sopt.force = true;
    sopt.tol_residual = param_double(opt, "tol_residual", 1e-6);
    sopt.max_iterations = param_int(opt, "max_iterations", 4000);
    sopt.minus_starts = param_int(opt, "minus_starts", 4);

    auto records = lambda_sweep(cfg, w, *asm_, lambdas, branches, sopt);
    CsvWriter csv({"lambda", "branch", "outcome", "J", "P", "Q", "residual_scaled",
                   "above_lambda0"});
    for (const auto& rec : records) {
        csv.add_row_strings({format_double(rec.lambda), to_string(rec.branch),
                             to_string(rec.outcome), format_double(rec.J),
                             format_double(rec.P), format_double(rec.Q),
                             format_double(rec.residual_scaled),
                             rec.above_lambda0 ? "1" : "0"});
    }
    out.tables.emplace_back("sweep", csv.str());
    json j;
    j["config"] = config_json(cfg);
    j["records"] = records.size();
    out.json = j.dump(2);
    return out;
}

RunResult run_talenti(const ProblemConfig& cfg, const RunOptions& opt) {
    require_valid(cfg);
    RunResult out;
    GridPtr g = build_grid(cfg);
    double min_side = g->side()[0];
    for (int a = 0; a < g->dim(); ++a) min_side = std::min(min_side, g->side()[a]);
    const double r0 = param_double(opt, "r0", 0.124 * min_side);

    std::vector<double> eps_list;
    auto it = opt.params.find("eps");
    if (it != opt.params.end()) {
        eps_list = parse_csv_doubles(it->second);
    } else {
        // dyadic ladder over two octaves ending at r0
        for (int k = 4; k >= 0; --k) eps_list.push_back(r0 * std::pow(2.0, -k / 2.0));
    }
    TalentiOptions topt;
    topt.include_fractional = param_int(opt, "include_fractional", 1) != 0;
    auto t_it = opt.params.find("t_list");
    if (t_it != opt.params.end()) topt.t_list = parse_csv_doubles(t_it->second);

    TalentiFamily fam = build_family(cfg, g, eps_list, r0, topt);

    CsvWriter norms([&] {
        std::vector<std::string> h{"eps", "p_norm_v", "q_norm_u"};
        for (double t : fam.t_list) h.push_back("lt_t=" + format_double(t));
        h.push_back("resolvable");
        return h;
    }());
    for (const auto& row : fam.rows) {
        std::vector<std::string> r{format_double(row.eps), format_double(row.p_norm_v),
                                   row.q_norm_u ? format_double(*row.q_norm_u) : "nan"};
        for (double v : row.lt_norms_v) r.push_back(format_double(v));
        r.push_back(row.resolvable ? "1" : "0");
        norms.add_row_strings(r);
    }
    out.tables.emplace_back("talenti_norms", norms.str());

    json j;
    j["config"] = config_json(cfg);
    j["r0"] = r0;
    j["K_Np"] = fam.K_Np;

    const bool want_slopes = param_int(opt, "slopes", 1) != 0;
    double S_p_hat = param_double(opt, "S_p_hat", 0.0);
    if (want_slopes) {
        if (S_p_hat <= 0) {
            ProblemConfig ccfg = cfg;
            S_p_hat = rayleigh_minimize(RayleighTarget::S_rp, g, ccfg, 3, 5000, opt.seed).value;
        }
        SlopeReport sl = slope_report(fam, cfg, S_p_hat);
        json fits = json::array();
        CsvWriter slopes({"label", "slope", "target", "usable"});
        for (const auto& f : sl.fits) {
            fits.push_back({{"label", f.label},
                            {"slope", f.slope},
                            {"target", f.target},
                            {"usable", f.usable}});
            slopes.add_row_strings({f.label, format_double(f.slope), format_double(f.target),
                                    f.usable ? "1" : "0"});
        }
        j["S_p_hat"] = S_p_hat;
        j["slopes"] = fits;
        j["eps_min"] = sl.eps_min;
        j["eps_max"] = sl.eps_max;
        out.tables.emplace_back("talenti_slopes", slopes.str());
    }

    if (param_int(opt, "sup_scan", 0) != 0) {
        ProblemConfig scfg = cfg;
        auto constants = compute_constants(scfg, g, opt.seed);
        const double threshold =
            cfg.mode == Mode::critical ? *constants.Lambda0 : *constants.LambdaBar0;
        const double lam_frac = param_double(opt, "lambda_frac", 0.1);
        scfg.lambda = lam_frac * threshold;
        const double m = constants.m_exp;
        const double beta_default =
            std::max((1.0 / m) * (cfg.dim_N / cfg.p - 1.0), 1.0 / m);
        const double beta = param_double(opt, "beta", beta_default);
        const double eps_scan = std::pow(scfg.lambda, beta);
        TalentiOptions sopt2;
        sopt2.include_fractional = false;
        TalentiFamily sfam =
            build_family(scfg, g, {std::min(eps_scan, r0)}, r0, sopt2);
        const Weights w = sample_weights(scfg, g);
        AssemblyPtr asm_ = build_assembly(g, scfg.s, scfg.q);
        const double level = c_infinity(scfg, constants.S_p, *constants.C_delta, scfg.lambda);
        auto scan = sup_scan(scfg, sfam.v_eps[0], w, *asm_, level);
        j["sup_scan"] = {{"lambda", scfg.lambda},
                         {"beta", beta},
                         {"eps", eps_scan},
                         {"eps_used", sfam.rows[0].eps},
                         {"t_argmax", scan.t_argmax},
                         {"sup_value", scan.sup_value},
                         {"level", scan.level},
                         {"below", scan.below}};
    }
    out.json = j.dump(2);
    return out;
}

RunResult run_gev(const ProblemConfig& cfg, const RunOptions& opt) {
    require_valid(cfg);
    RunResult out;
    GridPtr g = build_grid(cfg);
    AssemblyPtr asm_ = build_assembly(g, cfg.s, cfg.q);

    std::vector<double> shifts = parse_csv_doubles(
        param_str(opt, "shifts", "-2,-1.5,-1,-0.5,0,0.5,1,1.5,2"));
    const double rho = param_double(opt, "rho", 1.0);

    auto phi_res = rayleigh_minimize(RayleighTarget::lambda_1p, g, cfg, 3, 5000, opt.seed);
    DiscreteField phi = abs_field(phi_res.minimizer);

    GevCurve curve = gev_curve(shifts, phi, rho, cfg, *asm_);
    curve.test_function = "lambda_1p_minimizer";
    auto mono = curve_monotonicity(curve);

    CsvWriter csv({"s", "U"});
    for (std::size_t i = 0; i < curve.shifts.size(); ++i)
        csv.add_row({curve.shifts[i], curve.upper_bounds[i]});
    out.tables.emplace_back("gev_curve", csv.str());

    json j;
    j["config"] = config_json(cfg);
    j["rho"] = rho;
    j["test_function"] = curve.test_function;
    j["nonincreasing"] = mono.nonincreasing;
    j["shifted_nondecreasing"] = mono.shifted_nondecreasing;

    if (param_int(opt, "probe", 0) != 0) {
        auto lq = rayleigh_minimize(RayleighTarget::lambda_1q, g, cfg, 3, 5000, opt.seed);
        EigenEstimates eig{phi_res.value, lq.value, phi};
        const double alpha = param_double(opt, "alpha", 2 * phi_res.value);
        const double beta = param_double(opt, "beta", 0.0);
        auto probe = existence_probe(alpha, beta, cfg, eig, *asm_);
        j["probe"] = {{"alpha", alpha},
                      {"beta", beta},
                      {"lambda_1p", phi_res.value},
                      {"lambda_1q", lq.value},
                      {"descent_found", probe.descent_found},
                      {"t_used", probe.t_used},
                      {"min_energy", probe.min_energy}};
    }
    out.json = j.dump(2);
    return out;
}

} // namespace

std::map<std::string, std::string> parse_params(const std::string& text) {
    std::map<std::string, std::string> out;
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

RunResult run_subcommand(const std::string& subcommand, ProblemConfig cfg,
                         const RunOptions& opt) {
    if (opt.grid_n_override > 0) cfg.grid_n = opt.grid_n_override;
    if (!opt.mode_override.empty()) cfg.mode = mode_from_string(opt.mode_override);

    if (subcommand == "validate") return run_validate(cfg);
    if (subcommand == "constants") return run_constants(cfg, opt);
    if (subcommand == "fibering") return run_fibering(cfg, opt);
    if (subcommand == "solve") return run_solve(cfg, opt);
    if (subcommand == "sweep") return run_sweep(cfg, opt);
    if (subcommand == "talenti") return run_talenti(cfg, opt);
    if (subcommand == "gev") return run_gev(cfg, opt);
    throw SpecError("unknown subcommand: " + subcommand);
}

} // namespace nlab
