#include "nlab/talenti.hpp"

#include <algorithm>
#include <cmath>

#include "nlab/parallel.hpp"

namespace nlab {

namespace {

double smoothstep_down(double t) {
    // 1 -> 0 transition, C^2 quintic
    if (t <= 0) return 1.0;
    if (t >= 1) return 0.0;
    return 1.0 - t * t * t * (10 + t * (-15 + 6 * t));
}

double talenti_profile(double rho, double eps, int N, double p, double K) {
    const double e1 = (N - p) / (p * (p - 1));
    const double e2 = p / (p - 1);
    const double e3 = (N - p) / p;
    return K * std::pow(eps, e1)
           / std::pow(std::pow(eps, e2) + std::pow(rho, e2), e3);
}

struct SupportData {
    std::vector<std::int64_t> nodes;       // interior nodes inside the cutoff support
    std::vector<double> complement_mass;   // kernel mass to zero-valued in-box nodes
    std::vector<double> tau_vol;           // tau_i * cell volume
};

SupportData build_support(const NonlocalAssembly& asm_, const std::array<double, 3>& center,
                          double radius) {
    const Grid& g = asm_.grid();
    SupportData sd;
    for (std::int64_t k = 0; k < g.interior_count(); ++k) {
        auto x = g.interior_coord(k);
        double r2 = 0;
        for (int a = 0; a < g.dim(); ++a) {
            const double d = x[a] - center[a];
            r2 += d * d;
        }
        if (r2 < radius * radius) sd.nodes.push_back(k);
    }
    const std::int64_t S = static_cast<std::int64_t>(sd.nodes.size());
    const double vol = g.cell_volume();
    const double cellcomp = asm_.cell_complement_integral();
    sd.complement_mass.resize(static_cast<std::size_t>(S));
    sd.tau_vol.resize(static_cast<std::size_t>(S));
    // W_i^S = sum of pair weights within the support, subtracted from the
    // exact everything-but-own-cell mass
    std::vector<double> within(static_cast<std::size_t>(S), 0.0);
    parallel_for(S, 64, [&](std::int64_t b0, std::int64_t b1) {
        for (std::int64_t a = b0; a < b1; ++a) {
            const std::int64_t i = sd.nodes[static_cast<std::size_t>(a)];
            double acc = 0;
            for (std::int64_t b = 0; b < S; ++b) {
                if (b == a) continue;
                acc += asm_.pair_weight(i, sd.nodes[static_cast<std::size_t>(b)]);
            }
            within[static_cast<std::size_t>(a)] = acc;
        }
    });
    for (std::int64_t a = 0; a < S; ++a) {
        const std::int64_t i = sd.nodes[static_cast<std::size_t>(a)];
        const double tv = asm_.tau(i) * vol;
        sd.tau_vol[static_cast<std::size_t>(a)] = tv;
        sd.complement_mass[static_cast<std::size_t>(a)] =
            vol * cellcomp - tv - within[static_cast<std::size_t>(a)];
    }
    return sd;
}

// [u]^q for fields vanishing outside the support: pairs within the support
// plus closed-form kernel mass towards every zero node.
double supported_gagliardo(const NonlocalAssembly& asm_, const DiscreteField& u,
                           const SupportData& sd, double q) {
    const std::int64_t S = static_cast<std::int64_t>(sd.nodes.size());
    const double pair_sum = chunked_reduce(S, 16, [&](std::int64_t b0, std::int64_t b1) {
        double acc = 0;
        for (std::int64_t a = b0; a < b1; ++a) {
            const std::int64_t i = sd.nodes[static_cast<std::size_t>(a)];
            const double ui = u[i];
            for (std::int64_t b = 0; b < a; ++b) {
                const std::int64_t j = sd.nodes[static_cast<std::size_t>(b)];
                acc += std::pow(std::abs(ui - u[j]), q) * asm_.pair_weight(i, j);
            }
        }
        return acc;
    });
    double zero_sum = 0;
    for (std::int64_t a = 0; a < S; ++a) {
        const double ui = u[sd.nodes[static_cast<std::size_t>(a)]];
        zero_sum += std::pow(std::abs(ui), q)
                    * (sd.complement_mass[static_cast<std::size_t>(a)]
                       + sd.tau_vol[static_cast<std::size_t>(a)]);
    }
    return 2 * pair_sum + 2 * zero_sum;
}

} // namespace

TalentiFamily build_family(const ProblemConfig& cfg, GridPtr g,
                           const std::vector<double>& eps_list, double r0,
                           const TalentiOptions& opt) {
    if (cfg.mode == Mode::subcritical)
        throw ModeError("the bubble family belongs to the critical and bn modes");
    if (eps_list.empty()) throw SpecError("empty eps list");
    if (!(r0 > 0)) throw SpecError("cutoff radius must be positive");

    std::array<double, 3> center{0, 0, 0};
    for (int a = 0; a < g->dim(); ++a) {
        center[a] = g->lo()[a] + g->side()[a] / 2;
        const double clearance = g->side()[a] / 2;
        if (!(4 * r0 < clearance))
            throw SpecError("cutoff geometry violated: the ball of radius 4*r0 leaves the box");
    }
    for (double e : eps_list) {
        if (!(e > 0)) throw SpecError("eps must be positive");
        if (e > r0) throw SpecError("eps must not exceed the cutoff radius r0");
    }

    TalentiFamily fam;
    fam.grid = g;
    fam.r0 = r0;
    fam.t_list = opt.t_list;
    fam.K_Np = sobolev_K_Np(cfg.dim_N, cfg.p);
    const double pstar = cfg.p_star();
    const double four_h = 4 * g->min_h();

    AssemblyPtr asm_;
    SupportData sd;
    if (opt.include_fractional) {
        asm_ = build_assembly(g, cfg.s, cfg.q);
        sd = build_support(*asm_, center, 2 * r0);
    }

    for (double eps : eps_list) {
        DiscreteField u(g);
        for (std::int64_t k = 0; k < u.size(); ++k) {
            auto x = g->interior_coord(k);
            double r2 = 0;
            for (int a = 0; a < g->dim(); ++a) {
                const double d = x[a] - center[a];
                r2 += d * d;
            }
            const double rho = std::sqrt(r2);
            const double cutoff = smoothstep_down((rho - r0) / r0);
            u[k] = cutoff == 0.0
                       ? 0.0
                       : cutoff * talenti_profile(rho, eps, cfg.dim_N, cfg.p, fam.K_Np);
        }
        const double nrm = std::pow(lt_norm(u, pstar), 1.0 / pstar);
        DiscreteField v = u;
        v *= 1.0 / nrm;

        TalentiRow row;
        row.eps = eps;
        row.resolvable = eps >= four_h;
        row.p_norm_v = local_p_energy(v, cfg.p);
        if (opt.include_fractional)
            row.q_norm_u = supported_gagliardo(*asm_, u, sd, cfg.q);
        for (double t : fam.t_list) row.lt_norms_v.push_back(lt_norm(v, t));
        fam.rows.push_back(std::move(row));
        fam.u_eps.push_back(std::move(u));
        fam.v_eps.push_back(std::move(v));
    }
    return fam;
}

namespace {

struct Fit {
    double slope = 0;
    bool ok = false;
};

Fit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
    Fit f;
    if (xs.size() < 2) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(ys[i] > 0)) return f;
        const double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.ok = true;
    return f;
}

} // namespace

SlopeReport slope_report(const TalentiFamily& fam, const ProblemConfig& cfg, double S_p_hat) {
    SlopeReport rep;
    std::vector<double> eps;
    std::vector<const TalentiRow*> rows;
    for (const auto& row : fam.rows) {
        if (!row.resolvable || row.eps > fam.r0) continue;
        eps.push_back(row.eps);
        rows.push_back(&row);
    }
    rep.usable_count = static_cast<int>(eps.size());
    if (eps.size() < 4)
        throw SpecError("slope fit needs at least 4 resolvable eps values");
    const auto [mn, mx] = std::minmax_element(eps.begin(), eps.end());
    rep.eps_min = *mn;
    rep.eps_max = *mx;
    if (!(*mx / *mn >= 4.0 * (1 - 1e-12)))
        throw SpecError("slope fit needs the eps range to span at least two dyadic octaves");

    const double N = cfg.dim_N, p = cfg.p;
    const double pstar = cfg.p_star();
    const double t_mid = pstar * (1 - 1 / p);

    // fractional seminorm of u_eps vs m(N,p,q,s)
    {
        SlopeFit f;
        f.label = "q_norm_u";
        f.target = m_exponent(cfg.dim_N, cfg.p, cfg.q, cfg.s);
        std::vector<double> ys;
        bool have = true;
        for (auto* r : rows) {
            if (!r->q_norm_u) {
                have = false;
                break;
            }
            ys.push_back(*r->q_norm_u);
        }
        if (have) {
            auto fit = fit_loglog(eps, ys);
            f.slope = fit.slope;
            f.usable = fit.ok;
        }
        rep.fits.push_back(std::move(f));
    }

    // Dirichlet energy gap of v_eps vs (N-p)/(p-1)
    {
        SlopeFit f;
        f.label = "p_gap";
        f.target = (N - p) / (p - 1);
        std::vector<double> ys;
        for (auto* r : rows) ys.push_back(r->p_norm_v - S_p_hat);
        auto fit = fit_loglog(eps, ys);
        f.slope = fit.slope;
        f.usable = fit.ok;
        rep.fits.push_back(std::move(f));
    }

    for (std::size_t ti = 0; ti < fam.t_list.size(); ++ti) {
        const double t = fam.t_list[ti];
        SlopeFit f;
        f.label = "lt_t=" + std::to_string(t);
        std::vector<double> ys;
        for (auto* r : rows) ys.push_back(r->lt_norms_v[ti]);
        if (std::abs(t - t_mid) <= 1e-9) {
            // log-corrected regime: fit value/|log eps|
            f.target = (N - p) * t / (p * p);
            for (std::size_t i = 0; i < ys.size(); ++i)
                ys[i] /= std::abs(std::log(eps[i]));
        } else if (t > t_mid) {
            f.target = N - t * (N - p) / p;
        } else {
            f.target = (N - p) * t / (p * (p - 1));
        }
        auto fit = fit_loglog(eps, ys);
        f.slope = fit.slope;
        f.usable = fit.ok;
        rep.fits.push_back(std::move(f));
    }
    return rep;
}

SupScanResult sup_scan(const ProblemConfig& cfg, const DiscreteField& v_eps,
                       const Weights& w, const NonlocalAssembly& asm_, double level) {
    if (cfg.mode == Mode::subcritical)
        throw ModeError("the energy-level scan belongs to the critical and bn modes");
    const EnergyBreakdown bd = energy_breakdown(v_eps, cfg, w, asm_);

    // bracket: expand until gamma is decreasing and negative
    double t_hi = 1.0;
    int guard = 0;
    while (true) {
        const auto gd = eval_gamma(bd, t_hi, cfg);
        if (gd.gamma < 0 && gd.dgamma < 0) break;
        t_hi *= 2;
        if (++guard > 200) throw BracketError("sup scan: no decreasing bracket found");
    }

    // golden-section maximum of j_of_t on [0, t_hi]
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double a = 0, b = t_hi;
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = j_of_t(bd, c1, cfg), f2 = j_of_t(bd, c2, cfg);
    for (int it = 0; it < 200 && (b - a) > 1e-12 * t_hi; ++it) {
        if (f1 < f2) {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + gr * (b - a);
            f2 = j_of_t(bd, c2, cfg);
        } else {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - gr * (b - a);
            f1 = j_of_t(bd, c1, cfg);
        }
    }
    SupScanResult out;
    out.t_argmax = 0.5 * (a + b);
    out.sup_value = j_of_t(bd, out.t_argmax, cfg);
    out.level = level;
    out.below = out.sup_value < level;
    return out;
}

} // namespace nlab
