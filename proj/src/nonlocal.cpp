#include <algorithm>
#include <cmath>
#include <vector>

#include "nlab/operators.hpp"
#include "nlab/parallel.hpp"

namespace nlab {

namespace {

constexpr int kKernelGauss = 12;  // per-axis Gauss order for kernel cell integrals

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    // nodes/weights on [-1/2, 1/2] by Newton on Legendre polynomials
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1, p1 = t;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (t * p1 - p0) / (t * t - 1);
        x[i] = t / 2;
        w[i] = 1.0 / ((1 - t * t) * dp * dp);
    }
}

double sphere_measure(int N) {
    // |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2)
    return 2.0 * std::pow(M_PI, N / 2.0) / std::tgamma(N / 2.0);
}

// ---- kernel integrals over complements of axis-aligned boxes ----

double half_plane_factor(double sq) {
    // int_{z1 > d} |z|^{-(2+sq)} dz = C d^{-sq},  C = sqrt(pi) G((1+sq)/2) / (sq G(1+sq/2))
    return std::sqrt(M_PI) * std::tgamma((1 + sq) / 2) / (sq * std::tgamma(1 + sq / 2));
}

// int_0^{L} sin(th)^{sq} dth with the fractional-power endpoint at 0 handled
// by geometric grading plus an analytic head.
double sin_power_integral(double L, double sq, const std::vector<double>& gx,
                          const std::vector<double>& gw) {
    constexpr int kLevels = 36;
    double lo = L * std::pow(0.5, kLevels);
    // head: sin(th) ~ th to relative 1e-22 down there
    double v = std::pow(lo, 1 + sq) / (1 + sq);
    for (int lev = kLevels; lev >= 1; --lev) {
        const double hi = L * std::pow(0.5, lev - 1);
        for (std::size_t i = 0; i < gx.size(); ++i) {
            const double th = lo + (gx[i] + 0.5) * (hi - lo);
            v += gw[i] * (hi - lo) * std::pow(std::sin(th), sq);
        }
        lo = hi;
    }
    return v;
}

double quadrant_integral(double a, double b, double sq, const std::vector<double>& gx,
                         const std::vector<double>& gw) {
    // int_{z1>a, z2>b} |z|^{-(2+sq)} dz = (1/sq) int_0^{pi/2} rmin(th)^{-sq} dth,
    // rmin = b/sin(th) below th0 = atan2(b,a), a/cos(th) above. Both pieces are
    // powers of sin around their own endpoint.
    const double th0 = std::atan2(b, a);
    const double v = sin_power_integral(th0, sq, gx, gw) * std::pow(b, -sq)
                     + sin_power_integral(M_PI / 2 - th0, sq, gx, gw) * std::pow(a, -sq);
    return v / sq;
}

double half_space_factor_3d(double sq) {
    // int_{z1 > d} |z|^{-(3+sq)} dz = 2 pi d^{-sq} / ((1+sq) sq)
    return 2 * M_PI / ((1 + sq) * sq);
}

double edge_reduction_3d(double sq) {
    // int_R (r^2 + z3^2)^{-(3+sq)/2} dz3 = r^{-(2+sq)} sqrt(pi) G((2+sq)/2)/G((3+sq)/2)
    return std::sqrt(M_PI) * std::tgamma((2 + sq) / 2) / std::tgamma((3 + sq) / 2);
}

double corner_integral_3d(double a, double b, double c, double sq,
                          const std::vector<double>& gx, const std::vector<double>& gw) {
    // int_{z > (a,b,c)} |z|^{-(3+sq)} dz = (1/sq) int_patch rmin(w)^{-sq} dw
    double v = 0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double th = (gx[i] + 0.5) * (M_PI / 2);
        for (std::size_t j = 0; j < gx.size(); ++j) {
            const double ph = (gx[j] + 0.5) * (M_PI / 2);
            const double w1 = std::sin(ph) * std::cos(th);
            const double w2 = std::sin(ph) * std::sin(th);
            const double w3 = std::cos(ph);
            const double rmin = std::max({a / std::max(w1, 1e-300), b / std::max(w2, 1e-300),
                                          c / std::max(w3, 1e-300)});
            v += gw[i] * gw[j] * (M_PI / 2) * (M_PI / 2) * std::sin(ph) * std::pow(rmin, -sq);
        }
    }
    return v / sq;
}

// tau-style integral over the complement of the box {lo <= y <= hi} seen from
// an interior point with face distances d (left/right per axis).
double box_complement_integral(int dim, const double* d, double sq,
                               const std::vector<double>& qx, const std::vector<double>& qw,
                               const std::vector<double>& cx, const std::vector<double>& cw) {
    if (dim == 2) {
        const double Ch = half_plane_factor(sq);
        double v = Ch * (std::pow(d[0], -sq) + std::pow(d[1], -sq) + std::pow(d[2], -sq)
                         + std::pow(d[3], -sq));
        v -= quadrant_integral(d[0], d[2], sq, qx, qw);
        v -= quadrant_integral(d[0], d[3], sq, qx, qw);
        v -= quadrant_integral(d[1], d[2], sq, qx, qw);
        v -= quadrant_integral(d[1], d[3], sq, qx, qw);
        return v;
    }
    const double Ch3 = half_space_factor_3d(sq);
    const double er3 = edge_reduction_3d(sq);
    double v = 0;
    for (int f = 0; f < 6; ++f) v += Ch3 * std::pow(d[f], -sq);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            v -= er3 * quadrant_integral(d[a], d[2 + b], sq, qx, qw);
            v -= er3 * quadrant_integral(d[a], d[4 + b], sq, qx, qw);
            v -= er3 * quadrant_integral(d[2 + a], d[4 + b], sq, qx, qw);
        }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                v += corner_integral_3d(d[a], d[2 + b], d[4 + c], sq, cx, cw);
    return v;
}

} // namespace

double tail_coefficient(double R, double s, double q, int N) {
    if (!(s * q > 0)) throw SpecError("tail_coefficient needs s*q > 0");
    if (!(R > 0)) throw SpecError("tail_coefficient needs R > 0");
    return sphere_measure(N) * std::pow(R, -s * q) / (s * q);
}

NonlocalAssembly::NonlocalAssembly(GridPtr g, double s, double q)
    : grid_(std::move(g)), s_(s), q_(q), sq_(s * q) {
    if (!(s > 0 && s < 1)) throw AssemblyError("assembly needs 0 < s < 1");
    if (!(q > 1)) throw AssemblyError("assembly needs q > 1");
    if (!(sq_ < 1))
        throw AssemblyError("assembly needs s*q < 1 for boundary-adjacent exterior weights");

    const Grid& grid = *grid_;
    const int dim = grid.dim();
    const int m = grid.n() - 1;  // interior nodes per axis
    reach_ = m - 1;              // every interior offset has an exact cell integral

    std::vector<double> gx, gw;
    gauss_legendre(kKernelGauss, gx, gw);
    const double ex = dim + sq_;
    const int width = 2 * reach_ + 1;
    // computed on lexicographically positive offsets, mirrored so that
    // kappa(-D) is bit-identical to kappa(D)
    if (dim == 2) {
        kappa_.assign(static_cast<std::size_t>(width) * width, 0.0);
        parallel_for(width, 8, [&](std::int64_t b0, std::int64_t b1) {
            for (std::int64_t row = b0; row < b1; ++row) {
                const int dx = static_cast<int>(row) - reach_;
                for (int dy = -reach_; dy <= reach_; ++dy) {
                    if (dx < 0 || (dx == 0 && dy <= 0)) continue;
                    double v = 0;
                    for (std::size_t i = 0; i < gx.size(); ++i)
                        for (std::size_t j = 0; j < gx.size(); ++j) {
                            const double zx = (dx + gx[i]) * grid.h(0);
                            const double zy = (dy + gx[j]) * grid.h(1);
                            v += gw[i] * gw[j] * std::pow(zx * zx + zy * zy, -ex / 2);
                        }
                    kappa_[static_cast<std::size_t>(row) * width
                           + static_cast<std::size_t>(dy + reach_)] = v * grid.cell_volume();
                }
            }
        });
        for (int dx = 0; dx <= reach_; ++dx)
            for (int dy = -reach_; dy <= reach_; ++dy) {
                if (dx == 0 && dy <= 0) continue;
                kappa_[static_cast<std::size_t>(-dx + reach_) * width
                       + static_cast<std::size_t>(-dy + reach_)] =
                    kappa_[static_cast<std::size_t>(dx + reach_) * width
                           + static_cast<std::size_t>(dy + reach_)];
            }
    } else {
        kappa_.assign(static_cast<std::size_t>(width) * width * width, 0.0);
        parallel_for(width, 2, [&](std::int64_t b0, std::int64_t b1) {
            for (std::int64_t row = b0; row < b1; ++row) {
                const int dx = static_cast<int>(row) - reach_;
                for (int dy = -reach_; dy <= reach_; ++dy)
                    for (int dz = -reach_; dz <= reach_; ++dz) {
                        if (dx < 0 || (dx == 0 && (dy < 0 || (dy == 0 && dz <= 0)))) continue;
                        double v = 0;
                        for (std::size_t i = 0; i < gx.size(); ++i)
                            for (std::size_t j = 0; j < gx.size(); ++j)
                                for (std::size_t k = 0; k < gx.size(); ++k) {
                                    const double zx = (dx + gx[i]) * grid.h(0);
                                    const double zy = (dy + gx[j]) * grid.h(1);
                                    const double zz = (dz + gx[k]) * grid.h(2);
                                    v += gw[i] * gw[j] * gw[k]
                                         * std::pow(zx * zx + zy * zy + zz * zz, -ex / 2);
                                }
                        kappa_[(static_cast<std::size_t>(row) * width
                                + static_cast<std::size_t>(dy + reach_))
                                   * width
                               + static_cast<std::size_t>(dz + reach_)] = v * grid.cell_volume();
                    }
            }
        });
        for (int dx = 0; dx <= reach_; ++dx)
            for (int dy = -reach_; dy <= reach_; ++dy)
                for (int dz = -reach_; dz <= reach_; ++dz) {
                    if (dx == 0 && (dy < 0 || (dy == 0 && dz <= 0))) continue;
                    kappa_[(static_cast<std::size_t>(-dx + reach_) * width
                            + static_cast<std::size_t>(-dy + reach_))
                               * width
                           + static_cast<std::size_t>(-dz + reach_)] =
                        kappa_[(static_cast<std::size_t>(dx + reach_) * width
                                + static_cast<std::size_t>(dy + reach_))
                                   * width
                               + static_cast<std::size_t>(dz + reach_)];
                }
    }

    // Exterior coefficients: exact kernel integral over the complement of the
    // interior-node cell coverage (the box shrunk by half a cell).
    const std::int64_t M = grid.interior_count();
    tau_.resize(static_cast<std::size_t>(M));
    std::vector<double> qx, qw, cx, cw;
    gauss_legendre(10, qx, qw);  // per graded subinterval
    gauss_legendre(32, cx, cw);
    std::array<double, 3> blo{}, bhi{};
    for (int a = 0; a < dim; ++a) {
        blo[a] = grid.lo()[a] + grid.h(a) / 2;
        bhi[a] = grid.lo()[a] + grid.side()[a] - grid.h(a) / 2;
    }
    parallel_for(M, 1024, [&](std::int64_t b0, std::int64_t b1) {
        for (std::int64_t k = b0; k < b1; ++k) {
            auto x = grid.interior_coord(k);
            double d[6];
            for (int a = 0; a < dim; ++a) {
                d[2 * a] = x[a] - blo[a];
                d[2 * a + 1] = bhi[a] - x[a];
            }
            if (dim == 2) {
                const double dd[4] = {d[0], d[1], d[2], d[3]};
                tau_[static_cast<std::size_t>(k)] =
                    box_complement_integral(2, dd, sq_, qx, qw, cx, cw);
            } else {
                tau_[static_cast<std::size_t>(k)] =
                    box_complement_integral(3, d, sq_, qx, qw, cx, cw);
            }
        }
    });
}

double NonlocalAssembly::kappa_at(const int* d) const {
    const int width = 2 * reach_ + 1;
    std::size_t idx = static_cast<std::size_t>(d[0] + reach_);
    for (int a = 1; a < grid_->dim(); ++a)
        idx = idx * width + static_cast<std::size_t>(d[a] + reach_);
    return kappa_[idx];
}

double NonlocalAssembly::pair_weight(std::int64_t i, std::int64_t j) const {
    const Grid& g = *grid_;
    const auto ia = g.interior_index(i);
    const auto ja = g.interior_index(j);
    int d[3] = {0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) d[a] = ja[a] - ia[a];
    return g.cell_volume() * kappa_at(d);
}

double NonlocalAssembly::cell_complement_integral() const {
    const Grid& g = *grid_;
    std::vector<double> qx, qw, cx, cw;
    gauss_legendre(10, qx, qw);  // per graded subinterval
    gauss_legendre(32, cx, cw);
    double d[6];
    for (int a = 0; a < g.dim(); ++a) d[2 * a] = d[2 * a + 1] = g.h(a) / 2;
    return box_complement_integral(g.dim(), d, sq_, qx, qw, cx, cw);
}

void NonlocalAssembly::check_grid(const DiscreteField& u) const {
    if (u.grid_ptr().get() != grid_.get())
        throw AssemblyError("assembly and field were built on different grids");
}

double NonlocalAssembly::energy(const DiscreteField& u) const {
    check_grid(u);
    const Grid& g = *grid_;
    const std::int64_t M = g.interior_count();
    const double* c = u.data();
    const double q = q_;
    const double vol = g.cell_volume();
    const int m = g.n() - 1;
    const int width = 2 * reach_ + 1;

    double pair_sum = 0;
    if (g.dim() == 2) {
        // offset-major over unordered offsets: (dx, dy) with dx > 0, or dx == 0 and dy > 0
        pair_sum = chunked_reduce(width, 4, [&](std::int64_t r0_, std::int64_t r1_) {
            double acc = 0;
            for (std::int64_t row = r0_; row < r1_; ++row) {
                const int dx = static_cast<int>(row) - reach_;
                if (dx < 0) continue;
                for (int dy = -reach_; dy <= reach_; ++dy) {
                    if (dx == 0 && dy <= 0) continue;
                    const double kap =
                        kappa_[static_cast<std::size_t>(row) * width
                               + static_cast<std::size_t>(dy + reach_)];
                    const int ilo = std::max(0, -dx), ihi = std::min(m, m - dx);
                    const int jlo = std::max(0, -dy), jhi = std::min(m, m - dy);
                    double s = 0;
                    for (int i = ilo; i < ihi; ++i) {
                        const double* a = c + static_cast<std::int64_t>(i) * m;
                        const double* b = c + static_cast<std::int64_t>(i + dx) * m + dy;
                        for (int j = jlo; j < jhi; ++j)
                            s += std::pow(std::abs(a[j] - b[j]), q);
                    }
                    acc += kap * s;
                }
            }
            return acc;
        });
    } else {
        pair_sum = chunked_reduce(width, 2, [&](std::int64_t r0_, std::int64_t r1_) {
            double acc = 0;
            const std::int64_t mm = static_cast<std::int64_t>(m) * m;
            for (std::int64_t row = r0_; row < r1_; ++row) {
                const int dx = static_cast<int>(row) - reach_;
                if (dx < 0) continue;
                for (int dy = -reach_; dy <= reach_; ++dy)
                    for (int dz = -reach_; dz <= reach_; ++dz) {
                        if (dx == 0 && (dy < 0 || (dy == 0 && dz <= 0))) continue;
                        const double kap =
                            kappa_[(static_cast<std::size_t>(row) * width
                                    + static_cast<std::size_t>(dy + reach_))
                                       * width
                                   + static_cast<std::size_t>(dz + reach_)];
                        const int ilo = std::max(0, -dx), ihi = std::min(m, m - dx);
                        const int jlo = std::max(0, -dy), jhi = std::min(m, m - dy);
                        const int llo = std::max(0, -dz), lhi = std::min(m, m - dz);
                        double ssum = 0;
                        for (int i = ilo; i < ihi; ++i)
                            for (int j = jlo; j < jhi; ++j) {
                                const double* a = c + i * mm + static_cast<std::int64_t>(j) * m;
                                const double* b = c + (i + dx) * mm
                                                  + static_cast<std::int64_t>(j + dy) * m + dz;
                                for (int l = llo; l < lhi; ++l)
                                    ssum += std::pow(std::abs(a[l] - b[l]), q);
                            }
                        acc += kap * ssum;
                    }
            }
            return acc;
        });
    }
    pair_sum *= vol;

    double ext = 0;
    for (std::int64_t i = 0; i < M; ++i) ext += std::pow(std::abs(c[i]), q) * tau_[i];
    ext *= vol;
    return 2 * pair_sum + 2 * ext;
}

namespace {

inline double signed_pow(double v, double e) {
    if (v == 0.0) return 0.0;
    const double a = std::pow(std::abs(v), e);
    return v > 0 ? a : -a;
}

} // namespace

void NonlocalAssembly::form(const DiscreteField& u, std::vector<double>& out) const {
    check_grid(u);
    const Grid& g = *grid_;
    const std::int64_t M = g.interior_count();
    const double* c = u.data();
    const double q = q_;
    const double vol = g.cell_volume();
    const int m = g.n() - 1;
    const int width = 2 * reach_ + 1;
    out.assign(static_cast<std::size_t>(M), 0.0);
    double* o = out.data();

    if (g.dim() == 2) {
        // each worker owns a band of output rows; ordered offsets inside
        parallel_for(m, 8, [&](std::int64_t i0, std::int64_t i1) {
            for (std::int64_t i = i0; i < i1; ++i) {
                for (int dx = -reach_; dx <= reach_; ++dx) {
                    const std::int64_t ii = i + dx;
                    if (ii < 0 || ii >= m) continue;
                    const double* krow =
                        kappa_.data() + static_cast<std::size_t>(dx + reach_) * width + reach_;
                    const double* a = c + i * m;
                    const double* b = c + ii * m;
                    double* orow = o + i * m;
                    for (int dy = -reach_; dy <= reach_; ++dy) {
                        if (dx == 0 && dy == 0) continue;
                        const double kap = krow[dy];
                        const int jlo = std::max(0, -dy), jhi = std::min(m, m - dy);
                        for (int j = jlo; j < jhi; ++j)
                            orow[j] += kap * signed_pow(a[j] - b[j + dy], q - 1);
                    }
                }
                const double* a = c + i * m;
                double* orow = o + i * m;
                const double* trow = tau_.data() + i * m;
                for (int j = 0; j < m; ++j)
                    orow[j] = 2 * vol * (orow[j] + signed_pow(a[j], q - 1) * trow[j]);
            }
        });
    } else {
        const std::int64_t mm = static_cast<std::int64_t>(m) * m;
        parallel_for(m, 2, [&](std::int64_t i0, std::int64_t i1) {
            for (std::int64_t i = i0; i < i1; ++i) {
                for (int dx = -reach_; dx <= reach_; ++dx) {
                    const std::int64_t ii = i + dx;
                    if (ii < 0 || ii >= m) continue;
                    for (int dy = -reach_; dy <= reach_; ++dy) {
                        const int jlo = std::max(0, -dy), jhi = std::min(m, m - dy);
                        for (std::int64_t j = jlo; j < jhi; ++j) {
                            const double* a = c + i * mm + j * m;
                            const double* b = c + ii * mm + (j + dy) * m;
                            double* orow = o + i * mm + j * m;
                            const double* krow =
                                kappa_.data()
                                + ((static_cast<std::size_t>(dx + reach_)) * width
                                   + static_cast<std::size_t>(dy + reach_))
                                      * width
                                + reach_;
                            for (int dz = -reach_; dz <= reach_; ++dz) {
                                if (dx == 0 && dy == 0 && dz == 0) continue;
                                const double kap = krow[dz];
                                const int llo = std::max(0, -dz), lhi = std::min(m, m - dz);
                                for (int l = llo; l < lhi; ++l)
                                    orow[l] += kap * signed_pow(a[l] - b[l + dz], q - 1);
                            }
                        }
                    }
                }
                for (std::int64_t j = 0; j < m; ++j) {
                    const double* a = c + i * mm + j * m;
                    double* orow = o + i * mm + j * m;
                    const double* trow = tau_.data() + i * mm + j * m;
                    for (int l = 0; l < m; ++l)
                        orow[l] = 2 * vol * (orow[l] + signed_pow(a[l], q - 1) * trow[l]);
                }
            }
        });
    }
}

AssemblyPtr build_assembly(GridPtr g, double s, double q) {
    return std::make_shared<NonlocalAssembly>(std::move(g), s, q);
}

DiscreteField residual_apply(const DiscreteField& u, const ProblemConfig& cfg,
                             const Weights& w, const NonlocalAssembly& asm_) {
    asm_.check_grid(u);
    std::vector<double> loc, frac, fa, fb;
    local_p_form(u, cfg.p, loc);
    asm_.form(u, frac);
    weighted_lt_form(w.a, u, cfg.delta, fa);
    weighted_lt_form(w.b, u, cfg.r, fb);
    DiscreteField out(u.grid_ptr());
    const double cr = cfg.c_r();
    for (std::int64_t k = 0; k < out.size(); ++k)
        out[k] = loc[k] + frac[k] - cfg.lambda * fa[k] - cr * fb[k];
    return out;
}

} // namespace nlab
