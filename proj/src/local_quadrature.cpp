#include <cmath>
#include <vector>

#include "nlab/operators.hpp"
#include "nlab/parallel.hpp"

namespace nlab {

namespace {

constexpr double kGaussOffset = 0.28867513459481287;  // 1/(2*sqrt(3))

// Nodal values on the full lattice, zero boundary for fields.
std::vector<double> full_values(const DiscreteField& u) {
    const Grid& g = u.grid();
    std::vector<double> full(static_cast<std::size_t>(g.node_count()), 0.0);
    const int n = g.n();
    const std::int64_t m = n - 1;
    if (g.dim() == 2) {
        const std::int64_t stride = n + 1;
        for (std::int64_t k = 0; k < u.size(); ++k) {
            const std::int64_t i = k / m + 1, j = k % m + 1;
            full[static_cast<std::size_t>(i * stride + j)] = u[k];
        }
    } else {
        const std::int64_t stride = n + 1;
        for (std::int64_t k = 0; k < u.size(); ++k) {
            const std::int64_t i = k / (m * m) + 1;
            const std::int64_t rem = k % (m * m);
            const std::int64_t j = rem / m + 1, l = rem % m + 1;
            full[static_cast<std::size_t>((i * stride + j) * stride + l)] = u[k];
        }
    }
    return full;
}

struct Cell2 {
    double c00, c10, c01, c11;
};

struct Cell3 {
    double c[8];
};

template <class F>
void for_cells_2d(const Grid& g, const std::vector<double>& full, F&& f) {
    const int n = g.n();
    const std::int64_t stride = n + 1;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const std::size_t base = static_cast<std::size_t>(i * stride + j);
            f(Cell2{full[base], full[base + stride], full[base + 1], full[base + stride + 1]});
        }
    }
}

template <class F>
void for_cells_3d(const Grid& g, const std::vector<double>& full, F&& f) {
    const int n = g.n();
    const std::int64_t s1 = n + 1;
    const std::int64_t s0 = s1 * s1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                const std::size_t b = static_cast<std::size_t>(i * s0 + j * s1 + l);
                Cell3 c;
                c.c[0] = full[b];
                c.c[1] = full[b + s0];
                c.c[2] = full[b + s1];
                c.c[3] = full[b + s0 + s1];
                c.c[4] = full[b + 1];
                c.c[5] = full[b + s0 + 1];
                c.c[6] = full[b + s1 + 1];
                c.c[7] = full[b + s0 + s1 + 1];
                f(c);
            }
}

inline double interp2(const Cell2& c, double wx, double wy) {
    return c.c00 * (1 - wx) * (1 - wy) + c.c10 * wx * (1 - wy) + c.c01 * (1 - wx) * wy
           + c.c11 * wx * wy;
}

inline double interp3(const Cell3& c, double wx, double wy, double wz) {
    const double v00 = c.c[0] * (1 - wx) + c.c[1] * wx;
    const double v10 = c.c[2] * (1 - wx) + c.c[3] * wx;
    const double v01 = c.c[4] * (1 - wx) + c.c[5] * wx;
    const double v11 = c.c[6] * (1 - wx) + c.c[7] * wx;
    const double w0 = v00 * (1 - wy) + v10 * wy;
    const double w1 = v01 * (1 - wy) + v11 * wy;
    return w0 * (1 - wz) + w1 * wz;
}

const double kG[2] = {0.5 - kGaussOffset, 0.5 + kGaussOffset};

} // namespace

double local_p_energy(const DiscreteField& u, double p) {
    const Grid& g = u.grid();
    auto full = full_values(u);
    const double wq = g.cell_volume() / (g.dim() == 2 ? 4.0 : 8.0);
    double tot = 0;
    if (g.dim() == 2) {
        const double hx = g.h(0), hy = g.h(1);
        for_cells_2d(g, full, [&](const Cell2& c) {
            double cell = 0;
            for (double wx : kG)
                for (double wy : kG) {
                    const double gx = ((c.c10 - c.c00) * (1 - wy) + (c.c11 - c.c01) * wy) / hx;
                    const double gy = ((c.c01 - c.c00) * (1 - wx) + (c.c11 - c.c10) * wx) / hy;
                    cell += std::pow(gx * gx + gy * gy, p / 2);
                }
            tot += wq * cell;
        });
    } else {
        const double hx = g.h(0), hy = g.h(1), hz = g.h(2);
        for_cells_3d(g, full, [&](const Cell3& c) {
            double cell = 0;
            for (double wx : kG)
                for (double wy : kG)
                    for (double wz : kG) {
                        const double gx = (interp3(c, 1, wy, wz) - interp3(c, 0, wy, wz)) / hx;
                        const double gy = (interp3(c, wx, 1, wz) - interp3(c, wx, 0, wz)) / hy;
                        const double gz = (interp3(c, wx, wy, 1) - interp3(c, wx, wy, 0)) / hz;
                        cell += std::pow(gx * gx + gy * gy + gz * gz, p / 2);
                    }
            tot += wq * cell;
        });
    }
    return tot;
}

namespace {

inline double pow_pm2(double m2, double p) {
    // |g|^{p-2} with the p<2 singularity at zero gradient cut to 0
    if (m2 <= 0) return 0.0;
    return std::pow(m2, (p - 2) / 2);
}

} // namespace

void local_p_form(const DiscreteField& u, double p, std::vector<double>& out) {
    const Grid& g = u.grid();
    auto full = full_values(u);
    std::vector<double> acc(full.size(), 0.0);
    const int n = g.n();
    const double wq = g.cell_volume() / (g.dim() == 2 ? 4.0 : 8.0);
    if (g.dim() == 2) {
        const double hx = g.h(0), hy = g.h(1);
        const std::int64_t stride = n + 1;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const std::size_t b = static_cast<std::size_t>(i * stride + j);
                const Cell2 c{full[b], full[b + stride], full[b + 1], full[b + stride + 1]};
                for (double wx : kG)
                    for (double wy : kG) {
                        const double gx = ((c.c10 - c.c00) * (1 - wy) + (c.c11 - c.c01) * wy) / hx;
                        const double gy = ((c.c01 - c.c00) * (1 - wx) + (c.c11 - c.c10) * wx) / hy;
                        const double m2 = pow_pm2(gx * gx + gy * gy, p);
                        const double sx = wq * m2 * gx / hx;
                        const double sy = wq * m2 * gy / hy;
                        acc[b] += -sx * (1 - wy) - sy * (1 - wx);
                        acc[b + stride] += sx * (1 - wy) - sy * wx;
                        acc[b + 1] += -sx * wy + sy * (1 - wx);
                        acc[b + stride + 1] += sx * wy + sy * wx;
                    }
            }
        out.assign(static_cast<std::size_t>(u.size()), 0.0);
        const std::int64_t m = n - 1;
        for (std::int64_t k = 0; k < u.size(); ++k) {
            const std::int64_t i = k / m + 1, j = k % m + 1;
            out[static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(i * stride + j)];
        }
    } else {
        const double hx = g.h(0), hy = g.h(1), hz = g.h(2);
        const std::int64_t s1 = n + 1, s0 = s1 * s1;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    const std::size_t b = static_cast<std::size_t>(i * s0 + j * s1 + l);
                    Cell3 c;
                    c.c[0] = full[b]; c.c[1] = full[b + s0];
                    c.c[2] = full[b + s1]; c.c[3] = full[b + s0 + s1];
                    c.c[4] = full[b + 1]; c.c[5] = full[b + s0 + 1];
                    c.c[6] = full[b + s1 + 1]; c.c[7] = full[b + s0 + s1 + 1];
                    const std::size_t off[8] = {b, b + s0, b + s1, b + s0 + s1,
                                                b + 1, b + s0 + 1, b + s1 + 1, b + s0 + s1 + 1};
                    for (double wx : kG)
                        for (double wy : kG)
                            for (double wz : kG) {
                                const double gx = (interp3(c, 1, wy, wz) - interp3(c, 0, wy, wz)) / hx;
                                const double gy = (interp3(c, wx, 1, wz) - interp3(c, wx, 0, wz)) / hy;
                                const double gz = (interp3(c, wx, wy, 1) - interp3(c, wx, wy, 0)) / hz;
                                const double m2 = pow_pm2(gx * gx + gy * gy + gz * gz, p);
                                // d gx / d c_k etc. via shape function differences
                                const double wxs[2] = {1 - wx, wx};
                                const double wys[2] = {1 - wy, wy};
                                const double wzs[2] = {1 - wz, wz};
                                for (int a = 0; a < 8; ++a) {
                                    const int ix = (a >> 0) & 1;  // matches c ordering below
                                    const int iy = (a >> 1) & 1;
                                    const int iz = (a >> 2) & 1;
                                    // c index mapping: a = ix + 2*iy + 4*iz
                                    const double dgx = (ix ? 1.0 : -1.0) * wys[iy] * wzs[iz] / hx;
                                    const double dgy = (iy ? 1.0 : -1.0) * wxs[ix] * wzs[iz] / hy;
                                    const double dgz = (iz ? 1.0 : -1.0) * wxs[ix] * wys[iy] / hz;
                                    acc[off[a]] += wq * m2 * (gx * dgx + gy * dgy + gz * dgz);
                                }
                            }
                }
        out.assign(static_cast<std::size_t>(u.size()), 0.0);
        const std::int64_t m = n - 1;
        for (std::int64_t k = 0; k < u.size(); ++k) {
            const std::int64_t i = k / (m * m) + 1;
            const std::int64_t rem = k % (m * m);
            const std::int64_t j = rem / m + 1, l = rem % m + 1;
            out[static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(i * s0 + j * s1 + l)];
        }
    }
}

namespace {

double lt_norm_on_full(const Grid& g, const std::vector<double>& full, double t) {
    const double wq = g.cell_volume() / (g.dim() == 2 ? 4.0 : 8.0);
    double tot = 0;
    if (g.dim() == 2) {
        for_cells_2d(g, full, [&](const Cell2& c) {
            double cell = 0;
            for (double wx : kG)
                for (double wy : kG) cell += std::pow(std::abs(interp2(c, wx, wy)), t);
            tot += wq * cell;
        });
    } else {
        for_cells_3d(g, full, [&](const Cell3& c) {
            double cell = 0;
            for (double wx : kG)
                for (double wy : kG)
                    for (double wz : kG)
                        cell += std::pow(std::abs(interp3(c, wx, wy, wz)), t);
            tot += wq * cell;
        });
    }
    return tot;
}

} // namespace

double lt_norm(const DiscreteField& u, double t) {
    if (t < 1) throw DomainError("lt_norm needs t >= 1");
    return lt_norm_on_full(u.grid(), full_values(u), t);
}

double lt_norm(const WeightTable& w, double t) {
    if (t < 1) throw DomainError("lt_norm needs t >= 1");
    return lt_norm_on_full(w.grid(), w.values(), t);
}

double weighted_lt_integral(const WeightTable& w, const DiscreteField& u, double t) {
    const Grid& g = u.grid();
    if (&g != &w.grid()) throw AssemblyError("weight table and field use different grids");
    auto full = full_values(u);
    const auto& fw = w.values();
    const double wq = g.cell_volume() / (g.dim() == 2 ? 4.0 : 8.0);
    const int n = g.n();
    double tot = 0;
    if (g.dim() == 2) {
        const std::int64_t stride = n + 1;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const std::size_t b = static_cast<std::size_t>(i * stride + j);
                const Cell2 c{full[b], full[b + stride], full[b + 1], full[b + stride + 1]};
                const Cell2 cw{fw[b], fw[b + stride], fw[b + 1], fw[b + stride + 1]};
                double cell = 0;
                for (double wx : kG)
                    for (double wy : kG)
                        cell += interp2(cw, wx, wy) * std::pow(std::abs(interp2(c, wx, wy)), t);
                tot += wq * cell;
            }
    } else {
        const std::int64_t s1 = n + 1, s0 = s1 * s1;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    const std::size_t b = static_cast<std::size_t>(i * s0 + j * s1 + l);
                    Cell3 c, cw;
                    const std::size_t off[8] = {b, b + s0, b + s1, b + s0 + s1,
                                                b + 1, b + s0 + 1, b + s1 + 1, b + s0 + s1 + 1};
                    for (int a = 0; a < 8; ++a) {
                        c.c[a] = full[off[a]];
                        cw.c[a] = fw[off[a]];
                    }
                    double cell = 0;
                    for (double wx : kG)
                        for (double wy : kG)
                            for (double wz : kG)
                                cell += interp3(cw, wx, wy, wz)
                                        * std::pow(std::abs(interp3(c, wx, wy, wz)), t);
                    tot += wq * cell;
                }
    }
    return tot;
}

namespace {

inline double signed_pow(double v, double e) {
    // [v]^e = sign(v) |v|^e, with the value at 0 pinned to 0
    if (v == 0.0) return 0.0;
    const double a = std::pow(std::abs(v), e);
    return v > 0 ? a : -a;
}

} // namespace

void weighted_lt_form(const WeightTable& w, const DiscreteField& u, double t,
                      std::vector<double>& out) {
    const Grid& g = u.grid();
    auto full = full_values(u);
    const auto& fw = w.values();
    std::vector<double> acc(full.size(), 0.0);
    const double wq = g.cell_volume() / (g.dim() == 2 ? 4.0 : 8.0);
    const int n = g.n();
    if (g.dim() == 2) {
        const std::int64_t stride = n + 1;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const std::size_t b = static_cast<std::size_t>(i * stride + j);
                const Cell2 c{full[b], full[b + stride], full[b + 1], full[b + stride + 1]};
                const Cell2 cw{fw[b], fw[b + stride], fw[b + 1], fw[b + stride + 1]};
                for (double wx : kG)
                    for (double wy : kG) {
                        const double s = wq * interp2(cw, wx, wy)
                                         * signed_pow(interp2(c, wx, wy), t - 1);
                        acc[b] += s * (1 - wx) * (1 - wy);
                        acc[b + stride] += s * wx * (1 - wy);
                        acc[b + 1] += s * (1 - wx) * wy;
                        acc[b + stride + 1] += s * wx * wy;
                    }
            }
        out.assign(static_cast<std::size_t>(u.size()), 0.0);
        const std::int64_t m = n - 1;
        for (std::int64_t k = 0; k < u.size(); ++k) {
            const std::int64_t i = k / m + 1, j = k % m + 1;
            out[static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(i * stride + j)];
        }
    } else {
        const std::int64_t s1 = n + 1, s0 = s1 * s1;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    const std::size_t b = static_cast<std::size_t>(i * s0 + j * s1 + l);
                    const std::size_t off[8] = {b, b + s0, b + s1, b + s0 + s1,
                                                b + 1, b + s0 + 1, b + s1 + 1, b + s0 + s1 + 1};
                    Cell3 c, cw;
                    for (int a = 0; a < 8; ++a) {
                        c.c[a] = full[off[a]];
                        cw.c[a] = fw[off[a]];
                    }
                    for (double wx : kG)
                        for (double wy : kG)
                            for (double wz : kG) {
                                const double s = wq * interp3(cw, wx, wy, wz)
                                                 * signed_pow(interp3(c, wx, wy, wz), t - 1);
                                const double wxs[2] = {1 - wx, wx};
                                const double wys[2] = {1 - wy, wy};
                                const double wzs[2] = {1 - wz, wz};
                                for (int a = 0; a < 8; ++a) {
                                    const int ix = a & 1, iy = (a >> 1) & 1, iz = (a >> 2) & 1;
                                    acc[off[a]] += s * wxs[ix] * wys[iy] * wzs[iz];
                                }
                            }
                }
        out.assign(static_cast<std::size_t>(u.size()), 0.0);
        const std::int64_t m = n - 1;
        for (std::int64_t k = 0; k < u.size(); ++k) {
            const std::int64_t i = k / (m * m) + 1;
            const std::int64_t rem = k % (m * m);
            const std::int64_t j = rem / m + 1, l = rem % m + 1;
            out[static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(i * s0 + j * s1 + l)];
        }
    }
}

} // namespace nlab
