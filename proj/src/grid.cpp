#include "nlab/grid.hpp"

#include <algorithm>
#include <cmath>

namespace nlab {

Grid::Grid(int dim, std::array<double, 3> lo, std::array<double, 3> side, int n)
    : dim_(dim), n_(n), lo_(lo), side_(side) {
    if (dim < 2 || dim > 3) throw InvalidGrid("grid dimension must be 2 or 3");
    if (n < 2) throw InvalidGrid("grid_n must be at least 2");
    cell_vol_ = 1.0;
    for (int a = 0; a < 3; ++a) {
        if (a < dim) {
            if (!(side[a] > 0)) throw InvalidGrid("domain side must be positive");
            h_[a] = side[a] / n;
            cell_vol_ *= h_[a];
        } else {
            h_[a] = 0.0;
        }
    }
    interior_count_ = 1;
    node_count_ = 1;
    cell_count_ = 1;
    for (int a = 0; a < dim; ++a) {
        interior_count_ *= (n - 1);
        node_count_ *= (n + 1);
        cell_count_ *= n;
    }
}

double Grid::min_h() const {
    double m = h_[0];
    for (int a = 1; a < dim_; ++a) m = std::min(m, h_[a]);
    return m;
}

double Grid::box_volume() const {
    double v = 1;
    for (int a = 0; a < dim_; ++a) v *= side_[a];
    return v;
}

std::array<int, 3> Grid::interior_index(std::int64_t k) const {
    std::array<int, 3> idx{0, 0, 0};
    const int m = n_ - 1;
    if (dim_ == 2) {
        idx[0] = static_cast<int>(k / m) + 1;
        idx[1] = static_cast<int>(k % m) + 1;
    } else {
        idx[0] = static_cast<int>(k / (static_cast<std::int64_t>(m) * m)) + 1;
        const std::int64_t rem = k % (static_cast<std::int64_t>(m) * m);
        idx[1] = static_cast<int>(rem / m) + 1;
        idx[2] = static_cast<int>(rem % m) + 1;
    }
    return idx;
}

std::int64_t Grid::interior_rank(const std::array<int, 3>& idx) const {
    const std::int64_t m = n_ - 1;
    if (dim_ == 2) return (idx[0] - 1) * m + (idx[1] - 1);
    return ((idx[0] - 1) * m + (idx[1] - 1)) * m + (idx[2] - 1);
}

std::array<double, 3> Grid::interior_coord(std::int64_t k) const {
    auto idx = interior_index(k);
    std::array<double, 3> x{0, 0, 0};
    for (int a = 0; a < dim_; ++a) x[a] = lo_[a] + idx[a] * h_[a];
    return x;
}

std::array<int, 3> Grid::node_index(std::int64_t k) const {
    std::array<int, 3> idx{0, 0, 0};
    const std::int64_t m = n_ + 1;
    if (dim_ == 2) {
        idx[0] = static_cast<int>(k / m);
        idx[1] = static_cast<int>(k % m);
    } else {
        idx[0] = static_cast<int>(k / (m * m));
        const std::int64_t rem = k % (m * m);
        idx[1] = static_cast<int>(rem / m);
        idx[2] = static_cast<int>(rem % m);
    }
    return idx;
}

std::array<double, 3> Grid::node_coord(std::int64_t k) const {
    auto idx = node_index(k);
    std::array<double, 3> x{0, 0, 0};
    for (int a = 0; a < dim_; ++a) x[a] = lo_[a] + idx[a] * h_[a];
    return x;
}

bool Grid::is_interior(const std::array<int, 3>& idx) const {
    for (int a = 0; a < dim_; ++a)
        if (idx[a] < 1 || idx[a] > n_ - 1) return false;
    return true;
}

GridPtr build_grid(int dim, std::array<double, 3> lo, std::array<double, 3> side, int n) {
    return std::make_shared<Grid>(dim, lo, side, n);
}

GridPtr build_grid(const ProblemConfig& cfg) {
    return build_grid(cfg.dim_N, cfg.domain_lo, cfg.domain_side, cfg.grid_n);
}

DiscreteField::DiscreteField(GridPtr g, double fill)
    : grid_(std::move(g)), coeffs_(static_cast<std::size_t>(grid_->interior_count()), fill) {}

DiscreteField::DiscreteField(GridPtr g, std::vector<double> coeffs)
    : grid_(std::move(g)), coeffs_(std::move(coeffs)) {
    if (static_cast<std::int64_t>(coeffs_.size()) != grid_->interior_count())
        throw SpecError("field length does not match interior node count");
}

bool DiscreteField::all_finite() const {
    for (double c : coeffs_)
        if (!std::isfinite(c)) return false;
    return true;
}

double DiscreteField::max_abs() const {
    double m = 0;
    for (double c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

double DiscreteField::min_value() const {
    double m = coeffs_.empty() ? 0.0 : coeffs_[0];
    for (double c : coeffs_) m = std::min(m, c);
    return m;
}

double DiscreteField::max_value() const {
    double m = coeffs_.empty() ? 0.0 : coeffs_[0];
    for (double c : coeffs_) m = std::max(m, c);
    return m;
}

DiscreteField& DiscreteField::operator*=(double c) {
    for (double& x : coeffs_) x *= c;
    return *this;
}

DiscreteField& DiscreteField::axpy(double a, const DiscreteField& x) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
    return *this;
}

double dot(const DiscreteField& a, const DiscreteField& b) {
    double s = 0;
    const std::size_t n = a.coeffs().size();
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

DiscreteField abs_field(const DiscreteField& u) {
    DiscreteField v = u;
    for (std::int64_t i = 0; i < v.size(); ++i) v[i] = std::abs(v[i]);
    return v;
}

namespace {

double bump_profile(double r2) {
    // exp(1 - 1/(1-r2)) on r2 < 1, zero outside; peak value 1 at r2 = 0
    if (r2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r2));
}

double eval_weight(const WeightSpec& w, const Grid& g, const std::array<double, 3>& x) {
    switch (w.kind) {
        case WeightSpec::Kind::constant:
            return w.value;
        case WeightSpec::Kind::sinusoid: {
            double prod = 1.0;
            for (int a = 0; a < g.dim(); ++a) {
                if (w.freq[a] == 0.0) continue;
                const double arg = 2.0 * M_PI * w.freq[a] * (x[a] - g.lo()[a]) / g.side()[a]
                                   + w.phase[a];
                prod *= std::sin(arg);
            }
            return w.offset + w.amplitude * prod;
        }
        case WeightSpec::Kind::bump: {
            double r2 = 0;
            for (int a = 0; a < g.dim(); ++a) {
                const double d = x[a] - w.center[a];
                r2 += d * d;
            }
            return w.offset + w.amplitude * bump_profile(r2 / (w.radius * w.radius));
        }
        case WeightSpec::Kind::step: {
            // quintic smoothstep transition of width `width` centered at threshold
            const double t = (x[w.axis] - w.threshold) / w.width + 0.5;
            double sstep;
            if (t <= 0) sstep = 0;
            else if (t >= 1) sstep = 1;
            else sstep = t * t * t * (10 + t * (-15 + 6 * t));
            return w.low + (w.high - w.low) * sstep;
        }
        case WeightSpec::Kind::table:
            throw SpecError("tabulated weights are sampled directly, not evaluated");
    }
    return 0;
}

} // namespace

DiscreteField make_bump(GridPtr g, std::array<double, 3> center, double radius,
                        double amplitude) {
    if (!(radius > 0)) throw SpecError("bump radius must be positive");
    DiscreteField u(g);
    bool any = false;
    for (std::int64_t k = 0; k < u.size(); ++k) {
        auto x = g->interior_coord(k);
        double r2 = 0;
        for (int a = 0; a < g->dim(); ++a) {
            const double d = x[a] - center[a];
            r2 += d * d;
        }
        const double v = amplitude * bump_profile(r2 / (radius * radius));
        if (v != 0.0) any = true;
        u[k] = v;
    }
    if (!any && amplitude != 0.0)
        throw SpecError("bump support contains no interior node");
    return u;
}

WeightTable::WeightTable(GridPtr g, std::vector<double> values)
    : grid_(std::move(g)), values_(std::move(values)) {
    if (static_cast<std::int64_t>(values_.size()) != grid_->node_count())
        throw SpecError("weight table length does not match node count");
}

double WeightTable::sup_norm() const {
    double m = 0;
    for (double v : values_) {
        if (!std::isfinite(v)) throw SpecError("weight sample is not finite");
        m = std::max(m, std::abs(v));
    }
    return m;
}

DiscreteField WeightTable::interior_restriction() const {
    DiscreteField u(grid_);
    const int n = grid_->n();
    for (std::int64_t k = 0; k < grid_->node_count(); ++k) {
        auto idx = grid_->node_index(k);
        bool interior = true;
        for (int a = 0; a < grid_->dim(); ++a)
            if (idx[a] < 1 || idx[a] > n - 1) interior = false;
        if (interior) u[grid_->interior_rank(idx)] = values_[k];
    }
    return u;
}

WeightTable sample_weight_table(const WeightSpec& spec, GridPtr g) {
    if (spec.kind == WeightSpec::Kind::table) {
        if (static_cast<std::int64_t>(spec.table.size()) != g->node_count())
            throw SpecError("tabulated weight length " + std::to_string(spec.table.size())
                            + " does not match node count " + std::to_string(g->node_count()));
        return WeightTable(g, spec.table);
    }
    std::vector<double> vals(static_cast<std::size_t>(g->node_count()));
    for (std::int64_t k = 0; k < g->node_count(); ++k)
        vals[static_cast<std::size_t>(k)] = eval_weight(spec, *g, g->node_coord(k));
    WeightTable t(g, std::move(vals));
    t.sup_norm();  // rejects non-finite samples
    return t;
}

DiscreteField sample_weight(const WeightSpec& spec, GridPtr g) {
    return sample_weight_table(spec, g).interior_restriction();
}

Weights sample_weights(const ProblemConfig& cfg, GridPtr g) {
    return Weights{sample_weight_table(cfg.weight_a, g),
                   sample_weight_table(cfg.weight_b, g)};
}

} // namespace nlab
