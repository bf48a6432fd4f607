#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "nlab/config.hpp"
#include "nlab/errors.hpp"

namespace nlab {

// Uniform tensor grid on an axis-aligned box. Interior nodes carry the
// unknowns; boundary and exterior values are fixed to zero.
class Grid {
public:
    Grid(int dim, std::array<double, 3> lo, std::array<double, 3> side, int n);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double h(int axis) const { return h_[axis]; }
    double min_h() const;
    double cell_volume() const { return cell_vol_; }
    double box_volume() const;
    const std::array<double, 3>& lo() const { return lo_; }
    const std::array<double, 3>& side() const { return side_; }

    std::int64_t interior_count() const { return interior_count_; }
    std::int64_t node_count() const { return node_count_; }       // all nodes, (n+1)^dim
    std::int64_t cell_count() const { return cell_count_; }

    // interior node <-> multi-index (components in 1..n-1)
    std::array<int, 3> interior_index(std::int64_t k) const;
    std::int64_t interior_rank(const std::array<int, 3>& idx) const;
    std::array<double, 3> interior_coord(std::int64_t k) const;

    // full-node lattice (components in 0..n)
    std::array<int, 3> node_index(std::int64_t k) const;
    std::array<double, 3> node_coord(std::int64_t k) const;
    bool is_interior(const std::array<int, 3>& idx) const;

private:
    int dim_;
    int n_;
    std::array<double, 3> lo_;
    std::array<double, 3> side_;
    std::array<double, 3> h_;
    double cell_vol_;
    std::int64_t interior_count_, node_count_, cell_count_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(const ProblemConfig& cfg);
GridPtr build_grid(int dim, std::array<double, 3> lo, std::array<double, 3> side, int n);

// Coefficients on the interior nodes of a grid; zero on the boundary and on
// the exterior of the box.
class DiscreteField {
public:
    DiscreteField() = default;
    explicit DiscreteField(GridPtr g, double fill = 0.0);
    DiscreteField(GridPtr g, std::vector<double> coeffs);

    const Grid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    std::int64_t size() const { return static_cast<std::int64_t>(coeffs_.size()); }
    double* data() { return coeffs_.data(); }
    const double* data() const { return coeffs_.data(); }
    double operator[](std::int64_t i) const { return coeffs_[i]; }
    double& operator[](std::int64_t i) { return coeffs_[i]; }
    const std::vector<double>& coeffs() const { return coeffs_; }

    bool all_finite() const;
    double max_abs() const;
    double min_value() const;
    double max_value() const;

    DiscreteField& operator*=(double c);
    DiscreteField& axpy(double a, const DiscreteField& x);  // this += a*x

private:
    GridPtr grid_;
    std::vector<double> coeffs_;
};

double dot(const DiscreteField& a, const DiscreteField& b);
DiscreteField abs_field(const DiscreteField& u);

// Smooth compactly supported nonnegative field, amplitude at the center.
DiscreteField make_bump(GridPtr g, std::array<double, 3> center, double radius,
                        double amplitude);

// Weight samples at all grid nodes (boundary included), multilinearly
// interpolated by the quadratures.
class WeightTable {
public:
    WeightTable() = default;
    WeightTable(GridPtr g, std::vector<double> values);
    const Grid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::int64_t i) const { return values_[i]; }
    double sup_norm() const;
    DiscreteField interior_restriction() const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

WeightTable sample_weight_table(const WeightSpec& spec, GridPtr g);
// Spec-facing variant: nodal samples restricted to the interior nodes.
DiscreteField sample_weight(const WeightSpec& spec, GridPtr g);

struct Weights {
    WeightTable a;
    WeightTable b;
};

Weights sample_weights(const ProblemConfig& cfg, GridPtr g);

} // namespace nlab
