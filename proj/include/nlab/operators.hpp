#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "nlab/grid.hpp"

namespace nlab {

// ||u||^p of the W^{1,p}_0 Dirichlet seminorm: per-cell multilinear gradient
// integrated with the tensor 2-point Gauss rule.
double local_p_energy(const DiscreteField& u, double p);

// A_p(u, e_k) for every interior hat e_k, i.e. (1/p) d/du_k of local_p_energy.
void local_p_form(const DiscreteField& u, double p, std::vector<double>& out);

// ||u||_{L^t}^t by cell quadrature (multilinear interpolant, tensor 2-point
// rule); u is extended by zero over boundary nodes.
double lt_norm(const DiscreteField& u, double t);
// Same quadrature for a function sampled on all nodes (weights).
double lt_norm(const WeightTable& w, double t);

// int w |u|^t and (1/t) d/du_k of it, both with the same cell rule.
double weighted_lt_integral(const WeightTable& w, const DiscreteField& u, double t);
void weighted_lt_form(const WeightTable& w, const DiscreteField& u, double t,
                      std::vector<double>& out);

// Exact integral of |z|^{-(N+sq)} over {|z| > R}.
double tail_coefficient(double R, double s, double q, int N);

// Quadrature data for the Gagliardo double integral: near-offset kernel cell
// integrals, point-kernel far field, and the exterior coefficients tau_i
// (exact integral of the kernel over the complement of the half-cell-padded
// box, via half-space/edge/corner decomposition).
class NonlocalAssembly {
public:
    NonlocalAssembly(GridPtr g, double s, double q);

    const Grid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    double s() const { return s_; }
    double q() const { return q_; }
    double tau(std::int64_t i) const { return tau_[i]; }
    const std::vector<double>& tau() const { return tau_; }

    // w_ij for interior nodes i != j (vol_i * kappa_{j-i}; symmetric).
    double pair_weight(std::int64_t i, std::int64_t j) const;
    // Kernel cell integral for a lattice offset (volume of the z-cell included).
    double kappa_at(const int* d) const;
    // Exact integral of the kernel over the complement of a node's own cell;
    // equals tau_i plus the kernel mass of every other interior-node cell.
    double cell_complement_integral() const;

    // [u]^q_{s,q}: ordered pair sum + exterior part.
    double energy(const DiscreteField& u) const;
    // A_q(u, e_k) for every k, i.e. (1/q) d/du_k of energy.
    void form(const DiscreteField& u, std::vector<double>& out) const;

    void check_grid(const DiscreteField& u) const;

private:
    GridPtr grid_;
    double s_, q_, sq_;
    int reach_;                  // covers every interior offset
    std::vector<double> kappa_;  // (2*reach+1)^dim offset table of cell integrals
    std::vector<double> tau_;
};

using AssemblyPtr = std::shared_ptr<const NonlocalAssembly>;
AssemblyPtr build_assembly(GridPtr g, double s, double q);

// Riesz coordinates of <J'_lambda(u), .> against the interior nodal hats.
DiscreteField residual_apply(const DiscreteField& u, const ProblemConfig& cfg,
                             const Weights& w, const NonlocalAssembly& asm_);

} // namespace nlab
