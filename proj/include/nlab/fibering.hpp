#pragma once

#include <optional>
#include <vector>

#include "nlab/functional.hpp"

namespace nlab {

enum class FiberingCase { BothPositive, ANegBPos, APosBNeg, BothNegative };
const char* to_string(FiberingCase c);

struct GammaDerivatives {
    double gamma, dgamma, ddgamma;
    double m;  // m_u(t) = t^{p-d} P + t^{q-d} Q - c_r t^{r-d} B
};

GammaDerivatives eval_gamma(const EnergyBreakdown& bd, double t, const ProblemConfig& cfg);

FiberingCase classify_case(const EnergyBreakdown& bd, const ProblemConfig& cfg);

struct FiberingReport {
    FiberingCase case_label = FiberingCase::BothNegative;
    bool no_roots = false;               // BothPositive with lambda*A >= m(t_max)
    std::optional<double> t_max;
    std::optional<double> t1;
    std::optional<double> t2;
    std::optional<double> ddgamma_t1;    // gamma''_{t1 u}(1) sign carrier
    std::optional<double> ddgamma_t2;
    std::vector<std::array<double, 4>> samples;  // (t, gamma, gamma', gamma'')
};

FiberingReport fibering_roots(const EnergyBreakdown& bd, const ProblemConfig& cfg);

// Optional (t, gamma, gamma', gamma'') table over a log-spaced t range.
void sample_gamma(FiberingReport& rep, const EnergyBreakdown& bd, const ProblemConfig& cfg,
                  double t_lo, double t_hi, int count);

} // namespace nlab
