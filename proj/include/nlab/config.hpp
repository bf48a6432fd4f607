#pragma once

#include <array>
#include <string>
#include <vector>

namespace nlab {

enum class Mode { subcritical, critical, bn };
enum class Strictness { strict, lab };

const char* to_string(Mode m);
const char* to_string(Strictness s);
Mode mode_from_string(const std::string& s);
Strictness strictness_from_string(const std::string& s);

// Nodal weight samples come from one of these shapes. `table` entries, when
// used, must match the grid's full node count.
struct WeightSpec {
    enum class Kind { constant, sinusoid, bump, step, table };
    Kind kind = Kind::constant;

    double value = 1.0;                       // constant
    double amplitude = 1.0, offset = 0.0;     // sinusoid
    std::array<double, 3> freq{0, 0, 0};      // sinusoid: cycles per side
    std::array<double, 3> phase{0, 0, 0};
    std::array<double, 3> center{0, 0, 0};    // bump
    double radius = 0.25;                     // bump
    int axis = 0;                             // step
    double threshold = 0.5, width = 0.1;      // step (smooth transition)
    double low = 1.0, high = 0.0;             // step values below/above threshold
    std::vector<double> table;                // tabulated (all nodes)

    static WeightSpec constant(double c);
    static WeightSpec parse(const std::string& text);
    std::string describe() const;
};

struct ProblemConfig {
    int dim_N = 2;
    double p = 1.5;
    double q = 1.8;
    double s = 0.5;
    double delta = 1.2;
    double r = 3.0;
    double lambda = 1.0;
    Mode mode = Mode::subcritical;
    Strictness strictness = Strictness::strict;
    std::array<double, 3> domain_lo{0, 0, 0};
    std::array<double, 3> domain_side{1, 1, 1};
    int grid_n = 32;
    WeightSpec weight_a = WeightSpec::constant(1.0);
    WeightSpec weight_b = WeightSpec::constant(1.0);

    double p_star() const { return dim_N * p / (dim_N - p); }
    double q_star_s() const { return dim_N * q / (dim_N - s * q); }
    // Superlinear coefficient: lambda multiplies both nonlinear terms in the
    // general problem; the BN variant keeps lambda on the sublinear term only.
    double c_r() const { return mode == Mode::bn ? 1.0 : lambda; }
};

// Returns every violated constraint as human-readable text; empty means the
// config is admissible under its declared strictness.
std::vector<std::string> validate_config(const ProblemConfig& cfg);

// Flat key=value config file ('#' comments). Unknown keys are errors.
ProblemConfig parse_config_text(const std::string& text);
ProblemConfig load_config_file(const std::string& path);
std::string dump_config(const ProblemConfig& cfg);

} // namespace nlab
