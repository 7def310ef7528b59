#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "axihelm/eigen_search.hpp"
#include "axihelm/field.hpp"
#include "axihelm/io.hpp"

namespace axihelm {

struct CurveSpec {
    std::string kind = "star";  // "sphere" | "star"
    double radius = 1.0;
    double amplitude = 0.25;
    double frequency = 5.0;

    std::unique_ptr<GeneratingCurve> make() const;
};

struct PointSourceSpec {
    double rc = 0.5;
    double z = 1.0;
    double strength = 5.0;
};

struct WindowSpec {
    double x0 = -1.2, x1 = 1.2;
    double z0 = -1.1, z1 = 1.3;
    int nx = 300, nz = 300;
};

enum class ExperimentKind { Solve, EigenSearch, FieldGridKind, ConvergenceSweep, Oracle };

struct RunConfig {
    ExperimentKind experiment = ExperimentKind::Solve;
    CurveSpec curve;
    int mode_n = 1;
    double k = 19.0;
    std::optional<std::pair<double, double>> bracket;
    int n_pan = 17;
    std::vector<int> sweep;
    int N_ratio = 4;
    double tol_k = 0.0;
    PointSourceSpec source;
    WindowSpec window;
    int subsample = 0;  // 0: all interior window points
    int oracle_l = 1, oracle_m = 1;
    std::string table_path;
    std::string grid_path;

    void validate() const;
};

RunConfig parse_config_json(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// m-th positive root of d j_l(x)/dx = 0 by bracketed bisection.
double sphere_bessel_reference(int l, int m);

/// Spherical Bessel values j_0..j_lmax at x (downward recurrence when needed).
std::vector<double> spherical_bessel_j(double x, int lmax);

struct PointSourceRun {
    int n_pan = 0;
    double cond = 0.0;
    double avg_abs_error = 0.0;      // interior field vs reference
    double max_interior_error = 0.0;
    double max_near_error = 0.0;     // within one panel length of the boundary
    double l2_err_u = 0.0;           // boundary map nu.grad u -> u
    double l2_err_tdu = 0.0;         // boundary map nu.grad u -> tau.grad u
    int n_points = 0;
};

struct PointSourceResult {
    std::vector<PointSourceRun> runs;
    CsvTable table;                   // n_pan, points, cond, avg_err, maxint, maxnear, l2_u, l2_tdu
    CsvTable grid;                    // rc, z, Re u, Im u, log10_error (finest mesh)
};

PointSourceResult run_point_source_experiment(const RunConfig& config);

struct EigenRun {
    int n_pan = 0;
    double k_star = 0.0;
    double cond = 0.0;
    double err_k = 0.0;       // vs reference when available
    double err_u = 0.0;       // L2 boundary error vs analytic (sphere) or
                              // estimated pointwise error vs the finer run
    double sigma_min = 0.0;
};

struct EigenExperimentResult {
    std::vector<EigenRun> runs;
    double k_reference = 0.0;
    CsvTable table;  // n_pan, points, cond, err_k, err_u
    CsvTable grid;
    std::optional<NormalizedEigenfunction> finest;
};

EigenExperimentResult run_eigen_experiment(const RunConfig& config);

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace axihelm
