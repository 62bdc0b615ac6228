#pragma once

#include "cssdr/css_objective.hpp"
#include "cssdr/dataset.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cssdr {

/// Squared multiple (trace) correlation between two d-dimensional samples:
/// tr[S_u^-1 S_uv S_v^-1 S_vu], in [0, d]; d means a perfect linear relation.
double trace_correlation(const Matrix& u, const Matrix& v);

enum class SimModel { one, two, three };

const char* model_name(SimModel m);
std::optional<SimModel> parse_model(const std::string& name);

/// Nonelliptical predictor design: x1, x2 iid standard normal;
///   x3 = 0.2 x1 + 0.2 (x2 + 2)^2 + 0.2 delta,
///   x4 = 0.1 + 0.1 (x1 + x2) + 0.3 (x1 + 1.5)^2 + 0.2 delta,
/// with one shared delta per observation; remaining columns iid standard
/// normal. Requires p >= 4. Bitwise deterministic for a given seed.
Matrix simulate_predictors(int n, int p, std::uint64_t seed);

/// Responses driven by (x3, x4) so the true reduction basis is {e3, e4}:
///   model one:   y = exp(x3) + (x4 + 1.5)^2 + e
///   model two:   y = 0.4 x3^2 + 3 sin(x4 / 4) + 0.5 e
///   model three: y = x3 / (0.5 + (x4 + 1.5)^2) + 0.1 e
Vector simulate_response(const Matrix& x, SimModel model, std::uint64_t seed);

/// Estimation methods exposed by the benchmark and the CLI.
enum class Method { ols, sir, kir, pir, css_ols, css_sir, css_kir, css_pir };

bool is_css(Method m);
KernelFamily kernel_family(Method m);
const char* method_name(Method m);
std::optional<Method> parse_method(const std::string& name);

/// Kernel and optimizer knobs shared across benchmark replicates and fits.
struct FitParams {
    int slices = 10;
    double bandwidth = 0.4;
    int h_degree = 2;
    int g_degree = 3;
    bool g_cross_terms = true;  // full polynomial family vs pure powers
    OptimOptions optim;
    int restarts = 1;
    double jitter = 0.5;
    std::uint64_t fit_seed = 42;

    GKernel kernel(Method m) const;
    GBasis basis(int d) const;
};

struct SimConfig {
    SimModel model = SimModel::one;
    int p = 4;
    int n = 100;
    int replicates = 100;
    std::uint64_t seed = 1;
    std::vector<Method> methods;
    FitParams params;
    bool standardize_predictors = true;
    int threads = 1;
};

struct MethodStats {
    Method method = Method::sir;
    double mean = 0.0;
    double se = 0.0;
    int n_success = 0;
    int n_failed = 0;
    bool se_undefined = false;  // single replicate: SE reported as 0
    std::vector<double> values; // per successful replicate, replicate order
};

struct BenchResult {
    SimConfig config;
    std::vector<MethodStats> stats;
};

/// Fit every configured method on `replicates` simulated datasets and report
/// the mean trace correlation with the true span, with its standard error.
/// Per-replicate seeds derive from the master seed, so results do not depend
/// on the thread count. Failed replicates are counted and excluded.
BenchResult run_benchmark(const SimConfig& cfg);

/// Aligned "mean(se)" table, one row per method.
std::string format_benchmark_table(const BenchResult& result);

/// CSV lines: model,p,method,mean,se,n_success (17 significant digits).
std::string benchmark_csv(const BenchResult& result);

/// Convenience: fit one method on prepared (centered/standardized) data and
/// return the estimated frame in fitting coordinates.
Matrix fit_method(const Dataset& prepared, Method method, int d, const FitParams& params);

/// Leave-one-out sum of squared prediction errors: refit on each deleted-one
/// sample, regress y linearly on the fitted indices, predict the held-out
/// response. Folds whose fit fails are counted in `failed_folds`.
double loo_prediction_error(const Dataset& ds, Method method, int d, const FitParams& params,
                            bool standardize_predictors = true, int* failed_folds = nullptr);

}  // namespace cssdr
