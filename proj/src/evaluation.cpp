#include "cssdr/evaluation.hpp"

#include "cssdr/estimators.hpp"
#include "cssdr/linalg.hpp"
#include "cssdr/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

namespace cssdr {

namespace {

Matrix sample_cov(const Matrix& a, const Matrix& b) {
    const auto n = static_cast<double>(a.rows());
    const Matrix ac = a.rowwise() - a.colwise().mean();
    const Matrix bc = b.rowwise() - b.colwise().mean();
    return ac.transpose() * bc / n;
}

std::string format_sig17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

double trace_correlation(const Matrix& u, const Matrix& v) {
    if (u.rows() != v.rows()) {
        throw std::invalid_argument("trace correlation needs equal sample sizes");
    }
    const Matrix suu = sample_cov(u, u);
    const Matrix svv = sample_cov(v, v);
    const Matrix suv = sample_cov(u, v);
    const Matrix suu_inv = sym_inverse_strict(suu, "first-argument covariance");
    const Matrix svv_inv = sym_inverse_strict(svv, "second-argument covariance");
    return (suu_inv * suv * svv_inv * suv.transpose()).trace();
}

const char* model_name(SimModel m) {
    switch (m) {
        case SimModel::one: return "I";
        case SimModel::two: return "II";
        case SimModel::three: return "III";
    }
    return "?";
}

std::optional<SimModel> parse_model(const std::string& name) {
    if (name == "I" || name == "i" || name == "1") return SimModel::one;
    if (name == "II" || name == "ii" || name == "2") return SimModel::two;
    if (name == "III" || name == "iii" || name == "3") return SimModel::three;
    return std::nullopt;
}

Matrix simulate_predictors(int n, int p, std::uint64_t seed) {
    if (p < 4) {
        throw std::invalid_argument("the simulation design needs p >= 4, got " +
                                    std::to_string(p));
    }
    if (n < 1) {
        throw std::invalid_argument("sample size must be positive");
    }
    Rng rng(seed);
    Matrix x(n, p);
    for (int i = 0; i < n; ++i) {
        const double x1 = rng.normal();
        const double x2 = rng.normal();
        const double delta = rng.normal();
        x(i, 0) = x1;
        x(i, 1) = x2;
        x(i, 2) = 0.2 * x1 + 0.2 * (x2 + 2.0) * (x2 + 2.0) + 0.2 * delta;
        x(i, 3) = 0.1 + 0.1 * (x1 + x2) + 0.3 * (x1 + 1.5) * (x1 + 1.5) + 0.2 * delta;
        for (int c = 4; c < p; ++c) {
            x(i, c) = rng.normal();
        }
    }
    return x;
}

Vector simulate_response(const Matrix& x, SimModel model, std::uint64_t seed) {
    if (x.cols() < 4) {
        throw std::invalid_argument("response models need at least 4 predictors");
    }
    Rng rng(seed);
    const Index n = x.rows();
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        const double x3 = x(i, 2);
        const double x4 = x(i, 3);
        const double eps = rng.normal();
        switch (model) {
            case SimModel::one:
                y[i] = std::exp(x3) + (x4 + 1.5) * (x4 + 1.5) + eps;
                break;
            case SimModel::two:
                y[i] = 0.4 * x3 * x3 + 3.0 * std::sin(x4 / 4.0) + 0.5 * eps;
                break;
            case SimModel::three:
                y[i] = x3 / (0.5 + (x4 + 1.5) * (x4 + 1.5)) + 0.1 * eps;
                break;
        }
    }
    return y;
}

bool is_css(Method m) {
    return m == Method::css_ols || m == Method::css_sir || m == Method::css_kir ||
           m == Method::css_pir;
}

KernelFamily kernel_family(Method m) {
    switch (m) {
        case Method::ols:
        case Method::css_ols: return KernelFamily::ols;
        case Method::sir:
        case Method::css_sir: return KernelFamily::sir;
        case Method::kir:
        case Method::css_kir: return KernelFamily::kir;
        case Method::pir:
        case Method::css_pir: return KernelFamily::pir;
    }
    return KernelFamily::ols;
}

const char* method_name(Method m) {
    switch (m) {
        case Method::ols: return "ols";
        case Method::sir: return "sir";
        case Method::kir: return "kir";
        case Method::pir: return "pir";
        case Method::css_ols: return "css-ols";
        case Method::css_sir: return "css-sir";
        case Method::css_kir: return "css-kir";
        case Method::css_pir: return "css-pir";
    }
    return "?";
}

std::optional<Method> parse_method(const std::string& name) {
    std::string s;
    for (char c : name) {
        s.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (s == "ols") return Method::ols;
    if (s == "sir") return Method::sir;
    if (s == "kir") return Method::kir;
    if (s == "pir") return Method::pir;
    if (s == "css-ols") return Method::css_ols;
    if (s == "css-sir") return Method::css_sir;
    if (s == "css-kir") return Method::css_kir;
    if (s == "css-pir") return Method::css_pir;
    return std::nullopt;
}

GKernel FitParams::kernel(Method m) const {
    switch (kernel_family(m)) {
        case KernelFamily::ols: return GKernel::ols();
        case KernelFamily::sir: return GKernel::sir(slices);
        case KernelFamily::kir: return GKernel::kir(bandwidth);
        case KernelFamily::pir: return GKernel::pir(HBasis{h_degree});
    }
    return GKernel::ols();
}

GBasis FitParams::basis(int d) const {
    return g_cross_terms ? GBasis::full(d, g_degree) : GBasis::pure_powers(d, g_degree);
}

Matrix fit_method(const Dataset& prepared, Method method, int d, const FitParams& params) {
    const GKernel kernel = params.kernel(method);
    if (!is_css(method)) {
        return classical_fit(prepared, kernel, d).beta;
    }
    FitOptions opts;
    opts.basis = params.basis(d);
    opts.optim = params.optim;
    opts.restarts = params.restarts;
    opts.jitter = params.jitter;
    opts.seed = params.fit_seed;
    return fit_css(prepared, kernel, d, opts).beta;
}

BenchResult run_benchmark(const SimConfig& cfg) {
    if (cfg.replicates < 1) {
        throw std::invalid_argument("replicate count must be positive");
    }
    if (cfg.methods.empty()) {
        throw std::invalid_argument("no methods configured");
    }
    const int d = 2;
    const std::size_t n_methods = cfg.methods.size();
    const auto reps = static_cast<std::size_t>(cfg.replicates);

    // One slot per (replicate, method); NaN marks a failure.
    std::vector<std::vector<double>> values(reps,
                                            std::vector<double>(n_methods, std::nan("")));

    auto run_replicate = [&](std::size_t r) {
        const std::uint64_t design_seed = derive_seed(cfg.seed, 1, r);
        const std::uint64_t response_seed = derive_seed(cfg.seed, 2, r);
        Matrix x = simulate_predictors(cfg.n, cfg.p, design_seed);
        Vector y = simulate_response(x, cfg.model, response_seed);

        Matrix v_true(cfg.n, d);
        v_true.col(0) = x.col(2);
        v_true.col(1) = x.col(3);

        Dataset raw = make_dataset(x, std::move(y));
        Dataset prepared;
        try {
            prepared = cfg.standardize_predictors ? standardize(raw) : center(raw);
        } catch (const Error&) {
            return;  // whole replicate unusable; every method records a failure
        }

        FitParams params = cfg.params;
        params.fit_seed = derive_seed(cfg.seed, 3, r);
        for (std::size_t mi = 0; mi < n_methods; ++mi) {
            try {
                const Matrix beta = fit_method(prepared, cfg.methods[mi], d, params);
                const Matrix beta_orig = to_original_coords(prepared, beta);
                values[r][mi] = trace_correlation(raw.X * beta_orig, v_true);
            } catch (const Error&) {
                // recorded as NaN
            }
        }
    };

    const int threads = std::max(1, cfg.threads);
    if (threads == 1) {
        for (std::size_t r = 0; r < reps; ++r) {
            run_replicate(r);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&]() {
                for (std::size_t r = next.fetch_add(1); r < reps; r = next.fetch_add(1)) {
                    run_replicate(r);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    BenchResult result;
    result.config = cfg;
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
        MethodStats stats;
        stats.method = cfg.methods[mi];
        for (std::size_t r = 0; r < reps; ++r) {
            const double v = values[r][mi];
            if (std::isnan(v)) {
                ++stats.n_failed;
            } else {
                stats.values.push_back(v);
            }
        }
        stats.n_success = static_cast<int>(stats.values.size());
        if (stats.n_success > 0) {
            double sum = 0.0;
            for (double v : stats.values) sum += v;
            stats.mean = sum / stats.n_success;
            if (stats.n_success > 1) {
                double ss = 0.0;
                for (double v : stats.values) ss += (v - stats.mean) * (v - stats.mean);
                stats.se = std::sqrt(ss / (stats.n_success - 1)) / std::sqrt(double(stats.n_success));
            } else {
                stats.se = 0.0;
                stats.se_undefined = true;
            }
        }
        result.stats.push_back(std::move(stats));
    }
    return result;
}

std::string format_benchmark_table(const BenchResult& result) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "model %s, p = %d, n = %d, replicates = %d, seed = %llu\n",
                  model_name(result.config.model), result.config.p, result.config.n,
                  result.config.replicates,
                  static_cast<unsigned long long>(result.config.seed));
    out << line;
    std::snprintf(line, sizeof(line), "%-10s %-14s %s\n", "method", "mean(se)", "n_success");
    out << line;
    for (const MethodStats& s : result.stats) {
        char cell[64];
        std::snprintf(cell, sizeof(cell), "%.3f (%.3f)", s.mean, s.se);
        std::snprintf(line, sizeof(line), "%-10s %-14s %d%s\n", method_name(s.method), cell,
                      s.n_success, s.se_undefined ? " [single replicate: se undefined]" : "");
        out << line;
    }
    return out.str();
}

std::string benchmark_csv(const BenchResult& result) {
    std::ostringstream out;
    out << "model,p,method,mean,se,n_success\n";
    for (const MethodStats& s : result.stats) {
        out << model_name(result.config.model) << ',' << result.config.p << ','
            << method_name(s.method) << ',' << format_sig17(s.mean) << ',' << format_sig17(s.se)
            << ',' << s.n_success << '\n';
    }
    return out.str();
}

double loo_prediction_error(const Dataset& ds, Method method, int d, const FitParams& params,
                            bool standardize_predictors, int* failed_folds) {
    const Index n = ds.n();
    if (n < 10) {
        throw std::invalid_argument("leave-one-out needs at least 10 observations");
    }
    double total = 0.0;
    int failed = 0;
    for (Index k = 0; k < n; ++k) {
        Matrix x(n - 1, ds.p());
        Vector y(n - 1);
        Index row = 0;
        for (Index i = 0; i < n; ++i) {
            if (i == k) continue;
            x.row(row) = ds.X.row(i);
            y[row] = ds.y[i];
            ++row;
        }
        try {
            Dataset fold = make_dataset(std::move(x), std::move(y));
            const Dataset prepared = standardize_predictors ? standardize(fold) : center(fold);
            const Matrix beta = fit_method(prepared, method, d, params);

            // Linear model of y on the fitted indices over the fold.
            Matrix design(n - 1, d + 1);
            design.col(0).setOnes();
            design.rightCols(d) = prepared.X * beta;
            const Vector coef = design.colPivHouseholderQr().solve(fold.y);

            // Transform the held-out point with the fold's recorded map.
            Vector xk = ds.X.row(k).transpose();
            Vector xk_t = (xk - prepared.shift_x).cwiseQuotient(prepared.scale_x);
            Vector reduced = beta.transpose() * xk_t;
            double pred = coef[0];
            for (int c = 0; c < d; ++c) {
                pred += coef[c + 1] * reduced[c];
            }
            // fold.y was centered inside `prepared`, not in `fold`; coef was
            // fit against raw fold responses, so pred is on the raw scale.
            const double err = ds.y[k] - pred;
            total += err * err;
        } catch (const Error&) {
            ++failed;
        }
    }
    if (failed_folds != nullptr) {
        *failed_folds = failed;
    }
    return total;
}

}  // namespace cssdr
