#include "cssdr/cli.hpp"

#include "cssdr/asymptotics.hpp"
#include "cssdr/css_objective.hpp"
#include "cssdr/dataset.hpp"
#include "cssdr/estimators.hpp"
#include "cssdr/evaluation.hpp"
#include "cssdr/linalg.hpp"
#include "cssdr/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cssdr {

namespace {

using nlohmann::json;

std::string sig17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) {
        out.push_back(v[i]);
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write file: " + path);
    }
    out << content;
}

struct CommonFitFlags {
    std::string input;
    std::string response = "y";
    std::string method_name = "css-pir";
    int d = 1;
    FitParams params;
    bool raw = false;  // skip standardization
    std::string output;
};

void add_kernel_flags(CLI::App* cmd, FitParams& params, bool* pure_powers) {
    cmd->add_option("--slices", params.slices, "slice count for sir/css-sir");
    cmd->add_option("--bandwidth", params.bandwidth, "smoothing bandwidth for kir/css-kir");
    cmd->add_option("--h-degree", params.h_degree, "response basis degree for pir/css-pir");
    cmd->add_option("--g-degree", params.g_degree, "reduced-coordinate basis degree (css fits)");
    cmd->add_flag("--g-pure-powers", *pure_powers,
                  "drop cross terms from the reduced-coordinate basis");
    cmd->add_option("--restarts", params.restarts, "optimizer starts (classical + jittered)");
    cmd->add_option("--max-iter", params.optim.max_iter, "simplex iteration cap (0 = 500*m)");
    cmd->add_option("--f-tol", params.optim.f_tol, "relative objective tolerance");
    cmd->add_option("--x-tol", params.optim.x_tol, "simplex size tolerance");
}

int cmd_fit(const CommonFitFlags& flags, std::uint64_t seed) {
    const auto method = parse_method(flags.method_name);
    if (!method) {
        std::cerr << "error: unknown method '" << flags.method_name
                  << "' (expected ols, sir, kir, pir, css-ols, css-sir, css-kir, css-pir)\n";
        return 2;
    }
    if (flags.d < 1) {
        std::cerr << "error: --d must be at least 1\n";
        return 2;
    }

    Dataset raw = load_csv(flags.input, flags.response);
    if (flags.d > raw.p()) {
        std::cerr << "error: --d exceeds the number of predictors (" << raw.p() << ")\n";
        return 2;
    }
    const Dataset prepared = flags.raw ? center(raw) : standardize(raw);

    FitParams params = flags.params;
    params.fit_seed = seed;

    json report;
    report["command"] = "fit";
    report["input"] = flags.input;
    report["response"] = raw.response_name;
    report["method"] = method_name(*method);
    report["d"] = flags.d;
    report["n"] = static_cast<int>(raw.n());
    report["p"] = static_cast<int>(raw.p());
    report["standardized"] = !flags.raw;
    report["seed"] = seed;
    report["predictors"] = raw.predictor_names;
    json kernel_info;
    switch (kernel_family(*method)) {
        case KernelFamily::sir: {
            kernel_info["slices"] = params.slices;
            const SlicePartition part = make_slices(prepared.y, params.slices);
            kernel_info["slice_sizes"] = part.counts;
            break;
        }
        case KernelFamily::kir:
            kernel_info["bandwidth"] = params.bandwidth;
            break;
        case KernelFamily::pir:
            kernel_info["h_degree"] = params.h_degree;
            break;
        case KernelFamily::ols:
            break;
    }
    report["kernel"] = kernel_info;

    std::ostringstream text;
    text << "fit: " << method_name(*method) << " on " << flags.input << " (n=" << raw.n()
         << ", p=" << raw.p() << ", d=" << flags.d << ", response=" << raw.response_name
         << ")\n";

    Matrix beta_fit;
    std::vector<std::string> warnings;
    if (is_css(*method)) {
        FitOptions opts;
        opts.basis = params.basis(flags.d);
        opts.optim = params.optim;
        opts.restarts = params.restarts;
        opts.jitter = params.jitter;
        opts.seed = seed;
        const FitReport fit = fit_css(prepared, params.kernel(*method), flags.d, opts);
        beta_fit = fit.beta;
        warnings = fit.warnings;
        report["g_degree"] = params.g_degree;
        report["g_cross_terms"] = params.g_cross_terms;
        report["objective_initial"] = fit.objective_initial;
        report["objective_final"] = fit.objective_final;
        report["converged"] = fit.converged;
        report["iterations"] = fit.iterations;
        report["evaluations"] = fit.evaluations;
        report["objective_trace"] = fit.trace;
        report["phi"] = vector_to_json(fit.phi.phi);
        text << "objective: " << fit.objective_initial << " -> " << fit.objective_final
             << (fit.converged ? " (converged)" : " (iteration limit)") << "\n";

        if (*method == Method::css_pir && flags.d < raw.p()) {
            // Plug-in asymptotics on the same (constant-including) bases.
            const HBasis hb{params.h_degree};
            const CovarianceEstimate cov =
                angle_covariance(fit.phi, prepared, hb, opts.basis);
            const HessianBundle hess = hessian_bundle(fit.phi, prepared, hb, opts.basis);
            report["per_angle_se"] = vector_to_json(cov.per_angle_se);
            report["hessian_rank"] = hess.rank;
            report["residual_norm"] = hess.residual_norm;
            text << "per-angle standard errors:";
            for (Index i = 0; i < cov.per_angle_se.size(); ++i) {
                text << ' ' << cov.per_angle_se[i];
            }
            text << "\n";
        }
    } else {
        const ClassicalFit fit = classical_fit(prepared, params.kernel(*method), flags.d);
        beta_fit = fit.beta;
        report["eigenvalues"] = vector_to_json(fit.eigenvalues);
        if (fit.tied_at_cut) {
            warnings.emplace_back("eigenvalues tied at the span cut");
        }
    }

    const Matrix beta_orig = to_original_coords(prepared, beta_fit);
    report["beta_fit_coords"] = matrix_to_json(beta_fit);
    report["beta"] = matrix_to_json(beta_orig);
    report["warnings"] = warnings;

    text << "basis (original coordinates), one row per predictor:\n";
    for (Index r = 0; r < beta_orig.rows(); ++r) {
        text << "  "
             << (r < static_cast<Index>(raw.predictor_names.size()) ? raw.predictor_names[r]
                                                                    : "x" + std::to_string(r + 1));
        for (Index c = 0; c < beta_orig.cols(); ++c) {
            text << '\t' << beta_orig(r, c);
        }
        text << '\n';
    }
    for (const auto& w : warnings) {
        text << "warning: " << w << '\n';
    }

    const std::string base = flags.output.empty() ? "fit_report" : flags.output;
    write_file(base + ".json", report.dump(2) + "\n");
    write_file(base + ".txt", text.str());
    std::cout << text.str();
    std::cout << "report written to " << base << ".json / " << base << ".txt\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Central-solution-space sufficient dimension reduction"};
    app.require_subcommand(1);

    // ---- fit ----------------------------------------------------------
    CommonFitFlags fit_flags;
    std::uint64_t fit_seed = 42;
    bool fit_pure_powers = false;
    CLI::App* fit = app.add_subcommand("fit", "fit one method on a CSV dataset");
    fit->add_option("input", fit_flags.input, "input CSV path")->required();
    fit->add_option("--response", fit_flags.response, "response column (name or 0-based index)")
        ->required();
    fit->add_option("--method", fit_flags.method_name, "estimation method")->required();
    fit->add_option("--d", fit_flags.d, "reduced dimension")->required();
    fit->add_flag("--raw", fit_flags.raw, "fit on centered raw predictors (skip standardization)");
    fit->add_option("--seed", fit_seed, "seed for optimizer restarts");
    fit->add_option("--output", fit_flags.output, "report base path (default fit_report)");
    add_kernel_flags(fit, fit_flags.params, &fit_pure_powers);

    // ---- benchmark ----------------------------------------------------
    SimConfig bench_cfg;
    std::string bench_model = "I";
    std::string bench_methods = "sir,css-sir,kir,css-kir,pir,css-pir";
    std::string bench_output = "benchmark";
    bool bench_pure_powers = false;
    CLI::App* bench = app.add_subcommand("benchmark", "simulation study over replicated fits");
    bench->add_option("--model", bench_model, "simulation model: I, II or III")->required();
    bench->add_option("--p", bench_cfg.p, "predictor dimension (>= 4)");
    bench->add_option("--n", bench_cfg.n, "sample size per replicate");
    bench->add_option("--reps", bench_cfg.replicates, "number of replicates");
    bench->add_option("--seed", bench_cfg.seed, "master seed");
    bench->add_option("--methods", bench_methods, "comma-separated method list");
    bench->add_option("--threads", bench_cfg.threads, "worker threads (default 1)");
    bench->add_flag("--raw", "fit on centered raw predictors (skip standardization)");
    bench->add_option("--output", bench_output, "output base path");
    add_kernel_flags(bench, bench_cfg.params, &bench_pure_powers);

    // ---- simulate -----------------------------------------------------
    std::string sim_model = "I";
    int sim_p = 4;
    int sim_n = 100;
    std::uint64_t sim_seed = 42;
    std::string sim_out;
    CLI::App* sim = app.add_subcommand("simulate", "write one simulated dataset as CSV");
    sim->add_option("--model", sim_model, "simulation model: I, II or III")->required();
    sim->add_option("--p", sim_p, "predictor dimension (>= 4)");
    sim->add_option("--n", sim_n, "sample size");
    sim->add_option("--seed", sim_seed, "seed (defaults to 42 when omitted)");
    sim->add_option("output", sim_out, "output CSV path")->required();

    // ---- loocv --------------------------------------------------------
    CommonFitFlags cv_flags;
    std::uint64_t cv_seed = 42;
    bool cv_raw = false;
    bool cv_pure_powers = false;
    CLI::App* cv = app.add_subcommand("loocv", "leave-one-out prediction error for one method");
    cv->add_option("input", cv_flags.input, "input CSV path")->required();
    cv->add_option("--response", cv_flags.response, "response column (name or 0-based index)")
        ->required();
    cv->add_option("--method", cv_flags.method_name, "estimation method")->required();
    cv->add_option("--d", cv_flags.d, "reduced dimension");
    cv->add_flag("--raw", cv_raw, "fit on centered raw predictors");
    cv->add_option("--seed", cv_seed, "seed for optimizer restarts");
    add_kernel_flags(cv, cv_flags.params, &cv_pure_powers);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (fit->parsed()) {
            fit_flags.params.g_cross_terms = !fit_pure_powers;
            return cmd_fit(fit_flags, fit_seed);
        }
        if (bench->parsed()) {
            bench_cfg.params.g_cross_terms = !bench_pure_powers;
            const auto model = parse_model(bench_model);
            if (!model) {
                std::cerr << "error: unknown model '" << bench_model
                          << "' (valid models: I, II, III)\n";
                return 2;
            }
            bench_cfg.model = *model;
            bench_cfg.standardize_predictors = bench->count("--raw") == 0;
            bench_cfg.methods.clear();
            std::stringstream ss(bench_methods);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto m = parse_method(item);
                if (!m) {
                    std::cerr << "error: unknown method '" << item << "' in --methods\n";
                    return 2;
                }
                bench_cfg.methods.push_back(*m);
            }
            const BenchResult result = run_benchmark(bench_cfg);
            const std::string table = format_benchmark_table(result);
            write_file(bench_output + ".csv", benchmark_csv(result));
            write_file(bench_output + ".txt", table);
            std::cout << table;
            std::cout << "results written to " << bench_output << ".csv / " << bench_output
                      << ".txt\n";
            return 0;
        }
        if (sim->parsed()) {
            const auto model = parse_model(sim_model);
            if (!model) {
                std::cerr << "error: unknown model '" << sim_model
                          << "' (valid models: I, II, III)\n";
                return 2;
            }
            if (sim->count("--seed") == 0) {
                std::cout << "note: no --seed given, using default seed 42\n";
            }
            const Matrix x = simulate_predictors(sim_n, sim_p, sim_seed);
            const Vector y = simulate_response(x, *model, derive_seed(sim_seed, 2, 0));
            std::ostringstream csv;
            for (int c = 0; c < sim_p; ++c) {
                csv << 'x' << (c + 1) << ',';
            }
            csv << "y\n";
            for (Index r = 0; r < x.rows(); ++r) {
                for (Index c = 0; c < x.cols(); ++c) {
                    csv << sig17(x(r, c)) << ',';
                }
                csv << sig17(y[r]) << '\n';
            }
            write_file(sim_out, csv.str());
            std::cout << "wrote " << x.rows() << " rows (" << sim_p << " predictors + response) to "
                      << sim_out << '\n';
            return 0;
        }
        if (cv->parsed()) {
            cv_flags.params.g_cross_terms = !cv_pure_powers;
            const auto method = parse_method(cv_flags.method_name);
            if (!method) {
                std::cerr << "error: unknown method '" << cv_flags.method_name << "'\n";
                return 2;
            }
            Dataset ds = load_csv(cv_flags.input, cv_flags.response);
            FitParams params = cv_flags.params;
            params.fit_seed = cv_seed;
            int failed = 0;
            const double sse =
                loo_prediction_error(ds, *method, cv_flags.d, params, !cv_raw, &failed);
            std::cout << "leave-one-out sum of squared prediction errors ("
                      << method_name(*method) << ", d=" << cv_flags.d << "): " << sse << '\n';
            if (failed > 0) {
                std::cout << "warning: " << failed << " folds failed and were excluded\n";
            }
            return 0;
        }
    } catch (const CsvError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace cssdr
