#include "sparareal/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "sparareal/errors.hpp"
#include "sparareal/parareal.hpp"

namespace sparareal {

RunFailure::RunFailure(std::string model, std::size_t run, const std::string& cause)
    : std::runtime_error("model '" + model + "' run " + std::to_string(run) + ": " + cause),
      model_(std::move(model)),
      run_(run) {}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

namespace {

bool bound_applicable(const RunConfig& c, const SdeModel& model) {
    return model.linear_coefficients().has_value() && c.propagator == StepMethod::theta && c.M == 2;
}

BoundFamily family_of(SamplingRule rule) {
    return centred_on_fine(rule) ? BoundFamily::rules_1_3 : BoundFamily::rules_2_4;
}

std::vector<State> at_coarse_nodes(const std::vector<State>& fine_trajectory, std::size_t M) {
    std::vector<State> nodes;
    nodes.reserve(fine_trajectory.size() / M + 1);
    for (std::size_t i = 0; i < fine_trajectory.size(); i += M) nodes.push_back(fine_trajectory[i]);
    return nodes;
}

template <typename Fn>
auto guarded(const std::string& model, std::size_t run, Fn&& fn) {
    try {
        return fn();
    } catch (const OverflowError& e) {
        throw RunFailure(model, run, e.what());
    } catch (const NonlinearSolveError& e) {
        throw RunFailure(model, run, e.what());
    } catch (const SingularSchemeError& e) {
        throw RunFailure(model, run, e.what());
    }
}

}  // namespace

ErrorReport mc_error_report(const RunConfig& config) {
    validate(config);
    const SdeModel model = build_model(config);
    const TimeGrid grid = config.grid();
    const Execution exec{config.threads};
    const BrownianTable table = generate_brownian_table(grid, config.path_seed, config.n_runs, exec);
    const ThetaScheme fine = config.fine_scheme();
    const ThetaScheme coarse = config.coarse_scheme();
    const StoppingRule rule = config.stopping_rule();
    const bool with_exact = model.exact_kind != ExactKind::none;

    std::vector<IterationHistory> histories(config.n_runs);
    std::vector<std::vector<State>> references(config.n_runs);
    std::vector<std::vector<State>> exact(with_exact ? config.n_runs : 0);
    parallel_for(config.n_runs, exec, [&](std::size_t r) {
        guarded(config.model, r, [&] {
            references[r] = serial_reference(model, fine, table, r, model.initial_value());
            const PathPropagators props(model, fine, coarse, table, r);
            histories[r] = config.algorithm == Algorithm::parareal
                               ? parareal_run(props, model.initial_value(), rule)
                               : sparareal_run(props, model.initial_value(), rule, config.sampling_for_run(r));
            if (with_exact) exact[r] = at_coarse_nodes(exact_reference(model, table, r), grid.M);
            return 0;
        });
    });
    return assemble_report(config, histories, references, exact);
}

ErrorReport assemble_report(const RunConfig& config, std::span<const IterationHistory> histories,
                            std::span<const std::vector<State>> references, std::span<const std::vector<State>> exact) {
    if (histories.empty() || histories.size() != references.size()) {
        throw std::invalid_argument("assemble_report: need one reference per run");
    }
    if (!exact.empty() && exact.size() != histories.size()) {
        throw std::invalid_argument("assemble_report: need one exact trajectory per run");
    }
    ErrorReport report;
    report.config = config;
    std::size_t K = 0;
    for (const auto& h : histories) {
        if (h.U.empty()) throw std::invalid_argument("assemble_report: empty history");
        K = std::max(K, h.sweeps());
        report.k_stop.push_back(h.k_stop);
    }
    const std::size_t nodes = references[0].size();
    const double runs = static_cast<double>(histories.size());

    for (std::size_t k = 0; k <= K; ++k) {
        ErrorRow row;
        row.k = k;
        std::vector<double> square_sum(nodes, 0.0);
        double sup_sum = 0.0;
        double residual_sum = 0.0;
        double exact_sum = 0.0;
        for (std::size_t r = 0; r < histories.size(); ++r) {
            const auto& h = histories[r];
            const auto& U = h.U[std::min(k, h.sweeps())];
            if (U.size() != nodes || references[r].size() != nodes) {
                throw std::invalid_argument("assemble_report: trajectory length mismatch");
            }
            double sup = 0.0;
            for (std::size_t n = 0; n < nodes; ++n) {
                const double e = std::abs(U[n] - references[r][n]);
                sup = std::max(sup, e);
                square_sum[n] += e * e;
            }
            sup_sum += sup;
            residual_sum += k <= h.sweeps() ? h.residual_sup[k] : 0.0;
            if (!exact.empty()) exact_sum += detail::sup_difference(U, exact[r]);
            if (h.k_stop && *h.k_stop <= k) ++row.n_converged_runs;
        }
        row.mean_sup_error = sup_sum / runs;
        row.mean_square_error = *std::max_element(square_sum.begin(), square_sum.end()) / runs;
        row.rms_error = std::sqrt(row.mean_square_error);
        row.mean_residual = residual_sum / runs;
        if (!exact.empty()) row.exact_sup_error = exact_sum / runs;
        report.rows.push_back(row);
    }

    const SdeModel model = build_model(config);
    if (bound_applicable(config, model)) {
        const auto [lambda, mu] = *model.linear_coefficients();
        const auto coeffs = theta_coefficients(config.theta_f, config.theta_g, lambda, mu, config.grid());
        report.bound_params = bound_params(coeffs, family_of(config.rule));
        if (report.bound_params->contraction) {
            report.bound_status = BoundStatus::available;
            const auto curve = bound_curve(*report.bound_params, report.rows[0].mean_square_error, K);
            for (std::size_t k = 0; k <= K; ++k) report.rows[k].bound = curve[k];
        } else {
            report.bound_status = BoundStatus::undefined;
        }
    }
    return report;
}

std::optional<std::size_t> iterations_to_threshold(std::span<const double> errors, double rho) {
    for (std::size_t k = 0; k < errors.size(); ++k) {
        if (errors[k] <= rho) return k;
    }
    return std::nullopt;
}

std::optional<std::size_t> iterations_to_threshold(const ErrorReport& report, double rho) {
    if (report.rows.empty()) throw std::invalid_argument("iterations_to_threshold: empty report");
    std::vector<double> errors;
    errors.reserve(report.rows.size());
    for (const auto& row : report.rows) errors.push_back(measured(row.mean_sup_error, report.config.error_measure));
    return iterations_to_threshold(errors, rho);
}

double initial_mean_square_error(const RunConfig& config) {
    validate(config);
    const SdeModel model = build_model(config);
    const Execution exec{config.threads};
    const BrownianTable table = generate_brownian_table(config.grid(), config.path_seed, config.mc_paths, exec);
    const ThetaScheme fine = config.fine_scheme();
    const ThetaScheme coarse = config.coarse_scheme();

    std::vector<std::vector<double>> squares(config.mc_paths);
    parallel_for(config.mc_paths, exec, [&](std::size_t p) {
        guarded(config.model, p, [&] {
            const auto reference = serial_reference(model, fine, table, p, model.initial_value());
            State u = model.initial_value();
            squares[p].assign(reference.size(), 0.0);
            for (std::size_t n = 0; n + 1 < reference.size(); ++n) {
                u = coarse_step(model, coarse, table, p, n, u);
                squares[p][n + 1] = std::norm(u - reference[n + 1]);
            }
            return 0;
        });
    });
    double sup = 0.0;
    for (std::size_t n = 0; n < squares[0].size(); ++n) {
        double sum = 0.0;
        for (const auto& s : squares) sum += s[n];
        sup = std::max(sup, sum / static_cast<double>(config.mc_paths));
    }
    return sup;
}

BoundReport bound_report(const RunConfig& config) {
    const SdeModel model = build_model(config);
    if (!bound_applicable(config, model)) {
        throw UnsupportedError("bounds need the dahlquist model, the theta propagator and M = 2");
    }
    const auto [lambda, mu] = *model.linear_coefficients();
    const auto coeffs = theta_coefficients(config.theta_f, config.theta_g, lambda, mu, config.grid());
    BoundReport report;
    report.rules_1_3 = bound_params(coeffs, BoundFamily::rules_1_3);
    report.rules_2_4 = bound_params(coeffs, BoundFamily::rules_2_4);
    report.condition = condition_check(coeffs);
    report.eps0 = initial_mean_square_error(config);
    auto fill = [&](const BoundParams& p, std::vector<std::optional<double>>& out) {
        out.assign(config.k_max + 1, std::nullopt);
        if (!p.contraction) return;
        const auto curve = bound_curve(p, report.eps0, config.k_max);
        std::copy(curve.begin(), curve.end(), out.begin());
    };
    fill(report.rules_1_3, report.curve_1_3);
    fill(report.rules_2_4, report.curve_2_4);
    return report;
}

void write_errors_csv(const ErrorReport& report, std::ostream& out) {
    out << "k,mean_sup_error,bound_value,n_converged_runs,mean_square_error,rms_error,mean_residual,"
           "exact_sup_error\n";
    for (const auto& row : report.rows) {
        out << row.k << ',' << format_number(row.mean_sup_error) << ',';
        if (report.bound_status == BoundStatus::undefined) out << "undefined";
        else if (row.bound) out << format_number(*row.bound);
        out << ',' << row.n_converged_runs << ',' << format_number(row.mean_square_error) << ','
            << format_number(row.rms_error) << ',' << format_number(row.mean_residual) << ',';
        if (row.exact_sup_error) out << format_number(*row.exact_sup_error);
        out << '\n';
    }
}

void write_iterations_csv(const ErrorReport& report, std::ostream& out) {
    out << "run,k_stop\n";
    for (std::size_t r = 0; r < report.k_stop.size(); ++r) {
        out << r << ',';
        if (report.k_stop[r]) out << *report.k_stop[r];
        else out << "none";
        out << '\n';
    }
}

namespace {

void write_bound_params(const BoundParams& p, const std::string& prefix, std::ostream& out) {
    out << prefix << "gamma = " << format_number(p.gamma) << '\n'
        << prefix << "kappa = " << format_number(p.kappa) << '\n'
        << prefix << "alpha = " << format_number(p.alpha) << '\n'
        << prefix << "beta = " << format_number(p.beta) << '\n'
        << prefix << "beta_alternate = " << format_number(p.beta_alternate) << '\n'
        << prefix << "contraction = " << (p.contraction ? format_number(*p.contraction) : "undefined") << '\n';
}

const char* status_name(BoundStatus s) {
    switch (s) {
        case BoundStatus::available: return "available";
        case BoundStatus::undefined: return "undefined";
        case BoundStatus::not_applicable: break;
    }
    return "not_applicable";
}

}  // namespace

void write_metadata(const ErrorReport& report, std::ostream& out) {
    out << format_config(report.config);
    const TimeGrid grid = report.config.grid();
    out << "# derived\n"
        << "# dT = " << format_number(grid.dT) << '\n'
        << "# dt = " << format_number(grid.dt) << '\n'
        << "# bound = " << status_name(report.bound_status) << '\n';
    if (report.bound_params) write_bound_params(*report.bound_params, "# ", out);
    const auto k_rho = iterations_to_threshold(report, report.config.rho);
    out << "# k_rho = " << (k_rho ? std::to_string(*k_rho) : "none") << '\n';
}

void write_bounds_csv(const BoundReport& report, std::ostream& out) {
    out << "k,bound_rules_1_3,bound_rules_2_4\n";
    auto cell = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("undefined"); };
    for (std::size_t k = 0; k < report.curve_1_3.size(); ++k) {
        out << k << ',' << cell(report.curve_1_3[k]) << ',' << cell(report.curve_2_4[k]) << '\n';
    }
}

namespace {

void write_file(const std::filesystem::path& file, const auto& writer) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
    writer(out);
    if (!out) throw std::runtime_error("write failed for '" + file.string() + "'");
}

template <typename Body>
int guarded_command(const std::filesystem::path& config_file, const Overrides& overrides, std::ostream& err,
                    Body&& body) {
    try {
        const RunConfig config = apply(load_config(config_file), overrides);
        std::filesystem::create_directories(config.output);
        body(config);
        return exit_ok;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const RunFailure& e) {
        err << "error: solver failure in " << e.what() << '\n';
        return exit_solver;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

}  // namespace

int run_experiment(const std::filesystem::path& config_file, const Overrides& overrides, std::ostream& err) {
    return guarded_command(config_file, overrides, err, [](const RunConfig& config) {
        const ErrorReport report = mc_error_report(config);
        write_file(config.output / "errors.csv", [&](std::ostream& o) { write_errors_csv(report, o); });
        write_file(config.output / "iterations.csv", [&](std::ostream& o) { write_iterations_csv(report, o); });
        write_file(config.output / "metadata.txt", [&](std::ostream& o) { write_metadata(report, o); });
    });
}

int run_bounds(const std::filesystem::path& config_file, const Overrides& overrides, std::ostream& err) {
    return guarded_command(config_file, overrides, err, [](const RunConfig& config) {
        const BoundReport report = bound_report(config);
        write_file(config.output / "bounds.csv", [&](std::ostream& o) { write_bounds_csv(report, o); });
        write_file(config.output / "metadata.txt", [&](std::ostream& o) {
            o << format_config(config) << "# derived\n"
              << "# eps0 = " << format_number(report.eps0) << '\n'
              << "# condition_value = " << format_number(report.condition.value) << '\n'
              << "# condition_holds = " << (report.condition.holds ? "true" : "false") << '\n';
            write_bound_params(report.rules_1_3, "# rules_1_3.", o);
            write_bound_params(report.rules_2_4, "# rules_2_4.", o);
        });
    });
}

int run_gen_paths(const std::filesystem::path& config_file, const Overrides& overrides, std::ostream& err) {
    return guarded_command(config_file, overrides, err, [](const RunConfig& config) {
        const auto paths = std::max(config.n_runs, config.mc_paths);
        const BrownianTable table =
            generate_brownian_table(config.grid(), config.path_seed, paths, Execution{config.threads});
        save_table(table, config.output / "paths.bwt");
    });
}

}  // namespace sparareal
