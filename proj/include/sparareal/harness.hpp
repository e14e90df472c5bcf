#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparareal/iteration.hpp"
#include "sparareal/models.hpp"
#include "sparareal/propagators.hpp"
#include "sparareal/sparareal.hpp"
#include "sparareal/theory_bounds.hpp"

namespace sparareal {

/// A configuration value or key was rejected. `field()` names the key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message);
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A solver failed inside one run of an experiment.
class RunFailure : public std::runtime_error {
public:
    RunFailure(std::string model, std::size_t run, const std::string& cause);
    const std::string& model() const noexcept { return model_; }
    std::size_t run() const noexcept { return run_; }

private:
    std::string model_;
    std::size_t run_;
};

enum class Algorithm { parareal, sparareal };

/// Everything needed to reproduce an experiment. Defaults describe the
/// real-coefficient Dahlquist benchmark on [0, 3] with 40 intervals.
struct RunConfig {
    std::string model = "dahlquist";
    ModelParams params = DahlquistParams{};

    double T = 3.0;
    std::size_t N = 40;
    std::size_t M = 2;
    double theta_f = 0.5;
    double theta_g = 1.0;
    StepMethod propagator = StepMethod::theta;

    Algorithm algorithm = Algorithm::parareal;
    SamplingRule rule = SamplingRule::rule1;
    std::size_t m = 2;
    double epsilon = 1e-12;
    double rho = 1e-12;
    std::size_t k_max = 50;
    ErrorMeasure error_measure = ErrorMeasure::mean_square;

    std::size_t n_runs = 5;
    std::size_t mc_paths = 100;
    std::uint64_t path_seed = 1;
    std::uint64_t sampling_seed = 2;
    unsigned threads = 1;
    std::filesystem::path output = "out";

    TimeGrid grid() const { return build_grid(T, N, M); }
    ThetaScheme fine_scheme() const;
    ThetaScheme coarse_scheme() const;
    StoppingRule stopping_rule() const { return StoppingRule{epsilon, k_max, error_measure}; }
    SamplingOptions sampling_for_run(std::size_t run) const;
};

/// Parses `key = value` lines; `#` starts a comment. Complex values are
/// written as `re`, `re+imi`, `re-imi` or `imi`. Throws ConfigError.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& file);

/// Checks cross-field constraints; throws ConfigError.
void validate(const RunConfig& config);

/// Canonical `key = value` text that parse_config reads back unchanged.
std::string format_config(const RunConfig& config);

/// Builds the configured model; throws ConfigError for an unknown name.
SdeModel build_model(const RunConfig& config);

enum class BoundStatus { not_applicable, undefined, available };

struct ErrorRow {
    std::size_t k = 0;
    /// mean over runs of max_n |U^k_n - u_n|
    double mean_sup_error = 0.0;
    /// max_n of the mean over runs of |U^k_n - u_n|^2
    double mean_square_error = 0.0;
    double rms_error = 0.0;
    /// mean over runs of max_n |U^k_n - U^{k-1}_n|; 0 once a run has stopped
    double mean_residual = 0.0;
    /// mean over runs of max_n |U^k_n - X(T_n)| against the closed form
    std::optional<double> exact_sup_error;
    std::optional<double> bound;
    std::size_t n_converged_runs = 0;
};

struct ErrorReport {
    RunConfig config;
    std::vector<ErrorRow> rows;                       ///< k = 0..max k_stop
    std::vector<std::optional<std::size_t>> k_stop;   ///< per run; empty if k_max ran out
    BoundStatus bound_status = BoundStatus::not_applicable;
    std::optional<BoundParams> bound_params;
};

/// Runs the configured solver on n_runs paths of one Brownian table keyed
/// by path_seed and compares every iterate with the serial fine solution on
/// the same path. Runs that stop early keep their final iterate in later
/// rows. Solver failures are rethrown as RunFailure.
ErrorReport mc_error_report(const RunConfig& config);

/// As mc_error_report, on caller-supplied per-run histories and references.
ErrorReport assemble_report(const RunConfig& config, std::span<const IterationHistory> histories,
                            std::span<const std::vector<State>> references,
                            std::span<const std::vector<State>> exact = {});

/// Smallest k whose mean_sup_error, under the configured error measure, is
/// at most rho.
std::optional<std::size_t> iterations_to_threshold(const ErrorReport& report, double rho);
/// Smallest k with errors[k] <= rho, compared as given.
std::optional<std::size_t> iterations_to_threshold(std::span<const double> errors, double rho);

/// max_n E|U^0_n - u_n|^2 over mc_paths paths: the coarse prediction
/// against the serial fine solution.
double initial_mean_square_error(const RunConfig& config);

struct BoundReport {
    BoundParams rules_1_3;
    BoundParams rules_2_4;
    ConditionCheck condition;
    double eps0 = 0.0;
    std::vector<std::optional<double>> curve_1_3;  ///< empty entries when undefined
    std::vector<std::optional<double>> curve_2_4;
};

/// Bound curves for k = 0..k_max. Requires a theta-method Dahlquist config
/// with M = 2 (UnsupportedError otherwise).
BoundReport bound_report(const RunConfig& config);

/// %.17g, with "inf"/"nan" spelled out.
std::string format_number(double value);

void write_errors_csv(const ErrorReport& report, std::ostream& out);
void write_iterations_csv(const ErrorReport& report, std::ostream& out);
void write_metadata(const ErrorReport& report, std::ostream& out);
void write_bounds_csv(const BoundReport& report, std::ostream& out);

/// Command-line overrides applied after the config file is read.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
    std::optional<std::size_t> runs;
    std::optional<unsigned> threads;
};

RunConfig apply(RunConfig config, const Overrides& overrides);

/// Exit codes of the command-line front end.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_config = 2;
inline constexpr int exit_solver = 3;

/// `run`: errors.csv, iterations.csv and metadata.txt under config.output.
/// Diagnostics go to `err` as a single line. Returns an exit code.
int run_experiment(const std::filesystem::path& config_file, const Overrides& overrides, std::ostream& err);
/// `bounds`: bounds.csv and metadata.txt.
int run_bounds(const std::filesystem::path& config_file, const Overrides& overrides, std::ostream& err);
/// `gen-paths`: paths.bwt with max(n_runs, mc_paths) paths.
int run_gen_paths(const std::filesystem::path& config_file, const Overrides& overrides, std::ostream& err);

}  // namespace sparareal
