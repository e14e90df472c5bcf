#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string_view>

#include "sparareal/harness.hpp"
#include "sparareal/philox.hpp"

namespace sparareal {

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::invalid_argument("config field '" + field + "': " + message), field_(std::move(field)) {}

ThetaScheme RunConfig::fine_scheme() const {
    return propagator == StepMethod::projected_euler ? ThetaScheme::projected_euler()
                                                     : ThetaScheme::theta_method(theta_f);
}

ThetaScheme RunConfig::coarse_scheme() const {
    return propagator == StepMethod::projected_euler ? ThetaScheme::projected_euler()
                                                     : ThetaScheme::theta_method(theta_g);
}

SamplingOptions RunConfig::sampling_for_run(std::size_t run) const {
    return SamplingOptions{m, rule, mix_seed(sampling_seed, run)};
}

namespace {

const std::set<std::string, std::less<>> general_keys = {
    "model",     "T",       "N",     "M",       "theta_f",  "theta_g",   "propagator",    "algorithm",
    "rule",      "m",       "epsilon", "rho",   "k_max",    "error_measure", "n_runs",    "mc_paths",
    "path_seed", "sampling_seed", "threads", "output"};

const std::map<std::string, std::set<std::string, std::less<>>, std::less<>> model_keys = {
    {"dahlquist", {"lambda", "mu", "u0"}},
    {"ginzburg_landau", {"upsilon", "lambda", "sigma", "x0"}},
    {"double_well", {"sigma", "x0"}},
    {"population", {"r", "K", "sigma", "x0"}},
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(const std::string& field, std::string_view text) {
    double value = 0.0;
    const auto* begin = text.data();
    const auto* end = begin + text.size();
    if (!text.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw ConfigError(field, "expected a real number, got '" + std::string(text) + "'");
    }
    return value;
}

std::uint64_t parse_unsigned(const std::string& field, std::string_view text) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(field, "expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return value;
}

double parse_unit_coefficient(const std::string& field, std::string_view text) {
    if (text.empty() || text == "+") return 1.0;
    if (text == "-") return -1.0;
    return parse_real(field, text);
}

State parse_complex(const std::string& field, std::string_view text) {
    if (text.empty()) throw ConfigError(field, "empty value");
    if (text.back() != 'i') return {parse_real(field, text), 0.0};
    const std::string_view body = text.substr(0, text.size() - 1);
    std::size_t split = std::string_view::npos;
    for (std::size_t pos = body.size(); pos-- > 1;) {
        if ((body[pos] == '+' || body[pos] == '-') && body[pos - 1] != 'e' && body[pos - 1] != 'E') {
            split = pos;
            break;
        }
    }
    if (split == std::string_view::npos) return {0.0, parse_unit_coefficient(field, body)};
    return {parse_real(field, body.substr(0, split)), parse_unit_coefficient(field, body.substr(split))};
}

std::string format_complex(State z) {
    if (z.imag() == 0.0) return format_number(z.real());
    const std::string sign = std::signbit(z.imag()) ? "-" : "+";
    return format_number(z.real()) + sign + format_number(std::abs(z.imag())) + "i";
}

ModelParams default_params(const std::string& model) {
    if (model == "dahlquist") return DahlquistParams{};
    if (model == "ginzburg_landau") return GinzburgLandauParams{};
    if (model == "double_well") return DoubleWellParams{};
    return PopulationParams{};
}

void set_model_field(ModelParams& params, const std::string& key, std::string_view value) {
    std::visit(
        [&](auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, DahlquistParams>) {
                if (key == "lambda") p.lambda = parse_complex(key, value);
                if (key == "mu") p.mu = parse_complex(key, value);
                if (key == "u0") p.u0 = parse_complex(key, value);
            } else if constexpr (std::is_same_v<P, GinzburgLandauParams>) {
                if (key == "upsilon") p.upsilon = parse_real(key, value);
                if (key == "lambda") p.lambda = parse_real(key, value);
                if (key == "sigma") p.sigma = parse_real(key, value);
                if (key == "x0") p.x0 = parse_real(key, value);
            } else if constexpr (std::is_same_v<P, DoubleWellParams>) {
                if (key == "sigma") p.sigma = parse_real(key, value);
                if (key == "x0") p.x0 = parse_real(key, value);
            } else {
                if (key == "r") p.r = parse_real(key, value);
                if (key == "K") p.K = parse_real(key, value);
                if (key == "sigma") p.sigma = parse_real(key, value);
                if (key == "x0") p.x0 = parse_real(key, value);
            }
        },
        params);
}

std::size_t to_size(const std::string& field, std::string_view text) {
    return static_cast<std::size_t>(parse_unsigned(field, text));
}

}  // namespace

RunConfig parse_config(std::istream& in) {
    std::map<std::string, std::string, std::less<>> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
        }
        const std::string key(trim(view.substr(0, eq)));
        const std::string value(trim(view.substr(eq + 1)));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no), "missing key");
        if (!entries.emplace(key, value).second) throw ConfigError(key, "duplicate field");
    }

    RunConfig c;
    if (const auto it = entries.find("model"); it != entries.end()) c.model = it->second;
    const auto model_it = model_keys.find(c.model);
    if (model_it == model_keys.end()) throw ConfigError("model", "unknown model '" + c.model + "'");
    c.params = default_params(c.model);

    for (const auto& [key, value] : entries) {
        if (key == "model") continue;
        if (model_it->second.contains(key)) {
            set_model_field(c.params, key, value);
            continue;
        }
        if (!general_keys.contains(key)) {
            bool other_model = false;
            for (const auto& [name, keys] : model_keys) other_model = other_model || keys.contains(key);
            throw ConfigError(key, other_model ? "not a parameter of model '" + c.model + "'" : "unknown field");
        }
        if (key == "T") c.T = parse_real(key, value);
        else if (key == "N") c.N = to_size(key, value);
        else if (key == "M") c.M = to_size(key, value);
        else if (key == "theta_f") c.theta_f = parse_real(key, value);
        else if (key == "theta_g") c.theta_g = parse_real(key, value);
        else if (key == "propagator") {
            if (value == "theta") c.propagator = StepMethod::theta;
            else if (value == "projected_euler") c.propagator = StepMethod::projected_euler;
            else throw ConfigError(key, "expected 'theta' or 'projected_euler', got '" + value + "'");
        } else if (key == "algorithm") {
            if (value == "parareal") c.algorithm = Algorithm::parareal;
            else if (value == "sparareal") c.algorithm = Algorithm::sparareal;
            else throw ConfigError(key, "expected 'parareal' or 'sparareal', got '" + value + "'");
        } else if (key == "rule") {
            const auto id = parse_unsigned(key, value);
            if (id < 1 || id > 4) throw ConfigError(key, "sampling rule must be 1..4");
            c.rule = static_cast<SamplingRule>(id);
        } else if (key == "m") c.m = to_size(key, value);
        else if (key == "epsilon") c.epsilon = parse_real(key, value);
        else if (key == "rho") c.rho = parse_real(key, value);
        else if (key == "k_max") c.k_max = to_size(key, value);
        else if (key == "error_measure") {
            if (value == "mean_square") c.error_measure = ErrorMeasure::mean_square;
            else if (value == "modulus") c.error_measure = ErrorMeasure::modulus;
            else throw ConfigError(key, "expected 'mean_square' or 'modulus', got '" + value + "'");
        } else if (key == "n_runs") c.n_runs = to_size(key, value);
        else if (key == "mc_paths") c.mc_paths = to_size(key, value);
        else if (key == "path_seed") c.path_seed = parse_unsigned(key, value);
        else if (key == "sampling_seed") c.sampling_seed = parse_unsigned(key, value);
        else if (key == "threads") c.threads = static_cast<unsigned>(parse_unsigned(key, value));
        else if (key == "output") c.output = value;
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("file", "cannot read '" + file.string() + "'");
    return parse_config(in);
}

void validate(const RunConfig& c) {
    if (!(c.T > 0.0) || !std::isfinite(c.T)) throw ConfigError("T", "must be positive and finite");
    if (c.N < 1) throw ConfigError("N", "must be at least 1");
    if (c.M < 1) throw ConfigError("M", "must be at least 1");
    if (!(c.theta_f >= 0.0 && c.theta_f <= 1.0)) throw ConfigError("theta_f", "must lie in [0, 1]");
    if (!(c.theta_g >= 0.0 && c.theta_g <= 1.0)) throw ConfigError("theta_g", "must lie in [0, 1]");
    if (c.m < 1) throw ConfigError("m", "must be at least 1");
    if (!(c.epsilon > 0.0)) throw ConfigError("epsilon", "must be positive");
    if (!(c.rho >= 0.0)) throw ConfigError("rho", "must be non-negative");
    if (c.k_max < 1) throw ConfigError("k_max", "must be at least 1");
    if (c.n_runs < 1) throw ConfigError("n_runs", "must be at least 1");
    if (c.mc_paths < 1) throw ConfigError("mc_paths", "must be at least 1");
    if (c.threads < 1) throw ConfigError("threads", "must be at least 1");
    build_model(c);
}

SdeModel build_model(const RunConfig& c) {
    if (!model_keys.contains(c.model)) throw ConfigError("model", "unknown model '" + c.model + "'");
    try {
        return model_library(c.model, c.params);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("model", e.what());
    }
}

std::string format_config(const RunConfig& c) {
    std::ostringstream out;
    out << "model = " << c.model << '\n';
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, DahlquistParams>) {
                out << "lambda = " << format_complex(p.lambda) << '\n'
                    << "mu = " << format_complex(p.mu) << '\n'
                    << "u0 = " << format_complex(p.u0) << '\n';
            } else if constexpr (std::is_same_v<P, GinzburgLandauParams>) {
                out << "upsilon = " << format_number(p.upsilon) << '\n'
                    << "lambda = " << format_number(p.lambda) << '\n'
                    << "sigma = " << format_number(p.sigma) << '\n'
                    << "x0 = " << format_number(p.x0) << '\n';
            } else if constexpr (std::is_same_v<P, DoubleWellParams>) {
                out << "sigma = " << format_number(p.sigma) << '\n' << "x0 = " << format_number(p.x0) << '\n';
            } else {
                out << "r = " << format_number(p.r) << '\n'
                    << "K = " << format_number(p.K) << '\n'
                    << "sigma = " << format_number(p.sigma) << '\n'
                    << "x0 = " << format_number(p.x0) << '\n';
            }
        },
        c.params);
    out << "T = " << format_number(c.T) << '\n'
        << "N = " << c.N << '\n'
        << "M = " << c.M << '\n'
        << "theta_f = " << format_number(c.theta_f) << '\n'
        << "theta_g = " << format_number(c.theta_g) << '\n'
        << "propagator = " << (c.propagator == StepMethod::theta ? "theta" : "projected_euler") << '\n'
        << "algorithm = " << (c.algorithm == Algorithm::parareal ? "parareal" : "sparareal") << '\n'
        << "rule = " << static_cast<int>(c.rule) << '\n'
        << "m = " << c.m << '\n'
        << "epsilon = " << format_number(c.epsilon) << '\n'
        << "rho = " << format_number(c.rho) << '\n'
        << "k_max = " << c.k_max << '\n'
        << "error_measure = " << (c.error_measure == ErrorMeasure::mean_square ? "mean_square" : "modulus") << '\n'
        << "n_runs = " << c.n_runs << '\n'
        << "mc_paths = " << c.mc_paths << '\n'
        << "path_seed = " << c.path_seed << '\n'
        << "sampling_seed = " << c.sampling_seed << '\n'
        << "threads = " << c.threads << '\n'
        << "output = " << c.output.string() << '\n';
    return out.str();
}

RunConfig apply(RunConfig c, const Overrides& o) {
    if (o.seed) {
        c.path_seed = *o.seed;
        c.sampling_seed = mix_seed(*o.seed, 0xFFFFFFFFull);
    }
    if (o.out) c.output = *o.out;
    if (o.runs) c.n_runs = *o.runs;
    if (o.threads) c.threads = *o.threads;
    validate(c);
    return c;
}

}  // namespace sparareal
