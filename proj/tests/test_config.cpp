#include <doctest.h>

#include <sstream>

#include "sparareal/harness.hpp"

using namespace sparareal;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string field_of(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST_CASE("defaults") {
    const RunConfig c = parse("model = dahlquist\n");
    CHECK(c.epsilon == 1e-12);
    CHECK(c.rho == 1e-12);
    CHECK(c.n_runs == 5);
    CHECK(c.N == 40);
    CHECK(c.M == 2);
    CHECK(c.algorithm == Algorithm::parareal);
    CHECK(c.error_measure == ErrorMeasure::mean_square);
    CHECK(c.propagator == StepMethod::theta);
}

TEST_CASE("full file with comments and blank lines") {
    const RunConfig c = parse(R"(# Ginzburg-Landau run
model = ginzburg_landau
upsilon = 25   # growth
lambda = 0.1
sigma = 0.5
x0 = 1

T = 1
N = 40
M = 2
theta_f = 0
theta_g = 0
algorithm = sparareal
rule = 3
m = 7
epsilon = 1e-10
rho = 1e-11
k_max = 30
error_measure = modulus
n_runs = 9
mc_paths = 20
path_seed = 123
sampling_seed = 456
threads = 4
propagator = theta
output = results/gl
)");
    CHECK(c.model == "ginzburg_landau");
    const auto& p = std::get<GinzburgLandauParams>(c.params);
    CHECK(p.upsilon == 25.0);
    CHECK(p.lambda == 0.1);
    CHECK(c.T == 1.0);
    CHECK(c.algorithm == Algorithm::sparareal);
    CHECK(c.rule == SamplingRule::rule3);
    CHECK(c.m == 7);
    CHECK(c.epsilon == 1e-10);
    CHECK(c.rho == 1e-11);
    CHECK(c.k_max == 30);
    CHECK(c.error_measure == ErrorMeasure::modulus);
    CHECK(c.n_runs == 9);
    CHECK(c.mc_paths == 20);
    CHECK(c.path_seed == 123);
    CHECK(c.sampling_seed == 456);
    CHECK(c.threads == 4);
    CHECK(c.output == "results/gl");
}

TEST_CASE("complex values") {
    auto mu = [](const std::string& v) { return std::get<DahlquistParams>(parse("model = dahlquist\nmu = " + v).params).mu; };
    CHECK(mu("0.56") == State(0.56, 0.0));
    CHECK(mu("0.56+1i") == State(0.56, 1.0));
    CHECK(mu("0.56-2.5i") == State(0.56, -2.5));
    CHECK(mu("2i") == State(0.0, 2.0));
    CHECK(mu("-i") == State(0.0, -1.0));
    CHECK(mu("1e-3+1e-2i") == State(1e-3, 1e-2));
    CHECK(mu("-1e+2-i") == State(-100.0, -1.0));
    CHECK(field_of("model = dahlquist\nmu = 1+xi\n") == "mu");
    CHECK(field_of("model = dahlquist\nmu = i1\n") == "mu");
}

TEST_CASE("schema violations name the field") {
    CHECK(field_of("model = lorenz\n") == "model");
    CHECK(field_of("model = dahlquist\nfoo = 1\n") == "foo");
    CHECK(field_of("model = dahlquist\nupsilon = 1\n") == "upsilon");
    CHECK(field_of("model = dahlquist\nN = -4\n") == "N");
    CHECK(field_of("model = dahlquist\nN = 0\n") == "N");
    CHECK(field_of("model = dahlquist\nT = abc\n") == "T");
    CHECK(field_of("model = dahlquist\nT = 1.0x\n") == "T");
    CHECK(field_of("model = dahlquist\nrule = 5\n") == "rule");
    CHECK(field_of("model = dahlquist\nalgorithm = fast\n") == "algorithm");
    CHECK(field_of("model = dahlquist\npropagator = rk4\n") == "propagator");
    CHECK(field_of("model = dahlquist\nerror_measure = l2\n") == "error_measure");
    CHECK(field_of("model = dahlquist\ntheta_f = 1.5\n") == "theta_f");
    CHECK(field_of("model = dahlquist\nn_runs = 0\n") == "n_runs");
    CHECK(field_of("model = dahlquist\nepsilon = 0\n") == "epsilon");
    CHECK(field_of("model = dahlquist\nm = 0\n") == "m");
    CHECK(field_of("model = dahlquist\nN = 4\nN = 5\n") == "N");
    CHECK(field_of("model = dahlquist\njust words\n") == "line 2");
    CHECK(field_of("model = population\nK = -5\n") == "model");
    CHECK_THROWS_AS(load_config("/nonexistent/config.conf"), ConfigError);
}

TEST_CASE("canonical text round-trips") {
    for (const char* text : {"model = dahlquist\nmu = 0.56+1i\nlambda = -40-0.5i\nalgorithm = sparareal\nrule = 2\n",
                             "model = ginzburg_landau\nsigma = 0.25\n", "model = double_well\nsigma = 20\n"
                                                                         "propagator = projected_euler\n",
                             "model = population\nK = 50\nx0 = 0\n"}) {
        const std::string once = format_config(parse(text));
        CHECK(format_config(parse(once)) == once);
    }
}

TEST_CASE("overrides") {
    const RunConfig c = parse("model = dahlquist\n");
    Overrides o;
    o.seed = 99;
    o.runs = 3;
    o.threads = 2;
    o.out = "elsewhere";
    const RunConfig r = apply(c, o);
    CHECK(r.path_seed == 99);
    CHECK(r.n_runs == 3);
    CHECK(r.threads == 2);
    CHECK(r.output == "elsewhere");
    Overrides bad;
    bad.runs = 0;
    CHECK_THROWS_AS(apply(c, bad), ConfigError);
}

TEST_CASE("derived schemes and per-run sampling seeds") {
    RunConfig c = parse("model = double_well\npropagator = projected_euler\nalgorithm = sparareal\nm = 3\n");
    CHECK(c.fine_scheme().method == StepMethod::projected_euler);
    CHECK(c.coarse_scheme().method == StepMethod::projected_euler);
    CHECK(c.sampling_for_run(0).samples == 3);
    CHECK(c.sampling_for_run(0).seed != c.sampling_for_run(1).seed);
    c.propagator = StepMethod::theta;
    CHECK(c.fine_scheme().theta == c.theta_f);
    CHECK(c.coarse_scheme().theta == c.theta_g);
}
