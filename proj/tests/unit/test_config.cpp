#include <string>

#include <gtest/gtest.h>

#include "csq/config.hpp"

using namespace csq;

TEST(Config, Defaults) {
    const RunConfig c = parse_config_string("");
    EXPECT_EQ(c.task, Task::steady);
    EXPECT_TRUE(c.auto_n_fock);
    EXPECT_TRUE(c.convention.gamma_a_is_kappa);
    EXPECT_TRUE(c.convention.gamma_b_is_half_gamma);
    EXPECT_EQ(c.truncation.cap, 200u);
    EXPECT_DOUBLE_EQ(c.truncation.tol, 1e-6);
}

TEST(Config, CommentsAndWhitespace) {
    const RunConfig c = parse_config_string("# header\n\n  params.omega   =  1.5   # trailing\nparams.kappa=0.1\n");
    EXPECT_DOUBLE_EQ(c.params.omega, 1.5);
    EXPECT_DOUBLE_EQ(c.params.kappa, 0.1);
}

TEST(Config, RoundTrip) {
    const std::string text = R"(task = sweep
params.omega = 2
params.gamma_b = 0.01
params.n_fock = 24
convention.gamma_a_is_kappa = false
sweep.axis1.name = omega_over_g
sweep.axis1.min = 0.5
sweep.axis1.max = 1.5
sweep.axis1.count = 3
sweep.axis2.name = two_gamma_a_over_g
sweep.axis2.min = 0.1
sweep.axis2.max = 0.7
sweep.axis2.count = 4
spectrum.thetas = 0, 0.3, 1.5707963267948966
spectrum.tau_max = 123.5
truncation.tol = 1e-7
output.path = out.csv
output.json_mirror = true
threads = 3
)";
    const RunConfig a = parse_config_string(text);
    const std::string once = serialize_config(a);
    const RunConfig b = parse_config_string(once);
    EXPECT_TRUE(a == b);
    EXPECT_EQ(serialize_config(b), once);
    EXPECT_FALSE(a.auto_n_fock);
    EXPECT_EQ(a.params.n_fock, 24u);
    ASSERT_TRUE(a.sweep && a.sweep->axis2);
    EXPECT_EQ(a.sweep->axis2->count, 4u);
    EXPECT_EQ(a.spectrum.thetas.size(), 3u);
}

TEST(Config, RoundTripPreservesAwkwardDoubles) {
    RunConfig c;
    c.params.omega = 0.1 + 0.2;
    c.params.kappa = 1.0 / 3.0;
    c.params.gamma = 5e-324;
    const RunConfig back = parse_config_string(serialize_config(c));
    EXPECT_EQ(back.params.omega, c.params.omega);
    EXPECT_EQ(back.params.kappa, c.params.kappa);
    EXPECT_EQ(back.params.gamma, c.params.gamma);
}

TEST(Config, UnknownKeyRejected) {
    EXPECT_THROW(parse_config_string("params.omgea = 1\n"), ConfigError);
    EXPECT_THROW(parse_config_string("threads = 2\nfoo = bar\n"), ConfigError);
}

TEST(Config, DuplicateKeyRejected) {
    EXPECT_THROW(parse_config_string("params.omega = 1\nparams.omega = 2\n"), ConfigError);
}

TEST(Config, MalformedValuesRejected) {
    EXPECT_THROW(parse_config_string("params.omega = two\n"), ConfigError);
    EXPECT_THROW(parse_config_string("params.omega = 1.0x\n"), ConfigError);
    EXPECT_THROW(parse_config_string("threads = -1\n"), ConfigError);
    EXPECT_THROW(parse_config_string("output.json_mirror = yes\n"), ConfigError);
    EXPECT_THROW(parse_config_string("task = fit\n"), ConfigError);
    EXPECT_THROW(parse_config_string("just a line\n"), ConfigError);
    EXPECT_THROW(parse_config_string("params.kappa = -0.1\n"), ConfigError);
    EXPECT_THROW(parse_config_string("spectrum.n_tau = 2\n"), ConfigError);
}

TEST(Config, RateSymbolsConverted) {
    const RunConfig a = parse_config_string("params.gamma_a = 0.3\nparams.gamma_b = 0.01\n");
    EXPECT_DOUBLE_EQ(a.params.kappa, 0.3);
    EXPECT_DOUBLE_EQ(a.params.gamma, 0.02);
    const RunConfig b = parse_config_string(
        "convention.gamma_a_is_kappa = false\nconvention.gamma_b_is_half_gamma = false\n"
        "params.gamma_a = 0.3\nparams.gamma_b = 0.01\n");
    EXPECT_DOUBLE_EQ(b.params.kappa, 0.6);
    EXPECT_DOUBLE_EQ(b.params.gamma, 0.01);
    EXPECT_THROW(parse_config_string("params.gamma_a = 0.3\nparams.kappa = 0.3\n"), ConfigError);
    EXPECT_THROW(parse_config_string("params.gamma_b = 0.3\nparams.gamma = 0.3\n"), ConfigError);
}

TEST(Config, ConventionRoundTrip) {
    for (bool ga : {true, false})
        for (bool gb : {true, false}) {
            const SymbolConvention c{ga, gb};
            for (double k : {0.0, 0.05, 1.7}) EXPECT_DOUBLE_EQ(c.kappa_from_gamma_a(c.gamma_a_from_kappa(k)), k);
        }
}

TEST(Config, AxisMapping) {
    SystemParams p;
    p.g = 2.0;
    const SymbolConvention def;
    apply_axis(p, AxisQuantity::two_gamma_a_over_g, 0.5, def);
    EXPECT_DOUBLE_EQ(p.kappa, 0.5);
    apply_axis(p, AxisQuantity::two_gamma_a_over_g, 0.5, SymbolConvention{false, true});
    EXPECT_DOUBLE_EQ(p.kappa, 1.0);
    apply_axis(p, AxisQuantity::omega_over_g, 0.75, def);
    EXPECT_DOUBLE_EQ(p.omega, 1.5);
    apply_axis(p, AxisQuantity::gamma_b_over_g, 0.01, def);
    EXPECT_DOUBLE_EQ(p.gamma, 0.04);
}

TEST(Config, SinglePointAxis) {
    const RunConfig a = parse_config_string(
        "task = sweep\nsweep.axis1.name = kappa\nsweep.axis1.min = 0.2\nsweep.axis1.count = 1\n");
    ASSERT_TRUE(a.sweep);
    EXPECT_EQ(a.sweep->axis1.values(), std::vector<double>{0.2});
    EXPECT_NO_THROW(parse_config_string(
        "task = sweep\nsweep.axis1.name = kappa\nsweep.axis1.min = 0.2\nsweep.axis1.max = 0.2\nsweep.axis1.count = 1\n"));
    EXPECT_THROW(parse_config_string(
                     "task = sweep\nsweep.axis1.name = kappa\nsweep.axis1.min = 0.2\nsweep.axis1.max = 0.4\nsweep.axis1.count = 1\n"),
                 ConfigError);
}

TEST(Config, AxisValidation) {
    EXPECT_THROW(parse_config_string("task = sweep\n"), ConfigError);
    EXPECT_THROW(parse_config_string("task = sweep\nsweep.axis1.name = kappa\nsweep.axis1.min = 0.4\n"
                                     "sweep.axis1.max = 0.2\nsweep.axis1.count = 3\n"),
                 ConfigError);
    EXPECT_THROW(parse_config_string("task = sweep\nsweep.axis1.name = kappa\nsweep.axis1.min = 0.2\n"
                                     "sweep.axis1.max = 0.4\nsweep.axis1.count = 0\n"),
                 ConfigError);
    EXPECT_THROW(parse_config_string("sweep.axis1.min = 0.2\n"), ConfigError);
    EXPECT_THROW(parse_config_string("sweep.axis2.name = kappa\nsweep.axis2.min = 0\nsweep.axis2.count = 1\n"),
                 ConfigError);
    EXPECT_THROW(parse_config_string("task = sweep\nsweep.axis1.name = detuning\nsweep.axis1.min = 0\nsweep.axis1.count = 1\n"),
                 ConfigError);
}

TEST(Config, GridEndpointsExact) {
    const Axis a{AxisQuantity::kappa, 0.05, 1.5, 30};
    const auto v = a.values();
    ASSERT_EQ(v.size(), 30u);
    EXPECT_EQ(v.front(), 0.05);
    EXPECT_EQ(v.back(), 1.5);
    for (std::size_t k = 1; k < v.size(); ++k) EXPECT_GT(v[k], v[k - 1]);
}
