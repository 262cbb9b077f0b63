#include "nudged_ns/error.hpp"
#include "nudged_ns/props.hpp"

#include <gtest/gtest.h>

using namespace nudged_ns;

namespace {

// Shared across tests; the suite takes a few seconds.
const PropsReport& clean_report() {
    static const PropsReport r = [] {
        PropsOptions o;
        o.long_steps = 200;
        return run_properties(o);
    }();
    return r;
}

} // namespace

TEST(Props, AllPass) {
    const PropsReport& r = clean_report();
    EXPECT_GE(r.results.size(), 20u);
    for (const auto& p : r.results) EXPECT_TRUE(p.passed) << p.name << ": " << p.detail;
    EXPECT_TRUE(r.all_passed());
}

TEST(Props, ReportFormat) {
    const PropsReport& r = clean_report();
    const std::string text = r.to_text();
    EXPECT_NE(text.find("PASS timeloop.g_identity: "), std::string::npos);
    ASSERT_NE(r.find("timeloop.long_time_stability"), nullptr);
    EXPECT_EQ(r.find("no.such.property"), nullptr);
}

TEST(Props, InjectedMassFaultIsCaught) {
    PropsOptions o;
    o.long_steps = 100;
    o.fault = Fault::mass;
    const PropsReport r = run_properties(o);
    EXPECT_FALSE(r.all_passed());
    ASSERT_NE(r.find("operators.symmetry"), nullptr);
    EXPECT_FALSE(r.find("operators.symmetry")->passed);
    EXPECT_FALSE(r.find("operators.dense_oracle")->passed);
    EXPECT_TRUE(r.find("mesh.validate")->passed);
}

TEST(Props, FaultNames) {
    EXPECT_EQ(parse_fault("none"), Fault::none);
    EXPECT_EQ(parse_fault("mass"), Fault::mass);
    EXPECT_THROW(parse_fault("stiffness"), ConfigError);
}
