#include "nudged_ns/config.hpp"
#include "nudged_ns/error.hpp"
#include "nudged_ns/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nudged_ns;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nudged_ns_exp_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Config tiny_noflow(const fs::path& out) {
    Config c = Config::defaults(Experiment::exp2_noflow);
    c.set("out.dir", out.string());
    c.set("mesh.n=4");
    c.set("run.t_end=0.1");
    return c;
}

Config tiny_cylinder(Experiment e, const fs::path& out) {
    Config c = Config::defaults(e);
    c.set("out.dir", out.string());
    c.set("mesh.nx=16");
    c.set("mesh.ny=8");
    c.set("mesh.n_circ=16");
    c.set("run.dt=0.02");
    c.set("exp3.spinup=0.1");
    c.set("exp3.window=0.2");
    return c;
}

} // namespace

TEST(Exp2, ScottVogeliusBeatsTaylorHood) {
    const fs::path out = scratch("noflow");
    const NoflowResult r = exp2_noflow(tiny_noflow(out));
    ASSERT_EQ(r.variants.size(), 4u);
    const NoflowVariant& sv = r.variants[0];
    EXPECT_EQ(sv.name, "SV");
    EXPECT_LT(sv.max_div_l2, 1e-8);
    for (std::size_t k = 1; k < r.variants.size(); ++k) EXPECT_GT(r.variants[k].final_error, 1e3 * sv.final_error);
    // Grad-div shrinks the Taylor-Hood error.
    EXPECT_LT(r.variants[3].final_error, r.variants[1].final_error);
    EXPECT_TRUE(fs::exists(out / "SV.csv"));
    EXPECT_TRUE(fs::exists(out / "TH_gamma10.csv"));
    EXPECT_TRUE(fs::exists(out / "resolved-config.txt"));
    fs::remove_all(out);
}

TEST(Exp2, ScottVogeliusVelocityIgnoresPotentialForce) {
    const fs::path out = scratch("noflow_ra");
    Config strong = tiny_noflow(out), weak = tiny_noflow(out);
    strong.set("exp2.th_gammas=0");
    weak.set("exp2.th_gammas=0");
    weak.set("exp2.ra=1");
    const NoflowResult a = exp2_noflow(strong), b = exp2_noflow(weak);
    EXPECT_NEAR(a.variants[0].final_error, b.variants[0].final_error, 1e-10 * b.variants[0].final_error);
    EXPECT_GT(a.variants[1].final_error, 100 * b.variants[1].final_error);
    fs::remove_all(out);
}

TEST(Exp2, RerunsAreBitIdentical) {
    const fs::path a = scratch("noflow_a"), b = scratch("noflow_b");
    Config ca = tiny_noflow(a), cb = tiny_noflow(b);
    ca.set("exp2.th_gammas=1");
    cb.set("exp2.th_gammas=1");
    exp2_noflow(ca);
    exp2_noflow(cb);
    EXPECT_EQ(slurp(a / "SV.csv"), slurp(b / "SV.csv"));
    EXPECT_EQ(slurp(a / "TH_gamma1.csv"), slurp(b / "TH_gamma1.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Exp3, DaRunsDnsAndTracksIt) {
    const fs::path out = scratch("cyl");
    const CylinderDaResult r = exp3_cylinder_da(tiny_cylinder(Experiment::exp3_cylinder_da, out));
    EXPECT_TRUE(fs::exists(out / "dns_trajectory.bin"));
    EXPECT_TRUE(fs::exists(out / "da.csv"));
    EXPECT_TRUE(fs::exists(out / "summary.txt"));
    EXPECT_EQ(r.da.size(), r.dns.size());
    EXPECT_GT(r.diff_first, 0.0);
    // Nudging pulls the state towards the stored run.
    EXPECT_LT(r.diff_last, r.diff_first);
    EXPECT_TRUE(std::isfinite(r.lift_amplitude));

    // A second DA run reuses the stored trajectory and reproduces the same output.
    const std::string first = slurp(out / "da.csv");
    exp3_cylinder_da(tiny_cylinder(Experiment::exp3_cylinder_da, out));
    EXPECT_EQ(slurp(out / "da.csv"), first);
    fs::remove_all(out);
}

TEST(Exp3, TrajectoryStepMismatchRejected) {
    const fs::path out = scratch("cyl_dt");
    exp3_cylinder_dns(tiny_cylinder(Experiment::exp3_cylinder_dns, out));
    Config c = tiny_cylinder(Experiment::exp3_cylinder_da, out);
    c.set("run.dt=0.01");
    EXPECT_THROW(exp3_cylinder_da(c), Error);
    fs::remove_all(out);
}

TEST(Exp1, SingleRunErrorShrinksWithMesh) {
    Config c = Config::defaults(Experiment::exp1_convergence);
    c.set("run.t_end=0.5");
    const double coarse = exp1_single(c, 4, 0.125);
    const double fine = exp1_single(c, 8, 0.125);
    EXPECT_GT(coarse, 0.0);
    EXPECT_LT(fine, coarse);
}

TEST(Exp1, LadderWritesRates) {
    const fs::path out = scratch("exp1");
    Config c = Config::defaults(Experiment::exp1_convergence);
    c.set("out.dir", out.string());
    c.set("run.t_end=0.5");
    c.set("exp1.ladders=spatial");
    c.set("exp1.spatial_n=2,4");
    c.set("exp1.spatial_dt=0.05");
    const Exp1Result r = exp1_convergence(c);
    ASSERT_EQ(r.ladders.size(), 1u);
    ASSERT_EQ(r.ladders[0].rows.size(), 2u);
    EXPECT_GT(*r.ladders[0].rows[1].rate, 1.5);
    EXPECT_EQ(slurp(out / "rates_spatial.csv").rfind("h,error,rate\n", 0), 0u);
    fs::remove_all(out);
}

TEST(Exp1, UnknownLadderRejected) {
    Config c = Config::defaults(Experiment::exp1_convergence);
    c.set("out.dir", scratch("exp1_bad").string());
    c.set("exp1.ladders=diagonal");
    EXPECT_THROW(exp1_convergence(c), ConfigError);
}
