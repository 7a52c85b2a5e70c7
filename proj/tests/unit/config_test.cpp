#include <gtest/gtest.h>

#include "bagrasp/config.hpp"
#include "test_util.hpp"

using namespace bagrasp;
using bagrasp::testing::error_code_of;
using bagrasp::testing::fixture;

TEST(Config, DefaultsMatchDocumentedValues) {
    const Config c;
    EXPECT_EQ(c.classical.sigma, 1.4);
    EXPECT_EQ(c.classical.canny_low, 0.1);
    EXPECT_EQ(c.classical.canny_high, 0.2);
    EXPECT_EQ(c.classical.perimeter_min, 60.0);
    EXPECT_EQ(c.control.kp, 0.8);
    EXPECT_EQ(c.control.kd, 0.4);
    EXPECT_EQ(c.control.damping, 1e-3);
    EXPECT_EQ(c.control.qdot_max, 1.5);
    EXPECT_EQ(c.control.rate, 100.0);
    EXPECT_EQ(c.denoise.window, 10.0);
    EXPECT_EQ(c.denoise.distance_threshold, 0.02);
    EXPECT_EQ(c.sim.duration, 5.0);
    EXPECT_EQ(c.sim.pos_tol, 0.005);
    EXPECT_EQ(c.sim.ang_tol_deg, 2.0);
    EXPECT_EQ(c.train.lr, 1e-3);
    EXPECT_EQ(c.train.batch, 4);
    EXPECT_EQ(c.train.epochs, 50);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, BundledDefaultFileMatchesBuiltins) {
    const Config file = load_config(std::filesystem::path(BAGRASP_DATA_DIR) / "default.cfg");
    EXPECT_EQ(file.to_text(), Config{}.to_text());
}

TEST(Config, ParsesCommentsAndLists) {
    const Config c = load_config(fixture("custom.cfg"));
    EXPECT_EQ(c.classical.sigma, 2.0);
    EXPECT_EQ(c.classical.canny_low, 0.05);
    EXPECT_EQ(c.classical.color_low, (Rgb{190, 70, 0}));
    EXPECT_EQ(c.sim.start_q[3], 1.1);
    EXPECT_FALSE(c.sim.flat_scenes);
}

TEST(Config, TextRoundTrip) {
    Config c;
    c.set("kp", "1.25");
    c.set("frames", "12");
    c.set("arm", "/tmp/x.arm");
    c.set("color_high", "250, 210, 80");
    const Config back = parse_config(c.to_text());
    EXPECT_EQ(back.to_text(), c.to_text());
    EXPECT_EQ(back.control.kp, 1.25);
    EXPECT_EQ(back.sim.frames, 12);
}

TEST(Config, RejectsBadInput) {
    Config c;
    EXPECT_EQ(error_code_of([&] { c.set("nope", "1"); }), ErrorCode::ConfigError);
    EXPECT_EQ(error_code_of([&] { c.set("kp", "fast"); }), ErrorCode::ConfigError);
    EXPECT_EQ(error_code_of([&] { c.set("frames", "2.5"); }), ErrorCode::ConfigError);
    EXPECT_EQ(error_code_of([&] { c.set("color_low", "1,2"); }), ErrorCode::ConfigError);
    EXPECT_EQ(error_code_of([&] { c.set("color_low", "1,2,300"); }), ErrorCode::ConfigError);
    EXPECT_EQ(error_code_of([&] { c.set("start_q", "1,2,3"); }), ErrorCode::ConfigError);
    EXPECT_EQ(error_code_of([] { parse_config("sigma 1.0\n"); }), ErrorCode::ConfigError);
}

TEST(Config, ValidateCatchesInconsistentValues) {
    Config c;
    c.classical.canny_low = 0.3;  // above high
    EXPECT_EQ(error_code_of([&] { c.validate(); }), ErrorCode::ConfigError);
    Config d;
    d.control.kp = 0.0;
    EXPECT_EQ(error_code_of([&] { d.validate(); }), ErrorCode::ConfigError);
    Config e;
    e.camera.scale_x = 0.0;
    EXPECT_EQ(error_code_of([&] { e.validate(); }), ErrorCode::ConfigError);
}
