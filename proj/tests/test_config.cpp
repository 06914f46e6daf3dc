#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "unroll/config.hpp"

using namespace unroll;

namespace {

std::string write_config(const std::string& body) {
    const auto dir = std::filesystem::temp_directory_path() / "unroll_config_tests";
    std::filesystem::create_directories(dir);
    static int counter = 0;
    const auto path = dir / ("cfg" + std::to_string(counter++) + ".conf");
    std::ofstream(path) << body;
    return path.string();
}

}  // namespace

TEST_CASE("config file parsing covers every documented key") {
    const std::string path = write_config(R"(
# stitch run
frames_dir = /data/frames
output_dir = /data/out
seed = 99
roi = [4, 8, 100, 40]
pitch_angle_deg = -2.5
grayscale = true
detector = harris_sub
harris.k = 0.06
harris.sigma = 1.5
harris.threshold_rel = 0.02
harris.nms_radius = 4
harris.max_points = 300
descriptor.patch_size = 11
matcher = bf_knn
matcher.cross_check = false
matcher.ratio = 0.8
model = affine
robust.method = lmeds
robust.inlier_thresh = 2.0
robust.max_iters = 500
blend.enabled = true
blend.auto = false
blend.width = 30
compose.crop_frac = 0.12
compose.outlier_cap = 0.4
compose.paper_fidelity = true
harness.misalign_threshold = 20
direct.search_window = 48
)");
    const RunConfig cfg = parse_config_file(path);
    CHECK(cfg.frames_dir == "/data/frames");
    CHECK(cfg.output_dir == "/data/out");
    CHECK(cfg.seed == 99);
    CHECK(cfg.preprocess.roi == Rect{4, 8, 100, 40});
    CHECK(cfg.preprocess.pitch_angle_deg == -2.5);
    CHECK(cfg.preprocess.grayscale);
    CHECK(cfg.stitch.detector == DetectorKind::harris_sub);
    CHECK(cfg.stitch.harris.k == 0.06);
    CHECK(cfg.stitch.harris.sigma == 1.5);
    CHECK(cfg.stitch.harris.threshold_rel == 0.02);
    CHECK(cfg.stitch.harris.nms_radius == 4);
    CHECK(cfg.stitch.harris.max_points == 300);
    CHECK(cfg.stitch.patch_size == 11);
    CHECK(cfg.stitch.matcher == MatcherKind::bf_knn);
    CHECK_FALSE(cfg.stitch.cross_check);
    CHECK(cfg.stitch.ratio == 0.8);
    CHECK(cfg.stitch.model == TransformKind::affine);
    CHECK(cfg.stitch.robust.method == RobustMethod::lmeds);
    CHECK(cfg.stitch.robust.inlier_thresh == 2.0);
    CHECK(cfg.stitch.robust.max_iters == 500);
    CHECK(cfg.stitch.blend.enabled);
    CHECK_FALSE(cfg.stitch.blend.auto_width);
    CHECK(cfg.stitch.blend.width == 30);
    CHECK(cfg.stitch.crop_frac == 0.12);
    CHECK(cfg.stitch.outlier_cap == 0.4);
    CHECK(cfg.stitch.paper_fidelity);
    CHECK(cfg.misalign_threshold == 20);
    CHECK(cfg.direct_search_window == 48);
    // robust.seed inherits the global seed when not set explicitly
    CHECK(cfg.stitch.robust.seed == 99);
}

TEST_CASE("an explicit robust.seed overrides the global seed") {
    const RunConfig cfg = parse_config_file(write_config("seed = 5\nrobust.seed = 17\n"));
    CHECK(cfg.stitch.robust.seed == 17);
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_AS(parse_config_file(write_config("blend.mode = feather\n")), ConfigError);
    CHECK_THROWS_AS(parse_config_file(write_config("harris = 3\n")), ConfigError);
}

TEST_CASE("malformed values are rejected") {
    CHECK_THROWS_AS(parse_config_file(write_config("harris.k = fast\n")), ConfigError);
    CHECK_THROWS_AS(parse_config_file(write_config("roi = [1,2,3]\n")), ConfigError);
    CHECK_THROWS_AS(parse_config_file(write_config("grayscale = maybe\n")), ConfigError);
    CHECK_THROWS_AS(parse_config_file(write_config("detector = orb\n")), ConfigError);
    CHECK_THROWS_AS(parse_config_file(write_config("frames_dir\n")), ConfigError);
}

TEST_CASE("value invariants are enforced") {
    CHECK_THROWS_AS(parse_config_file(write_config("harris.k = 0.5\n")), ConfigError);
    CHECK_THROWS_AS(parse_config_file(write_config("harris.threshold_rel = 1.5\n")), ConfigError);
    CHECK_THROWS_AS(parse_config_file(write_config("pitch_angle_deg = 80\n")), ConfigError);
    CHECK_THROWS_AS(parse_config_file(write_config("robust.max_iters = 0\n")), ConfigError);
    CHECK_THROWS_AS(parse_config_file(write_config("blend.width = 0\n")), ConfigError);
    CHECK_THROWS_AS(parse_config_file(write_config("compose.crop_frac = 0.7\n")), ConfigError);
}

TEST_CASE("missing config files raise ConfigError") {
    CHECK_THROWS_AS(parse_config_file("/nonexistent/run.conf"), ConfigError);
}
