#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "support/fixtures.hpp"
#include "unroll/report.hpp"

using namespace unroll;

namespace {

std::string tmp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "unroll_report_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace

TEST_CASE("partition_grid tiles a 1500x150 panorama into ten patches") {
    const Image pano(1500, 150, 1, 200);
    const auto patches = partition_grid(pano, 150);
    REQUIRE(patches.size() == 10);
    for (int i = 0; i < 10; ++i) {
        CHECK(patches[i].x == i * 150);
        CHECK(patches[i].y == 0);
    }
}

TEST_CASE("partition_grid drops the right remainder") {
    const Image pano(1499, 150, 1, 200);
    CHECK(partition_grid(pano, 150).size() == 9);
}

TEST_CASE("partition_grid emits row-major order") {
    const Image pano(450, 450, 1, 200);
    const auto patches = partition_grid(pano, 150);
    REQUIRE(patches.size() == 9);
    CHECK(patches[0].x == 0);
    CHECK(patches[0].y == 0);
    CHECK(patches[1].x == 150);
    CHECK(patches[1].y == 0);
    CHECK(patches[3].x == 0);
    CHECK(patches[3].y == 150);
}

TEST_CASE("partition_grid refuses panoramas smaller than one patch") {
    CHECK_THROWS_AS(partition_grid(Image(100, 100, 1), 150), PanoramaTooSmall);
}

TEST_CASE("classify_patches with an always-ok classifier changes nothing") {
    const Image pano = fixtures::noise_image(600, 150, 1, 1);
    const auto patches = partition_grid(pano, 150);
    const auto result =
        classify_patches(pano, patches, [](const Image&) { return PatchLabel::ok; });
    CHECK(result.annotated == pano);
    for (const auto& p : result.patches) CHECK(p.label == PatchLabel::ok);
}

TEST_CASE("the dark-ratio stub flags exactly the planted blob") {
    Image pano(600, 150, 1, 180);
    fixtures::fill_rect(pano, 320, 40, 80, 80, 10);  // dark blob in patch 2
    const auto result =
        classify_patches(pano, partition_grid(pano, 150), dark_ratio_classifier());
    REQUIRE(result.patches.size() == 4);
    for (const auto& p : result.patches) {
        const bool expect_defect = p.x == 300;
        CHECK((p.label == PatchLabel::defect) == expect_defect);
    }
    // the annotated copy marks the defect patch border
    CHECK(result.annotated.at(300, 40) == 255);
    CHECK(result.annotated.at(0, 0) == pano.at(0, 0));
}

TEST_CASE("classification is deterministic") {
    const Image pano = fixtures::noise_image(600, 300, 2, 1);
    const auto a = classify_patches(pano, partition_grid(pano), dark_ratio_classifier());
    const auto b = classify_patches(pano, partition_grid(pano), dark_ratio_classifier());
    REQUIRE(a.patches.size() == b.patches.size());
    for (std::size_t i = 0; i < a.patches.size(); ++i)
        CHECK(a.patches[i].label == b.patches[i].label);
}

TEST_CASE("aggregate_areas maps defects to areas by their left corner") {
    std::vector<Patch> patches;
    patches.push_back({0, 0, 150, PatchLabel::defect});
    patches.push_back({150, 0, 150, PatchLabel::ok});
    const AreaCounts counts = aggregate_areas(1500, patches, 10);
    CHECK(counts.areas[0] == 1);
    for (int i = 1; i < 10; ++i) CHECK(counts.areas[i] == 0);
    CHECK(counts.total() == 1);
}

TEST_CASE("aggregate_areas clamps the last area boundary") {
    std::vector<Patch> patches;
    patches.push_back({999, 0, 150, PatchLabel::defect});
    const AreaCounts counts = aggregate_areas(1000, patches, 10);
    CHECK(counts.areas[9] == 1);
}

TEST_CASE("aggregate_areas with no defects is all zeros") {
    const AreaCounts counts = aggregate_areas(1000, {}, 10);
    CHECK(counts.total() == 0);
    CHECK(counts.areas.size() == 10);
}

TEST_CASE("write_report emits recomputable totals and survives a round trip") {
    AreaCounts t1{"t1", {1, 0, 0, 0, 0, 0, 0, 0, 0, 0}};
    AreaCounts t2{"t2", {1, 2, 0, 0, 0, 0, 0, 1, 0, 0}};
    const std::string path = tmp_path("wear.json");
    write_report({t1, t2}, path);

    const auto loaded = read_report(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].timestep == "t1");
    CHECK(loaded[0].areas == t1.areas);
    CHECK(loaded[1].areas == t2.areas);
    CHECK(loaded[1].total() == 4);
}

TEST_CASE("report preserves a wear-growth series order") {
    std::vector<AreaCounts> series;
    for (int t = 1; t <= 4; ++t) {
        AreaCounts c;
        c.timestep = "t" + std::to_string(t);
        c.areas.assign(10, 0);
        for (int i = 0; i < t; ++i) c.areas[i] = t;  // growing totals
        series.push_back(c);
    }
    const std::string path = tmp_path("series.json");
    write_report(series, path);
    const auto loaded = read_report(path);
    REQUIRE(loaded.size() == 4);
    int prev = -1;
    for (const auto& c : loaded) {
        CHECK(c.total() > prev);
        prev = c.total();
    }
}

TEST_CASE("area counts always sum to the defect count") {
    const Image pano = fixtures::noise_image(1200, 300, 3, 1);
    const auto classified =
        classify_patches(pano, partition_grid(pano), dark_ratio_classifier(130, 0.4));
    int defects = 0;
    for (const auto& p : classified.patches)
        defects += p.label == PatchLabel::defect ? 1 : 0;
    const AreaCounts counts = aggregate_areas(pano.width, classified.patches, 10);
    CHECK(counts.total() == defects);
}
