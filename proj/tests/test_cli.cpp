#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "unroll/image_io.hpp"
#include "unroll/synth.hpp"

using namespace unroll;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path work_dir = fs::temp_directory_path() / "unroll_cli_tests";

int run(const std::string& args) {
    const std::string cmd = std::string(UNROLL_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    json j;
    in >> j;
    return j;
}

}  // namespace

TEST_CASE("cli end-to-end: synth -> stitch -> metrics -> report") {
    fs::remove_all(work_dir);
    fs::create_directories(work_dir);
    const auto tex_path = work_dir / "texture.png";
    save_image(tex_path.string(), make_blob_texture(1200, 160, 5));

    // synth
    const auto frames_dir = work_dir / "frames";
    REQUIRE(run("synth --texture " + tex_path.string() +
                " --deg-per-frame 2.4 --frames 12 --frame-w 160 --frame-h 160 --seed 3 --out " +
                frames_dir.string()) == 0);
    CHECK(fs::exists(frames_dir / "frame_000011.png"));
    CHECK(fs::exists(frames_dir / "ground_truth.png"));
    const json manifest = read_json(frames_dir / "manifest.json");
    CHECK(manifest.at("true_shift_px").get<double>() == Catch::Approx(8.0));

    // stitch
    const auto out_dir = work_dir / "out";
    REQUIRE(run("--seed 9 --set harris.max_points=150 stitch --frames " + frames_dir.string() +
                " --out " + out_dir.string()) == 0);
    REQUIRE(fs::exists(out_dir / "panorama.png"));
    const json stats = read_json(out_dir / "stitch_stats.json");
    const Image pano = load_image((out_dir / "panorama.png").string());
    long ledger = 160;
    for (const auto& it : stats.at("iterations")) ledger += it.at("col_min").get<int>();
    CHECK(pano.width == ledger);
    CHECK(stats.at("wbp").get<int>() ==
          static_cast<int>(std::floor(1.82 * stats.at("mean_shift").get<double>() + 0.5)));

    // metrics (single image)
    const auto metrics_json = work_dir / "metrics.json";
    REQUIRE(std::system((std::string(UNROLL_CLI_PATH) + " metrics --image " +
                         (out_dir / "panorama.png").string() + " > " + metrics_json.string() +
                         " 2>/dev/null")
                            .c_str()) == 0);
    const json m = read_json(metrics_json);
    CHECK(m.contains("exposure"));
    CHECK(m.contains("sharpness_fft"));
    CHECK(m.contains("sharpness_laplace"));

    // metrics (pair)
    const auto pair_json = work_dir / "pair.json";
    REQUIRE(std::system((std::string(UNROLL_CLI_PATH) + " metrics --pair " +
                         (frames_dir / "frame_000000.png").string() + " " +
                         (frames_dir / "frame_000001.png").string() + " > " +
                         pair_json.string() + " 2>/dev/null")
                            .c_str()) == 0);
    const json pm = read_json(pair_json);
    CHECK(pm.contains("edge"));
    CHECK(pm.at("overlap").contains("psnr"));

    // report on a panorama with a planted dark blob
    Image defect_pano(600, 160, 1, 200);
    for (int y = 20; y < 120; ++y)
        for (int x = 200; x < 280; ++x) defect_pano.at(x, y) = 5;
    const auto defect_path = work_dir / "defect_pano.png";
    save_image(defect_path.string(), defect_pano);
    const auto report_path = work_dir / "wear.json";
    const auto annotated_path = work_dir / "annotated.png";
    REQUIRE(run("report --panorama " + defect_path.string() + " --patch-size 150 --areas 10 " +
                "--out " + report_path.string() + " --annotated " + annotated_path.string()) ==
            0);
    const json wear = read_json(report_path);
    REQUIRE(wear.at("timesteps").size() == 1);
    CHECK(wear.at("timesteps")[0].at("total").get<int>() >= 1);
    CHECK(fs::exists(annotated_path));
}

TEST_CASE("cli select emits the JSON report and CSV twins") {
    fs::create_directories(work_dir);
    const auto tex_path = work_dir / "sel_texture.png";
    save_image(tex_path.string(), make_blob_texture(900, 100, 6));
    const auto frames_dir = work_dir / "sel_frames";
    REQUIRE(run("synth --texture " + tex_path.string() +
                " --deg-per-frame 3.2 --frames 6 --frame-w 140 --frame-h 100 --seed 2 --out " +
                frames_dir.string()) == 0);
    const auto report = work_dir / "sel" / "report.json";
    REQUIRE(run("--set harris.max_points=120 select --frames " + frames_dir.string() +
                " --phases 1,4 --widths 5,25 --repeats 1 --out " + report.string()) == 0);
    const json doc = read_json(report);
    REQUIRE(doc.at("phase1").size() == 8);
    for (const auto& row : doc.at("phase1"))
        CHECK(row.at("avg_matches").get<double>() <= row.at("avg_features").get<double>());
    REQUIRE(doc.at("phase4").size() == 2);
    CHECK(doc.at("phase4")[0].at("width").get<int>() == 5);
    CHECK(fs::exists(work_dir / "sel" / "report_phase1.csv"));
    CHECK(fs::exists(work_dir / "sel" / "report_phase4.csv"));
}

TEST_CASE("cli reports input errors with exit 1") {
    const auto empty_dir = work_dir / "empty";
    fs::create_directories(empty_dir);
    CHECK(run("stitch --frames " + empty_dir.string() + " --out " + work_dir.string()) == 1);
    CHECK(run("metrics --image /nonexistent.png") == 1);
}

TEST_CASE("cli reports config errors with exit 2") {
    const auto cfg = work_dir / "bad.conf";
    fs::create_directories(work_dir);
    std::ofstream(cfg) << "no_such_key = 1\n";
    CHECK(run("--config " + cfg.string() + " stitch --frames x --out y") == 2);
    CHECK(run("--set harris.k=oops stitch --frames x --out y") == 2);
    CHECK(run("definitely-not-a-subcommand") == 2);
}

TEST_CASE("cli --version exits cleanly") {
    CHECK(run("--version") == 0);
}
