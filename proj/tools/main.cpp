// Command-line front end: stitch, metrics, select, synth, report.
// Machine-readable JSON goes to stdout or files; human text to stderr.
// Exit codes: 0 ok, 1 input error, 2 config error, 3 internal failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "unroll/unroll.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace unroll;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CliSettings {
    std::string config_path;
    std::vector<std::string> overrides;  // key=value
    std::uint64_t seed = 0;
    bool seed_set = false;
};

RunConfig resolve_config(const CliSettings& cli) {
    RunConfig cfg;
    if (!cli.config_path.empty()) cfg = parse_config_file(cli.config_path);
    if (cli.seed_set) {
        cfg.seed = cli.seed;
        cfg.seed_explicit = true;
    }
    for (const auto& kv : cli.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got: " + kv);
        apply_config_kv(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.finalize();
    return cfg;
}

// Frames are numbered image files; anything without a digit in its name
// (ground_truth.png, panorama.png, ...) is not part of the sequence.
std::vector<std::string> list_frame_files(const std::string& dir) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        for (auto& c : ext) c = static_cast<char>(std::tolower(c));
        if (ext != ".png" && ext != ".pgm" && ext != ".ppm") continue;
        const std::string stem = entry.path().stem().string();
        if (std::none_of(stem.begin(), stem.end(),
                         [](unsigned char c) { return std::isdigit(c); }))
            continue;
        files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<Image> load_frames(const RunConfig& cfg) {
    const auto files = list_frame_files(cfg.frames_dir);
    if (files.empty()) throw IoError("no frames found in " + cfg.frames_dir);
    std::vector<Image> frames;
    frames.reserve(files.size());
    for (const auto& f : files) frames.push_back(preprocess_frame(load_image(f), cfg.preprocess));
    return frames;
}

json stats_to_json(const StitchStats& stats, int frame_width) {
    json iterations = json::array();
    for (const auto& it : stats.iterations) {
        iterations.push_back({{"col_min", it.col_min},
                              {"features_a", it.n_features_a},
                              {"features_b", it.n_features_b},
                              {"matches", it.n_matches},
                              {"inliers", it.n_inliers},
                              {"degenerate", it.degenerate}});
    }
    return json{{"iterations", iterations},
                {"mean_shift", stats.mean_shift},
                {"low_match_count", stats.low_match_count},
                {"wbp", compute_wbp(stats.mean_shift, frame_width)}};
}

json overlap_to_json(const OverlapReport& rep) {
    json j{{"d_area", rep.d_area}, {"d_euk", rep.d_euk},   {"d_man", rep.d_man},
           {"d_chi", rep.d_chi},   {"identical", rep.identical}};
    if (rep.identical) {
        j["psnr"] = nullptr;
        j["om"] = nullptr;
    } else {
        j["psnr"] = rep.psnr;
        j["om"] = rep.om;
    }
    return j;
}

int cmd_stitch(const CliSettings& cli, const std::string& frames_flag,
               const std::string& out_flag) {
    RunConfig cfg = resolve_config(cli);
    if (!frames_flag.empty()) cfg.frames_dir = frames_flag;
    if (!out_flag.empty()) cfg.output_dir = out_flag;
    if (cfg.frames_dir.empty()) throw ConfigError("stitch: frames_dir not set");

    const auto frames = load_frames(cfg);
    std::cerr << "stitching " << frames.size() << " frames of " << frames.front().width << "x"
              << frames.front().height << "\n";
    const StitchResult res = stitch_video(frames, cfg.stitch);

    fs::create_directories(cfg.output_dir);
    const auto pano_path = fs::path(cfg.output_dir) / "panorama.png";
    save_image(pano_path.string(), res.panorama);

    json doc = stats_to_json(res.stats, frames.front().width);
    doc["frames"] = frames.size();
    doc["frame_width"] = frames.front().width;
    doc["frame_height"] = frames.front().height;
    doc["panorama_width"] = res.panorama.width;
    std::ofstream out(fs::path(cfg.output_dir) / "stitch_stats.json");
    out << doc.dump(2) << "\n";
    std::cerr << "panorama " << res.panorama.width << "x" << res.panorama.height << " -> "
              << pano_path.string() << "\n";
    return 0;
}

int cmd_metrics(const std::string& image_path, const std::vector<std::string>& pair) {
    json doc;
    if (!pair.empty()) {
        const Image a = load_image(pair[0]);
        const Image b = load_image(pair[1]);
        doc["edge"] = edge_metric(a, b);
        if (a.width == b.width && a.height == b.height)
            doc["overlap"] = overlap_to_json(overlap_metric(a, b));
        for (const auto* name : {"first", "second"}) {
            const Image& img = std::string(name) == "first" ? a : b;
            doc[name] = {{"exposure", exposure_metric(img)},
                         {"sharpness_fft", sharpness_fft(img)},
                         {"sharpness_laplace", sharpness_laplace(img)}};
        }
    } else {
        const Image img = load_image(image_path);
        doc = {{"exposure", exposure_metric(img)},
               {"sharpness_fft", sharpness_fft(img)},
               {"sharpness_laplace", sharpness_laplace(img)}};
    }
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_synth(const std::string& texture_path, double deg_per_frame, int n_frames,
              const std::string& mode, double flicker, double flicker_period, double noise,
              double vignette, std::uint64_t seed, int frame_w, int frame_h, double focal,
              double distance, const std::string& out_dir) {
    SequenceSpec spec;
    spec.texture = load_image(texture_path);
    spec.deg_per_frame = deg_per_frame;
    spec.n_frames = n_frames;
    spec.exposure_flicker = flicker;
    spec.flicker_period = flicker_period;
    spec.noise_sigma = noise;
    spec.seed = seed;
    CameraConfig cam;
    cam.frame_w = frame_w;
    cam.frame_h = frame_h;
    cam.focal_px = focal;
    cam.distance = distance;
    cam.vignette = vignette;
    if (mode == "perspective")
        cam.mode = CameraMode::perspective;
    else if (mode == "orthographic")
        cam.mode = CameraMode::orthographic;
    else
        throw ConfigError("synth: mode must be perspective|orthographic");

    const SequenceResult seq = generate_sequence(spec, cam);
    fs::create_directories(out_dir);
    for (int i = 0; i < n_frames; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06d.png", i);
        save_image((fs::path(out_dir) / name).string(), seq.frames[i]);
    }
    save_image((fs::path(out_dir) / "ground_truth.png").string(), seq.ground_truth);
    json manifest{{"texture", texture_path},
                  {"deg_per_frame", deg_per_frame},
                  {"frames", n_frames},
                  {"mode", mode},
                  {"flicker", flicker},
                  {"flicker_period", flicker_period},
                  {"noise", noise},
                  {"vignette", vignette},
                  {"seed", seed},
                  {"frame_w", frame_w},
                  {"frame_h", frame_h},
                  {"focal_px", focal},
                  {"distance", distance},
                  {"true_shift_px", seq.true_shift_px}};
    std::ofstream((fs::path(out_dir) / "manifest.json")) << manifest.dump(2) << "\n";
    std::cerr << "wrote " << n_frames << " frames + ground_truth.png to " << out_dir << "\n";
    return 0;
}

json phase_row_json(const PhaseRow& row) {
    return json{{"combo", row.combo.name()},
                {"avg_features", row.avg_features},
                {"avg_matches", row.avg_matches},
                {"low_feature_iters", row.low_feature_iters},
                {"low_match_iters", row.low_match_iters},
                {"em_sum", row.em_sum},
                {"om_sum", row.om_sum},
                {"total", row.total()},
                {"misalignment_count", row.misalignment_count},
                {"elapsed_ms", row.elapsed_ms}};
}

void write_phase_csv(const std::string& path, const std::vector<PhaseRow>& rows) {
    std::ofstream out(path);
    out << "combo,avg_features,avg_matches,low_feature_iters,low_match_iters,"
           "em_sum,om_sum,total,misalignment_count,elapsed_ms\n";
    for (const auto& r : rows)
        out << r.combo.name() << "," << r.avg_features << "," << r.avg_matches << ","
            << r.low_feature_iters << "," << r.low_match_iters << "," << r.em_sum << ","
            << r.om_sum << "," << r.total() << "," << r.misalignment_count << ","
            << r.elapsed_ms << "\n";
}

int cmd_select(const CliSettings& cli, const std::string& frames_flag,
               const std::string& phases_csv, const std::string& widths_csv, int repeats,
               const std::string& out_path) {
    RunConfig cfg = resolve_config(cli);
    if (!frames_flag.empty()) cfg.frames_dir = frames_flag;
    if (cfg.frames_dir.empty()) throw ConfigError("select: frames_dir not set");
    const auto frames = load_frames(cfg);

    std::vector<int> phases;
    for (const auto& tok : CLI::detail::split(phases_csv, ','))
        phases.push_back(std::stoi(tok));
    std::vector<int> widths;
    for (const auto& tok : CLI::detail::split(widths_csv, ','))
        widths.push_back(std::stoi(tok));

    const auto combos = all_combos();
    const fs::path out(out_path);
    const fs::path stem = out.parent_path() / out.stem();
    fs::create_directories(out.parent_path().empty() ? "." : out.parent_path());
    json doc;

    for (int phase : phases) {
        std::cerr << "phase " << phase << "...\n";
        if (phase == 1) {
            const auto rows = run_phase1(combos, frames, cfg.stitch);
            json arr = json::array();
            for (const auto& r : rows) arr.push_back(phase_row_json(r));
            doc["phase1"] = arr;
            write_phase_csv(stem.string() + "_phase1.csv", rows);
        } else if (phase == 2) {
            const auto rows = run_phase2(combos, frames, cfg.stitch, cfg.misalign_threshold);
            json arr = json::array();
            for (const auto& r : rows) arr.push_back(phase_row_json(r));
            doc["phase2"] = arr;
            write_phase_csv(stem.string() + "_phase2.csv", rows);
        } else if (phase == 3) {
            std::vector<Image> panoramas;
            const auto rows = run_phase3(combos, frames, repeats, &panoramas, cfg.stitch);
            json arr = json::array();
            for (const auto& r : rows) arr.push_back(phase_row_json(r));
            doc["phase3"] = arr;
            write_phase_csv(stem.string() + "_phase3.csv", rows);
            for (std::size_t i = 0; i < panoramas.size(); ++i)
                save_image(stem.string() + "_phase3_" + combos[i].name() + ".png",
                           panoramas[i]);
        } else if (phase == 4) {
            const auto rows = run_phase4(widths, frames, cfg.stitch);
            json arr = json::array();
            std::ofstream csv(stem.string() + "_phase4.csv");
            csv << "width,exposure,sharpness_fft,sharpness_laplace,mean_shift\n";
            for (const auto& r : rows) {
                arr.push_back(json{{"width", r.width},
                                   {"exposure", r.exposure},
                                   {"sharpness_fft", r.sharpness_fft},
                                   {"sharpness_laplace", r.sharpness_laplace},
                                   {"mean_shift", r.mean_shift}});
                csv << r.width << "," << r.exposure << "," << r.sharpness_fft << ","
                    << r.sharpness_laplace << "," << r.mean_shift << "\n";
            }
            doc["phase4"] = arr;
        } else {
            throw ConfigError("select: unknown phase " + std::to_string(phase));
        }
    }
    std::ofstream(out_path) << doc.dump(2) << "\n";
    std::cerr << "report -> " << out_path << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& panorama_paths, int patch_size, int areas,
               const std::string& classifier_name, int dark_thresh, double dark_ratio,
               const std::string& out_path, const std::string& annotated_path) {
    if (classifier_name != "dark_ratio")
        throw ConfigError("report: unknown classifier: " + classifier_name);
    const PatchClassifier classifier = dark_ratio_classifier(dark_thresh, dark_ratio);

    std::vector<AreaCounts> series;
    for (std::size_t i = 0; i < panorama_paths.size(); ++i) {
        const Image pano = load_image(panorama_paths[i]);
        const auto classified =
            classify_patches(pano, partition_grid(pano, patch_size), classifier);
        series.push_back(aggregate_areas(pano.width, classified.patches, areas,
                                         "t" + std::to_string(i + 1)));
        if (!annotated_path.empty()) {
            std::string path = annotated_path;
            if (panorama_paths.size() > 1) {
                const fs::path p(annotated_path);
                path = (p.parent_path() /
                        (p.stem().string() + "_t" + std::to_string(i + 1) +
                         p.extension().string()))
                           .string();
            }
            save_image(path, classified.annotated);
        }
    }
    write_report(series, out_path);
    std::cerr << "report -> " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"unroll: line-scan style stitching of rotating surfaces"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CliSettings cli;
    app.add_option("--config", cli.config_path, "flat key=value config file");
    app.add_option("--seed", cli.seed, "global RNG seed")->each([&](const std::string&) {
        cli.seed_set = true;
    });
    app.add_option("--set", cli.overrides, "config override key=value (repeatable)");

    auto* stitch = app.add_subcommand("stitch", "stitch a frame directory into a panorama");
    std::string frames_flag, out_flag;
    stitch->add_option("--frames", frames_flag, "directory of numbered frames");
    stitch->add_option("--out", out_flag, "output directory");

    auto* metrics = app.add_subcommand("metrics", "print quality metrics as JSON");
    std::string image_path;
    std::vector<std::string> pair;
    metrics->add_option("--image", image_path, "single image");
    metrics->add_option("--pair", pair, "two images (edge/overlap)")->expected(2);

    auto* synth = app.add_subcommand("synth", "render a rotating-cylinder sequence");
    std::string texture_path, mode = "orthographic", synth_out = "synth_out";
    double deg_per_frame = 1.44, flicker = 0.0, flicker_period = 8.0, noise = 0.0;
    double vignette = 0.0, focal = 400.0, distance = 3.0;
    int n_frames = 50, frame_w = 200, frame_h = 200;
    std::uint64_t synth_seed = 1;
    synth->add_option("--texture", texture_path, "unrolled surface image")->required();
    synth->add_option("--deg-per-frame", deg_per_frame, "rotation per frame");
    synth->add_option("--frames", n_frames, "frame count");
    synth->add_option("--mode", mode, "perspective|orthographic");
    synth->add_option("--flicker", flicker, "exposure flicker amplitude");
    synth->add_option("--flicker-period", flicker_period, "flicker period in frames");
    synth->add_option("--noise", noise, "Gaussian noise sigma");
    synth->add_option("--vignette", vignette, "illumination falloff across the frame");
    synth->add_option("--seed", synth_seed, "render seed");
    synth->add_option("--frame-w", frame_w, "frame width");
    synth->add_option("--frame-h", frame_h, "frame height");
    synth->add_option("--focal", focal, "focal length in px (perspective)");
    synth->add_option("--distance", distance, "camera distance in radii");
    synth->add_option("--out", synth_out, "output directory");

    auto* select = app.add_subcommand("select", "run the four-phase selection experiment");
    std::string sel_frames, phases_csv = "1,2,3,4", widths_csv = "5,25,50,150";
    std::string sel_out = "report.json";
    int repeats = 3;
    select->add_option("--frames", sel_frames, "directory of numbered frames");
    select->add_option("--phases", phases_csv, "comma list of phases to run");
    select->add_option("--widths", widths_csv, "phase-4 blend widths");
    select->add_option("--repeats", repeats, "phase-3 timing repeats");
    select->add_option("--out", sel_out, "JSON report path (CSV twins beside it)");

    auto* report = app.add_subcommand("report", "patch classification + area JSON");
    std::vector<std::string> panoramas;
    std::string report_out = "report.json", annotated, classifier_name = "dark_ratio";
    int patch_size = 150, n_areas = 10, dark_thresh = 60;
    double dark_ratio = 0.20;
    report->add_option("--panorama", panoramas, "panorama image (repeat for a time series)")
        ->required();
    report->add_option("--patch-size", patch_size, "grid size in px");
    report->add_option("--areas", n_areas, "number of areas");
    report->add_option("--classifier", classifier_name, "patch classifier");
    report->add_option("--dark-thresh", dark_thresh, "dark_ratio: gray threshold");
    report->add_option("--dark-ratio", dark_ratio, "dark_ratio: dark pixel fraction");
    report->add_option("--out", report_out, "JSON output path");
    report->add_option("--annotated", annotated, "annotated panorama output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 2;
    }

    try {
        if (stitch->parsed()) return cmd_stitch(cli, frames_flag, out_flag);
        if (metrics->parsed()) {
            if (pair.empty() && image_path.empty())
                throw ConfigError("metrics: need --image or --pair");
            return cmd_metrics(image_path, pair);
        }
        if (synth->parsed())
            return cmd_synth(texture_path, deg_per_frame, n_frames, mode, flicker,
                             flicker_period, noise, vignette, synth_seed, frame_w, frame_h,
                             focal, distance, synth_out);
        if (select->parsed())
            return cmd_select(cli, sel_frames, phases_csv, widths_csv, repeats, sel_out);
        if (report->parsed())
            return cmd_report(panoramas, patch_size, n_areas, classifier_name, dark_thresh,
                              dark_ratio, report_out, annotated);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const EmptySequence& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const HeightMismatch& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const ImageTooSmall& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const ImageTooNarrow& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const PanoramaTooSmall& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const OutOfBounds& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
