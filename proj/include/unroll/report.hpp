#pragma once

#include <json.hpp>

#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "unroll/image.hpp"

namespace unroll {

enum class PatchLabel { ok, defect };

/// Grid cell of the panorama; x/y are multiples of size.
struct Patch {
    int x = 0;
    int y = 0;
    int size = 150;
    PatchLabel label = PatchLabel::ok;
};

/// Defect patch counts over the panorama split into n horizontal areas.
struct AreaCounts {
    std::string timestep;
    std::vector<int> areas;

    int total() const {
        int t = 0;
        for (int a : areas) t += a;
        return t;
    }
};

using PatchClassifier = std::function<PatchLabel(const Image&)>;

/// Defect iff at least `ratio` of the patch pixels are darker than
/// `dark_thresh` (deterministic stand-in for a learned classifier).
inline PatchClassifier dark_ratio_classifier(int dark_thresh = 60, double ratio = 0.20) {
    return [dark_thresh, ratio](const Image& patch) {
        const Image g = to_grayscale(patch);
        std::size_t dark = 0;
        for (auto v : g.data) dark += v < dark_thresh ? 1 : 0;
        return dark >= ratio * static_cast<double>(g.data.size()) ? PatchLabel::defect
                                                                  : PatchLabel::ok;
    };
}

/// Non-overlapping row-major grid; right/bottom remainders smaller than
/// `size` are discarded.
inline std::vector<Patch> partition_grid(const Image& panorama, int size = 150) {
    if (panorama.width < size || panorama.height < size)
        throw PanoramaTooSmall("partition_grid: panorama smaller than one patch");
    std::vector<Patch> patches;
    for (int y = 0; y + size <= panorama.height; y += size)
        for (int x = 0; x + size <= panorama.width; x += size)
            patches.push_back({x, y, size, PatchLabel::ok});
    return patches;
}

struct ClassifiedPatches {
    std::vector<Patch> patches;
    Image annotated;
};

namespace detail {

inline void draw_rect(Image& img, int x, int y, int size, int border = 2) {
    auto paint = [&](int px, int py) {
        if (px < 0 || py < 0 || px >= img.width || py >= img.height) return;
        if (img.channels == 1) {
            img.at(px, py, 0) = 255;
        } else {
            img.at(px, py, 0) = 255;
            img.at(px, py, 1) = 0;
            img.at(px, py, 2) = 0;
        }
    };
    for (int b = 0; b < border; ++b)
        for (int i = 0; i < size; ++i) {
            paint(x + i, y + b);
            paint(x + i, y + size - 1 - b);
            paint(x + b, y + i);
            paint(x + size - 1 - b, y + i);
        }
}

}  // namespace detail

/// Runs the classifier on every patch and draws a 2-px rectangle around
/// each defect (gray 255 on grayscale panoramas, red on color).
inline ClassifiedPatches classify_patches(const Image& panorama, std::vector<Patch> patches,
                                          const PatchClassifier& classifier) {
    ClassifiedPatches out;
    out.annotated = panorama;
    for (auto& p : patches) {
        const Image region = crop(panorama, {p.x, p.y, p.size, p.size});
        p.label = classifier(region);
        if (p.label == PatchLabel::defect)
            detail::draw_rect(out.annotated, p.x, p.y, p.size);
    }
    out.patches = std::move(patches);
    return out;
}

/// Area index by the patch's upper-left corner: floor(x / (width / n)),
/// clamped to the last area.
inline AreaCounts aggregate_areas(int panorama_width, const std::vector<Patch>& patches,
                                  int n_areas = 10, const std::string& timestep = "t1") {
    AreaCounts counts;
    counts.timestep = timestep;
    counts.areas.assign(n_areas, 0);
    const double area_w = static_cast<double>(panorama_width) / n_areas;
    for (const auto& p : patches) {
        if (p.label != PatchLabel::defect) continue;
        const int idx = std::min(n_areas - 1, static_cast<int>(std::floor(p.x / area_w)));
        ++counts.areas[idx];
    }
    return counts;
}

/// {"timesteps":[{"label":..,"areas":[..],"total":N}, ...]}
inline void write_report(const std::vector<AreaCounts>& counts, const std::string& path) {
    nlohmann::json doc;
    doc["timesteps"] = nlohmann::json::array();
    for (const auto& c : counts) {
        nlohmann::json ts;
        ts["label"] = c.timestep;
        ts["areas"] = c.areas;
        ts["total"] = c.total();
        doc["timesteps"].push_back(ts);
    }
    std::ofstream out(path);
    if (!out) throw IoError("write_report: cannot write " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("write_report: write failed for " + path);
}

inline std::vector<AreaCounts> read_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_report: cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("read_report: bad JSON in " + path + ": " + e.what());
    }
    std::vector<AreaCounts> counts;
    for (const auto& ts : doc.at("timesteps")) {
        AreaCounts c;
        c.timestep = ts.at("label").get<std::string>();
        c.areas = ts.at("areas").get<std::vector<int>>();
        counts.push_back(std::move(c));
    }
    return counts;
}

}  // namespace unroll
