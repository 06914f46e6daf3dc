#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "unroll/compose.hpp"
#include "unroll/preprocess.hpp"

namespace unroll {

/// Flat run configuration: the union of all module knobs plus I/O paths.
/// Parsed from `key = value` lines with dotted keys; unknown keys are
/// rejected.
struct RunConfig {
    std::string frames_dir;
    std::string output_dir = ".";
    std::uint64_t seed = 0;
    bool seed_explicit = false;

    PreprocessConfig preprocess;
    StitchConfig stitch;
    bool robust_seed_explicit = false;

    double misalign_threshold = 25.0;  // phase-2 misalignment rule
    int direct_search_window = 32;

    /// robust.seed defaults to the global seed unless set on its own.
    void finalize() {
        if (!robust_seed_explicit) stitch.robust.seed = seed;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config: bad boolean for " + key + ": " + v);
}

inline double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for " + key + ": " + v);
    }
}

inline long parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for " + key + ": " + v);
    }
}

inline std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const std::uint64_t d = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for " + key + ": " + v);
    }
}

// "[x,y,w,h]" or "x,y,w,h"
inline Rect parse_rect(std::string v, const std::string& key) {
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']') throw ConfigError("config: bad rect for " + key + ": " + v);
        v = v.substr(1, v.size() - 2);
    }
    std::stringstream ss(v);
    std::string part;
    int vals[4];
    for (int i = 0; i < 4; ++i) {
        if (!std::getline(ss, part, ','))
            throw ConfigError("config: rect needs 4 components for " + key);
        vals[i] = static_cast<int>(parse_int(trim(part), key));
    }
    if (std::getline(ss, part, ','))
        throw ConfigError("config: rect needs exactly 4 components for " + key);
    return {vals[0], vals[1], vals[2], vals[3]};
}

}  // namespace detail

/// Applies one `key = value` setting. Throws ConfigError for unknown keys
/// or malformed values.
inline void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_int;

    if (key == "frames_dir") {
        cfg.frames_dir = value;
    } else if (key == "output_dir") {
        cfg.output_dir = value;
    } else if (key == "seed") {
        cfg.seed = detail::parse_u64(value, key);
        cfg.seed_explicit = true;
    } else if (key == "roi") {
        cfg.preprocess.roi = detail::parse_rect(value, key);
    } else if (key == "pitch_angle_deg") {
        cfg.preprocess.pitch_angle_deg = parse_double(value, key);
        if (!cfg.preprocess.valid())
            throw ConfigError("config: |pitch_angle_deg| must be < 45");
    } else if (key == "grayscale") {
        cfg.preprocess.grayscale = parse_bool(value, key);
    } else if (key == "detector") {
        if (value == "harris_norm")
            cfg.stitch.detector = DetectorKind::harris_norm;
        else if (value == "harris_sub")
            cfg.stitch.detector = DetectorKind::harris_sub;
        else
            throw ConfigError("config: unknown detector: " + value);
    } else if (key == "harris.k") {
        cfg.stitch.harris.k = parse_double(value, key);
        if (cfg.stitch.harris.k < 0.01 || cfg.stitch.harris.k > 0.2)
            throw ConfigError("config: harris.k must be in [0.01, 0.2]");
    } else if (key == "harris.sigma") {
        cfg.stitch.harris.sigma = parse_double(value, key);
        if (cfg.stitch.harris.sigma <= 0) throw ConfigError("config: harris.sigma must be > 0");
    } else if (key == "harris.threshold_rel") {
        cfg.stitch.harris.threshold_rel = parse_double(value, key);
        if (cfg.stitch.harris.threshold_rel <= 0 || cfg.stitch.harris.threshold_rel >= 1)
            throw ConfigError("config: harris.threshold_rel must be in (0,1)");
    } else if (key == "harris.nms_radius") {
        cfg.stitch.harris.nms_radius = static_cast<int>(parse_int(value, key));
    } else if (key == "harris.max_points") {
        cfg.stitch.harris.max_points = static_cast<int>(parse_int(value, key));
    } else if (key == "descriptor.patch_size") {
        cfg.stitch.patch_size = static_cast<int>(parse_int(value, key));
    } else if (key == "matcher") {
        if (value == "bf")
            cfg.stitch.matcher = MatcherKind::bf;
        else if (value == "bf_knn")
            cfg.stitch.matcher = MatcherKind::bf_knn;
        else
            throw ConfigError("config: unknown matcher: " + value);
    } else if (key == "matcher.cross_check") {
        cfg.stitch.cross_check = parse_bool(value, key);
    } else if (key == "matcher.ratio") {
        cfg.stitch.ratio = parse_double(value, key);
    } else if (key == "model") {
        if (value == "affine")
            cfg.stitch.model = TransformKind::affine;
        else if (value == "projective")
            cfg.stitch.model = TransformKind::projective;
        else
            throw ConfigError("config: unknown model: " + value);
    } else if (key == "robust.method") {
        if (value == "ransac")
            cfg.stitch.robust.method = RobustMethod::ransac;
        else if (value == "lmeds")
            cfg.stitch.robust.method = RobustMethod::lmeds;
        else
            throw ConfigError("config: unknown robust.method: " + value);
    } else if (key == "robust.inlier_thresh") {
        cfg.stitch.robust.inlier_thresh = parse_double(value, key);
        if (cfg.stitch.robust.inlier_thresh <= 0)
            throw ConfigError("config: robust.inlier_thresh must be > 0");
    } else if (key == "robust.max_iters") {
        cfg.stitch.robust.max_iters = static_cast<int>(parse_int(value, key));
        if (cfg.stitch.robust.max_iters < 1)
            throw ConfigError("config: robust.max_iters must be >= 1");
    } else if (key == "robust.seed") {
        cfg.stitch.robust.seed = detail::parse_u64(value, key);
        cfg.robust_seed_explicit = true;
    } else if (key == "blend.enabled") {
        cfg.stitch.blend.enabled = parse_bool(value, key);
    } else if (key == "blend.auto") {
        cfg.stitch.blend.auto_width = parse_bool(value, key);
    } else if (key == "blend.width") {
        cfg.stitch.blend.width = static_cast<int>(parse_int(value, key));
        if (cfg.stitch.blend.width < 1) throw ConfigError("config: blend.width must be >= 1");
    } else if (key == "compose.crop_frac") {
        cfg.stitch.crop_frac = parse_double(value, key);
        if (cfg.stitch.crop_frac < 0 || cfg.stitch.crop_frac >= 0.5)
            throw ConfigError("config: compose.crop_frac must be in [0, 0.5)");
    } else if (key == "compose.outlier_cap") {
        cfg.stitch.outlier_cap = parse_double(value, key);
    } else if (key == "compose.paper_fidelity") {
        cfg.stitch.paper_fidelity = parse_bool(value, key);
    } else if (key == "harness.misalign_threshold") {
        cfg.misalign_threshold = parse_double(value, key);
    } else if (key == "direct.search_window") {
        cfg.direct_search_window = static_cast<int>(parse_int(value, key));
    } else {
        throw ConfigError("config: unknown key: " + key);
    }
}

/// Parses a flat `key = value` config file ('#' starts a comment).
inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: missing '=' at " + path + ":" + std::to_string(lineno));
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        apply_config_kv(cfg, key, value);
    }
    cfg.finalize();
    return cfg;
}

}  // namespace unroll
