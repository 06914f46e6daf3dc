#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <vector>

#include "unroll/estimate.hpp"
#include "unroll/features.hpp"
#include "unroll/matching.hpp"
#include "unroll/warp.hpp"

namespace unroll {

/// One stitched iteration: the measured column shift plus diagnostics.
/// `degenerate` marks iterations where the measurement failed and the
/// running-mean fallback was applied instead.
struct ShiftMeasurement {
    int col_min = 0;
    int n_features_a = 0;
    int n_features_b = 0;
    int n_matches = 0;
    int n_inliers = 0;
    bool degenerate = false;
};

/// Per-run bookkeeping. mean_shift is the arithmetic mean of the applied
/// col_min values; low_match_count counts iterations with fewer than 10
/// matches.
struct StitchStats {
    std::vector<ShiftMeasurement> iterations;
    double mean_shift = 0;
    int low_match_count = 0;

    void add(const ShiftMeasurement& m) {
        iterations.push_back(m);
        double sum = 0;
        for (const auto& it : iterations) sum += it.col_min;
        mean_shift = sum / static_cast<double>(iterations.size());
        if (m.n_matches < 10) ++low_match_count;
    }
};

struct BlendConfig {
    bool enabled = true;
    bool auto_width = true;  // width = round(1.82 * mean pixel shift)
    int width = 25;
};

enum class DetectorKind { harris_norm, harris_sub };
enum class MatcherKind { bf, bf_knn };

struct StitchConfig {
    DetectorKind detector = DetectorKind::harris_norm;
    HarrisParams harris;
    int patch_size = 15;
    int subpix_win = 5;
    double subpix_eps = 0.001;
    int subpix_max_iter = 40;

    MatcherKind matcher = MatcherKind::bf;
    bool cross_check = true;
    double ratio = 0.75;

    TransformKind model = TransformKind::projective;
    RobustParams robust;

    BlendConfig blend;
    double crop_frac = 0.10;
    double outlier_cap = 0.5;   // reject col_min > cap * frame width
    bool paper_fidelity = false;  // scan warped intensities for 0 instead of the mask

    /// Test seam: substitute matcher (fault injection and experiments).
    std::function<std::vector<Match>(const std::vector<Descriptor>&,
                                     const std::vector<Descriptor>&)>
        matcher_override;
};

/// Observer context passed once per iteration, before the frame is appended.
struct IterationView {
    int index;  // 1-based frame index of `frame`
    const Image& tail;
    const Image& frame;
    const ShiftMeasurement& shift;
};

struct StitchResult {
    Image panorama;
    StitchStats stats;
};

/// First column, after dropping the top and bottom crop_frac of rows, whose
/// remaining rows are all valid.
inline int find_col_min(const Mask& mask, double crop_frac = 0.10) {
    int r0 = static_cast<int>(std::floor(mask.height * crop_frac));
    int r1 = mask.height - r0;
    if (r1 <= r0) {
        r0 = 0;
        r1 = mask.height;
    }
    for (int x = 0; x < mask.width; ++x) {
        bool all_valid = true;
        for (int y = r0; y < r1; ++y) {
            if (!mask.at(x, y)) {
                all_valid = false;
                break;
            }
        }
        if (all_valid) return x;
    }
    throw NoValidColumn("find_col_min: every column contains an invalid pixel");
}

/// WBP_new = round(1.82 * mean pixel shift), clamped to [1, frame_width].
inline int compute_wbp(double mean_shift, int frame_width) {
    const int w = static_cast<int>(std::floor(1.82 * mean_shift + 0.5));
    return std::clamp(w, 1, frame_width);
}

/// Linear alpha ramp across a seam transition zone. `left` and `right` are
/// the two equal-size source regions covering the zone; alpha falls from 1
/// at the left edge to 0 at the right edge, evaluated at column centers.
inline Image blend_seam(const Image& left, const Image& right, int width) {
    if (!left.same_size(right)) throw Error("blend_seam: region size mismatch");
    if (width != left.width) throw Error("blend_seam: regions must span the zone width");
    Image out = left;
    for (int x = 0; x < width; ++x) {
        const double alpha = (width - (x + 0.5)) / width;
        for (int y = 0; y < left.height; ++y)
            for (int c = 0; c < left.channels; ++c)
                out.at(x, y, c) = round_u8(alpha * left.at(x, y, c) +
                                           (1.0 - alpha) * right.at(x, y, c));
    }
    return out;
}

namespace detail {

inline int resolve_blend_width(const BlendConfig& b, double mean_shift, int frame_width) {
    if (!b.enabled) return 0;
    if (b.auto_width) return compute_wbp(mean_shift, frame_width);
    return std::clamp(b.width, 1, frame_width);
}

// find_col_min(warp_mask(...), crop_frac) without rasterizing the mask:
// columns are probed left to right with an early exit, using the same
// validity predicate as warp_mask. Returns -1 when no column qualifies.
inline int first_valid_column(int src_w, int src_h, const Transform& t, int canvas_w,
                              int canvas_h, double crop_frac) {
    const Transform inv = t.inverse();
    int r0 = static_cast<int>(std::floor(canvas_h * crop_frac));
    int r1 = canvas_h - r0;
    if (r1 <= r0) {
        r0 = 0;
        r1 = canvas_h;
    }
    for (int x = 0; x < canvas_w; ++x) {
        bool all_valid = true;
        for (int y = r0; y < r1; ++y) {
            double sx, sy;
            if (!unroll::detail::back_project(inv, x, y, sx, sy) ||
                !unroll::detail::inside_source(sx, sy, src_w, src_h, Interp::bilinear)) {
                all_valid = false;
                break;
            }
        }
        if (all_valid) return x;
    }
    return -1;
}

}  // namespace detail

/// Grows the panorama by col_min columns: the last frame-width columns are
/// replaced by the stitched pair (old tail extended by col_min, the unwarped
/// frame inserted at that offset, frame pixels winning the overlap), and the
/// seam column gets a linear blend ramp of `blend_width` columns into the
/// new frame. col_min == 0 returns the panorama unchanged.
inline Image append_frame(const Image& panorama, const Image& frame, const ShiftMeasurement& s,
                          int blend_width) {
    if (s.col_min == 0) return panorama;
    const int W = frame.width, H = frame.height;
    if (panorama.width < W || panorama.height != H || panorama.channels != frame.channels)
        throw Error("append_frame: panorama/frame geometry mismatch");
    if (s.col_min < 0 || s.col_min > W) throw Error("append_frame: col_min out of range");

    const int out_w = panorama.width + s.col_min;
    Image out(out_w, H, frame.channels);
    const int keep = panorama.width - W;  // columns before the pair
    const std::size_t ch = static_cast<std::size_t>(frame.channels);
    for (int y = 0; y < H; ++y) {
        const std::uint8_t* prow = panorama.row(y);
        std::uint8_t* orow = out.row(y);
        // untouched head + the tail part the frame does not cover
        std::copy_n(prow, (keep + s.col_min) * ch, orow);
        // the unchanged frame, inserted at col_min within the pair
        std::copy_n(frame.row(y), static_cast<std::size_t>(W) * ch,
                    orow + (keep + s.col_min) * ch);
    }

    const int bw = std::min(blend_width, W - s.col_min);
    if (bw >= 1) {
        // zone: pair columns [col_min, col_min + bw) = old tail vs new frame
        const Image left = crop(panorama, {keep + s.col_min, 0, bw, H});
        const Image right = crop(frame, {0, 0, bw, H});
        const Image blended = blend_seam(left, right, bw);
        for (int y = 0; y < H; ++y)
            std::copy_n(blended.row(y), static_cast<std::size_t>(bw) * ch,
                        out.row(y) + (keep + s.col_min) * ch);
    }
    return out;
}

/// BlendConfig form: auto mode derives the zone width from the running mean
/// pixel shift.
inline Image append_frame(const Image& panorama, const Image& frame, const ShiftMeasurement& s,
                          const BlendConfig& b, double mean_shift = 0.0) {
    return append_frame(panorama, frame, s,
                        detail::resolve_blend_width(b, mean_shift, frame.width));
}

/// Feature-based shift measurement between the panorama tail and the next
/// frame: detect, describe, match, robustly fit the frame->tail transform,
/// warp the frame's validity mask into tail coordinates and take col_min.
/// Any failure (or an outlier shift) degrades to the running-mean fallback
/// with degenerate = true.
inline ShiftMeasurement measure_shift(const Image& panorama_tail, const Image& next,
                                      const StitchConfig& cfg,
                                      const StitchStats& history = {}) {
    if (panorama_tail.width != next.width || panorama_tail.height != next.height)
        throw Error("measure_shift: tail/frame size mismatch");
    const int W = next.width, H = next.height;

    ShiftMeasurement m;
    auto fallback = [&]() {
        m.degenerate = true;
        m.col_min = history.iterations.empty()
                        ? 1
                        : static_cast<int>(std::floor(history.mean_shift + 0.5));
        m.col_min = std::clamp(m.col_min, 0, W);
        return m;
    };

    const Image gray_a = to_grayscale(panorama_tail);
    const Image gray_b = to_grayscale(next);

    auto detect_describe = [&](const Image& img) {
        std::vector<FeaturePoint> pts = detect_corners(img, cfg.harris);
        if (cfg.detector == DetectorKind::harris_sub)
            pts = refine_subpixel(img, pts, cfg.subpix_win, cfg.subpix_eps, cfg.subpix_max_iter);
        return describe(img, pts, cfg.patch_size);
    };
    auto fut = std::async(std::launch::async, detect_describe, std::cref(gray_a));
    const Described db = detect_describe(gray_b);
    const Described da = fut.get();
    m.n_features_a = static_cast<int>(da.points.size());
    m.n_features_b = static_cast<int>(db.points.size());

    std::vector<Match> matches;
    try {
        if (cfg.matcher_override)
            matches = cfg.matcher_override(da.descriptors, db.descriptors);
        else if (cfg.matcher == MatcherKind::bf)
            matches = match_bf(da.descriptors, db.descriptors, cfg.cross_check);
        else
            matches = match_knn_ratio(da.descriptors, db.descriptors, cfg.ratio);
    } catch (const InsufficientCandidates&) {
        return fallback();
    }
    m.n_matches = static_cast<int>(matches.size());

    const int minimal = cfg.model == TransformKind::affine ? 3 : 4;
    if (m.n_matches < minimal) return fallback();

    PointPairs pp;
    for (const auto& match : matches)
        pp.push(db.points[match.idx_b].x, db.points[match.idx_b].y,
                da.points[match.idx_a].x, da.points[match.idx_a].y);

    Transform t;
    try {
        const RobustFit fit = robust_fit(pp, cfg.model, cfg.robust);
        t = fit.transform;
        m.n_inliers = fit.inlier_count();
    } catch (const Error&) {
        return fallback();
    }

    int col = 0;
    try {
        if (cfg.paper_fidelity) {
            // Literal scan: first column of the warped frame without a pixel
            // of intensity 0.
            const WarpResult wr = warp(next, t, W, H, Interp::bilinear);
            Mask nonblack(W, H);
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x) {
                    bool any_zero = false;
                    for (int c = 0; c < wr.image.channels; ++c)
                        any_zero |= wr.image.at(x, y, c) == 0;
                    nonblack.at(x, y) = any_zero ? 0 : 1;
                }
            col = find_col_min(nonblack, cfg.crop_frac);
        } else {
            col = detail::first_valid_column(W, H, t, W, H, cfg.crop_frac);
            if (col < 0) return fallback();
        }
    } catch (const NoValidColumn&) {
        return fallback();
    } catch (const SingularTransform&) {
        return fallback();
    }

    if (col > cfg.outlier_cap * W) return fallback();
    m.col_min = col;
    return m;
}

namespace detail {

// Deterministic per-iteration RANSAC seed (splitmix64 step).
inline std::uint64_t iteration_seed(std::uint64_t base, std::uint64_t i) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (i + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Stitches a preprocessed, equal-size frame sequence into a panorama.
/// The panorama starts as the first frame; every following frame is
/// measured against the current tail and appended unwarped.
inline StitchResult stitch_video(const std::vector<Image>& frames, const StitchConfig& cfg,
                                 const std::function<void(const IterationView&)>& observer = {}) {
    if (frames.empty()) throw EmptySequence("stitch_video: no frames");
    for (const auto& f : frames)
        if (!f.same_size(frames.front()))
            throw Error("stitch_video: frames must share one size");

    StitchResult res;
    res.panorama = frames.front();
    const int W = frames.front().width;
    const int H = frames.front().height;

    for (std::size_t i = 1; i < frames.size(); ++i) {
        StitchConfig iter_cfg = cfg;
        iter_cfg.robust.seed = detail::iteration_seed(cfg.robust.seed, i);
        const Image tail = crop(res.panorama, {res.panorama.width - W, 0, W, H});
        const ShiftMeasurement m = measure_shift(tail, frames[i], iter_cfg, res.stats);
        if (observer) observer({static_cast<int>(i), tail, frames[i], m});
        res.stats.add(m);
        const int bw = detail::resolve_blend_width(cfg.blend, res.stats.mean_shift, W);
        res.panorama = append_frame(res.panorama, frames[i], m, bw);
    }
    return res;
}

}  // namespace unroll
