#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "unroll/compose.hpp"
#include "unroll/metrics.hpp"

namespace unroll {

struct ComboSpec {
    DetectorKind detector = DetectorKind::harris_norm;
    MatcherKind matcher = MatcherKind::bf;
    RobustMethod resampler = RobustMethod::ransac;

    std::string name() const {
        std::string s = detector == DetectorKind::harris_norm ? "harris_norm" : "harris_sub";
        s += matcher == MatcherKind::bf ? "+bf" : "+bf_knn";
        s += resampler == RobustMethod::ransac ? "+ransac" : "+lmeds";
        return s;
    }
};

/// All 2 x 2 x 2 combinations of the implemented components.
inline std::vector<ComboSpec> all_combos() {
    std::vector<ComboSpec> cs;
    for (auto d : {DetectorKind::harris_norm, DetectorKind::harris_sub})
        for (auto m : {MatcherKind::bf, MatcherKind::bf_knn})
            for (auto r : {RobustMethod::ransac, RobustMethod::lmeds})
                cs.push_back({d, m, r});
    return cs;
}

struct PhaseRow {
    ComboSpec combo;
    double avg_features = 0;
    double avg_matches = 0;
    int low_feature_iters = 0;
    int low_match_iters = 0;
    double em_sum = 0;
    double om_sum = 0;
    int misalignment_count = 0;
    double elapsed_ms = 0;

    double total() const { return em_sum + om_sum; }
};

struct Phase4Row {
    int width = 0;
    double exposure = 0;
    double sharpness_fft = 0;
    double sharpness_laplace = 0;
    double mean_shift = 0;
};

namespace detail {

inline StitchConfig apply_combo(StitchConfig cfg, const ComboSpec& combo) {
    cfg.detector = combo.detector;
    cfg.matcher = combo.matcher;
    cfg.robust.method = combo.resampler;
    return cfg;
}

inline void fill_feature_stats(PhaseRow& row, const StitchStats& stats) {
    double f = 0, m = 0;
    for (const auto& it : stats.iterations) {
        f += 0.5 * (it.n_features_a + it.n_features_b);
        m += it.n_matches;
        if (std::min(it.n_features_a, it.n_features_b) < 10) ++row.low_feature_iters;
        if (it.n_matches < 10) ++row.low_match_iters;
    }
    const double n = std::max<std::size_t>(1, stats.iterations.size());
    row.avg_features = f / n;
    row.avg_matches = m / n;
}

}  // namespace detail

/// Phase 1: feature and match counts per combination, with the
/// fewer-than-ten trouble counters.
inline std::vector<PhaseRow> run_phase1(const std::vector<ComboSpec>& combos,
                                        const std::vector<Image>& frames,
                                        const StitchConfig& base = {}) {
    std::vector<PhaseRow> rows;
    for (const auto& combo : combos) {
        PhaseRow row;
        row.combo = combo;
        const StitchResult res = stitch_video(frames, detail::apply_combo(base, combo));
        detail::fill_feature_stats(row, res.stats);
        rows.push_back(row);
    }
    return rows;
}

/// Phase 2: edge and overlap metric sums across iterations (PSNR already
/// subtracted inside OM); the best variant has the lowest total. Seams are
/// evaluated pre-blend on the raw overlapping regions.
inline std::vector<PhaseRow> run_phase2(const std::vector<ComboSpec>& combos,
                                        const std::vector<Image>& frames,
                                        const StitchConfig& base = {},
                                        double misalign_threshold = 25.0) {
    std::vector<PhaseRow> rows;
    for (const auto& combo : combos) {
        PhaseRow row;
        row.combo = combo;
        auto observer = [&](const IterationView& view) {
            const int cm = view.shift.col_min;
            const int W = view.frame.width, H = view.frame.height;
            if (cm <= 0 || cm >= W) return;  // no seam / no overlap
            const Image f1 = crop(view.tail, {0, 0, cm, H});
            const double em = edge_metric(f1, view.frame);
            row.em_sum += em;
            if (em > misalign_threshold) ++row.misalignment_count;
            const Image a1 = crop(view.tail, {cm, 0, W - cm, H});
            const Image a2 = crop(view.frame, {0, 0, W - cm, H});
            const OverlapReport om = overlap_metric(a1, a2);
            if (!om.identical) row.om_sum += om.om;
        };
        const StitchResult res = stitch_video(frames, detail::apply_combo(base, combo), observer);
        detail::fill_feature_stats(row, res.stats);
        rows.push_back(row);
    }
    return rows;
}

/// Phase 3: wall-clock (median of `repeats`) per combination; panoramas are
/// returned for subjective review.
inline std::vector<PhaseRow> run_phase3(const std::vector<ComboSpec>& combos,
                                        const std::vector<Image>& frames, int repeats,
                                        std::vector<Image>* panoramas = nullptr,
                                        const StitchConfig& base = {}) {
    std::vector<PhaseRow> rows;
    for (const auto& combo : combos) {
        PhaseRow row;
        row.combo = combo;
        std::vector<double> times;
        Image last;
        for (int r = 0; r < repeats; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            StitchResult res = stitch_video(frames, detail::apply_combo(base, combo));
            const auto t1 = std::chrono::steady_clock::now();
            times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
            if (r == repeats - 1) {
                detail::fill_feature_stats(row, res.stats);
                last = std::move(res.panorama);
            }
        }
        std::sort(times.begin(), times.end());
        row.elapsed_ms = times[times.size() / 2];
        if (panoramas) panoramas->push_back(std::move(last));
        rows.push_back(row);
    }
    return rows;
}

/// Phase 4: fixed blend widths against the panorama's exposure and
/// sharpness scores, plus the run's average pixel shift.
inline std::vector<Phase4Row> run_phase4(const std::vector<int>& widths,
                                         const std::vector<Image>& frames,
                                         const StitchConfig& base = {},
                                         std::vector<Image>* panoramas = nullptr) {
    std::vector<Phase4Row> rows;
    for (int w : widths) {
        StitchConfig cfg = base;
        cfg.blend.enabled = true;
        cfg.blend.auto_width = false;
        cfg.blend.width = w;
        const StitchResult res = stitch_video(frames, cfg);
        Phase4Row row;
        row.width = w;
        row.exposure = exposure_metric(res.panorama);
        row.sharpness_fft = sharpness_fft(res.panorama);
        row.sharpness_laplace = sharpness_laplace(res.panorama);
        row.mean_shift = res.stats.mean_shift;
        rows.push_back(row);
        if (panoramas) panoramas->push_back(res.panorama);
    }
    return rows;
}

struct DirectResult {
    Image panorama;
    StitchStats stats;
    double elapsed_ms = 0;
};

/// Classical direct baseline: per frame pair, exhaustively evaluate
/// horizontal shifts 0..search_window by mean absolute difference of the
/// overlap and compose with the same append machinery.
inline DirectResult direct_stitch(const std::vector<Image>& frames, int search_window,
                                  const BlendConfig& blend = {}) {
    if (frames.size() < 2) throw EmptySequence("direct_stitch: need >= 2 frames");
    for (const auto& f : frames)
        if (!f.same_size(frames.front()))
            throw Error("direct_stitch: frames must share one size");
    const int W = frames.front().width, H = frames.front().height;

    DirectResult res;
    const auto t0 = std::chrono::steady_clock::now();
    res.panorama = frames.front();
    const int ch = frames.front().channels;
    for (std::size_t i = 1; i < frames.size(); ++i) {
        const Image tail = crop(res.panorama, {res.panorama.width - W, 0, W, H});
        const Image& next = frames[i];
        int best_s = 0;
        double best_mad = std::numeric_limits<double>::infinity();
        for (int s = 0; s <= std::min(search_window, W - 1); ++s) {
            double sum = 0;
            const std::size_t n = static_cast<std::size_t>(W - s) * ch;
            for (int y = 0; y < H; ++y) {
                const std::uint8_t* ta = tail.row(y) + static_cast<std::size_t>(s) * ch;
                const std::uint8_t* nb = next.row(y);
                for (std::size_t x = 0; x < n; ++x)
                    sum += std::abs(static_cast<double>(ta[x]) - static_cast<double>(nb[x]));
            }
            const double mad = sum / (static_cast<double>(n) * H);
            if (mad < best_mad) {
                best_mad = mad;
                best_s = s;
            }
        }
        ShiftMeasurement m;
        m.col_min = best_s;
        res.stats.add(m);
        const int bw = detail::resolve_blend_width(blend, res.stats.mean_shift, W);
        res.panorama = append_frame(res.panorama, frames[i], m, bw);
    }
    const auto t1 = std::chrono::steady_clock::now();
    res.elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return res;
}

}  // namespace unroll
