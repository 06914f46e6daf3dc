#pragma once

#include "unroll/warp.hpp"

namespace unroll {

/// ROI and pitch compensation applied to every raw frame. The roi is given
/// in rotated coordinates (rotation happens first); w == 0 or h == 0 selects
/// the full rotated frame.
struct PreprocessConfig {
    Rect roi{0, 0, 0, 0};
    double pitch_angle_deg = 0;  // 0 for plain cylinders
    bool grayscale = false;

    bool valid() const { return std::abs(pitch_angle_deg) < 45.0; }
};

/// Rotate by pitch_angle_deg (skipped when 0), crop the roi, optionally
/// convert to grayscale. Output dimensions equal the roi dimensions for
/// every frame of a run.
inline Image preprocess_frame(const Image& frame, const PreprocessConfig& cfg) {
    if (!cfg.valid()) throw Error("preprocess_frame: |pitch_angle_deg| must be < 45");
    Image work;
    if (cfg.pitch_angle_deg != 0)
        work = rotate(frame, cfg.pitch_angle_deg, Interp::bilinear).image;
    else
        work = frame;
    Rect r = cfg.roi;
    if (r.w == 0 || r.h == 0) r = {0, 0, work.width, work.height};
    Image out = crop(work, r);  // throws OutOfBounds for an invalid roi
    if (cfg.grayscale) out = to_grayscale(out);
    return out;
}

}  // namespace unroll
