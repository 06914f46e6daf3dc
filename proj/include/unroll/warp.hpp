#pragma once

#include <cmath>
#include <utility>

#include "unroll/image.hpp"
#include "unroll/transform.hpp"

namespace unroll {

enum class Interp { nearest, bilinear };

struct WarpResult {
    Image image;
    Mask mask;
};

namespace detail {

// Back-projected source coordinates for destination pixel (x, y).
// Returns false when the pixel maps behind the camera plane.
inline bool back_project(const Transform& inv, int x, int y, double& sx, double& sy) {
    return inv.apply(static_cast<double>(x), static_cast<double>(y), sx, sy);
}

inline bool inside_source(double sx, double sy, int w, int h, Interp interp) {
    if (interp == Interp::nearest) {
        const int xi = static_cast<int>(std::lround(sx));
        const int yi = static_cast<int>(std::lround(sy));
        return xi >= 0 && yi >= 0 && xi < w && yi < h;
    }
    // Tolerance absorbs solver noise on transforms that land exactly on the
    // border (an identity fit must keep column 0 valid).
    constexpr double eps = 1e-9;
    return sx >= -eps && sy >= -eps && sx <= w - 1.0 + eps && sy <= h - 1.0 + eps;
}

}  // namespace detail

/// Inverse-maps every canvas pixel through t. Pixels whose back-projection
/// falls outside the source are written as 0 (black) and flagged invalid in
/// the mask.
inline WarpResult warp(const Image& img, const Transform& t, int canvas_w, int canvas_h,
                       Interp interp = Interp::bilinear) {
    const Transform inv = t.inverse();  // throws SingularTransform
    WarpResult out{Image(canvas_w, canvas_h, img.channels), Mask(canvas_w, canvas_h)};
    for (int y = 0; y < canvas_h; ++y) {
        for (int x = 0; x < canvas_w; ++x) {
            double sx, sy;
            if (!detail::back_project(inv, x, y, sx, sy)) continue;
            if (!detail::inside_source(sx, sy, img.width, img.height, interp)) continue;
            out.mask.at(x, y) = 1;
            if (interp == Interp::nearest) {
                const int xi = static_cast<int>(std::lround(sx));
                const int yi = static_cast<int>(std::lround(sy));
                for (int c = 0; c < img.channels; ++c)
                    out.image.at(x, y, c) = img.at(xi, yi, c);
            } else {
                for (int c = 0; c < img.channels; ++c)
                    out.image.at(x, y, c) = round_u8(bilinear_sample(img, sx, sy, c));
            }
        }
    }
    return out;
}

/// Validity mask of warp() without resampling any pixels.
inline Mask warp_mask(int src_w, int src_h, const Transform& t, int canvas_w, int canvas_h,
                      Interp interp = Interp::bilinear) {
    const Transform inv = t.inverse();
    Mask mask(canvas_w, canvas_h);
    for (int y = 0; y < canvas_h; ++y) {
        for (int x = 0; x < canvas_w; ++x) {
            double sx, sy;
            if (!detail::back_project(inv, x, y, sx, sy)) continue;
            if (detail::inside_source(sx, sy, src_w, src_h, interp)) mask.at(x, y) = 1;
        }
    }
    return mask;
}

/// Rotation about the image center; the canvas grows to contain the rotated
/// bounds. Positive angles rotate the +x axis toward +y (y points down).
inline WarpResult rotate(const Image& img, double angle_deg, Interp interp = Interp::bilinear) {
    const double a = angle_deg * std::numbers::pi / 180.0;
    auto snap = [](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; };
    const double c = std::abs(snap(std::cos(a))), s = std::abs(snap(std::sin(a)));
    const int cw = static_cast<int>(std::ceil((img.width - 1) * c + (img.height - 1) * s - 1e-9)) + 1;
    const int ch = static_cast<int>(std::ceil((img.width - 1) * s + (img.height - 1) * c - 1e-9)) + 1;
    const Transform t = Transform::rotation_deg(angle_deg, (img.width - 1) / 2.0,
                                                (img.height - 1) / 2.0, (cw - 1) / 2.0,
                                                (ch - 1) / 2.0);
    return warp(img, t, cw, ch, interp);
}

}  // namespace unroll
