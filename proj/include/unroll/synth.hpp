#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "unroll/image.hpp"

namespace unroll {

enum class CameraMode { perspective, orthographic };

/// Virtual camera looking at a vertical cylinder whose unrolled surface is
/// the texture (texture width = circumference in pixels, so the cylinder
/// radius is texture_width / 2pi).
struct CameraConfig {
    double focal_px = 400;    // perspective mode only
    double distance = 3.0;    // camera-to-axis distance in cylinder radii
    int frame_w = 200;
    int frame_h = 200;
    CameraMode mode = CameraMode::orthographic;
    /// Camera-fixed illumination loss toward the right frame edge: a smooth
    /// shoulder centered at 45% of the frame width (lamp aimed at the
    /// leading side of the surface). 0 disables it.
    double vignette = 0.0;
};

struct SequenceSpec {
    Image texture;  // unrolled surface
    double deg_per_frame = 1.0;
    int n_frames = 1;
    double exposure_flicker = 0.0;   // multiplicative gain amplitude
    double flicker_period = 8.0;     // frames per flicker cycle
    double noise_sigma = 0.0;        // additive Gaussian, gray levels
    std::uint64_t seed = 1;
};

struct SequenceResult {
    std::vector<Image> frames;
    Image ground_truth;   // texture strip actually swept
    double true_shift_px = 0;
};

namespace detail {

// Texture column hit by frame column x at rotation angle 0, or false when
// the ray misses the cylinder / falls outside the silhouette.
inline bool texture_u(const CameraConfig& cam, double tex_w, int x, double& u) {
    const double radius = tex_w / (2.0 * std::numbers::pi);
    const double xc = x - (cam.frame_w - 1) / 2.0;
    double theta;
    if (cam.mode == CameraMode::orthographic) {
        if (std::abs(xc) > radius) return false;
        theta = std::asin(xc / radius);
    } else {
        const double cam_dist = cam.distance * radius;
        // Ray from the camera at (0, cam_dist) through pixel direction
        // (xc / focal, -1), intersected with u^2 + z^2 = radius^2.
        const double norm = std::hypot(xc / cam.focal_px, 1.0);
        const double du = (xc / cam.focal_px) / norm;
        const double dz = -1.0 / norm;
        const double b = cam_dist * dz;
        const double disc = b * b - (cam_dist * cam_dist - radius * radius);
        if (disc < 0) return false;
        const double t = -b - std::sqrt(disc);
        const double hu = t * du;
        const double hz = cam_dist + t * dz;
        theta = std::atan2(hu, hz);
    }
    u = theta / (2.0 * std::numbers::pi) * tex_w;
    return true;
}

inline double wrap(double v, double period) {
    v = std::fmod(v, period);
    return v < 0 ? v + period : v;
}

// Bilinear texture sample, wrapping horizontally, clamping vertically.
inline double sample_wrapped(const Image& tex, double u, double v, int c) {
    const double uw = wrap(u, static_cast<double>(tex.width));
    const int x0 = static_cast<int>(std::floor(uw));
    const int x1 = (x0 + 1) % tex.width;
    const double fx = uw - x0;
    const int y0 = std::clamp(static_cast<int>(std::floor(v)), 0, tex.height - 1);
    const int y1 = std::min(y0 + 1, tex.height - 1);
    const double fy = std::clamp(v - y0, 0.0, 1.0);
    const double top = tex.at(x0, y0, c) * (1 - fx) + tex.at(x1, y0, c) * fx;
    const double bot = tex.at(x0, y1, c) * (1 - fx) + tex.at(x1, y1, c) * fx;
    return top * (1 - fy) + bot * fy;
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t i) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (i + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Renders the cylinder at a given rotation angle. Columns beyond the
/// silhouette are black; flicker, vignette and noise are applied on top of
/// the clean projection.
inline Image render_frame(const SequenceSpec& spec, const CameraConfig& cam, double angle_deg) {
    if (spec.texture.empty()) throw InvalidGeometry("render_frame: no texture");
    if (cam.mode == CameraMode::perspective && cam.distance <= 1.0)
        throw InvalidGeometry("render_frame: camera must be outside the cylinder");
    const Image& tex = spec.texture;
    const double tex_w = tex.width;
    const double angle_cols = angle_deg / 360.0 * tex_w;

    const long idx = spec.deg_per_frame != 0
                         ? std::lround(angle_deg / spec.deg_per_frame)
                         : 0;
    const double gain =
        spec.exposure_flicker != 0
            ? 1.0 + spec.exposure_flicker *
                        std::cos(2.0 * std::numbers::pi * idx / spec.flicker_period)
            : 1.0;
    std::mt19937_64 rng(detail::mix_seed(spec.seed, static_cast<std::uint64_t>(idx)));
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);

    Image out(cam.frame_w, cam.frame_h, tex.channels);
    for (int x = 0; x < cam.frame_w; ++x) {
        double u0;
        const bool visible = detail::texture_u(cam, tex_w, x, u0);
        const double shoulder = (x - 0.45 * cam.frame_w) / (0.04 * cam.frame_w);
        const double illum = 1.0 - cam.vignette / (1.0 + std::exp(-shoulder));
        for (int y = 0; y < cam.frame_h; ++y) {
            if (!visible) continue;  // stays black
            const double v = tex.height == cam.frame_h
                                 ? y
                                 : y * (tex.height - 1.0) / std::max(1, cam.frame_h - 1);
            for (int c = 0; c < tex.channels; ++c) {
                double val = detail::sample_wrapped(tex, u0 + angle_cols, v, c) * gain * illum;
                if (spec.noise_sigma > 0) val += noise(rng);
                out.at(x, y, c) = round_u8(val);
            }
        }
    }
    return out;
}

/// Renders the full sequence plus the ground-truth strip the rotation swept
/// (clean texture, no flicker/noise) and the planted per-frame shift.
inline SequenceResult generate_sequence(const SequenceSpec& spec, const CameraConfig& cam) {
    if (spec.n_frames < 1) throw InvalidGeometry("generate_sequence: n_frames >= 1");
    SequenceResult res;
    res.true_shift_px = spec.deg_per_frame / 360.0 * spec.texture.width;
    res.frames.reserve(spec.n_frames);
    for (int i = 0; i < spec.n_frames; ++i)
        res.frames.push_back(render_frame(spec, cam, i * spec.deg_per_frame));

    // Swept strip: from the first visible column of frame 0 to the last
    // visible column of the final frame.
    double u_first = 0, u_last = 0;
    bool any = false;
    for (int x = 0; x < cam.frame_w && !any; ++x)
        any = detail::texture_u(cam, spec.texture.width, x, u_first);
    bool any2 = false;
    for (int x = cam.frame_w - 1; x >= 0 && !any2; --x)
        any2 = detail::texture_u(cam, spec.texture.width, x, u_last);
    if (!any || !any2) throw InvalidGeometry("generate_sequence: cylinder not visible");
    u_last += (spec.n_frames - 1) * res.true_shift_px;

    const int gt_w = static_cast<int>(std::floor(u_last - u_first)) + 1;
    const int gt_h = cam.frame_h;
    Image gt(gt_w, gt_h, spec.texture.channels);
    for (int y = 0; y < gt_h; ++y) {
        const double v = spec.texture.height == gt_h
                             ? y
                             : y * (spec.texture.height - 1.0) / std::max(1, gt_h - 1);
        for (int x = 0; x < gt_w; ++x)
            for (int c = 0; c < spec.texture.channels; ++c)
                gt.at(x, y, c) =
                    round_u8(detail::sample_wrapped(spec.texture, u_first + x, v, c));
    }
    res.ground_truth = gt;
    return res;
}

/// Seeded texture with rectangles and speckle; sharp corners at many scales
/// so Harris has plenty to work with.
inline Image make_blob_texture(int w, int h, std::uint64_t seed, int n_blobs = 0) {
    Image tex(w, h, 1, 128);
    std::mt19937_64 rng(seed);
    if (n_blobs == 0) n_blobs = w * h / 400;
    std::uniform_int_distribution<int> px(0, w - 1), py(0, h - 1);
    std::uniform_int_distribution<int> size(6, 40), gray(20, 235);
    for (int i = 0; i < n_blobs; ++i) {
        const int bx = px(rng), by = py(rng);
        const int bw = size(rng), bh = size(rng);
        const std::uint8_t g = static_cast<std::uint8_t>(gray(rng));
        for (int y = by; y < std::min(h, by + bh); ++y)
            for (int x = bx; x < bx + bw; ++x)
                tex.at(x % w, y) = g;  // wrap horizontally, texture is cyclic
    }
    std::uniform_int_distribution<int> speckle(0, 255);
    for (int i = 0; i < w * h / 20; ++i) tex.at(px(rng), py(rng)) =
        static_cast<std::uint8_t>(speckle(rng));
    return tex;
}

/// Checkerboard texture. A nonzero jitter_seed varies each cell pitch by up
/// to a third and gives every cell its own tone; a strictly periodic
/// two-tone board repeats descriptors verbatim, which starves ratio-test
/// matching by construction.
inline Image make_checker_texture(int w, int h, int cell, std::uint64_t jitter_seed = 0) {
    auto ordinals = [&](int extent, std::uint64_t salt) {
        std::vector<int> idx(extent);
        std::mt19937_64 rng(jitter_seed ^ salt);
        std::uniform_int_distribution<int> d(-cell / 3, cell / 3);
        int pos = 0, ordinal = 0;
        while (pos < extent) {
            int width = cell + (jitter_seed ? d(rng) : 0);
            width = std::max(2, width);
            for (int i = pos; i < std::min(extent, pos + width); ++i) idx[i] = ordinal;
            pos += width;
            ++ordinal;
        }
        return idx;
    };
    const auto cols = ordinals(w, 0x9E3779B9ULL);
    const auto rows = ordinals(h, 0xDEADBEEFULL);
    Image tex(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const bool bright = (cols[x] + rows[y]) % 2;
            std::uint8_t tone = bright ? 230 : 25;
            if (jitter_seed) {
                const std::uint64_t mix = detail::mix_seed(
                    jitter_seed, static_cast<std::uint64_t>(cols[x]) * 7919 + rows[y]);
                tone = static_cast<std::uint8_t>(bright ? 185 + mix % 56 : 15 + mix % 56);
            }
            tex.at(x, y) = tone;
        }
    return tex;
}

}  // namespace unroll
