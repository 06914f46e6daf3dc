#pragma once

// Shared synthetic fixtures and small measurement helpers for the test
// suites. Everything here is deterministic given the seed.

#include <cmath>
#include <random>
#include <vector>

#include "unroll/image.hpp"

namespace fixtures {

using unroll::Image;

inline Image noise_image(int w, int h, std::uint64_t seed, int channels = 1) {
    Image img(w, h, channels);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> d(0, 255);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(d(rng));
    return img;
}

inline Image checkerboard(int w, int h, int cell, std::uint8_t lo = 0, std::uint8_t hi = 255) {
    Image img(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.at(x, y) = ((x / cell + y / cell) % 2) ? hi : lo;
    return img;
}

inline void fill_rect(Image& img, int x0, int y0, int w, int h, std::uint8_t v) {
    for (int y = std::max(0, y0); y < std::min(img.height, y0 + h); ++y)
        for (int x = std::max(0, x0); x < std::min(img.width, x0 + w); ++x)
            for (int c = 0; c < img.channels; ++c) img.at(x, y, c) = v;
}

// White quadrant with its corner at subpixel position (cx, cy), rendered
// with 8x8 supersampling: pixel intensity = coverage * 255.
inline Image quadrant_corner(int w, int h, double cx, double cy) {
    Image img(w, h, 1);
    const int ss = 8;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int hit = 0;
            for (int sy = 0; sy < ss; ++sy)
                for (int sx = 0; sx < ss; ++sx) {
                    const double px = x - 0.5 + (sx + 0.5) / ss;
                    const double py = y - 0.5 + (sy + 0.5) / ss;
                    if (px >= cx && py >= cy) ++hit;
                }
            img.at(x, y) = static_cast<std::uint8_t>(std::lround(255.0 * hit / (ss * ss)));
        }
    return img;
}

// Truncated-kernel Gaussian blur, test-only reference (not the library path).
inline Image gaussian_blur(const Image& img, double sigma) {
    const int r = std::max(1, static_cast<int>(std::ceil(3 * sigma)));
    std::vector<double> k(2 * r + 1);
    double sum = 0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += k[i + r];
    }
    for (auto& v : k) v /= sum;
    auto pass = [&](const Image& src, bool horizontal) {
        Image dst = src;
        for (int y = 0; y < src.height; ++y)
            for (int x = 0; x < src.width; ++x)
                for (int c = 0; c < src.channels; ++c) {
                    double s = 0;
                    for (int i = -r; i <= r; ++i) {
                        const int xx = horizontal ? std::clamp(x + i, 0, src.width - 1) : x;
                        const int yy = horizontal ? y : std::clamp(y + i, 0, src.height - 1);
                        s += k[i + r] * src.at(xx, yy, c);
                    }
                    dst.at(x, y, c) = unroll::round_u8(s);
                }
        return dst;
    };
    return pass(pass(img, true), false);
}

// Frames cut from a wide strip at exact integer offsets: a pure-translation
// sequence with known per-frame shift.
inline std::vector<Image> planted_shift_frames(const Image& strip, int frame_w, int shift,
                                               int n_frames) {
    std::vector<Image> frames;
    for (int i = 0; i < n_frames; ++i)
        frames.push_back(unroll::crop(strip, {i * shift, 0, frame_w, strip.height}));
    return frames;
}

// Zero-normalized cross correlation of two gray images over their common
// top-left region.
inline double ncc(const Image& a, const Image& b) {
    const Image ga = unroll::to_grayscale(a), gb = unroll::to_grayscale(b);
    const int w = std::min(ga.width, gb.width);
    const int h = std::min(ga.height, gb.height);
    double ma = 0, mb = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            ma += ga.at(x, y);
            mb += gb.at(x, y);
        }
    const double n = static_cast<double>(w) * h;
    ma /= n;
    mb /= n;
    double num = 0, da = 0, db = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double va = ga.at(x, y) - ma;
            const double vb = gb.at(x, y) - mb;
            num += va * vb;
            da += va * va;
            db += vb * vb;
        }
    if (da <= 0 || db <= 0) return 0;
    return num / std::sqrt(da * db);
}

// Slope of the bright-stripe centroid over the columns of a gray image;
// least-squares line fit over x -> centroid_y(x).
inline double stripe_slope(const Image& img) {
    const Image g = unroll::to_grayscale(img);
    std::vector<double> xs, ys;
    for (int x = 0; x < g.width; ++x) {
        double wsum = 0, ysum = 0;
        for (int y = 0; y < g.height; ++y) {
            const double w = g.at(x, y);
            wsum += w;
            ysum += w * y;
        }
        if (wsum <= 0) continue;
        xs.push_back(x);
        ys.push_back(ysum / wsum);
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace fixtures
