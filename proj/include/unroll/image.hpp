#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "unroll/errors.hpp"

namespace unroll {

/// 8-bit raster, row-major, interleaved channels (1 = gray, 3 = RGB).
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> data;

    Image() = default;
    Image(int w, int h, int c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {
        if (w < 1 || h < 1 || (c != 1 && c != 3))
            throw Error("Image: bad dimensions");
    }

    std::size_t index(int x, int y, int c = 0) const {
        return (static_cast<std::size_t>(y) * width + x) * channels + c;
    }
    std::uint8_t at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }
    std::uint8_t& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }

    const std::uint8_t* row(int y) const {
        return data.data() + static_cast<std::size_t>(y) * width * channels;
    }
    std::uint8_t* row(int y) {
        return data.data() + static_cast<std::size_t>(y) * width * channels;
    }

    bool same_size(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
    bool empty() const { return data.empty(); }

    bool operator==(const Image& o) const = default;
};

/// Per-pixel validity flags, same dimensions as the image they annotate.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    Mask() = default;
    Mask(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const {
        return bits[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int x, int y) {
        return bits[static_cast<std::size_t>(y) * width + x];
    }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto b : bits) n += b ? 1 : 0;
        return n;
    }
};

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool operator==(const Rect&) const = default;
};

inline std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

/// Round-half-up to 8-bit.
inline std::uint8_t round_u8(double v) {
    return clamp_u8(std::floor(v + 0.5));
}

/// Fixed luma weights 0.299/0.587/0.114, rounded to nearest.
/// 1-channel input is returned unchanged.
inline Image to_grayscale(const Image& img) {
    if (img.channels == 1) return img;
    Image out(img.width, img.height, 1);
    const std::uint8_t* src = img.data.data();
    std::uint8_t* dst = out.data.data();
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
        dst[i] = round_u8(v);
    }
    return out;
}

/// Exact sub-raster copy. Throws OutOfBounds if the rect exceeds the image.
inline Image crop(const Image& img, const Rect& r) {
    if (r.x < 0 || r.y < 0 || r.w < 1 || r.h < 1 || r.x + r.w > img.width ||
        r.y + r.h > img.height)
        throw OutOfBounds("crop: rect outside image");
    Image out(r.w, r.h, img.channels);
    const std::size_t row_bytes = static_cast<std::size_t>(r.w) * img.channels;
    for (int y = 0; y < r.h; ++y) {
        const std::uint8_t* src = img.row(r.y + y) + static_cast<std::size_t>(r.x) * img.channels;
        std::copy_n(src, row_bytes, out.row(y));
    }
    return out;
}

/// Bilinear sample with edge clamping; (x, y) in pixel coordinates.
inline double bilinear_sample(const Image& img, double x, double y, int c = 0) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    auto px = [&](int xi, int yi) -> double {
        xi = std::clamp(xi, 0, img.width - 1);
        yi = std::clamp(yi, 0, img.height - 1);
        return img.at(xi, yi, c);
    };
    const double top = px(x0, y0) * (1.0 - fx) + px(x0 + 1, y0) * fx;
    const double bot = px(x0, y0 + 1) * (1.0 - fx) + px(x0 + 1, y0 + 1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

}  // namespace unroll
