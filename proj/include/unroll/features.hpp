#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "unroll/image.hpp"

namespace unroll {

/// Detected corner with subpixel-capable coordinates.
struct FeaturePoint {
    double x = 0;
    double y = 0;
    float response = 0;
};

/// Mean/variance normalized intensity patch, length patch_size^2.
struct Descriptor {
    std::vector<float> values;
};

struct HarrisParams {
    double k = 0.04;             // Harris constant
    double sigma = 1.0;          // std of the Gaussian structure-tensor window
    double threshold_rel = 0.01; // fraction of the max response
    int nms_radius = 3;
    int max_points = 500;
};

/// Single-channel float raster (Harris response maps, gradients, ...).
struct FloatMap {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    FloatMap() = default;
    FloatMap(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0.f) {}
    float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
};

namespace detail {

inline int gaussian_radius(double sigma) {
    return std::max(1, static_cast<int>(std::ceil(2.0 * sigma)));
}

inline std::vector<float> gaussian_kernel(double sigma) {
    const int r = gaussian_radius(sigma);
    std::vector<double> k(2 * r + 1);
    double sum = 0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += k[i + r];
    }
    std::vector<float> out(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) out[i] = static_cast<float>(k[i] / sum);
    return out;
}

// Horizontal+vertical separable convolution through `tmp`, written back into
// `map` in place. Border pixels where the window leaves the map are not
// meaningful; harris_response never reads them.
inline void separable_blur_inplace(FloatMap& map, FloatMap& tmp, const std::vector<float>& k) {
    const int r = (static_cast<int>(k.size()) - 1) / 2;
    const int w = map.width, h = map.height;
    for (int y = 0; y < h; ++y) {
        const float* in = map.data.data() + static_cast<std::size_t>(y) * w;
        float* dst = tmp.data.data() + static_cast<std::size_t>(y) * w;
        if (r == 2) {
            // symmetric 5-tap fast path (the sigma = 1 default)
            const float k0 = k[0], k1 = k[1], k2 = k[2];
            for (int x = 2; x < w - 2; ++x)
                dst[x] = k2 * in[x] + k1 * (in[x - 1] + in[x + 1]) +
                         k0 * (in[x - 2] + in[x + 2]);
        } else {
            for (int x = r; x < w - r; ++x) {
                float s = 0;
                for (int i = -r; i <= r; ++i) s += k[i + r] * in[x + i];
                dst[x] = s;
            }
        }
    }
    for (int y = r; y < h - r; ++y) {
        float* dst = map.data.data() + static_cast<std::size_t>(y) * w;
        const float* in0 = tmp.data.data() + static_cast<std::size_t>(y - r) * w;
        for (int x = 0; x < w; ++x) dst[x] = k[0] * in0[x];
        for (int i = 1; i <= 2 * r; ++i) {
            const float kv = k[i];
            const float* in = tmp.data.data() + static_cast<std::size_t>(y - r + i) * w;
            for (int x = 0; x < w; ++x) dst[x] += kv * in[x];
        }
    }
}

// Reused per-thread scratch for the structure-tensor maps; fresh dimensions
// reallocate, repeated calls on same-size images reuse the pages.
struct HarrisWorkspace {
    FloatMap xx, xy, yy, tmp;
    void reset(int w, int h) {
        if (xx.width != w || xx.height != h) {
            xx = FloatMap(w, h);
            xy = FloatMap(w, h);
            yy = FloatMap(w, h);
            tmp = FloatMap(w, h);
        }
    }
};

inline HarrisWorkspace& harris_workspace() {
    static thread_local HarrisWorkspace ws;
    return ws;
}

// 3x3 Sobel gradient products (Ix^2, IxIy, Iy^2) in one pass into pre-sized
// maps; only the 1-px-border interior is written.
inline void sobel_products(const Image& img, FloatMap& xx, FloatMap& xy, FloatMap& yy) {
    const int w = img.width, h = img.height;
    for (int y = 1; y < h - 1; ++y) {
        const std::uint8_t* r0 = img.data.data() + static_cast<std::size_t>(y - 1) * w;
        const std::uint8_t* r1 = r0 + w;
        const std::uint8_t* r2 = r1 + w;
        float* pxx = xx.data.data() + static_cast<std::size_t>(y) * w;
        float* pxy = xy.data.data() + static_cast<std::size_t>(y) * w;
        float* pyy = yy.data.data() + static_cast<std::size_t>(y) * w;
        for (int x = 1; x < w - 1; ++x) {
            const int gx = (r0[x + 1] + 2 * r1[x + 1] + r2[x + 1]) -
                           (r0[x - 1] + 2 * r1[x - 1] + r2[x - 1]);
            const int gy = (r2[x - 1] + 2 * r2[x] + r2[x + 1]) -
                           (r0[x - 1] + 2 * r0[x] + r0[x + 1]);
            pxx[x] = static_cast<float>(gx) * gx;
            pxy[x] = static_cast<float>(gx) * gy;
            pyy[x] = static_cast<float>(gy) * gy;
        }
    }
}

}  // namespace detail

/// Harris corner response R = det(M) - k * trace(M)^2, with M the
/// Gaussian-weighted structure tensor of Sobel gradients. The border where
/// the window does not fit is set to 0.
inline FloatMap harris_response(const Image& img, const HarrisParams& p = {}) {
    if (img.channels != 1) throw Error("harris_response: grayscale input required");
    const int r = detail::gaussian_radius(p.sigma);
    const int border = r + 1;  // sobel radius + window radius
    if (std::min(img.width, img.height) < 2 * border + 1)
        throw ImageTooSmall("harris_response: image smaller than the filter window");

    detail::HarrisWorkspace& ws = detail::harris_workspace();
    ws.reset(img.width, img.height);
    detail::sobel_products(img, ws.xx, ws.xy, ws.yy);
    const auto kernel = detail::gaussian_kernel(p.sigma);
    detail::separable_blur_inplace(ws.xx, ws.tmp, kernel);
    detail::separable_blur_inplace(ws.xy, ws.tmp, kernel);
    detail::separable_blur_inplace(ws.yy, ws.tmp, kernel);
    const FloatMap& sxx = ws.xx;
    const FloatMap& sxy = ws.xy;
    const FloatMap& syy = ws.yy;

    const float k = static_cast<float>(p.k);
    FloatMap resp(img.width, img.height);
    for (int y = border; y < img.height - border; ++y) {
        const std::size_t off = static_cast<std::size_t>(y) * img.width;
        const float* a = sxx.data.data() + off;
        const float* b = sxy.data.data() + off;
        const float* c = syy.data.data() + off;
        float* r = resp.data.data() + off;
        for (int x = border; x < img.width - border; ++x)
            r[x] = (a[x] * c[x] - b[x] * b[x]) - k * (a[x] + c[x]) * (a[x] + c[x]);
    }
    return resp;
}

/// Local maxima of the Harris response above threshold_rel * max(R), with
/// greedy non-max suppression. Deterministic: sorted by response descending,
/// ties by (y, x).
inline std::vector<FeaturePoint> detect_corners(const Image& img, const HarrisParams& p = {}) {
    const FloatMap resp = harris_response(img, p);
    float max_r = 0;
    for (float v : resp.data) max_r = std::max(max_r, v);
    if (max_r <= 0) return {};
    const float thresh = static_cast<float>(p.threshold_rel) * max_r;

    struct Cand {
        int x, y;
        float r;
    };
    std::vector<Cand> cands;
    for (int y = 1; y < resp.height - 1; ++y)
        for (int x = 1; x < resp.width - 1; ++x) {
            const float v = resp.at(x, y);
            if (v <= thresh) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    if (resp.at(x + dx, y + dy) > v) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max) cands.push_back({x, y, v});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.r != b.r) return a.r > b.r;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });

    std::vector<FeaturePoint> pts;
    const int r2 = p.nms_radius * p.nms_radius;
    for (const auto& c : cands) {
        if (static_cast<int>(pts.size()) >= p.max_points) break;
        bool keep = true;
        for (const auto& q : pts) {
            const double dx = c.x - q.x, dy = c.y - q.y;
            if (dx * dx + dy * dy < r2) {
                keep = false;
                break;
            }
        }
        if (keep) pts.push_back({static_cast<double>(c.x), static_cast<double>(c.y), c.r});
    }
    return pts;
}

/// Iterative gradient-orthogonality refinement of corner locations. Each
/// iteration solves the 2x2 normal equations of sum(w * g g^T) q =
/// sum(w * g g^T * s) over the window. Non-converged points are returned at
/// their last iterate; no point moves further than `win` from its seed.
inline std::vector<FeaturePoint> refine_subpixel(const Image& img,
                                                 const std::vector<FeaturePoint>& pts,
                                                 int win = 5, double eps = 0.001,
                                                 int max_iter = 40) {
    if (img.channels != 1) throw Error("refine_subpixel: grayscale input required");
    const double sigma_w = win / 2.0;
    std::vector<FeaturePoint> out;
    out.reserve(pts.size());
    for (const auto& seed : pts) {
        double qx = seed.x, qy = seed.y;
        for (int it = 0; it < max_iter; ++it) {
            double a = 0, b = 0, c = 0, bx = 0, by = 0;
            for (int j = -win; j <= win; ++j)
                for (int i = -win; i <= win; ++i) {
                    const double sx = qx + i, sy = qy + j;
                    const double gx = (bilinear_sample(img, sx + 1, sy) -
                                       bilinear_sample(img, sx - 1, sy)) * 0.5;
                    const double gy = (bilinear_sample(img, sx, sy + 1) -
                                       bilinear_sample(img, sx, sy - 1)) * 0.5;
                    const double w = std::exp(-0.5 * (i * i + j * j) / (sigma_w * sigma_w));
                    a += w * gx * gx;
                    b += w * gx * gy;
                    c += w * gy * gy;
                    bx += w * (gx * gx * sx + gx * gy * sy);
                    by += w * (gx * gy * sx + gy * gy * sy);
                }
            const double det = a * c - b * b;
            if (std::abs(det) < 1e-9) break;  // flat or edge-only window
            const double nx = (c * bx - b * by) / det;
            const double ny = (a * by - b * bx) / det;
            const double step = std::hypot(nx - qx, ny - qy);
            qx = nx;
            qy = ny;
            const double drift = std::hypot(qx - seed.x, qy - seed.y);
            if (drift > win) {
                const double s = win / drift;
                qx = seed.x + (qx - seed.x) * s;
                qy = seed.y + (qy - seed.y) * s;
                break;
            }
            if (step < eps) break;
        }
        out.push_back({qx, qy, seed.response});
    }
    return out;
}

struct Described {
    std::vector<FeaturePoint> points;
    std::vector<Descriptor> descriptors;
};

/// Bilinear patch descriptors centered on each point, mean-subtracted and
/// variance-normalized (flat patches become all-zero). Points closer to the
/// border than the patch radius are dropped, order preserved.
inline Described describe(const Image& img, const std::vector<FeaturePoint>& pts,
                          int patch_size = 15) {
    if (img.channels != 1) throw Error("describe: grayscale input required");
    if (patch_size < 3 || patch_size % 2 == 0) throw Error("describe: patch_size must be odd >= 3");
    const int r = patch_size / 2;
    Described out;
    for (const auto& pt : pts) {
        if (pt.x - r < 0 || pt.y - r < 0 || pt.x + r > img.width - 1 || pt.y + r > img.height - 1)
            continue;
        Descriptor d;
        d.values.resize(static_cast<std::size_t>(patch_size) * patch_size);
        std::size_t i = 0;
        double sum = 0;
        for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx) {
                const double v = bilinear_sample(img, pt.x + dx, pt.y + dy);
                d.values[i++] = static_cast<float>(v);
                sum += v;
            }
        const double n = static_cast<double>(d.values.size());
        const double mean = sum / n;
        double var = 0;
        for (auto& v : d.values) {
            const double c = v - mean;
            var += c * c;
        }
        var /= n;
        if (var < 1e-12) {
            std::fill(d.values.begin(), d.values.end(), 0.f);
        } else {
            const double inv_sd = 1.0 / std::sqrt(var);
            for (auto& v : d.values) v = static_cast<float>((v - mean) * inv_sd);
        }
        out.points.push_back(pt);
        out.descriptors.push_back(std::move(d));
    }
    return out;
}

}  // namespace unroll
