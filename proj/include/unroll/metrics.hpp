#pragma once

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "unroll/image.hpp"

namespace unroll {

/// Overlap comparison of two equal-size regions. `om` mixes the mean
/// absolute difference, three histogram distances and -PSNR as defined;
/// lower is better. `identical` marks the d_area = 0 case where PSNR is
/// unbounded and om is not a meaningful number.
struct OverlapReport {
    double d_area = 0;
    double psnr = 0;
    double d_euk = 0;
    double d_man = 0;
    double d_chi = 0;
    double om = 0;
    bool identical = false;
};

struct ExposureParams {
    int smooth_window = 15;          // moving-average width, odd
    double min_prominence_rel = 0.05;  // fraction of the signal range
};

/// Mean absolute difference between f1's last pixel column and f2's first.
inline double edge_metric(const Image& f1, const Image& f2) {
    if (f1.height != f2.height) throw HeightMismatch("edge_metric: unequal heights");
    const Image a = to_grayscale(f1), b = to_grayscale(f2);
    double sum = 0;
    for (int y = 0; y < a.height; ++y)
        sum += std::abs(static_cast<double>(a.at(a.width - 1, y)) - b.at(0, y));
    return sum / a.height;
}

/// D_area, PSNR = 20 log10(255 / sqrt(D_area)), normalized-histogram
/// distances (Euclidean, Manhattan, symmetric chi-square) and their total
/// OM = D_area + d_euk + d_man + d_chi - PSNR.
inline OverlapReport overlap_metric(const Image& r1, const Image& r2, int bins = 256) {
    if (r1.width != r2.width || r1.height != r2.height)
        throw HeightMismatch("overlap_metric: unequal region sizes");
    if (bins < 1 || bins > 256) throw Error("overlap_metric: bins must be in [1,256]");
    const Image a = to_grayscale(r1), b = to_grayscale(r2);
    const std::size_t n = a.data.size();

    OverlapReport rep;
    double abs_sum = 0;
    std::vector<double> h1(bins, 0.0), h2(bins, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        abs_sum += std::abs(static_cast<double>(a.data[i]) - b.data[i]);
        h1[a.data[i] * bins / 256] += 1.0;
        h2[b.data[i] * bins / 256] += 1.0;
    }
    rep.d_area = abs_sum / static_cast<double>(n);
    for (int k = 0; k < bins; ++k) {
        h1[k] /= static_cast<double>(n);
        h2[k] /= static_cast<double>(n);
    }
    double euk2 = 0;
    for (int k = 0; k < bins; ++k) {
        const double d = h1[k] - h2[k];
        euk2 += d * d;
        rep.d_man += std::abs(d);
        if (h1[k] + h2[k] > 0) rep.d_chi += d * d / (h1[k] + h2[k]);
    }
    rep.d_euk = std::sqrt(euk2);
    if (rep.d_area == 0) {
        rep.identical = true;
        rep.psnr = std::numeric_limits<double>::infinity();
        rep.om = -std::numeric_limits<double>::infinity();
        return rep;
    }
    rep.psnr = 20.0 * std::log10(255.0 / std::sqrt(rep.d_area));
    rep.om = rep.d_area + rep.d_euk + rep.d_man + rep.d_chi - rep.psnr;
    return rep;
}

namespace detail {

inline std::vector<double> column_sums(const Image& img) {
    std::vector<double> s(img.width, 0.0);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) s[x] += img.at(x, y);
    return s;
}

inline std::vector<double> moving_average(const std::vector<double>& s, int window) {
    const int r = window / 2;
    const int n = static_cast<int>(s.size());
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - r), hi = std::min(n - 1, i + r);
        double sum = 0;
        for (int j = lo; j <= hi; ++j) sum += s[j];
        out[i] = sum / (hi - lo + 1);
    }
    return out;
}

struct Extremum {
    int index;
    double value;
    bool is_max;
};

// Alternating interior extrema of a 1-D signal (plateaus compressed).
inline std::vector<Extremum> alternating_extrema(const std::vector<double>& s) {
    std::vector<Extremum> ext;
    int dir = 0;
    int last_move = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] == s[i - 1]) continue;
        const int d = s[i] > s[i - 1] ? 1 : -1;
        if (dir != 0 && d != dir)
            ext.push_back({last_move, s[last_move], dir > 0});
        dir = d;
        last_move = static_cast<int>(i);
    }
    return ext;
}

// Removes adjacent extremum pairs whose swing is below `thresh` until every
// remaining swing qualifies. Alternation is preserved: dropping an interior
// (min,max) or (max,min) pair keeps the neighbors alternating.
inline void prune_extrema(std::vector<Extremum>& ext, double thresh) {
    bool changed = true;
    while (changed && ext.size() >= 2) {
        changed = false;
        int min_i = -1;
        double min_swing = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < ext.size(); ++i) {
            const double swing = std::abs(ext[i].value - ext[i + 1].value);
            if (swing < min_swing) {
                min_swing = swing;
                min_i = static_cast<int>(i);
            }
        }
        if (min_i >= 0 && min_swing < thresh) {
            ext.erase(ext.begin() + min_i, ext.begin() + min_i + 2);
            changed = true;
        }
    }
}

}  // namespace detail

/// Exposure variation: mean swing between adjacent qualifying extrema of
/// the smoothed column-sum signal. Returns 0 when fewer than two extrema
/// pass the prominence filter.
inline double exposure_metric(const Image& img, const ExposureParams& p = {}) {
    if (p.smooth_window < 1 || p.smooth_window % 2 == 0)
        throw Error("exposure_metric: smooth_window must be odd >= 1");
    if (img.width < 3 * p.smooth_window)
        throw ImageTooNarrow("exposure_metric: image narrower than 3x smooth window");
    const Image gray = to_grayscale(img);
    const auto smooth = detail::moving_average(detail::column_sums(gray), p.smooth_window);

    double lo = smooth[0], hi = smooth[0];
    for (double v : smooth) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double range = hi - lo;
    if (range <= 0) return 0.0;

    auto ext = detail::alternating_extrema(smooth);
    detail::prune_extrema(ext, p.min_prominence_rel * range);
    if (ext.size() < 2) return 0.0;
    double sum = 0;
    for (std::size_t i = 0; i + 1 < ext.size(); ++i)
        sum += std::abs(ext[i].value - ext[i + 1].value);
    return sum / static_cast<double>(ext.size() - 1);
}

/// Variance of the 3x3 Laplacian response (center -4, cross 1), borders
/// excluded.
inline double sharpness_laplace(const Image& img) {
    const Image g = to_grayscale(img);
    if (g.width < 3 || g.height < 3) throw ImageTooSmall("sharpness_laplace: min dimension 3");
    std::vector<double> lap;
    lap.reserve(static_cast<std::size_t>(g.width - 2) * (g.height - 2));
    for (int y = 1; y < g.height - 1; ++y)
        for (int x = 1; x < g.width - 1; ++x) {
            const double v = -4.0 * g.at(x, y) + g.at(x - 1, y) + g.at(x + 1, y) +
                             g.at(x, y - 1) + g.at(x, y + 1);
            lap.push_back(v);
        }
    double mean = 0;
    for (double v : lap) mean += v;
    mean /= static_cast<double>(lap.size());
    double var = 0;
    for (double v : lap) var += (v - mean) * (v - mean);
    return var / static_cast<double>(lap.size());
}

/// High-frequency energy: 2-D FFT of the mean-subtracted image, the
/// low-frequency disc of radius center_radius_frac * min(W, H) removed,
/// mean of 20 log10(|F| + 1e-9) over the remaining coefficients.
inline double sharpness_fft(const Image& img, double center_radius_frac = 0.10) {
    const Image g = to_grayscale(img);
    const int w = g.width, h = g.height;

    double mean = 0;
    for (auto v : g.data) mean += v;
    mean /= static_cast<double>(g.data.size());

    std::vector<std::complex<double>> spec(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < spec.size(); ++i)
        spec[i] = std::complex<double>(static_cast<double>(g.data[i]) - mean, 0.0);

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> line, out;
    line.resize(w);
    for (int y = 0; y < h; ++y) {
        std::copy_n(spec.begin() + static_cast<std::size_t>(y) * w, w, line.begin());
        fft.fwd(out, line);
        std::copy_n(out.begin(), w, spec.begin() + static_cast<std::size_t>(y) * w);
    }
    line.resize(h);
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) line[y] = spec[static_cast<std::size_t>(y) * w + x];
        fft.fwd(out, line);
        for (int y = 0; y < h; ++y) spec[static_cast<std::size_t>(y) * w + x] = out[y];
    }

    const double radius = center_radius_frac * std::min(w, h);
    double sum = 0;
    std::size_t count = 0;
    for (int y = 0; y < h; ++y) {
        const double fy = y <= h / 2 ? y : y - h;  // signed frequency
        for (int x = 0; x < w; ++x) {
            const double fx = x <= w / 2 ? x : x - w;
            if (std::hypot(fx, fy) <= radius) continue;
            sum += 20.0 * std::log10(std::abs(spec[static_cast<std::size_t>(y) * w + x]) + 1e-9);
            ++count;
        }
    }
    if (count == 0) throw ImageTooSmall("sharpness_fft: no coefficients outside the disc");
    return sum / static_cast<double>(count);
}

}  // namespace unroll
