#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "unroll/transform.hpp"

namespace unroll {

/// Matched point correspondences: src[i] maps to dst[i].
struct PointPairs {
    std::vector<std::array<double, 2>> src;
    std::vector<std::array<double, 2>> dst;

    std::size_t size() const { return src.size(); }
    void push(double sx, double sy, double dx, double dy) {
        src.push_back({sx, sy});
        dst.push_back({dx, dy});
    }
    PointPairs subset(const std::vector<int>& idx) const {
        PointPairs p;
        for (int i : idx) {
            p.src.push_back(src[i]);
            p.dst.push_back(dst[i]);
        }
        return p;
    }
};

enum class RobustMethod { ransac, lmeds };

struct RobustParams {
    RobustMethod method = RobustMethod::ransac;
    double inlier_thresh = 3.0;  // px, RANSAC only
    int max_iters = 1000;
    double confidence = 0.995;
    std::uint64_t seed = 0;
};

struct RobustFit {
    Transform transform;
    std::vector<std::uint8_t> inliers;  // flag per input pair

    int inlier_count() const {
        int n = 0;
        for (auto f : inliers) n += f ? 1 : 0;
        return n;
    }
};

/// Euclidean reprojection error of pair i under t.
inline double reprojection_error(const Transform& t, const std::array<double, 2>& src,
                                 const std::array<double, 2>& dst) {
    double x, y;
    if (!t.apply(src[0], src[1], x, y)) return std::numeric_limits<double>::infinity();
    return std::hypot(x - dst[0], y - dst[1]);
}

namespace detail {

inline Eigen::Matrix3d to_eigen(const Transform& t) {
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = t(r, c);
    return m;
}

inline Transform from_eigen(const Eigen::Matrix3d& m, TransformKind kind) {
    Transform t;
    t.kind = kind;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) t(r, c) = m(r, c);
    return t;
}

inline bool collinear(const std::array<double, 2>& a, const std::array<double, 2>& b,
                      const std::array<double, 2>& c, double eps = 1e-9) {
    const double area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    return std::abs(area2) <= eps;
}

}  // namespace detail

/// Direct three-point solution A = P' P^-1 (exact interpolation).
inline Transform affine_exact(const PointPairs& pp) {
    if (pp.size() != 3)
        throw DegenerateConfiguration("affine_exact: exactly 3 pairs required");
    Eigen::Matrix3d P, Pp;
    for (int i = 0; i < 3; ++i) {
        P.col(i) << pp.src[i][0], pp.src[i][1], 1.0;
        Pp.col(i) << pp.dst[i][0], pp.dst[i][1], 1.0;
    }
    if (std::abs(P.determinant()) < 1e-9)
        throw DegenerateConfiguration("affine_exact: collinear points");
    Eigen::Matrix3d A = Pp * P.inverse();
    A.row(2) << 0, 0, 1;
    Transform t = detail::from_eigen(A, TransformKind::affine);
    if (std::abs(t(0, 0) * t(1, 1) - t(0, 1) * t(1, 0)) <= 1e-12)
        throw DegenerateConfiguration("affine_exact: singular linear part");
    return t;
}

/// Least-squares affine fit via the normal equations
/// A = (P' P^T)(P P^T)^-1, with both 3x3 sum matrices accumulated
/// explicitly. Rejects ill-conditioned P P^T.
inline Transform affine_lstsq(const PointPairs& pp) {
    const std::size_t n = pp.size();
    if (n < 3) throw DegenerateConfiguration("affine_lstsq: need >= 3 pairs");
    Eigen::Matrix3d ppt = Eigen::Matrix3d::Zero();   // P P^T
    Eigen::Matrix3d pppt = Eigen::Matrix3d::Zero();  // P' P^T
    for (std::size_t i = 0; i < n; ++i) {
        const double x = pp.src[i][0], y = pp.src[i][1];
        const double xp = pp.dst[i][0], yp = pp.dst[i][1];
        ppt(0, 0) += x * x;
        ppt(0, 1) += x * y;
        ppt(0, 2) += x;
        ppt(1, 1) += y * y;
        ppt(1, 2) += y;
        pppt(0, 0) += xp * x;
        pppt(0, 1) += xp * y;
        pppt(0, 2) += xp;
        pppt(1, 0) += yp * x;
        pppt(1, 1) += yp * y;
        pppt(1, 2) += yp;
    }
    ppt(1, 0) = ppt(0, 1);
    ppt(2, 0) = ppt(0, 2);
    ppt(2, 1) = ppt(1, 2);
    ppt(2, 2) = static_cast<double>(n);
    pppt(2, 0) = ppt(0, 2);
    pppt(2, 1) = ppt(1, 2);
    pppt(2, 2) = static_cast<double>(n);

    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(ppt);
    const auto& sv = svd.singularValues();
    if (sv(2) <= 0 || sv(0) / sv(2) > 1e12)
        throw DegenerateConfiguration("affine_lstsq: ill-conditioned P P^T (collinear points)");

    Eigen::Matrix3d A = pppt * ppt.inverse();
    A.row(2) << 0, 0, 1;
    Transform t = detail::from_eigen(A, TransformKind::affine);
    if (std::abs(t(0, 0) * t(1, 1) - t(0, 1) * t(1, 0)) <= 1e-12)
        throw DegenerateConfiguration("affine_lstsq: singular linear part");
    return t;
}

/// Normalized DLT homography (Hartley normalization, smallest singular
/// vector), scaled so m22 = 1.
inline Transform homography_dlt(const PointPairs& pp) {
    const std::size_t n = pp.size();
    if (n < 4) throw DegenerateConfiguration("homography_dlt: need >= 4 pairs");

    auto normalizer = [](const std::vector<std::array<double, 2>>& pts) {
        double cx = 0, cy = 0;
        for (const auto& p : pts) {
            cx += p[0];
            cy += p[1];
        }
        cx /= pts.size();
        cy /= pts.size();
        double mean_dist = 0;
        for (const auto& p : pts) mean_dist += std::hypot(p[0] - cx, p[1] - cy);
        mean_dist /= pts.size();
        if (mean_dist < 1e-12)
            throw DegenerateConfiguration("homography_dlt: coincident points");
        const double s = std::numbers::sqrt2 / mean_dist;
        Eigen::Matrix3d T;
        T << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
        return T;
    };
    const Eigen::Matrix3d Ts = normalizer(pp.src);
    const Eigen::Matrix3d Td = normalizer(pp.dst);

    Eigen::MatrixXd M(2 * n, 9);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = Ts(0, 0) * pp.src[i][0] + Ts(0, 2);
        const double y = Ts(1, 1) * pp.src[i][1] + Ts(1, 2);
        const double u = Td(0, 0) * pp.dst[i][0] + Td(0, 2);
        const double v = Td(1, 1) * pp.dst[i][1] + Td(1, 2);
        M.row(2 * i) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
        M.row(2 * i + 1) << x, y, 1, 0, 0, 0, -u * x, -u * y, -u;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // A unique solution needs rank 8; collinear/coincident configurations
    // drop it to 7 or less.
    if (sv(0) <= 0 || sv(7) / sv(0) < 1e-8)
        throw DegenerateConfiguration("homography_dlt: rank-deficient configuration");
    const Eigen::VectorXd h = svd.matrixV().col(8);
    Eigen::Matrix3d Hn;
    Hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
    Eigen::Matrix3d H = Td.inverse() * Hn * Ts;
    if (std::abs(H.determinant()) < 1e-12)
        throw DegenerateConfiguration("homography_dlt: degenerate configuration");
    if (std::abs(H(2, 2)) > 1e-12) H /= H(2, 2);
    return detail::from_eigen(H, TransformKind::projective);
}

namespace detail {

inline Transform fit_minimal(const PointPairs& pp, TransformKind kind) {
    if (kind == TransformKind::affine) return affine_exact(pp);
    // Reject minimal homography samples with any 3 collinear points.
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            for (int c = b + 1; c < 4; ++c)
                if (collinear(pp.src[a], pp.src[b], pp.src[c], 1e-6) ||
                    collinear(pp.dst[a], pp.dst[b], pp.dst[c], 1e-6))
                    throw DegenerateConfiguration("degenerate minimal sample");
    return homography_dlt(pp);
}

inline Transform fit_full(const PointPairs& pp, TransformKind kind) {
    return kind == TransformKind::affine ? affine_lstsq(pp) : homography_dlt(pp);
}

inline std::vector<int> sample_indices(std::mt19937_64& rng, int n, int k) {
    std::vector<int> idx;
    idx.reserve(k);
    std::uniform_int_distribution<int> dist(0, n - 1);
    while (static_cast<int>(idx.size()) < k) {
        const int c = dist(rng);
        bool dup = false;
        for (int v : idx) dup |= (v == c);
        if (!dup) idx.push_back(c);
    }
    return idx;
}

}  // namespace detail

/// Robust model fit. RANSAC maximizes the inlier count under inlier_thresh
/// with adaptive early exit at the requested confidence, then refits on the
/// consensus set. LMEDS minimizes the median squared reprojection error and
/// derives the inlier band from the robust sigma
/// 1.4826 * (1 + 5/(n - d)) * sqrt(median), d the minimal sample size.
/// Deterministic given rp.seed.
inline RobustFit robust_fit(const PointPairs& pp, TransformKind kind, const RobustParams& rp) {
    const int n = static_cast<int>(pp.size());
    const int minimal = kind == TransformKind::affine ? 3 : 4;
    if (n < minimal) throw DegenerateConfiguration("robust_fit: too few pairs");

    std::mt19937_64 rng(rp.seed);
    auto residuals = [&](const Transform& t) {
        std::vector<double> r(n);
        for (int i = 0; i < n; ++i) r[i] = reprojection_error(t, pp.src[i], pp.dst[i]);
        return r;
    };

    Transform best_model;
    bool have_model = false;

    if (rp.method == RobustMethod::ransac) {
        int best_count = -1;
        long needed = rp.max_iters;
        for (long it = 0; it < std::min<long>(rp.max_iters, needed); ++it) {
            const auto idx = detail::sample_indices(rng, n, minimal);
            Transform model;
            try {
                model = detail::fit_minimal(pp.subset(idx), kind);
            } catch (const DegenerateConfiguration&) {
                continue;
            }
            const auto res = residuals(model);
            int count = 0;
            for (double r : res) count += (r < rp.inlier_thresh) ? 1 : 0;
            if (count > best_count) {
                best_count = count;
                best_model = model;
                have_model = true;
                const double w = static_cast<double>(count) / n;
                const double denom = std::log(1.0 - std::min(0.999999, std::pow(w, minimal)));
                if (denom < 0) {
                    needed = static_cast<long>(
                        std::ceil(std::log(1.0 - rp.confidence) / denom));
                    needed = std::max<long>(needed, it + 1);
                }
            }
        }
        if (!have_model || best_count < minimal + 1)
            throw NoConsensus("robust_fit: consensus below minimal sample size + 1");

        std::vector<int> consensus;
        const auto res = residuals(best_model);
        for (int i = 0; i < n; ++i)
            if (res[i] < rp.inlier_thresh) consensus.push_back(i);
        Transform refit = best_model;
        try {
            refit = detail::fit_full(pp.subset(consensus), kind);
        } catch (const DegenerateConfiguration&) {
        }
        RobustFit out;
        out.transform = refit;
        out.inliers.assign(n, 0);
        const auto rr = residuals(refit);
        for (int i = 0; i < n; ++i) out.inliers[i] = rr[i] < rp.inlier_thresh ? 1 : 0;
        if (out.inlier_count() < minimal + 1) {
            // Refit drifted off the consensus; fall back to the sample model.
            out.transform = best_model;
            for (int i = 0; i < n; ++i) out.inliers[i] = res[i] < rp.inlier_thresh ? 1 : 0;
        }
        return out;
    }

    // LMEDS
    double best_median = std::numeric_limits<double>::infinity();
    for (long it = 0; it < rp.max_iters; ++it) {
        const auto idx = detail::sample_indices(rng, n, minimal);
        Transform model;
        try {
            model = detail::fit_minimal(pp.subset(idx), kind);
        } catch (const DegenerateConfiguration&) {
            continue;
        }
        auto res = residuals(model);
        for (auto& r : res) r *= r;
        std::nth_element(res.begin(), res.begin() + n / 2, res.end());
        const double med = res[n / 2];
        if (med < best_median) {
            best_median = med;
            best_model = model;
            have_model = true;
        }
    }
    if (!have_model) throw DegenerateConfiguration("robust_fit: no valid LMEDS sample");

    const double denom = std::max(1, n - minimal);
    const double sigma = 1.4826 * (1.0 + 5.0 / denom) * std::sqrt(best_median);
    const double band = 2.5 * sigma + 1e-9;
    const auto res = residuals(best_model);
    std::vector<int> consensus;
    for (int i = 0; i < n; ++i)
        if (res[i] <= band) consensus.push_back(i);
    if (static_cast<int>(consensus.size()) < minimal + 1)
        throw NoConsensus("robust_fit: LMEDS consensus below minimal sample size + 1");
    Transform refit = best_model;
    try {
        refit = detail::fit_full(pp.subset(consensus), kind);
    } catch (const DegenerateConfiguration&) {
    }
    RobustFit out;
    out.transform = refit;
    out.inliers.assign(n, 0);
    const auto rr = residuals(refit);
    for (int i = 0; i < n; ++i) out.inliers[i] = rr[i] <= band ? 1 : 0;
    return out;
}

}  // namespace unroll
