#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "unroll/errors.hpp"
#include "unroll/features.hpp"

namespace unroll {

struct Match {
    int idx_a = -1;
    int idx_b = -1;
    double distance = 0;
};

/// L2 distance between two descriptors, accumulated in index order.
inline double descriptor_distance(const Descriptor& a, const Descriptor& b) {
    double s = 0;
    const std::size_t n = std::min(a.values.size(), b.values.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(a.values[i]) - static_cast<double>(b.values[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

namespace detail {

inline void sort_matches(std::vector<Match>& ms) {
    std::sort(ms.begin(), ms.end(), [](const Match& a, const Match& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        if (a.idx_b != b.idx_b) return a.idx_b < b.idx_b;
        return a.idx_a < b.idx_a;
    });
}

// Dense squared-distance matrix (row-major, |da| x |db|) used for ranking
// only. Four partial float sums keep the loop vectorizable; reported match
// distances are recomputed with descriptor_distance so they stay exactly
// equal to the naive double-accumulated L2.
inline std::vector<float> distance_matrix_sq(const std::vector<Descriptor>& da,
                                             const std::vector<Descriptor>& db) {
    std::vector<float> m(da.size() * db.size());
    for (std::size_t i = 0; i < da.size(); ++i) {
        const float* pa = da[i].values.data();
        const std::size_t len = da[i].values.size();
        float* row = m.data() + i * db.size();
        for (std::size_t j = 0; j < db.size(); ++j) {
            const float* pb = db[j].values.data();
            const std::size_t n = std::min(len, db[j].values.size());
            float s0 = 0, s1 = 0, s2 = 0, s3 = 0;
            std::size_t k = 0;
            for (; k + 4 <= n; k += 4) {
                const float d0 = pa[k] - pb[k];
                const float d1 = pa[k + 1] - pb[k + 1];
                const float d2 = pa[k + 2] - pb[k + 2];
                const float d3 = pa[k + 3] - pb[k + 3];
                s0 += d0 * d0;
                s1 += d1 * d1;
                s2 += d2 * d2;
                s3 += d3 * d3;
            }
            for (; k < n; ++k) {
                const float d = pa[k] - pb[k];
                s0 += d * d;
            }
            row[j] = (s0 + s1) + (s2 + s3);
        }
    }
    return m;
}

}  // namespace detail

/// Brute-force nearest neighbor by L2 distance. With cross_check only
/// mutual nearest pairs survive. Sorted by distance ascending, ties broken
/// by lower idx_b.
inline std::vector<Match> match_bf(const std::vector<Descriptor>& da,
                                   const std::vector<Descriptor>& db,
                                   bool cross_check = false) {
    std::vector<Match> out;
    if (da.empty() || db.empty()) return out;
    const auto m = detail::distance_matrix_sq(da, db);
    const std::size_t nb = db.size();
    std::vector<int> a_to_b(da.size());
    for (std::size_t i = 0; i < da.size(); ++i) {
        const float* row = m.data() + i * nb;
        int best = 0;
        for (std::size_t j = 1; j < nb; ++j)
            if (row[j] < row[best]) best = static_cast<int>(j);
        a_to_b[i] = best;
    }
    if (cross_check) {
        std::vector<int> b_to_a(nb, 0);
        for (std::size_t i = 1; i < da.size(); ++i)
            for (std::size_t j = 0; j < nb; ++j)
                if (m[i * nb + j] < m[b_to_a[j] * nb + j]) b_to_a[j] = static_cast<int>(i);
        for (std::size_t i = 0; i < da.size(); ++i)
            if (b_to_a[a_to_b[i]] == static_cast<int>(i))
                out.push_back({static_cast<int>(i), a_to_b[i],
                               descriptor_distance(da[i], db[a_to_b[i]])});
    } else {
        for (std::size_t i = 0; i < da.size(); ++i)
            out.push_back({static_cast<int>(i), a_to_b[i],
                           descriptor_distance(da[i], db[a_to_b[i]])});
    }
    detail::sort_matches(out);
    return out;
}

/// kNN ratio test (k = 2): a -> b1 is kept only if d(a,b1) < ratio * d(a,b2)
/// for the two nearest neighbors of a.
inline std::vector<Match> match_knn_ratio(const std::vector<Descriptor>& da,
                                          const std::vector<Descriptor>& db,
                                          double ratio = 0.75) {
    if (db.size() < 2)
        throw InsufficientCandidates("match_knn_ratio: need at least 2 candidates");
    std::vector<Match> out;
    if (da.empty()) return out;
    const auto m = detail::distance_matrix_sq(da, db);
    const std::size_t nb = db.size();
    for (std::size_t i = 0; i < da.size(); ++i) {
        const float* row = m.data() + i * nb;
        int b1 = -1;
        float s1 = std::numeric_limits<float>::infinity();
        float s2 = std::numeric_limits<float>::infinity();
        for (std::size_t j = 0; j < nb; ++j) {
            if (row[j] < s1) {
                s2 = s1;
                s1 = row[j];
                b1 = static_cast<int>(j);
            } else if (row[j] < s2) {
                s2 = row[j];
            }
        }
        // d1 < ratio * d2, compared on squared distances
        if (b1 >= 0 && static_cast<double>(s1) < ratio * ratio * static_cast<double>(s2))
            out.push_back({static_cast<int>(i), b1, descriptor_distance(da[i], db[b1])});
    }
    detail::sort_matches(out);
    return out;
}

}  // namespace unroll
