#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "unroll/errors.hpp"

namespace unroll {

enum class TransformKind { affine, projective };

/// 3x3 plane transform in row-major order. Affine transforms keep the last
/// row at exactly (0, 0, 1); projective ones are normalized to m22 = 1
/// whenever |m22| is not vanishing.
struct Transform {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};
    TransformKind kind = TransformKind::affine;

    double operator()(int r, int c) const { return m[r * 3 + c]; }
    double& operator()(int r, int c) { return m[r * 3 + c]; }

    static Transform identity() { return Transform{}; }

    static Transform translation(double tx, double ty) {
        Transform t;
        t.m = {1, 0, tx, 0, 1, ty, 0, 0, 1};
        return t;
    }

    static Transform scale(double sx, double sy) {
        Transform t;
        t.m = {sx, 0, 0, 0, sy, 0, 0, 0, 1};
        return t;
    }

    /// Rotation by `deg` about (cx, cy), optionally recentering on (cx2, cy2).
    static Transform rotation_deg(double deg, double cx = 0, double cy = 0,
                                  double cx2 = std::nan(""), double cy2 = std::nan("")) {
        if (std::isnan(cx2)) cx2 = cx;
        if (std::isnan(cy2)) cy2 = cy;
        const double a = deg * std::numbers::pi / 180.0;
        const double c = std::cos(a), s = std::sin(a);
        Transform t;
        t.m = {c, -s, cx2 - c * cx + s * cy,
               s, c,  cy2 - s * cx - c * cy,
               0, 0,  1};
        return t;
    }

    double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) -
               m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }

    bool invertible() const { return std::abs(det()) > 1e-12; }

    Transform inverse() const {
        const double d = det();
        if (std::abs(d) <= 1e-12) throw SingularTransform("transform not invertible");
        Transform r;
        r.kind = kind;
        r.m[0] = (m[4] * m[8] - m[5] * m[7]) / d;
        r.m[1] = (m[2] * m[7] - m[1] * m[8]) / d;
        r.m[2] = (m[1] * m[5] - m[2] * m[4]) / d;
        r.m[3] = (m[5] * m[6] - m[3] * m[8]) / d;
        r.m[4] = (m[0] * m[8] - m[2] * m[6]) / d;
        r.m[5] = (m[2] * m[3] - m[0] * m[5]) / d;
        r.m[6] = (m[3] * m[7] - m[4] * m[6]) / d;
        r.m[7] = (m[1] * m[6] - m[0] * m[7]) / d;
        r.m[8] = (m[0] * m[4] - m[1] * m[3]) / d;
        if (kind == TransformKind::affine) {
            r.m[6] = 0;
            r.m[7] = 0;
            r.m[8] = 1;
        } else if (std::abs(r.m[8]) > 1e-12) {
            const double s = r.m[8];
            for (auto& v : r.m) v /= s;
        }
        return r;
    }

    /// Composition: (a * b) maps p to a(b(p)).
    friend Transform operator*(const Transform& a, const Transform& b) {
        Transform r;
        r.kind = (a.kind == TransformKind::projective || b.kind == TransformKind::projective)
                     ? TransformKind::projective
                     : TransformKind::affine;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += a.m[i * 3 + k] * b.m[k * 3 + j];
                r.m[i * 3 + j] = s;
            }
        if (r.kind == TransformKind::projective && std::abs(r.m[8]) > 1e-12) {
            const double s = r.m[8];
            for (auto& v : r.m) v /= s;
        }
        return r;
    }

    /// Applies the transform to a point; for projective transforms the result
    /// is the perspective division. Returns false if the point maps to the
    /// line at infinity.
    bool apply(double x, double y, double& ox, double& oy) const {
        const double w = m[6] * x + m[7] * y + m[8];
        if (std::abs(w) < 1e-12) return false;
        ox = (m[0] * x + m[1] * y + m[2]) / w;
        oy = (m[3] * x + m[4] * y + m[5]) / w;
        return true;
    }
};

}  // namespace unroll
