#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "unroll/estimate.hpp"

using namespace unroll;

namespace {

PointPairs apply_model(const Transform& t, const std::vector<std::array<double, 2>>& src) {
    PointPairs pp;
    for (const auto& s : src) {
        double x, y;
        REQUIRE(t.apply(s[0], s[1], x, y));
        pp.push(s[0], s[1], x, y);
    }
    return pp;
}

std::vector<std::array<double, 2>> random_points(int n, std::uint64_t seed, double span = 100) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(0, span);
    std::vector<std::array<double, 2>> pts(n);
    for (auto& p : pts) p = {d(rng), d(rng)};
    return pts;
}

void check_close(const Transform& a, const Transform& b, double tol) {
    for (int i = 0; i < 9; ++i) CHECK(a.m[i] == Catch::Approx(b.m[i]).margin(tol));
}

}  // namespace

TEST_CASE("affine_lstsq returns identity for src == dst") {
    PointPairs pp;
    pp.push(0, 0, 0, 0);
    pp.push(1, 0, 1, 0);
    pp.push(0, 1, 0, 1);
    check_close(affine_lstsq(pp), Transform::identity(), 1e-12);
}

TEST_CASE("affine_lstsq recovers a pure translation from three points") {
    PointPairs pp;
    pp.push(0, 0, 3, 2);
    pp.push(1, 0, 4, 2);
    pp.push(0, 1, 3, 3);
    check_close(affine_lstsq(pp), Transform::translation(3, 2), 1e-12);
}

TEST_CASE("affine_lstsq recovers a known affine map from ten noiseless points") {
    Transform a;
    a.m = {1.2, 0.1, 4, -0.05, 0.9, 1, 0, 0, 1};
    const PointPairs pp = apply_model(a, random_points(10, 21));
    check_close(affine_lstsq(pp), a, 1e-9);
}

TEST_CASE("affine_lstsq rejects collinear points") {
    PointPairs pp;
    for (int i = 0; i < 6; ++i) pp.push(i, 2 * i, i + 1, 2 * i);
    CHECK_THROWS_AS(affine_lstsq(pp), DegenerateConfiguration);
}

TEST_CASE("normal-equation and direct-inverse paths agree on three pairs") {
    Transform a;
    a.m = {0.95, -0.2, 7, 0.15, 1.1, -3, 0, 0, 1};
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
        const auto pts = random_points(3, seed);
        if (std::abs((pts[1][0] - pts[0][0]) * (pts[2][1] - pts[0][1]) -
                     (pts[1][1] - pts[0][1]) * (pts[2][0] - pts[0][0])) < 1.0)
            continue;  // nearly collinear draw
        const PointPairs pp = apply_model(a, pts);
        check_close(affine_lstsq(pp), affine_exact(pp), 1e-9);
    }
}

TEST_CASE("translating the targets shifts only the translation column") {
    Transform a;
    a.m = {1.05, 0.02, -2, 0.03, 0.98, 5, 0, 0, 1};
    PointPairs pp = apply_model(a, random_points(12, 33));
    const Transform base = affine_lstsq(pp);
    for (auto& d : pp.dst) {
        d[0] += 11.5;
        d[1] -= 4.25;
    }
    const Transform shifted = affine_lstsq(pp);
    CHECK(shifted(0, 2) == Catch::Approx(base(0, 2) + 11.5).margin(1e-9));
    CHECK(shifted(1, 2) == Catch::Approx(base(1, 2) - 4.25).margin(1e-9));
    CHECK(shifted(0, 0) == Catch::Approx(base(0, 0)).margin(1e-9));
    CHECK(shifted(0, 1) == Catch::Approx(base(0, 1)).margin(1e-9));
    CHECK(shifted(1, 0) == Catch::Approx(base(1, 0)).margin(1e-9));
    CHECK(shifted(1, 1) == Catch::Approx(base(1, 1)).margin(1e-9));
}

TEST_CASE("homography_dlt returns identity for src == dst") {
    PointPairs pp;
    pp.push(0, 0, 0, 0);
    pp.push(10, 0, 10, 0);
    pp.push(0, 10, 0, 10);
    pp.push(10, 10, 10, 10);
    check_close(homography_dlt(pp), Transform::identity(), 1e-9);
}

TEST_CASE("homography_dlt recovers a pure translation") {
    PointPairs pp;
    pp.push(0, 0, 5, 0);
    pp.push(10, 0, 15, 0);
    pp.push(0, 10, 5, 10);
    pp.push(10, 10, 15, 10);
    check_close(homography_dlt(pp), Transform::translation(5, 0), 1e-9);
}

TEST_CASE("homography_dlt recovers a known projective map") {
    Transform h;
    h.kind = TransformKind::projective;
    h.m = {1.1, 0.05, 3, -0.03, 0.95, 2, 1e-3, -5e-4, 1};
    const PointPairs pp = apply_model(h, random_points(8, 55, 50));
    check_close(homography_dlt(pp), h, 1e-6);
}

TEST_CASE("homography_dlt rejects a sample with three collinear points") {
    PointPairs pp;
    pp.push(0, 0, 0, 0);
    pp.push(5, 0, 5, 0);
    pp.push(10, 0, 10, 0);  // collinear with the previous two
    pp.push(0, 10, 0, 10);
    CHECK_THROWS_AS(homography_dlt(pp), DegenerateConfiguration);
}

TEST_CASE("robust_fit recovers an exact translation with every pair flagged inlier") {
    const auto pts = random_points(20, 77);
    PointPairs pp;
    for (const auto& p : pts) pp.push(p[0], p[1], p[0] + 7, p[1]);
    for (auto method : {RobustMethod::ransac, RobustMethod::lmeds}) {
        RobustParams rp;
        rp.method = method;
        rp.seed = 5;
        const RobustFit fit = robust_fit(pp, TransformKind::affine, rp);
        CHECK(fit.inlier_count() == 20);
        CHECK(fit.transform(0, 2) == Catch::Approx(7.0).margin(1e-6));
        CHECK(fit.transform(1, 2) == Catch::Approx(0.0).margin(1e-6));
    }
}

TEST_CASE("RANSAC survives 30% planted outliers") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> coord(0, 200);
    PointPairs pp;
    std::vector<bool> truth;
    for (int i = 0; i < 70; ++i) {
        const double x = coord(rng), y = coord(rng);
        pp.push(x, y, x + 7, y);
        truth.push_back(true);
    }
    for (int i = 0; i < 30; ++i) {
        pp.push(coord(rng), coord(rng), coord(rng), coord(rng));
        truth.push_back(false);
    }
    RobustParams rp;
    rp.seed = 99;
    const RobustFit fit = robust_fit(pp, TransformKind::affine, rp);
    CHECK(std::abs(fit.transform(0, 2) - 7.0) < 0.5);
    CHECK(std::abs(fit.transform(1, 2) - 0.0) < 0.5);
    // All planted inliers flagged; flagged set residuals bounded by the
    // threshold by construction.
    for (int i = 0; i < 70; ++i) CHECK(fit.inliers[i] == 1);
    for (std::size_t i = 0; i < pp.size(); ++i)
        if (fit.inliers[i])
            CHECK(reprojection_error(fit.transform, pp.src[i], pp.dst[i]) <
                  rp.inlier_thresh);
}

TEST_CASE("LMEDS keeps the flagged-inlier median residual small at 40% contamination") {
    std::mt19937_64 rng(321);
    std::uniform_real_distribution<double> coord(0, 200);
    PointPairs pp;
    for (int i = 0; i < 60; ++i) {
        const double x = coord(rng), y = coord(rng);
        pp.push(x, y, x + 7, y);
    }
    for (int i = 0; i < 40; ++i) pp.push(coord(rng), coord(rng), coord(rng), coord(rng));
    RobustParams rp;
    rp.method = RobustMethod::lmeds;
    rp.seed = 7;
    const RobustFit fit = robust_fit(pp, TransformKind::affine, rp);
    std::vector<double> res;
    for (std::size_t i = 0; i < pp.size(); ++i)
        if (fit.inliers[i])
            res.push_back(reprojection_error(fit.transform, pp.src[i], pp.dst[i]));
    REQUIRE(res.size() >= 4);
    std::sort(res.begin(), res.end());
    CHECK(res[res.size() / 2] < 1.0);
}

TEST_CASE("robust_fit is bitwise reproducible for a fixed seed") {
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> coord(0, 100);
    PointPairs pp;
    for (int i = 0; i < 40; ++i) {
        const double x = coord(rng), y = coord(rng);
        pp.push(x, y, x + 3 + (i % 5 == 0 ? 30 : 0), y - 2);
    }
    RobustParams rp;
    rp.seed = 2024;
    for (auto kind : {TransformKind::affine, TransformKind::projective}) {
        const RobustFit a = robust_fit(pp, kind, rp);
        const RobustFit b = robust_fit(pp, kind, rp);
        CHECK(a.transform.m == b.transform.m);
        CHECK(a.inliers == b.inliers);
    }
}

TEST_CASE("robust_fit reports degenerate input") {
    PointPairs pp;
    for (int i = 0; i < 10; ++i) pp.push(i, 0, i, 5);  // all collinear
    RobustParams rp;
    CHECK_THROWS_AS(robust_fit(pp, TransformKind::affine, rp), Error);
}
