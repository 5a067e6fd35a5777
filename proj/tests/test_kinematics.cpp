#include <doctest.h>

#include <cmath>
#include <random>

#include "core/errors.hpp"
#include "core/kinematics.hpp"
#include "core/synth.hpp"
#include "support/helpers.hpp"

using namespace nsaqa;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("angle_between handles the axis cases") {
    CHECK(angle_between({0, 1}, {0, -1}) == doctest::Approx(180.0));
    CHECK(angle_between({0, 1}, {0, 1}) == doctest::Approx(0.0));
    CHECK(angle_between({1, 0}, {1, 1}) == doctest::Approx(45.0));
    CHECK_THROWS_AS(angle_between({0, 0}, {1, 0}), Error);
}

TEST_CASE("angle_between is symmetric and scale invariant") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int i = 0; i < 2000; ++i) {
        Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
        if (norm(a) < 1e-6 || norm(b) < 1e-6) continue;
        const double ab = angle_between(a, b);
        CHECK(ab == doctest::Approx(angle_between(b, a)).epsilon(1e-12));
        const double s = scale(rng);
        CHECK(angle_between(s * a, b) == doctest::Approx(ab).epsilon(1e-9));
        CHECK(ab >= 0.0);
        CHECK(ab <= 180.0);
    }
}

TEST_CASE("joint_angle basics and degenerate input") {
    CHECK(joint_angle({0, 2}, {0, 1}, {0, 0}) == doctest::Approx(180.0)); // straight limb
    CHECK(joint_angle({0, 1}, {0, 0}, {1, 0}) == doctest::Approx(90.0));
    CHECK_THROWS_AS(joint_angle({1, 1}, {1, 1}, {0, 0}), Error);
}

TEST_CASE("joint_angle agrees with a law-of-cosines oracle on random triples") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    int checked = 0;
    while (checked < 2000) {
        Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
        const double ab = std::hypot(a.x - b.x, a.y - b.y);
        const double cb = std::hypot(c.x - b.x, c.y - b.y);
        const double ac = std::hypot(a.x - c.x, a.y - c.y);
        if (ab < 1e-3 || cb < 1e-3) continue;
        double cosv = (ab * ab + cb * cb - ac * ac) / (2.0 * ab * cb);
        cosv = std::clamp(cosv, -1.0, 1.0);
        const double expected = std::acos(cosv) * 180.0 / kPi;
        CHECK(joint_angle(a, b, c) == doctest::Approx(expected).epsilon(1e-7));
        ++checked;
    }
}

TEST_CASE("joint_angle is invariant under rigid rotation and scaling") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> sc(0.1, 10.0);
    for (int i = 0; i < 1000; ++i) {
        Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
        if (std::hypot(a.x - b.x, a.y - b.y) < 1e-3 ||
            std::hypot(c.x - b.x, c.y - b.y) < 1e-3)
            continue;
        const double base = joint_angle(a, b, c);
        const double phi = ang(rng);
        const double k = sc(rng);
        auto xf = [&](Vec2 v) {
            return Vec2{k * (v.x * std::cos(phi) - v.y * std::sin(phi)),
                        k * (v.x * std::sin(phi) + v.y * std::cos(phi))};
        };
        CHECK(joint_angle(xf(a), xf(b), xf(c)) == doctest::Approx(base).epsilon(1e-8));
    }
}

TEST_CASE("accumulate_rotation on analytic sequences") {
    SUBCASE("constant sequence accumulates nothing") {
        std::vector<Vec2> vs(20, Vec2{3.0, 4.0});
        CHECK(accumulate_rotation(vs) == doctest::Approx(0.0));
    }
    SUBCASE("a full turn in 10-degree steps") {
        std::vector<Vec2> vs;
        for (int i = 0; i <= 36; ++i) {
            const double a = i * 10.0 * kPi / 180.0;
            vs.push_back({std::cos(a), std::sin(a)});
        }
        CHECK(accumulate_rotation(vs) == doctest::Approx(360.0).epsilon(1e-9));
    }
    SUBCASE("steps of 150 degrees and more are rejected") {
        std::vector<Vec2> vs{{1, 0}, {-1, 0.2}};
        CHECK_THROWS_AS(accumulate_rotation(vs), Error);
    }
    SUBCASE("zero vectors are rejected") {
        std::vector<Vec2> vs{{1, 0}, {0, 0}};
        CHECK_THROWS_AS(accumulate_rotation(vs), Error);
    }
}

TEST_CASE("accumulate_rotation reversal and refinement properties") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> step(-100.0, 100.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> angles{0.0};
        for (int i = 0; i < 40; ++i) angles.push_back(angles.back() + step(rng));
        std::vector<Vec2> vs;
        for (double a : angles)
            vs.push_back({std::cos(a * kPi / 180.0), std::sin(a * kPi / 180.0)});

        const double total = accumulate_rotation(vs);
        std::vector<Vec2> rev(vs.rbegin(), vs.rend());
        CHECK(accumulate_rotation(rev) == doctest::Approx(-total).epsilon(1e-9));

        // refinement: inserting midpoints never changes the total
        std::vector<Vec2> fine;
        for (size_t i = 0; i + 1 < angles.size(); ++i) {
            const double mid = 0.5 * (angles[i] + angles[i + 1]);
            fine.push_back(vs[i]);
            fine.push_back({std::cos(mid * kPi / 180.0), std::sin(mid * kPi / 180.0)});
        }
        fine.push_back(vs.back());
        CHECK(accumulate_rotation(fine) == doctest::Approx(total).epsilon(1e-9));
    }
}

TEST_CASE("torso_length_reference takes the median over usable frames") {
    AnalyzerConfig cfg;
    SUBCASE("identical frames") {
        auto s = testing::blank_stream(4);
        for (auto& f : s.frames) f.pose = testing::standing_pose({400, 300}, 50.0);
        CHECK(torso_length_reference(s, cfg) == doctest::Approx(50.0));
    }
    SUBCASE("median of distinct lengths") {
        auto s = testing::blank_stream(3);
        int i = 0;
        for (double len : {40.0, 50.0, 60.0})
            s.frames[static_cast<size_t>(i++)].pose = testing::standing_pose({400, 300}, len);
        CHECK(torso_length_reference(s, cfg) == doctest::Approx(50.0));
    }
    SUBCASE("no usable pose") {
        auto s = testing::blank_stream(3);
        CHECK_THROWS_AS(torso_length_reference(s, cfg), Error);
    }
    SUBCASE("low-confidence joints are ignored") {
        auto s = testing::blank_stream(2);
        Pose p = testing::standing_pose({400, 300}, 80.0);
        p[JointId::pelvis].confidence = 0.05;
        s.frames[0].pose = p;
        s.frames[1].pose = testing::standing_pose({400, 300}, 44.0);
        CHECK(torso_length_reference(s, cfg) == doctest::Approx(44.0));
    }
}

TEST_CASE("torso reference recovers the generator scale") {
    AnalyzerConfig cfg;
    for (std::uint64_t i = 0; i < 10; ++i) {
        const auto [clean, gt] = nsaqa::synth::sample_one(55, static_cast<std::int64_t>(i));
        CHECK(torso_length_reference(clean, cfg) == doctest::Approx(gt.torso_px).epsilon(0.01));
        // pixel noise biases vector norms slightly upward
        const auto [noisy, gt2] =
            nsaqa::synth::sample_one(55, static_cast<std::int64_t>(i), 2.0);
        CHECK(torso_length_reference(noisy, cfg) ==
              doctest::Approx(gt2.torso_px).epsilon(0.025));
    }
}
