#include <doctest.h>

#include <cmath>
#include <random>

#include "core/errors.hpp"
#include "core/kinematics.hpp"
#include "core/recognition.hpp"
#include "core/segmentation.hpp"
#include "core/synth.hpp"
#include "support/helpers.hpp"

using namespace nsaqa;

namespace {
constexpr double kPi = 3.14159265358979323846;

Pose inverted_pose(Vec2 pelvis, double torso = 50.0) {
    Pose p = testing::standing_pose(pelvis, torso);
    // flip everything upside down around the pelvis
    for (auto& joint : p.joints) joint.pt.y = 2.0 * pelvis.y - joint.pt.y;
    return p;
}

} // namespace

TEST_CASE("detect_armstand distinguishes upright from inverted takeoffs") {
    AnalyzerConfig cfg;
    auto s = testing::blank_stream(10);
    for (int i = 0; i < 10; ++i)
        s.frames[static_cast<size_t>(i)].pose = testing::standing_pose({300, 300});
    CHECK(detect_armstand(s, 10, cfg) == false);

    for (int i = 0; i < 10; ++i)
        s.frames[static_cast<size_t>(i)].pose = inverted_pose({300, 300});
    CHECK(detect_armstand(s, 10, cfg) == true);

    auto empty = testing::blank_stream(4);
    empty.frames[3].pose = testing::standing_pose({300, 300});
    CHECK_THROWS_AS(detect_armstand(empty, 2, cfg), Error);
}

TEST_CASE("somersault counter: torso held upright never counts") {
    AnalyzerConfig cfg;
    std::vector<std::optional<Vec2>> torsos(40, Vec2{0.0, 1.0});
    const auto s = testing::stream_from_torso_vectors(torsos);
    CHECK(count_half_somersaults(s, 0, false, cfg) == 0);
}

TEST_CASE("somersault counter matches the synthetic ground truth") {
    AnalyzerConfig cfg;
    for (int k : {1, 2, 5, 7, 9}) {
        synth::ScriptParams p;
        p.descriptor = {false, RotationType::forward, k, 0,
                        k > 2 ? BodyPosition::tuck : BodyPosition::pike};
        const auto [stream, gt] = synth::generate(synth::build_script(p), 77);
        const std::int64_t takeoff_end = gt.phases.takeoff.end + 1;
        CHECK(count_half_somersaults(stream, takeoff_end, false, cfg) == k);
    }
}

TEST_CASE("somersault counter is a faithful transcription of its pseudocode") {
    AnalyzerConfig cfg;
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> angle(-4000.0, 4000.0);
    std::uniform_real_distribution<double> len(5.0, 120.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> nframes(2, 120);

    for (int trial = 0; trial < 600; ++trial) {
        const int n = nframes(rng);
        std::vector<std::optional<Vec2>> torsos;
        torsos.reserve(static_cast<size_t>(n));
        for (int f = 0; f < n; ++f) {
            if (u(rng) < 0.12) {
                torsos.push_back(std::nullopt);
                continue;
            }
            const double a = angle(rng) * kPi / 180.0;
            const double l = len(rng);
            torsos.push_back(Vec2{l * std::cos(a), l * std::sin(a)});
        }
        const std::int64_t takeoff_end = std::uniform_int_distribution<std::int64_t>(
            0, static_cast<std::int64_t>(n) / 3)(rng);
        const bool armstand = u(rng) < 0.5;
        const int expected =
            testing::somersault_counter_reference(torsos, takeoff_end, armstand);

        const auto s = testing::stream_from_torso_vectors(torsos);
        bool any_usable = false;
        for (std::int64_t f = takeoff_end; f < n; ++f)
            if (torsos[static_cast<size_t>(f)]) any_usable = true;
        if (!any_usable) {
            CHECK_THROWS_AS(count_half_somersaults(s, takeoff_end, armstand, cfg), Error);
            continue;
        }
        CHECK(count_half_somersaults(s, takeoff_end, armstand, cfg) == expected);
    }
}

TEST_CASE("twist petals count the synthetic half-twists") {
    AnalyzerConfig cfg;
    for (int t : {0, 1, 2, 4, 6, 8}) {
        synth::ScriptParams p;
        p.descriptor = {false, RotationType::forward, 3, t,
                        t >= 3 ? BodyPosition::free_position
                               : (t > 0 ? BodyPosition::free_position : BodyPosition::pike)};
        const auto [stream, gt] = synth::generate(synth::build_script(p), 3);
        CHECK(count_half_twists(stream, gt.phases.takeoff.end + 1, cfg) == t);
    }
}

TEST_CASE("rotation types classify exactly and survive mirroring") {
    AnalyzerConfig cfg;
    for (bool armstand : {false, true}) {
        for (int rt = 0; rt < 4; ++rt) {
            synth::ScriptParams p;
            p.descriptor = {armstand, static_cast<RotationType>(rt), 3, 0,
                            BodyPosition::tuck};
            p.facing = Facing::right;
            const auto [stream, gt] = synth::generate(synth::build_script(p), 5);
            const DiveDescriptor d = recognize(stream, cfg);
            CHECK(d.rotation_type == p.descriptor.rotation_type);
            CHECK(d.armstand == armstand);

            const DiveDescriptor mirrored = recognize(testing::mirror_stream(stream), cfg);
            CHECK(mirrored == d);
        }
    }
}

TEST_CASE("ambiguous facing is reported, not guessed") {
    AnalyzerConfig cfg;
    // stance poses with a perfectly vertical head: lean is zero
    auto s = testing::blank_stream(40);
    for (int i = 0; i < 30; ++i)
        s.frames[static_cast<size_t>(i)].pose = testing::standing_pose({300, 260});
    for (int i = 30; i < 40; ++i) {
        Pose p = testing::standing_pose({300.0 + (i - 29) * 40.0, 260.0});
        s.frames[static_cast<size_t>(i)].pose = p;
    }
    CHECK_THROWS_AS(classify_rotation_type(s, 31, false, cfg), Error);
    try {
        classify_rotation_type(s, 31, false, cfg);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::AmbiguousFacing);
    }
}

TEST_CASE("position classification thresholds") {
    AnalyzerConfig cfg;
    auto make_range_stream = [&](double hip_deg, double knee_deg) {
        auto s = testing::blank_stream(20);
        for (int i = 0; i < 20; ++i) {
            // place the leg chains at the requested hip/knee angles, both sides
            const double t = 50.0;
            auto leg = [&](JointId hip, JointId knee, JointId ankle, double sign) {
                const Vec2 hip_pt{400.0 + sign * 0.12 * t, 300.0};
                const double hip_rad = hip_deg * kPi / 180.0;
                // shoulder is straight up (-y); rotate the thigh hip_deg away
                const Vec2 thigh_dir{std::sin(hip_rad), -std::cos(hip_rad)};
                const Vec2 knee_pt = hip_pt + 0.95 * t * thigh_dir;
                const double shank_rad = (180.0 - knee_deg) * kPi / 180.0;
                const Vec2 shank_dir{
                    thigh_dir.x * std::cos(shank_rad) + thigh_dir.y * std::sin(shank_rad),
                    -thigh_dir.x * std::sin(shank_rad) + thigh_dir.y * std::cos(shank_rad)};
                const Vec2 ankle_pt = knee_pt + 0.9 * t * shank_dir;
                s.frames[static_cast<size_t>(i)].pose->joints[static_cast<int>(hip)] =
                    Joint{hip_pt, 1.0};
                s.frames[static_cast<size_t>(i)].pose->joints[static_cast<int>(knee)] =
                    Joint{knee_pt, 1.0};
                s.frames[static_cast<size_t>(i)].pose->joints[static_cast<int>(ankle)] =
                    Joint{ankle_pt, 1.0};
            };
            s.frames[static_cast<size_t>(i)].pose = testing::standing_pose({400, 300}, t);
            leg(JointId::l_hip, JointId::l_knee, JointId::l_ankle, 1.0);
            leg(JointId::r_hip, JointId::r_knee, JointId::r_ankle, -1.0);
        }
        return s;
    };

    CHECK(classify_position(make_range_stream(180.0, 180.0), {0, 19}, cfg) ==
          BodyPosition::straight);
    CHECK(classify_position(make_range_stream(50.0, 60.0), {0, 19}, cfg) ==
          BodyPosition::tuck);
    CHECK(classify_position(make_range_stream(70.0, 175.0), {0, 19}, cfg) ==
          BodyPosition::pike);
    CHECK(classify_position(make_range_stream(135.0, 140.0), {0, 19}, cfg) ==
          BodyPosition::free_position);
}

TEST_CASE("full recognition is scale invariant and deterministic") {
    AnalyzerConfig cfg;
    const auto corpus = synth::sample_corpus(12, 808, 1.0, 0.01);
    for (const auto& [stream, gt] : corpus) {
        const DiveDescriptor d1 = recognize(stream, cfg);
        const DiveDescriptor d2 = recognize(stream, cfg);
        CHECK(d1 == d2);
        CHECK(recognize(testing::scale_stream(stream, 2.5), cfg) == d1);
        CHECK(recognize(testing::mirror_stream(stream), cfg) == d1);
    }
}
