// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The ndtlos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <algorithm>
#include <map>
#include <random>

#include "doctest.h"
#include "ndtlos/geometry.hpp"

using namespace ndt;
using namespace ndt::geometry;

namespace {

Scene random_scene(std::mt19937_64& rng, int boxes) {
    std::uniform_real_distribution<double> pos(0.0, 50.0), side(2.0, 10.0), height(3.0, 30.0);
    Scene s;
    s.area = {0.0, 0.0, 60.0, 60.0};
    s.bs_position = {30.0, 30.0, 25.0};
    for (int i = 0; i < boxes; ++i) {
        const double x = pos(rng), y = pos(rng);
        s.buildings.push_back({{x, y, 0.0}, {x + side(rng), y + side(rng), height(rng)}});
    }
    return s;
}

Vec3 random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> xy(-5.0, 65.0), z(0.5, 35.0);
    return {xy(rng), xy(rng), z(rng)};
}

double path_length(const TracedPath& p) {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) len += norm(p.vertices[i + 1] - p.vertices[i]);
    return len;
}

// Replays the stored reflection sequence as a ray from tx.
Vec3 replay(const TracedPath& p, const std::vector<Face>& faces) {
    Vec3 pos = p.vertices.front();
    Vec3 dir = p.vertices[1] - pos;
    dir = (1.0 / norm(dir)) * dir;
    double travelled = 0.0;
    for (int fi : p.faces) {
        const Face& f = faces[static_cast<std::size_t>(fi)];
        const double t = (f.coord - pos[f.axis]) / dir[f.axis];
        pos = pos + t * dir;
        travelled += t;
        dir[f.axis] = -dir[f.axis];
    }
    return pos + (p.component.delay * kSpeedOfLight - travelled) * dir;
}

}  // namespace

TEST_CASE("validate rejects malformed scenes") {
    Scene s;
    s.bs_position = {0, 0, 10};
    CHECK_NOTHROW(validate(s));

    Scene flat = s;
    flat.buildings.push_back({{0, 0, 0}, {5, 5, 0}});
    CHECK_THROWS_AS(validate(flat), InvalidInput);

    Scene buried = s;
    buried.bs_position.z = -1.0;
    CHECK_THROWS_AS(validate(buried), InvalidInput);

    Scene lossless = s;
    lossless.reflection_coeff = 1.0;
    CHECK_NOTHROW(validate(lossless));
    lossless.reflection_coeff = 0.0;
    CHECK_THROWS_AS(validate(lossless), InvalidInput);
    lossless.reflection_coeff = 1.2;
    CHECK_THROWS_AS(validate(lossless), InvalidInput);
}

TEST_CASE("occlusion is reciprocal") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Scene s = random_scene(rng, 6);
        const Vec3 a = random_point(rng), b = random_point(rng);
        CHECK(los_test(s, a, b) == los_test(s, b, a));
    }
}

TEST_CASE("adding a building never clears a blocked link") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        Scene s = random_scene(rng, 4);
        const Vec3 a = random_point(rng), b = random_point(rng);
        const bool before = los_test(s, a, b);
        Scene more = random_scene(rng, 1);
        s.buildings.push_back(more.buildings.front());
        if (!before) CHECK_FALSE(los_test(s, a, b));
    }
}

TEST_CASE("grazing a face does not block") {
    Scene s;
    s.bs_position = {0, 0, 10};
    s.buildings.push_back({{0, 0, 0}, {10, 10, 10}});
    CHECK(los_test(s, {-1, 0, 5}, {11, 0, 5}));
    CHECK_FALSE(los_test(s, {-1, 5, 5}, {11, 5, 5}));
    CHECK(segment_blocked_by(s.buildings[0], {-1, 5, 5}, {11, 5, 5}));
}

TEST_CASE("traced paths are physically consistent") {
    std::mt19937_64 rng(13);
    std::size_t total = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const Scene s = random_scene(rng, 5);
        const std::vector<Face> faces = reflecting_faces(s);
        Vec3 ue = random_point(rng);
        ue.z = 1.5;
        const bool inside = std::any_of(s.buildings.begin(), s.buildings.end(), [&](const Box& b) {
            return ue.x > b.lo.x && ue.x < b.hi.x && ue.y > b.lo.y && ue.y < b.hi.y;
        });
        if (inside) continue;
        const auto paths = trace_paths_detailed(s, ue, s.bs_position);
        for (const TracedPath& p : paths) {
            ++total;
            const PathComponent& c = p.component;
            CHECK(c.gain > 0.0);
            CHECK(c.delay > 0.0);
            CHECK(c.bounces <= s.max_bounces);
            CHECK(c.azimuth > -kPi);
            CHECK(c.azimuth <= kPi);
            CHECK(std::abs(c.elevation) <= kPi / 2);
            CHECK(p.faces.size() == static_cast<std::size_t>(c.bounces));
            CHECK(path_length(p) == doctest::Approx(c.delay * kSpeedOfLight).epsilon(1e-9));
            CHECK(norm(replay(p, faces) - s.bs_position) < 1e-6);
        }
    }
    CHECK(total > 50);
}

TEST_CASE("gain times length depends only on the bounce count") {
    std::mt19937_64 rng(14);
    std::map<int, std::pair<double, double>> range;  // bounces -> (min, max) of gain * length
    for (int trial = 0; trial < 20; ++trial) {
        const Scene s = random_scene(rng, 5);
        Vec3 ue = random_point(rng);
        ue.z = 1.5;
        for (const TracedPath& p : trace_paths_detailed(s, ue, s.bs_position)) {
            const double v = p.component.gain * path_length(p);
            auto [it, fresh] = range.try_emplace(p.component.bounces, v, v);
            it->second.first = std::min(it->second.first, v);
            it->second.second = std::max(it->second.second, v);
        }
    }
    REQUIRE(range.size() >= 2);
    double prev_min = INFINITY;
    for (const auto& [bounces, mm] : range) {
        CHECK(mm.second == doctest::Approx(mm.first).epsilon(1e-12));
        CHECK(mm.second <= prev_min);
        prev_min = mm.first;
    }
}

TEST_CASE("LoS flag matches the direct path") {
    std::mt19937_64 rng(15);
    int los = 0, nlos = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const Scene s = random_scene(rng, 6);
        Vec3 ue = random_point(rng);
        ue.z = 1.5;
        const MultipathSet set = trace_paths(s, ue, s.bs_position);
        if (set.paths.empty()) continue;
        const auto direct = std::count_if(set.paths.begin(), set.paths.end(),
                                          [](const PathComponent& p) { return p.bounces == 0; });
        const double first = std::min_element(set.paths.begin(), set.paths.end(), [](const auto& a, const auto& b) {
                                 return a.delay < b.delay;
                             })->delay;
        CHECK(set.is_los == los_test(s, ue, s.bs_position));
        if (set.is_los) {
            ++los;
            CHECK(direct == 1);
            const auto it = std::find_if(set.paths.begin(), set.paths.end(),
                                         [](const PathComponent& p) { return p.bounces == 0; });
            CHECK(it->delay == first);
        } else {
            ++nlos;
            CHECK(direct == 0);
        }
    }
    CHECK(los > 0);
    CHECK(nlos > 0);
}

TEST_CASE("arrival angles follow the bearing") {
    double az = 0.0, el = 0.0;
    arrival_angles({0, 1, 0}, 0.0, az, el);
    CHECK(az == doctest::Approx(0.0));
    CHECK(el == doctest::Approx(0.0));
    arrival_angles({1, 0, 0}, 0.0, az, el);
    CHECK(az == doctest::Approx(kPi / 2));
    arrival_angles({1, -1, 0}, 3 * kPi / 4, az, el);
    CHECK(az == doctest::Approx(0.0).epsilon(1e-12));
    arrival_angles({0, 1, 1}, 0.0, az, el);
    CHECK(el == doctest::Approx(kPi / 4));
}

TEST_CASE("tracing a degenerate link is rejected") {
    Scene s;
    s.bs_position = {0, 0, 10};
    CHECK_THROWS_AS(trace_paths(s, {1, 1, 1}, {1, 1, 1}), InvalidInput);
}

TEST_CASE("UE grid skips building interiors") {
    Scene s;
    s.area = {0, 0, 10, 10};
    s.bs_position = {0, 0, 20};
    s.buildings.push_back({{0, 0, 0}, {5, 5, 8}});
    const auto grid = ue_grid(s, 1.0, 1.5);
    CHECK(grid.size() == 75);
    CHECK(grid.front().x == doctest::Approx(5.5));
    CHECK(grid.front().y == doctest::Approx(0.5));
    CHECK(grid.front().z == doctest::Approx(1.5));
    CHECK_THROWS_AS(ue_grid(s, 0.0, 1.5), InvalidInput);
}

TEST_CASE("toy city is seeded and puts the BS on a rooftop corner") {
    const Scene a = make_toy_city({}, 4), b = make_toy_city({}, 4), c = make_toy_city({}, 5);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    CHECK(a.bs_position.z == doctest::Approx(CityParams{}.bs_height));
    CHECK(a.area.x0 <= a.bs_position.x);
    CHECK(a.area.y1 >= a.bs_position.y);
    CityParams whole;
    whole.frontal_margin = -1.0;
    const Scene w = make_toy_city(whole, 4);
    CHECK(w.area == Area{0, 0, whole.size, whole.size});
}

TEST_CASE("scene text round-trips") {
    const Scene s = make_toy_city({}, 9);
    CHECK(scene_from_text(scene_to_text(s)) == s);
    CHECK_THROWS_AS(scene_from_text(""), DataError);
    CHECK_THROWS_AS(scene_from_text("garbage 1 2 3\n"), DataError);
}
