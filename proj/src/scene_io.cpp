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

// Scene description format, version 1. One directive per line, '#' starts a
// comment, lengths in meters:
//
//   ndtlos-scene 1
//   area <x0> <y0> <x1> <y1>
//   ground_z <z>
//   bs_position <x> <y> <z>
//   bs_bearing_rad <radians clockwise from north>
//   reflection_coeff <value in (0,1]>
//   max_bounces <n>
//   building <x0> <y0> <z0> <x1> <y1> <z1>     (repeated)

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ndtlos/geometry.hpp"

namespace ndt::geometry {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string scene_to_text(const Scene& s) {
    std::ostringstream out;
    out << "ndtlos-scene 1\n";
    out << "area " << fmt(s.area.x0) << ' ' << fmt(s.area.y0) << ' ' << fmt(s.area.x1) << ' '
        << fmt(s.area.y1) << '\n';
    out << "ground_z " << fmt(s.ground_z) << '\n';
    out << "bs_position " << fmt(s.bs_position.x) << ' ' << fmt(s.bs_position.y) << ' '
        << fmt(s.bs_position.z) << '\n';
    out << "bs_bearing_rad " << fmt(s.bs_bearing) << '\n';
    out << "reflection_coeff " << fmt(s.reflection_coeff) << '\n';
    out << "max_bounces " << s.max_bounces << '\n';
    for (const Box& b : s.buildings) {
        out << "building " << fmt(b.lo.x) << ' ' << fmt(b.lo.y) << ' ' << fmt(b.lo.z) << ' ' << fmt(b.hi.x)
            << ' ' << fmt(b.hi.y) << ' ' << fmt(b.hi.z) << '\n';
    }
    return out.str();
}

Scene scene_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Scene s;
    bool header = false;
    int lineno = 0;
    auto fail = [&](const std::string& what) {
        throw DataError("scene line " + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (!header) {
            int version = 0;
            if (key != "ndtlos-scene" || !(ls >> version)) fail("missing 'ndtlos-scene <version>' header");
            if (version != 1) fail("unsupported scene version " + std::to_string(version));
            header = true;
            continue;
        }
        bool ok = true;
        if (key == "area") {
            ok = static_cast<bool>(ls >> s.area.x0 >> s.area.y0 >> s.area.x1 >> s.area.y1);
        } else if (key == "ground_z") {
            ok = static_cast<bool>(ls >> s.ground_z);
        } else if (key == "bs_position") {
            ok = static_cast<bool>(ls >> s.bs_position.x >> s.bs_position.y >> s.bs_position.z);
        } else if (key == "bs_bearing_rad") {
            ok = static_cast<bool>(ls >> s.bs_bearing);
        } else if (key == "reflection_coeff") {
            ok = static_cast<bool>(ls >> s.reflection_coeff);
        } else if (key == "max_bounces") {
            ok = static_cast<bool>(ls >> s.max_bounces);
        } else if (key == "building") {
            Box b;
            ok = static_cast<bool>(ls >> b.lo.x >> b.lo.y >> b.lo.z >> b.hi.x >> b.hi.y >> b.hi.z);
            s.buildings.push_back(b);
        } else {
            fail("unknown directive '" + key + "'");
        }
        if (!ok) fail("malformed '" + key + "' directive");
    }
    if (!header) throw DataError("scene: empty description");
    try {
        validate(s);
    } catch (const InvalidInput& e) {
        throw DataError(std::string("scene: ") + e.what());
    }
    return s;
}

Scene load_scene(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot read scene file " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return scene_from_text(buf.str());
}

void save_scene(const Scene& scene, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write scene file " + path);
    f << scene_to_text(scene);
}

}  // namespace ndt::geometry
