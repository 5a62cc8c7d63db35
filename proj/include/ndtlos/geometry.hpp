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

#ifndef NDTLOS_GEOMETRY_HPP
#define NDTLOS_GEOMETRY_HPP

#include <string>
#include <vector>

#include "ndtlos/common.hpp"

namespace ndt::geometry {

// Axis-aligned building box, meters.
struct Box {
    Vec3 lo;
    Vec3 hi;

    friend bool operator==(const Box&, const Box&) = default;
};

// Horizontal extent of the scene used for the UE grid.
struct Area {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    friend bool operator==(const Area&, const Area&) = default;
};

struct Scene {
    std::vector<Box> buildings;
    Area area;
    double ground_z = 0.0;
    Vec3 bs_position;
    double bs_bearing = 0.0;  // radians clockwise from north (+y)
    double reflection_coeff = 0.6;
    int max_bounces = 2;

    friend bool operator==(const Scene&, const Scene&) = default;
};

// Throws InvalidInput when a box has non-positive extent, the BS is not above
// ground, or the reflection coefficient is outside (0, 1].
void validate(const Scene& scene);

struct PathComponent {
    double gain = 0.0;       // linear amplitude
    double delay = 0.0;      // seconds
    double azimuth = 0.0;    // radians, BS-local, (-pi, pi]
    double elevation = 0.0;  // radians, [-pi/2, pi/2]
    int bounces = 0;

    friend bool operator==(const PathComponent&, const PathComponent&) = default;
};

struct MultipathSet {
    std::vector<PathComponent> paths;
    bool is_los = false;
    Vec3 ue_position;
    // Set for sets recovered from channel estimates: bounce counts are then
    // unknown and the LoS/bounce invariant does not apply.
    bool estimated = false;

    friend bool operator==(const MultipathSet&, const MultipathSet&) = default;
};

// A traced path together with its interaction points (tx, reflections..., rx)
// and the index of each reflecting face.
struct TracedPath {
    PathComponent component;
    std::vector<Vec3> vertices;
    std::vector<int> faces;
};

// Reflecting planar surface: a box face or the infinite ground plane.
struct Face {
    int axis = 2;         // plane normal axis
    double coord = 0.0;   // plane position along axis
    int normal_sign = 1;  // outward normal direction (+1 / -1)
    double lo[2] = {0.0, 0.0};  // extent on the two other axes (ascending order)
    double hi[2] = {0.0, 0.0};
    bool infinite = false;
    int box = -1;  // owning building, -1 for ground
};

std::vector<Face> reflecting_faces(const Scene& scene);

// True iff the open segment a->b misses the interior of every building.
// Grazing contact with a face does not block.
bool los_test(const Scene& scene, Vec3 tx, Vec3 rx);

// Same predicate for a single box; exposed for the face-visibility checks.
bool segment_blocked_by(const Box& box, Vec3 a, Vec3 b);

// BS-local arrival angles of direction `dir` (pointing from the BS toward the
// incoming wave) for an array whose boresight has the given bearing.
void arrival_angles(Vec3 dir, double bearing, double& azimuth, double& elevation);

// Image-method specular tracing up to scene.max_bounces. Angles are evaluated
// at rx, which is taken to be the BS.
MultipathSet trace_paths(const Scene& scene, Vec3 tx, Vec3 rx, double carrier_hz = 28e9);
std::vector<TracedPath> trace_paths_detailed(const Scene& scene, Vec3 tx, Vec3 rx,
                                             double carrier_hz = 28e9);

// Cell centers over scene.area, row-major (y outer, x inner), excluding
// positions inside buildings.
std::vector<Vec3> ue_grid(const Scene& scene, double cell_size, double ue_height);

// Procedural box city with the BS on the corner of a building.
struct CityParams {
    double size = 110.0;        // square side, meters
    double block = 12.0;        // building footprint side
    double street = 8.0;        // street width
    double min_height = 15.0;
    double max_height = 40.0;
    double fill_probability = 0.75;
    double bs_height = 21.7;
    double bs_bearing_deg = 135.0;
    double reflection_coeff = 0.6;
    int max_bounces = 2;
    // UE area is clipped to the quadrant the base station faces, widened by
    // this margin. Negative keeps the whole square.
    double frontal_margin = 4.0;
};
Scene make_toy_city(const CityParams& params, std::uint64_t seed);

// Versioned text scene description.
std::string scene_to_text(const Scene& scene);
Scene scene_from_text(const std::string& text);
Scene load_scene(const std::string& path);
void save_scene(const Scene& scene, const std::string& path);

}  // namespace ndt::geometry

#endif  // NDTLOS_GEOMETRY_HPP
