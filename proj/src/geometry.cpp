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

#include "ndtlos/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ndt::geometry {

namespace {

// Parametric overlap below this length (in segment units) counts as contact,
// not penetration.
constexpr double kSegmentEps = 1e-9;
// Distance tolerance for side-of-plane and face-extent tests, meters.
constexpr double kPlaneEps = 1e-9;

constexpr int kOtherAxes[3][2] = {{1, 2}, {0, 2}, {0, 1}};

double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

Vec3 mirror(Vec3 p, const Face& f) {
    p[f.axis] = 2.0 * f.coord - p[f.axis];
    return p;
}

bool on_exterior_side(Vec3 p, const Face& f) {
    return (p[f.axis] - f.coord) * f.normal_sign > kPlaneEps;
}

bool within_face(Vec3 p, const Face& f) {
    if (f.infinite) return true;
    for (int k = 0; k < 2; ++k) {
        const double v = p[kOtherAxes[f.axis][k]];
        if (v < f.lo[k] - kPlaneEps || v > f.hi[k] + kPlaneEps) return false;
    }
    return true;
}

bool segment_clear(const Scene& scene, Vec3 a, Vec3 b) {
    for (const Box& box : scene.buildings)
        if (segment_blocked_by(box, a, b)) return false;
    return true;
}

class Tracer {
public:
    Tracer(const Scene& scene, Vec3 tx, Vec3 rx, double carrier_hz)
        : scene_(scene), faces_(reflecting_faces(scene)), tx_(tx), rx_(rx),
          wavelength_(kSpeedOfLight / carrier_hz) {}

    std::vector<TracedPath> run() {
        if (los_test(scene_, tx_, rx_)) emit({tx_, rx_}, {});
        if (scene_.max_bounces > 0) {
            std::vector<int> seq;
            std::vector<Vec3> images;
            extend(seq, images);
        }
        std::stable_sort(out_.begin(), out_.end(), [](const TracedPath& a, const TracedPath& b) {
            if (a.component.delay != b.component.delay) return a.component.delay < b.component.delay;
            return a.component.bounces < b.component.bounces;
        });
        return std::move(out_);
    }

private:
    void extend(std::vector<int>& seq, std::vector<Vec3>& images) {
        for (int fi = 0; fi < static_cast<int>(faces_.size()); ++fi) {
            if (!seq.empty() && seq.back() == fi) continue;
            const Face& f = faces_[fi];
            const Vec3 src = images.empty() ? tx_ : images.back();
            // The real source of this bounce (tx or the previous reflection
            // point) must face the plane; for the first bounce this is tx.
            if (seq.empty() && !on_exterior_side(tx_, f)) continue;
            seq.push_back(fi);
            images.push_back(mirror(src, f));
            if (on_exterior_side(rx_, f)) try_sequence(seq, images);
            if (static_cast<int>(seq.size()) < scene_.max_bounces) extend(seq, images);
            seq.pop_back();
            images.pop_back();
        }
    }

    void try_sequence(const std::vector<int>& seq, const std::vector<Vec3>& images) {
        const std::size_t k = seq.size();
        std::vector<Vec3> pts(k + 2);
        pts.front() = tx_;
        pts.back() = rx_;
        Vec3 target = rx_;
        for (std::size_t i = k; i >= 1; --i) {
            const Face& f = faces_[seq[i - 1]];
            const Vec3 img = images[i - 1];
            const double denom = target[f.axis] - img[f.axis];
            if (std::abs(denom) < 1e-12) return;
            const double t = (f.coord - img[f.axis]) / denom;
            if (t <= kSegmentEps || t >= 1.0 - kSegmentEps) return;
            Vec3 q = img + t * (target - img);
            q[f.axis] = f.coord;
            if (!within_face(q, f)) return;
            pts[i] = q;
            target = q;
        }
        for (std::size_t i = 1; i <= k; ++i) {
            const Face& f = faces_[seq[i - 1]];
            if (!on_exterior_side(pts[i - 1], f) || !on_exterior_side(pts[i + 1], f)) return;
        }
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            if (!segment_clear(scene_, pts[i], pts[i + 1])) return;
        emit(std::move(pts), seq);
    }

    void emit(std::vector<Vec3> pts, std::vector<int> seq) {
        double length = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) length += norm(pts[i + 1] - pts[i]);
        TracedPath tp;
        tp.component.bounces = static_cast<int>(seq.size());
        tp.component.gain = wavelength_ / (4.0 * kPi * length) *
                            std::pow(scene_.reflection_coeff, tp.component.bounces);
        tp.component.delay = length / kSpeedOfLight;
        const Vec3 dir = pts[pts.size() - 2] - rx_;
        arrival_angles(dir, scene_.bs_bearing, tp.component.azimuth, tp.component.elevation);
        tp.vertices = std::move(pts);
        tp.faces = std::move(seq);
        out_.push_back(std::move(tp));
    }

    const Scene& scene_;
    std::vector<Face> faces_;
    Vec3 tx_, rx_;
    double wavelength_;
    std::vector<TracedPath> out_;
};

}  // namespace

void validate(const Scene& scene) {
    for (const Box& b : scene.buildings)
        for (int a = 0; a < 3; ++a)
            if (!(b.hi[a] > b.lo[a])) throw InvalidInput("building box with non-positive extent");
    if (!(scene.bs_position.z > scene.ground_z)) throw InvalidInput("BS must be above ground");
    if (!(scene.reflection_coeff > 0.0 && scene.reflection_coeff <= 1.0))
        throw InvalidInput("reflection coefficient must lie in (0, 1]");
    if (scene.max_bounces < 0) throw InvalidInput("max_bounces must be >= 0");
}

std::vector<Face> reflecting_faces(const Scene& scene) {
    std::vector<Face> faces;
    faces.reserve(scene.buildings.size() * 5 + 1);
    for (int bi = 0; bi < static_cast<int>(scene.buildings.size()); ++bi) {
        const Box& b = scene.buildings[bi];
        for (int axis = 0; axis < 3; ++axis) {
            for (int sign : {-1, 1}) {
                if (axis == 2 && sign < 0) continue;  // floor rests on the ground
                Face f;
                f.axis = axis;
                f.normal_sign = sign;
                f.coord = sign > 0 ? b.hi[axis] : b.lo[axis];
                for (int k = 0; k < 2; ++k) {
                    f.lo[k] = b.lo[kOtherAxes[axis][k]];
                    f.hi[k] = b.hi[kOtherAxes[axis][k]];
                }
                f.box = bi;
                faces.push_back(f);
            }
        }
    }
    Face ground;
    ground.axis = 2;
    ground.coord = scene.ground_z;
    ground.normal_sign = 1;
    ground.infinite = true;
    faces.push_back(ground);
    return faces;
}

bool segment_blocked_by(const Box& box, Vec3 a, Vec3 b) {
    double t0 = 0.0, t1 = 1.0;
    for (int axis = 0; axis < 3; ++axis) {
        const double d = b[axis] - a[axis];
        if (std::abs(d) < 1e-15) {
            if (!(a[axis] > box.lo[axis] + kPlaneEps && a[axis] < box.hi[axis] - kPlaneEps))
                return false;
            continue;
        }
        double ta = (box.lo[axis] - a[axis]) / d;
        double tb = (box.hi[axis] - a[axis]) / d;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t1 - t0 <= kSegmentEps) return false;
    }
    return t1 - t0 > kSegmentEps;
}

bool los_test(const Scene& scene, Vec3 tx, Vec3 rx) {
    if (tx == rx) throw InvalidInput("los_test: degenerate segment (tx == rx)");
    return segment_clear(scene, tx, rx);
}

void arrival_angles(Vec3 dir, double bearing, double& azimuth, double& elevation) {
    const double horiz = std::hypot(dir.x, dir.y);
    elevation = std::atan2(dir.z, horiz);
    azimuth = horiz > 0.0 ? wrap_angle(std::atan2(dir.x, dir.y) - bearing) : 0.0;
}

std::vector<TracedPath> trace_paths_detailed(const Scene& scene, Vec3 tx, Vec3 rx, double carrier_hz) {
    if (tx == rx) throw InvalidInput("trace_paths: tx == rx");
    return Tracer(scene, tx, rx, carrier_hz).run();
}

MultipathSet trace_paths(const Scene& scene, Vec3 tx, Vec3 rx, double carrier_hz) {
    MultipathSet set;
    set.ue_position = tx;
    for (TracedPath& tp : trace_paths_detailed(scene, tx, rx, carrier_hz)) {
        if (tp.component.bounces == 0) set.is_los = true;
        set.paths.push_back(tp.component);
    }
    return set;
}

std::vector<Vec3> ue_grid(const Scene& scene, double cell_size, double ue_height) {
    if (!(cell_size > 0.0)) throw InvalidInput("ue_grid: cell_size must be positive");
    const Area& a = scene.area;
    const auto nx = static_cast<long>(std::floor((a.x1 - a.x0) / cell_size + 1e-9));
    const auto ny = static_cast<long>(std::floor((a.y1 - a.y0) / cell_size + 1e-9));
    std::vector<Vec3> out;
    const double z = scene.ground_z + ue_height;
    for (long iy = 0; iy < ny; ++iy) {
        for (long ix = 0; ix < nx; ++ix) {
            const Vec3 p{a.x0 + (static_cast<double>(ix) + 0.5) * cell_size,
                         a.y0 + (static_cast<double>(iy) + 0.5) * cell_size, z};
            const bool inside = std::any_of(scene.buildings.begin(), scene.buildings.end(), [&](const Box& b) {
                return p.x > b.lo.x && p.x < b.hi.x && p.y > b.lo.y && p.y < b.hi.y && p.z >= b.lo.z &&
                       p.z <= b.hi.z;
            });
            if (!inside) out.push_back(p);
        }
    }
    return out;
}

Scene make_toy_city(const CityParams& params, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Scene scene;
    scene.area = {0.0, 0.0, params.size, params.size};
    scene.reflection_coeff = params.reflection_coeff;
    scene.max_bounces = params.max_bounces;
    scene.bs_bearing = params.bs_bearing_deg * kPi / 180.0;

    const double pitch = params.block + params.street;
    const int n = static_cast<int>(std::floor((params.size - params.street) / pitch));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double x0 = params.street + i * pitch;
            const double y0 = params.street + j * pitch;
            const bool bs_block = (i == 0 && j == n - 1);
            const double roll = unit(rng);
            const double height = params.min_height + (params.max_height - params.min_height) * unit(rng);
            if (!bs_block && roll > params.fill_probability) continue;
            Box b{{x0, y0, 0.0}, {x0 + params.block, y0 + params.block, bs_block ? params.bs_height - 1.7 : height}};
            scene.buildings.push_back(b);
            if (bs_block) scene.bs_position = {b.hi.x, b.lo.y, params.bs_height};
        }
    }
    if (params.frontal_margin >= 0.0) {
        scene.area.x0 = std::max(0.0, scene.bs_position.x - params.frontal_margin);
        scene.area.y1 = std::min(params.size, scene.bs_position.y + params.frontal_margin);
    }
    validate(scene);
    return scene;
}

}  // namespace ndt::geometry
