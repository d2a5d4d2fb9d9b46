#include <doctest.h>

#include <random>

#include "lpcvt/oracles.hpp"
#include "lpcvt/rvd.hpp"

using namespace lpcvt;

namespace {

std::vector<HalfSpace> cube_halfspaces(double side = 1.0) {
    std::vector<HalfSpace> hs;
    for (int axis = 0; axis < 3; ++axis) {
        hs.push_back({Vec3::Unit(axis), side});
        hs.push_back({-Vec3::Unit(axis), 0.0});
    }
    return hs;
}

SurfaceMesh tetra_surface() {
    SurfaceMesh m;
    m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    m.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
    return m;
}

const TensorField kIdentityField = TensorField::constant(AnisotropyTensor::identity());

}  // namespace

TEST_CASE("nearest seed with tie break") {
    const auto seeds = SeedSet::from_points({Vec3(0, 0, 0), Vec3(2, 0, 0)});
    CHECK(nearest_seed(seeds, Vec3(0.5, 0, 0)) == 0);
    CHECK(nearest_seed(seeds, Vec3(1.0, 0, 0)) == 0);  // equidistant: lowest index
    CHECK(nearest_seed(seeds, Vec3(1.7, 0, 0)) == 1);
    CHECK(nearest_seed(seeds, Vec3(2, 0, 0)) == 1);
}

TEST_CASE("jitter is deterministic, tiny, and breaks cospherical ties") {
    std::vector<Vec3> corners;
    for (int z = 0; z <= 1; ++z) {
        for (int y = 0; y <= 1; ++y) {
            for (int x = 0; x <= 1; ++x) {
                corners.push_back(Vec3(0.25, 0.25, 0.25) + 0.5 * Vec3(x, y, z));
            }
        }
    }
    const auto seeds = SeedSet::from_points(corners);  // shared Voronoi vertex at the center
    const auto j1 = jitter_seeds(seeds, 1e-9, 7);
    const auto j2 = jitter_seeds(seeds, 1e-9, 7);
    for (int i = 0; i < seeds.size(); ++i) {
        CHECK(j1.points[i] == j2.points[i]);
        CHECK((j1.points[i] - seeds.points[i]).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(j1.points[i] != seeds.points[i]);
    }
}

TEST_CASE("seed sets reject duplicates") {
    CHECK_THROWS_AS(SeedSet::from_points({Vec3(0, 0, 0), Vec3(0, 0, 0), Vec3(1, 1, 1)}), Error);
    CHECK_NOTHROW(SeedSet::from_points({Vec3(0.25, 0.5, 0.5)}));
}

TEST_CASE("circumcenter of the right-corner tetrahedron") {
    const Vec3 c = circumcenter(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1));
    CHECK((c - Vec3(0.5, 0.5, 0.5)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((c - Vec3(0, 0, 0)).norm() == doctest::Approx(std::sqrt(3.0) / 2));
}

TEST_CASE("circumcenter of a centered regular tetrahedron is the center") {
    const Vec3 shift(0.3, -1.2, 2.5);
    const Vec3 c = circumcenter(Vec3(1, 1, 1) + shift, Vec3(1, -1, -1) + shift,
                                Vec3(-1, 1, -1) + shift, Vec3(-1, -1, 1) + shift);
    CHECK((c - shift).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("coplanar seeds are rejected") {
    CHECK_THROWS_AS(circumcenter(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)),
                    NearDegenerate);
}

TEST_CASE("random circumcenters are equidistant and scale correctly") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto rnd = [&] { return Vec3(u(rng), u(rng), u(rng)); };
    int done = 0;
    while (done < 200) {
        const Vec3 wi = rnd(), wj = rnd(), wk = rnd(), wl = rnd();
        const auto sys = CircumcenterSystem::from_seeds(wi, wj, wk, wl);
        double scale3 = 1.0, scale = 0.0;
        for (int r = 0; r < 3; ++r) {
            scale3 *= sys.a.row(r).norm();
            scale = std::max(scale, sys.a.row(r).norm());
        }
        if (std::abs(sys.det()) < 1e-2 * scale3) continue;
        ++done;
        const Vec3 c = circumcenter(wi, wj, wk, wl);
        const double ri = (c - wi).norm();
        for (const Vec3& w : {wj, wk, wl}) {
            CHECK(std::abs((c - w).norm() - ri) <= 1e-10 * scale);
        }
        // uniform scaling moves the center with the points, Jacobian unchanged
        const double s = 2.0;
        const Vec3 cs = circumcenter(s * wi, s * wj, s * wk, s * wl);
        CHECK((cs - s * c).cwiseAbs().maxCoeff() <= 1e-10 * scale);
        const auto j1 = circumcenter_jacobian(wi, wj, wk, wl);
        const auto j2 = circumcenter_jacobian(s * wi, s * wj, s * wk, s * wl);
        for (int b = 0; b < 4; ++b) {
            CHECK((j1[b] - j2[b]).cwiseAbs().maxCoeff() <= 1e-9);
        }
        const Mat3 sum = j1[0] + j1[1] + j1[2] + j1[3];
        CHECK((sum - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("circumcenter jacobian matches finite differences") {
    const Vec3 wi(0, 0, 0), wj(1, 0, 0), wk(0, 1, 0), wl(0, 0, 1);
    const auto blocks = circumcenter_jacobian(wi, wj, wk, wl);
    Eigen::MatrixX3d pack(4, 3);
    pack.row(0) = wi.transpose();
    pack.row(1) = wj.transpose();
    pack.row(2) = wk.transpose();
    pack.row(3) = wl.transpose();
    for (int coord = 0; coord < 3; ++coord) {
        const auto fd = fd_gradient(
            [&](const Eigen::MatrixX3d& q) {
                return circumcenter(q.row(0).transpose(), q.row(1).transpose(),
                                    q.row(2).transpose(), q.row(3).transpose())[coord];
            },
            pack, 1e-6);
        for (int s = 0; s < 4; ++s) {
            CHECK((blocks[s].row(coord).transpose() - fd.row(s).transpose()).norm() <= 1e-6);
        }
    }
}

TEST_CASE("constrained vertex jacobians") {
    const auto seeds = SeedSet::from_points(
        {Vec3(0.2, 0.3, 0.4), Vec3(0.8, 0.4, 0.5), Vec3(0.4, 0.9, 0.3), Vec3(0.5, 0.4, 0.9)});

    SUBCASE("fixed vertices do not move") {
        const auto prov = VertexProvenance::fixed({0, 1, 2});
        CHECK(constrained_vertex_jacobian(prov, 0, seeds).count == 0);
    }
    SUBCASE("the apex moves with its own seed") {
        const auto jac = constrained_vertex_jacobian(VertexProvenance::apex(), 3, seeds);
        REQUIRE(jac.count == 1);
        CHECK(jac.blocks[0].first == 3);
        CHECK((jac.blocks[0].second - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("three bisectors reproduce the circumcenter jacobian") {
        const auto prov = VertexProvenance::three_bisectors(1, 2, 3);
        const auto jac = constrained_vertex_jacobian(prov, 0, seeds);
        REQUIRE(jac.count == 4);
        const auto blocks = circumcenter_jacobian(seeds.points[0], seeds.points[1],
                                                  seeds.points[2], seeds.points[3]);
        for (int b = 0; b < 4; ++b) {
            CHECK((jac.blocks[b].second - blocks[b]).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("bisector-plane systems match finite differences of the solved position") {
        const FixedPlaneRef top{Vec3(0, 0, 1), 1.0, 40};
        const FixedPlaneRef right{Vec3(1, 0, 0), 1.0, 41};

        for (const auto prov : {VertexProvenance::two_bisectors_one_plane(1, 2, top),
                                VertexProvenance::one_bisector_two_planes(1, top, right)}) {
            const auto jac = constrained_vertex_jacobian(prov, 0, seeds);
            const int nb = prov.bisector_count();

            auto solve_pos = [&](const Eigen::MatrixX3d& q) {
                Mat3 a;
                Vec3 b;
                for (int r = 0; r < nb; ++r) {
                    const Vec3 wj = q.row(prov.seeds[r]).transpose();
                    const Vec3 wi = q.row(0).transpose();
                    a.row(r) = (wj - wi).transpose();
                    b[r] = 0.5 * (wj.squaredNorm() - wi.squaredNorm());
                }
                for (int r = nb; r < 3; ++r) {
                    a.row(r) = prov.planes[r - nb].normal.transpose();
                    b[r] = prov.planes[r - nb].offset;
                }
                return Vec3(a.partialPivLu().solve(b));
            };

            for (int coord = 0; coord < 3; ++coord) {
                const auto fd = fd_gradient(
                    [&](const Eigen::MatrixX3d& q) { return solve_pos(q)[coord]; },
                    seeds.as_matrix(), 1e-6);
                Eigen::MatrixX3d analytic = Eigen::MatrixX3d::Zero(seeds.size(), 3);
                for (int b = 0; b < jac.count; ++b) {
                    analytic.row(jac.blocks[b].first) = jac.blocks[b].second.row(coord);
                }
                CHECK((analytic - fd).cwiseAbs().maxCoeff() <= 1e-5);
            }
        }
    }
}

TEST_CASE("polytope construction validates boundedness") {
    CHECK_THROWS_AS(make_polytope({{Vec3(1, 0, 0), 1.0},
                                   {Vec3(0, 1, 0), 1.0},
                                   {Vec3(0, 0, 1), 1.0},
                                   {Vec3(-1, 0, 0), 0.0}}),
                    UnboundedPolytope);
    CHECK_THROWS_AS(make_polytope({{Vec3(1, 0, 0), 1.0}, {Vec3(-1, 0, 0), 0.0}}),
                    UnboundedPolytope);

    const auto cube = make_polytope(cube_halfspaces());
    CHECK(cube.vertices.size() == 8);
    CHECK(cube.faces.size() == 6);
    CHECK(cube.volume() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("clipping a cube produces consistent volumes and provenance") {
    auto cell = make_polytope(cube_halfspaces());
    // cut the corner x+y+z >= 2.5 off
    REQUIRE(clip_cell(cell, Vec3(1, 1, 1), 2.5, {PlaneTag::Bisector, 9}, 1e-12));
    const double corner = (0.5 * 0.5 * 0.5) / 6.0;
    CHECK(cell.volume() == doctest::Approx(1.0 - corner).epsilon(1e-12));

    int cut_vertices = 0;
    for (const auto& v : cell.vertices) {
        for (const auto& t : v.tags) {
            if (t.type == PlaneTag::Bisector) {
                ++cut_vertices;
                CHECK(v.tags.size() == 3);  // bisector + two cube planes
                break;
            }
        }
    }
    CHECK(cut_vertices == 3);
}

TEST_CASE("sequential clipping agrees with direct vertex enumeration") {
    std::mt19937_64 rng(53);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> off(0.55, 0.95);
    for (int trial = 0; trial < 25; ++trial) {
        auto cell = make_polytope(cube_halfspaces());
        std::vector<HalfSpace> planes = cube_halfspaces();
        double prev_vol = cell.volume();
        for (int c = 0; c < 4; ++c) {
            Vec3 normal(n(rng), n(rng), n(rng));
            if (normal.norm() < 1e-6) continue;
            normal.normalize();
            // plane offset measured from the cube center so cuts hit the cell
            const double d = normal.dot(Vec3(0.5, 0.5, 0.5)) + 0.45 * off(rng);
            planes.push_back({normal, d});
            if (!clip_cell(cell, normal, d, {PlaneTag::Bisector, 100 + c}, 1e-12)) break;

            const double vol = cell.volume();
            CHECK(vol <= prev_vol + 1e-12);
            prev_vol = vol;
            for (const auto& v : cell.vertices) CHECK(v.tags.size() >= 3);
            for (const auto& f : cell.faces) CHECK(f.ring.size() >= 3);

            const auto direct = make_polytope(planes);
            CHECK(vol == doctest::Approx(direct.volume()).epsilon(1e-9));
        }
    }
}

TEST_CASE("one seed owns the whole cube as 12 tetrahedra") {
    const auto domain = Domain::volume(cube_halfspaces());
    const auto seeds = SeedSet::from_points({Vec3(0.4, 0.6, 0.5)});
    const auto rvd = build_rvd(seeds, domain, kIdentityField);
    REQUIRE(rvd.size() == 1);
    CHECK(rvd[0].simplices.size() == 12);
    double vol = 0.0;
    for (const auto& s : rvd[0].simplices) {
        const double v = tetra_signed_volume(s.apex, s.vertices[0], s.vertices[1], s.vertices[2]);
        CHECK(v >= 0.0);
        vol += v;
    }
    CHECK(vol == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& s : rvd[0].simplices) {
        for (const auto& prov : s.provenance) {
            CHECK(prov.kind == VertexProvenance::Kind::FixedVertex);
        }
    }
}

TEST_CASE("two seeds split the cube at the mid plane") {
    const auto domain = Domain::volume(cube_halfspaces());
    const auto seeds =
        SeedSet::from_points({Vec3(0.25, 0.5, 0.5), Vec3(0.75, 0.5, 0.5)});
    const auto rvd = build_rvd(seeds, domain, kIdentityField);
    double v0 = 0.0, v1 = 0.0;
    for (const auto& s : rvd[0].simplices) {
        v0 += tetra_signed_volume(s.apex, s.vertices[0], s.vertices[1], s.vertices[2]);
        for (const auto& v : s.vertices) CHECK(v[0] <= 0.5 + 1e-12);
    }
    for (const auto& s : rvd[1].simplices) {
        v1 += tetra_signed_volume(s.apex, s.vertices[0], s.vertices[1], s.vertices[2]);
    }
    CHECK(v0 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(v1 == doctest::Approx(0.5).epsilon(1e-12));

    // the interface vertices carry one bisector and two cube planes
    bool saw_interface = false;
    for (const auto& s : rvd[0].simplices) {
        for (const auto& prov : s.provenance) {
            if (prov.kind == VertexProvenance::Kind::OneBisectorTwoPlanes) {
                saw_interface = true;
                CHECK(prov.seeds[0] == 1);
            }
        }
    }
    CHECK(saw_interface);
}

TEST_CASE("random seeds partition the cube and points map to their cell") {
    const auto domain = Domain::volume(cube_halfspaces());
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::vector<Vec3> pts;
    for (int i = 0; i < 50; ++i) pts.push_back(Vec3(u(rng), u(rng), u(rng)));
    const auto seeds = SeedSet::from_points(pts);
    const auto rvd = build_rvd(seeds, domain, kIdentityField);

    double total = 0.0;
    std::uniform_real_distribution<double> bary(0.0, 1.0);
    for (const auto& cell : rvd) {
        double cell_vol = 0.0;
        for (const auto& s : cell.simplices) {
            const double v =
                tetra_signed_volume(s.apex, s.vertices[0], s.vertices[1], s.vertices[2]);
            CHECK(v >= 0.0);
            cell_vol += v;
        }
        total += cell_vol;

        // sampled points of every simplex belong to this cell
        for (const auto& s : cell.simplices) {
            if (tetra_signed_volume(s.apex, s.vertices[0], s.vertices[1], s.vertices[2]) < 1e-12) {
                continue;
            }
            for (int n = 0; n < 20; ++n) {
                double t0 = bary(rng), t1 = bary(rng), t2 = bary(rng);
                if (t0 > t1) std::swap(t0, t1);
                if (t1 > t2) std::swap(t1, t2);
                if (t0 > t1) std::swap(t0, t1);
                const Vec3 x = t0 * s.apex + (t1 - t0) * s.vertices[0] +
                               (t2 - t1) * s.vertices[1] + (1.0 - t2) * s.vertices[2];
                const int owner = nearest_seed(seeds, x);
                const double d_own = (x - seeds.points[cell.seed_index]).norm();
                const double d_best = (x - seeds.points[owner]).norm();
                CHECK(d_own <= d_best + 1e-9);
            }
        }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    // cell volumes also agree with the direct polytope volume
    for (int i = 0; i < seeds.size(); ++i) {
        const auto cell = build_volume_cell(seeds, domain, i);
        double vol = 0.0;
        for (const auto& s : rvd[i].simplices) {
            vol += tetra_signed_volume(s.apex, s.vertices[0], s.vertices[1], s.vertices[2]);
        }
        CHECK(vol == doctest::Approx(cell.volume()).epsilon(1e-9));
    }
}

TEST_CASE("decomposition with the apex at a cell vertex keeps the volume") {
    const auto tet = make_polytope({{Vec3(-1, 0, 0), 0.0},
                                    {Vec3(0, -1, 0), 0.0},
                                    {Vec3(0, 0, -1), 0.0},
                                    {Vec3(1, 1, 1), 1.0}});
    const auto simplices = decompose_cell(tet, Vec3::Zero(), kIdentityField);
    double vol = 0.0;
    for (const auto& s : simplices) {
        vol += tetra_signed_volume(s.apex, s.vertices[0], s.vertices[1], s.vertices[2]);
    }
    CHECK(vol == doctest::Approx(tet.volume()).epsilon(1e-12));
}

TEST_CASE("far-away seed ends up with an empty cell") {
    const auto domain = Domain::volume(cube_halfspaces());
    const auto seeds = SeedSet::from_points({Vec3(0.5, 0.5, 0.5), Vec3(50, 50, 50)});
    const auto rvd = build_rvd(seeds, domain, kIdentityField);
    CHECK_FALSE(rvd[0].simplices.empty());
    CHECK(rvd[1].simplices.empty());
}

TEST_CASE("surface restriction tiles the mesh") {
    const auto domain = Domain::surface(tetra_surface());
    const auto seeds = SeedSet::from_points(
        {Vec3(0.1, 0.1, 0.1), Vec3(0.8, 0.1, 0.1), Vec3(0.1, 0.8, 0.1), Vec3(0.1, 0.1, 0.8)});
    const auto rvd = build_rvd(seeds, domain, kIdentityField);

    double area = 0.0;
    for (const auto& cell : rvd) {
        for (const auto& s : cell.simplices) {
            CHECK(s.dim == 2);
            CHECK(s.apex == seeds.points[cell.seed_index]);
            area += triangle_area(s.vertices[0], s.vertices[1], s.vertices[2]);
        }
    }
    CHECK(area == doctest::Approx(domain.measure()).epsilon(1e-9));

    // surface vertices: mesh corners stay fixed, bisector cuts are tagged
    bool saw_fixed = false, saw_edge_cut = false, saw_interior = false;
    for (const auto& cell : rvd) {
        for (const auto& s : cell.simplices) {
            for (const auto& prov : s.provenance) {
                switch (prov.kind) {
                    case VertexProvenance::Kind::FixedVertex: saw_fixed = true; break;
                    case VertexProvenance::Kind::OneBisectorTwoPlanes: saw_edge_cut = true; break;
                    case VertexProvenance::Kind::TwoBisectorsOnePlane: saw_interior = true; break;
                    default: break;
                }
            }
        }
    }
    CHECK(saw_fixed);
    CHECK(saw_edge_cut);
    CHECK(saw_interior);
}

TEST_CASE("single triangle restricted to one seed is returned unchanged") {
    SurfaceMesh m;
    m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    m.triangles = {{0, 1, 2}};
    const auto domain = Domain::surface(m);
    const auto seeds = SeedSet::from_points({Vec3(0.2, 0.2, 1.0)});
    const auto rvd = build_rvd(seeds, domain, kIdentityField);
    REQUIRE(rvd[0].simplices.size() == 1);
    CHECK(triangle_area(rvd[0].simplices[0].vertices[0], rvd[0].simplices[0].vertices[1],
                        rvd[0].simplices[0].vertices[2]) == doctest::Approx(0.5));
}

TEST_CASE("cell polygons of a single seed reproduce the cube boundary") {
    const auto domain = Domain::volume(cube_halfspaces());
    const auto seeds = SeedSet::from_points({Vec3(0.5, 0.5, 0.5)});
    const auto polys = build_cell_polygons(seeds, domain);
    REQUIRE(polys.size() == 1);
    CHECK(polys[0].rings.size() == 6);
    for (const auto& ring : polys[0].rings) CHECK(ring.size() == 4);
}
