#include "lpcvt/rvd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lpcvt/parallel.hpp"

namespace lpcvt {

// ---------------------------------------------------------------- seeds

SeedSet SeedSet::from_points(std::vector<Vec3> pts) {
    if (pts.empty()) throw Error("seed set is empty");
    Vec3 lo = pts[0], hi = pts[0];
    for (const auto& p : pts) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double scale = (hi - lo).norm();
    if (pts.size() >= 2) {
        const double min_gap = 1e-12 * std::max(scale, 1e-300);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                if ((pts[i] - pts[j]).norm() <= min_gap) {
                    throw Error("seeds " + std::to_string(i) + " and " + std::to_string(j) +
                                " coincide");
                }
            }
        }
    }
    SeedSet s;
    s.points = std::move(pts);
    return s;
}

Eigen::MatrixX3d SeedSet::as_matrix() const {
    Eigen::MatrixX3d m(points.size(), 3);
    for (std::size_t i = 0; i < points.size(); ++i) m.row(i) = points[i].transpose();
    return m;
}

SeedSet SeedSet::from_matrix(const Eigen::MatrixX3d& m) {
    std::vector<Vec3> pts(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) pts[i] = m.row(i).transpose();
    return from_points(std::move(pts));
}

SeedSet jitter_seeds(const SeedSet& seeds, double magnitude, std::uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed ^ 0x6a09e667f3bcc908ULL);
    std::uniform_real_distribution<double> u(-magnitude, magnitude);
    std::vector<Vec3> pts = seeds.points;
    for (auto& p : pts) p += Vec3(u(rng), u(rng), u(rng));
    return SeedSet::from_points(std::move(pts));
}

int nearest_seed(const SeedSet& seeds, const Vec3& x) {
    int best = 0;
    double best_d2 = (x - seeds.points[0]).squaredNorm();
    for (int i = 1; i < seeds.size(); ++i) {
        const double d2 = (x - seeds.points[i]).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

// ----------------------------------------------------------- convex cell

double SurfaceMesh::total_area() const {
    double a = 0.0;
    for (const auto& t : triangles) {
        a += triangle_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
    }
    return a;
}

double ConvexCell::volume() const {
    double v = 0.0;
    for (const auto& f : faces) {
        for (std::size_t t = 1; t + 1 < f.ring.size(); ++t) {
            v += tetra_signed_volume(Vec3::Zero(), vertices[f.ring[0]].pos,
                                     vertices[f.ring[t]].pos, vertices[f.ring[t + 1]].pos);
        }
    }
    return v;
}

double ConvexCell::max_distance_to(const Vec3& x) const {
    double d = 0.0;
    for (const auto& v : vertices) d = std::max(d, (v.pos - x).norm());
    return d;
}

namespace {

void add_tag(std::vector<PlaneTag>& tags, PlaneTag t) {
    auto it = std::lower_bound(tags.begin(), tags.end(), t);
    if (it == tags.end() || *it != t) tags.insert(it, t);
}

std::vector<PlaneTag> common_tags(const std::vector<PlaneTag>& a, const std::vector<PlaneTag>& b) {
    std::vector<PlaneTag> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Right-handed in-plane basis (u, v) with u x v = n.
std::pair<Vec3, Vec3> plane_basis(const Vec3& n) {
    int axis = 0;
    n.cwiseAbs().minCoeff(&axis);
    const Vec3 u = n.cross(Vec3::Unit(axis)).normalized();
    return {u, n.cross(u)};
}

// Sorts point ids counterclockwise around n so the resulting ring's
// outward normal is +n.
void sort_ring_ccw(std::vector<int>& ids, const std::vector<ConvexCell::Vertex>& verts,
                   const Vec3& n) {
    Vec3 c = Vec3::Zero();
    for (int id : ids) c += verts[id].pos;
    c /= static_cast<double>(ids.size());
    const auto [u, v] = plane_basis(n);
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        const Vec3 pa = verts[a].pos - c, pb = verts[b].pos - c;
        return std::atan2(pa.dot(v), pa.dot(u)) < std::atan2(pb.dot(v), pb.dot(u));
    });
}

void garbage_collect(ConvexCell& cell) {
    std::vector<int> remap(cell.vertices.size(), -1);
    std::vector<ConvexCell::Vertex> kept;
    for (auto& f : cell.faces) {
        for (int& id : f.ring) {
            if (remap[id] < 0) {
                remap[id] = static_cast<int>(kept.size());
                kept.push_back(std::move(cell.vertices[id]));
            }
            id = remap[id];
        }
    }
    cell.vertices = std::move(kept);
}

}  // namespace

bool clip_cell(ConvexCell& cell, const Vec3& normal, double offset, PlaneTag tag, double eps) {
    const double len = normal.norm();
    if (!(len > 0.0)) throw Error("clip plane has zero normal");
    const Vec3 n = normal / len;
    const double d = offset / len;

    if (cell.empty()) return false;

    const int nv = static_cast<int>(cell.vertices.size());
    std::vector<double> dist(nv);
    std::vector<int> side(nv);
    bool any_out = false, any_in = false;
    for (int i = 0; i < nv; ++i) {
        dist[i] = n.dot(cell.vertices[i].pos) - d;
        side[i] = dist[i] > eps ? 1 : (dist[i] < -eps ? -1 : 0);
        any_out |= side[i] == 1;
        any_in |= side[i] == -1;
    }
    if (!any_out) {
        for (int i = 0; i < nv; ++i) {
            if (side[i] == 0) add_tag(cell.vertices[i].tags, tag);
        }
        return true;
    }
    if (!any_in) {
        cell = ConvexCell{};
        return false;
    }

    for (int i = 0; i < nv; ++i) {
        if (side[i] == 0) add_tag(cell.vertices[i].tags, tag);
    }

    // Intersection vertices are shared between the two faces of an edge.
    std::map<std::pair<int, int>, int> edge_cut;
    auto cut_edge = [&](int a, int b) {
        const auto key = std::minmax(a, b);
        auto it = edge_cut.find(key);
        if (it != edge_cut.end()) return it->second;
        const double t = dist[a] / (dist[a] - dist[b]);
        ConvexCell::Vertex v;
        v.pos = cell.vertices[a].pos + t * (cell.vertices[b].pos - cell.vertices[a].pos);
        v.tags = common_tags(cell.vertices[a].tags, cell.vertices[b].tags);
        add_tag(v.tags, tag);
        cell.vertices.push_back(std::move(v));
        const int id = static_cast<int>(cell.vertices.size()) - 1;
        edge_cut.emplace(key, id);
        return id;
    };

    std::vector<ConvexCell::Face> new_faces;
    new_faces.reserve(cell.faces.size() + 1);
    for (const auto& f : cell.faces) {
        std::vector<int> out;
        const int m = static_cast<int>(f.ring.size());
        out.reserve(m + 2);
        for (int t = 0; t < m; ++t) {
            const int a = f.ring[t], b = f.ring[(t + 1) % m];
            if (side[b] <= 0) {
                if (side[a] > 0 && side[b] < 0) out.push_back(cut_edge(a, b));
                out.push_back(b);
            } else if (side[a] < 0) {
                out.push_back(cut_edge(a, b));
            }
        }
        if (out.size() >= 3) new_faces.push_back({f.tag, std::move(out)});
    }

    // Cap face: every surviving vertex on the clip plane, ordered so the
    // outward normal is +n.
    std::vector<int> cap;
    {
        std::vector<char> seen(cell.vertices.size(), 0);
        for (const auto& f : new_faces) {
            for (int id : f.ring) {
                if (seen[id]) continue;
                seen[id] = 1;
                const auto& tags = cell.vertices[id].tags;
                if (std::binary_search(tags.begin(), tags.end(), tag)) cap.push_back(id);
            }
        }
    }
    if (cap.size() >= 3) {
        sort_ring_ccw(cap, cell.vertices, n);
        new_faces.push_back({tag, std::move(cap)});
    }

    cell.faces = std::move(new_faces);
    if (cell.faces.size() < 4) {
        cell = ConvexCell{};
        return false;
    }
    garbage_collect(cell);
    return true;
}

// -------------------------------------------------------------- polytope

ConvexCell make_polytope(const std::vector<HalfSpace>& halfspaces) {
    std::vector<HalfSpace> hs;
    hs.reserve(halfspaces.size());
    for (const auto& h : halfspaces) {
        const double len = h.normal.norm();
        if (!(len > 0.0)) throw Error("half-space with zero normal");
        hs.push_back({h.normal / len, h.offset / len});
    }
    const int m = static_cast<int>(hs.size());
    if (m < 4) throw UnboundedPolytope("fewer than 4 half-spaces cannot bound a volume");

    // Recession cone must be {0}: normals of full rank and no direction
    // satisfying every constraint.
    {
        Eigen::MatrixXd nmat(m, 3);
        for (int i = 0; i < m; ++i) nmat.row(i) = hs[i].normal.transpose();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(nmat);
        if (svd.singularValues()[2] < 1e-10 * svd.singularValues()[0]) {
            throw UnboundedPolytope("half-space normals do not span 3d space");
        }
        for (int i = 0; i < m; ++i) {
            for (int j = i + 1; j < m; ++j) {
                const Vec3 ray = hs[i].normal.cross(hs[j].normal);
                if (ray.norm() < 1e-12) continue;
                for (double sign : {1.0, -1.0}) {
                    const Vec3 v = sign * ray.normalized();
                    bool escapes = true;
                    for (int l = 0; l < m; ++l) {
                        if (hs[l].normal.dot(v) > 1e-10) {
                            escapes = false;
                            break;
                        }
                    }
                    if (escapes) throw UnboundedPolytope("half-space intersection is unbounded");
                }
            }
        }
    }

    // Vertex candidates from plane triples.
    std::vector<Vec3> pts;
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            for (int l = j + 1; l < m; ++l) {
                Mat3 a;
                a.row(0) = hs[i].normal.transpose();
                a.row(1) = hs[j].normal.transpose();
                a.row(2) = hs[l].normal.transpose();
                if (std::abs(a.determinant()) < 1e-12) continue;
                const Vec3 x = a.partialPivLu().solve(Vec3(hs[i].offset, hs[j].offset, hs[l].offset));
                bool feasible = true;
                const double eps_f = 1e-9 * (1.0 + x.cwiseAbs().maxCoeff());
                for (int q = 0; q < m && feasible; ++q) {
                    feasible = hs[q].normal.dot(x) <= hs[q].offset + eps_f;
                }
                if (feasible) pts.push_back(x);
            }
        }
    }
    if (pts.empty()) throw Error("half-space intersection is empty");

    Vec3 lo = pts[0], hi = pts[0];
    for (const auto& p : pts) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double scale = std::max((hi - lo).norm(), 1e-12);
    const double eps_merge = 1e-9 * scale;

    ConvexCell cell;
    for (const auto& p : pts) {
        bool dup = false;
        for (const auto& v : cell.vertices) {
            if ((v.pos - p).norm() <= eps_merge) {
                dup = true;
                break;
            }
        }
        if (dup) continue;
        ConvexCell::Vertex v;
        v.pos = p;
        for (int q = 0; q < m; ++q) {
            if (std::abs(hs[q].normal.dot(p) - hs[q].offset) <= eps_merge) {
                add_tag(v.tags, {PlaneTag::Fixed, q});
            }
        }
        cell.vertices.push_back(std::move(v));
    }

    for (int q = 0; q < m; ++q) {
        std::vector<int> on_plane;
        for (int id = 0; id < static_cast<int>(cell.vertices.size()); ++id) {
            const PlaneTag t{PlaneTag::Fixed, q};
            const auto& tags = cell.vertices[id].tags;
            if (std::binary_search(tags.begin(), tags.end(), t)) on_plane.push_back(id);
        }
        if (on_plane.size() < 3) continue;
        sort_ring_ccw(on_plane, cell.vertices, hs[q].normal);
        cell.faces.push_back({{PlaneTag::Fixed, q}, std::move(on_plane)});
        cell.fixed_planes[q] = FixedPlaneRef{hs[q].normal, hs[q].offset, q};
    }
    garbage_collect(cell);

    if (cell.faces.size() < 4 || cell.volume() <= 0.0) {
        throw Error("half-space intersection has no interior");
    }
    return cell;
}

// ---------------------------------------------------------------- domain

Domain Domain::volume(std::vector<HalfSpace> hs) {
    Domain d;
    d.kind = Kind::Volume;
    d.halfspaces = std::move(hs);
    d.polytope = make_polytope(d.halfspaces);
    Vec3 lo = d.polytope.vertices[0].pos, hi = lo;
    for (const auto& v : d.polytope.vertices) {
        lo = lo.cwiseMin(v.pos);
        hi = hi.cwiseMax(v.pos);
    }
    d.scale = (hi - lo).norm();
    return d;
}

Domain Domain::surface(SurfaceMesh mesh) {
    if (mesh.triangles.empty()) throw Error("surface mesh has no triangles");
    if (mesh.vertices.empty()) throw Error("surface mesh has no vertices");
    Vec3 lo = mesh.vertices[0], hi = lo;
    for (const auto& v : mesh.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    const double scale = std::max((hi - lo).norm(), 1e-12);
    const int nv = static_cast<int>(mesh.vertices.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        for (int c : mesh.triangles[t]) {
            if (c < 0 || c >= nv) {
                throw Error("triangle " + std::to_string(t) + " references vertex " +
                            std::to_string(c) + " out of range");
            }
        }
        const auto& tri = mesh.triangles[t];
        const double area =
            triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
        if (area <= 1e-14 * scale * scale) {
            throw Error("triangle " + std::to_string(t) + " is degenerate");
        }
    }
    Domain d;
    d.kind = Kind::Surface;
    d.mesh = std::move(mesh);
    d.scale = scale;
    return d;
}

double Domain::measure() const {
    return kind == Kind::Volume ? polytope.volume() : mesh.total_area();
}

bool Domain::contains(const Vec3& x) const {
    if (kind != Kind::Volume) return false;
    for (const auto& h : halfspaces) {
        if (h.normal.dot(x) > h.offset + 1e-12 * scale * h.normal.norm()) return false;
    }
    return true;
}

// ----------------------------------------------------------- circumcenter

CircumcenterSystem CircumcenterSystem::from_seeds(const Vec3& wi, const Vec3& wj, const Vec3& wk,
                                                  const Vec3& wl) {
    CircumcenterSystem s;
    s.a.row(0) = (wj - wi).transpose();
    s.a.row(1) = (wk - wi).transpose();
    s.a.row(2) = (wl - wi).transpose();
    s.b = 0.5 * Vec3(wj.squaredNorm() - wi.squaredNorm(), wk.squaredNorm() - wi.squaredNorm(),
                     wl.squaredNorm() - wi.squaredNorm());
    return s;
}

namespace {

void check_conditioning(const Mat3& a) {
    double scale3 = 1.0;
    for (int r = 0; r < 3; ++r) scale3 *= a.row(r).norm();
    if (std::abs(a.determinant()) <= 1e-12 * scale3) {
        throw NearDegenerate("vertex constraint system is numerically singular");
    }
}

}  // namespace

Vec3 circumcenter(const Vec3& wi, const Vec3& wj, const Vec3& wk, const Vec3& wl) {
    const auto sys = CircumcenterSystem::from_seeds(wi, wj, wk, wl);
    check_conditioning(sys.a);
    return sys.a.partialPivLu().solve(sys.b);
}

std::array<Mat3, 4> circumcenter_jacobian(const Vec3& wi, const Vec3& wj, const Vec3& wk,
                                          const Vec3& wl) {
    const auto sys = CircumcenterSystem::from_seeds(wi, wj, wk, wl);
    check_conditioning(sys.a);
    const Mat3 ainv = sys.a.inverse();
    const Vec3 c = ainv * sys.b;

    std::array<Mat3, 4> blocks;
    Mat3 rows = Mat3::Zero();
    for (int r = 0; r < 3; ++r) rows.row(r) = (c - wi).transpose();
    blocks[0] = ainv * rows;
    const std::array<Vec3, 3> others = {wj, wk, wl};
    for (int r = 0; r < 3; ++r) {
        rows.setZero();
        rows.row(r) = (others[r] - c).transpose();
        blocks[r + 1] = ainv * rows;
    }
    return blocks;
}

VertexJacobian constrained_vertex_jacobian(const VertexProvenance& prov, int owner,
                                           const SeedSet& seeds) {
    VertexJacobian out;
    if (prov.kind == VertexProvenance::Kind::SeedApex) {
        out.add(owner, Mat3::Identity());
        return out;
    }
    if (prov.kind == VertexProvenance::Kind::FixedVertex) return out;

    const int nb = prov.bisector_count();
    const Vec3 wi = seeds.points[owner];
    Mat3 a;
    Vec3 b;
    for (int r = 0; r < nb; ++r) {
        const Vec3 wj = seeds.points[prov.seeds[r]];
        a.row(r) = (wj - wi).transpose();
        b[r] = 0.5 * (wj.squaredNorm() - wi.squaredNorm());
    }
    for (int r = nb; r < 3; ++r) {
        const auto& pl = prov.planes[r - nb];
        a.row(r) = pl.normal.transpose();
        b[r] = pl.offset;
    }
    check_conditioning(a);
    const Mat3 ainv = a.inverse();
    const Vec3 c = ainv * b;

    Mat3 rows = Mat3::Zero();
    for (int r = 0; r < nb; ++r) rows.row(r) = (c - wi).transpose();
    out.add(owner, ainv * rows);
    for (int r = 0; r < nb; ++r) {
        rows.setZero();
        rows.row(r) = (seeds.points[prov.seeds[r]] - c).transpose();
        out.add(prov.seeds[r], ainv * rows);
    }
    return out;
}

double vertex_system_conditioning(const VertexProvenance& prov, int owner, const SeedSet& seeds) {
    if (prov.kind == VertexProvenance::Kind::SeedApex ||
        prov.kind == VertexProvenance::Kind::FixedVertex) {
        return 1.0;
    }
    const int nb = prov.bisector_count();
    const Vec3 wi = seeds.points[owner];
    Mat3 a;
    for (int r = 0; r < nb; ++r) a.row(r) = (seeds.points[prov.seeds[r]] - wi).transpose();
    for (int r = nb; r < 3; ++r) a.row(r) = prov.planes[r - nb].normal.transpose();
    double scale3 = 1.0;
    for (int r = 0; r < 3; ++r) scale3 *= a.row(r).norm();
    if (scale3 <= 0.0) return 0.0;
    return std::abs(a.determinant()) / scale3;
}

// ---------------------------------------------------------- provenance

namespace {

VertexProvenance classify_provenance(const std::vector<PlaneTag>& tags,
                                     const std::map<int, FixedPlaneRef>& fixed_geo) {
    std::vector<int> bis, fix;
    for (const auto& t : tags) {
        (t.type == PlaneTag::Bisector ? bis : fix).push_back(t.index);
    }
    if (bis.empty()) {
        std::array<int, 3> ids = {-1, -1, -1};
        for (std::size_t q = 0; q < std::min<std::size_t>(3, fix.size()); ++q) ids[q] = fix[q];
        return VertexProvenance::fixed(ids);
    }
    if (bis.size() >= 3) return VertexProvenance::three_bisectors(bis[0], bis[1], bis[2]);
    if (bis.size() == 2) {
        if (fix.empty()) throw NearDegenerate("cell vertex with two bisectors lacks a fixed plane");
        return VertexProvenance::two_bisectors_one_plane(bis[0], bis[1], fixed_geo.at(fix[0]));
    }
    if (fix.size() < 2) {
        throw NearDegenerate("cell vertex with one bisector lacks two fixed planes");
    }
    return VertexProvenance::one_bisector_two_planes(bis[0], fixed_geo.at(fix[0]),
                                                     fixed_geo.at(fix[1]));
}

}  // namespace

// ------------------------------------------------------------ decompose

std::vector<IntegrationSimplex> decompose_cell(const ConvexCell& cell, const Vec3& apex,
                                               const TensorField& field) {
    std::vector<IntegrationSimplex> out;
    if (cell.empty()) return out;

    std::vector<VertexProvenance> prov(cell.vertices.size());
    for (std::size_t i = 0; i < cell.vertices.size(); ++i) {
        prov[i] = classify_provenance(cell.vertices[i].tags, cell.fixed_planes);
    }

    for (const auto& f : cell.faces) {
        const int m = static_cast<int>(f.ring.size());
        int root = 0;
        for (int t = 1; t < m; ++t) {
            if (prov[f.ring[t]].order_key() < prov[f.ring[root]].order_key()) root = t;
        }
        for (int t = 1; t + 1 < m; ++t) {
            int ia = f.ring[(root + t) % m];
            int ib = f.ring[(root + t + 1) % m];
            const int ir = f.ring[root];
            Vec3 va = cell.vertices[ia].pos, vb = cell.vertices[ib].pos;
            const Vec3 vr = cell.vertices[ir].pos;
            VertexProvenance pa = prov[ia], pb = prov[ib];
            if (tetra_signed_volume(apex, vr, va, vb) < 0.0) {
                std::swap(va, vb);
                std::swap(pa, pb);
            }
            IntegrationSimplex s = IntegrationSimplex::tetrahedron(apex, vr, va, vb);
            s.frame = field.eval((apex + vr + va + vb) / 4.0);
            s.provenance = {prov[ir], pa, pb};
            out.push_back(std::move(s));
        }
    }
    return out;
}

// ------------------------------------------------------------- volume rvd

ConvexCell build_volume_cell(const SeedSet& seeds, const Domain& domain, int i) {
    const double eps = 1e-12 * domain.scale;
    const Vec3 wi = seeds.points[i];
    ConvexCell cell = domain.polytope;

    std::vector<int> order;
    order.reserve(seeds.size() - 1);
    for (int j = 0; j < seeds.size(); ++j) {
        if (j != i) order.push_back(j);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double da = (seeds.points[a] - wi).squaredNorm();
        const double db = (seeds.points[b] - wi).squaredNorm();
        return da != db ? da < db : a < b;
    });

    double reach = cell.max_distance_to(wi);
    for (int j : order) {
        const Vec3 diff = seeds.points[j] - wi;
        if (0.5 * diff.norm() > reach) break;  // bisector cannot cut the cell
        const double off = 0.5 * (seeds.points[j].squaredNorm() - wi.squaredNorm());
        if (!clip_cell(cell, diff, off, {PlaneTag::Bisector, j}, eps)) break;
        reach = cell.max_distance_to(wi);
    }
    return cell;
}

namespace {

std::vector<RestrictedCell> build_rvd_volume(const SeedSet& seeds, const Domain& domain,
                                             const TensorField& field, const RvdOptions& opts) {
    std::vector<RestrictedCell> cells(seeds.size());
    parallel_for(
        seeds.size(),
        [&](int i) {
            cells[i].seed_index = i;
            const ConvexCell cell = build_volume_cell(seeds, domain, i);
            if (!cell.empty()) {
                cells[i].simplices = decompose_cell(cell, seeds.points[i], field);
            }
        },
        opts.threads);
    return cells;
}

// ------------------------------------------------------------ surface rvd

struct SurfVertex {
    Vec3 pos;
    std::vector<PlaneTag> tags;
};
using SurfPolygon = std::vector<SurfVertex>;

struct TriangleContext {
    std::array<Vec3, 3> corner;
    std::map<int, FixedPlaneRef> fixed_geo;
    SurfPolygon initial;
};

TriangleContext make_triangle_context(const SurfaceMesh& mesh, int t) {
    TriangleContext ctx;
    const auto& tri = mesh.triangles[t];
    for (int c = 0; c < 3; ++c) ctx.corner[c] = mesh.vertices[tri[c]];

    const Vec3 n = (ctx.corner[1] - ctx.corner[0]).cross(ctx.corner[2] - ctx.corner[0]).normalized();
    const int plane_id = 4 * t;
    ctx.fixed_geo[plane_id] = FixedPlaneRef{n, n.dot(ctx.corner[0]), plane_id};
    for (int e = 0; e < 3; ++e) {
        const Vec3 p = ctx.corner[e], q = ctx.corner[(e + 1) % 3];
        const Vec3 en = (q - p).cross(n).normalized();  // points away from the triangle
        const int eid = 4 * t + 1 + e;
        ctx.fixed_geo[eid] = FixedPlaneRef{en, en.dot(p), eid};
    }
    for (int c = 0; c < 3; ++c) {
        SurfVertex v;
        v.pos = ctx.corner[c];
        add_tag(v.tags, {PlaneTag::Fixed, plane_id});
        add_tag(v.tags, {PlaneTag::Fixed, 4 * t + 1 + c});            // edge (c, c+1)
        add_tag(v.tags, {PlaneTag::Fixed, 4 * t + 1 + (c + 2) % 3});  // edge (c-1, c)
        ctx.initial.push_back(std::move(v));
    }
    return ctx;
}

// Sutherland-Hodgman on a single ring; new vertices inherit the common
// tags of their edge plus the clip tag.
bool clip_polygon(SurfPolygon& poly, const Vec3& normal, double offset, PlaneTag tag, double eps) {
    const double len = normal.norm();
    const Vec3 n = normal / len;
    const double d = offset / len;

    const int m = static_cast<int>(poly.size());
    std::vector<double> dist(m);
    std::vector<int> side(m);
    bool any_out = false, any_in = false;
    for (int i = 0; i < m; ++i) {
        dist[i] = n.dot(poly[i].pos) - d;
        side[i] = dist[i] > eps ? 1 : (dist[i] < -eps ? -1 : 0);
        any_out |= side[i] == 1;
        any_in |= side[i] == -1;
    }
    if (!any_out) {
        for (int i = 0; i < m; ++i) {
            if (side[i] == 0) add_tag(poly[i].tags, tag);
        }
        return true;
    }
    if (!any_in) {
        poly.clear();
        return false;
    }

    SurfPolygon out;
    out.reserve(m + 2);
    auto cut = [&](int a, int b) {
        const double t = dist[a] / (dist[a] - dist[b]);
        SurfVertex v;
        v.pos = poly[a].pos + t * (poly[b].pos - poly[a].pos);
        v.tags = common_tags(poly[a].tags, poly[b].tags);
        add_tag(v.tags, tag);
        return v;
    };
    for (int t = 0; t < m; ++t) {
        const int a = t, b = (t + 1) % m;
        if (side[b] <= 0) {
            if (side[a] > 0 && side[b] < 0) out.push_back(cut(a, b));
            SurfVertex kept = poly[b];
            if (side[b] == 0) add_tag(kept.tags, tag);
            out.push_back(std::move(kept));
        } else if (side[a] < 0) {
            out.push_back(cut(a, b));
        }
    }
    if (out.size() < 3) {
        poly.clear();
        return false;
    }
    poly = std::move(out);
    return true;
}

SurfPolygon restrict_triangle_to_seed(const TriangleContext& ctx, const SeedSet& seeds, int i,
                                      double eps) {
    const Vec3 wi = seeds.points[i];
    SurfPolygon poly = ctx.initial;

    std::vector<int> order;
    order.reserve(seeds.size() - 1);
    for (int j = 0; j < seeds.size(); ++j) {
        if (j != i) order.push_back(j);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double da = (seeds.points[a] - wi).squaredNorm();
        const double db = (seeds.points[b] - wi).squaredNorm();
        return da != db ? da < db : a < b;
    });

    auto reach = [&] {
        double r = 0.0;
        for (const auto& v : poly) r = std::max(r, (v.pos - wi).norm());
        return r;
    };
    double rmax = reach();
    for (int j : order) {
        const Vec3 diff = seeds.points[j] - wi;
        if (0.5 * diff.norm() > rmax) break;
        const double off = 0.5 * (seeds.points[j].squaredNorm() - wi.squaredNorm());
        if (!clip_polygon(poly, diff, off, {PlaneTag::Bisector, j}, eps)) break;
        rmax = reach();
    }
    return poly;
}

double polygon_area(const SurfPolygon& poly) {
    if (poly.size() < 3) return 0.0;
    Vec3 acc = Vec3::Zero();
    for (std::size_t t = 1; t + 1 < poly.size(); ++t) {
        acc += (poly[t].pos - poly[0].pos).cross(poly[t + 1].pos - poly[0].pos);
    }
    return 0.5 * acc.norm();
}

std::vector<RestrictedCell> build_rvd_surface(const SeedSet& seeds, const Domain& domain,
                                              const TensorField& field, const RvdOptions& opts) {
    const double eps = 1e-12 * domain.scale;
    const int nt = static_cast<int>(domain.mesh.triangles.size());

    // Pieces are produced per triangle in parallel, then concatenated per
    // seed in triangle order so the result is deterministic.
    std::vector<std::vector<std::pair<int, std::vector<IntegrationSimplex>>>> per_tri(nt);
    parallel_for(
        nt,
        [&](int t) {
            const TriangleContext ctx = make_triangle_context(domain.mesh, t);
            const double area_eps = 1e-14 * domain.scale * domain.scale;
            for (int i = 0; i < seeds.size(); ++i) {
                SurfPolygon poly = restrict_triangle_to_seed(ctx, seeds, i, eps);
                if (poly.size() < 3 || polygon_area(poly) <= area_eps) continue;

                std::vector<VertexProvenance> prov(poly.size());
                for (std::size_t v = 0; v < poly.size(); ++v) {
                    prov[v] = classify_provenance(poly[v].tags, ctx.fixed_geo);
                }
                const int mring = static_cast<int>(poly.size());
                int root = 0;
                for (int v = 1; v < mring; ++v) {
                    if (prov[v].order_key() < prov[root].order_key()) root = v;
                }
                std::vector<IntegrationSimplex> tris;
                for (int v = 1; v + 1 < mring; ++v) {
                    const int ia = (root + v) % mring, ib = (root + v + 1) % mring;
                    IntegrationSimplex s = IntegrationSimplex::triangle(
                        seeds.points[i], poly[root].pos, poly[ia].pos, poly[ib].pos);
                    s.frame = field.eval((poly[root].pos + poly[ia].pos + poly[ib].pos) / 3.0);
                    s.provenance = {prov[root], prov[ia], prov[ib]};
                    tris.push_back(std::move(s));
                }
                per_tri[t].emplace_back(i, std::move(tris));
            }
        },
        opts.threads);

    std::vector<RestrictedCell> cells(seeds.size());
    for (int i = 0; i < seeds.size(); ++i) cells[i].seed_index = i;
    for (int t = 0; t < nt; ++t) {
        for (auto& [i, tris] : per_tri[t]) {
            for (auto& s : tris) cells[i].simplices.push_back(std::move(s));
        }
    }
    return cells;
}

}  // namespace

std::vector<RestrictedCell> build_rvd(const SeedSet& seeds, const Domain& domain,
                                      const TensorField& field, const RvdOptions& opts) {
    return domain.kind == Domain::Kind::Volume ? build_rvd_volume(seeds, domain, field, opts)
                                               : build_rvd_surface(seeds, domain, field, opts);
}

std::vector<CellPolygons> build_cell_polygons(const SeedSet& seeds, const Domain& domain) {
    std::vector<CellPolygons> out(seeds.size());
    const double eps = 1e-12 * domain.scale;
    for (int i = 0; i < seeds.size(); ++i) {
        out[i].seed_index = i;
        if (domain.kind == Domain::Kind::Volume) {
            const ConvexCell cell = build_volume_cell(seeds, domain, i);
            for (const auto& f : cell.faces) {
                std::vector<Vec3> ring;
                ring.reserve(f.ring.size());
                for (int id : f.ring) ring.push_back(cell.vertices[id].pos);
                out[i].rings.push_back(std::move(ring));
            }
        } else {
            for (int t = 0; t < static_cast<int>(domain.mesh.triangles.size()); ++t) {
                const TriangleContext ctx = make_triangle_context(domain.mesh, t);
                SurfPolygon poly = restrict_triangle_to_seed(ctx, seeds, i, eps);
                if (poly.size() < 3) continue;
                std::vector<Vec3> ring;
                ring.reserve(poly.size());
                for (const auto& v : poly) ring.push_back(v.pos);
                out[i].rings.push_back(std::move(ring));
            }
        }
    }
    return out;
}

}  // namespace lpcvt
