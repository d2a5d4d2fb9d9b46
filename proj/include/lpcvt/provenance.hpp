#ifndef LPCVT_PROVENANCE_HPP
#define LPCVT_PROVENANCE_HPP

#include <Eigen/Dense>
#include <array>
#include <tuple>

namespace lpcvt {

/// A plane that does not move with the seeds: a domain half-space
/// boundary, a mesh triangle's supporting plane, or an auxiliary plane
/// through a mesh edge. `id` is a stable identifier used for deterministic
/// ordering only.
struct FixedPlaneRef {
    Eigen::Vector3d normal = Eigen::Vector3d::Zero();
    double offset = 0.0;  // normal . x = offset on the plane
    int id = -1;
};

/// Combinatorial origin of a cell vertex: which bisectors and fixed planes
/// define it. This determines the vertex's Jacobian with respect to the
/// seeds. Bisectors are between the owning cell's seed and `seeds[n]`;
/// the owner index itself is supplied by the cell.
struct VertexProvenance {
    enum class Kind {
        SeedApex,             // the cell's own generator
        ThreeBisectors,       // Voronoi vertex: circumcenter of a Delaunay tet
        TwoBisectorsOnePlane, // bisector pair meeting a fixed plane
        OneBisectorTwoPlanes, // bisector meeting a fixed edge/plane pair
        FixedVertex           // domain polytope corner or mesh vertex
    };

    Kind kind = Kind::FixedVertex;
    std::array<int, 3> seeds = {-1, -1, -1};      // neighbor seeds, ascending
    std::array<FixedPlaneRef, 2> planes = {};     // fixed planes used by the system
    std::array<int, 3> plane_ids = {-1, -1, -1};  // all fixed-plane ids, ascending

    static VertexProvenance apex() {
        VertexProvenance p;
        p.kind = Kind::SeedApex;
        return p;
    }
    static VertexProvenance fixed(std::array<int, 3> ids = {-1, -1, -1}) {
        VertexProvenance p;
        p.kind = Kind::FixedVertex;
        p.plane_ids = ids;
        return p;
    }
    static VertexProvenance three_bisectors(int j, int k, int l) {
        VertexProvenance p;
        p.kind = Kind::ThreeBisectors;
        p.seeds = {j, k, l};
        return p;
    }
    static VertexProvenance two_bisectors_one_plane(int j, int k, const FixedPlaneRef& plane) {
        VertexProvenance p;
        p.kind = Kind::TwoBisectorsOnePlane;
        p.seeds = {j, k, -1};
        p.planes[0] = plane;
        p.plane_ids = {plane.id, -1, -1};
        return p;
    }
    static VertexProvenance one_bisector_two_planes(int j, const FixedPlaneRef& p1,
                                                    const FixedPlaneRef& p2) {
        VertexProvenance p;
        p.kind = Kind::OneBisectorTwoPlanes;
        p.seeds = {j, -1, -1};
        p.planes = {p1, p2};
        p.plane_ids = {p1.id, p2.id, -1};
        return p;
    }

    int bisector_count() const {
        switch (kind) {
            case Kind::ThreeBisectors: return 3;
            case Kind::TwoBisectorsOnePlane: return 2;
            case Kind::OneBisectorTwoPlanes: return 1;
            default: return 0;
        }
    }

    /// Total order used to pick deterministic fan roots.
    auto order_key() const {
        return std::make_tuple(static_cast<int>(kind), seeds, plane_ids);
    }
};

inline bool operator<(const VertexProvenance& a, const VertexProvenance& b) {
    return a.order_key() < b.order_key();
}

}  // namespace lpcvt

#endif
