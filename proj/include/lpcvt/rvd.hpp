#ifndef LPCVT_RVD_HPP
#define LPCVT_RVD_HPP

#include <map>
#include <vector>

#include "lpcvt/simplex.hpp"

namespace lpcvt {

/// Generator points being optimized.
struct SeedSet {
    std::vector<Vec3> points;

    static SeedSet from_points(std::vector<Vec3> pts);

    int size() const { return static_cast<int>(points.size()); }
    Eigen::MatrixX3d as_matrix() const;
    static SeedSet from_matrix(const Eigen::MatrixX3d& m);
};

/// Index of the seed nearest to x; ties go to the lowest index.
int nearest_seed(const SeedSet& seeds, const Vec3& x);

/// Deterministic uniform perturbation of every coordinate by up to
/// +-magnitude. The documented mitigation for cospherical seed
/// configurations whose Voronoi vertices are degenerate.
SeedSet jitter_seeds(const SeedSet& seeds, double magnitude, std::uint64_t rng_seed);

/// Half-space normal . x <= offset.
struct HalfSpace {
    Vec3 normal;
    double offset;
};

struct SurfaceMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    double total_area() const;
};

/// A plane participating in a cell vertex's definition: either one of the
/// domain's fixed planes or the bisector toward another seed.
struct PlaneTag {
    enum Type : int { Fixed = 0, Bisector = 1 };
    int type = Fixed;
    int index = -1;
    friend auto operator<=>(const PlaneTag&, const PlaneTag&) = default;
};

/// Convex polytope with shared vertices, outward-wound face rings, and a
/// defining-plane tag set per vertex. Produced by half-space intersection
/// and consumed by bisector clipping.
struct ConvexCell {
    struct Vertex {
        Vec3 pos;
        std::vector<PlaneTag> tags;  // sorted
    };
    struct Face {
        PlaneTag tag;
        std::vector<int> ring;  // outward winding
    };
    std::vector<Vertex> vertices;
    std::vector<Face> faces;
    /// Geometry of the fixed planes seen so far, keyed by tag index.
    std::map<int, FixedPlaneRef> fixed_planes;

    bool empty() const { return faces.empty(); }
    double volume() const;  // fan from the origin over outward faces
    double max_distance_to(const Vec3& x) const;
};

/// Clips the cell by normal . x <= offset (normal need not be unit; it is
/// normalized internally). Returns false when the cell becomes empty.
/// eps is the absolute on-plane classification distance.
bool clip_cell(ConvexCell& cell, const Vec3& normal, double offset, PlaneTag tag, double eps);

/// Builds the vertex/face representation of the intersection of the given
/// half-spaces. Throws UnboundedPolytope or Error (empty interior).
ConvexCell make_polytope(const std::vector<HalfSpace>& halfspaces);

/// Volume (convex polytope) or surface (triangle mesh) integration domain.
struct Domain {
    enum class Kind { Volume, Surface };
    Kind kind = Kind::Volume;
    std::vector<HalfSpace> halfspaces;
    SurfaceMesh mesh;
    ConvexCell polytope;   // volume kind: prebuilt from halfspaces
    double scale = 1.0;    // bounding-box diagonal

    static Domain volume(std::vector<HalfSpace> hs);
    static Domain surface(SurfaceMesh mesh);

    /// Total volume or area.
    double measure() const;
    bool contains(const Vec3& x) const;  // volume kind only
};

/// Bisector constraint system for a cell vertex. Rows of `a` are the seed
/// differences; rows may be replaced by fixed planes for constrained
/// vertices.
struct CircumcenterSystem {
    Mat3 a;
    Vec3 b;

    static CircumcenterSystem from_seeds(const Vec3& wi, const Vec3& wj, const Vec3& wk,
                                         const Vec3& wl);
    double det() const { return a.determinant(); }
};

/// Intersection of the three bisectors between w_i and each of w_j, w_k,
/// w_l: the circumcenter of the four points. Throws NearDegenerate when
/// the points are coplanar within tolerance.
Vec3 circumcenter(const Vec3& wi, const Vec3& wj, const Vec3& wk, const Vec3& wl);

/// Jacobian blocks d(circumcenter)/d(w) for the four defining seeds, in
/// the order (i, j, k, l). Blocks for all other seeds are zero; the four
/// returned blocks sum to the identity.
std::array<Mat3, 4> circumcenter_jacobian(const Vec3& wi, const Vec3& wj, const Vec3& wk,
                                          const Vec3& wl);

/// Per-seed Jacobian blocks of one cell vertex.
struct VertexJacobian {
    int count = 0;
    std::array<std::pair<int, Mat3>, 4> blocks;

    void add(int seed, const Mat3& m) { blocks[count++] = {seed, m}; }
};

/// Differentiates the vertex through its defining constraint system:
/// bisector rows contribute (C - w_i)^t / (w_j - C)^t rows, fixed-plane
/// rows contribute zero. `owner` is the seed of the cell the vertex
/// belongs to.
VertexJacobian constrained_vertex_jacobian(const VertexProvenance& prov, int owner,
                                           const SeedSet& seeds);

/// |det A| of the vertex's constraint system divided by the product of
/// its row norms (1 for apex/fixed vertices). Small values flag
/// configurations where the vertex position is numerically unstable.
double vertex_system_conditioning(const VertexProvenance& prov, int owner, const SeedSet& seeds);

/// One seed's share of the restricted Voronoi diagram, already decomposed
/// into integration simplices.
struct RestrictedCell {
    int seed_index = -1;
    std::vector<IntegrationSimplex> simplices;
};

struct RvdOptions {
    int threads = 0;  // 0 = hardware concurrency
};

/// Clips each seed's Voronoi region against the domain (volume mode) or
/// restricts it to the mesh triangles (surface mode) and decomposes the
/// result into integration simplices with vertex provenance.
std::vector<RestrictedCell> build_rvd(const SeedSet& seeds, const Domain& domain,
                                      const TensorField& field, const RvdOptions& opts = {});

/// Fan-triangulates each facet of a convex cell and cones to the apex.
/// Tetrahedra are emitted positively oriented; provenance is classified
/// from the vertices' defining-plane tags. Fan roots are the
/// lowest-provenance vertices, keeping the decomposition deterministic.
std::vector<IntegrationSimplex> decompose_cell(const ConvexCell& cell, const Vec3& apex,
                                               const TensorField& field);

/// The domain polytope clipped by seed i's bisector half-spaces.
ConvexCell build_volume_cell(const SeedSet& seeds, const Domain& domain, int i);

/// Cell boundary polygons for export and geometric tests. Volume mode:
/// whole cell boundaries; surface mode: restricted polygons per triangle.
struct CellPolygons {
    int seed_index = -1;
    std::vector<std::vector<Vec3>> rings;
};
std::vector<CellPolygons> build_cell_polygons(const SeedSet& seeds, const Domain& domain);

}  // namespace lpcvt

#endif
