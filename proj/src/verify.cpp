#include "lpcvt/verify.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "lpcvt/optimizer.hpp"
#include "lpcvt/oracles.hpp"
#include "lpcvt/simplex_gradient.hpp"

namespace lpcvt {

namespace {

// Floor energy of the deterministic 100-seed cube benchmark, frozen from
// a 2000-iteration reference run of the same configuration. The benchmark
// seed is pinned independently of VerifyOptions so the floor stays valid.
constexpr std::uint64_t kBenchmarkSeed = 20240717;
constexpr double kHundredSeedFloor = 1.1446664048801019e-02;

double rel_err(double got, double want) {
    const double denom = std::max({std::abs(got), std::abs(want), 1e-300});
    return std::abs(got - want) / denom;
}

double grad_rel_err(const Eigen::MatrixX3d& a, const Eigen::MatrixX3d& b) {
    const double denom = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), 1e-300});
    return (a - b).cwiseAbs().maxCoeff() / denom;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

Vec3 rand_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return {u(rng), u(rng), u(rng)};
}

AnisotropyTensor rand_spd(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Mat3 r;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) r(i, j) = n(rng);
    }
    return AnisotropyTensor::from_matrix(r.transpose() * r + Mat3::Identity());
}

FrameMatrix rand_frame(std::mt19937_64& rng) {
    return normalize_det(spectral_factor(rand_spd(rng)));
}

IntegrationSimplex rand_tet(std::mt19937_64& rng, const FrameMatrix& frame) {
    for (;;) {
        IntegrationSimplex s = IntegrationSimplex::tetrahedron(
            rand_point(rng), rand_point(rng), rand_point(rng), rand_point(rng), frame);
        if (std::abs(tetra_signed_volume(s.apex, s.vertices[0], s.vertices[1], s.vertices[2])) >
            1e-3) {
            return s;
        }
    }
}

IntegrationSimplex rand_tri(std::mt19937_64& rng, const FrameMatrix& frame) {
    for (;;) {
        IntegrationSimplex s = IntegrationSimplex::triangle(
            rand_point(rng), rand_point(rng), rand_point(rng), rand_point(rng), frame);
        if (triangle_area(s.vertices[0], s.vertices[1], s.vertices[2]) > 1e-3) return s;
    }
}

std::vector<HalfSpace> cube_halfspaces(double side) {
    std::vector<HalfSpace> hs;
    for (int axis = 0; axis < 3; ++axis) {
        hs.push_back({Vec3::Unit(axis), side});
        hs.push_back({-Vec3::Unit(axis), 0.0});
    }
    return hs;
}

Domain cube_domain(double side = 1.0) { return Domain::volume(cube_halfspaces(side)); }

SurfaceMesh cube_surface() {
    SurfaceMesh m;
    for (int z = 0; z <= 1; ++z) {
        for (int y = 0; y <= 1; ++y) {
            for (int x = 0; x <= 1; ++x) m.vertices.push_back(Vec3(x, y, z));
        }
    }
    const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                             {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
    for (const auto& q : quads) {
        m.triangles.push_back({q[0], q[1], q[2]});
        m.triangles.push_back({q[0], q[2], q[3]});
    }
    return m;
}

// All constrained-vertex systems well conditioned and seeds well
// separated: keeps finite differences on the rebuilt diagram meaningful.
bool general_position(const SeedSet& seeds, const Domain& domain, const TensorField& field) {
    for (int i = 0; i < seeds.size(); ++i) {
        for (int j = i + 1; j < seeds.size(); ++j) {
            if ((seeds.points[i] - seeds.points[j]).norm() < 2e-2) return false;
        }
    }
    try {
        const auto rvd = build_rvd(seeds, domain, field);
        for (const auto& cell : rvd) {
            for (const auto& s : cell.simplices) {
                for (const auto& prov : s.provenance) {
                    if (prov.kind == VertexProvenance::Kind::FixedVertex) continue;
                    if (vertex_system_conditioning(prov, cell.seed_index, seeds) < 1e-6) {
                        return false;
                    }
                }
            }
        }
    } catch (const Error&) {
        return false;
    }
    return true;
}

VerifyCheck max_check(const std::string& name, double value, double tol) {
    return {name, 0.0, value, tol, value <= tol};
}

// --------------------------------------------------------- criterion 1

CriterionResult criterion_exact(const VerifyOptions& opts) {
    Timer timer;
    CriterionResult cr;
    cr.index = 1;
    cr.name = "closed form vs exact moment integration";
    cr.budget_seconds = 5.0;
    std::mt19937_64 rng(mix_seed(opts.rng_seed, 1));
    const int n_cases = opts.quick ? 10 : 100;

    double worst = 0.0;
    for (int c = 0; c < n_cases; ++c) {
        const FrameMatrix f = rand_frame(rng);
        const IntegrationSimplex tet = rand_tet(rng, f);
        const IntegrationSimplex tri = rand_tri(rng, f);
        for (int p : {2, 4, 6, 8}) {
            worst = std::max(worst, rel_err(simplex_energy(tet, p), exact_simplex_integral(tet, p)));
            worst = std::max(worst, rel_err(simplex_energy(tri, p), exact_simplex_integral(tri, p)));
        }
    }
    cr.checks.push_back(max_check("max rel error, p in {2,4,6,8}, " + std::to_string(n_cases) +
                                      " tets + triangles",
                                  worst, 1e-10));
    cr.seconds = timer.seconds();
    cr.pass = cr.checks[0].pass && cr.seconds < cr.budget_seconds;
    return cr;
}

// --------------------------------------------------------- criterion 2

CriterionResult criterion_monte_carlo(const VerifyOptions& opts) {
    Timer timer;
    CriterionResult cr;
    cr.index = 2;
    cr.name = "closed form vs Monte Carlo";
    cr.budget_seconds = 30.0;
    std::mt19937_64 rng(mix_seed(opts.rng_seed, 2));
    const std::int64_t n_samples = opts.quick ? 100000 : 1000000;
    const int n_cases = opts.quick ? 4 : 10;

    double worst_sigma = 0.0;
    for (int c = 0; c < n_cases; ++c) {
        const FrameMatrix f = rand_frame(rng);
        for (const IntegrationSimplex& s : {rand_tet(rng, f), rand_tri(rng, f)}) {
            for (int p : {2, 4}) {
                const double closed = simplex_energy(s, p);
                const auto mc = mc_integrate(s, p, n_samples, mix_seed(opts.rng_seed, 100 + c),
                                             opts.threads);
                if (mc.stderr_ > 0.0) {
                    worst_sigma = std::max(worst_sigma, std::abs(closed - mc.estimate) / mc.stderr_);
                }
            }
        }
    }
    cr.checks.push_back(max_check("max |closed - MC| in standard errors", worst_sigma, 3.0));
    cr.seconds = timer.seconds();
    cr.pass = cr.checks[0].pass && cr.seconds < cr.budget_seconds;
    return cr;
}

// --------------------------------------------------------- criterion 3

CriterionResult criterion_polarization(const VerifyOptions& opts) {
    Timer timer;
    CriterionResult cr;
    cr.index = 3;
    cr.name = "polarization consistency";
    std::mt19937_64 rng(mix_seed(opts.rng_seed, 3));

    // Worked example f = x^2 + 3xy + 2y^2: coefficients of the polar form
    // recovered by probing with basis vectors must be exact.
    const std::vector<Monomial> f = {{1.0, {2, 0, 0}}, {3.0, {1, 1, 0}}, {2.0, {0, 2, 0}}};
    const StarVector ex(1, 0, 0), ey(0, 1, 0);
    const std::array<std::pair<std::array<StarVector, 2>, double>, 4> probes = {{
        {{ex, ex}, 1.0},
        {{ex, ey}, 1.5},
        {{ey, ex}, 1.5},
        {{ey, ey}, 2.0},
    }};
    bool exact = true;
    double worst_coeff = 0.0;
    for (const auto& [args, want] : probes) {
        const double got = polarization_oracle(f, std::span<const StarVector>(args));
        exact = exact && (got == want);
        worst_coeff = std::max(worst_coeff, std::abs(got - want));
    }
    cr.checks.push_back({"worked example coefficients (1, 3/2, 3/2, 2)", 0.0, worst_coeff, 0.0,
                         exact});

    const int n_cases = opts.quick ? 20 : 100;
    std::normal_distribution<double> nrm(0.0, 1.0);
    double worst = 0.0;
    for (int p : {2, 4}) {
        const std::vector<Monomial> norm_p = {
            {1.0, {p, 0, 0}}, {1.0, {0, p, 0}}, {1.0, {0, 0, p}}};
        for (int c = 0; c < n_cases; ++c) {
            std::vector<StarVector> args(p);
            for (auto& a : args) a = StarVector(nrm(rng), nrm(rng), nrm(rng));
            const double direct = polar_form(args);
            const double derived = polarization_oracle(norm_p, args);
            worst = std::max(worst, std::abs(direct - derived) /
                                        std::max(1.0, std::abs(direct)));
        }
    }
    cr.checks.push_back(max_check("derivative construction vs star-product form, p in {2,4}",
                                  worst, 1e-10));
    cr.seconds = timer.seconds();
    cr.pass = cr.checks[0].pass && cr.checks[1].pass;
    return cr;
}

// --------------------------------------------------------- criterion 4

CriterionResult criterion_simplex_gradient(const VerifyOptions& opts) {
    Timer timer;
    CriterionResult cr;
    cr.index = 4;
    cr.name = "simplex gradient vs finite differences";
    std::mt19937_64 rng(mix_seed(opts.rng_seed, 4));
    const int n_cases = opts.quick ? 20 : 200;
    const double h = 1e-6;

    auto run_dim = [&](int dim) {
        double worst = 0.0;
        const std::array<int, 3> ps = {2, 4, 6};
        for (int c = 0; c < n_cases; ++c) {
            const int p = ps[c % 3];
            const FrameMatrix f = rand_frame(rng);
            const IntegrationSimplex s = dim == 3 ? rand_tet(rng, f) : rand_tri(rng, f);

            const SimplexVertexGradient g = simplex_energy_gradient(s, p);
            Eigen::MatrixX3d analytic(4, 3);
            analytic.row(0) = g.d_apex.transpose();
            for (int v = 0; v < 3; ++v) analytic.row(v + 1) = g.d_vertices[v].transpose();

            Eigen::MatrixX3d pack(4, 3);
            pack.row(0) = s.apex.transpose();
            for (int v = 0; v < 3; ++v) pack.row(v + 1) = s.vertices[v].transpose();
            const auto fd = fd_gradient(
                [&](const Eigen::MatrixX3d& q) {
                    IntegrationSimplex probe = s;
                    probe.apex = q.row(0).transpose();
                    for (int v = 0; v < 3; ++v) probe.vertices[v] = q.row(v + 1).transpose();
                    return simplex_energy(probe, p);
                },
                pack, h);
            worst = std::max(worst, grad_rel_err(analytic, fd));
        }
        return worst;
    };

    cr.checks.push_back(
        max_check("tetrahedra, " + std::to_string(n_cases) + " random cases", run_dim(3), 1e-5));
    cr.checks.push_back(
        max_check("triangles, " + std::to_string(n_cases) + " random cases", run_dim(2), 1e-5));
    cr.seconds = timer.seconds();
    cr.pass = cr.checks[0].pass && cr.checks[1].pass;
    return cr;
}

// --------------------------------------------------------- criterion 5

CriterionResult criterion_pipeline_gradient(const VerifyOptions& opts) {
    Timer timer;
    CriterionResult cr;
    cr.index = 5;
    cr.name = "pipeline gradient vs finite differences";
    cr.budget_seconds = 120.0;
    const Domain domain = cube_domain();
    const TensorField field = TensorField::constant(AnisotropyTensor::identity());
    const int n_configs = opts.quick ? 4 : 20;
    const EvalOptions eopts{true, opts.threads};

    double worst = 0.0;
    for (int c = 0; c < n_configs; ++c) {
        const int p = (c % 2 == 0) ? 2 : 4;
        SeedSet seeds;
        for (std::uint64_t attempt = 0;; ++attempt) {
            std::mt19937_64 rng(mix_seed(opts.rng_seed, 500 + 97 * c + attempt));
            std::uniform_int_distribution<int> kd(10, 30);
            const int k = kd(rng);
            seeds = sample_seeds(domain, k, mix_seed(opts.rng_seed, 1000 + 97 * c + attempt));
            if (general_position(seeds, domain, field)) break;
        }
        const auto res = evaluate(seeds, domain, field, p, eopts);
        const auto fd = fd_gradient(
            [&](const Eigen::MatrixX3d& q) {
                return evaluate(SeedSet::from_matrix(q), domain, field, p, eopts).energy;
            },
            seeds.as_matrix(), 1e-6);
        worst = std::max(worst, grad_rel_err(res.grad.g, fd));
    }
    cr.checks.push_back(max_check("max rel error over " + std::to_string(n_configs) +
                                      " configs of 10-30 seeds, p in {2,4}",
                                  worst, 1e-4));
    cr.seconds = timer.seconds();
    cr.pass = cr.checks[0].pass && cr.seconds < cr.budget_seconds;
    return cr;
}

// --------------------------------------------------------- criterion 6

CriterionResult criterion_cvt_equivalence(const VerifyOptions& opts) {
    Timer timer;
    CriterionResult cr;
    cr.index = 6;
    cr.name = "p=2 gradient equals 2 m_i (w_i - c_i)";
    const Domain domain = cube_domain();
    const TensorField field = TensorField::constant(AnisotropyTensor::identity());
    const SeedSet seeds = sample_seeds(domain, 20, mix_seed(opts.rng_seed, 6));

    const auto res = evaluate(seeds, domain, field, 2, {true, opts.threads});
    const auto rvd = build_rvd(seeds, domain, field);

    Eigen::MatrixX3d classic = Eigen::MatrixX3d::Zero(seeds.size(), 3);
    for (const auto& cell : rvd) {
        double mass = 0.0;
        Vec3 moment = Vec3::Zero();
        for (const auto& s : cell.simplices) {
            const double v =
                tetra_signed_volume(s.apex, s.vertices[0], s.vertices[1], s.vertices[2]);
            mass += v;
            moment += v * (s.apex + s.vertices[0] + s.vertices[1] + s.vertices[2]) / 4.0;
        }
        if (mass > 0.0) {
            const Vec3 centroid = moment / mass;
            classic.row(cell.seed_index) =
                (2.0 * mass * (seeds.points[cell.seed_index] - centroid)).transpose();
        }
    }
    cr.checks.push_back(
        max_check("max rel difference over 20 seeds", grad_rel_err(res.grad.g, classic), 1e-9));
    cr.seconds = timer.seconds();
    cr.pass = cr.checks[0].pass;
    return cr;
}

// --------------------------------------------------------- criterion 7

CriterionResult criterion_circumcenter(const VerifyOptions& opts) {
    Timer timer;
    CriterionResult cr;
    cr.index = 7;
    cr.name = "circumcenter and its Jacobian";
    std::mt19937_64 rng(mix_seed(opts.rng_seed, 7));
    const int n_cases = opts.quick ? 100 : 1000;

    double worst_eq = 0.0, worst_id = 0.0, worst_fd = 0.0;
    int done = 0;
    while (done < n_cases) {
        const Vec3 wi = rand_point(rng), wj = rand_point(rng), wk = rand_point(rng),
                   wl = rand_point(rng);
        const auto sys = CircumcenterSystem::from_seeds(wi, wj, wk, wl);
        double scale3 = 1.0;
        double scale = 0.0;
        for (int r = 0; r < 3; ++r) {
            scale3 *= sys.a.row(r).norm();
            scale = std::max(scale, sys.a.row(r).norm());
        }
        if (std::abs(sys.det()) < 5e-2 * scale3) continue;  // enforce general position
        ++done;

        const Vec3 c = circumcenter(wi, wj, wk, wl);
        const double ri = (c - wi).norm();
        for (const Vec3& w : {wj, wk, wl}) {
            worst_eq = std::max(worst_eq, std::abs((c - w).norm() - ri) / scale);
        }

        const auto blocks = circumcenter_jacobian(wi, wj, wk, wl);
        const Mat3 sum = blocks[0] + blocks[1] + blocks[2] + blocks[3];
        worst_id = std::max(worst_id, (sum - Mat3::Identity()).cwiseAbs().maxCoeff());

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
            Eigen::MatrixX3d analytic(4, 3);
            for (int s = 0; s < 4; ++s) analytic.row(s) = blocks[s].row(coord);
            worst_fd = std::max(worst_fd, grad_rel_err(analytic, fd));
        }
    }
    cr.checks.push_back(max_check("equidistance residual / scale, " + std::to_string(n_cases) +
                                      " quadruples",
                                  worst_eq, 1e-10));
    cr.checks.push_back(max_check("Jacobian blocks sum to identity", worst_id, 1e-10));
    cr.checks.push_back(max_check("Jacobian vs finite differences", worst_fd, 1e-6));
    cr.seconds = timer.seconds();
    cr.pass = cr.checks[0].pass && cr.checks[1].pass && cr.checks[2].pass;
    return cr;
}

// --------------------------------------------------------- criterion 8

CriterionResult criterion_partition(const VerifyOptions& opts) {
    Timer timer;
    CriterionResult cr;
    cr.index = 8;
    cr.name = "cells tile the domain";
    const TensorField field = TensorField::constant(AnisotropyTensor::identity());

    {
        const Domain domain = cube_domain();
        const SeedSet seeds = sample_seeds(domain, 50, mix_seed(opts.rng_seed, 8));
        const auto rvd = build_rvd(seeds, domain, field, {opts.threads});
        double total = 0.0;
        for (const auto& cell : rvd) {
            for (const auto& s : cell.simplices) {
                total += std::abs(
                    tetra_signed_volume(s.apex, s.vertices[0], s.vertices[1], s.vertices[2]));
            }
        }
        cr.checks.push_back(max_check("50-seed cube: |sum cell volumes - 1|",
                                      rel_err(total, domain.measure()), 1e-9));
    }
    {
        const Domain domain = Domain::surface(cube_surface());
        const SeedSet seeds = sample_seeds(domain, 50, mix_seed(opts.rng_seed, 88));
        const auto rvd = build_rvd(seeds, domain, field, {opts.threads});
        double total = 0.0;
        for (const auto& cell : rvd) {
            for (const auto& s : cell.simplices) {
                total += triangle_area(s.vertices[0], s.vertices[1], s.vertices[2]);
            }
        }
        cr.checks.push_back(max_check("50-seed cube surface: area sum error",
                                      rel_err(total, domain.measure()), 1e-9));
    }
    cr.seconds = timer.seconds();
    cr.pass = cr.checks[0].pass && cr.checks[1].pass;
    return cr;
}

// --------------------------------------------------------- criterion 9

CriterionResult criterion_homogeneity(const VerifyOptions& opts) {
    Timer timer;
    CriterionResult cr;
    cr.index = 9;
    cr.name = "energy scaling homogeneity";
    const TensorField field = TensorField::constant(AnisotropyTensor::identity());
    const Domain base = cube_domain();
    const SeedSet seeds = sample_seeds(base, 15, mix_seed(opts.rng_seed, 9));

    double worst = 0.0;
    for (int p : {2, 4}) {
        const double f1 = evaluate(seeds, base, field, p, {true, opts.threads}).energy;
        for (double s : {0.5, 2.0}) {
            const Domain scaled = cube_domain(s);
            SeedSet sseeds = seeds;
            for (auto& pt : sseeds.points) pt *= s;
            const double fs = evaluate(sseeds, scaled, field, p, {true, opts.threads}).energy;
            worst = std::max(worst, rel_err(fs, std::pow(s, p + 3) * f1));
        }
    }
    cr.checks.push_back(max_check("F(sW, s domain) vs s^(p+3) F, s in {1/2, 2}", worst, 1e-9));
    cr.seconds = timer.seconds();
    cr.pass = cr.checks[0].pass;
    return cr;
}

// -------------------------------------------------------- criterion 10

CriterionResult criterion_optimization(const VerifyOptions& opts) {
    Timer timer;
    CriterionResult cr;
    cr.index = 10;
    cr.name = "optimization descent";
    const Domain domain = cube_domain();
    const TensorField field = TensorField::constant(AnisotropyTensor::identity());

    {
        OptimizerConfig cfg;
        cfg.p = 2;
        cfg.max_iters = 50;
        cfg.grad_tol = 1e-10;
        cfg.threads = opts.threads;
        const SeedSet start = sample_seeds(domain, 1, mix_seed(opts.rng_seed, 10));
        const auto res = optimize(start, domain, field, cfg);
        const double dist = (res.seeds.points[0] - Vec3(0.5, 0.5, 0.5)).norm();
        cr.checks.push_back(max_check("single seed distance to cube center", dist, 1e-6));
    }
    {
        OptimizerConfig cfg;
        cfg.p = 2;
        cfg.max_iters = opts.quick ? 40 : 200;
        cfg.grad_tol = 1e-12;
        cfg.threads = opts.threads;
        const SeedSet start = sample_seeds(domain, 100, mix_seed(kBenchmarkSeed, 11));
        const auto res = optimize(start, domain, field, cfg);
        const double f0 = res.trace.front().energy;
        const double fend = res.trace.back().energy;
        const double achieved = (f0 - fend) / (f0 - kHundredSeedFloor);
        // pass when achieved >= 0.9; stored as a shortfall so 0 means ok
        cr.checks.push_back(max_check("100-seed run: shortfall below 90% of attainable descent",
                                      std::max(0.0, 0.9 - achieved), 0.0));
    }
    cr.seconds = timer.seconds();
    cr.pass = cr.checks[0].pass && cr.checks[1].pass;
    return cr;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts) {
    std::vector<CriterionResult> out;
    out.push_back(criterion_exact(opts));
    out.push_back(criterion_monte_carlo(opts));
    out.push_back(criterion_polarization(opts));
    out.push_back(criterion_simplex_gradient(opts));
    out.push_back(criterion_pipeline_gradient(opts));
    out.push_back(criterion_cvt_equivalence(opts));
    out.push_back(criterion_circumcenter(opts));
    out.push_back(criterion_partition(opts));
    out.push_back(criterion_homogeneity(opts));
    out.push_back(criterion_optimization(opts));
    return out;
}

std::vector<VerifyCheck> run_verification(const VerifyOptions& opts) {
    std::vector<VerifyCheck> checks;

    // Module-level spot values first.
    {
        const auto tet = IntegrationSimplex::tetrahedron(Vec3::Zero(), Vec3::UnitX(),
                                                         Vec3::UnitY(), Vec3::UnitZ());
        const double e = simplex_energy(tet, 2);
        checks.push_back({"unit tetra energy, p=2", 0.05, e, 1e-15, std::abs(e - 0.05) <= 1e-15});

        const auto tri = IntegrationSimplex::triangle(Vec3::Zero(), Vec3::Zero(), Vec3::UnitX(),
                                                      Vec3::UnitY());
        const double et = simplex_energy(tri, 2);
        checks.push_back(
            {"unit triangle energy, p=2", 1.0 / 6, et, 1e-15, std::abs(et - 1.0 / 6) <= 1e-15});

        const double dm = dirichlet_moment(2, 0, 0, 3);
        checks.push_back(
            {"unit simplex moment x^2", 1.0 / 60, dm, 1e-18, std::abs(dm - 1.0 / 60) <= 1e-18});
    }
    {
        std::mt19937_64 rng(mix_seed(opts.rng_seed, 42));
        const int n = opts.quick ? 100 : 1000;
        double worst = 0.0;
        for (int c = 0; c < n; ++c) {
            const AnisotropyTensor g = rand_spd(rng);
            const FrameMatrix m = spectral_factor(g);
            worst = std::max(worst,
                             (m.m.transpose() * m.m - g.matrix()).cwiseAbs().maxCoeff());
        }
        checks.push_back({"spectral factor reconstruction, " + std::to_string(n) + " tensors",
                          0.0, worst, 1e-10, worst <= 1e-10});
    }

    for (const auto& cr : run_acceptance(opts)) {
        for (const auto& c : cr.checks) checks.push_back(c);
        if (cr.budget_seconds > 0.0) {
            checks.push_back({cr.name + ": runtime seconds", 0.0, cr.seconds, cr.budget_seconds,
                              cr.seconds < cr.budget_seconds});
        }
    }
    return checks;
}

std::string format_report(const std::vector<VerifyCheck>& checks) {
    std::ostringstream os;
    std::size_t width = 0;
    for (const auto& c : checks) width = std::max(width, c.name.size());
    os << std::left;
    for (const auto& c : checks) {
        os.width(static_cast<std::streamsize>(width));
        os << c.name;
        os << "  expected " << std::scientific << c.expected << "  got " << c.value
           << "  tol " << c.tolerance << (c.pass ? "  PASS" : "  FAIL") << "\n";
    }
    int failed = 0;
    for (const auto& c : checks) failed += c.pass ? 0 : 1;
    os << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) FAILED")
       << " (" << checks.size() << " total)\n";
    return os.str();
}

}  // namespace lpcvt
