#include <doctest.h>

#include <random>

#include "lpcvt/optimizer.hpp"
#include "lpcvt/oracles.hpp"

using namespace lpcvt;

namespace {

Domain cube_domain() {
    std::vector<HalfSpace> hs;
    for (int axis = 0; axis < 3; ++axis) {
        hs.push_back({Vec3::Unit(axis), 1.0});
        hs.push_back({-Vec3::Unit(axis), 0.0});
    }
    return Domain::volume(hs);
}

const TensorField kIdentityField = TensorField::constant(AnisotropyTensor::identity());

}  // namespace

TEST_CASE("energy of a centered seed in the unit cube") {
    const auto domain = cube_domain();
    const auto seeds = SeedSet::from_points({Vec3(0.5, 0.5, 0.5)});
    const auto res = evaluate(seeds, domain, kIdentityField, 2);
    // integral of |x - c|^2 over the cube: 3 * 1/12
    CHECK(res.energy == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(res.grad.inf_norm() <= 1e-10);
    CHECK(res.orphaned_seeds.empty());
}

TEST_CASE("corner seed is pulled toward the centroid") {
    const auto domain = cube_domain();
    const auto seeds = SeedSet::from_points({Vec3(0.0, 0.0, 0.0)});
    const auto res = evaluate(seeds, domain, kIdentityField, 2);
    CHECK((res.grad.g.row(0).transpose() - Vec3(-1, -1, -1)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("pipeline gradient matches finite differences on a small system") {
    const auto domain = cube_domain();
    const auto seeds = SeedSet::from_points({Vec3(0.23, 0.31, 0.42), Vec3(0.71, 0.28, 0.55),
                                             Vec3(0.39, 0.74, 0.33), Vec3(0.62, 0.61, 0.78),
                                             Vec3(0.18, 0.57, 0.71), Vec3(0.81, 0.79, 0.21),
                                             Vec3(0.47, 0.12, 0.76), Vec3(0.55, 0.48, 0.15)});
    for (int p : {2, 4}) {
        const auto res = evaluate(seeds, domain, kIdentityField, p);
        const auto fd = fd_gradient(
            [&](const Eigen::MatrixX3d& q) {
                return evaluate(SeedSet::from_matrix(q), domain, kIdentityField, p).energy;
            },
            seeds.as_matrix(), 1e-6);
        const double denom = std::max(res.grad.g.cwiseAbs().maxCoeff(), 1e-300);
        CHECK((res.grad.g - fd).cwiseAbs().maxCoeff() / denom <= 1e-4);
    }
}

TEST_CASE("constant anisotropic field: gradient stays exact") {
    // The frame is the same for every simplex, so the frozen-frame chain
    // rule is the true derivative; finite differences must agree.
    const auto domain = cube_domain();
    AnisotropyTensor g;
    g.g11 = 4.0;
    g.g22 = 1.0;
    g.g33 = 0.25;
    g.g12 = 0.3;
    const auto field = TensorField::constant(g);
    const auto seeds = SeedSet::from_points({Vec3(0.23, 0.31, 0.42), Vec3(0.71, 0.28, 0.55),
                                             Vec3(0.39, 0.74, 0.33), Vec3(0.62, 0.61, 0.78),
                                             Vec3(0.18, 0.57, 0.71)});
    for (int p : {2, 4}) {
        const auto res = evaluate(seeds, domain, field, p);
        CHECK(res.energy > 0.0);
        const auto fd = fd_gradient(
            [&](const Eigen::MatrixX3d& q) {
                return evaluate(SeedSet::from_matrix(q), domain, field, p).energy;
            },
            seeds.as_matrix(), 1e-6);
        const double denom = std::max(res.grad.g.cwiseAbs().maxCoeff(), 1e-300);
        CHECK((res.grad.g - fd).cwiseAbs().maxCoeff() / denom <= 1e-5);
    }
}

TEST_CASE("surface pipeline gradient matches finite differences") {
    SurfaceMesh m;
    m.vertices = {Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(2, 2, 0), Vec3(0, 2, 0), Vec3(1, 1, 0.8)};
    m.triangles = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
    const auto domain = Domain::surface(m);
    const auto seeds = SeedSet::from_points({Vec3(0.4, 0.5, 0.2), Vec3(1.5, 0.6, 0.3),
                                             Vec3(1.6, 1.5, 0.25), Vec3(0.5, 1.4, 0.35),
                                             Vec3(1.0, 1.0, 0.9)});
    for (int p : {2, 4}) {
        const auto res = evaluate(seeds, domain, kIdentityField, p);
        CHECK(res.energy > 0.0);
        const auto fd = fd_gradient(
            [&](const Eigen::MatrixX3d& q) {
                return evaluate(SeedSet::from_matrix(q), domain, kIdentityField, p).energy;
            },
            seeds.as_matrix(), 1e-6);
        const double denom = std::max(res.grad.g.cwiseAbs().maxCoeff(), 1e-300);
        CHECK((res.grad.g - fd).cwiseAbs().maxCoeff() / denom <= 1e-4);
    }
}

TEST_CASE("nearest-lookup field evaluates finitely and deterministically") {
    // Per-simplex frames from a varying field: the energy is well defined;
    // the frozen-frame gradient is an approximation there, so only the
    // evaluation contract is asserted.
    const auto domain = cube_domain();
    AnisotropyTensor g0;
    g0.g11 = 4.0;
    AnisotropyTensor g1;
    g1.g22 = 9.0;
    const auto field = TensorField::nearest({{Vec3(0.2, 0.5, 0.5), g0}, {Vec3(0.8, 0.5, 0.5), g1}});
    const auto seeds = SeedSet::from_points({Vec3(0.3, 0.4, 0.5), Vec3(0.7, 0.6, 0.5)});
    const auto a = evaluate(seeds, domain, field, 2);
    const auto b = evaluate(seeds, domain, field, 2);
    CHECK(std::isfinite(a.energy));
    CHECK(a.energy == b.energy);
    CHECK((a.grad.g - b.grad.g).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("evaluation is deterministic across thread counts") {
    const auto domain = cube_domain();
    const auto seeds = SeedSet::from_points({Vec3(0.23, 0.31, 0.42), Vec3(0.71, 0.28, 0.55),
                                             Vec3(0.39, 0.74, 0.33), Vec3(0.62, 0.61, 0.78)});
    const auto serial = evaluate(seeds, domain, kIdentityField, 2, {true, 1});
    const auto parallel = evaluate(seeds, domain, kIdentityField, 2, {true, 4});
    CHECK(serial.energy == parallel.energy);
    CHECK((serial.grad.g - parallel.grad.g).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("anisotropic energy differs from the isotropic one") {
    const auto domain = cube_domain();
    AnisotropyTensor g;
    g.g11 = 9.0;  // stretch the metric along x
    const auto field = TensorField::constant(g);
    const auto seeds = SeedSet::from_points({Vec3(0.4, 0.5, 0.5), Vec3(0.6, 0.5, 0.5)});
    const double aniso = evaluate(seeds, domain, field, 2).energy;
    const double iso = evaluate(seeds, domain, kIdentityField, 2).energy;
    CHECK(aniso != doctest::Approx(iso).epsilon(1e-6));
}

TEST_CASE("a single seed converges to the cube center") {
    const auto domain = cube_domain();
    OptimizerConfig cfg;
    cfg.p = 2;
    cfg.max_iters = 50;
    cfg.grad_tol = 1e-10;
    const auto res = optimize(SeedSet::from_points({Vec3(0.12, 0.83, 0.4)}), domain,
                              kIdentityField, cfg);
    CHECK((res.seeds.points[0] - Vec3(0.5, 0.5, 0.5)).norm() <= 1e-6);
    CHECK(res.trace.size() <= 51);
    CHECK(res.stop_reason == "grad_tol");
}

TEST_CASE("descent: accepted iterations never increase the energy") {
    const auto domain = cube_domain();
    OptimizerConfig cfg;
    cfg.p = 2;
    cfg.max_iters = 30;
    cfg.grad_tol = 1e-9;
    const auto res = optimize(SeedSet::from_points({Vec3(0.2, 0.4, 0.6), Vec3(0.7, 0.3, 0.5)}),
                              domain, kIdentityField, cfg);
    for (std::size_t t = 1; t < res.trace.size(); ++t) {
        CHECK(res.trace[t].energy <= res.trace[t - 1].energy + 1e-15);
    }
    CHECK(res.trace.back().energy < res.trace.front().energy);
    CHECK(res.trace.back().grad_inf <= 1e-6);
}

TEST_CASE("steepest descent fallback also descends") {
    const auto domain = cube_domain();
    OptimizerConfig cfg;
    cfg.p = 2;
    cfg.max_iters = 40;
    cfg.grad_tol = 1e-8;
    cfg.method = OptimizerConfig::Method::Steepest;
    const auto res = optimize(SeedSet::from_points({Vec3(0.2, 0.4, 0.6), Vec3(0.7, 0.3, 0.5)}),
                              domain, kIdentityField, cfg);
    CHECK(res.trace.back().energy < res.trace.front().energy);
}

TEST_CASE("two runs with the same configuration produce identical traces") {
    const auto domain = cube_domain();
    OptimizerConfig cfg;
    cfg.p = 2;
    cfg.max_iters = 15;
    cfg.grad_tol = 1e-12;
    cfg.threads = 3;
    const auto start = sample_seeds(domain, 12, 99);
    const auto r1 = optimize(start, domain, kIdentityField, cfg);
    const auto r2 = optimize(start, domain, kIdentityField, cfg);
    REQUIRE(r1.trace.size() == r2.trace.size());
    for (std::size_t t = 0; t < r1.trace.size(); ++t) {
        CHECK(r1.trace[t].energy == r2.trace[t].energy);
        CHECK(r1.trace[t].grad_inf == r2.trace[t].grad_inf);
        CHECK(r1.trace[t].step == r2.trace[t].step);
    }
}

TEST_CASE("p=4 optimization also reduces the energy") {
    const auto domain = cube_domain();
    OptimizerConfig cfg;
    cfg.p = 4;
    cfg.max_iters = 25;
    cfg.grad_tol = 1e-10;
    const auto start = sample_seeds(domain, 8, 3);
    const auto res = optimize(start, domain, kIdentityField, cfg);
    CHECK(res.trace.back().energy < 0.5 * res.trace.front().energy);
}

TEST_CASE("surface seeds optimize toward an even distribution") {
    SurfaceMesh m;
    m.vertices = {Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(2, 2, 0), Vec3(0, 2, 0)};
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
    const auto domain = Domain::surface(m);
    OptimizerConfig cfg;
    cfg.p = 2;
    cfg.max_iters = 40;
    cfg.grad_tol = 1e-9;
    const auto start = sample_seeds(domain, 4, 17);
    const auto res = optimize(start, domain, kIdentityField, cfg);
    CHECK(res.trace.back().energy < res.trace.front().energy);
}

TEST_CASE("seed sampling stays inside the domain") {
    const auto domain = cube_domain();
    const auto seeds = sample_seeds(domain, 64, 4);
    for (const auto& p : seeds.points) CHECK(domain.contains(p));
}

TEST_CASE("invalid configurations are rejected") {
    OptimizerConfig cfg;
    cfg.p = 3;
    CHECK_THROWS_AS(cfg.validate(), OddP);
    cfg.p = 2;
    cfg.grad_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}
