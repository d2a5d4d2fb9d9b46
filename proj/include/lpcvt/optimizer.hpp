#ifndef LPCVT_OPTIMIZER_HPP
#define LPCVT_OPTIMIZER_HPP

#include <cstdint>
#include <string>

#include "lpcvt/rvd.hpp"

namespace lpcvt {

/// Dense k x 3 gradient with a fixed accumulation order (cell index, then
/// simplex index), so repeated evaluations are bit-identical.
struct GradientAccumulator {
    Eigen::MatrixX3d g;
    bool deterministic = true;

    explicit GradientAccumulator(int k = 0, bool det = true)
        : g(Eigen::MatrixX3d::Zero(k, 3)), deterministic(det) {}

    void add(int seed, const Vec3& v) { g.row(seed) += v.transpose(); }
    double inf_norm() const { return g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff(); }
};

struct EvalOptions {
    bool deterministic = true;
    int threads = 0;
};

struct EvalResult {
    double energy = 0.0;
    GradientAccumulator grad;
    std::vector<int> orphaned_seeds;  // seeds whose restricted cell is empty
};

/// Assembles the global objective and its gradient from the restricted
/// Voronoi diagram: per simplex the closed-form vertex gradient is pushed
/// through each vertex's provenance Jacobian into the seeds it references.
/// Throws NonFiniteEnergy if any contribution is NaN/Inf.
EvalResult evaluate(const SeedSet& seeds, const Domain& domain, const TensorField& field, int p,
                    const EvalOptions& opts = {});

struct OptimizerConfig {
    int p = 2;
    int max_iters = 100;
    double grad_tol = 1e-6;
    enum class Method { Lbfgs, Steepest } method = Method::Lbfgs;
    int lbfgs_memory = 7;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    std::uint64_t rng_seed = 0;
    bool deterministic = true;
    int threads = 0;

    void validate() const;
};

struct TraceRow {
    int iter = 0;
    double energy = 0.0;
    double grad_inf = 0.0;
    double step = 0.0;
};

struct OptimizeResult {
    SeedSet seeds;
    std::vector<TraceRow> trace;
    std::string stop_reason;
    bool line_search_failed = false;
    std::vector<int> orphaned_seeds;
};

/// Quasi-Newton minimization of the objective over seed positions:
/// L-BFGS directions with Armijo backtracking (steepest descent as the
/// fallback method). The energy is non-increasing over accepted steps.
/// Trial evaluations that hit degenerate geometry are treated as failed
/// steps and backtracked past.
OptimizeResult optimize(const SeedSet& w0, const Domain& domain, const TensorField& field,
                        const OptimizerConfig& cfg);

/// Uniform random seeds: rejection-sampled inside the volume domain, or
/// area-weighted on the surface mesh.
SeedSet sample_seeds(const Domain& domain, int k, std::uint64_t rng_seed);

}  // namespace lpcvt

#endif
