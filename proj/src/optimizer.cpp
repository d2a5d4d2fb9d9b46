#include "lpcvt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <random>

#include "lpcvt/parallel.hpp"
#include "lpcvt/simplex_gradient.hpp"

namespace lpcvt {

namespace {

struct CellPartial {
    double energy = 0.0;
    std::vector<std::pair<int, Vec3>> rows;  // seed index -> gradient contribution

    void add(int seed, const Vec3& v) {
        for (auto& [s, acc] : rows) {
            if (s == seed) {
                acc += v;
                return;
            }
        }
        rows.emplace_back(seed, v);
    }
};

CellPartial integrate_cell(const RestrictedCell& cell, const SeedSet& seeds, int p) {
    CellPartial out;
    const int i = cell.seed_index;
    // Vertices are shared between fan simplices; cache their Jacobians.
    std::map<decltype(std::declval<VertexProvenance>().order_key()), VertexJacobian> jac_cache;

    for (const auto& s : cell.simplices) {
        out.energy += simplex_energy(s, p);
        const SimplexVertexGradient grad = simplex_energy_gradient(s, p);
        out.add(i, grad.d_apex);
        for (int v = 0; v < 3; ++v) {
            const auto& prov = s.provenance[v];
            if (prov.kind == VertexProvenance::Kind::FixedVertex) continue;
            auto [it, fresh] = jac_cache.try_emplace(prov.order_key());
            if (fresh) it->second = constrained_vertex_jacobian(prov, i, seeds);
            const VertexJacobian& jac = it->second;
            for (int b = 0; b < jac.count; ++b) {
                const auto& [seed, block] = jac.blocks[b];
                out.add(seed, block.transpose() * grad.d_vertices[v]);
            }
        }
    }
    return out;
}

}  // namespace

EvalResult evaluate(const SeedSet& seeds, const Domain& domain, const TensorField& field, int p,
                    const EvalOptions& opts) {
    validate_p(p);
    const auto rvd = build_rvd(seeds, domain, field, {opts.threads});

    const int k = seeds.size();
    std::vector<CellPartial> partials(k);
    parallel_for(
        k, [&](int i) { partials[i] = integrate_cell(rvd[i], seeds, p); }, opts.threads);

    EvalResult res;
    res.grad = GradientAccumulator(k, opts.deterministic);
    // Combine in cell index order; partials were accumulated in simplex
    // order, so the reduction is reproducible bit for bit.
    for (int i = 0; i < k; ++i) {
        res.energy += partials[i].energy;
        for (const auto& [seed, v] : partials[i].rows) res.grad.add(seed, v);
        if (rvd[i].simplices.empty()) res.orphaned_seeds.push_back(i);
    }
    if (!std::isfinite(res.energy) || !res.grad.g.allFinite()) {
        throw NonFiniteEnergy("energy or gradient is not finite");
    }
    return res;
}

void OptimizerConfig::validate() const {
    validate_p(p);
    if (max_iters < 0) throw Error("max_iters must be >= 0");
    if (grad_tol <= 0) throw Error("grad_tol must be > 0");
    if (lbfgs_memory < 1) throw Error("lbfgs_memory must be >= 1");
    if (armijo_c1 <= 0 || armijo_c1 >= 1) throw Error("armijo c1 must be in (0,1)");
    if (backtrack <= 0 || backtrack >= 1) throw Error("backtrack factor must be in (0,1)");
}

namespace {

using DenseMat = Eigen::MatrixX3d;

double dot(const DenseMat& a, const DenseMat& b) { return (a.array() * b.array()).sum(); }

struct LbfgsHistory {
    std::deque<std::pair<DenseMat, DenseMat>> pairs;  // (s, y)
    int memory = 7;

    void push(const DenseMat& s, const DenseMat& y) {
        const double sy = dot(s, y);
        if (sy <= 1e-12 * s.norm() * y.norm()) return;  // keep the metric positive
        pairs.emplace_back(s, y);
        if (static_cast<int>(pairs.size()) > memory) pairs.pop_front();
    }

    DenseMat direction(const DenseMat& g) const {
        DenseMat q = g;
        std::vector<double> alpha(pairs.size());
        for (int h = static_cast<int>(pairs.size()) - 1; h >= 0; --h) {
            const auto& [s, y] = pairs[h];
            alpha[h] = dot(s, q) / dot(y, s);
            q -= alpha[h] * y;
        }
        if (!pairs.empty()) {
            const auto& [s, y] = pairs.back();
            q *= dot(s, y) / dot(y, y);
        }
        for (std::size_t h = 0; h < pairs.size(); ++h) {
            const auto& [s, y] = pairs[h];
            const double beta = dot(y, q) / dot(y, s);
            q += (alpha[h] - beta) * s;
        }
        return -q;
    }
};

}  // namespace

OptimizeResult optimize(const SeedSet& w0, const Domain& domain, const TensorField& field,
                        const OptimizerConfig& cfg) {
    cfg.validate();
    const EvalOptions eopts{cfg.deterministic, cfg.threads};

    auto try_eval = [&](const DenseMat& x) -> std::optional<EvalResult> {
        try {
            return evaluate(SeedSet::from_matrix(x), domain, field, cfg.p, eopts);
        } catch (const NearDegenerate&) {
            return std::nullopt;
        } catch (const NonFiniteEnergy&) {
            return std::nullopt;
        } catch (const Error&) {
            return std::nullopt;  // e.g. coinciding seeds on a trial step
        }
    };

    OptimizeResult out;
    DenseMat x = w0.as_matrix();
    EvalResult cur = evaluate(w0, domain, field, cfg.p, eopts);
    out.trace.push_back({0, cur.energy, cur.grad.inf_norm(), 0.0});

    LbfgsHistory hist;
    hist.memory = cfg.lbfgs_memory;
    double sd_step = domain.scale / std::max(cur.grad.inf_norm() * 10.0, 1e-30);

    int iter = 1;
    for (; iter <= cfg.max_iters; ++iter) {
        if (cur.grad.inf_norm() <= cfg.grad_tol) {
            out.stop_reason = "grad_tol";
            break;
        }
        DenseMat dir;
        double alpha0 = 1.0;
        if (cfg.method == OptimizerConfig::Method::Lbfgs) {
            dir = hist.direction(cur.grad.g);
            if (dot(dir, cur.grad.g) >= 0.0) dir = -cur.grad.g;  // not a descent direction
        } else {
            dir = -cur.grad.g;
            alpha0 = sd_step;
        }
        const double slope = dot(dir, cur.grad.g);

        double alpha = alpha0;
        std::optional<EvalResult> next;
        DenseMat x_next;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            x_next = x + alpha * dir;
            next = try_eval(x_next);
            if (next && next->energy <= cur.energy + cfg.armijo_c1 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= cfg.backtrack;
        }
        if (!accepted) {
            out.stop_reason = "line_search_failed";
            out.line_search_failed = true;
            break;
        }

        const DenseMat s = x_next - x;
        const DenseMat y = next->grad.g - cur.grad.g;
        hist.push(s, y);
        if (cfg.method == OptimizerConfig::Method::Steepest) sd_step = 2.0 * alpha;

        x = std::move(x_next);
        cur = std::move(*next);
        out.trace.push_back({iter, cur.energy, cur.grad.inf_norm(), s.norm()});
    }
    if (out.stop_reason.empty()) {
        out.stop_reason = cur.grad.inf_norm() <= cfg.grad_tol ? "grad_tol" : "max_iters";
    }
    out.seeds = SeedSet::from_matrix(x);
    out.orphaned_seeds = cur.orphaned_seeds;
    return out;
}

SeedSet sample_seeds(const Domain& domain, int k, std::uint64_t rng_seed) {
    if (k < 1) throw Error("need at least one seed");
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vec3> pts;
    pts.reserve(k);

    if (domain.kind == Domain::Kind::Volume) {
        Vec3 lo = domain.polytope.vertices[0].pos, hi = lo;
        for (const auto& v : domain.polytope.vertices) {
            lo = lo.cwiseMin(v.pos);
            hi = hi.cwiseMax(v.pos);
        }
        while (static_cast<int>(pts.size()) < k) {
            const Vec3 x = lo + Vec3(unif(rng) * (hi - lo)[0], unif(rng) * (hi - lo)[1],
                                     unif(rng) * (hi - lo)[2]);
            if (domain.contains(x)) pts.push_back(x);
        }
    } else {
        std::vector<double> cum;
        double total = 0.0;
        for (const auto& t : domain.mesh.triangles) {
            total += triangle_area(domain.mesh.vertices[t[0]], domain.mesh.vertices[t[1]],
                                   domain.mesh.vertices[t[2]]);
            cum.push_back(total);
        }
        for (int n = 0; n < k; ++n) {
            const double pick = unif(rng) * total;
            const std::size_t t =
                std::lower_bound(cum.begin(), cum.end(), pick) - cum.begin();
            const auto& tri = domain.mesh.triangles[std::min(t, cum.size() - 1)];
            double u = unif(rng), v = unif(rng);
            if (u + v > 1.0) {
                u = 1.0 - u;
                v = 1.0 - v;
            }
            pts.push_back(domain.mesh.vertices[tri[0]] +
                          u * (domain.mesh.vertices[tri[1]] - domain.mesh.vertices[tri[0]]) +
                          v * (domain.mesh.vertices[tri[2]] - domain.mesh.vertices[tri[0]]));
        }
    }
    return SeedSet::from_points(std::move(pts));
}

}  // namespace lpcvt
