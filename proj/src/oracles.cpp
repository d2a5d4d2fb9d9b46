#include "lpcvt/oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace lpcvt {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double dirichlet_moment(int a, int b, int c, int dim) {
    if (a < 0 || b < 0 || c < 0) throw Error("dirichlet_moment: negative exponent");
    if (dim != 2 && dim != 3) throw Error("dirichlet_moment: dim must be 2 or 3");
    if (a + b + c > 20) {
        throw Overflow("dirichlet_moment: exponent sum " + std::to_string(a + b + c) + " > 20");
    }
    auto fact = [](int n) {
        long double f = 1.0L;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    return static_cast<double>(fact(a) * fact(b) * fact(c) / fact(a + b + c + dim));
}

namespace {

// Integral over the unit d-simplex of (a0 + sum_i a_i xi_i)^p, via the
// multinomial theorem and the Dirichlet moment formula. Each term reduces
// to (p!/k0!) a0^k0 prod a_i^k_i / (p - k0 + d)!.
double affine_power_integral(double a0, std::span<const double> a, int p) {
    const int d = static_cast<int>(a.size());
    auto fact = [](int n) {
        long double f = 1.0L;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };

    double total = 0.0;
    // s = total multinomial degree assigned to the xi slots; k0 = p - s
    // goes to the constant a0.
    for (int s = 0; s <= p; ++s) {
        const int k0 = p - s;
        const double a0pow = (k0 == 0) ? 1.0 : std::pow(a0, k0);
        if (a0pow == 0.0) continue;
        const double coef = static_cast<double>(fact(p) / fact(k0) / fact(s + d)) * a0pow;
        std::function<void(int, int, double)> rec = [&](int slot, int remaining, double prod) {
            if (slot == d - 1) {
                total += coef * prod * std::pow(a[slot], remaining);
                return;
            }
            for (int ki = 0; ki <= remaining; ++ki) {
                rec(slot + 1, remaining - ki, prod * std::pow(a[slot], ki));
            }
        };
        rec(0, s, 1.0);
    }
    return total;
}

}  // namespace

double exact_simplex_integral(const IntegrationSimplex& s, int p) {
    validate_p(p);
    const auto u = s.transformed_vertices();

    if (s.dim == 3) {
        // Original-space tetra mapped to the unit simplex from the apex;
        // the coordinate c of the integrand is (sum_i xi_i U_i[c])^p.
        const double jac = std::abs(u[0].cross(u[1]).dot(u[2]));  // 6 * volume
        if (jac == 0.0) return 0.0;
        double total = 0.0;
        for (int c = 0; c < 3; ++c) {
            const std::array<double, 3> a = {u[0][c], u[1][c], u[2][c]};
            total += affine_power_integral(0.0, a, p);
        }
        return jac * total;
    }

    // Surface simplex: integrate over the transformed triangle, based at U3.
    const double jac = (u[0] - u[2]).cross(u[1] - u[2]).norm();  // 2 * area
    if (jac == 0.0) return 0.0;
    double total = 0.0;
    for (int c = 0; c < 3; ++c) {
        const std::array<double, 2> a = {u[0][c] - u[2][c], u[1][c] - u[2][c]};
        total += affine_power_integral(u[2][c], a, p);
    }
    return jac * total;
}

namespace {

struct BlockSums {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t count = 0;
};

}  // namespace

McEstimate mc_integrate(const IntegrationSimplex& s, int p, std::int64_t n_samples,
                        std::uint64_t rng_seed, int threads) {
    validate_p(p);
    if (n_samples < 1) throw Error("mc_integrate: n_samples must be >= 1");
    const auto u = s.transformed_vertices();

    double measure = 0.0;
    if (s.dim == 3) {
        measure = std::abs(u[0].cross(u[1]).dot(u[2])) / 6.0;
    } else {
        measure = 0.5 * (u[0] - u[2]).cross(u[1] - u[2]).norm();
    }
    if (measure == 0.0) return {0.0, 0.0};

    constexpr std::int64_t kBlock = 1 << 15;
    const std::int64_t n_blocks = (n_samples + kBlock - 1) / kBlock;
    std::vector<BlockSums> blocks(n_blocks);

    auto run_block = [&](std::int64_t bi) {
        std::mt19937_64 rng(mix_seed(rng_seed, static_cast<std::uint64_t>(bi)));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const std::int64_t lo = bi * kBlock;
        const std::int64_t hi = std::min(n_samples, lo + kBlock);
        BlockSums bs;
        for (std::int64_t i = lo; i < hi; ++i) {
            Vec3 w;  // barycentric weights of the three non-apex vertices
            if (s.dim == 3) {
                double t0 = unif(rng), t1 = unif(rng), t2 = unif(rng);
                if (t0 > t1) std::swap(t0, t1);
                if (t1 > t2) std::swap(t1, t2);
                if (t0 > t1) std::swap(t0, t1);
                w = Vec3(t1 - t0, t2 - t1, 1.0 - t2);  // apex gets t0
            } else {
                double t0 = unif(rng), t1 = unif(rng);
                if (t0 > t1) std::swap(t0, t1);
                w = Vec3(t0, t1 - t0, 1.0 - t1);
            }
            const Vec3 pt = w[0] * u[0] + w[1] * u[1] + w[2] * u[2];
            double f = 0.0;
            for (int c = 0; c < 3; ++c) f += std::pow(pt[c], p);
            bs.sum += f;
            bs.sum_sq += f * f;
            ++bs.count;
        }
        blocks[bi] = bs;
    };

    int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(n_blocks)));
    if (n_threads == 1) {
        for (std::int64_t bi = 0; bi < n_blocks; ++bi) run_block(bi);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::int64_t> next{0};
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back([&] {
                for (std::int64_t bi = next++; bi < n_blocks; bi = next++) run_block(bi);
            });
        }
        for (auto& th : pool) th.join();
    }

    // Combine in block order so results do not depend on the thread count.
    double sum = 0.0, sum_sq = 0.0;
    std::int64_t count = 0;
    for (const auto& bs : blocks) {
        sum += bs.sum;
        sum_sq += bs.sum_sq;
        count += bs.count;
    }
    const double mean = sum / count;
    const double var = std::max(0.0, sum_sq / count - mean * mean);
    McEstimate est;
    est.estimate = mean * measure;
    est.stderr_ = std::sqrt(var / count) * measure;
    return est;
}

double polarization_oracle(const std::vector<Monomial>& f, std::span<const StarVector> args) {
    const int p = static_cast<int>(args.size());
    if (p < 1) throw Error("polarization_oracle: needs at least one argument");
    auto fact = [](int n) {
        double r = 1.0;
        for (int i = 2; i <= n; ++i) r *= i;
        return r;
    };

    double total = 0.0;
    for (const auto& mono : f) {
        const int deg = mono.exp[0] + mono.exp[1] + mono.exp[2];
        if (deg != p) {
            throw Error("polarization_oracle: monomial degree " + std::to_string(deg) +
                        " != p = " + std::to_string(p));
        }
        const double norm = mono.coef * fact(mono.exp[0]) * fact(mono.exp[1]) *
                            fact(mono.exp[2]) / fact(p);
        // Sum the product over all ways to hand each argument one axis,
        // with axis multiplicities fixed by the monomial's exponents.
        std::array<int, 3> remaining = mono.exp;
        std::function<double(int)> rec = [&](int slot) -> double {
            if (slot == p) return 1.0;
            double acc = 0.0;
            for (int axis = 0; axis < 3; ++axis) {
                if (remaining[axis] == 0) continue;
                --remaining[axis];
                acc += args[slot][axis] * rec(slot + 1);
                ++remaining[axis];
            }
            return acc;
        };
        total += norm * rec(0);
    }
    return total;
}

Eigen::MatrixX3d fd_gradient(const std::function<double(const Eigen::MatrixX3d&)>& eval_fn,
                             const Eigen::MatrixX3d& points, double h) {
    if (h <= 0) throw Error("fd_gradient: h must be positive");
    Eigen::MatrixX3d grad = Eigen::MatrixX3d::Zero(points.rows(), 3);
    Eigen::MatrixX3d probe = points;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        for (int c = 0; c < 3; ++c) {
            probe(i, c) = points(i, c) + h;
            const double fp = eval_fn(probe);
            probe(i, c) = points(i, c) - h;
            const double fm = eval_fn(probe);
            probe(i, c) = points(i, c);
            grad(i, c) = (fp - fm) / (2.0 * h);
        }
    }
    return grad;
}

}  // namespace lpcvt
