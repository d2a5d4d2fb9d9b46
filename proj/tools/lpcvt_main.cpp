#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <string>

#include "lpcvt/io.hpp"
#include "lpcvt/oracles.hpp"
#include "lpcvt/verify.hpp"

namespace {

using nlohmann::json;

struct CliConfig {
    std::string mode = "volume";
    std::string domain_path;
    int n_seeds = 0;
    std::string seeds_file;
    int p = 2;
    std::string aniso = "constant";
    int iters = 100;
    double grad_tol = 1e-6;
    std::string method = "lbfgs";
    std::uint64_t rng_seed = 0;
    bool deterministic = true;
    std::string out_prefix = "lpcvt_run";
    bool export_rvd = false;
    bool jitter = false;
    int threads = 0;
    bool quick = false;
    std::string config_path;
};

void add_common_options(CLI::App* cmd, CliConfig& cfg) {
    cmd->add_option("--mode", cfg.mode, "volume|surface")
        ->check(CLI::IsMember({"volume", "surface"}));
    cmd->add_option("--domain", cfg.domain_path, "half-space file (volume) or OBJ/OFF (surface)");
    cmd->add_option("--seeds", cfg.n_seeds, "number of random seeds");
    cmd->add_option("--seeds-file", cfg.seeds_file, "seeds file, one `x y z` per line");
    cmd->add_option("--p", cfg.p, "Lp exponent (even)");
    cmd->add_option("--aniso", cfg.aniso, "`constant` or a tensor field file");
    cmd->add_option("--iters", cfg.iters, "max optimizer iterations");
    cmd->add_option("--grad-tol", cfg.grad_tol, "gradient infinity-norm stop threshold");
    cmd->add_option("--method", cfg.method, "lbfgs|sd")->check(CLI::IsMember({"lbfgs", "sd"}));
    cmd->add_option("--rng-seed", cfg.rng_seed, "random seed");
    cmd->add_option("--deterministic", cfg.deterministic, "bit-reproducible reductions");
    cmd->add_option("--out", cfg.out_prefix, "output file prefix");
    cmd->add_option("--export-rvd", cfg.export_rvd, "also write <out>.rvd.obj");
    cmd->add_option("--jitter", cfg.jitter,
                    "perturb seeds by 1e-9 x domain scale (mitigates cospherical inputs)");
    cmd->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
    cmd->add_option("--config", cfg.config_path, "JSON config mirroring these flags");
}

void apply_json_config(CliConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw lpcvt::IoError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw lpcvt::ParseError(path + ": " + e.what());
    }
    auto get = [&](const char* key, auto& slot) {
        if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    };
    get("mode", cfg.mode);
    get("domain", cfg.domain_path);
    get("seeds", cfg.n_seeds);
    get("seeds-file", cfg.seeds_file);
    get("p", cfg.p);
    get("aniso", cfg.aniso);
    get("iters", cfg.iters);
    get("grad-tol", cfg.grad_tol);
    get("method", cfg.method);
    get("rng-seed", cfg.rng_seed);
    get("deterministic", cfg.deterministic);
    get("out", cfg.out_prefix);
    get("export-rvd", cfg.export_rvd);
    get("jitter", cfg.jitter);
    get("threads", cfg.threads);
}

lpcvt::Domain load_domain_from(const CliConfig& cfg) {
    if (cfg.domain_path.empty()) throw lpcvt::Error("--domain is required");
    const auto kind = cfg.mode == "volume" ? lpcvt::Domain::Kind::Volume
                                           : lpcvt::Domain::Kind::Surface;
    return lpcvt::load_domain(cfg.domain_path, kind);
}

lpcvt::TensorField load_field_from(const CliConfig& cfg) {
    if (cfg.aniso == "constant") {
        return lpcvt::TensorField::constant(lpcvt::AnisotropyTensor::identity());
    }
    return lpcvt::load_tensor_field(cfg.aniso);
}

lpcvt::SeedSet load_seeds_from(const CliConfig& cfg, const lpcvt::Domain& domain) {
    lpcvt::SeedSet seeds;
    if (!cfg.seeds_file.empty()) {
        seeds = lpcvt::load_seeds(cfg.seeds_file);
    } else if (cfg.n_seeds > 0) {
        seeds = lpcvt::sample_seeds(domain, cfg.n_seeds, cfg.rng_seed);
    } else {
        throw lpcvt::Error("provide --seeds N or --seeds-file PATH");
    }
    if (cfg.jitter) seeds = lpcvt::jitter_seeds(seeds, 1e-9 * domain.scale, cfg.rng_seed);
    return seeds;
}

lpcvt::OptimizerConfig optimizer_config(const CliConfig& cfg) {
    lpcvt::OptimizerConfig oc;
    oc.p = cfg.p;
    oc.max_iters = cfg.iters;
    oc.grad_tol = cfg.grad_tol;
    oc.method = cfg.method == "sd" ? lpcvt::OptimizerConfig::Method::Steepest
                                   : lpcvt::OptimizerConfig::Method::Lbfgs;
    oc.rng_seed = cfg.rng_seed;
    oc.deterministic = cfg.deterministic;
    oc.threads = cfg.threads;
    return oc;
}

int run_optimize(const CliConfig& cfg) {
    const auto domain = load_domain_from(cfg);
    const auto field = load_field_from(cfg);
    const auto seeds = load_seeds_from(cfg, domain);

    const auto result = lpcvt::optimize(seeds, domain, field, optimizer_config(cfg));

    lpcvt::write_seeds(cfg.out_prefix + ".seeds.txt", result.seeds);
    lpcvt::write_trace_csv(cfg.out_prefix + ".trace.csv", result.trace);
    if (cfg.export_rvd) {
        lpcvt::write_rvd_obj(cfg.out_prefix + ".rvd.obj",
                             lpcvt::build_cell_polygons(result.seeds, domain));
    }

    const auto& last = result.trace.back();
    std::printf("iterations: %d\nF: %.17g\ngrad_inf: %.17g\nstop: %s\n",
                last.iter, last.energy, last.grad_inf, result.stop_reason.c_str());
    for (int orphan : result.orphaned_seeds) {
        std::printf("warning: seed %d has an empty cell\n", orphan);
    }
    if (result.line_search_failed) {
        std::printf("warning: line search failed; last iterate written\n");
    }
    return 0;
}

int run_energy(const CliConfig& cfg) {
    const auto domain = load_domain_from(cfg);
    const auto field = load_field_from(cfg);
    const auto seeds = load_seeds_from(cfg, domain);
    const auto res =
        lpcvt::evaluate(seeds, domain, field, cfg.p, {cfg.deterministic, cfg.threads});
    std::printf("F: %.17g\ngrad_inf: %.17g\n", res.energy, res.grad.inf_norm());
    for (int orphan : res.orphaned_seeds) {
        std::printf("warning: seed %d has an empty cell\n", orphan);
    }
    return 0;
}

int run_verify(const CliConfig& cfg) {
    lpcvt::VerifyOptions opts;
    opts.rng_seed = cfg.rng_seed == 0 ? lpcvt::VerifyOptions{}.rng_seed : cfg.rng_seed;
    opts.quick = cfg.quick;
    opts.threads = cfg.threads;
    const auto checks = lpcvt::run_verification(opts);
    std::fputs(lpcvt::format_report(checks).c_str(), stdout);
    for (const auto& c : checks) {
        if (!c.pass) return 2;
    }
    return 0;
}

int run_fd_check(const CliConfig& cfg) {
    const auto domain = load_domain_from(cfg);
    const auto field = load_field_from(cfg);
    const auto seeds = load_seeds_from(cfg, domain);
    const lpcvt::EvalOptions eopts{cfg.deterministic, cfg.threads};

    const auto res = lpcvt::evaluate(seeds, domain, field, cfg.p, eopts);
    const auto fd = lpcvt::fd_gradient(
        [&](const Eigen::MatrixX3d& q) {
            return lpcvt::evaluate(lpcvt::SeedSet::from_matrix(q), domain, field, cfg.p, eopts)
                .energy;
        },
        seeds.as_matrix(), 1e-6);

    const double denom =
        std::max({res.grad.g.cwiseAbs().maxCoeff(), fd.cwiseAbs().maxCoeff(), 1e-300});
    const double max_rel = (res.grad.g - fd).cwiseAbs().maxCoeff() / denom;
    std::printf("F: %.17g\nanalytic grad_inf: %.17g\nfd grad_inf: %.17g\n", res.energy,
                res.grad.inf_norm(), fd.cwiseAbs().maxCoeff());
    std::printf("max_rel_error %.17g\n", max_rel);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anisotropic Lp centroidal Voronoi tessellation"};
    app.require_subcommand(1);

    CliConfig cfg;
    auto* opt_cmd = app.add_subcommand("optimize", "minimize the energy over seed positions");
    auto* energy_cmd = app.add_subcommand("energy", "single energy/gradient evaluation");
    auto* verify_cmd = app.add_subcommand("verify", "run the oracle verification suite");
    auto* fd_cmd = app.add_subcommand("fd-check", "analytic vs finite-difference gradient");
    for (auto* cmd : {opt_cmd, energy_cmd, verify_cmd, fd_cmd}) add_common_options(cmd, cfg);
    verify_cmd->add_flag("--quick", cfg.quick, "reduced sample counts");

    // JSON config supplies defaults; explicit flags win because CLI11 only
    // writes bound variables for options that actually appear.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                apply_json_config(cfg, argv[i + 1]);
            } catch (const lpcvt::Error& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return 1;
            }
        }
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (*opt_cmd) return run_optimize(cfg);
        if (*energy_cmd) return run_energy(cfg);
        if (*verify_cmd) return run_verify(cfg);
        if (*fd_cmd) return run_fd_check(cfg);
    } catch (const lpcvt::NearDegenerate& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const lpcvt::NonFiniteEnergy& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const lpcvt::Overflow& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const lpcvt::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
