// qdlab: exact numerical laboratory for quantum double models with matter.
//
// Subcommands: enumerate, verify, gsd, confine, spectrum, wops, fourier.
// Configuration comes from a flat key=value file plus command-line overrides;
// QDLAB_CAP overrides the trace dimension cap when no --cap flag is given.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "qdlab/cli.hpp"

using qdlab::cli::RunConfig;

namespace {

struct Options {
    RunConfig cfg;
    std::string config_path;
    bool cap_from_flag = false;
};

void add_common_options(CLI::App* cmd, Options& opt, bool needs_model) {
    cmd->add_option("--config", opt.config_path, "flat key=value configuration file");
    cmd->add_option("--gauge", opt.cfg.gauge, "gauge group order N");
    cmd->add_option("--matter", opt.cfg.matter, "matter order K (faces) or M (vertices)");
    cmd->add_option("--format", opt.cfg.format, "output format: json|csv|table");
    cmd->add_option("--tol", opt.cfg.tol, "certification tolerance");
    cmd->add_option("--cap", opt.cfg.cap, "trace dimension cap")
        ->each([&opt](const std::string&) { opt.cap_from_flag = true; });
    if (needs_model) {
        cmd->add_option("--family", opt.cfg.family, "model family: double|dual|vertex");
        cmd->add_option("--hom", opt.cfg.hom, "homomorphism multiplier n");
        cmd->add_option("--theta", opt.cfg.theta,
                        "vertex action: trivial|regular|block:<blocks>x<fixed>");
        cmd->add_option("--rows", opt.cfg.rows, "torus rows L1");
        cmd->add_option("--cols", opt.cfg.cols, "torus columns L2");
        cmd->add_option("--genus", opt.cfg.genus, "surface genus (fixed to 1, reserved)");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qdlab: quantum double models with matter on faces or vertices"};
    app.require_subcommand(1);

    Options opt;
    int (*run)(const RunConfig&, std::ostream&) = nullptr;

    CLI::App* c_enum = app.add_subcommand("enumerate", "list the valid couplings (N, K, n)");
    add_common_options(c_enum, opt, false);
    c_enum->callback([&] { run = &qdlab::cli::cmd_enumerate; });

    CLI::App* c_verify =
        app.add_subcommand("verify", "certify solvability: projectors and commutators");
    add_common_options(c_verify, opt, true);
    c_verify->callback([&] { run = &qdlab::cli::cmd_verify; });

    CLI::App* c_gsd =
        app.add_subcommand("gsd", "ground-space dimension: trace oracle vs formula");
    add_common_options(c_gsd, opt, true);
    c_gsd->callback([&] { run = &qdlab::cli::cmd_gsd; });

    CLI::App* c_confine = app.add_subcommand("confine", "string transport energy profile");
    add_common_options(c_confine, opt, true);
    c_confine->add_option("--charge", opt.cfg.charge, "transported charge g");
    c_confine->add_option("--max-length", opt.cfg.max_length, "longest string length");
    c_confine->add_option("--string", opt.cfg.string_kind, "string kind: z|x");
    c_confine->callback([&] { run = &qdlab::cli::cmd_confine; });

    CLI::App* c_spec = app.add_subcommand("spectrum", "dense low-lying spectrum (dim <= 4096)");
    add_common_options(c_spec, opt, true);
    c_spec->add_option("--count", opt.cfg.eigen_count, "number of eigenvalues to print");
    c_spec->callback([&] { run = &qdlab::cli::cmd_spectrum; });

    CLI::App* c_wops = app.add_subcommand("wops", "face-centroid intertwiner table");
    add_common_options(c_wops, opt, true);
    c_wops->add_option("--face", opt.cfg.face, "face id");
    c_wops->callback([&] { run = &qdlab::cli::cmd_wops; });

    CLI::App* c_fourier =
        app.add_subcommand("fourier", "edge operator in the character basis");
    add_common_options(c_fourier, opt, true);
    c_fourier->add_option("--edge", opt.cfg.edge, "edge id");
    c_fourier->callback([&] { run = &qdlab::cli::cmd_fourier; });

    try {
        app.parse(argc, argv);
        if (!opt.config_path.empty()) {
            // file values replace the defaults, then the flags win: reset to
            // the file config and parse the command line once more on top
            RunConfig file_cfg;
            qdlab::cli::load_config_file(file_cfg, opt.config_path);
            opt.cfg = file_cfg;
            app.clear();
            app.parse(argc, argv);
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }

    if (!opt.cap_from_flag) {
        if (const char* env = std::getenv("QDLAB_CAP")) {
            try {
                opt.cfg.cap = std::stoull(env);
            } catch (const std::exception&) {
                std::cerr << "configuration error: bad QDLAB_CAP value '" << env << "'\n";
                return 2;
            }
        }
    }

    try {
        return run(opt.cfg, std::cout);
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
