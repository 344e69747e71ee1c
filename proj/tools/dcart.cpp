// dcart command-line tool: phantoms, forward projection, noise injection,
// reconstruction, metrics, and range-consistency reports, plus a pipeline
// driver that chains them from a JSON config.
//
// Every run logs its fully resolved configuration (defaults included) to
// stdout so any output can be reproduced from its log.  Failures print a
// single machine-parseable line "error: <category>: <message>" on stderr
// and exit nonzero.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "dcart/config.hpp"
#include "dcart/harmonics.hpp"
#include "dcart/inversion.hpp"
#include "dcart/io.hpp"
#include "dcart/metrics.hpp"
#include "dcart/phantom.hpp"
#include "dcart/projector.hpp"

namespace {

using namespace dcart;

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads <= 0) {
        if (const char* env = std::getenv("DCART_THREADS"))
            threads = std::atoi(env);
    }
    if (threads > 0)
        omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

Point2 parse_center(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw config_error("config: center must be 'X,Y'");
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

Image make_phantom(const std::string& kind, const ImageGrid& grid) {
    if (kind == "shepp-logan")
        return shepp_logan(grid);
    if (kind == "derenzo")
        return derenzo(grid);
    if (kind == "bars")
        return bars(grid);
    throw config_error("config: phantom must be one of shepp-logan|derenzo|bars");
}

void log_geometry(const SystemGeometry& g) {
    std::cout << "config: R=" << g.R << " rho_max=" << g.rho_max << " n_rho=" << g.n_rho
              << " n_phi=" << g.n_phi << " arc_step=" << g.arc_step << " epsilon=" << g.epsilon
              << "\n";
}

void log_grid(const ImageGrid& g) {
    std::cout << "config: grid_n=" << g.n << " pixel_size=" << g.pixel_size << " center=("
              << g.center.x << "," << g.center.y << ")\n";
}

int run_pipeline(const std::string& config_path) {
    std::ifstream is(config_path);
    if (!is)
        throw io_error("pipeline: cannot open config " + config_path);
    nlohmann::json j;
    is >> j;
    const RunConfig cfg = config_from_json(j);
    const SystemGeometry geom = cfg.resolved_geometry();
    const ImageGrid grid = cfg.resolved_grid();
    log_geometry(geom);
    log_grid(grid);
    std::cout << "config: phantom=" << cfg.phantom;
    if (cfg.snr_db)
        std::cout << " snr_db=" << *cfg.snr_db;
    if (cfg.seed)
        std::cout << " seed=" << *cfg.seed;
    std::cout << " output_dir=" << cfg.output_dir << "\n";

    std::filesystem::create_directories(cfg.output_dir);
    const auto out = [&](const std::string& name) {
        return (std::filesystem::path(cfg.output_dir) / name).string();
    };
    {
        std::ofstream rc(out("resolved_config.json"));
        rc << config_to_json(cfg).dump(2) << "\n";
    }

    const Image truth = make_phantom(cfg.phantom, grid);
    write_image(truth, out("truth.dcim"));
    write_pgm16(truth, out("truth.pgm"));

    SystemGeometry geom_eps = geom;
    Sinogram sino = project(truth, geom_eps);
    write_sinogram(sino, out("sinogram.dcsg"));

    std::optional<double> snr;
    std::optional<std::uint64_t> seed;
    if (cfg.snr_db) {
        snr = *cfg.snr_db;
        seed = cfg.seed.value_or(0);
        sino = add_noise(sino, *snr, *seed);
        write_sinogram(sino, out("noisy.dcsg"));
    }

    const Image recon = reconstruct(sino, grid, geom.epsilon);
    write_image(recon, out("recon.dcim"));
    write_pgm16(recon, out("recon.pgm"));

    const MetricsReport rep = make_report(recon, truth, geom, snr, seed);
    write_metrics(rep, out("metrics.txt"));
    std::cout << metrics_to_text(rep);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radon transform on double circular arcs: forward projection and"
                 " analytic reconstruction"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "OpenMP thread count (or env DCART_THREADS)");

    // ---- phantom ----
    auto* cmd_ph = app.add_subcommand("phantom", "render a test object");
    std::string ph_kind, ph_center, ph_out;
    int ph_n = 0;
    double ph_ps = 1.0;
    cmd_ph->add_option("--kind", ph_kind, "shepp-logan|derenzo|bars")->required();
    cmd_ph->add_option("--n", ph_n, "pixels per side")->required();
    cmd_ph->add_option("--center", ph_center, "grid center 'X,Y' in world units")->required();
    cmd_ph->add_option("--pixel-size", ph_ps, "pixel size (default 1)");
    cmd_ph->add_option("--out", ph_out, "output image (DCIM1)")->required();

    // ---- project ----
    auto* cmd_pr = app.add_subcommand("project", "forward DCART of an image");
    std::string pr_image, pr_out;
    double pr_R = 0.0, pr_rho_max = 0.0, pr_arc_step = 1.0;
    double pr_q = 0.0;
    int pr_n_rho = 0, pr_n_phi = 0;
    bool pr_unsafe = false;
    cmd_pr->add_option("--image", pr_image, "input image (DCIM1)")->required();
    cmd_pr->add_option("--R", pr_R, "detector ring radius")->required();
    cmd_pr->add_option("--rho-max", pr_rho_max, "largest scanning diameter")->required();
    auto* opt_q = cmd_pr->add_option("--q", pr_q, "redundancy ratio Q = N_rho*N_phi/N^2");
    auto* opt_nrho = cmd_pr->add_option("--n-rho", pr_n_rho, "number of rho samples");
    opt_q->excludes(opt_nrho);
    opt_nrho->excludes(opt_q);
    cmd_pr->add_option("--n-phi", pr_n_phi, "detector positions (default round(2 pi R))");
    cmd_pr->add_option("--arc-step", pr_arc_step, "target arc sample spacing (default 1)");
    cmd_pr->add_flag("--allow-support-violation", pr_unsafe,
                     "project even if mass lies inside the detector disc");
    cmd_pr->add_option("--out", pr_out, "output sinogram (DCSG1)")->required();

    // ---- add-noise ----
    auto* cmd_no = app.add_subcommand("add-noise", "add seeded Gaussian noise at a target SNR");
    std::string no_in, no_out;
    double no_snr = 0.0;
    std::uint64_t no_seed = 0;
    cmd_no->add_option("--sinogram", no_in, "input sinogram")->required();
    cmd_no->add_option("--snr-db", no_snr, "target SNR in dB")->required();
    cmd_no->add_option("--seed", no_seed, "PRNG seed")->required();
    cmd_no->add_option("--out", no_out, "output sinogram")->required();

    // ---- reconstruct ----
    auto* cmd_re = app.add_subcommand("reconstruct", "invert a sinogram onto a pixel grid");
    std::string re_in, re_out, re_center, re_pgm;
    int re_n = 0;
    double re_eps = 1.0, re_ps = 1.0;
    cmd_re->add_option("--sinogram", re_in, "input sinogram")->required();
    cmd_re->add_option("--grid-n", re_n, "output grid pixels per side")->required();
    cmd_re->add_option("--center", re_center, "grid center 'X,Y'")->required();
    cmd_re->add_option("--pixel-size", re_ps, "pixel size (default 1)");
    cmd_re->add_option("--epsilon", re_eps, "regularization (default 1)");
    cmd_re->add_option("--out", re_out, "output image (DCIM1)")->required();
    cmd_re->add_option("--pgm", re_pgm, "also write a min-max scaled PGM view");

    // ---- metrics ----
    auto* cmd_me = app.add_subcommand("metrics", "NMSE/NMAE of a reconstruction");
    std::string me_rec, me_truth, me_out;
    cmd_me->add_option("--recon", me_rec, "reconstructed image")->required();
    cmd_me->add_option("--truth", me_truth, "ground-truth image")->required();
    cmd_me->add_option("--out", me_out, "report path (key=value text)")->required();

    // ---- consistency ----
    auto* cmd_co = app.add_subcommand("consistency", "range-consistency residual report");
    std::string co_in, co_out;
    int co_nmax = 0;
    double co_eps = 0.0;
    cmd_co->add_option("--sinogram", co_in, "input sinogram")->required();
    cmd_co->add_option("--n-max", co_nmax, "largest harmonic order")->required();
    cmd_co->add_option("--epsilon", co_eps, "G regularization (default 0 = exact)");
    cmd_co->add_option("--out", co_out, "report path")->required();

    // ---- pipeline ----
    auto* cmd_pi = app.add_subcommand("pipeline",
                                      "phantom -> project -> [noise] -> reconstruct -> metrics");
    std::string pi_config;
    cmd_pi->add_option("--config", pi_config, "JSON run configuration")->required();

    CLI11_PARSE(app, argc, argv);
    apply_threads(threads);

    try {
        if (cmd_ph->parsed()) {
            const ImageGrid grid{ph_n, ph_ps, parse_center(ph_center)};
            grid.validate();
            log_grid(grid);
            std::cout << "config: phantom=" << ph_kind << "\n";
            write_image(make_phantom(ph_kind, grid), ph_out);
        } else if (cmd_pr->parsed()) {
            const Image img = read_image(pr_image);
            SystemGeometry g;
            g.R = pr_R;
            g.rho_max = pr_rho_max;
            g.n_phi = pr_n_phi > 0 ? pr_n_phi : SystemGeometry::default_n_phi(pr_R);
            if (pr_n_rho > 0)
                g.n_rho = pr_n_rho;
            else if (pr_q > 0.0)
                g.n_rho = SystemGeometry::n_rho_from_q(pr_q, img.grid.n, g.n_phi);
            else
                throw config_error("config: one of --q / --n-rho is required");
            g.arc_step = pr_arc_step;
            g.validate();
            log_geometry(g);
            write_sinogram(project(img, g, {.allow_support_violation = pr_unsafe}), pr_out);
        } else if (cmd_no->parsed()) {
            const Sinogram s = read_sinogram(no_in);
            log_geometry(s.geometry);
            std::cout << "config: snr_db=" << no_snr << " seed=" << no_seed << "\n";
            write_sinogram(add_noise(s, no_snr, no_seed), no_out);
        } else if (cmd_re->parsed()) {
            const Sinogram s = read_sinogram(re_in);
            const ImageGrid grid{re_n, re_ps, parse_center(re_center)};
            grid.validate();
            log_geometry(s.geometry);
            log_grid(grid);
            std::cout << "config: epsilon=" << re_eps << "\n";
            const Image rec = reconstruct(s, grid, re_eps);
            write_image(rec, re_out);
            if (!re_pgm.empty())
                write_pgm16(rec, re_pgm);
        } else if (cmd_me->parsed()) {
            const Image rec = read_image(me_rec);
            const Image truth = read_image(me_truth);
            MetricsReport rep;
            rep.nmse = nmse(rec, truth);
            rep.nmae = nmae(rec, truth);
            rep.grid_n = rec.grid.n;
            write_metrics(rep, me_out);
            std::cout << "nmse=" << rep.nmse << "\nnmae=" << rep.nmae << "\n";
        } else if (cmd_co->parsed()) {
            const Sinogram s = read_sinogram(co_in);
            log_geometry(s.geometry);
            std::cout << "config: n_max=" << co_nmax << " epsilon=" << co_eps << "\n";
            const auto g_spec = regularized_G(decompose_phi(s), co_eps);
            const auto rs = consistency_residuals(g_spec, co_nmax);
            std::ofstream os(co_out);
            if (!os)
                throw io_error("consistency: cannot open " + co_out);
            for (const auto& r : rs)
                os << "n=" << r.n << " k=" << r.k << " residual=" << r.residual << "\n";
            for (const auto& r : rs)
                std::cout << "n=" << r.n << " k=" << r.k << " residual=" << r.residual << "\n";
        } else if (cmd_pi->parsed()) {
            return run_pipeline(pi_config);
        }
    } catch (const config_error& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    } catch (const support_error& e) {
        std::cerr << "error: support: " << e.what() << "\n";
        return 3;
    } catch (const io_error& e) {
        std::cerr << "error: io: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: runtime: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
