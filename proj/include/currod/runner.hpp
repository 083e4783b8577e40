#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <sstream>

#include "currod/config.hpp"
#include "currod/extract.hpp"
#include "currod/study.hpp"
#include "currod/torsion.hpp"
#include "currod/warp_fem.hpp"

#ifndef CURROD_VERSION
#define CURROD_VERSION "0.0.0"
#endif

namespace currod {

struct RunOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0; // 0 = take the config's seed
    int threads = 1;
    bool quadrature_check = false;
};

namespace runio {

inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Write-then-rename so finished artifacts appear atomically.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace runio

class Runner {
public:
    Runner(std::string subcommand, const RunOptions& opt)
        : cmd_(std::move(subcommand)), opt_(opt) {
        config_bytes_ = runio::read_file(opt_.config_path);
        cfg_ = parse_config(json::parse(config_bytes_));
        if (opt_.seed != 0) cfg_.seed = opt_.seed;
        hash_ = runio::fnv1a(config_bytes_);
        std::filesystem::create_directories(opt_.out_dir);
    }

    int run() {
        if (cmd_ == "section") run_section();
        else if (cmd_ == "cell") run_cell();
        else if (cmd_ == "reduce") run_reduce();
        else if (cmd_ == "gamma") run_gamma(false);
        else if (cmd_ == "ring") run_gamma(true);
        else throw std::invalid_argument("unknown subcommand '" + cmd_ + "'");
        write_manifest();
        return 0;
    }

private:
    std::string header() const {
        char buf[120];
        std::snprintf(buf, sizeof buf, "# currod %s, config_hash=%016llx, seed=%llu\n",
                      CURROD_VERSION, static_cast<unsigned long long>(hash_),
                      static_cast<unsigned long long>(cfg_.seed));
        return buf;
    }

    void write_manifest() const {
        std::ostringstream ss;
        ss << "tool: currod " << CURROD_VERSION << "\n"
           << "subcommand: " << cmd_ << "\n"
           << "config: " << opt_.config_path << "\n"
           << "config_hash: " << std::hex << hash_ << std::dec << "\n"
           << "seed: " << cfg_.seed << "\n"
           << "threads: " << opt_.threads << "\n"
           << "quadrature: " << (opt_.quadrature_check ? "check" : "normal") << "\n";
        runio::write_atomic(std::filesystem::path(opt_.out_dir) / "manifest.txt", ss.str());
    }

    void run_section() {
        const SectionMesh mesh = build_section(cfg_);
        const TorsionSolution tor = torsional_rigidity(mesh);
        {
            std::ostringstream ss;
            ss << header();
            mesh.to_csv(ss, &tor.psi);
            runio::write_atomic(std::filesystem::path(opt_.out_dir) / "section.csv", ss.str());
        }
        std::ostringstream rep;
        rep << header() << "# lengths in normalized section units (unit area)\n"
            << "vertices: " << mesh.vertex_count() << "\n"
            << "triangles: " << mesh.triangle_count() << "\n"
            << "area: " << runio::fmt(mesh.area()) << "\n"
            << "I2: " << runio::fmt(mesh.I2()) << "\n"
            << "I3: " << runio::fmt(mesh.I3()) << "\n"
            << "muD: " << runio::fmt(mesh.muD()) << "\n"
            << "torsional_rigidity: " << runio::fmt(tor.rigidity) << "\n"
            << "normalization_translation: " << runio::fmt(mesh.report().translation.x()) << " "
            << runio::fmt(mesh.report().translation.y()) << "\n"
            << "normalization_rotation: " << runio::fmt(mesh.report().rotation) << "\n"
            << "normalization_scale: " << runio::fmt(mesh.report().scale) << "\n"
            << "cg_iterations: " << tor.solve.iterations << "\n";
        runio::write_atomic(std::filesystem::path(opt_.out_dir) / "section_report.txt", rep.str());
    }

    void run_cell() {
        const SectionMesh mesh = build_section(cfg_);
        const TorsionSolution tor = torsional_rigidity(mesh);
        const Material material = Material::isotropic({cfg_.material.lambda, cfg_.material.mu});
        CellProblem cell(material, mesh);

        std::ostringstream ss;
        ss << header() << "t,F12,F13,F23,q0_fem,q0_closed,rel_gap,q_min,t_star\n";
        const std::vector<double> vals{0.0, 0.5, 1.0};
        VectorXd sample_phi;
        for (double t : vals)
            for (double f12 : vals)
                for (double f13 : vals)
                    for (double f23 : vals) {
                        Matrix3d F = Matrix3d::Zero();
                        F(0, 1) = f12; F(1, 0) = -f12;
                        F(0, 2) = f13; F(2, 0) = -f13;
                        F(1, 2) = f23; F(2, 1) = -f23;
                        const CellSolution sol = cell.minimize(t, F);
                        const double closed = q0_closed_form_isotropic(
                            cfg_.material.lambda, cfg_.material.mu, mesh.I2(), mesh.I3(),
                            tor.rigidity, t, F);
                        auto [qv, ts] = q_min_over_t(
                            [&](double tt, const Matrix3d& ff) {
                                return cell.minimize(tt, ff).value;
                            },
                            F);
                        const double gap =
                            closed > 0 ? std::abs(sol.value - closed) / closed : sol.value;
                        ss << runio::fmt(t) << ',' << runio::fmt(f12) << ',' << runio::fmt(f13)
                           << ',' << runio::fmt(f23) << ',' << runio::fmt(sol.value) << ','
                           << runio::fmt(closed) << ',' << runio::fmt(gap) << ','
                           << runio::fmt(qv) << ',' << runio::fmt(ts) << '\n';
                        if (t == 1.0 && f12 == 1.0 && f13 == 0.0 && f23 == 0.0)
                            sample_phi = sol.phi;
                    }
        runio::write_atomic(std::filesystem::path(opt_.out_dir) / "cell_table.csv", ss.str());

        if (sample_phi.size()) {
            std::ostringstream ps;
            ps << header() << "x,y,phi1,phi2,phi3\n";
            for (int i = 0; i < mesh.vertex_count(); ++i)
                ps << runio::fmt(mesh.vertices()[i].x()) << ',' << runio::fmt(mesh.vertices()[i].y())
                   << ',' << runio::fmt(sample_phi(3 * i)) << ',' << runio::fmt(sample_phi(3 * i + 1))
                   << ',' << runio::fmt(sample_phi(3 * i + 2)) << '\n';
            runio::write_atomic(std::filesystem::path(opt_.out_dir) / "cell_phi.csv", ps.str());
        }
    }

    void run_reduce() {
        auto frame = build_frame(cfg_, build_curve(cfg_));
        const SectionMesh mesh = build_section(cfg_);
        const TorsionSolution tor = torsional_rigidity(mesh);
        IsotropicLame lame{cfg_.material.lambda, cfg_.material.mu};
        IsotropicClosedFormQ0 q0(lame, mesh.I2(), mesh.I3(), tor.rigidity);
        const ScalingRegime regime = ScalingRegime::from_alpha(cfg_.alpha);
        RodMinimizer solver(frame, q0, regime, build_boundary(cfg_));
        const LoadCase lc = build_loads(cfg_, *frame, solver.node_count());

        MinimizeReport rep;
        DiscreteRodState sol = regime.kind == ScalingRegime::VonKarman
                                   ? solver.minimize_von_karman(lc, {}, &rep)
                                   : solver.minimize_quadratic(lc, &rep);
        {
            std::ostringstream ss;
            ss << header();
            sol.to_csv(ss);
            runio::write_atomic(std::filesystem::path(opt_.out_dir) / "solution.csv", ss.str());
        }
        std::ostringstream rs;
        rs << header() << "alpha: " << runio::fmt(cfg_.alpha) << "\n"
           << "energy: " << runio::fmt(rep.energy) << "\n"
           << "load_work: " << runio::fmt(rep.load_work) << "\n"
           << "constraint_residual: " << runio::fmt(rep.constraint_residual) << "\n"
           << "cg_iterations: " << rep.cg.iterations << "\n"
           << "newton_iterations: " << rep.newton_iterations << "\n"
           << "levenberg_shifts: " << rep.levenberg_shifts << "\n";
        rs << "gauge_modes:";
        for (const auto& m : rep.gauge_modes) rs << ' ' << m;
        rs << "\nnewton_gradient_norms:";
        for (double g : rep.gradient_norms) rs << ' ' << runio::fmt(g);
        rs << "\n";
        runio::write_atomic(std::filesystem::path(opt_.out_dir) / "reduce_report.txt", rs.str());
    }

    void run_gamma(bool ring) {
        auto frame = build_frame(cfg_, build_curve(cfg_));
        if (ring && !frame->closed())
            throw std::invalid_argument("ring: the configured curve is not closed");
        auto mesh = std::make_shared<SectionMesh>(build_section(cfg_));
        auto state = build_state(cfg_, frame);
        const NonlinearDensity density = build_density(cfg_);
        const IsotropicLame moduli = density.quadratic_moduli();
        const double alpha = ring ? 3.0 : cfg_.alpha;
        const ScalingRegime regime = ScalingRegime::from_alpha(alpha);

        const Material material = Material::isotropic(moduli);
        std::shared_ptr<const WarpField> warp;
        std::unique_ptr<CellEvaluator> reference_eval;
        if (cfg_.gamma.phi == "fem" || cfg_.gamma.reference == "fem") {
            warp = std::make_shared<FemWarp>(material, *mesh, frame, state, regime);
            reference_eval = std::make_unique<FemQ0>(material, *mesh);
        } else {
            reference_eval = std::make_unique<UnrelaxedIsotropicQ0>(moduli, mesh->I2(),
                                                                    mesh->I3(), mesh->muD());
        }
        const double reference = energy_I_alpha(*state, *frame, *reference_eval, regime);

        auto builder = [&](double h) -> std::shared_ptr<const Deformation3D> {
            if (ring) return std::make_shared<RingRecovery>(frame, state, h, warp);
            if (regime.kind == ScalingRegime::Intermediate)
                return std::make_shared<IntermediateRecovery>(frame, state, alpha, h, warp);
            return std::make_shared<StandardRecovery>(frame, state, alpha, h, warp);
        };

        ConvergenceRecord rec;
        if (opt_.threads > 1) {
            // one study row per h, computed concurrently, assembled in order
            std::vector<std::future<ConvergenceRecord>> futs;
            for (double h : cfg_.gamma.h)
                futs.push_back(std::async(std::launch::async, [&, h] {
                    return convergence_study(builder, alpha, reference, {h}, *frame, *mesh,
                                             density, {}, opt_.quadrature_check);
                }));
            std::vector<double> hs, errs;
            for (auto& f : futs) {
                ConvergenceRecord one = f.get();
                rec.rows.push_back(one.rows[0]);
                rec.quadrature_ok = rec.quadrature_ok && one.quadrature_ok;
            }
            double prev = -1;
            for (auto& row : rec.rows) {
                const double err = std::abs(row.ratio - 1);
                hs.push_back(row.h);
                errs.push_back(err);
                if (prev >= 0 && err > prev) rec.monotone = false;
                prev = err;
            }
            rec.order = fitted_order(hs, errs);
        } else {
            rec = convergence_study(builder, alpha, reference, cfg_.gamma.h, *frame, *mesh,
                                    density, {}, opt_.quadrature_check);
        }

        std::ostringstream ss;
        ss << header();
        rec.to_csv(ss);
        const char* csv_name = ring ? "ring.csv" : "gamma.csv";
        runio::write_atomic(std::filesystem::path(opt_.out_dir) / csv_name, ss.str());

        // long-format table for plotting
        std::ostringstream lf;
        lf << header() << "h,quantity,value\n";
        for (const auto& r : rec.rows) {
            lf << runio::fmt(r.h) << ",scaled_energy," << runio::fmt(r.scaled_energy) << '\n';
            lf << runio::fmt(r.h) << ",reference," << runio::fmt(r.reference) << '\n';
            lf << runio::fmt(r.h) << ",ratio," << runio::fmt(r.ratio) << '\n';
        }
        runio::write_atomic(std::filesystem::path(opt_.out_dir) /
                                (ring ? "ring_long.csv" : "gamma_long.csv"),
                            lf.str());

        std::ostringstream rs;
        rs << header() << "alpha: " << runio::fmt(alpha) << "\n"
           << "density: " << cfg_.material.density << "\n"
           << "reference_energy: " << runio::fmt(reference) << "\n"
           << "fitted_order: " << runio::fmt(rec.order) << "\n"
           << "monotone: " << (rec.monotone ? "yes" : "no") << "\n"
           << "quadrature_ok: " << (rec.quadrature_ok ? "yes" : "flagged") << "\n";

        // seeded probe points: analytic scaled gradient against central
        // differences of the deformation
        std::mt19937_64 rng(cfg_.seed);
        std::uniform_real_distribution<double> us(0.05 * frame->length(), 0.95 * frame->length());
        std::uniform_real_distribution<double> ux(-0.3, 0.3);
        const auto probe_def = builder(cfg_.gamma.h.back());
        double worst_fd = 0;
        for (int k = 0; k < 5; ++k) {
            const double s = us(rng), xi = ux(rng), zeta = ux(rng);
            const double step = 1e-5;
            const auto sl = probe_def->slice(s);
            const auto sp = probe_def->slice(s + step);
            const auto sm = probe_def->slice(s - step);
            const Matrix3d g = sl->grad_h(xi, zeta);
            const Vector3d fd_s = (sp->value(xi, zeta) - sm->value(xi, zeta)) / (2 * step);
            const Vector3d fd_xi =
                (sl->value(xi + step, zeta) - sl->value(xi - step, zeta)) / (2 * step);
            const Vector3d fd_zt =
                (sl->value(xi, zeta + step) - sl->value(xi, zeta - step)) / (2 * step);
            worst_fd = std::max({worst_fd, (g.col(0) - fd_s).norm(),
                                 (g.col(1) - fd_xi / probe_def->h()).norm(),
                                 (g.col(2) - fd_zt / probe_def->h()).norm()});
        }
        rs << "probe_gradient_fd_residual: " << runio::fmt(worst_fd) << "\n";

        if (ring) {
            const auto def = builder(cfg_.gamma.h.back());
            const auto s0 = def->slice(0.0), sL = def->slice(frame->length());
            double gap = 0;
            for (double xi : {-0.25, 0.0, 0.3})
                for (double zeta : {-0.2, 0.15})
                    gap = std::max(gap, (s0->value(xi, zeta) - sL->value(xi, zeta)).norm());
            rs << "periodicity_gap: " << runio::fmt(gap) << "\n";
        }
        runio::write_atomic(std::filesystem::path(opt_.out_dir) /
                                (ring ? "ring_report.txt" : "gamma_report.txt"),
                            rs.str());
    }

    std::string cmd_;
    RunOptions opt_;
    std::string config_bytes_;
    RunConfig cfg_;
    std::uint64_t hash_ = 0;
};

inline int run_subcommand(const std::string& cmd, const RunOptions& opt) {
    Runner r(cmd, opt);
    return r.run();
}

} // namespace currod
