// vevans: viscous shock profiles and Evans-function stability from the command line.
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <iostream>

#include "vevans/cli.hpp"
#include "vevans/errors.hpp"

using namespace vevans;

namespace {

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), Eigen::Index(v.size())); }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ContractViolation("cannot write " + path);
    out << text;
}

// Options shared by single and sweep.
struct Common {
    std::string model = "shear2d";
    std::string target = "auto";
    double mu1 = 1.0, mu2 = 0.0, mu3 = 0.0, c_offset = 0.25;
    std::string viscosity = "z2";
    int members = 5;
    double R = 0.0;
    double R_max = 1024.0;
    int n_init = 20;
    double max_step = 0.2;
    double min_modulus = 1e-4;
    double fit_tol = 0.2;
    double profile_tol = 1e-3;
    bool keep_elliptic = false;
    int threads = 0;

    std::string config_file;  // expanded before parsing; listed here for --help

    void add(CLI::App* app) {
        app->add_option("--config", config_file, "key=value file; command-line flags override it");
        app->add_option("--model", model, "shear2d, shear1d, comp1d, comp2d, comp3d or transverse")->capture_default_str();
        app->add_option("--target", target, "auto, all, lax, oc or four-point")->capture_default_str();
        app->add_option("--mu1", mu1)->capture_default_str();
        app->add_option("--mu2", mu2)->capture_default_str();
        app->add_option("--mu3", mu3)->capture_default_str();
        app->add_option("--c-offset", c_offset)->capture_default_str();
        app->add_option("--viscosity", viscosity, "z2 (the only kind the Evans system implements)")->capture_default_str();
        app->add_option("--members", members, "overcompressive family members")->capture_default_str();
        app->add_option("--R", R, "fixed contour radius (0: choose by the asymptotic fit)")->capture_default_str();
        app->add_option("--R-max", R_max)->capture_default_str();
        app->add_option("--n-init", n_init, "initial contour points")->capture_default_str();
        app->add_option("--max-step", max_step, "largest relative change of D between contour points")->capture_default_str();
        app->add_option("--min-modulus", min_modulus, "radius of the indentation around the origin")->capture_default_str();
        app->add_option("--fit-tol", fit_tol)->capture_default_str();
        app->add_option("--profile-tol", profile_tol, "endpoint error that fixes L")->capture_default_str();
        app->add_flag("--keep-elliptic", keep_elliptic, "do not skip endstates that are not strictly hyperbolic");
        app->add_option("--threads", threads, "Evans evaluation threads (0: hardware)")->capture_default_str();
    }

    RunConfig config() const {
        if (viscosity != "z2") throw ContractViolation("viscosity '" + viscosity + "' is not implemented (only z2)");
        RunConfig c;
        c.model = parse_model(model);
        c.target = parse_target(target);
        c.pot = ElasticPotential{mu1, mu2, mu3, c_offset};
        c.oc_members = members;
        c.require_hyperbolic = !keep_elliptic;
        c.contour.spec.n_init = n_init;
        c.contour.spec.max_step_change = max_step;
        c.contour.spec.min_modulus = min_modulus;
        c.contour.R_max = R_max;
        c.contour.fit_tol = fit_tol;
        if (R > 0) {
            c.contour.choose_R = false;
            c.contour.spec.R = R;
        }
        c.profile.tol = profile_tol;
        c.threads = threads;
        return c;
    }
};

std::pair<Vec, Vec> parse_connect(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw ContractViolation("--connect expects a-:a+, e.g. 1,0:0.8,0");
    return {to_vec(parse_list(text.substr(0, colon))), to_vec(parse_list(text.substr(colon + 1)))};
}

int exit_code(bool any_inconclusive) { return any_inconclusive ? 2 : 0; }

// --config FILE: each "key = value" line becomes "--key value" unless --key is already on
// the command line; a value with spaces gives several arguments. Blank lines and lines
// starting with # are ignored.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> out, extra;
    std::string file;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            file = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            file = args[i].substr(9);
        } else {
            out.push_back(args[i]);
        }
    }
    if (file.empty()) return out;
    std::ifstream in(file);
    if (!in) throw ContractViolation("cannot read config file " + file);
    auto given = [&](const std::string& flag) {
        return std::any_of(out.begin(), out.end(),
                           [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ContractViolation(file + ":" + std::to_string(n) + ": expected key=value");
        auto trim = [](std::string x) {
            x.erase(0, x.find_first_not_of(" \t\r"));
            x.erase(x.find_last_not_of(" \t\r") + 1);
            return x;
        };
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (given("--" + key)) continue;
        extra.push_back("--" + key);
        if (value == "true") continue;
        // Whitespace separates the values of a multi-value option.
        std::istringstream words(value);
        for (std::string w; words >> w;) extra.push_back(w);
    }
    // Options go after the subcommand name.
    out.insert(out.begin() + std::min<size_t>(2, out.size()), extra.begin(), extra.end());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Viscous shock profiles and Evans-function stability of planar viscoelastic systems"};
    app.name("vevans");
    app.require_subcommand(1);

    // single
    Common single_opts;
    std::vector<double> alpha;
    double alpha3 = NAN, s = NAN;
    std::string connect, csv_out, json_out, svg_dir;
    auto* single = app.add_subcommand("single", "one (alpha, s) point or one explicit connection");
    single_opts.add(single);
    single->add_option("--alpha", alpha, "left state, reduced components")->delimiter(',');
    single->add_option("--alpha3", alpha3, "left state for comp1d");
    single->add_option("--s", s, "shock speed");
    single->add_option("--connect", connect, "explicit connection a-:a+");
    single->add_option("--csv", csv_out, "CSV output (default stdout)");
    single->add_option("--json", json_out, "JSON records");
    single->add_option("--svg-dir", svg_dir, "profile and image-curve SVGs");

    // sweep
    Common sweep_opts;
    std::vector<std::string> alpha_grid;
    std::string s_grid, sweep_out, manifest;
    int jobs = 1;
    auto* sweep = app.add_subcommand("sweep", "grid of (alpha, s), resumable");
    sweep_opts.add(sweep);
    sweep->add_option("--alpha-grid", alpha_grid, "start:step:stop per free alpha component")->required();
    sweep->add_option("--s-grid", s_grid, "start:step:stop")->required();
    sweep->add_option("--out", sweep_out, "CSV output")->required();
    sweep->add_option("--manifest", manifest, "completed-case manifest (default <out>.manifest)");
    sweep->add_option("--jobs", jobs, "cases run in parallel")->capture_default_str();

    // portrait
    std::string p_model = "shear2d", p_out = "portrait.svg";
    std::vector<double> p_alpha, p_window{-2, 2, -2, 2};
    double p_s = NAN;
    int p_seeds = 100;
    auto* portrait = app.add_subcommand("portrait", "phase portrait of the profile flow as SVG");
    portrait->add_option("--model", p_model, "shear2d or comp2d")->capture_default_str();
    portrait->add_option("--alpha", p_alpha)->delimiter(',')->required();
    portrait->add_option("--s", p_s)->required();
    portrait->add_option("--window", p_window, "xmin,xmax,ymin,ymax")->delimiter(',')->expected(4);
    portrait->add_option("--seeds", p_seeds)->capture_default_str();
    portrait->add_option("--out", p_out)->capture_default_str();

    // dispersion
    double d_a3 = NAN;
    std::string d_k = "0.001:0.001:0.01";
    auto* dispersion = app.add_subcommand("dispersion", "linear dispersion relation at a complex endstate");
    dispersion->add_option("--a3", d_a3, "a3 at the endstate")->required();
    dispersion->add_option("--k", d_k, "wave numbers, start:step:stop")->capture_default_str();

    // ucsearch
    std::string u_alpha = "1:1:3", u_s = "1.8:1:3.8";
    auto* ucsearch = app.add_subcommand("ucsearch", "saddle-to-saddle shooting over a shear grid");
    ucsearch->add_option("--alpha-grid", u_alpha)->capture_default_str();
    ucsearch->add_option("--s-grid", u_s)->capture_default_str();

    auto* selftest = app.add_subcommand("selftest", "quick end-to-end checks");

    std::vector<std::string> args(argv, argv + argc);
    try {
        args = expand_config(args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    try {
        app.parse(std::move(rev));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*single) {
            RunConfig cfg = single_opts.config();
            if (!std::isnan(alpha3)) alpha.assign(1, alpha3);
            cfg.alpha = to_vec(alpha);
            cfg.s = s;
            if (!connect.empty()) {
                auto [am, ap] = parse_connect(connect);
                cfg.a_minus = am;
                cfg.a_plus = ap;
                if (alpha.empty()) cfg.alpha = am;
            }
            RunLog log;
            auto rows = run_single(cfg, log);
            for (auto& n : log.notes) std::cerr << "note: " << n << "\n";
            for (auto& why : log.skipped) std::cerr << "skip: " << why << "\n";
            std::ofstream file;
            if (!csv_out.empty()) file.open(csv_out, std::ios::binary);
            std::ostream& out = csv_out.empty() ? std::cout : file;
            out << csv_header << "\n";
            bool inconclusive = false;
            std::string json = "[";
            for (size_t i = 0; i < rows.size(); ++i) {
                out << csv_row(rows[i].record) << "\n";
                inconclusive = inconclusive || is_inconclusive(rows[i].record);
                json += (i ? ",\n" : "\n") + rows[i].json;
                if (!svg_dir.empty()) {
                    std::filesystem::create_directories(svg_dir);
                    write_file(svg_dir + "/profile_" + std::to_string(i) + ".svg", profile_svg(*rows[i].grid));
                    if (!rows[i].report.samples.empty())
                        write_file(svg_dir + "/image_" + std::to_string(i) + ".svg", image_curve_svg(rows[i].report));
                }
            }
            json += "\n]\n";
            if (!json_out.empty()) write_file(json_out, json);
            return exit_code(inconclusive);
        }
        if (*sweep) {
            SweepSpec spec;
            spec.base = sweep_opts.config();
            for (auto& g : alpha_grid) spec.alpha_grid.push_back(parse_grid(g));
            spec.s_grid = parse_grid(s_grid);
            spec.jobs = jobs;
            if (manifest.empty()) manifest = sweep_out + ".manifest";
            std::ofstream log(sweep_out + ".log", std::ios::app);
            auto stats = run_sweep(spec, sweep_out, manifest, [&](const std::string& line) {
                log << line << "\n";
                log.flush();
            });
            std::cerr << "cases " << stats.cases << " (resumed " << stats.cases_resumed << "), rows " << stats.rows
                      << ", inconclusive " << stats.inconclusive << ", Evans evaluations " << stats.evans_evaluations
                      << "\n";
            return exit_code(stats.inconclusive > 0);
        }
        if (*portrait) {
            PhiPotential P;
            P.variant = parse_model(p_model).rh_variant;
            P.alpha = to_vec(p_alpha);
            P.sigma = p_s * p_s;
            auto pp = phase_portrait(P, p_s, {p_window[0], p_window[1], p_window[2], p_window[3]}, p_seeds);
            write_file(p_out, portrait_svg(pp));
            std::cerr << pp.equilibria.size() << " equilibria, " << pp.trajectories.size() << " trajectories\n";
            return 0;
        }
        if (*dispersion) {
            auto res = dispersion_relation(d_a3, parse_grid(d_k));
            std::cout << "k,re1,im1,re2,im2\n";
            for (size_t i = 0; i < res.k.size(); ++i) {
                auto [r1, r2] = res.roots[i];
                std::cout << fmt17(res.k[i]) << "," << fmt17(r1.real()) << "," << fmt17(r1.imag()) << ","
                          << fmt17(r2.real()) << "," << fmt17(r2.imag()) << "\n";
            }
            std::cerr << "growth rate " << fmt17(res.growth_rate) << ", predicted " << fmt17(res.predicted_rate)
                      << ", max residual " << fmt17(res.max_residual) << "\n";
            return 0;
        }
        if (*ucsearch) {
            auto rep = undercompressive_search(parse_grid(u_alpha), parse_grid(u_s));
            std::cout << "alpha,s,ap,ell_tilde,miss_distance,connected\n";
            for (auto& c : rep.candidates)
                std::cout << fmt17(c.alpha[0]) << "," << fmt17(c.s) << "," << fmt17(c.a_plus[0]) << "," << c.ell_tilde
                          << "," << fmt17(c.miss_distance) << "," << (c.connected ? 1 : 0) << "\n";
            std::cerr << "pairs examined " << rep.pairs_examined << ", connections found " << rep.connections_found
                      << "\n";
            return 0;
        }
        if (*selftest) {
            bool ok = true;
            auto check = [&](const std::string& name, bool pass) {
                std::cout << (pass ? "PASS " : "FAIL ") << name << "\n";
                ok = ok && pass;
            };
            Vec a(2);
            a << 1, 0;
            double sfig = std::sqrt(3.44);
            Eigen::SelfAdjointEigenSolver<Mat> es(hess_potential(Vec3(0, 0, 1), ElasticPotential::w0(),
                                                                 ModelVariant::of(Variant::Compressible3D)));
            auto ev = es.eigenvalues();
            check("Hessian of W0 at the identity is diag(1, 1, 2)",
                  std::abs(ev[0] - 1) < 1e-12 && std::abs(ev[1] - 1) < 1e-12 && std::abs(ev[2] - 2) < 1e-12);
            auto rh = rh_shear(a, 3.44);
            bool found = true;
            for (double r : {1.0, 0.8, -1.8}) {
                bool hit = false;
                for (auto& p : rh.points) hit = hit || (std::abs(p[0] - r) < 1e-9 && std::abs(p[1]) < 1e-9);
                found = found && hit;
            }
            check("shear RH roots for alpha = (1, 0), sigma = 3.44 are 1, 0.8, -1.8", found);
            RunConfig cfg;
            cfg.alpha = a;
            cfg.s = sfig;
            cfg.a_plus = Vec(Eigen::Vector2d(0.8, 0));
            RunLog log;
            auto rows = run_single(cfg, log);
            check("Lax shear shock 1 -> 0.8 is stable with R = 2",
                  rows.size() == 1 && rows[0].record.verdict == "Stable" && rows[0].record.R == 2.0);
            return ok ? 0 : 1;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
