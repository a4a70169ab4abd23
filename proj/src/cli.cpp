#include "vevans/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "vevans/errors.hpp"

namespace vevans {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& s) {
    std::string t = trim(s);
    size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ContractViolation("not a number: '" + s + "'");
    }
    if (used != t.size()) throw ContractViolation("not a number: '" + s + "'");
    return v;
}

std::string vec_str(const Vec& v) {
    std::string out = "(";
    for (int i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt17(v[i]);
    return out + ")";
}

Vec3 embed_state(const ModelSpec& m, const Vec& a) { return m.rh_variant.embed(a); }

}  // namespace

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ModelSpec parse_model(const std::string& name) {
    auto mk = [&](Variant rh, Variant ev) { return ModelSpec{name, ModelVariant::of(rh), ModelVariant::of(ev)}; };
    if (name == "shear2d") return mk(Variant::Shear2D, Variant::Shear2D);
    if (name == "shear1d") return mk(Variant::Shear1D, Variant::Shear1D);
    if (name == "comp1d") return mk(Variant::Compressible1D, Variant::Compressible1D);
    if (name == "comp2d") return mk(Variant::Compressible2D, Variant::Compressible2D);
    if (name == "comp3d") return mk(Variant::Compressible3D, Variant::Compressible3D);
    // Out-of-plane perturbations of an in-plane compressible profile.
    if (name == "transverse") return mk(Variant::Compressible2D, Variant::Transverse);
    throw ContractViolation("unknown model '" + name + "'");
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    for (auto& p : split(text, ',')) out.push_back(to_double(p));
    return out;
}

std::vector<double> parse_grid(const std::string& text) {
    if (text.find(':') == std::string::npos) return parse_list(text);
    auto parts = split(text, ':');
    if (parts.size() != 3) throw ContractViolation("grid must be start:step:stop, got '" + text + "'");
    double a = to_double(parts[0]), h = to_double(parts[1]), b = to_double(parts[2]);
    if (!(h > 0.0)) throw ContractViolation("grid step must be positive in '" + text + "'");
    std::vector<double> out;
    for (long i = 0;; ++i) {
        double x = a + double(i) * h;
        if (x > b + 1e-12) break;
        // Grid points are decimal: 0.2 + 2 * 0.2 is 0.6, not 0.6000000000000001.
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", x);
        x = std::strtod(buf, nullptr);
        out.push_back(std::abs(x - b) <= 1e-12 ? b : x);
    }
    return out;
}

TargetRule parse_target(const std::string& s) {
    if (s == "auto") return TargetRule::Auto;
    if (s == "all") return TargetRule::All;
    if (s == "lax") return TargetRule::Lax;
    if (s == "oc") return TargetRule::Overcompressive;
    if (s == "four-point") return TargetRule::FourPoint;
    throw ContractViolation("unknown target rule '" + s + "'");
}

std::string to_string(TargetRule t) {
    switch (t) {
        case TargetRule::Auto: return "auto";
        case TargetRule::All: return "all";
        case TargetRule::Lax: return "lax";
        case TargetRule::Overcompressive: return "oc";
        case TargetRule::FourPoint: return "four-point";
    }
    return "";
}

// ---------------------------------------------------------------------------
// CSV

const char* const csv_header =
    "model,alpha1,alpha2,alpha3,s,ap1,ap2,ap3,shock_class,R,n_points,max_rel_step,L,winding,verdict,seconds";

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back();
        } else {
            out.back() += c;
        }
    }
    if (quoted) throw ContractViolation("unterminated quote in CSV row");
    return out;
}

}  // namespace

std::string csv_row(const RunRecord& r) {
    std::string out = csv_field(r.model);
    auto num = [&](double x) { out += "," + fmt17(x); };
    for (int i = 0; i < 3; ++i) num(r.alpha[i]);
    num(r.s);
    for (int i = 0; i < 3; ++i) num(r.a_plus[i]);
    out += "," + csv_field(r.shock_class);
    num(r.R);
    out += "," + std::to_string(r.n_points);
    num(r.max_rel_step);
    num(r.L);
    out += "," + std::to_string(r.winding);
    out += "," + csv_field(r.verdict);
    num(r.seconds);
    return out;
}

RunRecord parse_csv_row(const std::string& line) {
    auto f = csv_fields(line);
    if (f.size() != 16) throw ContractViolation("CSV row has " + std::to_string(f.size()) + " fields, expected 16");
    RunRecord r;
    r.model = f[0];
    for (int i = 0; i < 3; ++i) r.alpha[i] = to_double(f[1 + i]);
    r.s = to_double(f[4]);
    for (int i = 0; i < 3; ++i) r.a_plus[i] = to_double(f[5 + i]);
    r.shock_class = f[8];
    r.R = to_double(f[9]);
    r.n_points = std::stoi(f[10]);
    r.max_rel_step = to_double(f[11]);
    r.L = to_double(f[12]);
    r.winding = std::stoi(f[13]);
    r.verdict = f[14];
    r.seconds = to_double(f[15]);
    return r;
}

std::vector<RunRecord> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractViolation("cannot open " + path);
    std::string line;
    std::vector<RunRecord> out;
    if (!std::getline(in, line) || line != csv_header) throw ContractViolation(path + ": missing CSV header");
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(parse_csv_row(line));
    return out;
}

bool is_inconclusive(const RunRecord& r) { return r.verdict.rfind("Inconclusive", 0) == 0; }

// ---------------------------------------------------------------------------
// Single runs

namespace {

bool hyperbolic_state(const ModelSpec& m, const Vec& a, const ElasticPotential& pot) {
    if (!characteristics(a, pot, m.rh_variant).strictly_hyperbolic) return false;
    if (m.evans_variant.tag == Variant::Transverse) {
        Vec3 full = embed_state(m, a);
        return characteristics(Vec(full), pot, ModelVariant::of(Variant::Compressible3D)).strictly_hyperbolic;
    }
    return true;
}

std::string hyperbolic_reason(const ModelSpec& m, const Vec& a) {
    std::string r = "endstate " + vec_str(a) + " not strictly hyperbolic";
    if (m.rh_variant.tag == Variant::Compressible1D) r += " (|a3| < 1/sqrt(3))";
    return r;
}

}  // namespace

std::vector<ShockCandidate> select_candidates(const RunConfig& cfg, RunLog& log) {
    const auto& m = cfg.model;
    const auto& v = m.rh_variant;
    const double sigma = cfg.s * cfg.s;
    auto skip = [&](const std::string& why) { log.skipped.push_back(why); };

    std::vector<ShockCandidate> cands;
    if (cfg.a_plus) {
        if (!std::isfinite(cfg.s) || cfg.s == 0.0) throw ContractViolation("a nonzero shock speed s is required");
        Vec am = cfg.a_minus ? *cfg.a_minus : cfg.alpha;
        const Vec& ap = *cfg.a_plus;
        if (am.size() != v.strain_dim || ap.size() != v.strain_dim)
            throw ContractViolation("endstates need " + std::to_string(v.strain_dim) + " components");
        // Speeds are often quoted to a few digits; snap to the RH speed of the pair.
        Vec da = ap - am, dg = grad_potential(ap, cfg.pot, v) - grad_potential(am, cfg.pot, v);
        double speed = cfg.s;
        if (da.norm() > 0.0) {
            double sig = da.dot(dg) / da.squaredNorm();
            if (sig > 0.0 && std::abs(std::sqrt(sig) - std::abs(cfg.s)) <= 1e-3 * std::abs(cfg.s)) {
                speed = std::copysign(std::sqrt(sig), cfg.s);
                if (speed != cfg.s) log.notes.push_back("s = " + fmt17(cfg.s) + " adjusted to the RH speed " + fmt17(speed));
            }
        }
        double res = rh_residual(am, ap, speed * speed, cfg.pot, v);
        if (res > 1e-8 * (1.0 + am.norm() + ap.norm()))
            throw ContractViolation(vec_str(am) + " -> " + vec_str(ap) + " is not a Rankine-Hugoniot pair at s = " +
                                    fmt17(cfg.s) + " (residual " + fmt17(res) + ")");
        cands.push_back(shock_type(am, ap, speed, cfg.pot, v));
    } else {
        if (cfg.alpha.size() != v.strain_dim)
            throw ContractViolation("alpha needs " + std::to_string(v.strain_dim) + " components");
        if (cfg.require_hyperbolic && !hyperbolic_state(m, cfg.alpha, cfg.pot)) {
            skip(hyperbolic_reason(m, cfg.alpha));
            return {};
        }
        if (!std::isfinite(cfg.s) || cfg.s == 0.0) throw ContractViolation("a nonzero shock speed s is required");
        if (!cfg.pot.is_w0_family())
            throw ContractViolation("Rankine-Hugoniot roots are only computed for W0; give the connection explicitly");
        std::vector<Vec> eqs;
        for (const auto& p : equilibrium_points(cfg.alpha, sigma, v))
            if (classify_equilibrium(p, cfg.alpha, sigma, cfg.pot, v).feasible) eqs.push_back(p);
        TargetRule rule = cfg.target;
        if (rule == TargetRule::Auto) rule = eqs.size() >= 4 ? TargetRule::FourPoint : TargetRule::All;
        if (rule == TargetRule::FourPoint) {
            std::vector<Morse> morse;
            for (const auto& p : eqs) morse.push_back(classify_equilibrium(p, cfg.alpha, sigma, cfg.pot, v).morse);
            for (size_t i = 0; i < eqs.size(); ++i)
                for (size_t j = 0; j < eqs.size(); ++j) {
                    if (i == j || morse[i] == Morse::Attractor || morse[j] == Morse::Repellor) continue;
                    if (morse[i] == Morse::Degenerate || morse[j] == Morse::Degenerate) continue;
                    cands.push_back(shock_type(eqs[i], eqs[j], cfg.s, cfg.pot, v));
                }
        } else {
            for (auto& c : shock_candidates(cfg.alpha, cfg.s, cfg.pot, v)) {
                if (rule == TargetRule::Lax && c.shock_class != ShockClass::Lax) continue;
                if (rule == TargetRule::Overcompressive && c.shock_class != ShockClass::Overcompressive) continue;
                cands.push_back(c);
            }
        }
    }

    std::vector<ShockCandidate> out;
    for (auto& c : cands) {
        std::string pair = vec_str(c.alpha) + " -> " + vec_str(c.a_plus) + " s=" + fmt17(c.s) + ": ";
        if (cfg.require_feasible && v.a3_index() >= 0 &&
            (c.alpha[v.a3_index()] <= 0.0 || c.a_plus[v.a3_index()] <= 0.0)) {
            skip(pair + "endstate outside a3 > 0");
            continue;
        }
        if (cfg.require_hyperbolic) {
            if (!hyperbolic_state(m, c.alpha, cfg.pot)) {
                skip(pair + hyperbolic_reason(m, c.alpha));
                continue;
            }
            if (!hyperbolic_state(m, c.a_plus, cfg.pot)) {
                skip(pair + hyperbolic_reason(m, c.a_plus));
                continue;
            }
        }
        if (c.shock_class == ShockClass::Degenerate) {
            skip(pair + "degenerate shock class");
            continue;
        }
        out.push_back(c);
    }
    return out;
}

std::vector<RunResult> run_single(const RunConfig& cfg, RunLog& log) {
    using clock = std::chrono::steady_clock;
    const auto& m = cfg.model;
    std::vector<RunResult> out;
    for (const auto& cand : select_candidates(cfg, log)) {
        std::string pair = vec_str(cand.alpha) + " -> " + vec_str(cand.a_plus) + " s=" + fmt17(cand.s) + ": ";
        auto t0 = clock::now();
        std::vector<ProfileGrid> grids;
        try {
            if (cand.shock_class == ShockClass::Overcompressive)
                grids = overcompressive_family(cand, cfg.pot, m.rh_variant, cfg.oc_members, cfg.profile);
            else
                grids.push_back(compute_profile(cand, cfg.pot, m.rh_variant, cfg.profile));
        } catch (const ConnectionNotFound& e) {
            log.skipped.push_back(pair + "no connection (" + e.what() + ", miss " + fmt17(e.miss_distance) + ")");
            continue;
        }
        double profile_share = std::chrono::duration<double>(clock::now() - t0).count() / double(grids.size());

        for (auto& g : grids) {
            auto t1 = clock::now();
            RunResult res;
            auto grid = std::make_shared<const ProfileGrid>(std::move(g));
            res.grid = grid;
            RunRecord& r = res.record;
            r.model = m.name;
            r.alpha = embed_state(m, cand.alpha);
            r.a_plus = embed_state(m, cand.a_plus);
            r.s = cand.s;
            r.shock_class = to_string(cand.shock_class);
            r.L = grid->L;
            try {
                auto sys = std::make_shared<const EvansSystem>(m.evans_variant, grid, m.rh_variant, cfg.pot);
                EvansEvaluator ev(sys, {}, cfg.threads);
                res.report = analyze_stability(ev, cand, cfg.contour);
                res.evans_evaluations = ev.stats().evaluations;
                res.max_drift = ev.stats().max_drift;
                r.R = res.report.spec.R;
                r.n_points = res.report.n_points();
                r.max_rel_step = res.report.max_rel_step;
                r.winding = res.report.verdict.winding;
                r.verdict = res.report.verdict.str();
            } catch (const Error& e) {
                r.verdict = "Inconclusive(" + std::string(e.what()) + ")";
                res.report.inconclusive = true;
                res.report.reason = e.what();
            }
            r.seconds = profile_share + std::chrono::duration<double>(clock::now() - t1).count();
            res.json = report_json(res.report, m.name, Vec(r.alpha), Vec(r.a_plus), r.s, r.L);
            out.push_back(std::move(res));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<std::pair<Vec, double>> sweep_points(const SweepSpec& spec) {
    std::vector<std::pair<Vec, double>> out;
    const int d = int(spec.alpha_grid.size());
    if (d == 0) throw ContractViolation("sweep needs an alpha grid");
    for (const auto& g : spec.alpha_grid)
        if (g.empty()) return out;
    if (spec.s_grid.empty()) return out;
    std::vector<size_t> idx(d, 0);
    while (true) {
        Vec a(d);
        for (int i = 0; i < d; ++i) a[i] = spec.alpha_grid[i][idx[i]];
        for (double s : spec.s_grid) out.emplace_back(a, s);
        int k = d - 1;
        while (k >= 0 && ++idx[k] == spec.alpha_grid[k].size()) idx[k--] = 0;
        if (k < 0) break;
    }
    return out;
}

std::string case_key(const std::string& model, const Vec& alpha, double s) {
    std::string k = model;
    for (int i = 0; i < alpha.size(); ++i) k += " " + fmt17(alpha[i]);
    return k + " s=" + fmt17(s);
}

SweepStats run_sweep(const SweepSpec& spec, const std::string& csv_path, const std::string& manifest_path,
                     const std::function<void(const std::string&)>& log_line) {
    auto say = [&](const std::string& s) {
        if (log_line) log_line(s);
    };
    auto points = sweep_points(spec);
    SweepStats stats;
    stats.cases = int(points.size());

    // Manifest lines are "<rows>\t<key>", written after the rows of that case. Cases finish
    // in enumeration order, so the CSV is the header plus the rows of the manifest cases.
    std::set<std::string> done;
    size_t kept_rows = 0;
    bool resume = std::filesystem::exists(manifest_path) && std::filesystem::exists(csv_path);
    std::vector<std::string> kept;
    if (resume) {
        std::ifstream man(manifest_path);
        std::string line;
        while (std::getline(man, line)) {
            auto tab = line.find('\t');
            if (tab == std::string::npos) continue;
            kept_rows += std::stoul(line.substr(0, tab));
            done.insert(line.substr(tab + 1));
        }
        std::ifstream in(csv_path);
        std::getline(in, line);
        if (line != csv_header) throw ContractViolation(csv_path + ": missing CSV header");
        while (kept.size() < kept_rows && std::getline(in, line)) kept.push_back(line);
        if (kept.size() != kept_rows) throw ContractViolation(csv_path + " is shorter than its manifest");
        for (auto& l : kept)
            if (is_inconclusive(parse_csv_row(l))) ++stats.inconclusive;
        stats.rows = int(kept_rows);
    }
    std::ofstream csv(csv_path, std::ios::trunc);
    csv << csv_header << "\n";
    for (auto& l : kept) csv << l << "\n";
    csv.flush();
    std::ofstream man(manifest_path, resume ? std::ios::app : std::ios::trunc);

    struct Outcome {
        std::vector<RunResult> rows;
        RunLog log;
        std::string error;
    };
    std::vector<std::optional<Outcome>> results(points.size());
    std::vector<size_t> todo;
    for (size_t i = 0; i < points.size(); ++i) {
        if (done.count(case_key(spec.base.model.name, points[i].first, points[i].second)))
            ++stats.cases_resumed;
        else
            todo.push_back(i);
    }
    std::mutex mu;
    size_t next_job = 0, next_write = 0;
    auto write_ready = [&]() {
        // Called with mu held.
        while (next_write < points.size()) {
            const auto& [a, s] = points[next_write];
            std::string key = case_key(spec.base.model.name, a, s);
            if (done.count(key)) {
                ++next_write;
                continue;
            }
            if (!results[next_write]) break;
            auto& o = *results[next_write];
            for (auto& n : o.log.notes) say("note " + key + ": " + n);
            for (auto& why : o.log.skipped) say("skip " + key + ": " + why);
            if (!o.error.empty()) say("error " + key + ": " + o.error);
            for (auto& r : o.rows) {
                csv << csv_row(r.record) << "\n";
                ++stats.rows;
                if (is_inconclusive(r.record)) ++stats.inconclusive;
                stats.evans_evaluations += r.evans_evaluations;
            }
            csv.flush();
            man << o.rows.size() << "\t" << key << "\n";
            man.flush();
            results[next_write].reset();
            ++next_write;
        }
    };
    auto worker = [&]() {
        while (true) {
            size_t i;
            {
                std::lock_guard lk(mu);
                if (next_job >= todo.size()) return;
                i = todo[next_job++];
            }
            RunConfig cfg = spec.base;
            cfg.alpha = points[i].first;
            cfg.s = points[i].second;
            if (spec.jobs > 1) cfg.threads = 1;
            Outcome o;
            try {
                o.rows = run_single(cfg, o.log);
            } catch (const std::exception& e) {
                o.error = e.what();
            }
            std::lock_guard lk(mu);
            results[i] = std::move(o);
            write_ready();
        }
    };
    int jobs = std::max(1, spec.jobs);
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    {
        std::lock_guard lk(mu);
        write_ready();
    }
    return stats;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

struct Svg {
    static constexpr double W = 640, H = 480, M = 50;
    Window w;
    std::ostringstream out;

    explicit Svg(const Window& win) : w(win) {
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
        out << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
        out << "<clipPath id=\"plot\"><rect x=\"50\" y=\"50\" width=\"540\" height=\"380\"/></clipPath>\n";
    }
    double X(double x) const { return M + (x - w.xmin) / (w.xmax - w.xmin) * (W - 2 * M); }
    double Y(double y) const { return H - M - (y - w.ymin) / (w.ymax - w.ymin) * (H - 2 * M); }
    static std::string f(double v) {
        char b[32];
        std::snprintf(b, sizeof b, "%.2f", v);
        return b;
    }
    static std::string g(double v) {
        char b[32];
        std::snprintf(b, sizeof b, "%.4g", v);
        return b;
    }
    void axes(const std::string& xlabel, const std::string& ylabel) {
        out << "<rect x=\"50\" y=\"50\" width=\"540\" height=\"380\" fill=\"none\" stroke=\"black\"/>\n";
        for (int i = 0; i <= 4; ++i) {
            double xv = w.xmin + i * (w.xmax - w.xmin) / 4, yv = w.ymin + i * (w.ymax - w.ymin) / 4;
            out << "<text x=\"" << f(X(xv)) << "\" y=\"448\" font-size=\"11\" text-anchor=\"middle\">" << g(xv)
                << "</text>\n";
            out << "<text x=\"44\" y=\"" << f(Y(yv) + 4) << "\" font-size=\"11\" text-anchor=\"end\">" << g(yv)
                << "</text>\n";
        }
        out << "<text x=\"320\" y=\"470\" font-size=\"13\" text-anchor=\"middle\">" << xlabel << "</text>\n";
        out << "<text x=\"14\" y=\"240\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 240)\">"
            << ylabel << "</text>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color, double width = 1.0) {
        if (pts.size() < 2) return;
        out << "<polyline clip-path=\"url(#plot)\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << f(width)
            << "\" points=\"";
        for (size_t i = 0; i < pts.size(); ++i) out << (i ? " " : "") << f(X(pts[i].first)) << "," << f(Y(pts[i].second));
        out << "\"/>\n";
    }
    std::string str() {
        out << "</svg>\n";
        return out.str();
    }
};

Window padded(double xmin, double xmax, double ymin, double ymax) {
    if (!(xmax > xmin)) xmin -= 1, xmax += 1;
    if (!(ymax > ymin)) ymin -= 1, ymax += 1;
    double px = 0.05 * (xmax - xmin), py = 0.05 * (ymax - ymin);
    return {xmin - px, xmax + px, ymin - py, ymax + py};
}

const char* morse_color(Morse m) {
    switch (m) {
        case Morse::Repellor: return "#c0392b";
        case Morse::Attractor: return "#2255aa";
        case Morse::Saddle: return "#1e8449";
        case Morse::Degenerate: return "#777777";
    }
    return "black";
}

}  // namespace

std::string portrait_svg(const PhasePortrait& p) {
    Svg svg(p.window);
    const auto& w = p.window;
    if (p.mask_n > 0) {
        double dx = (w.xmax - w.xmin) / p.mask_n, dy = (w.ymax - w.ymin) / p.mask_n;
        for (int iy = 0; iy < p.mask_n; ++iy)
            for (int ix = 0; ix < p.mask_n; ++ix) {
                if (!p.elliptic_mask[iy * p.mask_n + ix]) continue;
                double x0 = w.xmin + ix * dx, y1 = w.ymin + (iy + 1) * dy;
                svg.out << "<rect x=\"" << Svg::f(svg.X(x0)) << "\" y=\"" << Svg::f(svg.Y(y1)) << "\" width=\""
                        << Svg::f(svg.X(x0 + dx) - svg.X(x0)) << "\" height=\"" << Svg::f(svg.Y(y1 - dy) - svg.Y(y1))
                        << "\" fill=\"#e6e6e6\" stroke=\"none\"/>\n";
            }
    }
    if (p.show_feasibility && w.ymin < 0 && w.ymax > 0)
        svg.polyline({{w.xmin, 0.0}, {w.xmax, 0.0}}, "#999999", 1.0);
    for (const auto& tr : p.trajectories) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& a : tr) pts.emplace_back(a[0], a[1]);
        svg.polyline(pts, "#444444", 0.8);
    }
    if (p.circle_radius) {
        double r = *p.circle_radius;
        svg.out << "<ellipse clip-path=\"url(#plot)\" cx=\"" << Svg::f(svg.X(0)) << "\" cy=\"" << Svg::f(svg.Y(0))
                << "\" rx=\"" << Svg::f(svg.X(r) - svg.X(0)) << "\" ry=\"" << Svg::f(svg.Y(0) - svg.Y(r))
                << "\" fill=\"none\" stroke=\"#8e44ad\" stroke-width=\"1.5\"/>\n";
    }
    for (const auto& e : p.equilibria) {
        svg.out << "<circle cx=\"" << Svg::f(svg.X(e.a[0])) << "\" cy=\"" << Svg::f(svg.Y(e.a[1]))
                << "\" r=\"4\" fill=\"" << (e.feasible ? morse_color(e.morse) : "white") << "\" stroke=\""
                << morse_color(e.morse) << "\"/>\n";
    }
    // Compressible portraits live in the (a2, a3) plane.
    if (p.show_feasibility)
        svg.axes("a2", "a3");
    else
        svg.axes("a1", "a2");
    return svg.str();
}

std::string image_curve_svg(const ContourReport& rep) {
    // D normalized by its largest modulus on the contour.
    double top = -INFINITY;
    for (const auto& s : rep.samples) top = std::max(top, s.log_D.real());
    std::vector<std::pair<double, double>> pts;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    for (const auto& s : rep.samples) {
        cd d = std::exp(s.log_D - top);
        pts.emplace_back(d.real(), d.imag());
        xmin = std::min(xmin, d.real());
        xmax = std::max(xmax, d.real());
        ymin = std::min(ymin, d.imag());
        ymax = std::max(ymax, d.imag());
    }
    Svg svg(padded(xmin, xmax, ymin, ymax));
    svg.polyline({{svg.w.xmin, 0.0}, {svg.w.xmax, 0.0}}, "#bbbbbb");
    svg.polyline({{0.0, svg.w.ymin}, {0.0, svg.w.ymax}}, "#bbbbbb");
    svg.polyline(pts, "#2255aa", 1.5);
    svg.out << "<circle cx=\"" << Svg::f(svg.X(0)) << "\" cy=\"" << Svg::f(svg.Y(0))
            << "\" r=\"3\" fill=\"black\"/>\n";
    svg.axes("Re D", "Im D");
    return svg.str();
}

std::string profile_svg(const ProfileGrid& grid) {
    static const char* colors[] = {"#c0392b", "#2255aa", "#1e8449"};
    double ymin = INFINITY, ymax = -INFINITY;
    for (const auto& a : grid.a_vals)
        for (int i = 0; i < a.size(); ++i) ymin = std::min(ymin, a[i]), ymax = std::max(ymax, a[i]);
    if (grid.size() == 0) ymin = 0, ymax = 1;
    double zmin = grid.size() ? grid.z.front() : -1, zmax = grid.size() ? grid.z.back() : 1;
    Svg svg(padded(zmin, zmax, ymin, ymax));
    int n = grid.size() ? int(grid.a_vals[0].size()) : 0;
    for (int i = 0; i < n; ++i) {
        std::vector<std::pair<double, double>> pts;
        for (size_t j = 0; j < grid.size(); ++j) pts.emplace_back(grid.z[j], grid.a_vals[j][i]);
        svg.polyline(pts, colors[i % 3], 1.5);
    }
    svg.axes("z", "a");
    return svg.str();
}

}  // namespace vevans
