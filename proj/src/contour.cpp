#include "vevans/contour.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "vevans/errors.hpp"

namespace vevans {

namespace {

double wrap_phase(double x) {
    x = std::remainder(x, 2 * M_PI);
    return x <= -M_PI ? x + 2 * M_PI : x;
}

// |D1/D0 - 1| from log values, independent of the log branch.
double rel_change(cd l0, cd l1) {
    cd d = l1 - l0;
    if (!std::isfinite(d.real())) return INFINITY;
    return std::abs(std::exp(cd(d.real(), wrap_phase(d.imag()))) - 1.0);
}

std::string to_string(cd l) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g%+.6gi", l.real(), l.imag());
    return buf;
}

}  // namespace

PathEvaluator analytic_evaluator(std::function<cd(cd)> f) {
    return [f = std::move(f)](const std::vector<cd>& path) {
        std::vector<cd> out;
        out.reserve(path.size());
        for (cd l : path) {
            cd v = f(l);
            out.push_back(v == 0.0 ? cd(-INFINITY) : std::log(v));
        }
        return out;
    };
}

struct EvansEvaluator::Impl {
    std::shared_ptr<const EvansSystem> sys;
    DruryOptions opts;
    int threads = 1;
    int kp = 0, km = 0;
    std::mutex mu;
    std::map<std::tuple<double, double, double>, cd> cache;
    EvansEvaluatorStats stats;
};

EvansEvaluator::EvansEvaluator(std::shared_ptr<const EvansSystem> sys, const DruryOptions& opts, int threads)
    : impl_(std::make_shared<Impl>()) {
    impl_->sys = std::move(sys);
    impl_->opts = opts;
    impl_->threads = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    std::tie(impl_->kp, impl_->km) = reference_dimensions(*impl_->sys);
}

int EvansEvaluator::k_plus() const { return impl_->kp; }
int EvansEvaluator::k_minus() const { return impl_->km; }

EvansEvaluatorStats EvansEvaluator::stats() const {
    std::lock_guard<std::mutex> lock(impl_->mu);
    return impl_->stats;
}

std::vector<cd> EvansEvaluator::operator()(const std::vector<cd>& path) const {
    auto& im = *impl_;
    std::vector<cd> out(path.size());
    if (path.empty()) return out;
    if (path[0].imag() != 0.0) throw ContractViolation("path must start on the real axis");
    const double base = path[0].real();
    auto key = [&](cd l) { return std::make_tuple(base, l.real(), l.imag()); };

    // Transport is sequential along the path; only uncached points keep their state.
    std::vector<std::pair<size_t, AnalyticBasisState>> todo;
    std::vector<long> from_cache(path.size(), -1);
    AnalyticBasisState st = real_basis_state(*im.sys, base, im.kp, im.km);
    for (size_t i = 0; i < path.size(); ++i) {
        if (i > 0 && path[i] != path[i - 1]) {
            try {
                st = kato_transport_state(st, *im.sys, path[i]);
            } catch (const SplittingDegenerate& e) {
                throw SplittingDegenerate(std::string(e.what()) + " near lambda = " + to_string(path[i]));
            } catch (const ProjectorFailure& e) {
                throw ProjectorFailure(std::string(e.what()) + " from lambda = " + to_string(path[i - 1]) +
                                       " to " + to_string(path[i]));
            }
        }
        std::lock_guard<std::mutex> lock(im.mu);
        auto it = im.cache.find(key(path[i]));
        if (it != im.cache.end()) {
            out[i] = it->second;
        } else if (std::none_of(todo.begin(), todo.end(), [&](const auto& p) { return path[p.first] == path[i]; })) {
            todo.emplace_back(i, st);
        } else {
            from_cache[i] = 1;
        }
    }

    std::atomic<size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto work = [&] {
        for (size_t j = next++; j < todo.size(); j = next++) {
            try {
                auto v = evaluate_D(*im.sys, todo[j].second, 0.0, im.opts);
                std::lock_guard<std::mutex> lock(im.mu);
                out[todo[j].first] = v.log_D;
                im.cache[key(path[todo[j].first])] = v.log_D;
                ++im.stats.evaluations;
                im.stats.max_drift = std::max(im.stats.max_drift, v.max_drift);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    int nt = std::min<int>(im.threads, int(todo.size()));
    if (nt <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (err) std::rethrow_exception(err);
    for (size_t i = 0; i < path.size(); ++i)
        if (from_cache[i] > 0) {
            std::lock_guard<std::mutex> lock(im.mu);
            out[i] = im.cache.at(key(path[i]));
        }
    return out;
}

void validate(const ContourSpec& spec) {
    if (!(spec.R > spec.min_modulus) || spec.min_modulus <= 0)
        throw ContractViolation("contour needs R > min_modulus > 0");
    if (spec.n_init < 8) throw ContractViolation("contour needs n_init >= 8");
    if (spec.max_step_change <= 0) throw ContractViolation("max_step_change must be positive");
}

cd contour_point(const ContourSpec& spec, double t) {
    if (t > 2.5) return std::conj(contour_point(spec, 5.0 - t));
    const double R = spec.R, e = spec.min_modulus;
    if (t <= 1.0) return std::polar(R, 0.5 * M_PI * t);
    if (t <= 2.0) {
        double w = 1.0 - (t - 1.0);
        return cd(0.0, e + (R - e) * (spec.quadratic_mesh ? w * w : w));
    }
    if (t == 2.5) return cd(e, 0.0);
    return std::polar(e, 0.5 * M_PI - M_PI * (t - 2.0));
}

std::vector<double> contour_params(const ContourSpec& spec) {
    validate(spec);
    const int m = (spec.n_init + 1) / 2;
    const int n_i = 2;
    const int n_a = std::max(1, int(std::lround((m - n_i) * 3.0 / 8.0)));
    const int n_x = std::max(1, m - n_i - n_a);
    std::vector<double> up;
    for (int j = 0; j < n_a; ++j) up.push_back(double(j) / n_a);
    for (int j = 0; j < n_x; ++j) up.push_back(1.0 + double(j) / n_x);
    for (int j = 0; j < n_i; ++j) up.push_back(2.0 + 0.5 * j / n_i);
    std::vector<double> ts = up;
    ts.push_back(2.5);
    for (auto it = up.rbegin(); it != up.rend(); ++it) ts.push_back(5.0 - *it);
    return ts;
}

std::vector<cd> mesh_contour(const ContourSpec& spec) {
    std::vector<cd> out;
    for (double t : contour_params(spec)) out.push_back(contour_point(spec, t));
    return out;
}

namespace {

struct Branch {
    std::vector<double> ts;  // ts[0] is the base point; monotone
};

struct Adaptive {
    std::vector<ContourSample> samples;
    int refinements = 0;
    std::string error;
};

// Samples on branches that each start at a real base point, bisecting steps whose relative
// change exceeds cap. Branches share only their end or base points; a shared point keeps
// the value from the first branch.
Adaptive adaptive_samples(const PathEvaluator& eval, const std::function<cd(double)>& point,
                          std::vector<Branch> branches, double cap, int max_depth) {
    Adaptive res;
    std::map<double, int> depth;
    for (auto& b : branches)
        for (double t : b.ts) depth.emplace(t, 0);
    while (true) {
        std::map<double, cd> vals;
        try {
            for (auto& b : branches) {
                bool asc = b.ts.back() >= b.ts.front();
                std::sort(b.ts.begin(), b.ts.end());
                if (!asc) std::reverse(b.ts.begin(), b.ts.end());
                std::vector<cd> path;
                for (double t : b.ts) path.push_back(point(t));
                auto logs = eval(path);
                for (size_t i = 0; i < b.ts.size(); ++i) {
                    vals.emplace(b.ts[i], logs[i]);
                }
            }
        } catch (const Error& e) {
            res.error = e.what();
            return res;
        }
        res.samples.clear();
        for (auto& [t, v] : vals) res.samples.push_back({t, point(t), v, depth[t]});
        std::vector<double> mids;
        for (size_t j = 0; j + 1 < res.samples.size(); ++j) {
            const auto &a = res.samples[j], &b = res.samples[j + 1];
            int d = std::max(a.depth, b.depth);
            if (rel_change(a.log_D, b.log_D) > cap && d < max_depth) {
                double m = 0.5 * (a.t + b.t);
                mids.push_back(m);
                depth[m] = d + 1;
            }
        }
        if (mids.empty()) return res;
        res.refinements += int(mids.size());
        std::vector<std::pair<double, double>> range;
        for (auto& b : branches) range.push_back(std::minmax(b.ts.front(), b.ts.back()));
        for (double m : mids) {
            for (size_t i = 0; i < branches.size(); ++i) {
                if (m > range[i].first && m < range[i].second) {
                    branches[i].ts.push_back(m);
                    break;
                }
            }
        }
    }
}

}  // namespace

ContourReport winding_number(const PathEvaluator& eval, const ContourSpec& spec) {
    ContourReport rep;
    rep.spec = spec;
    auto ts = contour_params(spec);
    Branch up, low;
    for (double t : ts) {
        if (t <= 2.5) up.ts.push_back(t);
        if (t >= 2.5) low.ts.push_back(t);
    }
    std::reverse(low.ts.begin(), low.ts.end());
    auto ad = adaptive_samples(
        eval, [&](double t) { return contour_point(spec, t); }, {up, low}, spec.max_step_change, spec.max_depth);
    rep.samples = std::move(ad.samples);
    rep.refinements = ad.refinements;
    if (!ad.error.empty()) {
        rep.inconclusive = true;
        rep.reason = ad.error;
        return rep;
    }
    double maxlog = -INFINITY;
    for (auto& s : rep.samples) maxlog = std::max(maxlog, s.log_D.real());
    for (auto& s : rep.samples) {
        if (!(s.log_D.real() >= maxlog + std::log(1e-13))) {
            rep.inconclusive = true;
            rep.reason = "possible root on the contour near lambda = " + to_string(s.lambda);
            return rep;
        }
    }
    double phase = 0.0, sum_rel = 0.0;
    for (size_t j = 0; j + 1 < rep.samples.size(); ++j) {
        cd a = rep.samples[j].log_D, b = rep.samples[j + 1].log_D;
        double r = rel_change(a, b);
        rep.max_rel_step = std::max(rep.max_rel_step, r);
        sum_rel += r;
        phase += wrap_phase(b.imag() - a.imag());
    }
    rep.mean_rel_step = sum_rel / std::max<size_t>(1, rep.samples.size() - 1);
    rep.winding_raw = phase / (2 * M_PI);
    rep.winding = int(std::lround(rep.winding_raw));
    if (rep.max_rel_step > 1.0) {
        rep.inconclusive = true;
        rep.reason = "relative change above 1 after maximal refinement";
    }
    // The indentation runs clockwise around the origin.
    double indent = 0.0;
    for (size_t j = 0; j + 1 < rep.samples.size(); ++j)
        if (rep.samples[j].t >= 2.0 && rep.samples[j + 1].t <= 3.0)
            indent += wrap_phase(rep.samples[j + 1].log_D.imag() - rep.samples[j].log_D.imag());
    double raw = -indent / M_PI;
    rep.origin_order = int(std::lround(raw));
    rep.origin_order_valid = std::abs(raw - rep.origin_order) < 0.25;
    return rep;
}

OriginOrder origin_order(const PathEvaluator& eval, double r, double max_step_change, int max_depth) {
    Branch up{{0.0, 0.25, 0.5, 0.75, 1.0}}, low{{0.0, -0.25, -0.5, -0.75, -1.0}};
    auto ad = adaptive_samples(
        eval, [&](double t) { return t == 0.0 ? cd(r, 0.0) : std::polar(r, 0.5 * M_PI * t); }, {up, low},
        max_step_change, max_depth);
    OriginOrder o;
    if (!ad.error.empty()) return o;
    double phase = 0.0, worst = 0.0;
    for (size_t j = 0; j + 1 < ad.samples.size(); ++j) {
        phase += wrap_phase(ad.samples[j + 1].log_D.imag() - ad.samples[j].log_D.imag());
        worst = std::max(worst, rel_change(ad.samples[j].log_D, ad.samples[j + 1].log_D));
    }
    o.raw = phase / M_PI;
    o.order = int(std::lround(o.raw));
    o.valid = worst <= 1.0 && std::abs(o.raw - o.order) < 0.25;
    return o;
}

std::vector<double> default_fit_lambdas(double R) {
    std::vector<double> out;
    for (double f : {4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0}) out.push_back(f * R);
    return out;
}

AsymptoticFit fit_asymptotics(const PathEvaluator& eval, const std::vector<double>& lambdas) {
    if (lambdas.size() < 2) throw ContractViolation("fit needs at least two samples");
    for (size_t i = 0; i < lambdas.size(); ++i)
        if (lambdas[i] <= 0 || (i > 0 && lambdas[i] <= lambdas[i - 1]))
            throw ContractViolation("fit samples must be positive and increasing");
    std::vector<cd> path(lambdas.begin(), lambdas.end());
    auto logs = eval(path);
    const size_t n = lambdas.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        if (!std::isfinite(logs[i].real()))
            throw DomainError("Evans function vanishes at fit sample lambda = " + std::to_string(lambdas[i]));
        double x = std::sqrt(lambdas[i]), y = logs[i].real();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    AsymptoticFit f;
    f.lambdas = lambdas;
    f.fit_alpha = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.fit_log_c = (sy - f.fit_alpha * sx) / n;
    f.phase = wrap_phase(logs[0].imag());
    for (size_t i = 0; i < n; ++i)
        f.residual = std::max(f.residual,
                              std::abs(logs[i].real() - f.fit_log_c - f.fit_alpha * std::sqrt(lambdas[i])));
    return f;
}

RadiusChoice choose_radius(const PathEvaluator& eval, const AsymptoticFit& fit, double R_start, double tol,
                           double R_max, int n_probe) {
    if (fit.lambdas.empty()) throw ContractViolation("fit has no samples");
    RadiusChoice rc;
    const int half = std::max(1, (n_probe - 1) / 2);
    const cd base = fit.lambdas.front();
    for (double R = R_start; R <= R_max * (1 + 1e-12); R *= 2) {
        rc.tried.push_back(R);
        double worst = 0.0;
        for (int sgn : {1, -1}) {
            std::vector<cd> path{base};
            for (int j = 0; j <= half; ++j) path.push_back(std::polar(R, sgn * 0.5 * M_PI * j / half));
            auto logs = eval(path);
            for (size_t i = 1; i < path.size(); ++i) {
                double model = fit.fit_log_c + fit.fit_alpha * std::sqrt(path[i]).real();
                worst = std::max(worst, std::abs(std::exp(logs[i].real() - model) - 1.0));
            }
        }
        rc.R = R;
        rc.max_rel_err = worst;
        if (worst < tol) {
            rc.accepted = true;
            return rc;
        }
    }
    return rc;
}

std::string Verdict::str() const {
    switch (kind) {
        case VerdictKind::Stable: return "Stable";
        case VerdictKind::Unstable: return "Unstable(" + std::to_string(winding) + ")";
        case VerdictKind::Inconclusive: return "Inconclusive(" + reason + ")";
    }
    return "";
}

Verdict verdict(const ContourReport& rep, const ShockCandidate& cand) {
    Verdict v;
    v.winding = rep.winding;
    auto inconclusive = [&](const std::string& why) {
        v.kind = VerdictKind::Inconclusive;
        v.reason = why;
        return v;
    };
    if (rep.inconclusive) return inconclusive(rep.reason);
    if (rep.radius && !rep.radius->accepted) return inconclusive("asymptotic fit not reached for R <= R_max");
    switch (cand.shock_class) {
        case ShockClass::Degenerate: return inconclusive("degenerate shock class");
        case ShockClass::Lax:
        case ShockClass::Overcompressive:
            if (rep.winding != 0) {
                v.kind = VerdictKind::Unstable;
                return v;
            }
            if (!rep.origin_order_valid) return inconclusive("behaviour at lambda = 0 not resolved");
            if (rep.origin_order != 0)
                return inconclusive("D vanishes at lambda = 0 to order " + std::to_string(rep.origin_order));
            v.kind = VerdictKind::Stable;
            return v;
        case ShockClass::Undercompressive: {
            if (!rep.origin_order_valid) return inconclusive("order of the zero at the origin not resolved");
            v.winding = rep.total_winding();
            int expected = 1 + std::abs(cand.ell_tilde);
            v.kind = rep.winding == 0 && rep.origin_order == expected ? VerdictKind::Stable : VerdictKind::Unstable;
            return v;
        }
    }
    return v;
}

ContourReport analyze_stability(const PathEvaluator& eval, const ShockCandidate& cand, const ContourOptions& opts) {
    ContourSpec spec = opts.spec;
    std::optional<AsymptoticFit> fit;
    std::optional<RadiusChoice> rc;
    if (opts.choose_R) {
        try {
            fit = fit_asymptotics(eval, default_fit_lambdas(opts.R_start));
            rc = choose_radius(eval, *fit, opts.R_start, opts.fit_tol, opts.R_max);
            fit->max_rel_err_on_contour = rc->max_rel_err;
            spec.R = rc->R;
        } catch (const Error& e) {
            ContourReport rep;
            rep.spec = spec;
            rep.fit = fit;
            rep.inconclusive = true;
            rep.reason = std::string("radius selection failed: ") + e.what();
            rep.verdict = verdict(rep, cand);
            return rep;
        }
        if (!rc->accepted) {
            ContourReport rep;
            rep.spec = spec;
            rep.fit = fit;
            rep.radius = rc;
            rep.verdict = verdict(rep, cand);
            return rep;
        }
    }
    ContourReport rep = winding_number(eval, spec);
    rep.fit = fit;
    rep.radius = rc;
    if (!rep.inconclusive && opts.check_origin && cand.shock_class == ShockClass::Undercompressive) {
        auto o = origin_order(eval, spec.min_modulus / 10, spec.max_step_change, spec.max_depth);
        rep.origin_order_valid = rep.origin_order_valid && o.valid && o.order == rep.origin_order;
    }
    rep.verdict = verdict(rep, cand);
    return rep;
}

std::string report_json(const ContourReport& rep, const std::string& model, const Vec& alpha, const Vec& a_plus,
                        double s, double L) {
    nlohmann::ordered_json j;
    j["model"] = model;
    j["alpha"] = std::vector<double>(alpha.data(), alpha.data() + alpha.size());
    j["a_plus"] = std::vector<double>(a_plus.data(), a_plus.data() + a_plus.size());
    j["s"] = s;
    j["R"] = rep.spec.R;
    j["n_points"] = rep.n_points();
    j["max_rel_step"] = rep.max_rel_step;
    j["mean_rel_step"] = rep.mean_rel_step;
    j["L"] = L;
    j["winding"] = rep.winding;
    j["verdict"] = rep.verdict.str();
    j["refinements"] = rep.refinements;
    j["origin_order"] = rep.origin_order;
    if (rep.fit) {
        j["fit_log_c"] = rep.fit->fit_log_c;
        j["fit_alpha"] = rep.fit->fit_alpha;
        j["fit_rel_err"] = rep.fit->max_rel_err_on_contour;
    }
    auto& arr = j["samples"] = nlohmann::ordered_json::array();
    for (auto& smp : rep.samples)
        arr.push_back({smp.t, smp.lambda.real(), smp.lambda.imag(), smp.log_D.real(), smp.log_D.imag()});
    return j.dump(2);
}

}  // namespace vevans
