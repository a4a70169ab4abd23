#include "vevans/profile.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "vevans/errors.hpp"
#include "vevans/ode.hpp"

namespace vevans {

double phi(const Vec& a, const PhiPotential& P) {
    const auto& v = P.variant;
    Vec c = grad_potential(P.alpha, P.pot, v) - P.sigma * P.alpha;
    return eval_potential(a, P.pot, v) - 0.5 * P.sigma * a.squaredNorm() - c.dot(a);
}

Vec grad_phi(const Vec& a, const PhiPotential& P) {
    const auto& v = P.variant;
    return grad_potential(a, P.pot, v) - P.sigma * a -
           (grad_potential(P.alpha, P.pot, v) - P.sigma * P.alpha);
}

Mat hess_phi(const Vec& a, const PhiPotential& P) {
    int d = P.variant.strain_dim;
    return hess_potential(a, P.pot, P.variant) - P.sigma * Mat::Identity(d, d);
}

Vec profile_flow_rhs(const Vec& a, const PhiPotential& P, double s) {
    if (s == 0.0) throw DomainError("profile flow needs s != 0");
    Vec g = grad_phi(a, P) / s;
    int i3 = P.variant.a3_index();
    if (i3 >= 0) {
        if (a[i3] <= 0.0) throw DomainError("profile flow needs a3 > 0");
        g[i3] *= 0.5;
        g *= a[i3];
    }
    return g;
}

Mat profile_flow_jacobian(const Vec& a, const PhiPotential& P, double s) {
    if (s == 0.0) throw DomainError("profile flow needs s != 0");
    Mat J = hess_phi(a, P) / s;
    int i3 = P.variant.a3_index();
    if (i3 >= 0) {
        Vec g = grad_phi(a, P) / s;
        Vec dinv = Vec::Ones(a.size());
        dinv[i3] = 0.5;
        J = a[i3] * dinv.asDiagonal() * J;
        J.col(i3) += dinv.asDiagonal() * g;
    }
    return J;
}

void ProfileGrid::interpolate(double zq, Vec& a, Vec& ap) const {
    if (zq <= z.front()) {
        a = a_vals.front();
        ap = a_prime.front();
        return;
    }
    if (zq >= z.back()) {
        a = a_vals.back();
        ap = a_prime.back();
        return;
    }
    size_t i = std::upper_bound(z.begin(), z.end(), zq) - z.begin() - 1;
    double h = z[i + 1] - z[i];
    double t = (zq - z[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    a = h00 * a_vals[i] + h10 * h * a_prime[i] + h01 * a_vals[i + 1] + h11 * h * a_prime[i + 1];
    double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1, d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
    ap = (d00 * a_vals[i] + d01 * a_vals[i + 1]) / h + d10 * a_prime[i] + d11 * a_prime[i + 1];
}

namespace {

struct Sample {
    double t;
    Vec a;
};

struct Shot {
    std::vector<Sample> path;  // in integration order
    bool reached = false;
    double miss = std::numeric_limits<double>::infinity();
    std::string why;
};

State to_state(const Vec& a) { return State(a.data(), a.data() + a.size()); }
Vec from_state(const State& x) { return Eigen::Map<const Vec>(x.data(), x.size()); }

// Integrates the profile flow from a0 (dir = +1 forward, -1 backward in z) until it comes
// within `capture` of target, stalls at another equilibrium, leaves the feasible region,
// or runs out of z.
Shot shoot(const Vec& a0, double dir, const Vec& target, double capture, const PhiPotential& P,
           double s, const ProfileOptions& opts, double t0 = 0.0) {
    Shot out;
    int i3 = P.variant.a3_index();
    double bound = 1e3 * (1.0 + P.alpha.norm() + target.norm());
    auto sys = [&](const State& x, State& dx, double) {
        Vec a = from_state(x);
        if (i3 >= 0 && a[i3] <= 1e-6) a[i3] = 1e-6;  // guard; the observer stops the run
        Vec f = profile_flow_rhs(a, P, s);
        dx.assign(f.data(), f.data() + f.size());
    };
    State x = to_state(a0);
    out.path.push_back({t0, a0});
    out.miss = (a0 - target).norm();
    OdeTolerances tol{opts.abs_tol, opts.rel_tol, opts.h_max};
    try {
        integrate_rk45(sys, x, t0, t0 + dir * opts.z_max, tol, [&](double t, const State& xs) {
            Vec a = from_state(xs);
            out.path.push_back({t, a});
            double dist = (a - target).norm();
            out.miss = std::min(out.miss, dist);
            if (dist <= capture) {
                out.reached = true;
                return false;
            }
            if (i3 >= 0 && a[i3] <= 1e-6) {
                out.why = "left the feasible region a3 > 0";
                return false;
            }
            if (a.norm() > bound) {
                out.why = "escaped to infinity";
                return false;
            }
            if (profile_flow_rhs(a, P, s).norm() < 1e-3 * capture) {
                out.why = "stalled at another equilibrium";
                return false;
            }
            return true;
        });
    } catch (const StiffFailure& e) {
        out.why = e.what();
    }
    if (!out.reached && out.why.empty()) out.why = "no capture within z_max";
    return out;
}

struct Eig {
    std::vector<double> values;
    std::vector<Vec> vectors;
};

// Eigen-decomposition of the flow Jacobian; it is similar to a symmetric matrix so the
// spectrum is real.
Eig flow_eigen(const Vec& a, const PhiPotential& P, double s) {
    Mat J = profile_flow_jacobian(a, P, s);
    Eigen::EigenSolver<Mat> es(J);
    Eig out;
    for (int k = 0; k < J.rows(); ++k) {
        out.values.push_back(es.eigenvalues()[k].real());
        Vec v = es.eigenvectors().col(k).real();
        out.vectors.push_back(v.normalized());
    }
    return out;
}

int count_sign(const Eig& e, double sign) {
    int n = 0;
    for (double v : e.values)
        if (sign * v > 1e-10) ++n;
    return n;
}

ProfileGrid assemble(std::vector<Sample> path, const ShockCandidate& cand, const PhiPotential& P,
                     const ModelVariant& variant, const ProfileOptions& opts) {
    double s = cand.s;
    const Vec& alpha = cand.alpha;
    const Vec& ap = cand.a_plus;
    // Center at the steepest point.
    size_t icen = 0;
    double best = -1;
    for (size_t i = 0; i < path.size(); ++i) {
        double f = profile_flow_rhs(path[i].a, P, s).norm();
        if (f > best) {
            best = f;
            icen = i;
        }
    }
    double tc = path[icen].t;
    for (auto& p : path) p.t -= tc;

    auto err_left = [&](const Vec& a) { return (a - alpha).norm(); };
    auto err_right = [&](const Vec& a) { return (a - ap).norm(); };

    double L = opts.fixed_L;
    if (L <= 0.0) {
        // Minimal symmetric L with both tails inside the tolerance.
        double Lm = 0.0, Lp = 0.0;
        for (size_t i = icen; i-- > 0;) {
            if (err_left(path[i].a) <= opts.tol) {
                double e0 = err_left(path[i].a), e1 = err_left(path[i + 1].a);
                double w = (e1 > e0) ? (opts.tol - e0) / (e1 - e0) : 0.0;
                Lm = -(path[i].t + w * (path[i + 1].t - path[i].t));
                break;
            }
        }
        for (size_t i = icen + 1; i < path.size(); ++i) {
            if (err_right(path[i].a) <= opts.tol) {
                double e0 = err_right(path[i - 1].a), e1 = err_right(path[i].a);
                double w = (e0 > e1) ? (e0 - opts.tol) / (e0 - e1) : 1.0;
                Lp = path[i - 1].t + w * (path[i].t - path[i - 1].t);
                break;
            }
        }
        L = std::max({Lm, Lp, 1e-3});
    }

    // Extend the ends by integrating further into the endstates when needed.
    Vec far_target = Vec::Constant(alpha.size(), std::numeric_limits<double>::infinity());
    ProfileOptions ext = opts;
    if (path.front().t > -L - 1e-12) {
        ext.z_max = path.front().t + L + 1.0;
        auto more = shoot(path.front().a, -1.0, far_target, 0.0, P, s, ext, path.front().t);
        std::vector<Sample> pre(more.path.rbegin(), more.path.rend() - 1);
        path.insert(path.begin(), pre.begin(), pre.end());
    }
    if (path.back().t < L + 1e-12) {
        ext.z_max = L - path.back().t + 1.0;
        auto more = shoot(path.back().a, 1.0, far_target, 0.0, P, s, ext, path.back().t);
        path.insert(path.end(), more.path.begin() + 1, more.path.end());
    }
    if (path.front().t > -L || path.back().t < L)
        throw ConnectionNotFound("profile could not be extended to L=" + std::to_string(L), 0.0);

    ProfileGrid g;
    g.alpha = alpha;
    g.a_plus = ap;
    g.s = s;
    g.L = L;
    // Raw samples, then Hermite end points at exactly -L and L.
    ProfileGrid raw;
    for (const auto& p : path) {
        raw.z.push_back(p.t);
        raw.a_vals.push_back(p.a);
        raw.a_prime.push_back(profile_flow_rhs(p.a, P, s));
    }
    auto push = [&](double z, const Vec& a) {
        Vec f = profile_flow_rhs(a, P, s);
        g.z.push_back(z);
        g.a_vals.push_back(a);
        g.a_prime.push_back(f);
        g.b_prime.push_back(-s * f);
    };
    Vec a, apr;
    raw.interpolate(-L, a, apr);
    push(-L, a);
    for (size_t i = 0; i < raw.size(); ++i)
        if (raw.z[i] > -L + 1e-9 && raw.z[i] < L - 1e-9) push(raw.z[i], raw.a_vals[i]);
    raw.interpolate(L, a, apr);
    push(L, a);
    g.endpoint_err = std::max(err_left(g.a_vals.front()), err_right(g.a_vals.back()));

    if (variant.compressible()) {
        for (size_t i = 0; i < g.size(); ++i) {
            auto ch = characteristics(g.a_vals[i], P.pot, variant);
            if (*std::min_element(ch.m.begin(), ch.m.end()) < 0.0) {
                g.elliptic_crossing = true;
                g.log.push_back("profile crosses the elliptic region near z=" + std::to_string(g.z[i]));
                break;
            }
        }
    }
    return g;
}

PhiPotential phi_of(const ShockCandidate& c, const ElasticPotential& pot, const ModelVariant& v) {
    return {c.alpha, c.sigma, pot, v};
}

void check_candidate(const ShockCandidate& c, const ElasticPotential& pot, const ModelVariant& v) {
    if (c.s == 0.0) throw DomainError("profiles need s != 0");
    if (c.alpha.size() != v.strain_dim || c.a_plus.size() != v.strain_dim)
        throw ContractViolation("candidate endstates do not match the variant");
    double scale = 1.0 + std::pow(c.alpha.norm() + c.a_plus.norm(), 3);
    if (rh_residual(c.alpha, c.a_plus, c.sigma, pot, v) > 1e-6 * scale)
        throw ContractViolation("candidate endstates do not satisfy RH");
    if ((c.alpha - c.a_plus).norm() <= 1e-6) throw ContractViolation("endstates coincide");
}

}  // namespace

ProfileGrid compute_profile(const ShockCandidate& cand, const ElasticPotential& pot,
                            const ModelVariant& variant, const ProfileOptions& opts) {
    check_candidate(cand, pot, variant);
    PhiPotential P = phi_of(cand, pot, variant);
    double s = cand.s;
    Vec d = cand.a_plus - cand.alpha;
    double amp = d.norm();
    double eps = 1e-6 * amp;
    double capture = std::max(opts.capture * std::max(1.0, amp), 100 * opts.abs_tol);  // explicit RK stalls near stiff sinks
    Eig em = flow_eigen(cand.alpha, P, s), ep = flow_eigen(cand.a_plus, P, s);
    int nu = count_sign(em, 1.0), ns = count_sign(ep, -1.0);
    if (nu == 0) throw ConnectionNotFound("left endstate has no unstable direction", amp);
    if (ns == 0) throw ConnectionNotFound("right endstate has no stable direction", amp);

    double best_miss = std::numeric_limits<double>::infinity();
    std::string why;
    auto try_dirs = [&](const Eig& e, double sign, const Vec& from, const Vec& to, double dir) -> std::optional<Shot> {
        for (size_t k = 0; k < e.values.size(); ++k) {
            if (sign * e.values[k] <= 1e-10) continue;
            Vec v = e.vectors[k];
            double proj = v.dot(dir > 0 ? d : Vec(-d));
            std::vector<double> signs;
            if (std::abs(proj) > 1e-8 * amp) signs = {proj > 0 ? 1.0 : -1.0, proj > 0 ? -1.0 : 1.0};
            else signs = {1.0, -1.0};
            for (double sg : signs) {
                auto shot = shoot(from + sg * eps * v, dir, to, capture, P, s, opts);
                if (shot.reached) return shot;
                if (shot.miss < best_miss) {
                    best_miss = shot.miss;
                    why = shot.why;
                }
            }
        }
        return std::nullopt;
    };

    std::vector<Sample> path;
    if (nu == 1) {
        auto shot = try_dirs(em, 1.0, cand.alpha, cand.a_plus, 1.0);
        if (!shot) throw ConnectionNotFound("forward shooting missed a+ (" + why + ")", best_miss);
        path = shot->path;
    } else if (ns == 1) {
        auto shot = try_dirs(ep, -1.0, cand.a_plus, cand.alpha, -1.0);
        if (!shot) throw ConnectionNotFound("backward shooting missed alpha (" + why + ")", best_miss);
        path.assign(shot->path.rbegin(), shot->path.rend());
    } else {
        auto seeds = overcompressive_seeds(cand, pot, variant, 1, opts);
        return compute_profile_through(cand, seeds.front(), pot, variant, opts);
    }
    auto g = assemble(path, cand, P, variant, opts);
    g.ell_estimate = 1;
    return g;
}

ProfileGrid compute_profile_through(const ShockCandidate& cand, const Vec& seed, const ElasticPotential& pot,
                                    const ModelVariant& variant, const ProfileOptions& opts) {
    check_candidate(cand, pot, variant);
    PhiPotential P = phi_of(cand, pot, variant);
    double amp = (cand.a_plus - cand.alpha).norm();
    double capture = std::max(opts.capture * std::max(1.0, amp), 100 * opts.abs_tol);  // explicit RK stalls near stiff sinks
    auto back = shoot(seed, -1.0, cand.alpha, capture, P, cand.s, opts);
    if (!back.reached)
        throw ConnectionNotFound("orbit through seed does not come from alpha (" + back.why + ")", back.miss);
    auto fwd = shoot(seed, 1.0, cand.a_plus, capture, P, cand.s, opts);
    if (!fwd.reached)
        throw ConnectionNotFound("orbit through seed does not reach a+ (" + fwd.why + ")", fwd.miss);
    std::vector<Sample> path(back.path.rbegin(), back.path.rend());
    path.insert(path.end(), fwd.path.begin() + 1, fwd.path.end());
    auto g = assemble(path, cand, P, variant, opts);
    g.ell_estimate = count_sign(flow_eigen(cand.alpha, P, cand.s), 1.0);
    return g;
}

std::vector<Vec> overcompressive_seeds(const ShockCandidate& cand, const ElasticPotential& pot,
                                       const ModelVariant& variant, int n, const ProfileOptions& opts) {
    check_candidate(cand, pot, variant);
    PhiPotential P = phi_of(cand, pot, variant);
    std::vector<Vec> saddles;
    int i3 = variant.a3_index();
    for (const auto& e : equilibrium_points(cand.alpha, cand.sigma, variant)) {
        if (i3 >= 0 && e[i3] <= 0.0) continue;
        auto ev = flow_eigen(e, P, cand.s);
        if (count_sign(ev, 1.0) > 0 && count_sign(ev, -1.0) > 0) saddles.push_back(e);
    }
    std::vector<Vec> seeds;
    if (saddles.size() == 2) {
        for (int i = 1; i <= n; ++i)
            seeds.push_back(saddles[0] + (double(i) / (n + 1)) * (saddles[1] - saddles[0]));
        return seeds;
    }
    if (variant.strain_dim != 2)
        throw ConnectionNotFound("overcompressive seeds need a planar strain space", 0.0);
    Vec d = cand.a_plus - cand.alpha;
    double amp = d.norm();
    Vec mid = 0.5 * (cand.alpha + cand.a_plus);
    Vec u(2);
    u << -d[1] / amp, d[0] / amp;
    ProfileOptions quick = opts;
    double capture = 1e-4 * std::max(1.0, amp);
    auto connects = [&](double y) {
        Vec p = mid + y * u;
        if (i3 >= 0 && p[i3] <= 1e-6) return false;
        return shoot(p, -1.0, cand.alpha, capture, P, cand.s, quick).reached &&
               shoot(p, 1.0, cand.a_plus, capture, P, cand.s, quick).reached;
    };
    if (!connects(0.0)) throw ConnectionNotFound("midpoint orbit is not an overcompressive connection", 0.0);
    // The family may extend to one or both sides of the segment; use the wider side.
    double best_edge = 0.0, best_sign = 1.0;
    for (double sign : {1.0, -1.0}) {
        double lo = 0.0, hi = 0.1 * amp;
        while (connects(sign * hi) && hi < 100.0 * amp) {
            lo = hi;
            hi *= 2.0;
        }
        for (int it = 0; it < 40 && hi - lo > 1e-7 * amp; ++it) {
            double m = 0.5 * (lo + hi);
            if (connects(sign * m)) lo = m;
            else hi = m;
        }
        if (lo > best_edge) {
            best_edge = lo;
            best_sign = sign;
        }
    }
    for (int i = 1; i <= n; ++i) seeds.push_back(mid + best_sign * best_edge * (double(i) / (n + 1)) * u);
    return seeds;
}

std::vector<ProfileGrid> overcompressive_family(const ShockCandidate& cand, const ElasticPotential& pot,
                                                const ModelVariant& variant, int n, const ProfileOptions& opts) {
    std::vector<ProfileGrid> out;
    for (const auto& seed : overcompressive_seeds(cand, pot, variant, n, opts))
        out.push_back(compute_profile_through(cand, seed, pot, variant, opts));
    return out;
}

double explicit_shear_profile(double alpha1, double k, double z) {
    // alpha1 e^{-u} / sqrt(k + e^{-2u}) rewritten as alpha1 / sqrt(1 + k e^{2u}), u = alpha1^2 z.
    return alpha1 / std::sqrt(1.0 + k * std::exp(2.0 * alpha1 * alpha1 * z));
}

MonotonicityReport phi_monotonicity_report(const ProfileGrid& grid, const PhiPotential& P) {
    double m = 0.0;
    bool first = true;
    for (size_t i = 0; i + 1 < grid.size(); ++i) {
        double inc = phi(grid.a_vals[i + 1], P) - phi(grid.a_vals[i], P);
        if (first || inc < m) m = inc;
        first = false;
    }
    return {m, m >= -1e-10};
}

double psi_jump(const ShockCandidate& cand, const ElasticPotential& pot, const ModelVariant& variant) {
    double s = cand.s;
    if (s == 0.0) throw DomainError("psi_jump needs s != 0");
    PhiPotential P = phi_of(cand, pot, variant);
    Vec dwa = grad_potential(cand.alpha, pot, variant);
    double zeta = s * dwa.dot(cand.alpha) - 0.5 * s * s * s * cand.alpha.squaredNorm();
    auto psi = [&](const Vec& a) {
        StateV V{a, -s * (a - cand.alpha)};
        auto [eta, q] = entropy_pair(V, pot, variant);
        return -s * eta + q;
    };
    double direct = (psi(cand.a_plus) + zeta) - (psi(cand.alpha) + zeta);
    double via_phi = -s * (phi(cand.a_plus, P) - phi(cand.alpha, P));
    // psi(V) + zeta = -s phi(a) holds at each endstate separately.
    double check_minus = psi(cand.alpha) + zeta + s * phi(cand.alpha, P);
    double check_plus = psi(cand.a_plus) + zeta + s * phi(cand.a_plus, P);
    double scale = 1.0 + std::abs(direct) + std::abs(s) * (std::abs(phi(cand.alpha, P)) + std::abs(phi(cand.a_plus, P)));
    if (std::abs(direct - via_phi) > 1e-9 * scale || std::abs(check_minus) > 1e-9 * scale ||
        std::abs(check_plus) > 1e-9 * scale)
        throw InternalConsistencyError("psi jump routes disagree");
    return via_phi;
}

PhasePortrait phase_portrait(const PhiPotential& P, double s, const Window& w, int seeds) {
    const auto& v = P.variant;
    if (v.strain_dim != 2) throw ContractViolation("phase portraits need a planar strain space");
    PhasePortrait out;
    out.window = w;
    int i3 = v.a3_index();
    out.show_feasibility = i3 >= 0;

    auto inside = [&](const Vec& a) {
        return a[0] >= w.xmin && a[0] <= w.xmax && a[1] >= w.ymin && a[1] <= w.ymax;
    };
    for (const auto& e : equilibrium_points(P.alpha, P.sigma, v)) {
        if (!inside(e)) continue;
        auto info = classify_equilibrium(e, P.alpha, P.sigma, P.pot, v);
        out.equilibria.push_back({e, info.morse, info.feasible});
    }
    if (v.tag == Variant::Shear2D) out.circle_radius = rh_shear(P.alpha, P.sigma).circle_radius;

    if (i3 >= 0) {
        out.mask_n = 80;
        out.elliptic_mask.assign(out.mask_n * out.mask_n, false);
        for (int iy = 0; iy < out.mask_n; ++iy)
            for (int ix = 0; ix < out.mask_n; ++ix) {
                Vec a(2);
                a << w.xmin + (ix + 0.5) * (w.xmax - w.xmin) / out.mask_n,
                    w.ymin + (iy + 0.5) * (w.ymax - w.ymin) / out.mask_n;
                auto ch = characteristics(a, P.pot, v);
                out.elliptic_mask[iy * out.mask_n + ix] = *std::min_element(ch.m.begin(), ch.m.end()) < 0.0;
            }
    }

    if (seeds <= 0) return out;
    int side = std::max(1, int(std::lround(std::sqrt(double(seeds)))));
    double diag = std::hypot(w.xmax - w.xmin, w.ymax - w.ymin);
    OdeTolerances tol{1e-8, 1e-6, 0.02 * diag};
    for (int iy = 0; iy < side; ++iy)
        for (int ix = 0; ix < side; ++ix) {
            Vec p(2);
            p << w.xmin + (ix + 0.5) * (w.xmax - w.xmin) / side, w.ymin + (iy + 0.5) * (w.ymax - w.ymin) / side;
            if (i3 >= 0 && p[i3] <= 1e-6) continue;
            std::vector<Vec> halves[2];
            for (int k = 0; k < 2; ++k) {
                double dir = k == 0 ? -1.0 : 1.0;
                State x = to_state(p);
                double arc = 0.0;
                Vec prev = p;
                auto sys = [&](const State& xs, State& dx, double) {
                    Vec a = from_state(xs);
                    if (i3 >= 0 && a[i3] <= 1e-6) a[i3] = 1e-6;
                    Vec f = profile_flow_rhs(a, P, s);
                    dx.assign(f.data(), f.data() + f.size());
                };
                try {
                    integrate_rk45(sys, x, 0.0, dir * 200.0, tol, [&](double, const State& xs) {
                        Vec a = from_state(xs);
                        arc += (a - prev).norm();
                        prev = a;
                        halves[k].push_back(a);
                        if (!inside(a) || (i3 >= 0 && a[i3] <= 1e-6)) return false;
                        if (arc > 20 * diag) return false;
                        return profile_flow_rhs(a, P, s).norm() > 1e-8;
                    });
                } catch (const StiffFailure&) {
                }
            }
            std::vector<Vec> traj(halves[0].rbegin(), halves[0].rend());
            traj.push_back(p);
            traj.insert(traj.end(), halves[1].begin(), halves[1].end());
            out.trajectories.push_back(std::move(traj));
        }
    return out;
}

DispersionResult dispersion_relation(double a3_plus, const std::vector<double>& ks) {
    if (ks.empty()) throw ContractViolation("dispersion_relation needs k samples");
    using C = std::complex<double>;
    DispersionResult out;
    double c = 3.0 * a3_plus * a3_plus - 1.0;
    out.predicted_rate = -c / 2.0;
    out.growth_rate = -std::numeric_limits<double>::infinity();
    out.asymptotic_growth_rate = -std::numeric_limits<double>::infinity();
    for (double k : ks) {
        double k2 = k * k;
        C sq = std::sqrt(C(k2 * k2 - 4.0 * c * k2, 0.0));
        C l1 = 0.5 * (-k2 + sq), l2 = 0.5 * (-k2 - sq);
        // Cancellation-free second root from the product l1 l2 = c k^2.
        if (std::abs(l1) < std::abs(l2) && std::abs(l2) > 0) l1 = c * k2 / l2;
        else if (std::abs(l1) > 0) l2 = c * k2 / l1;
        out.k.push_back(k);
        out.roots.push_back({l1, l2});
        for (C l : {l1, l2}) {
            double scale = std::max({1.0, std::norm(l), k2 * std::abs(l), std::abs(c) * k2});
            out.max_residual = std::max(out.max_residual, std::abs(l * l + k2 * l + c * k2) / scale);
            out.growth_rate = std::max(out.growth_rate, l.real());
        }
        C model = -0.5 * k2 + k * std::sqrt(C(-c, 0.0));
        out.asymptotic_growth_rate = std::max(out.asymptotic_growth_rate, model.real());
    }
    return out;
}

bool hamiltonian_check(const Vec& a_minus, const Vec& a_plus, const ElasticPotential& pot, double gamma,
                       const ModelVariant& variant) {
    if (gamma == 0.0) throw ContractViolation("hamiltonian_check needs gamma != 0");
    if (grad_potential(a_minus, pot, variant).lpNorm<Eigen::Infinity>() > 1e-9 ||
        grad_potential(a_plus, pot, variant).lpNorm<Eigen::Infinity>() > 1e-9)
        throw ContractViolation("hamiltonian_check needs DW(a-) = DW(a+) = 0");
    return std::abs(eval_potential(a_minus, pot, variant) - eval_potential(a_plus, pot, variant)) <= 1e-9;
}

UcReport undercompressive_search(const std::vector<double>& alphas, const std::vector<double>& speeds,
                                 const ProfileOptions& opts) {
    UcReport rep;
    auto v = ModelVariant::of(Variant::Shear2D);
    auto pot = ElasticPotential::w0();
    for (double al : alphas)
        for (double s : speeds) {
            Vec alpha(2);
            alpha << al, 0.0;
            double sigma = s * s;
            auto pts = rh_shear(alpha, sigma).points;
            for (const auto& am : pts)
                for (const auto& ap : pts) {
                    if ((am - ap).norm() <= 1e-6) continue;
                    ++rep.pairs_examined;
                    auto c = shock_type(am, ap, s, pot, v);
                    if (c.shock_class != ShockClass::Undercompressive) continue;
                    UcCandidate uc{am, ap, s, c.ell_tilde, std::numeric_limits<double>::infinity(), false};
                    PhiPotential P{am, sigma, pot, v};
                    double amp = (ap - am).norm();
                    double eps = 1e-6 * amp;
                    double tol = 1e-4 * std::max(1.0, amp);
                    Eig em = flow_eigen(am, P, s), ep = flow_eigen(ap, P, s);
                    // A one-dimensional unstable manifold at a- or stable manifold at a+ is shot;
                    // otherwise there is no outgoing/incoming orbit to follow.
                    auto run = [&](const Eig& e, double sign, const Vec& from, const Vec& to, double dir) {
                        for (size_t k = 0; k < e.values.size(); ++k) {
                            if (sign * e.values[k] <= 1e-10) continue;
                            for (double sg : {1.0, -1.0}) {
                                auto shot = shoot(from + sg * eps * e.vectors[k], dir, to, tol, P, s, opts);
                                uc.miss_distance = std::min(uc.miss_distance, shot.miss);
                            }
                        }
                    };
                    if (count_sign(em, 1.0) == 1) run(em, 1.0, am, ap, 1.0);
                    else if (count_sign(ep, -1.0) == 1) run(ep, -1.0, ap, am, -1.0);
                    uc.connected = uc.miss_distance <= tol;
                    if (uc.connected) ++rep.connections_found;
                    rep.candidates.push_back(uc);
                }
        }
    return rep;
}

}  // namespace vevans
