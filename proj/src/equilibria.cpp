#include "vevans/equilibria.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "vevans/errors.hpp"

namespace vevans {

std::string to_string(ShockClass c) {
    switch (c) {
        case ShockClass::Lax: return "Lax";
        case ShockClass::Overcompressive: return "Overcompressive";
        case ShockClass::Undercompressive: return "Undercompressive";
        case ShockClass::Degenerate: return "Degenerate";
    }
    return "?";
}

ShockClass parse_shock_class(const std::string& s) {
    for (auto c : {ShockClass::Lax, ShockClass::Overcompressive, ShockClass::Undercompressive,
                   ShockClass::Degenerate})
        if (to_string(c) == s) return c;
    throw ContractViolation("unknown shock class '" + s + "'");
}

std::string to_string(Morse m) {
    switch (m) {
        case Morse::Repellor: return "repellor";
        case Morse::Attractor: return "attractor";
        case Morse::Saddle: return "saddle";
        case Morse::Degenerate: return "degenerate";
    }
    return "?";
}

namespace {

constexpr double kDedup = 1e-7;

const ElasticPotential kW0 = ElasticPotential::w0();

Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

// Newton on DW(a) - sigma a = DW(alpha) - sigma alpha; only accepts improving steps.
Vec polish(const Vec& a0, const Vec& alpha, double sigma, const ModelVariant& v) {
    Vec target = grad_potential(alpha, kW0, v) - sigma * alpha;
    Vec a = a0;
    auto res = [&](const Vec& x) { return Vec(grad_potential(x, kW0, v) - sigma * x - target); };
    Vec r = res(a);
    for (int it = 0; it < 6; ++it) {
        Mat J = hess_potential(a, kW0, v) - sigma * Mat::Identity(v.strain_dim, v.strain_dim);
        Eigen::FullPivLU<Mat> lu(J);
        if (!lu.isInvertible()) break;
        Vec next = a - lu.solve(r);
        Vec rn = res(next);
        if (!(rn.lpNorm<Eigen::Infinity>() < r.lpNorm<Eigen::Infinity>())) break;
        a = next;
        r = rn;
    }
    return a;
}

void push_unique(std::vector<Vec>& pts, const Vec& a) {
    for (const auto& p : pts)
        if ((p - a).norm() <= kDedup) return;
    pts.push_back(a);
}

void push_unique(std::vector<PlanarRoot>& pts, const Vec& a, int a3_idx) {
    for (const auto& p : pts)
        if ((p.a - a).norm() <= kDedup) return;
    pts.push_back({a, a[a3_idx] > 0.0});
}

std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> r(p.size() + q.size() - 1, 0.0);
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    return r;
}

double poly_eval(const std::vector<double>& c, double y, double* deriv = nullptr) {
    double p = 0.0, dp = 0.0;
    for (size_t k = c.size(); k-- > 0;) {
        dp = dp * y + p;
        p = p * y + c[k];
    }
    if (deriv) *deriv = dp;
    return p;
}

// Real roots of the scalar shear cubic t^3 + (1-sigma) t = (alpha^2 + 1 - sigma) alpha.
std::vector<double> shear_axis_roots(double alpha, double sigma) {
    std::vector<double> out{alpha};
    double disc = 4.0 * (sigma - 1.0) - 3.0 * alpha * alpha;
    if (disc >= 0.0) {
        double sq = std::sqrt(disc);
        out.push_back(0.5 * (-alpha + sq));
        out.push_back(0.5 * (-alpha - sq));
    }
    std::vector<double> uniq;
    for (double t : out) {
        bool dup = false;
        for (double u : uniq) dup = dup || std::abs(u - t) <= kDedup;
        if (!dup) uniq.push_back(t);
    }
    return uniq;
}

}  // namespace

ShearRH rh_shear(const Vec& alpha, double sigma) {
    if (alpha.size() != 2) throw ContractViolation("rh_shear expects a 2-vector");
    if (!(sigma > 0.0)) throw ContractViolation("rh_shear needs sigma > 0");
    auto v = ModelVariant::of(Variant::Shear2D);
    ShearRH out;
    double n = alpha.norm();
    if (n == 0.0) {
        out.points.push_back(alpha);
        if (sigma > 1.0) out.circle_radius = std::sqrt(sigma - 1.0);
        return out;
    }
    // Off the line through alpha a solution needs |a|^2 = sigma - 1 and then
    // (|alpha|^2 + 1 - sigma) alpha = 0 as well.
    if (std::abs(n * n + 1.0 - sigma) <= 1e-12 * (1.0 + sigma)) out.circle_radius = n;
    Vec dir = alpha / n;
    for (double t : shear_axis_roots(n, sigma))
        push_unique(out.points, t == n ? alpha : polish(t * dir, alpha, sigma, v));
    return out;
}

std::vector<ScalarRoot> rh_compressible_1d(double alpha3, double sigma) {
    std::vector<ScalarRoot> out{{alpha3, alpha3 > 0.0}};
    double disc = 4.0 * (1.0 + sigma) - 3.0 * alpha3 * alpha3;
    if (disc < 0.0) return out;
    double sq = std::sqrt(disc);
    for (double r : {-0.5 * alpha3 + 0.5 * sq, -0.5 * alpha3 - 0.5 * sq}) {
        bool dup = false;
        for (const auto& o : out) dup = dup || std::abs(o.value - r) <= kDedup;
        if (!dup) out.push_back({r, r > 0.0});
    }
    return out;
}

std::vector<double> quintic_coefficients(const Vec& alpha, double sigma) {
    double n2 = alpha.squaredNorm();
    double A = n2 - sigma, B = n2 - 1.0 - sigma;
    double a2 = alpha[0], a3 = alpha[1];
    std::vector<double> ys{-sigma, 1.0}, y1s{-1.0 - sigma, 1.0};
    auto ys2 = poly_mul(ys, ys), y1s2 = poly_mul(y1s, y1s);
    auto lead = poly_mul(std::vector<double>{0.0, 1.0}, poly_mul(ys2, y1s2));
    std::vector<double> c(lead);
    for (size_t k = 0; k < y1s2.size(); ++k) c[k] -= A * A * a2 * a2 * y1s2[k];
    for (size_t k = 0; k < ys2.size(); ++k) c[k] -= B * B * a3 * a3 * ys2[k];
    return c;
}

std::vector<double> quintic_roots(const Vec& alpha, double sigma) {
    auto c = quintic_coefficients(alpha, sigma);
    int deg = 5;
    Mat C = Mat::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) C(i, deg - 1) = -c[i] / c[deg];
    Eigen::EigenSolver<Mat> es(C, false);
    std::vector<double> roots;
    for (int i = 0; i < deg; ++i) {
        auto z = es.eigenvalues()[i];
        if (std::abs(z.imag()) > 1e-8 * (1.0 + std::abs(z))) continue;
        double y = z.real();
        for (int it = 0; it < 5; ++it) {
            double d;
            double p = poly_eval(c, y, &d);
            if (d == 0.0) break;
            y -= p / d;
        }
        if (y < 0.0) {
            if (y > -1e-12) y = 0.0;
            else continue;
        }
        bool dup = false;
        for (double r : roots) dup = dup || std::abs(r - y) <= kDedup;
        if (!dup) roots.push_back(y);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<PlanarRoot> rh_compressible_2d(const Vec& alpha, double sigma) {
    if (alpha.size() != 2) throw ContractViolation("rh_compressible_2d expects (a2, a3)");
    auto v = ModelVariant::of(Variant::Compressible2D);
    std::vector<PlanarRoot> out;
    out.push_back({alpha, alpha[1] > 0.0});
    double al2 = alpha[0], al3 = alpha[1];
    double n2 = alpha.squaredNorm();
    double A = n2 - sigma, B = n2 - 1.0 - sigma;
    // Recovered points near a (numerically split) double root at a pole are spurious;
    // keep only those that actually solve RH after polishing.
    auto add = [&](double x2, double x3) {
        Vec a = polish(v2(x2, x3), alpha, sigma, v);
        if (rh_residual(alpha, a, sigma, kW0, v) <= 1e-9) push_unique(out, a, 1);
    };

    if (al2 == 0.0) {
        for (const auto& r : rh_compressible_1d(al3, sigma)) add(0.0, r.value);
    } else {
        for (double y : quintic_roots(alpha, sigma)) {
            if (std::abs(y - sigma) <= 1e-8 || std::abs(y - 1.0 - sigma) <= 1e-8) continue;
            add(A * al2 / (y - sigma), B * al3 / (y - 1.0 - sigma));
        }
    }
    // Pole branches: |a+|^2 = sigma is possible only when A alpha2 = 0, and
    // |a+|^2 = 1 + sigma only when B alpha3 = 0.
    const double tol = 1e-12 * (1.0 + sigma);
    if (std::abs(A * al2) <= tol) {
        double x3 = -B * al3;
        double r2 = sigma - x3 * x3;
        if (r2 >= 0.0) {
            add(std::sqrt(r2), x3);
            add(-std::sqrt(r2), x3);
        }
    }
    if (std::abs(B * al3) <= tol) {
        double x2 = A * al2;
        double r2 = 1.0 + sigma - x2 * x2;
        if (r2 >= 0.0) {
            add(x2, std::sqrt(r2));
            add(x2, -std::sqrt(r2));
        }
    }
    return out;
}

RH3D rh_compressible_3d(const Vec& alpha, double sigma) {
    if (alpha.size() != 3) throw ContractViolation("rh_compressible_3d expects a 3-vector");
    RH3D out;
    double rho = std::hypot(alpha[0], alpha[1]);
    double al3 = alpha[2];
    // Rotation about e3 taking (alpha1, alpha2) to (0, rho).
    double c = rho > 0 ? alpha[1] / rho : 1.0, sn = rho > 0 ? alpha[0] / rho : 0.0;
    for (const auto& p : rh_compressible_2d(v2(rho, al3), sigma)) {
        Vec a(3);
        a << sn * p.a[0], c * p.a[0], p.a[1];
        if (rho > 0 && std::abs(p.a[0] - rho) <= kDedup && std::abs(p.a[1] - al3) <= kDedup) a = alpha;
        out.points.push_back({a, a[2] > 0.0});
    }
    if (rho == 0.0) {
        double a3p = (1.0 + sigma - al3 * al3) * al3;
        double r2 = sigma - a3p * a3p;
        if (r2 >= 0.0) out.ring = RHRing{a3p, std::sqrt(r2)};
    } else if (std::abs(alpha.squaredNorm() - sigma) <= 1e-12 * (1.0 + sigma)) {
        out.degenerate = true;
    }
    return out;
}

std::vector<Vec> equilibrium_points(const Vec& alpha, double sigma, const ModelVariant& v) {
    std::vector<Vec> pts;
    switch (v.tag) {
        case Variant::Shear2D:
            pts = rh_shear(alpha, sigma).points;
            break;
        case Variant::Shear1D:
        case Variant::Transverse: {
            std::vector<double> roots;
            if (alpha[0] == 0.0) {
                roots.push_back(0.0);
                if (sigma > 1.0) {
                    roots.push_back(std::sqrt(sigma - 1.0));
                    roots.push_back(-std::sqrt(sigma - 1.0));
                }
            } else {
                roots = shear_axis_roots(alpha[0], sigma);
            }
            for (double r : roots) pts.push_back(Vec::Constant(1, r));
            break;
        }
        case Variant::Compressible1D:
            for (const auto& r : rh_compressible_1d(alpha[0], sigma)) pts.push_back(Vec::Constant(1, r.value));
            break;
        case Variant::Compressible2D:
            for (const auto& r : rh_compressible_2d(alpha, sigma)) pts.push_back(r.a);
            break;
        case Variant::Compressible3D:
            for (const auto& r : rh_compressible_3d(alpha, sigma).points) pts.push_back(r.a);
            break;
    }
    return pts;
}

double rh_residual(const Vec& alpha, const Vec& a_plus, double sigma, const ElasticPotential& pot,
                   const ModelVariant& v) {
    Vec r = (grad_potential(a_plus, pot, v) - sigma * a_plus) - (grad_potential(alpha, pot, v) - sigma * alpha);
    return r.lpNorm<Eigen::Infinity>();
}

EquilibriumInfo classify_equilibrium(const Vec& a, const Vec& alpha, double sigma,
                                     const ElasticPotential& pot, const ModelVariant& v) {
    double res = rh_residual(alpha, a, sigma, pot, v);
    if (!(res <= 1e-6 * (1.0 + a.squaredNorm() * a.norm())))
        throw ContractViolation("classify_equilibrium: point is not an equilibrium (residual " +
                                std::to_string(res) + ")");
    EquilibriumInfo info;
    info.a = a;
    Mat H = hess_potential(a, pot, v) - sigma * Mat::Identity(v.strain_dim, v.strain_dim);
    // Compressible flow is a3 D^{-1} grad(phi) with D = diag(1,1,2) restricted; the Jacobian is
    // similar to the symmetric a3 D^{-1/2} H D^{-1/2}, so its eigenvalues are real.
    double scale = 1.0;
    Vec dinv_sqrt = Vec::Ones(v.strain_dim);
    int i3 = v.a3_index();
    if (i3 >= 0) {
        scale = a[i3];
        dinv_sqrt[i3] = 1.0 / std::sqrt(2.0);
        info.feasible = a[i3] > 0.0;
    }
    Mat S = scale * dinv_sqrt.asDiagonal() * H * dinv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    int pos = 0, neg = 0;
    bool zero = false;
    for (int k = 0; k < S.rows(); ++k) {
        double e = es.eigenvalues()[k];
        info.jacobian_eigs.push_back(e);
        if (std::abs(e) < 1e-8) zero = true;
        else if (e > 0) ++pos;
        else ++neg;
    }
    if (zero) info.morse = Morse::Degenerate;
    else if (neg == 0) info.morse = Morse::Repellor;
    else if (pos == 0) info.morse = Morse::Attractor;
    else info.morse = Morse::Saddle;

    auto ch = characteristics(a, pot, v);
    bool hyp = ch.strictly_hyperbolic;
    for (double m : ch.m)
        if (std::abs(m - sigma) <= 1e-9 * (1.0 + sigma)) hyp = false;
    info.hyperbolic_endstate = hyp;
    return info;
}

ShockCandidate shock_type(const Vec& alpha, const Vec& a_plus, double s, const ElasticPotential& pot,
                          const ModelVariant& v) {
    ShockCandidate c;
    c.alpha = alpha;
    c.a_plus = a_plus;
    c.s = s;
    c.sigma = s * s;
    bool degenerate = false;
    // Real parts of the characteristic speeds +-sqrt(m); complex pairs have real part 0.
    auto count = [&](const Vec& a, bool above) {
        int n = 0;
        for (double m : characteristics(a, pot, v).m) {
            double re = m > 0 ? std::sqrt(m) : 0.0;
            for (double sp : {re, -re}) {
                if (std::abs(sp - s) <= 1e-9) degenerate = true;
                if (above ? sp > s : sp < s) ++n;
            }
        }
        return n;
    };
    c.ell_tilde = count(alpha, true) + count(a_plus, false) - 2 * v.strain_dim;
    if (degenerate) c.shock_class = ShockClass::Degenerate;
    else if (c.ell_tilde == 1) c.shock_class = ShockClass::Lax;
    else if (c.ell_tilde > 1) c.shock_class = ShockClass::Overcompressive;
    else c.shock_class = ShockClass::Undercompressive;
    return c;
}

}  // namespace vevans

namespace vevans {

std::vector<ShockCandidate> shock_candidates(const Vec& alpha, double s, const ElasticPotential& pot,
                                             const ModelVariant& v) {
    const double sigma = s * s;
    auto self = classify_equilibrium(alpha, alpha, sigma, pot, v);
    std::vector<ShockCandidate> out;
    for (const auto& p : equilibrium_points(alpha, sigma, v)) {
        if ((p - alpha).norm() <= 1e-9 * (1.0 + alpha.norm())) continue;
        auto info = classify_equilibrium(p, alpha, sigma, pot, v);
        if (!info.feasible) continue;
        // A sink cannot be a left state: it is then the right endstate.
        out.push_back(self.morse == Morse::Attractor ? shock_type(p, alpha, s, pot, v)
                                                     : shock_type(alpha, p, s, pot, v));
    }
    return out;
}

}  // namespace vevans
