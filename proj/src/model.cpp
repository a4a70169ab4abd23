#include "vevans/model.hpp"

#include <algorithm>
#include <cmath>

#include "vevans/errors.hpp"

namespace vevans {

ElasticPotential ElasticPotential::from_c(double c2, double c3, double c) {
    return {1.0 + 4.0 * c2, -4.0 * c2, 2.0 * c3, c};
}

std::pair<double, double> ElasticPotential::to_c() const {
    return {-mu2 / 4.0, mu3 / 2.0};
}

bool ElasticPotential::convex_at_identity() const {
    // Hessian at (0,0,1) is diag(mu1+mu2, mu1+mu2, 3 mu1+mu2+mu3-1).
    return mu1 + mu2 > 0.0 && 3.0 * mu1 + mu2 + mu3 - 1.0 > 0.0;
}

ModelVariant ModelVariant::of(Variant v) {
    switch (v) {
        case Variant::Compressible3D: return {v, 3, 9};
        case Variant::Compressible2D: return {v, 2, 6};
        case Variant::Shear2D: return {v, 2, 6};
        case Variant::Shear1D: return {v, 1, 3};
        case Variant::Compressible1D: return {v, 1, 3};
        case Variant::Transverse: return {v, 1, 3};
    }
    throw ContractViolation("unknown variant");
}

bool ModelVariant::compressible() const {
    return tag == Variant::Compressible3D || tag == Variant::Compressible2D ||
           tag == Variant::Compressible1D;
}

std::vector<int> ModelVariant::free_indices() const {
    switch (tag) {
        case Variant::Compressible3D: return {0, 1, 2};
        case Variant::Compressible2D: return {1, 2};
        case Variant::Shear2D: return {0, 1};
        case Variant::Shear1D:
        case Variant::Transverse: return {0};
        case Variant::Compressible1D: return {2};
    }
    return {};
}

int ModelVariant::a3_index() const {
    switch (tag) {
        case Variant::Compressible3D: return 2;
        case Variant::Compressible2D: return 1;
        case Variant::Compressible1D: return 0;
        default: return -1;
    }
}

Vec3 ModelVariant::embed(const Vec& a) const {
    if (a.size() != strain_dim)
        throw ContractViolation("strain vector has length " + std::to_string(a.size()) +
                                ", variant " + name() + " expects " +
                                std::to_string(strain_dim));
    // Shear variants freeze a3 = 1; compressible ones freeze a1 (and a2) at 0.
    Vec3 full(0.0, 0.0, compressible() ? 0.0 : 1.0);
    auto idx = free_indices();
    for (int i = 0; i < strain_dim; ++i) full[idx[i]] = a[i];
    return full;
}

Vec ModelVariant::restrict_vec(const Vec3& v) const {
    auto idx = free_indices();
    Vec out(strain_dim);
    for (int i = 0; i < strain_dim; ++i) out[i] = v[idx[i]];
    return out;
}

Mat ModelVariant::restrict_mat(const Mat3& m) const {
    auto idx = free_indices();
    Mat out(strain_dim, strain_dim);
    for (int i = 0; i < strain_dim; ++i)
        for (int j = 0; j < strain_dim; ++j) out(i, j) = m(idx[i], idx[j]);
    return out;
}

std::string ModelVariant::name() const {
    switch (tag) {
        case Variant::Compressible3D: return "comp3d";
        case Variant::Compressible2D: return "comp2d";
        case Variant::Shear2D: return "shear2d";
        case Variant::Shear1D: return "shear1d";
        case Variant::Compressible1D: return "comp1d";
        case Variant::Transverse: return "transverse";
    }
    return "?";
}

ModelVariant parse_variant(const std::string& name) {
    for (auto v : {Variant::Compressible3D, Variant::Compressible2D, Variant::Shear2D,
                   Variant::Shear1D, Variant::Compressible1D, Variant::Transverse}) {
        auto mv = ModelVariant::of(v);
        if (mv.name() == name) return mv;
    }
    throw ContractViolation("unknown model '" + name + "'");
}

double potential3(const Vec3& a, const ElasticPotential& p) {
    double n2 = a.squaredNorm();
    double d3 = a[2] - 1.0;
    return 0.25 * p.mu1 * n2 * n2 + 0.5 * p.mu2 * n2 - 0.5 * a[2] * a[2] + 0.5 * p.mu3 * d3 * d3 +
           p.c_offset;
}

Vec3 grad_potential3(const Vec3& a, const ElasticPotential& p) {
    double n2 = a.squaredNorm();
    Vec3 g = (p.mu1 * n2 + p.mu2) * a;
    g[2] += p.mu3 * (a[2] - 1.0) - a[2];
    return g;
}

Mat3 hess_potential3(const Vec3& a, const ElasticPotential& p) {
    Mat3 M = p.mu1 * (a.squaredNorm() * Mat3::Identity() + 2.0 * a * a.transpose()) +
             p.mu2 * Mat3::Identity();
    M(2, 2) += p.mu3 - 1.0;
    return M;
}

double eval_potential(const Vec& a, const ElasticPotential& pot, const ModelVariant& v) {
    return potential3(v.embed(a), pot);
}

Vec grad_potential(const Vec& a, const ElasticPotential& pot, const ModelVariant& v) {
    return v.restrict_vec(grad_potential3(v.embed(a), pot));
}

Mat hess_potential(const Vec& a, const ElasticPotential& pot, const ModelVariant& v) {
    return v.restrict_mat(hess_potential3(v.embed(a), pot));
}

namespace {

void normalize_sign(Vec& r) {
    r.normalize();
    for (int i = 0; i < r.size(); ++i) {
        if (std::abs(r[i]) > 1e-14) {
            if (r[i] < 0) r = -r;
            return;
        }
    }
}

// Closed-form m_j / r_j for the W0 family; empty vectors mean "use numerics".
void closed_forms(const Vec3& full, const ModelVariant& v, std::vector<double>& m,
                  std::vector<Vec>& r, std::vector<FieldType>& gn) {
    double a1 = full[0], a2 = full[1], a3 = full[2];
    double n2 = full.squaredNorm();
    switch (v.tag) {
        case Variant::Compressible3D: {
            double disc = std::sqrt((2 * n2 - 1) * (2 * n2 - 1) + 8 * (a1 * a1 + a2 * a2));
            double m2 = 0.5 * (4 * n2 - 1 - disc), m3 = 0.5 * (4 * n2 - 1 + disc);
            m = {n2, m2, m3};
            Vec r1(3), r2(3), r3(3);
            r1 << a2, -a1, 0;
            r2 << -2 * a1 * a3, -2 * a2 * a3, 3 * n2 - 2 * a3 * a3 - m2;
            r3 << -2 * a1 * a3, -2 * a2 * a3, 3 * n2 - 2 * a3 * a3 - m3;
            r = {r1, r2, r3};
            gn = {FieldType::LinearlyDegenerate, FieldType::Unknown, FieldType::GenuinelyNonlinear};
            break;
        }
        case Variant::Compressible2D: {
            double disc = std::sqrt((2 * n2 - 1) * (2 * n2 - 1) + 8 * a2 * a2);
            double m2 = 0.5 * (4 * n2 - 1 - disc), m3 = 0.5 * (4 * n2 - 1 + disc);
            m = {m2, m3};
            Vec r2(2), r3(2);
            if (a2 == 0.0)
                r2 << 1, 0;
            else
                r2 << -2 * a2 * a3, 3 * n2 - 2 * a3 * a3 - m2;
            r3 << -2 * a2 * a3, 3 * n2 - 2 * a3 * a3 - m3;
            r = {r2, r3};
            gn = {FieldType::Unknown, FieldType::GenuinelyNonlinear};
            break;
        }
        case Variant::Shear2D: {
            double s2 = a1 * a1 + a2 * a2;
            m = {1 + 3 * s2, 1 + s2};
            Vec rf(2), rs(2);
            rf << a1, a2;
            rs << a2, -a1;
            r = {rf, rs};
            gn = {FieldType::GenuinelyNonlinear, FieldType::LinearlyDegenerate};
            break;
        }
        case Variant::Shear1D:
        case Variant::Transverse: {
            m = {1 + 3 * a1 * a1};
            r = {Vec::Ones(1)};
            gn = {FieldType::Unknown};
            break;
        }
        case Variant::Compressible1D: {
            m = {3 * a3 * a3 - 1};
            r = {Vec::Ones(1)};
            gn = {FieldType::Unknown};
            break;
        }
    }
}

}  // namespace

CharacteristicData characteristics(const Vec& a, const ElasticPotential& pot, const ModelVariant& v) {
    Vec3 full = v.embed(a);
    Mat M = hess_potential(a, pot, v);
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    CharacteristicData out;
    if (pot.is_w0_family()) {
        closed_forms(full, v, out.m, out.r, out.gn_flags);
        // Closed-form vectors vanish at some points (e.g. r1 = 0 on the a3 axis); swap in
        // the numerical eigenvector with nearest eigenvalue, each used at most once.
        std::vector<bool> used(M.rows(), false);
        double scale = 1.0 + M.norm();
        for (size_t j = 0; j < out.m.size(); ++j) {
            if (out.r[j].norm() > 1e-10 * scale) continue;
            int best = -1;
            for (int k = 0; k < M.rows(); ++k) {
                if (used[k]) continue;
                if (best < 0 || std::abs(es.eigenvalues()[k] - out.m[j]) <
                                    std::abs(es.eigenvalues()[best] - out.m[j]))
                    best = k;
            }
            used[best] = true;
            out.r[j] = es.eigenvectors().col(best);
        }
    } else {
        for (int k = 0; k < M.rows(); ++k) {
            out.m.push_back(es.eigenvalues()[k]);
            out.r.push_back(es.eigenvectors().col(k));
            out.gn_flags.push_back(FieldType::Unknown);
        }
    }
    for (auto& r : out.r) normalize_sign(r);

    bool ok = true;
    double top = 0.0;
    for (double m : out.m) top = std::max(top, std::abs(m));
    for (size_t i = 0; i < out.m.size(); ++i) {
        if (!(out.m[i] > 0.0)) ok = false;
        for (size_t j = i + 1; j < out.m.size(); ++j)
            if (std::abs(out.m[i] - out.m[j]) <= 1e-10 * (1.0 + top)) ok = false;
    }
    out.strictly_hyperbolic = ok;
    return out;
}

Vec flux(const StateV& V, const ElasticPotential& pot, const ModelVariant& v) {
    int d = v.strain_dim;
    Vec G(2 * d);
    G.head(d) = -V.b;
    G.tail(d) = -grad_potential(V.a, pot, v);
    return G;
}

std::pair<double, double> entropy_pair(const StateV& V, const ElasticPotential& pot,
                                       const ModelVariant& v) {
    double eta = 0.5 * V.b.squaredNorm() + eval_potential(V.a, pot, v);
    double q = -V.b.dot(grad_potential(V.a, pot, v));
    return {eta, q};
}

Mat viscosity_matrix(const Vec& a, ViscosityKind kind, const ModelVariant& v) {
    Vec3 full = v.embed(a);
    Mat3 B;
    if (kind == ViscosityKind::Z1) {
        B = Vec3(1, 1, 0).asDiagonal();
        B += 2.0 * full * full.transpose();
    } else {
        if (full[2] <= 0.0) throw DomainError("Z2 viscosity needs a3 > 0");
        B = Vec3(1, 1, 2).asDiagonal();
        B /= full[2];
    }
    return v.restrict_mat(B);
}

Vec3 invariants(const Mat3& F) {
    Mat3 C = F.transpose() * F;
    return {F.squaredNorm(), C.squaredNorm(), F.determinant()};
}

Mat3 cofactor(const Mat3& F) {
    Mat3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
            c(i, j) = F(i1, j1) * F(i2, j2) - F(i1, j2) * F(i2, j1);
        }
    return c;
}

Mat3 general_W_derivative(const Mat3& F, const Vec3& g) {
    return g[0] * 2.0 * F + g[1] * 4.0 * F * F.transpose() * F + g[2] * cofactor(F);
}

LameConstants lame_constants(const Vec3& g, const Mat3& h) {
    Vec3 w(2, 4, 1);
    double lambda = w.dot(h * w);
    double mu = g.dot(Vec3(0, 8, -2));
    return {lambda, mu, mu >= 0.0, 3.0 * lambda + mu >= 0.0};
}

double dissipation_check(const Mat3& C, const Mat3& D, ViscosityKind kind) {
    if (kind == ViscosityKind::Z1) return 0.5 * D.squaredNorm();
    Eigen::LLT<Mat3> llt(C);
    if (llt.info() != Eigen::Success) throw DomainError("Z2 dissipation needs C positive definite");
    Mat3 Ci = llt.solve(Mat3::Identity());
    Mat3 S = 0.5 * std::sqrt(C.determinant()) * Ci * D * Ci;
    return (S.array() * D.array()).sum();
}

}  // namespace vevans
