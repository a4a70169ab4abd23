#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "vevans/errors.hpp"
#include "vevans/model.hpp"

using namespace vevans;

namespace {

const ElasticPotential W0 = ElasticPotential::w0();

Vec vec(std::initializer_list<double> v) {
    Vec out(v.size());
    int i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

Vec fd_grad(const Vec& a, const ModelVariant& v, const ElasticPotential& p, double h = 1e-6) {
    Vec g(a.size());
    for (int i = 0; i < a.size(); ++i) {
        Vec ap = a, am = a;
        ap[i] += h;
        am[i] -= h;
        g[i] = (eval_potential(ap, p, v) - eval_potential(am, p, v)) / (2 * h);
    }
    return g;
}

Mat fd_hess(const Vec& a, const ModelVariant& v, const ElasticPotential& p, double h = 1e-5) {
    Mat H(a.size(), a.size());
    for (int i = 0; i < a.size(); ++i) {
        Vec ap = a, am = a;
        ap[i] += h;
        am[i] -= h;
        H.col(i) = (grad_potential(ap, p, v) - grad_potential(am, p, v)) / (2 * h);
    }
    return H;
}

const Variant all_variants[] = {Variant::Compressible3D, Variant::Compressible2D, Variant::Shear2D,
                                Variant::Shear1D, Variant::Compressible1D, Variant::Transverse};

}  // namespace

TEST_CASE("variant table") {
    CHECK(ModelVariant::of(Variant::Compressible3D).evans_dim == 9);
    CHECK(ModelVariant::of(Variant::Compressible2D).evans_dim == 6);
    CHECK(ModelVariant::of(Variant::Shear2D).evans_dim == 6);
    for (auto t : {Variant::Shear1D, Variant::Compressible1D, Variant::Transverse}) {
        CHECK(ModelVariant::of(t).strain_dim == 1);
        CHECK(ModelVariant::of(t).evans_dim == 3);
    }
    for (auto t : all_variants) {
        auto v = ModelVariant::of(t);
        CHECK(v.evans_dim == 3 * v.strain_dim);
        CHECK(parse_variant(v.name()).tag == t);
    }
}

TEST_CASE("potential values") {
    auto c3 = ModelVariant::of(Variant::Compressible3D);
    CHECK(eval_potential(vec({0, 0, 1}), W0, c3) == doctest::Approx(0.0));
    CHECK(eval_potential(vec({1, 0, 0}), W0, c3) == doctest::Approx(0.5));
    auto sh = ModelVariant::of(Variant::Shear2D);
    CHECK(eval_potential(vec({0.6, 0.8}), W0, sh) == doctest::Approx(0.75));
    CHECK_THROWS_AS(eval_potential(vec({1, 0}), W0, c3), ContractViolation);

    // W0 against 1/4(|a|^2-1)^2 + 1/2(a1^2+a2^2) directly.
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int k = 0; k < 20; ++k) {
        Vec a = vec({U(rng), U(rng), U(rng)});
        double n2 = a.squaredNorm();
        double ref = 0.25 * (n2 - 1) * (n2 - 1) + 0.5 * (a[0] * a[0] + a[1] * a[1]);
        CHECK(eval_potential(a, W0, c3) == doctest::Approx(ref).epsilon(1e-13));
    }
}

TEST_CASE("grad and hessian agree with finite differences") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(0.2, 2.0);
    ElasticPotential general{1.3, -0.4, 0.7, 0.1};
    for (auto pot : {W0, general}) {
        for (auto t : all_variants) {
            auto v = ModelVariant::of(t);
            for (int k = 0; k < 100; ++k) {
                Vec a(v.strain_dim);
                for (int i = 0; i < a.size(); ++i) a[i] = U(rng);
                Vec g = grad_potential(a, pot, v);
                Vec gf = fd_grad(a, v, pot);
                CHECK((g - gf).norm() <= 1e-7 * std::max(1.0, g.norm()));
                Mat H = hess_potential(a, pot, v);
                CHECK((H - H.transpose()).norm() == 0.0);
                CHECK((H - fd_hess(a, v, pot)).norm() <= 1e-5 * std::max(1.0, H.norm()));
            }
        }
    }
}

TEST_CASE("hessian at identity and shear example") {
    auto c3 = ModelVariant::of(Variant::Compressible3D);
    Mat M = hess_potential(vec({0, 0, 1}), W0, c3);
    Mat ref = Vec3(1, 1, 2).asDiagonal();
    CHECK((M - ref).norm() < 1e-14);
    auto sh = ModelVariant::of(Variant::Shear2D);
    Mat Ms = hess_potential(vec({1, 0}), W0, sh);
    CHECK(Ms(0, 0) == doctest::Approx(4));
    CHECK(Ms(1, 1) == doctest::Approx(2));
    CHECK(Ms(0, 1) == doctest::Approx(0));
    // Shear form (|a|^2+1) Id + 2 a a^T at a random point.
    Vec a = vec({0.3, -1.1});
    Mat shref = (a.squaredNorm() + 1) * Mat::Identity(2, 2) + 2 * a * a.transpose();
    CHECK((hess_potential(a, W0, sh) - shref).norm() < 1e-13);
    // 2D compressible form diag(|a|^2, |a|^2-1) + 2 a a^T.
    auto c2 = ModelVariant::of(Variant::Compressible2D);
    Vec b = vec({0.4, 0.9});
    Mat c2ref = Mat::Zero(2, 2);
    c2ref(0, 0) = b.squaredNorm();
    c2ref(1, 1) = b.squaredNorm() - 1;
    c2ref += 2 * b * b.transpose();
    CHECK((hess_potential(b, W0, c2) - c2ref).norm() < 1e-13);
}

TEST_CASE("convexity predicate") {
    CHECK(W0.convex_at_identity());
    CHECK_FALSE(ElasticPotential{0.2, -0.3, 0, 0}.convex_at_identity());
    // Predicate matches positive definiteness of the Hessian at (0,0,1).
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int k = 0; k < 200; ++k) {
        ElasticPotential p{U(rng), U(rng), U(rng), 0};
        Eigen::SelfAdjointEigenSolver<Mat3> es(hess_potential3(Vec3(0, 0, 1), p));
        CHECK(p.convex_at_identity() == (es.eigenvalues().minCoeff() > 0));
    }
    auto c = ElasticPotential::from_c(0.3, -0.2).to_c();
    CHECK(c.first == doctest::Approx(0.3));
    CHECK(c.second == doctest::Approx(-0.2));
}

TEST_CASE("characteristics") {
    auto c3 = ModelVariant::of(Variant::Compressible3D);
    auto ch = characteristics(vec({0, 0, 1}), W0, c3);
    auto m = ch.m;
    std::sort(m.begin(), m.end());
    CHECK(m[0] == doctest::Approx(1));
    CHECK(m[1] == doctest::Approx(1));
    CHECK(m[2] == doctest::Approx(2));
    CHECK_FALSE(ch.strictly_hyperbolic);

    auto ch2 = characteristics(vec({1, 0, 0}), W0, c3);
    CHECK(ch2.m[0] == doctest::Approx(1));
    CHECK(std::abs(ch2.m[1]) < 1e-14);
    CHECK(ch2.m[2] == doctest::Approx(3));

    auto c1 = ModelVariant::of(Variant::Compressible1D);
    CHECK(std::abs(characteristics(vec({1 / std::sqrt(3.0)}), W0, c1).m[0]) < 1e-15);
    CHECK_FALSE(characteristics(vec({0.5}), W0, c1).strictly_hyperbolic);
    CHECK(characteristics(vec({1.0}), W0, c1).strictly_hyperbolic);

    auto sh = ModelVariant::of(Variant::Shear2D);
    auto chs = characteristics(vec({1, 0}), W0, sh);
    CHECK(chs.m[0] == doctest::Approx(4));
    CHECK(chs.m[1] == doctest::Approx(2));
    CHECK(chs.gn_flags[0] == FieldType::GenuinelyNonlinear);
    CHECK(chs.gn_flags[1] == FieldType::LinearlyDegenerate);
}

TEST_CASE("characteristic pairs are eigenpairs of M") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-2, 2);
    for (auto t : all_variants) {
        auto v = ModelVariant::of(t);
        for (int k = 0; k < 100; ++k) {
            Vec a(v.strain_dim);
            for (int i = 0; i < a.size(); ++i) a[i] = U(rng);
            if (k == 0) a = v.restrict_vec(Vec3(0, 0, 1));
            Mat M = hess_potential(a, W0, v);
            auto ch = characteristics(a, W0, v);
            REQUIRE(ch.m.size() == size_t(v.strain_dim));
            for (size_t j = 0; j < ch.m.size(); ++j) {
                CHECK(std::abs(ch.r[j].norm() - 1) < 1e-12);
                CHECK((M * ch.r[j] - ch.m[j] * ch.r[j]).norm() <= 1e-10 * (1 + std::abs(ch.m[j])));
            }
            Eigen::SelfAdjointEigenSolver<Mat> es(M);
            auto m = ch.m;
            std::sort(m.begin(), m.end());
            for (size_t j = 0; j < m.size(); ++j)
                CHECK(std::abs(m[j] - es.eigenvalues()[j]) <= 1e-10 * (1 + std::abs(m[j])));
        }
    }
}

TEST_CASE("entropy pair and compatibility") {
    auto c3 = ModelVariant::of(Variant::Compressible3D);
    auto e0 = entropy_pair({vec({0, 0, 1}), vec({0, 0, 0})}, W0, c3);
    CHECK(e0.first == doctest::Approx(0));
    CHECK(e0.second == doctest::Approx(0));
    auto e1 = entropy_pair({vec({1, 0, 0}), vec({1, 0, 0})}, W0, c3);
    CHECK(e1.first == doctest::Approx(1.0));
    CHECK(entropy_pair({vec({0.3, 2, 1}), vec({0, 0, 0})}, W0, c3).second == 0.0);

    // grad(eta) . DG = grad(q), DG by finite differences of the flux.
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    for (auto t : all_variants) {
        auto v = ModelVariant::of(t);
        int d = v.strain_dim;
        for (int k = 0; k < 100; ++k) {
            Vec x(2 * d);
            for (int i = 0; i < 2 * d; ++i) x[i] = U(rng);
            auto split = [&](const Vec& y) { return StateV{y.head(d), y.tail(d)}; };
            const double h = 1e-6;
            Mat DG(2 * d, 2 * d);
            Vec gq(2 * d), geta(2 * d);
            for (int i = 0; i < 2 * d; ++i) {
                Vec xp = x, xm = x;
                xp[i] += h;
                xm[i] -= h;
                DG.col(i) = (flux(split(xp), W0, v) - flux(split(xm), W0, v)) / (2 * h);
                auto ep = entropy_pair(split(xp), W0, v), em = entropy_pair(split(xm), W0, v);
                gq[i] = (ep.second - em.second) / (2 * h);
                geta[i] = (ep.first - em.first) / (2 * h);
            }
            Vec lhs = DG.transpose() * geta;
            CHECK((lhs - gq).norm() <= 1e-6 * std::max(1.0, gq.norm()));
        }
    }
}

TEST_CASE("viscosity matrices") {
    auto c3 = ModelVariant::of(Variant::Compressible3D);
    Mat ref = Vec3(1, 1, 2).asDiagonal();
    CHECK((viscosity_matrix(vec({0, 0, 1}), ViscosityKind::Z2, c3) - ref).norm() < 1e-15);
    CHECK((viscosity_matrix(vec({0, 0, 1}), ViscosityKind::Z1, c3) - ref).norm() < 1e-15);
    CHECK_THROWS_AS(viscosity_matrix(vec({0, 0, -0.1}), ViscosityKind::Z2, c3), DomainError);
    auto sh = ModelVariant::of(Variant::Shear2D);
    CHECK((viscosity_matrix(vec({0.7, -3}), ViscosityKind::Z2, sh) - Mat::Identity(2, 2)).norm() == 0);

    std::mt19937 rng(1);
    std::uniform_real_distribution<double> U(-1, 1), P(0.05, 3);
    for (int k = 0; k < 100; ++k) {
        Vec a = vec({U(rng), U(rng), P(rng)});
        Mat B2 = viscosity_matrix(a, ViscosityKind::Z2, c3);
        CHECK((B2 - B2.transpose()).norm() == 0);
        CHECK(Eigen::SelfAdjointEigenSolver<Mat>(B2).eigenvalues().minCoeff() > 0);
        // Z1 is positive definite once a3^2 > c (1 + a1^2 + a2^2).
        Vec b = vec({U(rng), U(rng), 0});
        b[2] = 1.01 * std::sqrt(1 + b[0] * b[0] + b[1] * b[1]);
        Mat B1 = viscosity_matrix(b, ViscosityKind::Z1, c3);
        CHECK(Eigen::SelfAdjointEigenSolver<Mat>(B1).eigenvalues().minCoeff() > 0);
    }
}

TEST_CASE("general W derivative and Lame constants") {
    CHECK((invariants(Mat3::Identity()) - Vec3(3, 3, 1)).norm() < 1e-15);
    CHECK(general_W_derivative(Mat3::Identity(), Vec3::Zero()).norm() == 0);
    Vec3 g0(-0.5, 0.25, 0);
    CHECK(general_W_derivative(Mat3::Identity(), g0).norm() < 1e-15);

    // Against finite differences of 1/4 |F^T F - Id|^2 at a random F.
    auto Wf = [](const Mat3& F) { return 0.25 * (F.transpose() * F - Mat3::Identity()).squaredNorm(); };
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int k = 0; k < 20; ++k) {
        Mat3 F = Mat3::Identity() + 0.5 * Mat3::NullaryExpr([&] { return U(rng); });
        Mat3 fd;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                Mat3 Fp = F, Fm = F;
                Fp(i, j) += 1e-6;
                Fm(i, j) -= 1e-6;
                fd(i, j) = (Wf(Fp) - Wf(Fm)) / 2e-6;
            }
        CHECK((general_W_derivative(F, g0) - fd).norm() < 1e-7);
    }

    auto lc = lame_constants(g0, Mat3::Zero());
    CHECK(lc.lambda == doctest::Approx(0));
    CHECK(lc.mu == doctest::Approx(2));
    auto lz = lame_constants(Vec3::Zero(), Mat3::Zero());
    CHECK(lz.lambda == 0);
    CHECK(lz.mu == 0);
    CHECK(lame_constants(Vec3(0, 1, 1), Mat3::Zero()).mu == doctest::Approx(6));

    // Second variation of W0 at Id equals lambda (tr A)^2 + mu |sym A|^2.
    for (int k = 0; k < 10; ++k) {
        Mat3 A = Mat3::NullaryExpr([&] { return U(rng); });
        double h = 1e-4;
        double d2 = (Wf(Mat3::Identity() + h * A) - 2 * Wf(Mat3::Identity()) + Wf(Mat3::Identity() - h * A)) / (h * h);
        Mat3 sym = 0.5 * (A + A.transpose());
        CHECK(d2 == doctest::Approx(lc.lambda * A.trace() * A.trace() + lc.mu * sym.squaredNorm()).epsilon(1e-6));
    }
}

TEST_CASE("dissipation") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int k = 0; k < 20; ++k) {
        Mat3 D = Mat3::NullaryExpr([&] { return U(rng); });
        D = (D + D.transpose()).eval();
        Mat3 G = Mat3::NullaryExpr([&] { return U(rng); });
        Mat3 C = G * G.transpose() + Mat3::Identity();
        CHECK(dissipation_check(C, D, ViscosityKind::Z1) == doctest::Approx(0.5 * D.squaredNorm()));
        CHECK(dissipation_check(Mat3::Identity(), D, ViscosityKind::Z2) ==
              doctest::Approx(0.5 * D.squaredNorm()));
        CHECK(dissipation_check(C, D, ViscosityKind::Z2) > 0);
    }
    CHECK(dissipation_check(Mat3::Identity(), Mat3::Zero(), ViscosityKind::Z2) == 0);
    Mat3 bad = Vec3(1, -1, 1).asDiagonal();
    CHECK_THROWS_AS(dissipation_check(bad, Mat3::Identity(), ViscosityKind::Z2), DomainError);
}
