#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace vevans {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Reduced planar potential
//   W(a) = mu1/4 |a|^4 + mu2/2 |a|^2 - a3^2/2 + mu3/2 (a3-1)^2 + C
// with a the full 3-vector. The -a3^2/2 term comes from the in-plane part of
// |F^T F - Id|^2; W0 = 1/4(|a|^2-1)^2 + 1/2(a1^2+a2^2) is (1, 0, 0, 1/4).
struct ElasticPotential {
    double mu1 = 1.0;
    double mu2 = 0.0;
    double mu3 = 0.0;
    double c_offset = 0.0;

    static ElasticPotential w0() { return {1.0, 0.0, 0.0, 0.25}; }
    // mu1 = 1 + 4 c2, mu2 = -4 c2, mu3 = 2 c3
    static ElasticPotential from_c(double c2, double c3, double c = 0.0);
    std::pair<double, double> to_c() const;

    bool is_w0_family() const { return mu1 == 1.0 && mu2 == 0.0 && mu3 == 0.0; }
    // Positive definite Hessian at a = (0,0,1).
    bool convex_at_identity() const;
};

enum class Variant { Compressible3D, Compressible2D, Shear2D, Shear1D, Compressible1D, Transverse };

struct ModelVariant {
    Variant tag = Variant::Shear2D;
    int strain_dim = 2;
    int evans_dim = 6;

    static ModelVariant of(Variant v);
    bool compressible() const;
    bool shear() const { return !compressible(); }
    // Components of the full 3-vector that are free in this variant.
    std::vector<int> free_indices() const;
    Vec3 embed(const Vec& a) const;
    Vec restrict_vec(const Vec3& v) const;
    Mat restrict_mat(const Mat3& m) const;
    // Index of a3 within the reduced vector, or -1 when a3 is frozen at 1.
    int a3_index() const;
    std::string name() const;
};

ModelVariant parse_variant(const std::string& name);

struct StateV {
    Vec a;
    Vec b;
};

enum class ViscosityKind { Z1, Z2 };

enum class FieldType { GenuinelyNonlinear, LinearlyDegenerate, Unknown };

struct CharacteristicData {
    std::vector<double> m;
    std::vector<Vec> r;
    std::vector<FieldType> gn_flags;
    bool strictly_hyperbolic = false;
};

double eval_potential(const Vec& a, const ElasticPotential& pot, const ModelVariant& variant);
Vec grad_potential(const Vec& a, const ElasticPotential& pot, const ModelVariant& variant);
Mat hess_potential(const Vec& a, const ElasticPotential& pot, const ModelVariant& variant);

// Full 3D versions.
double potential3(const Vec3& a, const ElasticPotential& pot);
Vec3 grad_potential3(const Vec3& a, const ElasticPotential& pot);
Mat3 hess_potential3(const Vec3& a, const ElasticPotential& pot);

CharacteristicData characteristics(const Vec& a, const ElasticPotential& pot, const ModelVariant& variant);

// Flux G(V) of V_t + G(V)_z = 0 for the inviscid part: G = (-b, -D_aW(a)).
Vec flux(const StateV& V, const ElasticPotential& pot, const ModelVariant& variant);
std::pair<double, double> entropy_pair(const StateV& V, const ElasticPotential& pot, const ModelVariant& variant);

Mat viscosity_matrix(const Vec& a, ViscosityKind kind, const ModelVariant& variant);

// Machinery for frame-indifferent isotropic W(F) = sigma(|F|^2, |F^T F|^2, det F).
Vec3 invariants(const Mat3& F);
Mat3 cofactor(const Mat3& F);
Mat3 general_W_derivative(const Mat3& F, const Vec3& sigma_grad);

struct LameConstants {
    double lambda;
    double mu;
    bool mu_nonnegative;
    bool bulk_nonnegative;  // 3 lambda + mu >= 0
};
LameConstants lame_constants(const Vec3& sigma_grad, const Mat3& sigma_hess);

double dissipation_check(const Mat3& C, const Mat3& D, ViscosityKind kind);

}  // namespace vevans
