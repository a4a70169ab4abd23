#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "vevans/model.hpp"
#include "vevans/profile.hpp"

namespace vevans {

using cd = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

enum class Side { Plus, Minus };

// Integrated eigenvalue problem Z' = A(z, lambda) Z about a profile.
//   compressible component j, Z_j = (b_j, a_j, a_j'):
//     b_j' = lambda a_j - s a_j'
//     a_j'' = (1/s) [lambda a_j' - (a3/d_j)(lambda b_j - s b_j' - sum_k M_jk a_k') - a3' bbar_j' / a3]
//   shear component j, Z_j = (a_j, b_j, b_j'):
//     a_j' = (lambda a_j - b_j') / s
//     b_j'' = lambda b_j - s b_j' - sum_k M_jk a_k'
// with d = (1, 1, 2), M = D^2 W at the profile and bbar' = -s abar'.
class EvansSystem {
public:
    // grid_variant is the variant the profile was computed in; Transverse and
    // Compressible3D accept an in-plane Compressible2D profile.
    EvansSystem(const ModelVariant& variant, std::shared_ptr<const ProfileGrid> grid,
                const ModelVariant& grid_variant, const ElasticPotential& pot);

    int N() const { return 3 * int(components_.size()); }
    double L() const { return grid_->L; }
    double s() const { return grid_->s; }
    const ModelVariant& variant() const { return variant_; }
    const ProfileGrid& grid() const { return *grid_; }

    // A(z, lambda); clamps to the endstate matrices outside [-L, L].
    MatC matrix(double z, cd lambda) const;
    MatC limit(Side side, cd lambda) const;

private:
    MatC build(const Vec3& abar, const Vec3& abar_prime, cd lambda) const;
    void profile3(double z, Vec3& a, Vec3& ap) const;

    ModelVariant variant_;
    ModelVariant grid_variant_;
    std::shared_ptr<const ProfileGrid> grid_;
    ElasticPotential pot_;
    std::vector<int> components_;
    bool shear_;
};

EvansSystem assemble_evans(const ModelVariant& variant, std::shared_ptr<const ProfileGrid> grid,
                           const ModelVariant& grid_variant, const ElasticPotential& pot);

struct Split {
    MatC basis;  // orthonormal columns
    int dim = 0;
    cd trace;    // sum of the selected eigenvalues
};

// Stable (Plus) or unstable (Minus) invariant subspace by reordered complex Schur form.
// Throws SplittingDegenerate when an eigenvalue has |Re| < zero_tol.
Split spectral_split(const MatC& A, Side side, double zero_tol = 1e-8);
// Same subspace selected by rank: the k eigenvalues furthest to the stable (Plus) or
// unstable (Minus) side. Throws SplittingDegenerate if the k-th and (k+1)-th real parts
// are not separated or the selection crosses the axis by more than axis_tol.
// With dA = dA/dlambda the ranking uses Re mu(lambda + eta) to first order (eta = 1e-6):
// eigenvalues whose real parts are below roundoff on the imaginary axis are then assigned
// the side they take for Re lambda > 0.
Split spectral_split_k(const MatC& A, Side side, int k, double axis_tol = 1e-8, const MatC* dA = nullptr);

// Spectral projector R (L^H R)^{-1} L^H onto the selected subspace.
MatC spectral_projector(const MatC& A, Side side, int k, const MatC* dA = nullptr);

struct AnalyticBasisState {
    cd lambda;
    MatC basis_plus;
    MatC basis_minus;
    MatC projector_plus;
    MatC projector_minus;
};

// Bases at a real lambda: real orthonormal bases of the (real) projector ranges.
AnalyticBasisState real_basis_state(const EvansSystem& sys, double lambda, int k_plus, int k_minus);

// Second-order discrete Kato step R1 = P1 [I + 1/2 P0 (I - P1)] R0, bisected until
// consecutive projectors differ by at most max_dp.
MatC kato_step(const MatC& R0, const std::function<MatC(cd)>& projector, cd from, cd to,
               double max_dp = 0.05);
std::vector<MatC> kato_transport(const MatC& R0, const std::function<MatC(cd)>& projector,
                                 const std::vector<cd>& path, double max_dp = 0.05);
AnalyticBasisState kato_transport_state(const AnalyticBasisState& from, const EvansSystem& sys, cd to,
                                        double max_dp = 0.05);

struct SubspaceFrame {
    MatC omega;
    cd log_r = 0.0;
    Side side = Side::Plus;
    int k = 0;
    double max_drift = 0.0;  // largest ||Omega^* Omega - I|| seen at accepted steps
    int reorthonormalizations = 0;
};

// Frame at z = +L (Plus) or -L (Minus) for the solution space e^{A+- (z -+ L)} basis.
SubspaceFrame initialize_at_infinity(const MatC& A_limit, const MatC& basis, Side side, double L);

struct DruryOptions {
    double abs_tol = 1e-8;
    double rel_tol = 1e-6;
    double reorth_tol = 1e-8;
    double max_drift = 1e-6;  // steps that drift further are retaken at half the size
};

SubspaceFrame drury_integrate(const std::function<MatC(double)>& A, SubspaceFrame frame, double from_z,
                              double to_z, const DruryOptions& opts = {});

struct EvansValue {
    cd D;
    cd log_D;  // log r+ + log r- + log det; finite when exp(log_D) overflows
    double max_drift = 0.0;
    int k_plus = 0;
    int k_minus = 0;
};

// D~(lambda) = exp(log r+ + log r-) det[Omega+ | Omega-] with frames matched at z = match_z.
EvansValue evaluate_D(const EvansSystem& sys, const AnalyticBasisState& state, double match_z = 0.0,
                      const DruryOptions& opts = {});

// Subspace dimensions at the reference lambda = 1; throws SplittingDegenerate when
// k+ + k- != N.
std::pair<int, int> reference_dimensions(const EvansSystem& sys);

}  // namespace vevans
