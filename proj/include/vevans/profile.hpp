#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "vevans/equilibria.hpp"
#include "vevans/model.hpp"

namespace vevans {

struct PhiPotential {
    Vec alpha;
    double sigma = 0.0;
    ElasticPotential pot = ElasticPotential::w0();
    ModelVariant variant = ModelVariant::of(Variant::Shear2D);
};

// phi(a) = W(a) - sigma |a|^2 / 2 - (DW(alpha) - sigma alpha) . a
double phi(const Vec& a, const PhiPotential& P);
Vec grad_phi(const Vec& a, const PhiPotential& P);
Mat hess_phi(const Vec& a, const PhiPotential& P);

// Profile ODE in the original traveling coordinate z. With b' = -s a' the
// b-equation integrates to s B(a) a' = grad(phi), and B = D / a3 for the Z2
// viscosity (D = diag(1,1,2)), B = Id for shear, so
//   a' = (a3 / s) D^{-1} grad(phi)   (compressible),   a' = grad(phi) / s   (shear).
Vec profile_flow_rhs(const Vec& a, const PhiPotential& P, double s);
// Jacobian of profile_flow_rhs at an equilibrium.
Mat profile_flow_jacobian(const Vec& a, const PhiPotential& P, double s);

struct ProfileOptions {
    double tol = 1e-3;  // endpoint error that fixes L
    double abs_tol = 1e-8;
    double rel_tol = 1e-6;
    double h_max = 0.25;
    double z_max = 2000.0;     // give up on a shooting run after this much z
    double fixed_L = 0.0;      // > 0: truncate to this L instead of the minimal one
    double capture = 1e-9;     // relative distance at which an endstate counts as reached
};

struct ProfileGrid {
    std::vector<double> z;
    std::vector<Vec> a_vals;
    std::vector<Vec> a_prime;
    std::vector<Vec> b_prime;
    Vec alpha;
    Vec a_plus;
    double s = 0.0;
    double L = 0.0;
    double endpoint_err = 0.0;
    int ell_estimate = 1;
    bool elliptic_crossing = false;
    std::vector<std::string> log;

    size_t size() const { return z.size(); }
    // b(z) = -s (a(z) - alpha)
    Vec b_at(size_t i) const { return -s * (a_vals[i] - alpha); }
    // Cubic Hermite interpolation of a and a' (clamped to the endstates outside [-L, L]).
    void interpolate(double zq, Vec& a, Vec& ap) const;
};

ProfileGrid compute_profile(const ShockCandidate& cand, const ElasticPotential& pot,
                            const ModelVariant& variant, const ProfileOptions& opts = {});

// Connection through a given interior point (overcompressive families).
ProfileGrid compute_profile_through(const ShockCandidate& cand, const Vec& seed,
                                    const ElasticPotential& pot, const ModelVariant& variant,
                                    const ProfileOptions& opts = {});

// Interior points for an n-member overcompressive family: evenly spaced on the segment
// between the two saddles when there are two, otherwise on the perpendicular bisector
// of [alpha, a+] up to the edge of the family.
std::vector<Vec> overcompressive_seeds(const ShockCandidate& cand, const ElasticPotential& pot,
                                       const ModelVariant& variant, int n,
                                       const ProfileOptions& opts = {});

std::vector<ProfileGrid> overcompressive_family(const ShockCandidate& cand, const ElasticPotential& pot,
                                                const ModelVariant& variant, int n = 5,
                                                const ProfileOptions& opts = {});

// a1(z) = alpha1 e^{-alpha1^2 z} / sqrt(k + e^{-2 alpha1^2 z}), the sigma = 2 shear connection.
double explicit_shear_profile(double alpha1, double k, double z);

struct MonotonicityReport {
    double min_increment;
    bool ok;
};
MonotonicityReport phi_monotonicity_report(const ProfileGrid& grid, const PhiPotential& P);

// psi(V+) - psi(V-) for psi = -s eta + q, checked against -s (phi(a+) - phi(alpha)).
double psi_jump(const ShockCandidate& cand, const ElasticPotential& pot, const ModelVariant& variant);

struct Window {
    double xmin, xmax, ymin, ymax;
};

struct PortraitEquilibrium {
    Vec a;
    Morse morse;
    bool feasible;
};

struct PhasePortrait {
    Window window;
    std::vector<std::vector<Vec>> trajectories;
    std::vector<PortraitEquilibrium> equilibria;
    std::optional<double> circle_radius;  // shear alpha = 0 circle of equilibria
    bool show_feasibility = false;        // a3 = 0 line
    int mask_n = 0;                       // elliptic mask resolution (mask_n x mask_n cells)
    std::vector<bool> elliptic_mask;      // row-major, y outer
};

PhasePortrait phase_portrait(const PhiPotential& P, double s, const Window& window, int seeds);

struct DispersionResult {
    std::vector<double> k;
    std::vector<std::pair<std::complex<double>, std::complex<double>>> roots;
    double growth_rate = 0.0;            // max Re lambda of the exact roots over the samples
    double asymptotic_growth_rate = 0.0; // same for -k^2/2 + k sqrt(1 - 3 a3+^2)
    double predicted_rate = 0.0;         // (1 - 3 a3+^2) / 2
    double max_residual = 0.0;
};
DispersionResult dispersion_relation(double a3_plus, const std::vector<double>& k_samples);

// Necessary condition W(a-) = W(a+) for a capillarity profile between wells.
bool hamiltonian_check(const Vec& a_minus, const Vec& a_plus, const ElasticPotential& pot,
                       double gamma, const ModelVariant& variant);

struct UcCandidate {
    Vec alpha;
    Vec a_plus;
    double s;
    int ell_tilde;
    double miss_distance;
    bool connected;
};

struct UcReport {
    int pairs_examined = 0;
    std::vector<UcCandidate> candidates;
    int connections_found = 0;
};

// Saddle-to-saddle shooting for every RH pair with ell~ < 1 on the (alpha, s) grid.
UcReport undercompressive_search(const std::vector<double>& alphas, const std::vector<double>& speeds,
                                 const ProfileOptions& opts = {});

}  // namespace vevans
