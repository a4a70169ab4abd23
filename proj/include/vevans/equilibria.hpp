#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vevans/model.hpp"

namespace vevans {

enum class ShockClass { Lax, Overcompressive, Undercompressive, Degenerate };
std::string to_string(ShockClass c);
ShockClass parse_shock_class(const std::string& s);

struct ShockCandidate {
    Vec alpha;
    Vec a_plus;
    double s = 0.0;
    double sigma = 0.0;
    int ell_tilde = 0;
    ShockClass shock_class = ShockClass::Degenerate;
};

enum class Morse { Repellor, Attractor, Saddle, Degenerate };
std::string to_string(Morse m);

struct EquilibriumInfo {
    Vec a;
    std::vector<double> jacobian_eigs;
    Morse morse = Morse::Degenerate;
    bool feasible = true;
    bool hyperbolic_endstate = false;
};

struct ScalarRoot {
    double value;
    bool feasible;
};

struct PlanarRoot {
    Vec a;
    bool feasible;
};

struct ShearRH {
    std::vector<Vec> points;
    // Radius of the circle |a+|^2 = sigma - 1 when the RH set contains it.
    std::optional<double> circle_radius;
};

// Ring {(r cos t, r sin t, a3_plus)} of out-of-plane 3D solutions.
struct RHRing {
    double a3_plus;
    double radius;
};

struct RH3D {
    std::vector<PlanarRoot> points;
    std::optional<RHRing> ring;
    bool degenerate = false;  // |alpha|^2 = sigma: out-of-plane continuum, not returned
};

// All solvers below are for the W0 potential and always include a+ = alpha.
ShearRH rh_shear(const Vec& alpha, double sigma);
std::vector<ScalarRoot> rh_compressible_1d(double alpha3, double sigma);
std::vector<PlanarRoot> rh_compressible_2d(const Vec& alpha, double sigma);
RH3D rh_compressible_3d(const Vec& alpha, double sigma);

// Real roots of y(y-s)^2(y-1-s)^2 - A^2 a2^2 (y-1-s)^2 - B^2 a3^2 (y-s)^2 with y >= 0.
std::vector<double> quintic_roots(const Vec& alpha, double sigma);
// Coefficients, constant term first.
std::vector<double> quintic_coefficients(const Vec& alpha, double sigma);

// Isolated equilibria of the profile flow for any variant (continua are omitted).
std::vector<Vec> equilibrium_points(const Vec& alpha, double sigma, const ModelVariant& variant);

// max-norm of [DW - sigma a] between the two states.
double rh_residual(const Vec& alpha, const Vec& a_plus, double sigma, const ElasticPotential& pot,
                   const ModelVariant& variant);

EquilibriumInfo classify_equilibrium(const Vec& a, const Vec& alpha, double sigma,
                                     const ElasticPotential& pot, const ModelVariant& variant);

ShockCandidate shock_type(const Vec& alpha, const Vec& a_plus, double s, const ElasticPotential& pot,
                          const ModelVariant& variant);

// One candidate per other feasible equilibrium of the (alpha, s^2) flow, oriented alpha -> p,
// or p -> alpha when alpha is an attractor.
std::vector<ShockCandidate> shock_candidates(const Vec& alpha, double s, const ElasticPotential& pot,
                                             const ModelVariant& variant);

}  // namespace vevans
