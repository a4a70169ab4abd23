#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vevans/equilibria.hpp"
#include "vevans/evans.hpp"

namespace vevans {

// log D along a path of lambda values. path[0] must be real: that is where the analytic
// bases are initialized, and every later point is reached by transport along the path.
// Any branch of the complex log is acceptable; -inf real part marks an exact zero.
using PathEvaluator = std::function<std::vector<cd>(const std::vector<cd>& path)>;

// log f for a plain analytic function (tests, synthetic models).
PathEvaluator analytic_evaluator(std::function<cd(cd)> f);

struct EvansEvaluatorStats {
    long evaluations = 0;
    double max_drift = 0.0;
};

// Evans function of a system with dimensions fixed at lambda = 1. Values are cached per
// (base point, lambda); D evaluations along a path run on `threads` workers.
class EvansEvaluator {
public:
    EvansEvaluator(std::shared_ptr<const EvansSystem> sys, const DruryOptions& opts = {}, int threads = 0);
    std::vector<cd> operator()(const std::vector<cd>& path) const;
    EvansEvaluatorStats stats() const;
    int k_plus() const;
    int k_minus() const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

struct ContourSpec {
    double R = 2.0;
    int n_init = 20;
    double max_step_change = 0.2;
    double min_modulus = 1e-4;
    bool quadratic_mesh = true;
    int max_depth = 12;
};

void validate(const ContourSpec& spec);

// Contour parameter t in [0, 5]: upper arc [0,1], upper axis [1,2], origin indentation
// [2,3], lower axis [3,4], lower arc [4,5]. lambda(5 - t) = conj lambda(t).
cd contour_point(const ContourSpec& spec, double t);
// Initial parameters in increasing order, t = 0 through t = 5 (closing duplicate included).
std::vector<double> contour_params(const ContourSpec& spec);
std::vector<cd> mesh_contour(const ContourSpec& spec);

struct AsymptoticFit {
    double fit_log_c = 0.0;
    double fit_alpha = 0.0;
    double phase = 0.0;     // arg D on the fit samples (0 or pi for real data)
    double residual = 0.0;  // max |log|D| - model| over the fit samples
    double max_rel_err_on_contour = 0.0;
    std::vector<double> lambdas;
};

// Least-squares line of log|D| against sqrt(lambda). Throws DomainError if D vanishes.
AsymptoticFit fit_asymptotics(const PathEvaluator& eval, const std::vector<double>& lambdas);
// Fit samples used for a radius guess R: R * {4, 6, 8, 12, 16, 24, 32}.
std::vector<double> default_fit_lambdas(double R);

struct RadiusChoice {
    double R = 0.0;
    double max_rel_err = 0.0;
    bool accepted = false;
    std::vector<double> tried;
};

// Smallest R = R_start * 2^j <= R_max with | |D| / |C e^{alpha sqrt(lambda)}| - 1 | < tol at
// n_probe points of the right half circle of radius R.
RadiusChoice choose_radius(const PathEvaluator& eval, const AsymptoticFit& fit, double R_start = 2.0,
                           double tol = 0.2, double R_max = 1024.0, int n_probe = 9);

struct ContourSample {
    double t = 0.0;
    cd lambda;
    cd log_D;
    int depth = 0;
};

enum class VerdictKind { Stable, Unstable, Inconclusive };

struct Verdict {
    VerdictKind kind = VerdictKind::Inconclusive;
    int winding = 0;
    std::string reason;
    std::string str() const;  // Stable, Unstable(w), Inconclusive(reason)
};

struct ContourReport {
    ContourSpec spec;
    std::vector<ContourSample> samples;  // sorted by t, t = 0 and t = 5 both present
    int refinements = 0;
    int winding = 0;           // zeros inside the indented contour
    double winding_raw = 0.0;  // total phase change / 2 pi
    double max_rel_step = 0.0;
    double mean_rel_step = 0.0;
    bool inconclusive = false;
    std::string reason;
    std::optional<AsymptoticFit> fit;
    std::optional<RadiusChoice> radius;
    int origin_order = 0;  // from the phase change along the indentation
    bool origin_order_valid = false;
    Verdict verdict;

    int n_points() const { return int(samples.size()) - 1; }
    int total_winding() const { return winding + origin_order; }
};

ContourReport winding_number(const PathEvaluator& eval, const ContourSpec& spec);

struct OriginOrder {
    int order = 0;
    double raw = 0.0;  // phase change over the indentation / pi
    bool valid = false;
};

// Order of a zero at lambda = 0 from the phase change along the right half circle of
// radius r (a zero of order m turns the phase by m pi).
OriginOrder origin_order(const PathEvaluator& eval, double r, double max_step_change = 0.2, int max_depth = 12);

// Lax/OC: Stable iff no zeros inside and none at the origin (a zero at the origin alone is
// Inconclusive). Undercompressive: Stable iff no zeros inside and a zero of order 1 + |l~|
// at the origin.
Verdict verdict(const ContourReport& report, const ShockCandidate& cand);

struct ContourOptions {
    ContourSpec spec;
    double R_start = 2.0;
    double R_max = 1024.0;
    double fit_tol = 0.2;
    bool choose_R = true;
    bool check_origin = true;
};

// Fit, radius selection, winding number, origin order and verdict.
ContourReport analyze_stability(const PathEvaluator& eval, const ShockCandidate& cand,
                                const ContourOptions& opts = {});

// JSON record {model, alpha, a_plus, s, R, n_points, max_rel_step, mean_rel_step, L, winding,
// verdict, ...}.
std::string report_json(const ContourReport& report, const std::string& model, const Vec& alpha,
                        const Vec& a_plus, double s, double L);

}  // namespace vevans
