#pragma once

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vevans/contour.hpp"
#include "vevans/profile.hpp"

namespace vevans {

// Model names accepted on the command line and how each maps onto the library.
struct ModelSpec {
    std::string name;           // shear2d, shear1d, comp1d, comp2d, comp3d, transverse
    ModelVariant rh_variant;    // variant of the profile (and of alpha, a+)
    ModelVariant evans_variant;
};
ModelSpec parse_model(const std::string& name);

// start:step:stop (stop included when within 1e-12), a single value, or a comma list.
std::vector<double> parse_grid(const std::string& text);
std::vector<double> parse_list(const std::string& text);

// Auto: every ordered pair of a 4-point configuration when the (alpha, s) flow has four
// or more feasible equilibria, otherwise All. All: one pair per other equilibrium.
// FourPoint: every ordered pair of equilibria that a profile can join.
enum class TargetRule { Auto, All, Lax, Overcompressive, FourPoint };
TargetRule parse_target(const std::string& s);
std::string to_string(TargetRule t);

struct RunConfig {
    ModelSpec model = parse_model("shear2d");
    Vec alpha;
    double s = 0.0;
    std::optional<Vec> a_minus;  // explicit connection a- -> a+
    std::optional<Vec> a_plus;
    ElasticPotential pot = ElasticPotential::w0();
    TargetRule target = TargetRule::Auto;
    int oc_members = 5;
    bool require_hyperbolic = true;
    bool require_feasible = true;
    ContourOptions contour;
    ProfileOptions profile;
    int threads = 0;
};

// One CSV row; the header lists the fields in order.
struct RunRecord {
    std::string model;
    Vec3 alpha = Vec3::Zero();
    double s = 0.0;
    Vec3 a_plus = Vec3::Zero();
    std::string shock_class;
    double R = 0.0;
    int n_points = 0;
    double max_rel_step = 0.0;
    double L = 0.0;
    int winding = 0;
    std::string verdict;
    double seconds = 0.0;

    bool operator==(const RunRecord&) const = default;
};

extern const char* const csv_header;
std::string csv_row(const RunRecord& r);
RunRecord parse_csv_row(const std::string& line);
std::vector<RunRecord> read_csv(const std::string& path);

// A computed row plus what produced it.
struct RunResult {
    RunRecord record;
    ContourReport report;
    std::shared_ptr<const ProfileGrid> grid;
    std::string json;
    long evans_evaluations = 0;
    double max_drift = 0.0;  // largest frame orthonormality drift seen
};

// Cases that produced no row, with the reason (filters, missing connections).
struct RunLog {
    std::vector<std::string> skipped;
    std::vector<std::string> notes;
};

// Candidates for one (alpha, s) point after the filters; skipped pairs go to the log.
std::vector<ShockCandidate> select_candidates(const RunConfig& cfg, RunLog& log);

// RH roots -> candidate(s) -> profile(s) -> Evans contour -> verdict.
std::vector<RunResult> run_single(const RunConfig& cfg, RunLog& log);

struct SweepSpec {
    RunConfig base;
    std::vector<std::vector<double>> alpha_grid;  // one list per free alpha component
    std::vector<double> s_grid;
    int jobs = 1;
};

struct SweepStats {
    int cases = 0;
    int cases_resumed = 0;
    int rows = 0;
    int inconclusive = 0;
    long evans_evaluations = 0;
};

// Grid points in enumeration order (first alpha component outermost, s innermost).
std::vector<std::pair<Vec, double>> sweep_points(const SweepSpec& spec);
// Key that identifies a case in the manifest.
std::string case_key(const std::string& model, const Vec& alpha, double s);

// Writes the CSV to csv_path (header first) and completed case keys to manifest_path.
// Cases already in the manifest are skipped and their rows kept. Rows appear in
// enumeration order whatever the number of jobs.
SweepStats run_sweep(const SweepSpec& spec, const std::string& csv_path, const std::string& manifest_path,
                     const std::function<void(const std::string&)>& log_line = {});

bool is_inconclusive(const RunRecord& r);

// Deterministic SVG figures.
std::string portrait_svg(const PhasePortrait& portrait);
std::string image_curve_svg(const ContourReport& report);
std::string profile_svg(const ProfileGrid& grid);

std::string fmt17(double x);

}  // namespace vevans
