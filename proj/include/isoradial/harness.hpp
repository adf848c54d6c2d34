#pragma once

#include "isoradial/domain.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace isoradial {

// "square", "random:SEED" or "random:SEED:ETA".
struct LatticeSpec
{
    std::string kind = "square";
    std::uint64_t seed = 0;
    double eta = 0.3;

    static LatticeSpec parse(const std::string& text);
    std::string name() const;
    QuadGraph make(double delta, int extent) const;
    // Smallest grown lattice whose stars cover the region and its boundary.
    std::shared_ptr<const QuadGraph> fit(double delta, const Region& region) const;
};

struct ConvergenceRecord
{
    std::string experiment;
    std::string lattice;
    std::string domain;
    double delta = 0;
    std::string metric;
    double error = 0;
    std::string reference;
    double fitted_rate = 0; // filled per family by assign_rates
};

struct SuiteOptions
{
    std::vector<LatticeSpec> lattices;
    std::vector<double> deltas{0.1, 0.05, 0.025};
    int threads = 1;
};

// Closed-form continuous references.
namespace reference {
// Harmonic measure in the unit disc of the arc from angle t1 to t2 (counter-clockwise).
double disc_arc_measure(cplx u, double t1, double t2);
// 2 d h for the same function, so that the derivative along a unit e is Re(2 dh * e).
cplx disc_arc_measure_2d(cplx u, double t1, double t2);
// G_C - G_disc at u for pole v: (1/2 pi) log |1 - conj(v) u|.
double disc_green_star(cplx u, cplx v);
cplx disc_green_star_2d(cplx u, cplx v);
// Poisson kernel of the unit disc with pole a on the circle, normalized to 1 at v.
double disc_poisson(cplx u, cplx v, cplx a);
// Upper half-disc kernel with pole a on the arc, zero on the rest of the boundary, d/dy at 0 equal to 1.
double halfdisc_poisson(cplx z, cplx a);
// Cross-checks every closed form against an independent evaluation; throws OracleFailure.
void validate();
} // namespace reference

std::vector<ConvergenceRecord> exp_hm_convergence(const SuiteOptions& opt);
std::vector<ConvergenceRecord> exp_green_convergence(const SuiteOptions& opt);
std::vector<ConvergenceRecord> exp_poisson_convergence(const SuiteOptions& opt);

struct BeurlingFit
{
    std::string geometry;
    std::vector<double> ratio; // dist(u; boundary) / dist(u; E)
    std::vector<double> omega;
    double beta = 0;
    double C = 0; // smallest C with omega <= C ratio^beta at all samples
};
// geometry: "flat" (rectangle, upper side) or "corner" (disc without a quarter wedge, outer arc).
BeurlingFit exp_beurling(const LatticeSpec& lat, double delta, const std::string& geometry);
std::vector<ConvergenceRecord> beurling_records(const SuiteOptions& opt);

// Estimate suite.
double quarter_arc_min(const LatticeSpec& lat, double delta);
// max/min of R omega(u0; {a}) over boundary pairs of the disc of radius R (in units of delta).
double disc_exit_ratio(const LatticeSpec& lat, double R);
struct RectConstants
{
    double cU = 0; // omega(o_int; U) t / delta
    double cV = 0; // omega(o_int; V) s^2 / (delta t)
};
RectConstants rect_constants(const LatticeSpec& lat, double delta, double s, double t);
struct RegularityConstants
{
    double C1 = 0, C2 = 0, mean_value = 0;
};
RegularityConstants regularity_constants(const LatticeSpec& lat, double delta);

struct RateFit
{
    double slope = 0;
    double intercept = 0;
};
// Least squares of log error against log delta; needs three distinct deltas.
RateFit fit_rate(const std::vector<ConvergenceRecord>& family);

std::string family_key(const ConvergenceRecord& r);
std::map<std::string, std::vector<ConvergenceRecord>> families(const std::vector<ConvergenceRecord>& records);
void assign_rates(std::vector<ConvergenceRecord>& records);

struct FamilySummary
{
    std::string key;
    double rate = 0;
    double final_error = 0;
    double threshold = 0; // 0 means no final-error target
    bool decreasing = false;
    bool pass = false;
};
// Decrease with 20% slack per step, and final error under the experiment's threshold.
std::vector<FamilySummary> summarize(const std::vector<ConvergenceRecord>& records);
// Writes records.csv and summary.json; returns true when every family passes.
bool emit_report(const std::vector<ConvergenceRecord>& records, const std::filesystem::path& dir);

} // namespace isoradial
