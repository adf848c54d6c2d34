#include <doctest.h>

#include "isoradial/errors.hpp"
#include "isoradial/harness.hpp"

#include <fstream>
#include <sstream>

using namespace isoradial;
using std::numbers::pi;

namespace {

std::vector<ConvergenceRecord> synthetic(const std::string& metric, const std::function<double(double)>& err)
{
    std::vector<ConvergenceRecord> out;
    for (double d : {0.1, 0.05, 0.025}) out.push_back({"hm", "square", "disc", d, metric, err(d), "synthetic"});
    return out;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("continuous references")
{
    CHECK_NOTHROW(reference::validate());
    // centre of the disc sees an arc of angle 2 pi s with probability s
    for (double s : {0.1, 0.25, 0.6}) CHECK(reference::disc_arc_measure(0, 0.4, 0.4 + 2 * pi * s) == doctest::Approx(s));
    CHECK(reference::disc_arc_measure(cplx(0.3, 0), -pi / 3, pi / 3) > 1.0 / 3);
    CHECK(reference::disc_green_star(cplx(0.4, 0.1), 0) == 0.0);
    // v = 0: P(u) = (1 - |u|^2) / |u - a|^2
    cplx a = std::polar(1.0, 0.7), u(0.2, -0.3);
    CHECK(reference::disc_poisson(u, 0, a) == doctest::Approx((1 - std::norm(u)) / std::norm(u - a)));
    // P0 grows like Im z near 0
    CHECK(reference::halfdisc_poisson(cplx(0, 1e-4), cplx(0, 1)) == doctest::Approx(1e-4).epsilon(1e-3));
}

TEST_CASE("rate fitting")
{
    auto quad = synthetic("value:x", [](double d) { return 3 * d * d; });
    CHECK(fit_rate(quad).slope == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::abs(fit_rate(synthetic("value:x", [](double) { return 0.5; })).slope) < 1e-12);
    quad.pop_back();
    CHECK_THROWS_AS(fit_rate(quad), DegenerateFit);
    auto zero = synthetic("value:x", [](double) { return 0.0; });
    CHECK_THROWS_AS(fit_rate(zero), DegenerateFit);
}

TEST_CASE("family summaries apply slack and thresholds")
{
    auto ok = synthetic("value:a", [](double d) { return 0.5 * d; });
    auto slack = synthetic("value:b", [](double d) { return d == 0.05 ? 0.0118 : 0.01 * d / 0.1; });
    auto rise = synthetic("value:c", [](double d) { return d == 0.05 ? 0.013 : 0.01 * d / 0.1; });
    auto high = synthetic("value:d", [](double d) { return 0.02 + d; });
    auto grad = synthetic("gradient:e", [](double d) { return 0.5 + d; });
    std::vector<ConvergenceRecord> all;
    for (auto* v : {&ok, &slack, &rise, &high, &grad}) all.insert(all.end(), v->begin(), v->end());
    std::map<std::string, bool> pass;
    for (const auto& s : summarize(all)) pass[s.key.substr(s.key.rfind('|') + 1)] = s.pass;
    CHECK(pass["value:a"]);
    CHECK(pass["value:b"]);
    CHECK_FALSE(pass["value:c"]);
    CHECK_FALSE(pass["value:d"]);
    CHECK(pass["gradient:e"]);
}

TEST_CASE("reports are reproducible")
{
    auto recs = synthetic("value:a", [](double d) { return 0.1 * d; });
    auto more = synthetic("gradient:a", [](double d) { return 2 * d; });
    recs.insert(recs.end(), more.begin(), more.end());
    auto dir = std::filesystem::temp_directory_path() / "isoradial_report_test";
    std::filesystem::remove_all(dir);
    CHECK(emit_report(recs, dir / "a"));
    std::reverse(recs.begin(), recs.end());
    CHECK(emit_report(recs, dir / "b"));
    CHECK(slurp(dir / "a" / "records.csv") == slurp(dir / "b" / "records.csv"));
    CHECK(slurp(dir / "a" / "summary.json") == slurp(dir / "b" / "summary.json"));
    CHECK(slurp(dir / "a" / "records.csv").find("hm,square,\"disc\",0.1,gradient:a,0.2,\"synthetic\",1") != std::string::npos);
    recs.push_back({"hm", "square", "disc", 0.0125, "value:a", 1.0, "synthetic"});
    CHECK_FALSE(emit_report(recs, dir / "c"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("lattice specs")
{
    CHECK(LatticeSpec::parse("square").kind == "square");
    auto r = LatticeSpec::parse("random:7");
    CHECK(r.seed == 7);
    CHECK(r.eta == 0.3);
    CHECK(r.name() == "random:7");
    CHECK(LatticeSpec::parse("random:2:0.5").name() == "random:2:0.5");
    CHECK_THROWS_AS(LatticeSpec::parse("hex"), FormatError);
    CHECK_THROWS_AS(LatticeSpec::parse("random:x"), FormatError);
}

TEST_CASE("experiments are deterministic")
{
    SuiteOptions opt;
    opt.lattices = {LatticeSpec::parse("random:3")};
    opt.deltas = {0.2, 0.1};
    auto a = exp_hm_convergence(opt);
    opt.threads = 2;
    auto b = exp_hm_convergence(opt);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].metric == b[i].metric);
        CHECK(a[i].error == b[i].error);
    }
}

TEST_CASE("Beurling fit on flat and corner geometries")
{
    auto lat = LatticeSpec::parse("square");
    auto flat = exp_beurling(lat, 0.05, "flat");
    auto corner = exp_beurling(lat, 0.05, "corner");
    CHECK(flat.beta > 0);
    CHECK(corner.beta > 0);
    // the reentrant corner is felt more weakly than a flat side
    CHECK(corner.beta < flat.beta);
    for (std::size_t i = 0; i < flat.ratio.size(); ++i)
        CHECK(flat.omega[i] <= flat.C * std::pow(flat.ratio[i], flat.beta) * (1 + 1e-12));
    CHECK_THROWS_AS(exp_beurling(lat, 0.05, "slit"), FormatError);
}
