#include "isoradial/errors.hpp"
#include "isoradial/harness.hpp"
#include "isoradial/io.hpp"
#include "isoradial/kernels.hpp"
#include "isoradial/operators.hpp"
#include "isoradial/solvers.hpp"
#include "isoradial/walk.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>

using namespace isoradial;

namespace {

std::string num(double x)
{
    if (!std::isfinite(x)) return "";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path);
    return out;
}

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::pair<int, int> parse_arc(const std::string& s)
{
    auto comma = s.find(',');
    if (comma == std::string::npos) throw FormatError("arc must be A,B (boundary pair ids)");
    return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
}

void check_pair(const DiscreteDomain& d, int p)
{
    if (p < 0 || p >= d.num_pairs()) throw NotOnBoundary("pair id " + std::to_string(p) + " out of range");
}

void check_interior(const DiscreteDomain& d, int v)
{
    if (v < 0 || v >= d.graph().num_vertices() || !d.is_interior(v))
        throw PreconditionViolated("vertex " + std::to_string(v) + " is not interior");
}

void write_domain_csv(const std::string& path, const DomainFunction& H)
{
    auto out = open_out(path);
    const auto& d = *H.domain;
    out << "id,x,y,value\n";
    for (int i = 0; i < d.num_interior(); ++i) {
        int v = d.interior()[i];
        out << v << "," << num(d.graph().pos(v).real()) << "," << num(d.graph().pos(v).imag()) << "," << num(H.interior[i]) << "\n";
    }
    for (int p = 0; p < d.num_pairs(); ++p) {
        int a = d.boundary()[p].a;
        out << a << "," << num(d.graph().pos(a).real()) << "," << num(d.graph().pos(a).imag()) << "," << num(H.boundary[p]) << "\n";
    }
}

QuadGraph make_twoseq(double delta, int extent, const std::vector<double>& alpha, const std::vector<double>& beta, double eta)
{
    if (alpha.empty() || beta.empty()) throw EmptyInput("twoseq needs non-empty --alpha and --beta");
    std::vector<double> a(2 * extent), b(2 * extent);
    for (int k = 0; k < 2 * extent; ++k) {
        a[k] = alpha[k % alpha.size()];
        b[k] = beta[k % beta.size()];
    }
    return build_quadgraph_centered(a, b, delta, extent, extent, eta);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Discrete complex analysis on isoradial graphs"};
    app.require_subcommand(1);
    int exit_code = 0;

    // gen
    auto* gen = app.add_subcommand("gen", "generate a two-sequence quad-graph");
    std::string family = "square", out_path;
    double delta = 0.1, eta = 0.3;
    int extent = 10;
    std::uint64_t seed = 1;
    std::string alpha_s = "0", beta_s = "1.0471975511965976";
    gen->add_option("--family", family)->check(CLI::IsMember({"square", "twoseq", "random"}));
    gen->add_option("--delta", delta)->required();
    gen->add_option("--extent", extent)->required();
    gen->add_option("--seed", seed);
    gen->add_option("--eta", eta, "minimum of 2theta and pi - 2theta");
    gen->add_option("--alpha", alpha_s, "twoseq: comma separated angles, repeated periodically");
    gen->add_option("--beta", beta_s, "twoseq: comma separated angles, repeated periodically");
    gen->add_option("-o", out_path)->required();
    gen->callback([&] {
        QuadGraph g = family == "square"   ? square_lattice(delta, extent)
                      : family == "random" ? random_isoradial(seed, extent, eta, delta)
                                           : make_twoseq(delta, extent, parse_list(alpha_s), parse_list(beta_s), eta);
        io::write_json(out_path, io::graph_to_json(g));
        std::cout << g.num_vertices() << " vertices, " << g.num_rhombi() << " rhombi\n";
    });

    // domain
    auto* dom = app.add_subcommand("domain", "discretize a region");
    std::string graph_path, region_spec;
    dom->add_option("--graph", graph_path)->required();
    dom->add_option("--region", region_spec, "disc:cx,cy,R | rect:S,T | poly:FILE")->required();
    dom->add_option("-o", out_path)->required();
    dom->callback([&] {
        auto g = std::make_shared<const QuadGraph>(io::graph_from_json(io::read_json(graph_path)));
        auto d = discretize(g, io::parse_region(region_spec));
        io::write_json(out_path, io::domain_to_json(d));
        std::cout << d.num_interior() << " interior vertices, " << d.num_pairs() << " boundary pairs\n";
    });

    // op
    auto* op = app.add_subcommand("op", "apply a discrete operator");
    std::string domain_path, op_name, fn_path;
    int z0 = -1;
    op->add_option("--graph", graph_path);
    op->add_option("--domain", domain_path);
    op->add_option("--op", op_name)->required()->check(CLI::IsMember({"laplacian", "dbar", "cauchy"}));
    op->add_option("--fn", fn_path)->required();
    op->add_option("--z0", z0, "cauchy: rhombus id where F is reconstructed");
    op->add_option("-o", out_path);
    op->callback([&] {
        std::optional<DiscreteDomain> d;
        std::shared_ptr<const QuadGraph> g;
        if (!domain_path.empty()) {
            d = io::domain_from_json(io::read_json(domain_path));
            g = d->graph_ptr();
            if (!graph_path.empty() && io::graph_to_json(*g) != io::read_json(graph_path))
                throw FormatError("--graph differs from the graph embedded in --domain");
        } else if (!graph_path.empty()) {
            g = std::make_shared<const QuadGraph>(io::graph_from_json(io::read_json(graph_path)));
        } else {
            throw FormatError("op needs --graph or --domain");
        }
        auto f = io::function_from_json(*g, io::read_json(fn_path));
        io::json result;
        if (op_name == "laplacian") {
            if (!d) throw FormatError("laplacian needs --domain");
            result = io::function_to_json(laplacian_apply(*g, assemble_laplacian(*d), f));
        } else if (op_name == "dbar") {
            result = io::function_to_json(f.support() == Support::Diamond ? dbar_diamond(*g, f) : dbar_lambda(*g, f));
        } else {
            if (!d) throw FormatError("cauchy needs --domain");
            if (z0 < 0 || z0 >= g->num_rhombi()) throw FormatError("cauchy needs --z0 RHOMBUS");
            KernelCache kc(*g, ContourSpec::for_delta(g->delta()));
            cplx value = cauchy_reconstruct(*d, f, z0, [&](int v) { return kc.cauchy(v, z0); });
            result = {{"z0", z0}, {"value", {value.real(), value.imag()}}};
            if (f.has(z0)) result["stored"] = {f.at(z0).real(), f.at(z0).imag()};
        }
        if (out_path.empty()) std::cout << result.dump(1) << "\n";
        else io::write_json(out_path, result);
    });

    // green / cauchy kernels
    auto* green = app.add_subcommand("green", "free Green's function around u0");
    int u0 = -1;
    double radius = -1;
    green->add_option("--graph", graph_path)->required();
    green->add_option("--u0", u0)->required();
    green->add_option("--radius", radius, "default 5 delta");
    green->add_option("-o", out_path)->required();
    green->callback([&] {
        auto g = io::graph_from_json(io::read_json(graph_path));
        if (u0 < 0 || u0 >= g.num_vertices()) throw FormatError("u0 out of range");
        double r = radius > 0 ? radius : 5 * g.delta();
        KernelCache kc(g, ContourSpec::for_delta(g.delta()));
        auto out = open_out(out_path);
        out << "id,x,y,value_re,value_im,ref_value,abs_err\n";
        for (int u = 0; u < g.num_vertices(); ++u) {
            if (g.color(u) != g.color(u0) || std::abs(g.pos(u) - g.pos(u0)) > r) continue;
            double value = kc.green(u, u0);
            double ref = u == u0 ? NAN : continuous_green_ref(g.pos(u), g.pos(u0));
            out << u << "," << num(g.pos(u).real()) << "," << num(g.pos(u).imag()) << "," << num(value) << ",0,"
                << num(ref) << "," << num(std::abs(value - ref)) << "\n";
        }
    });

    auto* cauchy = app.add_subcommand("cauchy", "discrete Cauchy kernel K(.; z0)");
    cauchy->add_option("--graph", graph_path)->required();
    cauchy->add_option("--z0", z0, "rhombus id")->required();
    cauchy->add_option("--radius", radius, "default 5 delta");
    cauchy->add_option("-o", out_path)->required();
    cauchy->callback([&] {
        auto g = io::graph_from_json(io::read_json(graph_path));
        if (z0 < 0 || z0 >= g.num_rhombi()) throw FormatError("z0 out of range");
        double r = radius > 0 ? radius : 5 * g.delta();
        cplx c = g.rhombus(z0).center;
        KernelCache kc(g, ContourSpec::for_delta(g.delta()));
        auto out = open_out(out_path);
        out << "id,x,y,value_re,value_im,ref_value,abs_err\n";
        for (int v = 0; v < g.num_vertices(); ++v) {
            if (std::abs(g.pos(v) - c) > r) continue;
            cplx value = kc.cauchy(v, z0);
            cplx ref = continuous_cauchy_ref(g.pos(v), c, cauchy_far_field_tau(g, v, z0));
            // ref_value holds the modulus; abs_err compares against the complex reference
            out << v << "," << num(g.pos(v).real()) << "," << num(g.pos(v).imag()) << "," << num(value.real()) << ","
                << num(value.imag()) << "," << num(std::abs(ref)) << "," << num(std::abs(value - ref)) << "\n";
        }
    });

    // solve
    auto* solve = app.add_subcommand("solve", "Dirichlet problem");
    std::string bc_path;
    solve->add_option("--domain", domain_path)->required();
    solve->add_option("--bc", bc_path)->required();
    solve->add_option("-o", out_path)->required();
    solve->callback([&] {
        auto d = io::domain_from_json(io::read_json(domain_path));
        auto H = solve_dirichlet(d, io::boundary_values_from_json(d, io::read_json(bc_path)));
        io::write_json(out_path, io::function_to_json(H.to_lattice()));
        std::cout << "residual " << num(harmonic_residual(H)) << "\n";
    });

    // hm
    auto* hm = app.add_subcommand("hm", "harmonic measure of a boundary arc");
    int from = -1;
    std::string arc_s;
    hm->add_option("--domain", domain_path)->required();
    hm->add_option("--from", from)->required();
    hm->add_option("--arc", arc_s, "A,B: boundary pair ids, counter-clockwise")->required();
    hm->add_option("-o", out_path)->required();
    hm->callback([&] {
        auto d = io::domain_from_json(io::read_json(domain_path));
        check_interior(d, from);
        auto [A, B] = parse_arc(arc_s);
        check_pair(d, A);
        check_pair(d, B);
        DirichletSystem sys(d);
        auto omega = harmonic_measure_all(sys, from);
        auto out = open_out(out_path);
        out << "pair,a,x,y,omega\n";
        double total = 0;
        for (int p : boundary_arc(d, A, B)) {
            int a = d.boundary()[p].a;
            total += omega[p];
            out << p << "," << a << "," << num(d.graph().pos(a).real()) << "," << num(d.graph().pos(a).imag()) << ","
                << num(omega[p]) << "\n";
        }
        std::cout << "omega " << num(total) << "\n";
    });

    // poisson
    auto* poisson = app.add_subcommand("poisson", "discrete Poisson kernels");
    std::string mode;
    int v_id = -1, a_pair = -1, o_pair = -1;
    double S = 0, T = 0;
    poisson->add_option("--mode", mode)->required()->check(CLI::IsMember({"interior", "boundary"}));
    poisson->add_option("--domain", domain_path)->required();
    poisson->add_option("--v", v_id, "interior: normalisation vertex");
    poisson->add_option("--a", a_pair, "boundary pair of the pole")->required();
    poisson->add_option("--o-pair", o_pair, "boundary: normalisation pair");
    poisson->add_option("--S", S, "boundary: straight part (-S, S)");
    poisson->add_option("--T", T, "boundary: box height");
    poisson->add_option("-o", out_path)->required();
    poisson->callback([&] {
        auto d = io::domain_from_json(io::read_json(domain_path));
        check_pair(d, a_pair);
        DirichletSystem sys(d);
        if (mode == "interior") {
            check_interior(d, v_id);
            write_domain_csv(out_path, poisson_interior(sys, v_id, a_pair));
        } else {
            check_pair(d, o_pair);
            write_domain_csv(out_path, poisson_boundary(sys, a_pair, o_pair, S, T));
        }
    });

    // walk
    auto* walk = app.add_subcommand("walk", "Monte Carlo harmonic measure");
    std::int64_t trials = 10000;
    int threads = 1;
    walk->add_option("--domain", domain_path)->required();
    walk->add_option("--from", from)->required();
    walk->add_option("--arc", arc_s)->required();
    walk->add_option("--trials", trials);
    walk->add_option("--seed", seed);
    walk->add_option("--threads", threads);
    walk->add_option("-o", out_path)->required();
    walk->callback([&] {
        auto d = io::domain_from_json(io::read_json(domain_path));
        check_interior(d, from);
        auto [A, B] = parse_arc(arc_s);
        check_pair(d, A);
        check_pair(d, B);
        auto pairs = boundary_arc(d, A, B);
        WalkConfig cfg;
        cfg.seed = seed;
        cfg.trials = trials;
        cfg.threads = threads;
        auto mc = mc_harmonic_measure(d, from, pairs, cfg);
        double exact = harmonic_measure(d, from, pairs);
        io::json j{{"estimate", mc.estimate}, {"stderr", mc.stderr_}, {"hits", mc.hits}, {"trials", trials},
                   {"used", mc.used}, {"truncated", mc.truncated}, {"exact", exact}};
        io::write_json(out_path, j);
        std::cout << "mc " << num(mc.estimate) << " +- " << num(mc.stderr_) << ", exact " << num(exact) << "\n";
    });

    // converge
    auto* conv = app.add_subcommand("converge", "convergence suite");
    std::string suite = "all", deltas_s = "0.1,0.05,0.025", lattices_s = "square,random:1,random:2";
    conv->add_option("--suite", suite)->check(CLI::IsMember({"hm", "green", "poisson", "beurling", "all"}));
    conv->add_option("--deltas", deltas_s);
    conv->add_option("--lattices", lattices_s);
    conv->add_option("--threads", threads);
    conv->add_option("-o", out_path)->required();
    conv->callback([&] {
        SuiteOptions opt;
        opt.deltas = parse_list(deltas_s);
        opt.threads = threads;
        std::stringstream ss(lattices_s);
        std::string item;
        while (std::getline(ss, item, ',')) opt.lattices.push_back(LatticeSpec::parse(item));
        reference::validate();
        std::vector<ConvergenceRecord> recs;
        auto add = [&](std::vector<ConvergenceRecord> r) { recs.insert(recs.end(), r.begin(), r.end()); };
        if (suite == "hm" || suite == "all") add(exp_hm_convergence(opt));
        if (suite == "green" || suite == "all") add(exp_green_convergence(opt));
        if (suite == "poisson" || suite == "all") add(exp_poisson_convergence(opt));
        if (suite == "beurling" || suite == "all") add(beurling_records(opt));
        bool pass = emit_report(recs, out_path);
        for (const auto& s : summarize(recs))
            std::cout << (s.pass ? "PASS " : "FAIL ") << s.key << " rate=" << num(s.rate) << " final=" << num(s.final_error) << "\n";
        exit_code = pass ? 0 : 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}
