// tfreg: build, synthesize, verify, and inspect triangle-free regular
// graphs with certified small second eigenvalue.
//
// Exit codes: 0 success, 1 verification failed, 2 pipeline infeasible,
// 3 usage / IO / internal contract error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "tfreg/alon.hpp"
#include "tfreg/edgelist.hpp"
#include "tfreg/errors.hpp"
#include "tfreg/graph.hpp"
#include "tfreg/regularize.hpp"
#include "tfreg/spectral.hpp"

using nlohmann::ordered_json;

namespace {

int cmd_build_alon(int k, const std::string& out_path, const std::string& gens_path) {
    tfreg::AlonGraph built = tfreg::build_alon(k);
    tfreg::SpectralReport rep = tfreg::spectral_lambda(
        built.graph, tfreg::EigMethod::lanczos, 1e-6, 0, tfreg::threads_from_env());
    if (rep.lambda > built.spec.lambda_bound)
        throw tfreg::ContractError("build-alon: computed lambda " + std::to_string(rep.lambda) +
                                   " exceeds the bound " + std::to_string(built.spec.lambda_bound));
    tfreg::write_edge_list(out_path, built.graph);
    if (!gens_path.empty()) {
        tfreg::FieldCtx ctx(k);
        std::ostringstream body;
        tfreg::write_generator_dump(body, k, tfreg::generator_set(ctx));
        tfreg::write_text_atomic(gens_path, body.str());
    }
    ordered_json j;
    j["command"] = "build-alon";
    j["k"] = k;
    j["N"] = built.spec.n;
    j["D"] = built.spec.d;
    j["edges"] = built.graph.edge_count();
    j["triangle_count"] = 0;
    j["lambda"] = {{"computed", rep.lambda},
                   {"bound", built.spec.lambda_bound},
                   {"residual", rep.residual}};
    j["out"] = out_path;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_synth(std::int64_t n, std::uint64_t seed, const std::string& profile,
              const std::vector<std::string>& sets, const std::string& out_path,
              const std::string& cert_path) {
    tfreg::OverrideList overrides;
    for (const std::string& s : sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw tfreg::ContractError("--set expects key=value, got '" + s + "'");
        overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    tfreg::SynthResult res = tfreg::synthesize(n, seed, tfreg::profile_from_name(profile),
                                               overrides, tfreg::threads_from_env());
    tfreg::write_edge_list(out_path, res.graph);
    tfreg::write_text_atomic(cert_path, tfreg::certificate_to_json(res.cert).dump(2) + "\n");
    ordered_json j;
    j["command"] = "synth";
    j["n"] = res.cert.n;
    j["d_prime"] = res.cert.d_prime;
    j["triangle_count"] = res.cert.triangle_count;
    j["lambda_final"] = res.cert.lambda_final.computed;
    j["lambda_chain_bound"] = res.cert.lambda_final.bound;
    j["attempts"] = res.cert.attempts;
    j["out"] = out_path;
    j["cert"] = cert_path;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_verify(const std::string& graph_path, bool has_regular, std::int64_t expect_regular,
               bool expect_triangle_free, bool has_lambda, double lambda_bound, double tol) {
    tfreg::Graph g = tfreg::read_edge_list(graph_path);
    ordered_json j;
    j["command"] = "verify";
    j["graph"] = graph_path;
    j["n"] = g.vertex_count();
    j["edges"] = g.edge_count();
    j["checks"] = ordered_json::array();
    bool all_pass = true;

    tfreg::DegreeStats ds = tfreg::degree_stats(g);
    if (has_regular) {
        bool pass = g.vertex_count() > 0 && ds.min == ds.max && ds.min == expect_regular;
        if (g.vertex_count() == 0) pass = expect_regular == 0;
        j["checks"].push_back({{"check", "regular"},
                               {"expected", expect_regular},
                               {"degree_min", ds.min},
                               {"degree_max", ds.max},
                               {"pass", pass}});
        all_pass = all_pass && pass;
    }
    if (expect_triangle_free) {
        std::int64_t tc = tfreg::triangle_count(g);
        ordered_json chk = {{"check", "triangle_free"}, {"triangle_count", tc}, {"pass", tc == 0}};
        if (auto t = tfreg::find_triangle(g))
            chk["witness"] = {(*t)[0], (*t)[1], (*t)[2]};
        j["checks"].push_back(chk);
        all_pass = all_pass && tc == 0;
    }
    if (has_lambda) {
        ordered_json chk = {{"check", "lambda_bound"}, {"bound", lambda_bound}};
        if (ds.min != ds.max && g.vertex_count() > 4096) {
            chk["pass"] = false;
            chk["reason"] = "cannot certify: irregular graph too large for the dense method";
            all_pass = false;
        } else {
            tfreg::EigMethod method = g.vertex_count() <= 4096 ? tfreg::EigMethod::dense
                                                               : tfreg::EigMethod::lanczos;
            tfreg::SpectralReport rep =
                tfreg::spectral_lambda(g, method, tol, 0, tfreg::threads_from_env());
            bool pass = rep.lambda <= lambda_bound + rep.tolerance;
            chk["computed"] = rep.lambda;
            chk["method"] = method == tfreg::EigMethod::dense ? "dense" : "lanczos";
            chk["residual"] = rep.residual;
            chk["pass"] = pass;
            all_pass = all_pass && pass;
        }
        j["checks"].push_back(chk);
    }
    j["pass"] = all_pass;
    std::cout << j.dump(2) << "\n";
    return all_pass ? 0 : 1;
}

int cmd_spectrum(const std::string& graph_path, const std::string& method, double tol,
                 int max_iter) {
    tfreg::Graph g = tfreg::read_edge_list(graph_path);
    tfreg::EigMethod m = method == "dense" ? tfreg::EigMethod::dense : tfreg::EigMethod::lanczos;
    tfreg::SpectralReport rep = tfreg::spectral_lambda(g, m, tol, max_iter,
                                                       tfreg::threads_from_env());
    ordered_json j;
    j["command"] = "spectrum";
    j["graph"] = graph_path;
    j["n"] = g.vertex_count();
    j["edges"] = g.edge_count();
    j["method"] = method;
    j["lambda"] = rep.lambda;
    j["residual"] = rep.residual;
    j["iterations"] = rep.iterations;
    j["tolerance"] = rep.tolerance;
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified triangle-free regular graph toolkit"};
    app.require_subcommand(1);
    std::function<int()> run;

    auto* b = app.add_subcommand("build-alon", "build the triangle-free Cayley base graph");
    {
        auto k = std::make_shared<int>(0);
        auto out = std::make_shared<std::string>();
        auto gens = std::make_shared<std::string>();
        b->add_option("--k", *k, "field parameter (2,4,5,7,8)")->required();
        b->add_option("--out", *out, "output edge-list path")->required();
        b->add_option("--dump-generators", *gens, "write the generator set to this path");
        b->callback([&run, k, out, gens] {
            run = [k, out, gens] { return cmd_build_alon(*k, *out, *gens); };
        });
    }

    auto* s = app.add_subcommand("synth", "synthesize a certified regular triangle-free graph");
    {
        auto n = std::make_shared<std::int64_t>(0);
        auto seed = std::make_shared<std::uint64_t>(0);
        auto profile = std::make_shared<std::string>();
        auto sets = std::make_shared<std::vector<std::string>>();
        auto out = std::make_shared<std::string>();
        auto cert = std::make_shared<std::string>();
        s->add_option("--n", *n, "target vertex count")->required();
        s->add_option("--seed", *seed, "master seed")->required();
        s->add_option("--profile", *profile, "parameter profile")
            ->required()
            ->check(CLI::IsMember({"paper", "desk"}));
        s->add_option("--set", *sets, "override a plan/sponge parameter (key=value)");
        s->add_option("--out", *out, "output edge-list path")->required();
        s->add_option("--cert", *cert, "output certificate path (JSON)")->required();
        s->callback([&run, n, seed, profile, sets, out, cert] {
            run = [n, seed, profile, sets, out, cert] {
                return cmd_synth(*n, *seed, *profile, *sets, *out, *cert);
            };
        });
    }

    auto* v = app.add_subcommand("verify", "check claims about a graph file");
    {
        auto graph = std::make_shared<std::string>();
        auto reg = std::make_shared<std::int64_t>(0);
        auto tfree = std::make_shared<bool>(false);
        auto lb = std::make_shared<double>(0.0);
        auto tol = std::make_shared<double>(1e-6);
        v->add_option("--graph", *graph, "edge-list path")->required();
        auto* reg_opt = v->add_option("--expect-regular", *reg, "require this exact degree");
        v->add_flag("--expect-triangle-free", *tfree, "require zero triangles");
        auto* lb_opt = v->add_option("--lambda-bound", *lb, "require lambda at most this");
        v->add_option("--tol", *tol, "eigensolver tolerance");
        v->callback([&run, graph, reg, tfree, lb, tol, reg_opt, lb_opt] {
            bool has_reg = reg_opt->count() > 0;
            bool has_lb = lb_opt->count() > 0;
            run = [graph, reg, tfree, lb, tol, has_reg, has_lb] {
                return cmd_verify(*graph, has_reg, *reg, *tfree, has_lb, *lb, *tol);
            };
        });
    }

    auto* sp = app.add_subcommand("spectrum", "compute lambda = max(|l2|, |ln|)");
    {
        auto graph = std::make_shared<std::string>();
        auto method = std::make_shared<std::string>();
        auto tol = std::make_shared<double>(1e-6);
        auto max_iter = std::make_shared<int>(0);
        sp->add_option("--graph", *graph, "edge-list path")->required();
        sp->add_option("--method", *method, "eigensolver")
            ->required()
            ->check(CLI::IsMember({"dense", "lanczos"}));
        sp->add_option("--tol", *tol, "relative residual tolerance");
        sp->add_option("--max-iter", *max_iter, "lanczos iteration cap (0 = default)");
        sp->callback([&run, graph, method, tol, max_iter] {
            run = [graph, method, tol, max_iter] {
                return cmd_spectrum(*graph, *method, *tol, *max_iter);
            };
        });
    }

    try {
        app.parse(argc, argv);
        return run ? run() : 3;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    } catch (const tfreg::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const tfreg::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const tfreg::ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
