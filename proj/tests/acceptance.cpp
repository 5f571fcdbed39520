// Acceptance gate: runs every shipped criterion end to end through the CLI
// and the library, printing one PASS/FAIL line per criterion. Exit code is
// the number of failed criteria. Tolerances are pinned here, not configurable.

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "tfreg/alon.hpp"
#include "tfreg/gf2k.hpp"
#include "tfreg/graph.hpp"
#include "tfreg/regularize.hpp"
#include "tfreg/spectral.hpp"
#include "tfreg/sponge.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tfreg;
using namespace testutil;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name;
    if (!detail.empty()) std::cout << ": " << detail;
    std::cout << "\n" << std::flush;
    if (!ok) ++failures;
}

std::string fmt(double x, int prec) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(prec) << x;
    return ss.str();
}

double secs(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const fs::path& work_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("tfreg_acceptance_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out = work_dir() / ("stdout_" + std::to_string(counter++) + ".txt");
    const std::string cmd =
        std::string(TFREG_BIN) + " " + args + " > " + out.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    return r;
}

void demand(bool cond, const std::string& what) {
    if (!cond) throw std::runtime_error(what);
}

using Outcome = std::pair<bool, std::string>;

void criterion(const std::string& name, const std::function<Outcome()>& body) {
    try {
        Outcome o = body();
        report(name, o.first, o.second);
    } catch (const std::exception& e) {
        report(name, false, std::string("exception: ") + e.what());
    }
}

// suites under criterion 4 share a 120-second per-suite budget
void suite(const std::string& name, const std::function<std::string()>& body) {
    criterion(name, [&]() -> Outcome {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail = body();
        const double el = secs(t0);
        return {el < 120.0, detail + " (" + fmt(el, 1) + "s)"};
    });
}

const AlonGraph& alon4() {
    static AlonGraph a = build_alon(4);
    return a;
}

Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path g4 = work_dir() / "alon_k4.txt";
    RunResult b = run_cli("build-alon --k 4 --out " + g4.string());
    demand(b.code == 0, "build-alon exited " + std::to_string(b.code));
    json bj = json::parse(b.out);
    demand(bj["N"] == 4096 && bj["D"] == 56, "unexpected base parameters");

    RunResult v = run_cli("verify --graph " + g4.string() +
                          " --expect-regular 56 --expect-triangle-free");
    demand(v.code == 0, "verify exited " + std::to_string(v.code));

    RunResult sp = run_cli("spectrum --graph " + g4.string() + " --method dense");
    demand(sp.code == 0, "spectrum exited " + std::to_string(sp.code));
    const double lam = json::parse(sp.out)["lambda"].get<double>();
    const double floor_lam = std::sqrt(56.0 * 4040.0 / 4095.0);
    const double el = secs(t0);
    const bool ok = lam >= floor_lam - 1e-6 && lam <= 156.25 + 1e-6 && el < 60.0;
    return {ok, "lambda=" + fmt(lam, 6) + " in [" + fmt(floor_lam, 2) + ", 156.25], " +
                    fmt(el, 1) + "s"};
}

Outcome criterion2() {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path g5 = work_dir() / "alon_k5.txt";
    RunResult b = run_cli("build-alon --k 5 --out " + g5.string());
    demand(b.code == 0, "build-alon exited " + std::to_string(b.code));
    json bj = json::parse(b.out);
    demand(bj["N"] == 32768 && bj["D"] == 240, "unexpected base parameters");
    const double lam = bj["lambda"]["computed"].get<double>();
    const double residual = bj["lambda"]["residual"].get<double>();

    RunResult v = run_cli("verify --graph " + g5.string() +
                          " --expect-regular 240 --expect-triangle-free");
    demand(v.code == 0, "verify exited " + std::to_string(v.code));

    const double el = secs(t0);
    const bool ok = lam <= 305.22 && residual <= 1e-6 * 240.0 && el < 600.0;
    return {ok, "lambda=" + fmt(lam, 6) + " residual=" + fmt(residual, 9) + ", " +
                    fmt(el, 1) + "s"};
}

struct SynthConfig {
    std::int64_t n;
    std::uint64_t seed;
};

const std::vector<SynthConfig>& synth_grid() {
    static std::vector<SynthConfig> grid = [] {
        std::vector<SynthConfig> g;
        for (std::int64_t n : {3000, 3500, 4000})
            for (std::uint64_t seed : {1, 2, 3}) g.push_back({n, seed});
        return g;
    }();
    return grid;
}

std::string synth_tag(const SynthConfig& c) {
    return std::to_string(c.n) + "_" + std::to_string(c.seed);
}

RunResult run_synth(const SynthConfig& c, const fs::path& g, const fs::path& cert) {
    return run_cli("synth --n " + std::to_string(c.n) + " --seed " +
                   std::to_string(c.seed) + " --profile desk --out " + g.string() +
                   " --cert " + cert.string());
}

Outcome criterion3() {
    bool all = true;
    for (const SynthConfig& c : synth_grid()) {
        const auto t0 = std::chrono::steady_clock::now();
        const fs::path g = work_dir() / ("synth_" + synth_tag(c) + ".txt");
        const fs::path cp = work_dir() / ("synth_" + synth_tag(c) + ".json");
        RunResult r = run_synth(c, g, cp);
        if (r.code != 0) {
            std::cout << "  info: n=" << c.n << " seed=" << c.seed << " synth exited "
                      << r.code << "\n" << std::flush;
            all = false;
            continue;
        }
        json cert = json::parse(slurp(cp));
        bool inst = cert["regular"] == true && cert["triangle_count"] == 0;
        const std::int64_t dp = cert["d_prime"].get<std::int64_t>();
        const double chain = cert["lambda_base"]["computed"].get<double>() +
                             cert["max_deleted_degree"].get<double>() + 1e-6;
        RunResult v = run_cli("verify --graph " + g.string() + " --expect-regular " +
                              std::to_string(dp) + " --expect-triangle-free" +
                              " --lambda-bound " + fmt(chain, 9));
        inst = inst && v.code == 0;
        const double el = secs(t0);
        inst = inst && el < 900.0;
        std::cout << "  info: n=" << c.n << " seed=" << c.seed << " d_prime=" << dp
                  << " lambda=" << fmt(cert["lambda_final"]["computed"].get<double>(), 4)
                  << " d_over_n23=" << fmt(cert["headline"]["d_over_n23"].get<double>(), 4)
                  << " lambda_over_sqrt_d_ln_n="
                  << fmt(cert["headline"]["lambda_over_sqrt_d_ln_n"].get<double>(), 4)
                  << " attempts=" << cert["attempts"].get<int>() << " ("
                  << fmt(el, 1) << "s)" << (inst ? "" : " [FAILED]") << "\n"
                  << std::flush;
        all = all && inst;
    }
    return {all, std::to_string(synth_grid().size()) + " instances"};
}

std::string suite_field_axioms() {
    for (int k = 1; k <= 8; ++k) {
        FieldCtx ctx(k);
        const std::uint32_t q = 1u << k;
        for (std::uint32_t a = 0; a < q; ++a) {
            demand(mul(ctx, a, 1) == a, "multiplicative identity");
            demand(mul(ctx, a, 0) == 0, "absorbing zero");
            if (a != 0)
                demand(mul(ctx, pow(ctx, a, q - 2), a) == 1, "inverse via pow(a, 2^k-2)");
        }
        for (std::uint32_t a = 0; a < q; ++a)
            for (std::uint32_t b = 0; b < q; ++b) {
                demand(mul(ctx, a, b) == mul(ctx, b, a), "commutativity");
                for (std::uint32_t c = 0; c < q; ++c) {
                    demand(mul(ctx, mul(ctx, a, b), c) == mul(ctx, a, mul(ctx, b, c)),
                           "associativity");
                    demand(mul(ctx, a, b ^ c) == (mul(ctx, a, b) ^ mul(ctx, a, c)),
                           "distributivity over xor");
                }
            }
    }
    return "k = 1..8 exhaustive";
}

std::string suite_triangle_brute() {
    std::mt19937_64 rng(1001);
    for (int trial = 0; trial < 1000; ++trial) {
        const Vertex n = 3 + static_cast<Vertex>(uniform_below(rng, 10));
        const double p = 0.1 + 0.08 * static_cast<double>(uniform_below(rng, 11));
        Graph g = random_graph(n, p, rng);
        demand(triangle_count(g) == brute_triangle_count(g),
               "triangle count disagrees with brute force");
    }
    return "1000 random graphs, n <= 12";
}

std::string suite_lanczos_vs_dense() {
    std::mt19937_64 rng(1002);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        Vertex n = 8 + static_cast<Vertex>(uniform_below(rng, 504));
        const std::int64_t d = 3 + static_cast<std::int64_t>(uniform_below(rng, 6));
        if ((static_cast<std::int64_t>(n) * d) % 2 != 0) ++n;
        Graph g = random_regular(n, d, rng);
        const double dense = spectral_lambda(g, EigMethod::dense).lambda;
        const double lanc = spectral_lambda(g, EigMethod::lanczos, 1e-10).lambda;
        worst = std::max(worst, std::abs(dense - lanc));
        demand(std::abs(dense - lanc) <= 1e-8, "lanczos disagrees with dense beyond 1e-8");
    }
    return "200 regular graphs, n <= 512, worst gap " + fmt(worst, 12);
}

std::string suite_mixing() {
    const Graph& g = alon4().graph;
    const double lam = spectral_lambda(g, EigMethod::lanczos, 1e-8).lambda;
    demand(lam <= alon4().spec.lambda_bound, "base lambda above its closed-form bound");
    std::mt19937_64 rng(1003);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        VertexSet s = sample_without_replacement(
            4096, 1 + static_cast<std::int64_t>(uniform_below(rng, 512)), rng);
        VertexSet t = sample_without_replacement(
            4096, 1 + static_cast<std::int64_t>(uniform_below(rng, 512)), rng);
        MixingDeviation md = mixing_deviation(g, s, t, lam);
        worst = std::max(worst, md.bound_ratio);
        demand(md.bound_ratio <= 1.0 + 1e-9, "mixing bound violated");
    }
    return "1000 pairs, worst bound_ratio " + fmt(worst, 4);
}

std::string suite_parity() {
    std::mt19937_64 rng(1004);
    for (int trial = 0; trial < 1000; ++trial) {
        const Vertex n = 2 + static_cast<Vertex>(uniform_below(rng, 49));
        Graph tree = random_tree(n, rng);
        std::vector<std::uint8_t> target(static_cast<std::size_t>(n), 0);
        int ones = 0;
        for (Vertex v = 0; v < n; ++v) {
            target[static_cast<std::size_t>(v)] =
                static_cast<std::uint8_t>(uniform_below(rng, 2));
            ones += target[static_cast<std::size_t>(v)];
        }
        if (ones % 2 != 0) target[0] ^= 1;
        Graph sub = parity_subgraph(tree, target);
        for (Vertex v = 0; v < n; ++v)
            demand((sub.degree(v) & 1) == target[static_cast<std::size_t>(v)],
                   "parity mismatch");
        for (const Edge& e : sub.edges())
            demand(tree.has_edge(e.first, e.second), "edge outside the tree");
    }
    return "1000 random trees";
}

bool prescribe_oracle(const Graph& g1, const VertexSet& w,
                      const std::vector<std::int64_t>& h, std::int64_t cap) {
    std::vector<std::int64_t> used(static_cast<std::size_t>(g1.vertex_count()), 0);
    std::function<bool(std::size_t)> place = [&](std::size_t i) -> bool {
        if (i == w.size()) return true;
        const Vertex x = w[i];
        auto nb = g1.neighbors(x);
        const std::int64_t need = h[static_cast<std::size_t>(x)];
        if (need > static_cast<std::int64_t>(nb.size())) return false;
        std::function<bool(std::size_t, std::int64_t)> pick =
            [&](std::size_t start, std::int64_t left) -> bool {
            if (left == 0) return place(i + 1);
            for (std::size_t j = start; j + static_cast<std::size_t>(left) <= nb.size(); ++j) {
                const Vertex y = nb[j];
                if (used[static_cast<std::size_t>(y)] >= cap) continue;
                ++used[static_cast<std::size_t>(y)];
                if (pick(j + 1, left - 1)) return true;
                --used[static_cast<std::size_t>(y)];
            }
            return false;
        };
        return pick(0, need);
    };
    return place(0);
}

std::string suite_prescribed() {
    std::mt19937_64 rng(1005);
    int feasible_seen = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const Vertex n = 4 + static_cast<Vertex>(uniform_below(rng, 9));
        const std::size_t wcount = 1 + uniform_below(rng, 3);
        VertexSet w;
        for (std::size_t i = 0; i < wcount && static_cast<Vertex>(i) < n; ++i)
            w.push_back(static_cast<Vertex>(i));
        std::vector<Edge> edges;
        for (Vertex x : w)
            for (Vertex y = static_cast<Vertex>(wcount); y < n; ++y)
                if (uniform_below(rng, 2)) edges.push_back({x, y});
        for (Vertex u = static_cast<Vertex>(wcount); u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v)
                if (uniform_below(rng, 4) == 0) edges.push_back({u, v});
        Graph g1 = Graph::from_edges(n, std::move(edges));
        std::vector<std::int64_t> h(static_cast<std::size_t>(n), 0);
        for (Vertex x : w)
            h[static_cast<std::size_t>(x)] = static_cast<std::int64_t>(uniform_below(rng, 3));
        const std::int64_t cap = 1 + static_cast<std::int64_t>(uniform_below(rng, 2));

        const bool expect = prescribe_oracle(g1, w, h, cap);
        bool got = true;
        try {
            Graph f = prescribed_subgraph(g1, w, h, cap);
            for (Vertex x : w)
                demand(f.degree(x) == h[static_cast<std::size_t>(x)], "wrong degree on w");
            for (Vertex v = static_cast<Vertex>(wcount); v < n; ++v)
                demand(f.degree(v) <= cap, "cap exceeded");
        } catch (const InfeasibleError&) {
            got = false;
        }
        demand(got == expect, "feasibility decision disagrees with exhaustive search");
        if (expect) ++feasible_seen;
    }
    return "500 instances, " + std::to_string(feasible_seen) + " feasible";
}

std::string suite_sponge_identity() {
    Plan pl = make_plan(3500, Profile::desk);
    SampleResult s = sample_subset(alon4().graph, pl, 1);
    Graph host = induced(alon4().graph, s.x).graph;
    Sponge sp = build_sponge(host, sponge_config_for(pl), 7);
    std::mt19937_64 rng(1006);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::int64_t> f(static_cast<std::size_t>(host.vertex_count()));
        for (Vertex v = 0; v < host.vertex_count(); ++v)
            f[static_cast<std::size_t>(v)] = static_cast<std::int64_t>(uniform_below(
                rng, sp.collections[static_cast<std::size_t>(v)].size() + 1));
        Graph h = sponge_reduce(sp, f);
        for (Vertex v = 0; v < host.vertex_count(); ++v)
            demand(h.degree(v) == sp.s.degree(v) - 2 * f[static_cast<std::size_t>(v)],
                   "degree identity violated at vertex " + std::to_string(v));
    }
    return "100 selections over a " + std::to_string(host.vertex_count()) +
           "-vertex sponge";
}

std::string suite_trim_independence() {
    std::mt19937_64 rng(1007);
    for (int trial = 0; trial < 200; ++trial) {
        const Vertex n = 10 + static_cast<Vertex>(uniform_below(rng, 31));
        Graph g0 = random_graph(n, 0.3, rng);
        std::vector<Edge> sedges;
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v)
                if (!g0.has_edge(u, v) && uniform_below(rng, 10) == 0)
                    sedges.push_back({u, v});
        Graph s = Graph::from_edges(n, std::move(sedges));
        std::int64_t mindeg = g0.degree(0) + s.degree(0);
        for (Vertex v = 0; v < n; ++v)
            mindeg = std::min(mindeg, g0.degree(v) + s.degree(v));
        const std::int64_t delta = std::max<std::int64_t>(
            0, mindeg - static_cast<std::int64_t>(uniform_below(rng, 3)));
        TrimResult t = trim_excess(g0, s, delta);
        demand(is_independent(t.g1, t.w), "leftover set is not independent");
        for (Vertex v = 0; v < n; ++v)
            demand(t.g1.degree(v) + s.degree(v) >= delta, "degree fell below delta");
    }
    return "200 instances";
}

Outcome criterion5() {
    bool all = true;
    std::string note;
    for (const SynthConfig& c : synth_grid()) {
        const fs::path g1 = work_dir() / ("synth_" + synth_tag(c) + ".txt");
        const fs::path c1 = work_dir() / ("synth_" + synth_tag(c) + ".json");
        const fs::path g2 = work_dir() / ("synth_" + synth_tag(c) + "_rerun.txt");
        const fs::path c2 = work_dir() / ("synth_" + synth_tag(c) + "_rerun.json");
        RunResult r = run_synth(c, g2, c2);
        if (r.code != 0 || !fs::exists(g1) || !fs::exists(c1)) {
            all = false;
            note = "rerun failed for n=" + std::to_string(c.n) +
                   " seed=" + std::to_string(c.seed);
            continue;
        }
        if (slurp(g1) != slurp(g2)) {
            all = false;
            note = "graph bytes differ for n=" + std::to_string(c.n) +
                   " seed=" + std::to_string(c.seed);
            continue;
        }
        json a = json::parse(slurp(c1));
        json b = json::parse(slurp(c2));
        a.erase("timing");
        b.erase("timing");
        if (a.dump() != b.dump()) {
            all = false;
            note = "certificates differ for n=" + std::to_string(c.n) +
                   " seed=" + std::to_string(c.seed);
        }
    }
    if (all) note = "9 reruns byte-identical (certificates compared without timing)";
    return {all, note};
}

}  // namespace

int main() {
    std::cout << "artifacts: " << work_dir().string() << "\n" << std::flush;
    criterion("criterion 1 (k=4 base graph)", criterion1);
    criterion("criterion 2 (k=5 base graph)", criterion2);
    criterion("criterion 3 (desk synthesis grid)", criterion3);
    suite("criterion 4a (field axioms)", suite_field_axioms);
    suite("criterion 4b (triangle count vs brute force)", suite_triangle_brute);
    suite("criterion 4c (lanczos vs dense)", suite_lanczos_vs_dense);
    suite("criterion 4d (expander mixing)", suite_mixing);
    suite("criterion 4e (tree parity)", suite_parity);
    suite("criterion 4f (prescribed degrees vs exhaustive)", suite_prescribed);
    suite("criterion 4g (sponge degree identity)", suite_sponge_identity);
    suite("criterion 4h (trim independence)", suite_trim_independence);
    criterion("criterion 5 (determinism)", criterion5);
    return failures;
}
