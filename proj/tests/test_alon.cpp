#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <unordered_set>

#include "helpers.hpp"
#include "tfreg/alon.hpp"
#include "tfreg/spectral.hpp"

using namespace tfreg;
using namespace testutil;

TEST_CASE("parameter formulas") {
    AlonSpec s2 = alon_spec(2);
    CHECK(s2.n == 64);
    CHECK(s2.d == 2);
    AlonSpec s4 = alon_spec(4);
    CHECK(s4.n == 4096);
    CHECK(s4.d == 56);
    CHECK(s4.lambda_bound == doctest::Approx(156.25));
    AlonSpec s5 = alon_spec(5);
    CHECK(s5.n == 32768);
    CHECK(s5.d == 240);
    CHECK(s5.lambda_bound == doctest::Approx(9.0 * 32 + 3.0 * std::pow(2.0, 2.5) + 0.25));
    CHECK(alon_lambda_bound(5) < 305.221);
    CHECK(alon_lambda_bound(5) > 305.220);
}

TEST_CASE("generator sets are distinct, nonzero, and triple-free") {
    for (int k : {2, 4, 5}) {
        FieldCtx ctx(k);
        std::vector<std::uint64_t> gens = generator_set(ctx);
        AlonSpec spec = alon_spec(k);
        REQUIRE(static_cast<std::int64_t>(gens.size()) == spec.d);
        std::unordered_set<std::uint64_t> seen;
        for (std::uint64_t g : gens) {
            REQUIRE(g != 0);
            REQUIRE(g < (std::uint64_t{1} << (3 * k)));
            REQUIRE(seen.insert(g).second);
        }
        // no three generators may cancel: a triangle in the Cayley graph is
        // exactly a zero-sum triple
        for (std::size_t i = 0; i < gens.size(); ++i)
            for (std::size_t j = i + 1; j < gens.size(); ++j)
                REQUIRE(!seen.count(gens[i] ^ gens[j]));
    }
}

TEST_CASE("unsupported parameters are rejected") {
    CHECK_THROWS_AS(generator_set(FieldCtx(1)), ContractError);
    CHECK_THROWS_AS(generator_set(FieldCtx(3)), ContractError);
    CHECK_THROWS_AS(generator_set(FieldCtx(6)), ContractError);
    CHECK_THROWS_AS(build_alon(0), ContractError);
    CHECK_THROWS_AS(build_alon(1), ContractError);
    CHECK_THROWS_AS(build_alon(3), ContractError);
    CHECK_THROWS_AS(build_alon(6), ContractError);
    CHECK_THROWS_AS(build_alon(9), ContractError);
    CHECK_THROWS_AS(build_alon(16), ContractError);
}

TEST_CASE("k=2 graph: 64 vertices, 2-regular, triangle-free") {
    AlonGraph a = build_alon(2);
    CHECK(a.graph.vertex_count() == 64);
    CHECK(a.spec.d == 2);
    CHECK(is_regular(a.graph, 2));
    CHECK(a.graph.edge_count() == 64);
    CHECK(triangle_count(a.graph) == 0);
    SpectralReport rep = spectral_lambda(a.graph, EigMethod::dense);
    CHECK(rep.lambda <= a.spec.lambda_bound);
}

TEST_CASE("k=4 graph: adjacency is generator translation") {
    AlonGraph a = build_alon(4);
    CHECK(a.graph.vertex_count() == 4096);
    CHECK(is_regular(a.graph, 56));
    CHECK(a.graph.edge_count() == 4096 * 56 / 2);
    CHECK(triangle_count(a.graph) == 0);

    FieldCtx ctx(4);
    std::vector<std::uint64_t> gens = generator_set(ctx);
    auto nb0 = a.graph.neighbors(0);
    REQUIRE(nb0.size() == gens.size());
    for (std::size_t i = 0; i < gens.size(); ++i)
        CHECK(static_cast<std::uint64_t>(nb0[i]) == gens[i]);
    // translation invariance spot check at an arbitrary vertex
    const Vertex v = 1234;
    for (std::uint64_t g : gens)
        CHECK(a.graph.has_edge(v, static_cast<Vertex>(static_cast<std::uint64_t>(v) ^ g)));

    CHECK(is_connected(a.graph));
    CHECK_FALSE(is_bipartite(a.graph));
}

TEST_CASE("k=4 lambda sits between the second-moment floor and the closed-form bound") {
    AlonGraph a = build_alon(4);
    SpectralReport rep = spectral_lambda(a.graph, EigMethod::lanczos, 1e-8);
    const double floor = std::sqrt(56.0 * (4096.0 - 56.0) / (4096.0 - 1.0));
    CHECK(rep.lambda >= floor - 1e-6);
    CHECK(rep.lambda <= a.spec.lambda_bound);
    CHECK(rep.residual <= rep.tolerance);
}

TEST_CASE("k=5 graph: 32768 vertices, 240-regular, triangle-free, lambda within bound") {
    AlonGraph a = build_alon(5);
    CHECK(a.graph.vertex_count() == 32768);
    CHECK(is_regular(a.graph, 240));
    CHECK(triangle_count(a.graph) == 0);
    CHECK(is_connected(a.graph));
    CHECK_FALSE(is_bipartite(a.graph));
    SpectralReport rep = spectral_lambda(a.graph, EigMethod::lanczos, 1e-6);
    CHECK(rep.lambda <= a.spec.lambda_bound);
    CHECK(rep.residual <= 1e-6 * 240.0);
}

TEST_CASE("generator dump format") {
    FieldCtx ctx(2);
    std::vector<std::uint64_t> gens = generator_set(ctx);
    std::ostringstream out;
    write_generator_dump(out, 2, gens);
    std::istringstream in(out.str());
    int k = 0;
    in >> k;
    CHECK(k == 2);
    std::uint64_t prev = 0;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        std::string hex;
        in >> hex;
        std::uint64_t val = std::stoull(hex, nullptr, 16);
        CHECK(val == gens[i]);
        if (i) CHECK(val > prev);
        prev = val;
    }
    std::string extra;
    CHECK_FALSE(static_cast<bool>(in >> extra));
}
