#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "tfreg/errors.hpp"
#include "tfreg/graph.hpp"
#include "tfreg/rng.hpp"

namespace tfreg {

enum class EigMethod { dense, lanczos };

// lambda is max(|second largest eigenvalue|, |smallest eigenvalue|) of the
// adjacency matrix. residual is an absolute certificate: for lanczos it is
// the measured ||A x - lambda x|| of the reported Ritz pair; for dense it is
// a machine-precision backward-error scale. tolerance is the absolute
// residual target (tol * max(d,1)); residual <= tolerance on success.
struct SpectralReport {
    double lambda = 0.0;
    EigMethod method = EigMethod::dense;
    double residual = 0.0;
    int iterations = 0;
    double tolerance = 0.0;
};

inline int threads_from_env() {
    const char* s = std::getenv("TFREG_THREADS");
    if (!s) return 1;
    int v = std::atoi(s);
    return v >= 1 ? v : 1;
}

namespace detail {

// y = A x, rows in fixed ascending order so every entry is reproducible
// bit-for-bit; threads split the row range, which does not change any sum.
inline void adj_matvec(const Graph& g, const std::vector<double>& x,
                       std::vector<double>& y, int threads) {
    const Vertex n = g.vertex_count();
    auto work = [&](Vertex lo, Vertex hi) {
        for (Vertex v = lo; v < hi; ++v) {
            double acc = 0.0;
            for (Vertex w : g.neighbors(v)) acc += x[static_cast<std::size_t>(w)];
            y[static_cast<std::size_t>(v)] = acc;
        }
    };
    if (threads <= 1 || n < 2048) {
        work(0, n);
        return;
    }
    threads = std::min<int>(threads, std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    Vertex chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        Vertex lo = t * chunk;
        Vertex hi = std::min<Vertex>(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double c, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

// remove the all-ones component
inline void deflate_ones(std::vector<double>& x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (double& v : x) v -= mean;
}

inline SpectralReport lambda_dense(const Graph& g, double tol) {
    const Vertex n = g.vertex_count();
    if (n > 4096)
        throw ContractError("spectral: dense method limited to n <= 4096, got " +
                            std::to_string(n));
    SpectralReport rep;
    rep.method = EigMethod::dense;
    rep.iterations = 1;
    const std::int64_t maxdeg = n ? degree_stats(g).max : 0;
    rep.tolerance = tol * static_cast<double>(std::max<std::int64_t>(maxdeg, 1));
    rep.residual = std::numeric_limits<double>::epsilon() *
                   static_cast<double>(maxdeg + 1) * std::sqrt(static_cast<double>(std::max<Vertex>(n, 1)));
    if (n < 2) {
        rep.lambda = 0.0;
        return rep;
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Vertex v = 0; v < n; ++v)
        for (Vertex w : g.neighbors(v)) a(v, w) = 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw ContractError("spectral: dense eigensolver failed to converge");
    const auto& ev = es.eigenvalues();  // ascending
    rep.lambda = std::max(std::abs(ev(n - 2)), std::abs(ev(0)));
    if (rep.residual > rep.tolerance)
        throw ContractError("spectral: dense residual exceeds tolerance");
    return rep;
}

inline SpectralReport lambda_lanczos(const Graph& g, double tol, int max_iter, int threads) {
    const Vertex n = g.vertex_count();
    DegreeStats ds = degree_stats(g);
    if (n > 0 && ds.min != ds.max)
        throw ContractError("spectral: lanczos requires a regular graph (degrees " +
                            std::to_string(ds.min) + ".." + std::to_string(ds.max) + ")");
    const std::int64_t d = n ? ds.max : 0;
    SpectralReport rep;
    rep.method = EigMethod::lanczos;
    rep.tolerance = tol * static_cast<double>(std::max<std::int64_t>(d, 1));
    if (n < 2 || d == 0) {
        rep.lambda = 0.0;
        return rep;
    }
    if (max_iter <= 0)
        max_iter = static_cast<int>(10.0 * std::sqrt(static_cast<double>(n))) + 10;
    max_iter = std::min<int>(max_iter, n);  // Krylov dimension cannot exceed n

    const std::size_t sn = static_cast<std::size_t>(n);
    std::vector<std::vector<double>> basis;
    std::vector<double> alphas, betas;
    std::vector<double> v(sn), w(sn), vprev(sn, 0.0);

    // fixed-seed start vector: deterministic and almost surely not
    // orthogonal to the wanted eigenvectors
    std::mt19937_64 rng(0x7fb5d329728ea185ULL);
    for (double& x : v) x = static_cast<double>(uniform_below(rng, 1u << 20)) - (1u << 19);
    deflate_ones(v);
    double nv = norm(v);
    if (nv == 0.0) throw ContractError("spectral: degenerate start vector");
    for (double& x : v) x /= nv;
    basis.push_back(v);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    double beta_prev = 0.0;
    auto final_report = [&](int mm, double theta_top, double theta_bot,
                            const Eigen::MatrixXd& vecs, int itop, int ibot) {
        // materialize both extreme Ritz vectors and measure true residuals
        std::vector<double> ytop(sn, 0.0), ybot(sn, 0.0);
        for (int j = 0; j < mm; ++j) {
            axpy(vecs(j, itop), basis[static_cast<std::size_t>(j)], ytop);
            axpy(vecs(j, ibot), basis[static_cast<std::size_t>(j)], ybot);
        }
        auto resid = [&](std::vector<double>& y, double theta) {
            double ny = norm(y);
            if (ny == 0.0) return 0.0;
            for (double& x : y) x /= ny;
            std::vector<double> ay(sn);
            adj_matvec(g, y, ay, threads);
            axpy(-theta, y, ay);
            return norm(ay);
        };
        double rtop = resid(ytop, theta_top);
        double rbot = resid(ybot, theta_bot);
        rep.lambda = std::max(std::abs(theta_top), std::abs(theta_bot));
        rep.residual = std::max(rtop, rbot);
        rep.iterations = mm;
    };

    for (int it = 0; it < max_iter; ++it) {
        adj_matvec(g, basis.back(), w, threads);
        deflate_ones(w);
        if (it > 0) axpy(-beta_prev, vprev, w);
        double alpha = dot(basis.back(), w);
        axpy(-alpha, basis.back(), w);
        alphas.push_back(alpha);
        // full reorthogonalization, two classical Gram-Schmidt sweeps
        for (int sweep = 0; sweep < 2; ++sweep)
            for (const auto& b : basis) axpy(-dot(b, w), b, w);
        double beta = norm(w);
        const int m = static_cast<int>(alphas.size());

        bool check_now = (m >= 2 && (m <= 128 || m % 8 == 0)) || beta < 1e-12 || it == max_iter - 1;
        if (check_now) {
            Eigen::VectorXd diag(m), sub(std::max(m - 1, 1));
            for (int j = 0; j < m; ++j) diag(j) = alphas[static_cast<std::size_t>(j)];
            for (int j = 0; j + 1 < m; ++j) sub(j) = betas[static_cast<std::size_t>(j)];
            if (m == 1) {
                if (beta < 1e-12) {
                    rep.lambda = std::abs(diag(0));
                    rep.residual = beta;
                    rep.iterations = 1;
                    return rep;
                }
            } else {
                es.computeFromTridiagonal(diag, sub.head(m - 1), Eigen::ComputeEigenvectors);
                if (es.info() != Eigen::Success)
                    throw ContractError("spectral: tridiagonal eigensolver failed");
                const auto& th = es.eigenvalues();
                const auto& vecs = es.eigenvectors();
                int itop = m - 1, ibot = 0;
                double rtop = beta * std::abs(vecs(m - 1, itop));
                double rbot = beta * std::abs(vecs(m - 1, ibot));
                if (std::max(rtop, rbot) <= rep.tolerance * 0.5 || beta < 1e-12 ||
                    it == max_iter - 1) {
                    final_report(m, th(itop), th(ibot), vecs, itop, ibot);
                    if (rep.residual <= rep.tolerance) return rep;
                    if (beta < 1e-12)
                        throw ContractError("spectral: lanczos invariant subspace with residual " +
                                            std::to_string(rep.residual) + " above tolerance");
                }
            }
        }
        if (static_cast<int>(alphas.size()) >= max_iter || beta < 1e-12) break;
        betas.push_back(beta);
        vprev = basis.back();
        std::vector<double> next(sn);
        for (std::size_t i = 0; i < sn; ++i) next[i] = w[i] / beta;
        basis.push_back(std::move(next));
    }
    throw ContractError("spectral: lanczos did not converge within " +
                        std::to_string(max_iter) + " iterations (residual " +
                        std::to_string(rep.residual) + ", tolerance " +
                        std::to_string(rep.tolerance) + ")");
}

}  // namespace detail

inline SpectralReport spectral_lambda(const Graph& g, EigMethod method, double tol = 1e-6,
                                      int max_iter = 0, int threads = 1) {
    if (tol <= 0) throw ContractError("spectral: tolerance must be positive");
    if (method == EigMethod::dense) return detail::lambda_dense(g, tol);
    return detail::lambda_lanczos(g, tol, max_iter, threads);
}

// Expander-mixing audit for a d-regular graph: how far e(S,T) sits from its
// density expectation, as a fraction of the lambda * sqrt(|S||T|) allowance.
struct MixingDeviation {
    std::int64_t e_st = 0;
    double expected = 0.0;
    double deviation = 0.0;
    double bound_ratio = 0.0;
};

inline MixingDeviation mixing_deviation(const Graph& g, const VertexSet& s,
                                        const VertexSet& t, double lambda) {
    DegreeStats ds = degree_stats(g);
    if (g.vertex_count() > 0 && ds.min != ds.max)
        throw ContractError("mixing_deviation: graph must be regular");
    MixingDeviation md;
    md.e_st = ordered_edge_pairs(g, s, t);
    const double n = static_cast<double>(g.vertex_count());
    const double d = static_cast<double>(ds.max);
    const double st = static_cast<double>(s.size()) * static_cast<double>(t.size());
    md.expected = n > 0 ? d / n * st : 0.0;
    md.deviation = std::abs(static_cast<double>(md.e_st) - md.expected);
    const double denom = lambda * std::sqrt(st);
    if (denom > 0)
        md.bound_ratio = md.deviation / denom;
    else
        md.bound_ratio = md.deviation == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return md;
}

// Additive degradation rule for deleting a subgraph of max degree delta_f
// from a pseudorandom graph: both quality parameters worsen by delta_f.
struct JumbledBounds {
    double lambda = 0.0;
    double beta = 0.0;
};

inline JumbledBounds deletion_bounds(const JumbledBounds& base, std::int64_t delta_f) {
    if (delta_f < 0) throw ContractError("deletion_bounds: delta_f must be nonnegative");
    return {base.lambda + static_cast<double>(delta_f),
            base.beta + static_cast<double>(delta_f)};
}

}  // namespace tfreg
