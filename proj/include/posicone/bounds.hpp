#pragma once

// Positivity-bound checks for M in W*: elastic bounds M(a (x) b, a (x) b) >= 0,
// sampled inelastic bounds from the third family of extremal rays, and scans
// over two-parameter slices of coefficient space.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "posicone/optimize.hpp"
#include "posicone/rays.hpp"
#include "posicone/spectra.hpp"
#include "posicone/tensor_space.hpp"

namespace posicone {

/// Max |2x2 minor| of u read as a 3x3 matrix (row-major); zero iff u = a (x) b.
inline double decomposable_residual(const Vec &u) {
    if (u.size() != 9) throw Error("decomposable_residual: expected 9 components");
    // u1..u9 in the listed order, 0-based here
    static constexpr int q[9][4] = {{0, 4, 1, 3}, {0, 5, 2, 3}, {0, 7, 1, 6}, {0, 8, 2, 6}, {1, 5, 2, 4},
                                    {1, 8, 2, 7}, {3, 7, 4, 6}, {3, 8, 5, 6}, {4, 8, 5, 7}};
    double r = 0;
    for (const auto &x : q) r = std::max(r, std::abs(u(x[0]) * u(x[1]) - u(x[2]) * u(x[3])));
    return r;
}

/// Q(b)_ik = sum_jl M_ijkl b_j b_l, so that M(a (x) b, a (x) b) = a^T Q(b) a.
inline Eigen::Matrix3d elastic_q(const WTensor &m, const Eigen::Vector3d &b) {
    if (m.n() != 3) throw Error("elastic bounds need three flavors");
    Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 3; ++i)
        for (int k = i; k < 3; ++k) {
            double s = 0;
            for (int j = 0; j < 3; ++j)
                for (int l = 0; l < 3; ++l) s += m(i, j, k, l) * b(j) * b(l);
            q(i, k) = q(k, i) = s;
        }
    return q;
}

inline double elastic_value(const WTensor &m, const Vec &alpha, const Vec &beta) {
    const int n = m.n();
    double s = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) s += m(i, j, k, l) * alpha(i) * beta(j) * alpha(k) * beta(l);
    return s;
}

/// sum_ij S_ijij, the normalizer for ray evaluations.
inline double gram_trace(const WTensor &s) {
    double t = 0;
    for (int i = 0; i < s.n(); ++i)
        for (int j = 0; j < s.n(); ++j) t += s(i, j, i, j);
    return t;
}

/// The element of W* with E(a (x) b, a (x) b) = |a|^2 |b|^2; pair(S, E) = gram_trace(S).
inline WTensor trace_form(int n = 3) {
    WTensor d(FlavorDim{n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d(i, j, i, j) = 1.0;
    return project_w(d);
}

// ---------------------------------------------------------------------------
// Elastic bounds.

enum class ElasticMethod { PolynomialGrid, SphereOptimizer };

inline const char *to_string(ElasticMethod m) {
    return m == ElasticMethod::PolynomialGrid ? "polynomial-grid" : "sphere-optimizer";
}

struct ElasticConfig {
    int theta_steps = 181; // polar samples on [0, pi/2]
    int phi_steps = 361;   // azimuthal samples on [0, 2 pi]
    int refine = 16;       // local minima refined
    int starts = 64;       // sphere optimizer starts
    std::uint64_t seed = 20240611;
    double tol = 1e-9;
};

struct ElasticReport {
    bool pass = false;
    double margin = 0;  // min of M(a (x) b, a (x) b) over unit a, b
    double scale = 0;   // Frobenius norm of M
    Vec alpha, beta;    // unit witness
    ElasticMethod method = ElasticMethod::PolynomialGrid;
    // Conditions of the determinantal form at the witness direction b:
    // the diagonal entries q1, q4, q6, the 2x2 minors and the 3x3 determinant of Q(b).
    std::array<double, 7> conditions{};
    double normalized() const { return scale > 0 ? margin / scale : margin; }
    WTensor witness_ray() const {
        const Eigen::Vector3d a = alpha, b = beta;
        if (a.cross(b).norm() < 1e-10) return ray_type1(alpha);
        return ray_type2(alpha, beta);
    }
};

namespace detail {

inline Eigen::Vector3d sphere_point(double theta, double phi) {
    return {std::cos(theta), std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi)};
}

inline std::array<double, 7> q_conditions(const Eigen::Matrix3d &q) {
    return {q(0, 0),
            q(1, 1),
            q(2, 2),
            q(0, 0) * q(1, 1) - q(0, 1) * q(0, 1),
            q(0, 0) * q(2, 2) - q(0, 2) * q(0, 2),
            q(1, 1) * q(2, 2) - q(1, 2) * q(1, 2),
            q.determinant()};
}

inline double lambda_min(const Eigen::Matrix3d &q) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
    es.computeDirect(q, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

struct GridMin {
    double value;
    double theta, phi;
};

// Local minima of a periodic-in-phi grid, lowest first, at most k of them.
inline std::vector<GridMin> grid_local_minima(const std::vector<double> &v, int nt, int np, double dt, double dp,
                                              int k) {
    std::vector<GridMin> mins;
    auto at = [&](int i, int j) { return v[static_cast<std::size_t>(i) * np + ((j + np) % np)]; };
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < np; ++j) {
            const double c = at(i, j);
            bool low = true;
            for (int di = -1; di <= 1 && low; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if ((di == 0 && dj == 0) || i + di < 0 || i + di >= nt) continue;
                    if (at(i + di, j + dj) < c) {
                        low = false;
                        break;
                    }
                }
            if (low) mins.push_back({c, i * dt, j * dp});
        }
    std::sort(mins.begin(), mins.end(), [](const GridMin &a, const GridMin &b) { return a.value < b.value; });
    if (static_cast<int>(mins.size()) > k) mins.resize(static_cast<std::size_t>(k));
    return mins;
}

inline ElasticReport finish_elastic(const WTensor &m, const Eigen::Vector3d &beta, ElasticMethod method,
                                    double tol) {
    const Eigen::Matrix3d q = elastic_q(m, beta);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(q);
    ElasticReport r;
    r.method = method;
    r.scale = m.frobenius();
    r.alpha = es.eigenvectors().col(0);
    r.beta = beta;
    r.margin = elastic_value(m, r.alpha, r.beta);
    r.conditions = q_conditions(q);
    r.pass = r.margin >= -tol * r.scale;
    return r;
}

} // namespace detail

/// Elastic bounds through the 3x3 form Q(b): M passes iff Q(b) is PSD for every direction b.
/// Directions b = (cos t, sin t cos p, sin t sin p) cover the closed hemisphere, so the
/// limits |t1|, |t2| -> infinity of the affine parametrization (1, t1, t2) are ordinary points.
inline ElasticReport elastic_margin_poly(const WTensor &m, const ElasticConfig &cfg = {}) {
    if (m.n() != 3) throw Error("elastic bounds need three flavors");
    const int nt = std::max(cfg.theta_steps, 2), np = std::max(cfg.phi_steps, 3);
    const double dt = (std::numbers::pi / 2) / (nt - 1), dp = 2 * std::numbers::pi / (np - 1);
    // the last phi column repeats the first; drop it for the periodic neighborhood test
    const int npp = np - 1;
    std::vector<double> v(static_cast<std::size_t>(nt) * npp);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < npp; ++j)
            v[static_cast<std::size_t>(i) * npp + j] = detail::lambda_min(elastic_q(m, detail::sphere_point(i * dt, j * dp)));

    auto obj = [&](const Vec &x) { return detail::lambda_min(elastic_q(m, detail::sphere_point(x(0), x(1)))); };
    double best = std::numeric_limits<double>::infinity();
    Eigen::Vector3d best_beta = Eigen::Vector3d::UnitX();
    NelderMeadOptions nm;
    nm.initial_step = 0.5 * dt + 0.5 * dp;
    nm.size_tol = 1e-10;
    for (const auto &g : detail::grid_local_minima(v, nt, npp, dt, dp, cfg.refine)) {
        if (g.value < best) {
            best = g.value;
            best_beta = detail::sphere_point(g.theta, g.phi);
        }
        Vec x0(2);
        x0 << g.theta, g.phi;
        const MinResult r = nelder_mead(obj, x0, nm);
        if (r.f < best) {
            best = r.f;
            best_beta = detail::sphere_point(r.x(0), r.x(1));
        }
    }
    return detail::finish_elastic(m, best_beta, ElasticMethod::PolynomialGrid, cfg.tol);
}

/// Independent check: multi-start minimization of M(a (x) b, a (x) b) over a, b on the unit sphere.
inline ElasticReport elastic_margin_direct(const WTensor &m, const ElasticConfig &cfg = {}) {
    if (m.n() != 3) throw Error("elastic bounds need three flavors");
    auto unit = [](double t, double p) {
        Vec v(3);
        v << std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t);
        return v;
    };
    auto obj = [&](const Vec &x) { return elastic_value(m, unit(x(0), x(1)), unit(x(2), x(3))); };
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
    NelderMeadOptions nm;
    nm.initial_step = 0.3;
    nm.size_tol = 1e-10;
    MinResult best;
    for (int s = 0; s < std::max(cfg.starts, 1); ++s) {
        Vec x0(4);
        for (int a = 0; a < 4; ++a) x0(a) = ang(rng);
        const MinResult r = nelder_mead(obj, x0, nm);
        if (r.f < best.f) best = r;
    }
    ElasticReport rep;
    rep.method = ElasticMethod::SphereOptimizer;
    rep.scale = m.frobenius();
    rep.alpha = unit(best.x(0), best.x(1));
    rep.beta = unit(best.x(2), best.x(3));
    rep.margin = elastic_value(m, rep.alpha, rep.beta);
    rep.conditions = detail::q_conditions(elastic_q(m, rep.beta));
    rep.pass = rep.margin >= -cfg.tol * rep.scale;
    return rep;
}

// ---------------------------------------------------------------------------
// Inelastic bounds.

struct InelasticConfig {
    int samples = 20000;
    int refine = 32;
    int refine_iterations = 3000;
    std::uint64_t seed = 20240611;
    double tol = 1e-9;
    SamplerConfig sampler{};
};

struct InelasticReport {
    bool pass = true; // no violation found among the evaluated rays
    double margin = std::numeric_limits<double>::infinity(); // min pair(S, M) / gram_trace(S)
    double scale = 0;
    Type3 witness;
    int samples = 0;
    int refine_iterations = 0;
    double normalized() const { return scale > 0 ? margin / scale : margin; }
};

/// Unchecked Type3 tensor; callers guarantee a positive validity margin.
inline WTensor type3_tensor(const Mat &frame, double d, double g, double h) {
    const double c = type3_margin(d, g, h);
    const Vec a2 = Vec::Unit(3, 1), a3 = Vec::Unit(3, 2);
    WTensor s = s_tot(d, g, h);
    s += 2.0 * c * (outer4(a2, a3, a2, a3) + outer4(a3, a2, a3, a2));
    return contract_all_slots(s, frame);
}

inline double type3_value(const WTensor &m, const Type3 &r) {
    const WTensor s = type3_tensor(r.frame, r.d, r.g, r.h);
    return pair(s, m) / gram_trace(s);
}

namespace detail {

inline Vec pack_type3(const Type3 &r) {
    Vec x(12);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) x(3 * i + j) = r.frame(i, j);
    x(9) = r.d;
    x(10) = r.g;
    x(11) = r.h;
    return x;
}

inline Type3 unpack_type3(const Vec &x) {
    Type3 r;
    r.frame = Mat(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.frame(i, j) = x(3 * i + j);
    r.d = x(9);
    r.g = x(10);
    r.h = x(11);
    return r;
}

inline bool usable(const Type3 &r) {
    if (!(type3_margin(r.d, r.g, r.h) > 1e-12)) return false;
    const double s = r.frame.cwiseAbs().maxCoeff();
    return s > 0 && std::abs(r.frame.determinant()) > 1e-8 * s * s * s;
}

// Normalized value as a function of (frame, d, g, h); invalid points get a large constant.
template <class Eval> auto type3_objective(Eval eval, double penalty) {
    return [eval, penalty](const Vec &x) {
        const Type3 r = unpack_type3(x);
        if (!usable(r)) return penalty;
        return eval(r);
    };
}

inline Type3 tidy(Type3 r) {
    if (usable(r)) r.frame = sl_normalize(r.frame);
    return r;
}

} // namespace detail

/// Local search over (frame, d, g, h) from a starting ray, minimizing eval(ray).
template <class Eval>
inline std::pair<Type3, double> refine_type3(Eval eval, const Type3 &start, double penalty, int max_iter,
                                             int *iterations = nullptr) {
    NelderMeadOptions nm;
    nm.max_iter = max_iter;
    nm.initial_step = 0.2;
    nm.size_tol = 1e-9;
    const MinResult r = nelder_mead(detail::type3_objective(eval, penalty), detail::pack_type3(start), nm);
    if (iterations) *iterations += r.iterations;
    Type3 best = detail::tidy(detail::unpack_type3(r.x));
    if (!detail::usable(best)) return {start, eval(start)};
    return {best, eval(best)};
}

/// Sampled search for a Type3 ray with pair(S, M) < 0. One-sided: a negative margin is a
/// certified violation, a positive one only means none was found.
inline InelasticReport inelastic_margin(const WTensor &m, const InelasticConfig &cfg = {}) {
    if (m.n() != 3) throw Error("inelastic bounds need three flavors");
    InelasticReport rep;
    rep.scale = m.frobenius();
    RaySampler sampler(cfg.seed, cfg.sampler);
    std::vector<std::pair<double, Type3>> vals;
    vals.reserve(static_cast<std::size_t>(std::max(cfg.samples, 0)));
    for (int a = 0; a < cfg.samples; ++a) {
        const Type3 r = sampler.sample_type3();
        vals.emplace_back(type3_value(m, r), r);
    }
    rep.samples = cfg.samples;
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.refine, 0)), vals.size());
    std::partial_sort(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(k), vals.end(),
                      [](const auto &a, const auto &b) { return a.first < b.first; });
    if (!vals.empty()) {
        rep.margin = vals.front().first;
        rep.witness = vals.front().second;
    }
    const double penalty = 1e3 * (1.0 + rep.scale);
    auto eval = [&m](const Type3 &r) { return type3_value(m, r); };
    for (std::size_t a = 0; a < k; ++a) {
        const auto [ray, v] = refine_type3(eval, vals[a].second, penalty, cfg.refine_iterations, &rep.refine_iterations);
        if (v < rep.margin) {
            rep.margin = v;
            rep.witness = ray;
        }
    }
    rep.pass = rep.margin >= -cfg.tol * rep.scale;
    return rep;
}

/// M0(S) = sum_i S(u_i, u_i) over an orthonormal basis u_i of ker gram(s0): nonnegative on C_W,
/// zero on s0, and strictly positive on every decomposable a (x) b outside range gram(s0).
inline WTensor kernel_functional(const WTensor &s0) {
    const KernelBasis kb = kernel_basis(gram(s0));
    return project_w(from_gram(kb.basis * kb.basis.transpose(), s0.n()));
}

struct Separation {
    WTensor m;                   // elastic margin > 0 and pair(ray, m) < 0 when separating
    double elastic_margin = 0;   // of m, polynomial-grid method
    double ray_value = 0;        // pair(ray, m) / gram_trace(ray)
    bool separating() const { return elastic_margin > 0 && ray_value < 0; }
};

/// Shift the kernel functional of a Type3 ray by half its elastic margin along the trace form.
/// The result passes the elastic bounds but is negative on the ray.
inline Separation separate_from_elastic(const Type3 &ray, const ElasticConfig &cfg = {}) {
    const WTensor s = ray_type3(ray.frame, ray.d, ray.g, ray.h);
    const WTensor m0 = kernel_functional(s);
    const double e0 = elastic_margin_poly(m0, cfg).margin;
    Separation out;
    out.m = m0 - (0.5 * e0) * trace_form(3);
    out.elastic_margin = elastic_margin_poly(out.m, cfg).margin;
    out.ray_value = pair(s, out.m) / gram_trace(s);
    return out;
}

// ---------------------------------------------------------------------------
// Membership.

enum class Verdict { ViolatesElastic, ViolatesInelastic, PassesAllSampled };

inline const char *to_string(Verdict v) {
    switch (v) {
    case Verdict::ViolatesElastic: return "ViolatesElastic";
    case Verdict::ViolatesInelastic: return "ViolatesInelastic";
    case Verdict::PassesAllSampled: return "PassesAllSampled";
    }
    return "?";
}

struct BoundConfig {
    ElasticConfig elastic{};
    InelasticConfig inelastic{};
};

struct BoundReport {
    ElasticReport elastic;
    InelasticReport inelastic;
    Verdict verdict = Verdict::PassesAllSampled;
};

inline BoundReport membership(const WTensor &m, const BoundConfig &cfg = {}) {
    BoundReport r;
    r.elastic = elastic_margin_poly(m, cfg.elastic);
    r.inelastic = inelastic_margin(m, cfg.inelastic);
    if (!r.elastic.pass)
        r.verdict = Verdict::ViolatesElastic;
    else if (!r.inelastic.pass)
        r.verdict = Verdict::ViolatesInelastic;
    else
        r.verdict = Verdict::PassesAllSampled;
    return r;
}

// ---------------------------------------------------------------------------
// Two-parameter scans M0 + x dir1 + y dir2.

enum class RegionStatus { ElasticFail = 0, ElasticOnly = 1, FullPass = 2, Boundary = 3 };

/// Status from scale-normalized margins: the first failing check decides, and a deciding
/// margin inside the band is reported as boundary.
inline RegionStatus classify_margins(double elastic, double inelastic, double band) {
    if (std::abs(elastic) < band) return RegionStatus::Boundary;
    if (elastic < 0) return RegionStatus::ElasticFail;
    if (std::abs(inelastic) < band) return RegionStatus::Boundary;
    if (inelastic < 0) return RegionStatus::ElasticOnly;
    return RegionStatus::FullPass;
}

struct RegionConfig {
    double center1 = 0, center2 = 0;
    double window1 = 1, window2 = 1; // half-widths
    int steps1 = 200, steps2 = 200;
    double band = 0.02;
    // elastic: coarse direction grid plus local refinement at the lowest cells
    int elastic_theta = 31, elastic_phi = 61, elastic_refine = 3;
    // inelastic: shared pool of sampled rays, enriched by rays refined at an anchor subgrid
    int pool_samples = 20000;
    int anchors = 9; // per axis
    int anchor_refine = 4;
    int refine_iterations = 3000;
    std::uint64_t seed = 20240611;
    SamplerConfig sampler{};
    unsigned threads = 0; // 0: hardware concurrency
};

struct RegionCell {
    double delta1 = 0, delta2 = 0;
    RegionStatus status = RegionStatus::Boundary;
    double elastic_margin = 0, inelastic_margin = 0; // normalized by |M|_F at the cell
};

struct RegionResult {
    std::vector<RegionCell> cells; // row-major in delta1, then delta2
    int steps1 = 0, steps2 = 0;
    std::array<int, 4> counts{};
    std::size_t pool_size = 0;
};

inline double grid_coordinate(double center, double window, int steps, int i) {
    if (steps <= 1) return center;
    return center - window + 2.0 * window * i / (steps - 1);
}

namespace detail {

struct PooledRay {
    Type3 ray;
    double p0, p1, p2, norm;
};

inline PooledRay pool_entry(const Type3 &r, const WTensor &m0, const WTensor &d1, const WTensor &d2) {
    const WTensor s = type3_tensor(r.frame, r.d, r.g, r.h);
    return {r, pair(s, m0), pair(s, d1), pair(s, d2), gram_trace(s)};
}

template <class F> void parallel_rows(int rows, unsigned threads, F &&f) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(rows, 1)));
    if (threads <= 1) {
        for (int i = 0; i < rows; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (int i = static_cast<int>(t); i < rows; i += static_cast<int>(threads)) f(i);
        });
    for (auto &th : pool) th.join();
}

} // namespace detail

/// Elastic margin (unnormalized) with a coarse direction grid and refinement; used per scan cell.
inline double elastic_margin_fast(const WTensor &m, int nt, int np, int refine) {
    ElasticConfig c;
    c.theta_steps = nt;
    c.phi_steps = np;
    c.refine = refine;
    return elastic_margin_poly(m, c).margin;
}

inline RegionResult region_scan(const WTensor &m0, const WTensor &dir1, const WTensor &dir2,
                                const RegionConfig &cfg = {}) {
    if (m0.n() != 3) throw Error("region_scan needs three flavors");
    {
        Mat two(m0.size(), 2);
        for (std::size_t a = 0; a < m0.size(); ++a) {
            two(static_cast<Eigen::Index>(a), 0) = dir1.data()[a];
            two(static_cast<Eigen::Index>(a), 1) = dir2.data()[a];
        }
        Eigen::JacobiSVD<Mat> svd(two);
        const Vec sv = svd.singularValues();
        if (!(sv(1) > 1e-12 * std::max(sv(0), 1e-300))) throw Error("region_scan: directions are linearly dependent");
    }
    const int n1 = std::max(cfg.steps1, 1), n2 = std::max(cfg.steps2, 1);
    auto point = [&](double x, double y) { return m0 + x * dir1 + y * dir2; };

    // ray pool
    std::vector<detail::PooledRay> pool;
    RaySampler sampler(cfg.seed, cfg.sampler);
    for (int a = 0; a < cfg.pool_samples; ++a) pool.push_back(detail::pool_entry(sampler.sample_type3(), m0, dir1, dir2));
    const int na = std::max(cfg.anchors, 1);
    std::vector<std::vector<detail::PooledRay>> refined(static_cast<std::size_t>(na) * na);
    detail::parallel_rows(na * na, cfg.threads, [&](int idx) {
        const int ia = idx / na, ja = idx % na;
        const double x = grid_coordinate(cfg.center1, cfg.window1, na, ia);
        const double y = grid_coordinate(cfg.center2, cfg.window2, na, ja);
        const WTensor m = point(x, y);
        std::vector<std::pair<double, std::size_t>> order;
        order.reserve(pool.size());
        for (std::size_t r = 0; r < pool.size(); ++r)
            order.emplace_back((pool[r].p0 + x * pool[r].p1 + y * pool[r].p2) / pool[r].norm, r);
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.anchor_refine, 0)), order.size());
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
        auto eval = [&m](const Type3 &r) { return type3_value(m, r); };
        const double penalty = 1e3 * (1.0 + m.frobenius());
        for (std::size_t a = 0; a < k; ++a) {
            const auto [ray, v] = refine_type3(eval, pool[order[a].second].ray, penalty, cfg.refine_iterations);
            (void)v;
            refined[static_cast<std::size_t>(idx)].push_back(detail::pool_entry(ray, m0, dir1, dir2));
        }
    });
    for (const auto &v : refined) pool.insert(pool.end(), v.begin(), v.end());

    RegionResult res;
    res.steps1 = n1;
    res.steps2 = n2;
    res.pool_size = pool.size();
    res.cells.resize(static_cast<std::size_t>(n1) * n2);
    detail::parallel_rows(n1, cfg.threads, [&](int i) {
        const double x = grid_coordinate(cfg.center1, cfg.window1, n1, i);
        for (int j = 0; j < n2; ++j) {
            const double y = grid_coordinate(cfg.center2, cfg.window2, n2, j);
            const WTensor m = point(x, y);
            const double scale = std::max(m.frobenius(), 1e-300);
            double inel = std::numeric_limits<double>::infinity();
            for (const auto &r : pool) inel = std::min(inel, (r.p0 + x * r.p1 + y * r.p2) / r.norm);
            RegionCell &c = res.cells[static_cast<std::size_t>(i) * n2 + j];
            c.delta1 = x;
            c.delta2 = y;
            c.elastic_margin = elastic_margin_fast(m, cfg.elastic_theta, cfg.elastic_phi, cfg.elastic_refine) / scale;
            c.inelastic_margin = inel / scale;
            c.status = classify_margins(c.elastic_margin, c.inelastic_margin, cfg.band);
        }
    });
    for (const auto &c : res.cells) ++res.counts[static_cast<std::size_t>(c.status)];
    return res;
}

} // namespace posicone
