#pragma once

// The three families of extremal rays of C_W for three flavors, the pullback
// action of GL(V), classification of a given tensor, and a seeded ray sampler.

#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "posicone/maps.hpp"
#include "posicone/spectra.hpp"
#include "posicone/tensor_space.hpp"

namespace posicone {

struct Type1 {
    Vec alpha;
};

struct Type2 {
    Vec alpha;
    Vec beta;
};

/// Rows of `frame` are the covectors alpha_1, alpha_2, alpha_3.
struct Type3 {
    Mat frame = Mat::Identity(3, 3);
    double d = 0;
    double g = 0;
    double h = 0;
};

using ExtremalRay = std::variant<Type1, Type2, Type3>;

inline int ray_tag(const ExtremalRay &r) { return static_cast<int>(r.index()) + 1; }

/// Thrown for Type3 parameters outside g^2 > 1 - d^2 + dh.
class InvalidParameters : public Error {
  public:
    InvalidParameters(const std::string &msg, double margin) : Error(msg), margin_(margin) {}
    double margin() const { return margin_; }

  private:
    double margin_;
};

/// g^2 + d^2 - 1 - dh; Type3 requires this to be positive.
inline double type3_margin(double d, double g, double h) { return g * g + d * d - 1.0 - d * h; }

inline WTensor ray_type1(const Vec &alpha) {
    if (alpha.size() == 0 || alpha.cwiseAbs().maxCoeff() == 0.0) throw Error("ray_type1: zero covector");
    return sym_power(alpha);
}

/// (a v b)^2 + (a ^ b)^2 = 1/2 (a b a b + b a b a).
inline WTensor ray_type2(const Vec &alpha, const Vec &beta) {
    if (alpha.size() != beta.size()) throw Error("ray_type2: covectors must share a flavor dimension");
    Mat ab(alpha.size(), 2);
    ab << alpha, beta;
    if (kernel_basis(ab, 1e-12).rank() < 2) throw Error("ray_type2: covectors are linearly dependent");
    return 0.5 * (outer4(alpha, beta, alpha, beta) + outer4(beta, alpha, beta, alpha));
}

/// Pullback on all four slots: act(A, S)_ijkl = sum S_pqrs A_pi A_qj A_rk A_sl.
/// A covector alpha maps to A^T alpha, so act(A, alpha^4) = (A^T alpha)^4 and act(B, act(A, S)) = act(AB, S).
inline WTensor act(const Mat &a, const WTensor &s) {
    if (a.rows() != s.n() || a.cols() != s.n()) throw Error("act: matrix size does not match flavor dimension");
    const double scale = std::max(1e-300, a.cwiseAbs().maxCoeff());
    if (std::abs(a.determinant()) <= 1e-14 * std::pow(scale, static_cast<double>(s.n())))
        throw Error("act: singular group element");
    return contract_all_slots(s, a);
}

/// The induced action on the dual: pair(act(A, S), M) = pair(S, act_dual(A, M)).
inline WTensor act_dual(const Mat &a, const WTensor &m) { return contract_all_slots(m, a.transpose()); }

/// Rescale to |det| = 1, flipping the first row if the determinant is negative.
inline Mat sl_normalize(Mat a) {
    const double det = a.determinant();
    if (det == 0.0) throw Error("sl_normalize: singular matrix");
    a /= std::cbrt(std::abs(det));
    if (det < 0) a.row(0) *= -1.0;
    return a;
}

/// S_tot in the standard frame, the totally symmetric part of Type3 up to 4c alpha_2^2 alpha_3^2.
inline WTensor s_tot(double d, double g, double h) {
    const Vec a1 = Vec::Unit(3, 0), a2 = Vec::Unit(3, 1), a3 = Vec::Unit(3, 2);
    WTensor s = sym_power(a1);
    s += 6.0 * sym_product(a1, a1, a2, a2);
    s += 6.0 * sym_product(a1, a1, a3, a3);
    s += 12.0 * d * sym_product(a1, a2, a2, a3);
    s += 12.0 * g * sym_product(a1, a2, a3, a3);
    s += 4.0 * h * sym_product(a1, a3, a3, a3);
    s += (1.0 + d * d) * sym_power(a2);
    s += 4.0 * d * g * sym_product(a2, a2, a2, a3);
    s += 6.0 * (1.0 + d * h) * sym_product(a2, a2, a3, a3);
    s += 4.0 * g * (d + h) * sym_product(a2, a3, a3, a3);
    s += (1.0 + g * g + h * h) * sym_power(a3);
    return s;
}

/// S_tot + 2c [(a2 (x) a3)^2 + (a3 (x) a2)^2], c = g^2 + d^2 - 1 - dh > 0, pulled back by the frame.
inline WTensor ray_type3(const Mat &frame, double d, double g, double h) {
    const double c = type3_margin(d, g, h);
    if (!(c > 0.0))
        throw InvalidParameters("ray_type3: parameters violate g^2 > 1 - d^2 + dh (margin " + std::to_string(c) + ")",
                                c);
    if (frame.rows() != 3 || frame.cols() != 3) throw Error("ray_type3: frame must be 3x3");
    const Vec a2 = Vec::Unit(3, 1), a3 = Vec::Unit(3, 2);
    WTensor s = s_tot(d, g, h);
    s += 2.0 * c * (outer4(a2, a3, a2, a3) + outer4(a3, a2, a3, a2));
    if (frame.isIdentity(0.0)) return s;
    return act(frame, s);
}

inline WTensor ray_type3(double d, double g, double h) { return ray_type3(Mat::Identity(3, 3), d, g, h); }

inline WTensor to_tensor(const ExtremalRay &r) {
    return std::visit(
        [](const auto &x) -> WTensor {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Type1>)
                return ray_type1(x.alpha);
            else if constexpr (std::is_same_v<T, Type2>)
                return ray_type2(x.alpha, x.beta);
            else
                return ray_type3(x.frame, x.d, x.g, x.h);
        },
        r);
}

/// Sym^2 coordinates (basis e1^2, e2^2, e3^2, e1 v e2, e1 v e3, e2 v e3) of the
/// explicit kernel of R(ray_type3(d, g, h)) in the standard frame.
inline std::vector<Vec> type3_expected_kernel(double d, double g, double h) {
    auto v = [](double e11, double e22, double e33, double e12, double e13, double e23) {
        Vec x(6);
        x << e11, e22, e33, e12, e13, e23;
        return x;
    };
    if (d != 0.0 && g != 0.0)
        return {v(1, -1, 0, 0, d, 0), v(d - h, h, -d, d * g, 0, 0),
                v(d * d + g * g - d * h, -(g * g - d * h), -d * d, 0, 0, d * g)};
    if (d == 0.0) return {v(0, 0, 0, 0, g, -1), v(1, -1, 0, 0, 0, 0), v(0, g, -g, g * g, 0, h)};
    return {v(0, -1, 1, 0, d - h, 0), v(0, 0, 0, d, 0, -1), v(d - h, h, -d, 0, 0, 0)};
}

/// The printed 6x6 matrix of R(ray_type3(d, g, h)), rows and columns ordered
/// e1^2, e2^2, e3^2, e2 v e3, e1 v e2, e1 v e3.
inline Mat type3_printed_matrix(double d, double g, double h) {
    Mat m(6, 6);
    m << 1, 1, 1, 0, 0, 0,                                   //
        1, 1 + d * d, 1 + d * h, d * g, 0, d,                //
        1, 1 + d * h, 1 + g * g + h * h, g * (d + h), g, h,  //
        0, d * g, g * (d + h), d * d + g * g, d, g,          //
        0, 0, g, d, 1, 0,                                    //
        0, d, h, g, 0, 1;
    return m;
}

/// The printed matrix rearranged to the SymForm basis order used here.
inline Mat type3_expected_r(double d, double g, double h) {
    const Mat p = type3_printed_matrix(d, g, h);
    // position in the printed order of each of our basis elements e11, e22, e33, e12, e13, e23
    const int from[6] = {0, 1, 2, 4, 5, 3};
    Mat out(6, 6);
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) out(a, b) = p(from[a], from[b]);
    return out;
}

// ---------------------------------------------------------------------------
// Classification.

enum class RayClass { Type1, Type2, Type3, NotExtremal, NotInCone };

inline const char *to_string(RayClass c) {
    switch (c) {
    case RayClass::Type1: return "Type1";
    case RayClass::Type2: return "Type2";
    case RayClass::Type3: return "Type3";
    case RayClass::NotExtremal: return "NotExtremal";
    case RayClass::NotInCone: return "NotInCone";
    }
    return "?";
}

struct Classification {
    RayClass kind = RayClass::NotInCone;
    std::optional<ExtremalRay> ray;
    /// element of the minimal face of S not proportional to S (NotExtremal only)
    std::optional<WTensor> certificate;
    /// relative reconstruction error of `ray`
    double residual = 0;
    int rank_gram = 0, rank_sym = 0, rank_alt = 0;
};

namespace detail {

inline double relative_error(const WTensor &a, const WTensor &b) {
    return (a - b).frobenius() / std::max(1e-300, b.frobenius());
}

// S(a, b, c, e) for vectors of V.
inline double eval4(const WTensor &s, const Vec &a, const Vec &b, const Vec &c, const Vec &e) {
    const int n = s.n();
    double acc = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) acc += s(i, j, k, l) * a(i) * b(j) * c(k) * e(l);
    return acc;
}

// S(u^2, v w) with the 1/2 convention: S(u, u, v v w) where v v w = (v w + w v)/2.
inline double eval_sq_sym(const WTensor &s, const Vec &u, const Vec &v, const Vec &w) {
    return 0.5 * (eval4(s, u, u, v, w) + eval4(s, u, u, w, v));
}

// Type1 / Type2 candidate from a rank-one R(S) = gamma^2.
inline std::optional<ExtremalRay> factor_rank_one(const WTensor &s) {
    const int n = s.n();
    const Mat g = gram(s);
    // symmetric block of the gram matrix, acting on vec of symmetric matrices
    Mat sym_proj = Mat::Zero(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            sym_proj(i * n + j, i * n + j) += 0.5;
            sym_proj(i * n + j, j * n + i) += 0.5;
        }
    const Mat gs = sym_proj * g * sym_proj;
    Eigen::SelfAdjointEigenSolver<Mat> es(gs);
    const double mu = es.eigenvalues()(n * n - 1);
    if (!(mu > 0)) return std::nullopt;
    Vec gv = std::sqrt(mu) * es.eigenvectors().col(n * n - 1);
    Mat gamma = Eigen::Map<Mat>(gv.data(), n, n);
    gamma = 0.5 * (gamma + gamma.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> eg(gamma);
    const Vec lam = eg.eigenvalues();
    const double top = lam.cwiseAbs().maxCoeff();
    int pos = 0, neg = 0;
    for (int a = 0; a < n; ++a) {
        if (lam(a) > 1e-7 * top) ++pos;
        if (lam(a) < -1e-7 * top) ++neg;
    }
    const Mat &u = eg.eigenvectors();
    if (pos + neg == 1) {
        const int a = pos ? n - 1 : 0;
        return ExtremalRay{Type1{std::sqrt(std::abs(lam(a))) * u.col(a)}};
    }
    if (pos == 1 && neg == 1) {
        const Vec u1 = std::sqrt(lam(n - 1)) * u.col(n - 1);
        const Vec u2 = std::sqrt(-lam(0)) * u.col(0);
        return ExtremalRay{Type2{u1 + u2, u1 - u2}};
    }
    return std::nullopt;
}

// Recover (frame, d, g, h) following the normal-form construction:
// z spans the vectors with z ^ V in ker S, B = S(z^2, .) is positive definite,
// e2, e3 is a B-orthonormal basis of the complement of z with S(e2^2, e2 v z) = 0.
inline std::optional<Type3> recover_type3(const WTensor &s) {
    const int n = 3;
    const Mat g = gram(s);
    // z -> (G (z (x) e_k - e_k (x) z))_k is linear in z; its null vector is z.
    Mat lmap(n * n * n, n);
    for (int c = 0; c < n; ++c) {
        const Vec zc = Vec::Unit(n, c);
        for (int k = 0; k < n; ++k) {
            const Vec ek = Vec::Unit(n, k);
            Vec w(n * n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) w(i * n + j) = zc(i) * ek(j) - ek(i) * zc(j);
            lmap.block(k * n * n, c, n * n, 1) = g * w;
        }
    }
    Eigen::JacobiSVD<Mat> svd(lmap, Eigen::ComputeFullV);
    Vec z = svd.matrixV().col(n - 1);
    const double zzzz = eval4(s, z, z, z, z);
    if (!(zzzz > 0)) return std::nullopt;
    z /= std::pow(zzzz, 0.25);

    Mat b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = eval4(s, z, z, Vec::Unit(n, i), Vec::Unit(n, j));
    b = 0.5 * (b + b.transpose()).eval();

    // B-orthonormal basis x, y of the B-complement of z
    Mat cand(n, n);
    cand.col(0) = z;
    {
        // pick two coordinate vectors completing z
        int skip = 0;
        z.cwiseAbs().maxCoeff(&skip);
        int col = 1;
        for (int a = 0; a < n; ++a)
            if (a != skip) cand.col(col++) = Vec::Unit(n, a);
    }
    for (int a = 0; a < n; ++a) {
        for (int p = 0; p < a; ++p) cand.col(a) -= (cand.col(p).dot(b * cand.col(a))) * cand.col(p);
        const double nrm = cand.col(a).dot(b * cand.col(a));
        if (!(nrm > 0)) return std::nullopt;
        cand.col(a) /= std::sqrt(nrm);
    }
    const Vec x = cand.col(1), y = cand.col(2);

    // f(theta) = S(u^2, u v z), u = cos x + sin y, is odd under theta -> theta + pi: a root lies in [0, pi].
    auto f = [&](double th) {
        const Vec u = std::cos(th) * x + std::sin(th) * y;
        return eval_sq_sym(s, u, u, z);
    };
    double lo = 0.0, flo = f(lo);
    double root = 0.0;
    bool found = std::abs(flo) == 0.0;
    const int steps = 64;
    for (int a = 1; a <= steps && !found; ++a) {
        const double hi = std::numbers::pi * a / steps;
        const double fhi = f(hi);
        if (fhi == 0.0) {
            root = hi;
            found = true;
        } else if ((flo < 0) != (fhi < 0)) {
            double l = lo, r = hi, fl = flo;
            for (int it = 0; it < 200 && r - l > 1e-16; ++it) {
                const double mid = 0.5 * (l + r);
                const double fm = f(mid);
                if ((fm < 0) == (fl < 0)) {
                    l = mid;
                    fl = fm;
                } else {
                    r = mid;
                }
            }
            root = 0.5 * (l + r);
            found = true;
        }
        lo = hi;
        flo = fhi;
    }
    if (!found) root = std::numbers::pi; // f(pi) = -f(0) = 0 only when f(0) = 0, handled above
    const Vec e2 = std::cos(root) * x + std::sin(root) * y;
    const Vec e3 = -std::sin(root) * x + std::cos(root) * y;

    Type3 out;
    out.d = eval_sq_sym(s, e2, z, e3);
    out.g = eval_sq_sym(s, e3, z, e2);
    out.h = eval_sq_sym(s, e3, z, e3);
    if (!(type3_margin(out.d, out.g, out.h) > 0)) return std::nullopt;
    Mat e(n, n);
    e << z, e2, e3;
    out.frame = e.inverse();
    return out;
}

} // namespace detail

/// Decision tree for n = 3: cone test, rank-one R(S) factorization (Type1/Type2),
/// then the face test and Type3 normal form.
inline Classification classify(const WTensor &s, const SpectraConfig &cfg = {}) {
    if (s.n() != 3) throw Error("classify: only three flavors are supported");
    Classification out;
    if (s.max_abs() == 0.0 || !in_cone(s, cfg.psd_tol)) {
        out.kind = RayClass::NotInCone;
        return out;
    }
    out.rank_gram = numerical_rank(gram(s), cfg.rank_tol);
    out.rank_sym = numerical_rank(restrict_sym(s).m, cfg.rank_tol);
    out.rank_alt = numerical_rank(restrict_alt(s).m, cfg.rank_tol);
    const double recon_tol = 1e-7;

    if (out.rank_sym == 1) {
        if (auto r = detail::factor_rank_one(s)) {
            const double res = detail::relative_error(to_tensor(*r), s);
            if (res < recon_tol) {
                out.kind = std::holds_alternative<Type1>(*r) ? RayClass::Type1 : RayClass::Type2;
                out.ray = *r;
                out.residual = res;
                return out;
            }
        }
    }
    const FaceSpace face = face_space(s, cfg);
    if (face.dim != 1) {
        out.kind = RayClass::NotExtremal;
        // the face basis vector least aligned with S
        double best = -1;
        const double sn = s.frobenius();
        for (const auto &t : face.basis) {
            const WTensor perp = t - (pair(t, s) / (sn * sn)) * s;
            const double r = perp.frobenius();
            if (r > best) {
                best = r;
                out.certificate = perp * (1.0 / r);
            }
        }
        return out;
    }
    if (out.rank_alt == 1 && out.rank_sym == 3) {
        if (auto r = detail::recover_type3(s)) {
            const double res = detail::relative_error(ray_type3(r->frame, r->d, r->g, r->h), s);
            if (res < recon_tol) {
                out.kind = RayClass::Type3;
                out.ray = ExtremalRay{*r};
                out.residual = res;
                return out;
            }
        }
    }
    throw Error("classify: extremal tensor did not match any family (ranks " + std::to_string(out.rank_sym) + ", " +
                std::to_string(out.rank_alt) + ")");
}

// ---------------------------------------------------------------------------
// Sampling.

enum class RayKind { Type1, Type2, Type3, Mixed };

struct SamplerConfig {
    double cauchy_cap = 10.0;  // |d|, |h| <= cap
    double g2_epsilon = 1e-3;  // distance of g^2 from the validity boundary
    double g2_width = 25.0;    // width of the uniform g^2 window
    double min_abs_det = 0.1;  // frame rejection threshold before SL normalization
};

/// Deterministic given the seed; copyable, so a copy continues the same stream.
class RaySampler {
  public:
    explicit RaySampler(std::uint64_t seed, SamplerConfig cfg = {}) : rng_(seed), cfg_(cfg) {}

    ExtremalRay sample(RayKind kind) {
        switch (kind) {
        case RayKind::Type1: return Type1{normal_vec()};
        case RayKind::Type2: {
            for (;;) {
                Vec a = normal_vec(), b = normal_vec();
                const Eigen::Vector3d a3 = a, b3 = b;
                if (a3.cross(b3).norm() > 1e-3 * a.norm() * b.norm()) return Type2{a, b};
            }
        }
        case RayKind::Type3: return sample_type3();
        case RayKind::Mixed: {
            std::uniform_int_distribution<int> pick(0, 2);
            return sample(static_cast<RayKind>(pick(rng_)));
        }
        }
        throw Error("unknown ray kind");
    }

    Type3 sample_type3() {
        Type3 r;
        r.frame = sample_frame();
        r.d = truncated_cauchy();
        r.h = truncated_cauchy();
        // the validity window starts at g^2 = 1 - d^2 + dh, clamped to g^2 >= 0
        const double lo = std::max(1.0 - r.d * r.d + r.d * r.h + cfg_.g2_epsilon, 0.0);
        std::uniform_real_distribution<double> g2(lo, lo + cfg_.g2_width);
        double g = std::sqrt(g2(rng_));
        if (std::bernoulli_distribution(0.5)(rng_)) g = -g;
        r.g = g;
        if (!(type3_margin(r.d, r.g, r.h) > 0)) r.g = std::copysign(std::sqrt(lo + cfg_.g2_epsilon), g);
        return r;
    }

    Mat sample_frame() {
        for (;;) {
            Mat a(3, 3);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) a(i, j) = normal_(rng_);
            if (std::abs(a.determinant()) < cfg_.min_abs_det) continue;
            return sl_normalize(a);
        }
    }

    std::mt19937_64 &engine() { return rng_; }

  private:
    Vec normal_vec() {
        Vec v(3);
        for (int a = 0; a < 3; ++a) v(a) = normal_(rng_);
        if (v.norm() < 1e-6) v(0) = 1.0;
        return v;
    }

    double truncated_cauchy() {
        std::cauchy_distribution<double> c(0.0, 1.0);
        for (;;) {
            const double x = c(rng_);
            if (std::abs(x) <= cfg_.cauchy_cap) return x;
        }
    }

    std::mt19937_64 rng_;
    SamplerConfig cfg_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

inline ExtremalRay sample_ray(RayKind kind, std::uint64_t seed) {
    RaySampler s(seed);
    return s.sample(kind);
}

} // namespace posicone
