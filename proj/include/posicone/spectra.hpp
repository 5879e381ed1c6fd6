#pragma once

// PSD tests, numerical kernels, cone membership and the minimal-face test for
// extremality: z lies in the minimal face of x iff ker z contains ker x, so x is
// extremal iff the W-elements annihilating ker gram(x) form a line.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "posicone/maps.hpp"
#include "posicone/tensor_space.hpp"

namespace posicone {

/// Relative singular-value threshold separating kernel directions from the rest.
constexpr double kRankTol = 1e-9;
/// Relative tolerance on the smallest eigenvalue in PSD tests.
constexpr double kPsdTol = 1e-10;

struct PsdResult {
    bool psd = false;
    double min_eig = 0;
};

inline void require_symmetric(const Mat &m, const char *what) {
    if (m.rows() != m.cols()) throw Error(std::string(what) + ": matrix is not square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw Error(std::string(what) + ": matrix is not symmetric");
}

/// PSD iff the smallest eigenvalue is >= -tol * max(1, spectral radius).
inline PsdResult psd_check(const Mat &form, double tol = kPsdTol) {
    require_symmetric(form, "psd_check");
    if (form.size() == 0) return {true, 0.0};
    Eigen::SelfAdjointEigenSolver<Mat> es(form, Eigen::EigenvaluesOnly);
    const Vec ev = es.eigenvalues();
    const double radius = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    return {ev(0) >= -tol * std::max(1.0, radius), ev(0)};
}

inline double min_eigenvalue(const Mat &form) {
    Eigen::SelfAdjointEigenSolver<Mat> es(form, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

struct KernelBasis {
    Mat basis; // orthonormal columns
    double tol = kRankTol;
    long rows = 0;
    long cols = 0;

    int dim() const { return static_cast<int>(basis.cols()); }
    int rank() const { return static_cast<int>(cols) - dim(); }
};

/// Right singular directions with singular value < tol * sigma_max.
/// The zero matrix has the full space as kernel.
inline KernelBasis kernel_basis(const Mat &form, double tol = kRankTol) {
    KernelBasis kb;
    kb.tol = tol;
    kb.rows = form.rows();
    kb.cols = form.cols();
    if (form.cols() == 0) {
        kb.basis = Mat(0, 0);
        return kb;
    }
    Eigen::JacobiSVD<Mat> svd(form, Eigen::ComputeFullV);
    const Vec sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    int rank = 0;
    if (smax > 0)
        for (Eigen::Index a = 0; a < sv.size(); ++a)
            if (sv(a) >= tol * smax) ++rank;
    kb.basis = svd.matrixV().rightCols(form.cols() - rank);
    return kb;
}

inline int numerical_rank(const Mat &form, double tol = kRankTol) { return kernel_basis(form, tol).rank(); }

/// Membership in C_W: R(S) >= 0 and R'(S) >= 0.
inline bool in_cone(const WTensor &s, double tol = kPsdTol) {
    if (!psd_check(restrict_sym(s).m, tol).psd) return false;
    if (s.n() < 2) return true;
    return psd_check(restrict_alt(s).m, tol).psd;
}

struct SpectraConfig {
    double psd_tol = kPsdTol;
    double rank_tol = kRankTol;
};

/// Linear span of the minimal face of S in C_W: {T in W : gram(T) q = 0 for all q in ker gram(S)}.
struct FaceSpace {
    std::vector<WTensor> basis;
    int dim = 0;
    KernelBasis kernel; // ker gram(S)
};

inline FaceSpace face_space(const WTensor &s, const SpectraConfig &cfg = {}) {
    if (!in_cone(s, cfg.psd_tol)) throw Error("face_space: tensor is not in the cone");
    const int n = s.n();
    FaceSpace out;
    out.kernel = kernel_basis(gram(s), cfg.rank_tol);
    const auto basis = w_basis(FlavorDim{n});
    const int k = out.kernel.dim();
    const int nn = n * n;
    if (k == 0) {
        out.basis = basis;
        out.dim = static_cast<int>(basis.size());
        return out;
    }
    Mat c(nn * k, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t m = 0; m < basis.size(); ++m) {
        const Mat prod = gram(basis[m]) * out.kernel.basis;
        c.col(static_cast<Eigen::Index>(m)) = Eigen::Map<const Vec>(prod.data(), prod.size());
    }
    const KernelBasis null = kernel_basis(c, cfg.rank_tol);
    for (int a = 0; a < null.dim(); ++a) {
        WTensor t(FlavorDim{n});
        for (std::size_t m = 0; m < basis.size(); ++m) t += null.basis(static_cast<Eigen::Index>(m), a) * basis[m];
        out.basis.push_back(std::move(t));
    }
    out.dim = null.dim();
    return out;
}

/// Extremal iff the minimal face is one-dimensional. S = 0 is rejected.
inline bool is_extremal(const WTensor &s, const SpectraConfig &cfg = {}) {
    if (s.max_abs() == 0.0) throw Error("is_extremal: the zero tensor is not on an extremal ray");
    return face_space(s, cfg).dim == 1;
}

/// Residual of S after orthogonal projection onto span(basis), in the Frobenius norm on components.
inline double span_residual(const WTensor &s, const std::vector<WTensor> &basis) {
    if (basis.empty()) return s.frobenius();
    Mat b(static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t a = 0; a < basis.size(); ++a)
        for (std::size_t x = 0; x < s.size(); ++x)
            b(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(a)) = basis[a].data()[x];
    const Vec v = Eigen::Map<const Vec>(s.data().data(), static_cast<Eigen::Index>(s.size()));
    const Vec coef = b.colPivHouseholderQr().solve(v);
    return (b * coef - v).norm();
}

struct DegenerateElement {
    double t = 0;
    Mat form;
    /// set when det(T1 + t T2) has no real root because T2 alone is the degenerate element
    bool second_only = false;
};

/// A rank-deficient element of span{T1, T2} for 3x3 symmetric forms: a real root of det(T1 + t T2).
inline DegenerateElement find_degenerate(const Mat &t1, const Mat &t2) {
    require_symmetric(t1, "find_degenerate");
    require_symmetric(t2, "find_degenerate");
    if (t1.rows() != 3 || t2.rows() != 3) throw Error("find_degenerate: forms must be 3x3");
    const double scale = std::max({t1.cwiseAbs().maxCoeff(), t2.cwiseAbs().maxCoeff(), 1e-300});
    const double negligible = 1e-12 * scale * scale * scale;
    auto p = [&](double t) { return Mat(t1 + t * t2).determinant(); };

    const double c0 = p(0.0);
    if (std::abs(c0) <= negligible) return {0.0, t1, false};
    const double pp = p(1.0), pm = p(-1.0);
    const double c3 = t2.determinant();
    const double c2 = 0.5 * (pp + pm) - c0;
    const double c1 = 0.5 * (pp - pm) - c3;

    std::vector<double> coeffs{c0, c1, c2, c3};
    while (coeffs.size() > 1 && std::abs(coeffs.back()) <= negligible) coeffs.pop_back();
    const int deg = static_cast<int>(coeffs.size()) - 1;

    std::optional<double> root;
    if (deg == 1) {
        root = -coeffs[0] / coeffs[1];
    } else if (deg >= 2) {
        Mat comp = Mat::Zero(deg, deg);
        for (int a = 1; a < deg; ++a) comp(a, a - 1) = 1.0;
        for (int a = 0; a < deg; ++a) comp(a, deg - 1) = -coeffs[a] / coeffs[deg];
        Eigen::EigenSolver<Mat> es(comp, false);
        double best_im = std::numeric_limits<double>::infinity();
        for (int a = 0; a < deg; ++a) {
            const auto z = es.eigenvalues()(a);
            if (std::abs(z.imag()) < best_im) {
                best_im = std::abs(z.imag());
                root = z.real();
            }
        }
        // complex pair only (quadratic case): no real root
        if (best_im > 1e-8 * std::max(1.0, std::abs(*root))) root.reset();
    }
    if (!root) {
        // det T2 vanishes and the remaining polynomial has no real zero: T2 itself is degenerate
        return {std::numeric_limits<double>::infinity(), t2, true};
    }
    double t = *root;
    for (int it = 0; it < 8; ++it) {
        double val = 0, der = 0;
        for (int a = deg; a >= 0; --a) {
            der = der * t + val;
            val = val * t + coeffs[a];
        }
        if (der == 0.0) break;
        const double step = val / der;
        t -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(t))) break;
    }
    return {t, t1 + t * t2, false};
}

} // namespace posicone
