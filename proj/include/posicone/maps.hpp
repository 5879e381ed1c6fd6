#pragma once

// Restriction maps R (to Sym^2 Sym^2) and R' (to Sym^2 Lambda^2), the correction
// map h = R' o R^{-1}, the inverse of R, and the section sigma_A of R' on ker(tot).
//
// Basis conventions, with u v w = 1/2 products:
//   Sym^2 V   : e_1^2, ..., e_n^2, then e_i v e_j for i < j (lexicographic)
//   Lambda^2 V: e_i ^ e_j for i < j (lexicographic)
// Form entries are the bilinear form evaluated directly on these elements.

#include <cmath>
#include <utility>
#include <vector>

#include "posicone/tensor_space.hpp"

namespace posicone {

/// Symmetric form on Sym^2 V, size n(n+1)/2.
struct SymForm {
    int n = 3;
    Mat m;
};

/// Symmetric form on Lambda^2 V, size n(n-1)/2.
struct AltForm {
    int n = 3;
    Mat m;
};

inline int sym_size(int n) { return n * (n + 1) / 2; }
inline int alt_size(int n) { return n * (n - 1) / 2; }

/// Index pairs (i, j) of the Sym^2 V basis in order.
inline std::vector<std::pair<int, int>> sym_basis_pairs(int n) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i) out.emplace_back(i, i);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) out.emplace_back(i, j);
    return out;
}

inline std::vector<std::pair<int, int>> alt_basis_pairs(int n) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) out.emplace_back(i, j);
    return out;
}

/// Position of e_i v e_j in the Sym^2 basis (order of i, j irrelevant).
inline int sym_index(int n, int i, int j) {
    if (i > j) std::swap(i, j);
    if (i == j) return i;
    // pairs (a, b), a < b, enumerated after the n squares
    return n + i * n - i * (i + 1) / 2 + (j - i - 1);
}

/// Position of e_i ^ e_j (i < j) in the Lambda^2 basis.
inline int alt_index(int n, int i, int j) { return i * n - i * (i + 1) / 2 + (j - i - 1); }

/// Coordinates of a Sym^2 basis element as an n x n matrix (1/2 convention off the diagonal).
inline Mat sym_basis_matrix(int n, int a) {
    const auto [i, j] = sym_basis_pairs(n)[a];
    Mat e = Mat::Zero(n, n);
    e(i, j) += 0.5;
    e(j, i) += 0.5;
    return e;
}

inline Mat alt_basis_matrix(int n, int a) {
    const auto [i, j] = alt_basis_pairs(n)[a];
    Mat e = Mat::Zero(n, n);
    e(i, j) = 0.5;
    e(j, i) = -0.5;
    return e;
}

/// Sym^2 basis coordinates -> symmetric n x n matrix.
inline Mat sym_vector_to_matrix(int n, const Vec &v) {
    Mat q = Mat::Zero(n, n);
    for (int a = 0; a < sym_size(n); ++a) q += v(a) * sym_basis_matrix(n, a);
    return q;
}

inline Mat alt_vector_to_matrix(int n, const Vec &v) {
    Mat q = Mat::Zero(n, n);
    for (int a = 0; a < alt_size(n); ++a) q += v(a) * alt_basis_matrix(n, a);
    return q;
}

/// S(P, Q) for two-tensors P, Q given as n x n matrices.
inline double evaluate(const WTensor &s, const Mat &p, const Mat &q) {
    const int n = s.n();
    double acc = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (p(i, j) == 0.0) continue;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) acc += p(i, j) * s(i, j, k, l) * q(k, l);
        }
    return acc;
}

inline SymForm restrict_sym(const WTensor &s) {
    const int n = s.n();
    const int ns = sym_size(n);
    std::vector<Mat> basis;
    for (int a = 0; a < ns; ++a) basis.push_back(sym_basis_matrix(n, a));
    SymForm out{n, Mat(ns, ns)};
    for (int a = 0; a < ns; ++a)
        for (int b = a; b < ns; ++b) out.m(a, b) = out.m(b, a) = evaluate(s, basis[a], basis[b]);
    return out;
}

inline AltForm restrict_alt(const WTensor &s) {
    const int n = s.n();
    const int na = alt_size(n);
    std::vector<Mat> basis;
    for (int a = 0; a < na; ++a) basis.push_back(alt_basis_matrix(n, a));
    AltForm out{n, Mat(na, na)};
    for (int a = 0; a < na; ++a)
        for (int b = a; b < na; ++b) out.m(a, b) = out.m(b, a) = evaluate(s, basis[a], basis[b]);
    return out;
}

namespace detail {

// T(e_i v e_j, e_k v e_l)
inline double sym_entry(const SymForm &t, int i, int j, int k, int l) {
    return t.m(sym_index(t.n, i, j), sym_index(t.n, k, l));
}

// h(T)(e_i ^ e_j, e_k ^ e_l) for arbitrary indices.
inline double h_entry(const SymForm &t, int i, int j, int k, int l) {
    return sym_entry(t, i, l, j, k) - sym_entry(t, i, k, j, l);
}

// A(e_i ^ e_j, e_k ^ e_l) extended antisymmetrically to all index pairs.
inline double alt_entry(const AltForm &a, int i, int j, int k, int l) {
    if (i == j || k == l) return 0.0;
    double sign = 1.0;
    if (i > j) {
        std::swap(i, j);
        sign = -sign;
    }
    if (k > l) {
        std::swap(k, l);
        sign = -sign;
    }
    return sign * a.m(alt_index(a.n, i, j), alt_index(a.n, k, l));
}

} // namespace detail

/// h(T)(e_i ^ e_j, e_k ^ e_l) = T(e_i v e_l, e_j v e_k) - T(e_i v e_k, e_j v e_l).
inline AltForm h_map(const SymForm &t) {
    const int n = t.n;
    const auto pairs = alt_basis_pairs(n);
    const int na = alt_size(n);
    AltForm out{n, Mat(na, na)};
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < na; ++b)
            out.m(a, b) = detail::h_entry(t, pairs[a].first, pairs[a].second, pairs[b].first, pairs[b].second);
    return out;
}

/// Components of a form on Lambda^2 read as an antisymmetric-pair 4-tensor.
inline WTensor alt_form_tensor(const AltForm &a) {
    const int n = a.n;
    WTensor out(FlavorDim{n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) out(i, j, k, l) = detail::alt_entry(a, i, j, k, l);
    return out;
}

/// Components of S with S(v1,v2,v3,v4) = T(v1 v v2, v3 v v4) + h(T)(v1 ^ v2, v3 ^ v4), before projection.
inline WTensor r_inverse_raw(const SymForm &t) {
    const int n = t.n;
    WTensor out(FlavorDim{n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    out(i, j, k, l) = detail::sym_entry(t, i, j, k, l) + detail::h_entry(t, i, j, k, l);
    return out;
}

/// The unique S in W with restrict_sym(S) = T.
inline WTensor r_inverse(const SymForm &t) { return project_w(r_inverse_raw(t)); }

/// Max-norm of the cyclic sum A(v1,v2,v3,v4) + A(v2,v3,v1,v4) + A(v3,v1,v2,v4).
inline double bianchi_residual(const AltForm &a) {
    const int n = a.n;
    double r = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const double c = detail::alt_entry(a, i, j, k, l) + detail::alt_entry(a, j, k, i, l) +
                                     detail::alt_entry(a, k, i, j, l);
                    r = std::max(r, std::abs(c));
                }
    return r;
}

constexpr double kBianchiTolerance = 1e-10;

/// sigma_A = 2/3 (A + tau A), with (tau A)(v1,v2,v3,v4) = A(v1,v4,v3,v2).
/// Requires A to be an algebraic curvature tensor (automatic for n <= 3).
inline WTensor sigma(const AltForm &a) {
    const int n = a.n;
    if (n >= 4) {
        const double scale = std::max(1.0, a.m.cwiseAbs().maxCoeff());
        const double res = bianchi_residual(a);
        if (res >= kBianchiTolerance * scale)
            throw Error("sigma: form violates the Bianchi identity (residual " + std::to_string(res) + ")");
    }
    const WTensor at = alt_form_tensor(a);
    WTensor out(FlavorDim{n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) out(i, j, k, l) = 2.0 / 3.0 * (at(i, j, k, l) + at(i, l, k, j));
    return out;
}

} // namespace posicone
