#pragma once

// Four-tensors on an n-dimensional flavor space and the subspace W of tensors
// with the pair-exchange, crossing (tau) and simultaneous-swap symmetries.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace posicone {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

constexpr int kMaxFlavors = 8;

/// Number of flavors, 1 <= n <= 8.
class FlavorDim {
  public:
    constexpr FlavorDim() = default;
    explicit FlavorDim(int n) : n_(n) {
        if (n < 1 || n > kMaxFlavors)
            throw Error("flavor dimension must lie in [1, 8], got " + std::to_string(n));
    }
    constexpr int value() const { return n_; }
    constexpr operator int() const { return n_; }

  private:
    int n_ = 3;
};

/// dim W = n(n+1)(n(n+1)+2)/8.
constexpr long dim_w(int n) {
    const long m = static_cast<long>(n) * (n + 1);
    return m * (m + 2) / 8;
}

using Index4 = std::array<int, 4>;

/// The order-8 group of slot permutations generated by (k,l,i,j), (i,l,k,j) and (j,i,l,k).
/// It is the dihedral group of the square with corners in slot order.
inline std::array<Index4, 8> symmetry_orbit(const Index4 &x) {
    const auto [i, j, k, l] = x;
    return {{{i, j, k, l},
             {j, k, l, i},
             {k, l, i, j},
             {l, i, j, k},
             {i, l, k, j},
             {k, j, i, l},
             {j, i, l, k},
             {l, k, j, i}}};
}

/// Dense real 4-tensor, component (i,j,k,l) = S(e_i, e_j, e_k, e_l).
/// The same type carries elements of W and of the dual space W*; pairing is full contraction.
class WTensor {
  public:
    WTensor() : WTensor(FlavorDim(3)) {}
    explicit WTensor(FlavorDim n) : n_(n.value()), comp_(static_cast<std::size_t>(n_) * n_ * n_ * n_, 0.0) {}

    int n() const { return n_; }
    std::size_t size() const { return comp_.size(); }

    double &operator()(int i, int j, int k, int l) { return comp_[offset(i, j, k, l)]; }
    double operator()(int i, int j, int k, int l) const { return comp_[offset(i, j, k, l)]; }
    double &operator()(const Index4 &x) { return (*this)(x[0], x[1], x[2], x[3]); }
    double operator()(const Index4 &x) const { return (*this)(x[0], x[1], x[2], x[3]); }

    std::span<double> data() { return comp_; }
    std::span<const double> data() const { return comp_; }

    std::size_t offset(int i, int j, int k, int l) const {
        return ((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l;
    }

    WTensor &operator+=(const WTensor &o) {
        check_same(o);
        for (std::size_t a = 0; a < comp_.size(); ++a) comp_[a] += o.comp_[a];
        return *this;
    }
    WTensor &operator-=(const WTensor &o) {
        check_same(o);
        for (std::size_t a = 0; a < comp_.size(); ++a) comp_[a] -= o.comp_[a];
        return *this;
    }
    WTensor &operator*=(double s) {
        for (double &c : comp_) c *= s;
        return *this;
    }
    friend WTensor operator+(WTensor a, const WTensor &b) { return a += b; }
    friend WTensor operator-(WTensor a, const WTensor &b) { return a -= b; }
    friend WTensor operator*(double s, WTensor a) { return a *= s; }
    friend WTensor operator*(WTensor a, double s) { return a *= s; }
    friend WTensor operator-(WTensor a) { return a *= -1.0; }

    double frobenius() const {
        double s = 0;
        for (double c : comp_) s += c * c;
        return std::sqrt(s);
    }
    double max_abs() const {
        double m = 0;
        for (double c : comp_) m = std::max(m, std::abs(c));
        return m;
    }

    /// Largest violation of the three generator symmetries.
    double symmetry_residual() const {
        double r = 0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    for (int l = 0; l < n_; ++l) {
                        const double v = (*this)(i, j, k, l);
                        r = std::max({r, std::abs(v - (*this)(k, l, i, j)), std::abs(v - (*this)(i, l, k, j)),
                                      std::abs(v - (*this)(j, i, l, k))});
                    }
        return r;
    }

    void check_same(const WTensor &o) const {
        if (o.n_ != n_) throw Error("flavor dimension mismatch");
    }

  private:
    int n_;
    std::vector<double> comp_;
};

inline double max_abs_diff(const WTensor &a, const WTensor &b) { return (a - b).max_abs(); }

/// Orthogonal projection onto W: average over the order-8 slot symmetry group.
inline WTensor project_w(const WTensor &raw) {
    const int n = raw.n();
    WTensor out(FlavorDim{n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0;
                    for (const auto &p : symmetry_orbit({i, j, k, l})) s += raw(p);
                    out(i, j, k, l) = s / 8.0;
                }
    return out;
}

/// Totally symmetric product with the 1/k! normalization.
inline WTensor sym_product(const Vec &b1, const Vec &b2, const Vec &b3, const Vec &b4) {
    const int n = static_cast<int>(b1.size());
    if (b2.size() != n || b3.size() != n || b4.size() != n) throw Error("covectors must share a flavor dimension");
    const std::array<const Vec *, 4> f{&b1, &b2, &b3, &b4};
    std::array<int, 4> perm{0, 1, 2, 3};
    WTensor out(FlavorDim{n});
    do {
        const Vec &p = *f[perm[0]], &q = *f[perm[1]], &r = *f[perm[2]], &s = *f[perm[3]];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) out(i, j, k, l) += p(i) * q(j) * r(k) * s(l);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out *= 1.0 / 24.0;
}

inline WTensor sym_power(const Vec &a) {
    const int n = static_cast<int>(a.size());
    WTensor out(FlavorDim{n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) out(i, j, k, l) = a(i) * a(j) * a(k) * a(l);
    return out;
}

/// a (x) b (x) c (x) d, unsymmetrized.
inline WTensor outer4(const Vec &a, const Vec &b, const Vec &c, const Vec &d) {
    const int n = static_cast<int>(a.size());
    WTensor out(FlavorDim{n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) out(i, j, k, l) = a(i) * b(j) * c(k) * d(l);
    return out;
}

/// Total symmetrization over all 24 slot permutations.
inline WTensor tot(const WTensor &s) {
    const int n = s.n();
    WTensor out(FlavorDim{n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    std::array<int, 4> idx{i, j, k, l};
                    std::array<int, 4> perm{0, 1, 2, 3};
                    double acc = 0;
                    do {
                        acc += s(idx[perm[0]], idx[perm[1]], idx[perm[2]], idx[perm[3]]);
                    } while (std::next_permutation(perm.begin(), perm.end()));
                    out(i, j, k, l) = acc / 24.0;
                }
    return out;
}

/// Natural pairing: full contraction of all four slots.
inline double pair(const WTensor &s, const WTensor &m) {
    s.check_same(m);
    const auto a = s.data();
    const auto b = m.data();
    double acc = 0;
    for (std::size_t x = 0; x < a.size(); ++x) acc += a[x] * b[x];
    return acc;
}

/// S as a bilinear form on V (x) V: G[(i,j),(k,l)] = S_ijkl with flat index i*n + j.
inline Mat gram(const WTensor &s) {
    const int n = s.n();
    Mat g(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) g(i * n + j, k * n + l) = s(i, j, k, l);
    return g;
}

inline WTensor from_gram(const Mat &g, int n) {
    WTensor s(FlavorDim{n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) s(i, j, k, l) = g(i * n + j, k * n + l);
    return s;
}

/// Contraction of all four slots with a linear map: result_ijkl = sum S_pqrs A_pi A_qj A_rk A_sl.
/// For S on V* this is the pullback A^*S; applied to M on V with A^T it is the induced action on W*.
inline WTensor contract_all_slots(const WTensor &s, const Mat &a) {
    const int n = s.n();
    if (a.rows() != n || a.cols() != n) throw Error("matrix size does not match flavor dimension");
    WTensor cur = s;
    // One slot at a time; cyclically rotate the slots so the next one lands in front.
    for (int slot = 0; slot < 4; ++slot) {
        WTensor next(FlavorDim{n});
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                for (int r = 0; r < n; ++r)
                    for (int i = 0; i < n; ++i) {
                        double acc = 0;
                        for (int t = 0; t < n; ++t) acc += cur(t, p, q, r) * a(t, i);
                        next(p, q, r, i) = acc;
                    }
        cur = std::move(next);
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Free-component coordinates.

namespace detail {

inline Index4 orbit_representative(const Index4 &x) {
    auto orbit = symmetry_orbit(x);
    return *std::min_element(orbit.begin(), orbit.end());
}

// The named 21-coefficient listing m1..m21 (0-based indices).
inline const std::vector<Index4> &named_three_flavor_keys() {
    static const std::vector<Index4> keys = [] {
        const char *names[] = {"1111", "1112", "1113", "1122", "1212", "1123", "1213",
                               "1133", "1313", "1222", "1223", "1232", "1233", "1323",
                               "1333", "2222", "2223", "2233", "2323", "2333", "3333"};
        std::vector<Index4> out;
        for (const char *nm : names) out.push_back({nm[0] - '1', nm[1] - '1', nm[2] - '1', nm[3] - '1'});
        return out;
    }();
    return keys;
}

} // namespace detail

/// Orbit representatives in canonical order: the m1..m21 listing for n = 3,
/// lexicographic minimal representatives otherwise.
inline std::vector<Index4> canonical_keys(int n) {
    if (n == 3) return detail::named_three_flavor_keys();
    std::set<Index4> reps;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) reps.insert(detail::orbit_representative({i, j, k, l}));
    return {reps.begin(), reps.end()};
}

/// "M1111"-style name of a canonical key (1-based digits).
inline std::string key_name(const Index4 &k) {
    std::string s = "M";
    for (int x : k) s += static_cast<char>('1' + x);
    return s;
}

inline Vec to_coeffs(const WTensor &s) {
    const auto keys = canonical_keys(s.n());
    Vec c(static_cast<Eigen::Index>(keys.size()));
    for (std::size_t a = 0; a < keys.size(); ++a) c(static_cast<Eigen::Index>(a)) = s(keys[a]);
    return c;
}

inline WTensor from_coeffs(std::span<const double> c, FlavorDim n) {
    const auto keys = canonical_keys(n);
    if (c.size() != keys.size())
        throw Error("coefficient vector has length " + std::to_string(c.size()) + ", expected " +
                    std::to_string(keys.size()));
    WTensor s(n);
    for (std::size_t a = 0; a < keys.size(); ++a)
        for (const auto &p : symmetry_orbit(keys[a])) s(p) = c[a];
    return s;
}

inline WTensor from_coeffs(const Vec &c, FlavorDim n) {
    return from_coeffs(std::span<const double>(c.data(), static_cast<std::size_t>(c.size())), n);
}

/// Basis of W given by the canonical unit coefficient vectors.
inline std::vector<WTensor> w_basis(FlavorDim n) {
    const long d = dim_w(n);
    std::vector<WTensor> out;
    out.reserve(static_cast<std::size_t>(d));
    for (long a = 0; a < d; ++a) {
        Vec c = Vec::Zero(d);
        c(a) = 1.0;
        out.push_back(from_coeffs(c, n));
    }
    return out;
}

/// Matrix of project_w acting on the n^4-dimensional component space.
inline Mat projection_operator(FlavorDim n) {
    const int m = n * n * n * n;
    Mat p(m, m);
    WTensor unit(n);
    for (int a = 0; a < m; ++a) {
        std::fill(unit.data().begin(), unit.data().end(), 0.0);
        unit.data()[a] = 1.0;
        const WTensor col = project_w(unit);
        for (int b = 0; b < m; ++b) p(b, a) = col.data()[b];
    }
    return p;
}

} // namespace posicone
