#pragma once

// Invariant subspaces of W* for three flavors under O(3), the reflection group Z2^3
// and rotations about e3, and the block projection onto even-index components.

#include <string>
#include <vector>

#include <Eigen/SVD>

#include "posicone/bounds.hpp"
#include "posicone/maps.hpp"
#include "posicone/tensor_space.hpp"

namespace posicone {

enum class Sector { O3, Z2Cubed, SO2 };

inline const char *to_string(Sector s) {
    switch (s) {
    case Sector::O3: return "o3";
    case Sector::Z2Cubed: return "z2cubed";
    case Sector::SO2: return "so2";
    }
    return "?";
}

inline Sector parse_sector(const std::string &s) {
    if (s == "o3") return Sector::O3;
    if (s == "z2cubed") return Sector::Z2Cubed;
    if (s == "so2") return Sector::SO2;
    throw Error("unknown symmetry sector '" + s + "'");
}

/// a1 (sum e_i^2)^2 + a2 (sum e_i^4 + 2 sum (e_i v e_j)^2) + a3 sum (e_i ^ e_j)^2 with a3 = 2 a2 - 4 a1,
/// all sums over i < j for the mixed terms.
inline WTensor o3_tensor(double a1, double a2) {
    const double a3 = 2.0 * a2 - 4.0 * a1;
    const int n = 3;
    auto sq = [](const Mat &p) {
        WTensor t(FlavorDim{3});
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) t(i, j, k, l) = p(i, j) * p(k, l);
        return t;
    };
    auto unit = [](int i, int j) {
        Mat e = Mat::Zero(3, 3);
        e(i, j) = 1.0;
        return e;
    };
    WTensor m(FlavorDim{3});
    m += a1 * sq(Mat::Identity(3, 3));
    for (int i = 0; i < n; ++i) m += a2 * sq(unit(i, i));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Mat vee = 0.5 * (unit(i, j) + unit(j, i));
            const Mat wedge = 0.5 * (unit(i, j) - unit(j, i));
            m += 2.0 * a2 * sq(vee);
            m += a3 * sq(wedge);
        }
    return m;
}

namespace detail {

inline Mat reflection(int axis) {
    Mat q = Mat::Identity(3, 3);
    q(axis, axis) = -1.0;
    return q;
}

// Infinitesimal rotation in the (a, b) plane.
inline Mat rotation_generator(int a, int b) {
    Mat x = Mat::Zero(3, 3);
    x(a, b) = 1.0;
    x(b, a) = -1.0;
    return x;
}

// D(M)_ijkl = sum_p X_pi M_pjkl + X_pj M_ipkl + X_pk M_ijpl + X_pl M_ijkp.
inline WTensor infinitesimal_action(const Mat &x, const WTensor &m) {
    WTensor out(FlavorDim{3});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    double s = 0;
                    for (int p = 0; p < 3; ++p)
                        s += x(p, i) * m(p, j, k, l) + x(p, j) * m(i, p, k, l) + x(p, k) * m(i, j, p, l) +
                             x(p, l) * m(i, j, k, p);
                    out(i, j, k, l) = s;
                }
    return out;
}

// Rows: coefficient equations L c = 0 for one linear map on W*.
template <class F> Mat equation_block(F &&map) {
    const auto basis = w_basis(FlavorDim{3});
    Mat a(21, 21);
    for (int c = 0; c < 21; ++c) a.col(c) = to_coeffs(map(basis[static_cast<std::size_t>(c)]));
    return a;
}

} // namespace detail

/// Stacked linear invariance equations on the 21 coefficients.
inline Mat invariance_equations(Sector s) {
    std::vector<Mat> blocks;
    auto reflect = [&](int axis) {
        const Mat q = detail::reflection(axis);
        blocks.push_back(detail::equation_block([&](const WTensor &m) { return act_dual(q, m) - m; }));
    };
    auto rotate = [&](int a, int b) {
        const Mat x = detail::rotation_generator(a, b);
        blocks.push_back(detail::equation_block([&](const WTensor &m) { return detail::infinitesimal_action(x, m); }));
    };
    switch (s) {
    case Sector::Z2Cubed:
        for (int a = 0; a < 3; ++a) reflect(a);
        break;
    case Sector::SO2: rotate(0, 1); break;
    case Sector::O3:
        for (int a = 0; a < 3; ++a) reflect(a);
        rotate(0, 1);
        rotate(0, 2);
        rotate(1, 2);
        break;
    }
    Mat out(21 * static_cast<Eigen::Index>(blocks.size()), 21);
    for (std::size_t b = 0; b < blocks.size(); ++b) out.middleRows(21 * static_cast<Eigen::Index>(b), 21) = blocks[b];
    return out;
}

struct SymmetrySector {
    Sector tag = Sector::O3;
    Mat basis; // 21 x dim, orthonormal columns of coefficient vectors
    int dim() const { return static_cast<int>(basis.cols()); }
};

inline SymmetrySector invariant_basis(Sector s) {
    const Mat eq = invariance_equations(s);
    Eigen::JacobiSVD<Mat> svd(eq, Eigen::ComputeFullV);
    const Vec sv = svd.singularValues();
    const double cut = 1e-10 * std::max(sv(0), 1.0);
    int rank = 0;
    for (Eigen::Index a = 0; a < sv.size(); ++a)
        if (sv(a) > cut) ++rank;
    return {s, svd.matrixV().rightCols(21 - rank)};
}

constexpr double kSectorTolerance = 1e-10;

/// Index of the worst invariance equation and its residual.
inline std::pair<int, double> invariance_residual(const WTensor &m, Sector s) {
    const Vec r = invariance_equations(s) * to_coeffs(m);
    Eigen::Index at = 0;
    const double v = r.cwiseAbs().maxCoeff(&at);
    return {static_cast<int>(at), v};
}

class SectorError : public Error {
  public:
    SectorError(const std::string &msg, int equation) : Error(msg), equation_(equation) {}
    int equation() const { return equation_; }

  private:
    int equation_;
};

/// Keep only components in which every index occurs an even number of times.
inline WTensor z2_project(const WTensor &s) {
    if (s.n() != 3) throw Error("z2_project needs three flavors");
    WTensor out(FlavorDim{3});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    int count[3] = {0, 0, 0};
                    ++count[i];
                    ++count[j];
                    ++count[k];
                    ++count[l];
                    if (count[0] % 2 == 0 && count[1] % 2 == 0 && count[2] % 2 == 0) out(i, j, k, l) = s(i, j, k, l);
                }
    return out;
}

struct SectorReport {
    BoundReport bounds;
    double invariance_residual = 0;
    // elastic pass implies no sampled inelastic violation
    bool consistent = true;
};

inline SectorReport sector_membership(const WTensor &m, Sector s, const BoundConfig &cfg = {}) {
    const auto [eq, res] = invariance_residual(m, s);
    if (res > kSectorTolerance * std::max(1.0, m.frobenius()))
        throw SectorError(std::string("tensor is not ") + to_string(s) + "-invariant: equation " + std::to_string(eq) +
                              " has residual " + std::to_string(res),
                          eq);
    SectorReport r;
    r.invariance_residual = res;
    r.bounds = membership(m, cfg);
    r.consistent = !(r.bounds.elastic.pass && !r.bounds.inelastic.pass);
    return r;
}

} // namespace posicone
