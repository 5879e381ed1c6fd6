#pragma once

// Two-flavor-coupling chiral Lagrangian example: the pion forward-limit tensor and its bounds.

#include "posicone/bounds.hpp"
#include "posicone/symmetry.hpp"

namespace posicone {

struct ChptParams {
    double l1 = 0, l2 = 0;
};

/// M_abcd = (2 l1 + l2)(d_ab d_cd + d_ad d_bc) + 2 l2 d_ac d_bd.
inline WTensor chpt_tensor(const ChptParams &p) {
    WTensor m(FlavorDim{3});
    const double a = 2.0 * p.l1 + p.l2;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    m(i, j, k, l) = a * ((i == j && k == l) + (i == l && j == k)) + 2.0 * p.l2 * (i == k && j == l);
    return m;
}

/// The same tensor as an O(3) element: a1 = 2 l1 + l2, a2 = 2 l1 + 3 l2.
inline std::pair<double, double> chpt_o3_coefficients(const ChptParams &p) {
    return {2.0 * p.l1 + p.l2, 2.0 * p.l1 + 3.0 * p.l2};
}

struct ChptReport {
    ChptParams params;
    bool l2_nonnegative = false;
    bool l1_plus_l2_nonnegative = false;
    bool analytic_pass = false;
    BoundReport bounds;
    bool agree = false; // analytic and numerical elastic verdicts coincide
};

inline ChptReport chpt_bounds(const ChptParams &p, const BoundConfig &cfg = {}) {
    ChptReport r;
    r.params = p;
    r.l2_nonnegative = p.l2 >= 0;
    r.l1_plus_l2_nonnegative = p.l1 + p.l2 >= 0;
    r.analytic_pass = r.l2_nonnegative && r.l1_plus_l2_nonnegative;
    r.bounds = membership(chpt_tensor(p), cfg);
    r.agree = r.analytic_pass == r.bounds.elastic.pass;
    return r;
}

/// Closed-form elastic margin: min over unit a, b of 2(2 l1 + l2)(a.b)^2 + 2 l2.
inline double chpt_elastic_margin(const ChptParams &p) { return std::min(2.0 * p.l2, 4.0 * p.l1 + 4.0 * p.l2); }

} // namespace posicone
