#include <gtest/gtest.h>

#include "posicone/chpt.hpp"
#include "posicone/symmetry.hpp"
#include "test_util.hpp"

using namespace posicone;

TEST(O3Tensor, ZeroAndClosedForm) {
    EXPECT_EQ(o3_tensor(0, 0).max_abs(), 0.0);
    std::mt19937_64 rng(80);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 10; ++t) {
        const double a1 = nd(rng), a2 = nd(rng);
        const WTensor m = o3_tensor(a1, a2);
        EXPECT_LT(m.symmetry_residual(), 1e-14);
        // a1 (d_ab d_cd + d_ad d_bc) + (a2 - a1) d_ac d_bd
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        const double e = a1 * ((i == j && k == l) + (i == l && j == k)) + (a2 - a1) * (i == k && j == l);
                        EXPECT_NEAR(m(i, j, k, l), e, 1e-14);
                    }
    }
}

TEST(O3Tensor, OnlyTheConstrainedThirdCoefficientIsTauSymmetric) {
    // rebuild with a free a3 and check the crossing symmetry fails off the constraint
    auto build = [](double a1, double a2, double a3) {
        WTensor m(FlavorDim{3});
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l)
                        m(i, j, k, l) = a1 * (i == j && k == l) + 0.5 * a2 * ((i == k && j == l) + (i == l && j == k)) +
                                        0.25 * a3 * ((i == k && j == l) - (i == l && j == k));
        return m;
    };
    EXPECT_LT(max_abs_diff(build(1, 2, 2 * 2 - 4 * 1), o3_tensor(1, 2)), 1e-14);
    EXPECT_GT(build(1, 2, 1).symmetry_residual(), 0.1);
}

TEST(InvariantBasis, Dimensions) {
    EXPECT_EQ(invariant_basis(Sector::O3).dim(), 2);
    EXPECT_EQ(invariant_basis(Sector::Z2Cubed).dim(), 9);
    const int so2 = invariant_basis(Sector::SO2).dim();
    EXPECT_GT(so2, 2);
    EXPECT_LT(so2, 9);
}

TEST(InvariantBasis, SO2InsideZ2Cubed) {
    const Mat z2 = invariance_equations(Sector::Z2Cubed);
    const SymmetrySector so2 = invariant_basis(Sector::SO2);
    EXPECT_LT((z2 * so2.basis).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(InvariantBasis, O3TensorInEverySector) {
    const Vec c = to_coeffs(o3_tensor(0.7, -1.3));
    for (Sector s : {Sector::O3, Sector::Z2Cubed, Sector::SO2}) {
        const SymmetrySector sec = invariant_basis(s);
        const Vec proj = sec.basis * (sec.basis.transpose() * c);
        EXPECT_LT((proj - c).norm(), 1e-12) << to_string(s);
        EXPECT_LT(invariance_residual(o3_tensor(0.7, -1.3), s).second, 1e-12);
    }
}

TEST(InvariantBasis, Z2CubedIsEvenIndexComponents) {
    const SymmetrySector z2 = invariant_basis(Sector::Z2Cubed);
    std::mt19937_64 rng(81);
    for (int t = 0; t < 10; ++t) {
        const Vec c = z2.basis * testutil::normal_vec(rng, 9);
        const WTensor m = from_coeffs(c, FlavorDim{3});
        EXPECT_LT(max_abs_diff(z2_project(m), m), 1e-12);
    }
}

TEST(InvariantBasis, ChptIsO3Invariant) {
    EXPECT_LT(invariance_residual(chpt_tensor({0.3, -0.8}), Sector::O3).second, 1e-12);
}

TEST(Z2Project, Properties) {
    std::mt19937_64 rng(82);
    for (int t = 0; t < 30; ++t) {
        const WTensor s = testutil::random_w(rng, 3), u = testutil::random_w(rng, 3);
        const WTensor p = z2_project(s);
        EXPECT_EQ(max_abs_diff(z2_project(p), p), 0.0);
        EXPECT_LT(p.symmetry_residual(), 1e-15);
        EXPECT_LE(p.frobenius(), s.frobenius() + 1e-15);
        EXPECT_LT(max_abs_diff(z2_project(2.0 * s + u), 2.0 * p + z2_project(u)), 1e-14);
        EXPECT_LT(invariance_residual(p, Sector::Z2Cubed).second, 1e-12);
    }
}

TEST(Z2Project, RankDoesNotDrop) {
    std::mt19937_64 rng(83);
    for (int t = 0; t < 50; ++t) {
        const WTensor s = testutil::random_ray_sum(rng, 1 + t % 4);
        EXPECT_GE(numerical_rank(gram(z2_project(s))), numerical_rank(gram(s)));
    }
}

TEST(Z2Project, ProjectedType3IsNotExtremal) {
    const WTensor p = z2_project(ray_type3(1, 2, 0));
    EXPECT_TRUE(in_cone(p));
    EXPECT_FALSE(is_extremal(p));
    const FaceSpace f = face_space(p);
    EXPECT_GT(f.dim, 1);
    // some elastic ray inside the face: its kernel strictly contains the projected kernel
    const Classification c = classify(p);
    EXPECT_EQ(c.kind, RayClass::NotExtremal);
}

TEST(SectorMembership, O3Examples) {
    BoundConfig cfg;
    cfg.inelastic.samples = 3000;
    cfg.inelastic.refine = 8;
    const SectorReport good = sector_membership(o3_tensor(1, 1.5), Sector::O3, cfg);
    EXPECT_EQ(good.bounds.verdict, Verdict::PassesAllSampled);
    EXPECT_GT(good.bounds.inelastic.margin, 0.0);
    EXPECT_TRUE(good.consistent);
    EXPECT_EQ(sector_membership(o3_tensor(1, 0.9), Sector::O3, cfg).bounds.verdict, Verdict::ViolatesElastic);
}

TEST(SectorMembership, RejectsNonInvariant) {
    std::mt19937_64 rng(84);
    const WTensor m = testutil::random_w(rng, 3);
    try {
        sector_membership(m, Sector::Z2Cubed);
        FAIL() << "expected a SectorError";
    } catch (const SectorError &e) {
        EXPECT_GE(e.equation(), 0);
    }
}

TEST(SectorMembership, Z2CubedElasticPassHasNoInelasticViolation) {
    std::mt19937_64 rng(85);
    BoundConfig cfg;
    cfg.inelastic.samples = 2000;
    cfg.inelastic.refine = 4;
    int elastic_pass = 0;
    for (int t = 0; t < 8; ++t) {
        // projected duals: z2_project of positive kernel functionals stays in the dual cone
        WTensor m(FlavorDim{3});
        for (int a = 0; a < 3; ++a) {
            const Vec u = testutil::normal_vec(rng, 9);
            m += project_w(from_gram(u * u.transpose(), 3));
        }
        m = z2_project(m);
        const SectorReport r = sector_membership(m, Sector::Z2Cubed, cfg);
        elastic_pass += r.bounds.elastic.pass;
        EXPECT_TRUE(r.consistent);
    }
    EXPECT_GT(elastic_pass, 0);
}

// Pairing a diagonal-frame Type3 ray with an O(3) element, written out by hand.
TEST(O3Closed, DiagonalFrameIntegrand) {
    std::mt19937_64 rng(86);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 20; ++t) {
        const double a1 = nd(rng), a2 = nd(rng);
        const double l1 = nd(rng), l2 = nd(rng), l3 = nd(rng);
        const double d = nd(rng), h = nd(rng);
        const double g = std::sqrt(std::max(0.0, 1 - d * d + d * h) + 0.5 + std::abs(nd(rng)));
        const double c = g * g + d * d - 1 - d * h;
        Mat lam = Mat::Zero(3, 3);
        lam.diagonal() << l1, l2, l3;
        const double x1 = l1 * l1, x2 = l2 * l2, x3 = l3 * l3;
        const double expected =
            (a1 + a2) * (x1 * x1 + 2 * x1 * x2 + 2 * x1 * x3 + (1 + d * d) * x2 * x2 + 2 * (1 + d * h) * x2 * x3 +
                         (1 + g * g + h * h) * x3 * x3) +
            4 * (a2 - a1) * c * x2 * x3;
        const double got = pair(ray_type3(lam, d, g, h), o3_tensor(a1, a2));
        EXPECT_NEAR(got, expected, 1e-9 * (1 + std::abs(expected)));
    }
}
