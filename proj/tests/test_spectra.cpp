#include <gtest/gtest.h>

#include "posicone/rays.hpp"
#include "posicone/spectra.hpp"
#include "test_util.hpp"

using namespace posicone;

TEST(PsdCheck, Basics) {
    const PsdResult id = psd_check(Mat::Identity(4, 4));
    EXPECT_TRUE(id.psd);
    EXPECT_NEAR(id.min_eig, 1.0, 1e-15);
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 1;
    d(1, 1) = -1;
    const PsdResult r = psd_check(d);
    EXPECT_FALSE(r.psd);
    EXPECT_NEAR(r.min_eig, -1.0, 1e-15);
    EXPECT_TRUE(psd_check(gram(ray_type3(0, 2, 0))).psd);
}

TEST(PsdCheck, RejectsNonSymmetric) {
    Mat m = Mat::Identity(3, 3);
    m(0, 1) = 1.0;
    EXPECT_THROW(psd_check(m), Error);
}

TEST(KernelBasisTest, ZeroMatrixIsFullSpace) {
    const KernelBasis kb = kernel_basis(Mat::Zero(4, 4));
    EXPECT_EQ(kb.dim(), 4);
    EXPECT_EQ(kb.rank(), 0);
}

TEST(KernelBasisTest, OrthonormalAndAnnihilated) {
    std::mt19937_64 rng(40);
    const Mat b = testutil::normal_mat(rng, 6, 3);
    const Mat form = b * b.transpose();
    const KernelBasis kb = kernel_basis(form);
    ASSERT_EQ(kb.dim(), 3);
    EXPECT_LT((kb.basis.transpose() * kb.basis - Mat::Identity(3, 3)).norm(), 1e-12);
    EXPECT_LT((form * kb.basis).norm(), 1e-9 * form.norm());
}

TEST(KernelBasisTest, Type3SymKernelMatchesExplicitBasis) {
    const Mat r = restrict_sym(ray_type3(1, 2, 0)).m;
    const KernelBasis kb = kernel_basis(r);
    ASSERT_EQ(kb.dim(), 3);
    Mat e(6, 3);
    const auto vs = type3_expected_kernel(1, 2, 0);
    for (int a = 0; a < 3; ++a) e.col(a) = vs[a];
    const Eigen::HouseholderQR<Mat> qr(e);
    const Mat q = qr.householderQ() * Mat::Identity(6, 3);
    EXPECT_LT((q * q.transpose() - kb.basis * kb.basis.transpose()).norm(), 1e-9);
}

TEST(KernelBasisTest, Type2AltKernel) {
    EXPECT_EQ(kernel_basis(restrict_alt(ray_type2(Vec::Unit(3, 0), Vec::Unit(3, 1))).m).dim(), 2);
}

TEST(InCone, Basics) {
    const WTensor a = sym_power(Vec::Unit(3, 0));
    EXPECT_TRUE(in_cone(a));
    EXPECT_FALSE(in_cone(-a));
    std::mt19937_64 rng(41);
    for (int t = 0; t < 20; ++t) EXPECT_FALSE(in_cone(sigma(testutil::random_alt_form(rng, 3))));
}

TEST(FaceSpaceTest, FourthPowerIsLine) {
    const FaceSpace f = face_space(sym_power(Vec::Unit(3, 0)));
    EXPECT_EQ(f.dim, 1);
    EXPECT_EQ(f.kernel.dim(), 8);
}

TEST(FaceSpaceTest, SumOfPowersIsBigger) {
    const WTensor s = sym_power(Vec::Unit(3, 0)) + sym_power(Vec::Unit(3, 1));
    const FaceSpace f = face_space(s);
    EXPECT_GE(f.dim, 2);
    EXPECT_LT(span_residual(s, f.basis), 1e-10);
}

TEST(FaceSpaceTest, InteriorPointHasFullFace) {
    std::mt19937_64 rng(42);
    const WTensor s = testutil::random_ray_sum(rng, 60);
    EXPECT_EQ(face_space(s).kernel.dim(), 0);
    EXPECT_EQ(face_space(s).dim, 21);
}

TEST(FaceSpaceTest, RejectsOutsideCone) {
    EXPECT_THROW(face_space(-sym_power(Vec::Unit(3, 0))), Error);
}

TEST(FaceSpaceTest, ContainsS) {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 30; ++t) {
        const WTensor s = testutil::random_ray_sum(rng, 1 + t % 5);
        EXPECT_LT(span_residual(s, face_space(s).basis), 1e-10 * s.frobenius());
    }
}

TEST(IsExtremal, KnownRays) {
    const Vec a1 = Vec::Unit(3, 0), a2 = Vec::Unit(3, 1);
    EXPECT_TRUE(is_extremal(ray_type2(a1, a1 + a2)));
    EXPECT_TRUE(is_extremal(ray_type3(0, 2, 0)));
    EXPECT_FALSE(is_extremal(sym_power(a1) + sym_power(a2)));
    // the totally symmetric part at the boundary (0, 1, 0), where the antisymmetric term vanishes
    const WTensor boundary = s_tot(0, 1, 0);
    EXPECT_TRUE(in_cone(boundary));
    EXPECT_FALSE(is_extremal(boundary));
    EXPECT_GT(face_space(boundary).dim, 1);
    EXPECT_EQ(numerical_rank(restrict_sym(boundary).m), 3);
}

TEST(IsExtremal, ZeroRejected) { EXPECT_THROW(is_extremal(WTensor(FlavorDim{3})), Error); }

TEST(IsExtremal, ScaleInvariant) {
    RaySampler sampler(44);
    for (int t = 0; t < 20; ++t) {
        const WTensor s = to_tensor(sampler.sample(RayKind::Mixed));
        EXPECT_EQ(is_extremal(s), is_extremal(7.5 * s));
        EXPECT_EQ(is_extremal(s), is_extremal(0.01 * s));
    }
}

TEST(IsExtremal, NecessaryConditionsOnExtremalRays) {
    RaySampler sampler(45);
    std::mt19937_64 rng(46);
    for (int t = 0; t < 60; ++t) {
        WTensor s = to_tensor(sampler.sample(RayKind::Mixed));
        if (t % 3 == 0) s += to_tensor(sampler.sample(RayKind::Mixed)); // mostly non-extremal
        if (!is_extremal(s)) continue;
        EXPECT_GE(kernel_basis(gram(s)).dim(), 4);
        EXPECT_GE(kernel_basis(restrict_sym(s).m).dim(), 1);
        EXPECT_GE(kernel_basis(restrict_alt(s).m).dim(), 1);
    }
}

// With two flavors every extremal ray has a rank-one symmetric restriction.
TEST(IsExtremal, TwoFlavorsRankOneSym) {
    std::mt19937_64 rng(47);
    int extremal = 0;
    for (int t = 0; t < 100; ++t) {
        const Vec a = testutil::normal_vec(rng, 2), b = testutil::normal_vec(rng, 2);
        WTensor s = (t % 2) ? ray_type2(a, b) : sym_power(a);
        if (t % 5 == 0) s += sym_power(testutil::normal_vec(rng, 2));
        if (t % 7 == 0) s += ray_type2(testutil::normal_vec(rng, 2), testutil::normal_vec(rng, 2));
        if (is_extremal(s)) {
            ++extremal;
            EXPECT_EQ(numerical_rank(restrict_sym(s).m), 1);
        }
    }
    EXPECT_GT(extremal, 50);
}

TEST(FindDegenerate, IdentityPlusCoordinateProjector) {
    Mat t2 = Mat::Zero(3, 3);
    t2(0, 0) = 1.0;
    const DegenerateElement r = find_degenerate(Mat::Identity(3, 3), t2);
    EXPECT_FALSE(r.second_only);
    EXPECT_NEAR(r.t, -1.0, 1e-14);
    Mat expected = Mat::Identity(3, 3);
    expected(0, 0) = 0.0;
    EXPECT_LT((r.form - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(FindDegenerate, AlreadyDegenerate) {
    Mat t1 = Mat::Identity(3, 3);
    t1(2, 2) = 0.0;
    const DegenerateElement r = find_degenerate(t1, Mat::Identity(3, 3));
    EXPECT_EQ(r.t, 0.0);
}

TEST(FindDegenerate, RandomPairs) {
    std::mt19937_64 rng(48);
    for (int t = 0; t < 100; ++t) {
        const Mat b = testutil::normal_mat(rng, 3, 3);
        const Mat t1 = b * b.transpose() + 0.1 * Mat::Identity(3, 3);
        const Mat t2 = testutil::symmetric_mat(rng, 3);
        const DegenerateElement r = find_degenerate(t1, t2);
        ASSERT_FALSE(r.second_only);
        const double scale = std::max(t1.cwiseAbs().maxCoeff(), r.form.cwiseAbs().maxCoeff());
        EXPECT_LT(std::abs(r.form.determinant()), 1e-10 * scale * scale * scale);
    }
}

TEST(FindDegenerate, SecondOnlyFallback) {
    Mat t2 = Mat::Zero(3, 3);
    t2(0, 1) = t2(1, 0) = 1.0;
    const DegenerateElement r = find_degenerate(Mat::Identity(3, 3), t2);
    // det(I + t T2) = 1 - t^2 has roots +-1
    EXPECT_FALSE(r.second_only);
    EXPECT_NEAR(std::abs(r.t), 1.0, 1e-14);
    Mat t1 = Mat::Identity(3, 3);
    t1(1, 1) = -1.0;
    // det(diag(1,-1,1) + t T2) = -(1 + t^2): no real root, T2 is singular
    const DegenerateElement s = find_degenerate(t1, t2);
    EXPECT_TRUE(s.second_only);
    EXPECT_LT(std::abs(s.form.determinant()), 1e-14);
}
