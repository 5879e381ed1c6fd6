#include <gtest/gtest.h>

#include <Eigen/SVD>

#include "posicone/maps.hpp"
#include "posicone/spectra.hpp"
#include "posicone/tensor_space.hpp"
#include "test_util.hpp"

using namespace posicone;

TEST(DimW, Formula) {
    EXPECT_EQ(dim_w(1), 1);
    EXPECT_EQ(dim_w(2), 6);
    EXPECT_EQ(dim_w(3), 21);
    EXPECT_EQ(dim_w(4), 55);
    EXPECT_EQ(dim_w(5), 120);
}

TEST(DimW, MatchesProjectionRank) {
    for (int n = 1; n <= 4; ++n) {
        const Mat p = projection_operator(FlavorDim{n});
        Eigen::JacobiSVD<Mat> svd(p);
        long rank = 0;
        for (Eigen::Index a = 0; a < svd.singularValues().size(); ++a)
            if (svd.singularValues()(a) > 1e-9) ++rank;
        EXPECT_EQ(rank, dim_w(n)) << "n=" << n;
        EXPECT_EQ(static_cast<long>(canonical_keys(n).size()), dim_w(n));
    }
}

TEST(FlavorDimTest, RejectsOutOfRange) {
    EXPECT_THROW(FlavorDim(0), Error);
    EXPECT_THROW(FlavorDim(9), Error);
    EXPECT_NO_THROW(FlavorDim(8));
}

TEST(ProjectW, FixesSymmetricTensor) {
    const WTensor a = sym_power(Vec::Unit(3, 0));
    EXPECT_EQ(max_abs_diff(project_w(a), a), 0.0);
}

TEST(ProjectW, SingleComponentAveragesOverOrbit) {
    WTensor raw(FlavorDim{3});
    raw(0, 1, 0, 1) = 1.0;
    const WTensor p = project_w(raw);
    // the orbit of 1212 under the slot group is {1212, 2121}
    EXPECT_DOUBLE_EQ(p(0, 1, 0, 1), 0.5);
    EXPECT_DOUBLE_EQ(p(1, 0, 1, 0), 0.5);
    EXPECT_DOUBLE_EQ(p(0, 1, 1, 0), 0.0);
    EXPECT_DOUBLE_EQ(p(1, 0, 0, 1), 0.0);
    EXPECT_DOUBLE_EQ(p(0, 0, 1, 1), 0.0);
    double total = 0;
    for (double c : p.data()) total += c;
    EXPECT_DOUBLE_EQ(total, 1.0);
}

TEST(ProjectW, IdempotentAndSymmetric) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        const WTensor x = testutil::random_raw(rng, 3);
        const WTensor p = project_w(x);
        EXPECT_LT(max_abs_diff(project_w(p), p), 1e-14);
        EXPECT_LT(p.symmetry_residual(), 1e-14);
    }
}

TEST(ProjectW, PairingIsCompatible) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 50; ++t) {
        const WTensor x = testutil::random_raw(rng, 3);
        const WTensor m = testutil::random_w(rng, 3);
        EXPECT_NEAR(pair(project_w(x), m), pair(x, m), 1e-12);
    }
}

TEST(SymProduct, Normalization) {
    const Vec a1 = Vec::Unit(3, 0), a2 = Vec::Unit(3, 1);
    const WTensor p = sym_power(a1);
    EXPECT_EQ(p(0, 0, 0, 0), 1.0);
    EXPECT_EQ(p.frobenius(), 1.0);
    const WTensor q = sym_product(a1, a1, a2, a2);
    EXPECT_DOUBLE_EQ(q(0, 0, 1, 1), 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(q(0, 1, 0, 1), 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(q(1, 0, 0, 1), 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(q(0, 0, 0, 1), 0.0);
}

TEST(SymProduct, PermutationInvariant) {
    std::mt19937_64 rng(13);
    const Vec a = testutil::normal_vec(rng, 3), b = testutil::normal_vec(rng, 3), c = testutil::normal_vec(rng, 3),
              d = testutil::normal_vec(rng, 3);
    const WTensor s = sym_product(a, b, c, d);
    EXPECT_LT(max_abs_diff(s, sym_product(d, c, b, a)), 1e-14);
    EXPECT_LT(max_abs_diff(s, sym_product(b, d, a, c)), 1e-14);
    EXPECT_LT(max_abs_diff(sym_product(a, a, a, a), sym_power(a)), 1e-14);
}

TEST(Tot, ProjectsOntoSym4) {
    std::mt19937_64 rng(14);
    const Vec a = testutil::normal_vec(rng, 3);
    EXPECT_LT(max_abs_diff(tot(sym_power(a)), sym_power(a)), 1e-14);
    for (int t = 0; t < 20; ++t) {
        const WTensor s = testutil::random_w(rng, 3);
        const WTensor ts = tot(s);
        EXPECT_LT(max_abs_diff(tot(ts), ts), 1e-13);
        EXPECT_LT(max_abs_diff(ts, project_w(ts)), 1e-13);
    }
}

TEST(Pair, BasicValues) {
    const Vec e1 = Vec::Unit(3, 0);
    EXPECT_EQ(pair(sym_power(e1), sym_power(e1)), 1.0);
    std::mt19937_64 rng(15);
    const WTensor s = testutil::random_w(rng, 3), m = testutil::random_w(rng, 3);
    EXPECT_DOUBLE_EQ(pair(s, m), pair(m, s));
}

TEST(Gram, SingleEntryForFourthPower) {
    const Mat g = gram(sym_power(Vec::Unit(3, 0)));
    EXPECT_EQ(g(0, 0), 1.0);
    EXPECT_EQ(g.cwiseAbs().sum(), 1.0);
}

TEST(Gram, SymmetricExactly) {
    std::mt19937_64 rng(16);
    for (int t = 0; t < 20; ++t) {
        const Mat g = gram(testutil::random_w(rng, 3));
        EXPECT_EQ((g - g.transpose()).cwiseAbs().maxCoeff(), 0.0);
    }
}

// eig(gram) = eig(D^{-1} R D^{-1}) u eig(2 R'), D = diag(1 on squares, 1/sqrt2 on mixed products).
// The sym/antisym blocks of V (x) V in orthonormal coordinates are e_i(x)e_i, sqrt2 e_i v e_j and sqrt2 e_i ^ e_j.
TEST(Gram, EigenvaluesSplitIntoBlocks) {
    std::mt19937_64 rng(17);
    for (int n = 2; n <= 4; ++n) {
        const int ns = sym_size(n);
        Vec dinv = Vec::Ones(ns);
        for (int a = n; a < ns; ++a) dinv(a) = std::sqrt(2.0);
        for (int t = 0; t < 10; ++t) {
            const WTensor s = testutil::random_w(rng, n);
            const Mat r = dinv.asDiagonal() * restrict_sym(s).m * dinv.asDiagonal();
            const Mat ra = 2.0 * restrict_alt(s).m;
            std::vector<double> blocks;
            Eigen::SelfAdjointEigenSolver<Mat> e1(r), e2(ra), eg(gram(s));
            for (int a = 0; a < e1.eigenvalues().size(); ++a) blocks.push_back(e1.eigenvalues()(a));
            for (int a = 0; a < e2.eigenvalues().size(); ++a) blocks.push_back(e2.eigenvalues()(a));
            std::sort(blocks.begin(), blocks.end());
            ASSERT_EQ(static_cast<long>(blocks.size()), eg.eigenvalues().size());
            for (std::size_t a = 0; a < blocks.size(); ++a)
                EXPECT_NEAR(blocks[a], eg.eigenvalues()(static_cast<Eigen::Index>(a)), 1e-12);
        }
    }
}

TEST(Gram, PsdIffBothBlocksPsd) {
    std::mt19937_64 rng(18);
    int agree = 0, psd_count = 0;
    for (int t = 0; t < 200; ++t) {
        WTensor s = testutil::random_ray_sum(rng, 1 + t % 12);
        // push about half of them out of the cone
        if (t % 2) s -= 0.05 * s.frobenius() * sym_power(testutil::normal_vec(rng, 3).normalized());
        const bool whole = psd_check(gram(s)).psd;
        const bool blocks = psd_check(restrict_sym(s).m).psd && psd_check(restrict_alt(s).m).psd;
        agree += whole == blocks;
        psd_count += whole;
    }
    EXPECT_EQ(agree, 200);
    EXPECT_GT(psd_count, 50);
    EXPECT_LT(psd_count, 200);
}

TEST(Coeffs, NamedOrder) {
    const auto keys = canonical_keys(3);
    ASSERT_EQ(keys.size(), 21u);
    EXPECT_EQ(key_name(keys[0]), "M1111");
    EXPECT_EQ(key_name(keys[4]), "M1212");
    EXPECT_EQ(key_name(keys[13]), "M1323");
    EXPECT_EQ(key_name(keys[20]), "M3333");
    // keys are pairwise in distinct orbits
    std::set<Index4> reps;
    for (const auto &k : keys) reps.insert(detail::orbit_representative(k));
    EXPECT_EQ(reps.size(), 21u);
}

TEST(Coeffs, UnitFirstCoefficient) {
    Vec c = Vec::Zero(21);
    c(0) = 1.0;
    EXPECT_EQ(max_abs_diff(from_coeffs(c, FlavorDim{3}), sym_power(Vec::Unit(3, 0))), 0.0);
}

TEST(Coeffs, RoundTrip) {
    std::mt19937_64 rng(19);
    for (int n = 1; n <= 4; ++n)
        for (int t = 0; t < 100; ++t) {
            const Vec c = testutil::normal_vec(rng, static_cast<int>(dim_w(n)));
            const WTensor s = from_coeffs(c, FlavorDim{n});
            EXPECT_LT(s.symmetry_residual(), 1e-15);
            EXPECT_EQ((to_coeffs(s) - c).cwiseAbs().maxCoeff(), 0.0);
        }
}

TEST(Coeffs, LengthMismatch) {
    EXPECT_THROW(from_coeffs(Vec::Zero(20), FlavorDim{3}), Error);
    EXPECT_THROW(from_coeffs(Vec::Zero(21), FlavorDim{2}), Error);
}

TEST(ContractAllSlots, Composition) {
    std::mt19937_64 rng(20);
    const WTensor s = testutil::random_w(rng, 3);
    const Mat a = testutil::normal_mat(rng, 3, 3), b = testutil::normal_mat(rng, 3, 3);
    const WTensor lhs = contract_all_slots(contract_all_slots(s, a), b);
    const WTensor rhs = contract_all_slots(s, a * b);
    EXPECT_LT(max_abs_diff(lhs, rhs), 1e-11 * rhs.max_abs());
    EXPECT_LT(contract_all_slots(s, a).symmetry_residual(), 1e-12 * rhs.max_abs());
}
