#include "imcl/catalog.hpp"
#include "imcl/randgrp.hpp"

#include <gtest/gtest.h>

using namespace imcl;

TEST(Rng, SubstreamsAreDeterministic)
{
    SplitMix64 a(5, 3), b(5, 3), c(5, 4);
    EXPECT_EQ(a(), b());
    EXPECT_NE(SplitMix64(5, 3)(), c());
    SplitMix64 r(1);
    for (int i = 0; i < 1000; ++i) EXPECT_LT(r.below(7), 7u);
}

TEST(Variety, ExponentThreeWithInversion)
{
    auto V = abelian_variety(3, 2);
    ASSERT_EQ(V.generators.size(), 2u); // trivial and inverting actions
    EXPECT_EQ(V.generators[0].base.order(), 3u);
}

TEST(FreeObject, ExactIdentitiesSmallN)
{
    auto V = abelian_variety(3, 2);
    auto H0 = randgrp_detail::trivial_gamma_group(V.gamma);
    auto H1 = inversion_action(3), H2 = inversion_action(3, 2);
    for (std::size_t n = 0; n <= 2; ++n) {
        auto F = free_admissible(n, V);
        auto census = quotient_census(F);
        for (elem gi : {elem(0), elem(1)}) {
            auto ex = enumerate_outcomes(F, gi);
            rational total = 0;
            for (std::size_t i = 0; i < census.size(); ++i) {
                auto m = mu_n(F, census.rep(i), gi);
                EXPECT_EQ(m, ex.probability(census.rep(i)));
                total += m;
            }
            EXPECT_EQ(total, rational(1));
            for (const GammaGroup* H : {&H0, &H1, &H2}) EXPECT_EQ(moment_n(*H, n, gi), ex.expected_sur(*H));
        }
    }
}

TEST(Moments, ClosedForms)
{
    auto H1 = inversion_action(3);
    // n = 0 with Gamma_inf = Gamma: X is trivial
    EXPECT_EQ(moment_n(H1, 0, 1), rational(0));
    EXPECT_EQ(moment_mu(H1, 1), rational(1));
    EXPECT_NEAR(moment_n(H1, 12, 1).convert_to<double>(), 1.0, 1e-3);
}

TEST(MonteCarlo, AgreesWithClosedFormSmallN)
{
    auto V = abelian_variety(3, 2);
    auto F = free_admissible(2, V);
    auto H1 = inversion_action(3);
    auto mc = monte_carlo(F, 1, 4000, 17);
    auto e = mc.probability(H1);
    double exact = mu_n(F, H1, 1).convert_to<double>();
    EXPECT_LE(std::abs(e.mean - exact), 4 * e.se + 1e-12);
    auto again = monte_carlo(F, 1, 4000, 17);
    EXPECT_EQ(again.counts, mc.counts);
}

TEST(Cokernels, InvertibleFraction)
{
    // coker trivial iff M invertible: |GL2(F3)| / 81
    auto d = cokernel_distribution(3, 2);
    EXPECT_EQ(d.at("0"), rational(48, 81));
}

TEST(AbelianInvariants, Products)
{
    auto G = product_of({cyclic_group(4), cyclic_group(2), cyclic_group(3)});
    EXPECT_EQ(abelian_invariants(G).d, (std::vector<std::uint64_t>{2, 12}));
}
