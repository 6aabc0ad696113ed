#include "imcl/catalog.hpp"
#include "imcl/frob.hpp"

#include <gtest/gtest.h>

using namespace imcl;

TEST(Frobenius, CyclicOfOrderTwo)
{
    auto Z2 = cyclic_group(2);
    auto ctx = UContext::build(Z2, {1});
    // tuples of n involutions with product 1 exist only for n even
    for (std::size_t n = 2; n <= 7; ++n) EXPECT_EQ(fixed_counts(ctx, 1, 5, n).b, n % 2 == 0 ? 1u : 0u) << n;
    EXPECT_EQ(predicted_hur_count(ctx, 1, 5, 4).main_term, bigint(125));
}

TEST(Frobenius, ParameterChecks)
{
    auto S3 = symmetric_group(3);
    elem g = *S3.find(parse_cycles("(0 1)", 3));
    EXPECT_THROW(check_frobenius_params(S3.group, g, 9), DomainError);
    EXPECT_THROW(check_frobenius_params(S3.group, g, 4), DomainError);
    EXPECT_NO_THROW(check_frobenius_params(S3.group, g, 5));
}

TEST(Frobenius, FixedInvariantsMatchFixedOrbits)
{
    auto S3 = symmetric_group(3);
    const auto& G = S3.group;
    std::vector<elem> all;
    for (elem x = 1; x < 6; ++x) all.push_back(x);
    elem g = *S3.find(parse_cycles("(0 1)", 3));
    auto ctx = UContext::build(G, all);
    for (std::uint64_t q : {5, 7, 11}) {
        Frobenius F(ctx, q);
        for (std::size_t n = 4; n <= 7; ++n) {
            auto fc = fixed_counts(ctx, g, q, n, 1);
            auto orb = orbits(G, all, g, n, &ctx);
            std::uint64_t fixed = 0;
            for (const auto& o : orb.orbits) {
                const auto& v = o.invariant.z_full.v;
                if (*std::min_element(v.begin(), v.end()) >= 1 && F.apply(o.invariant) == o.invariant) ++fixed;
            }
            EXPECT_EQ(fc.b, fixed) << "q=" << q << " n=" << n;
        }
    }
}

TEST(Frobenius, PeriodIsIdentity)
{
    auto D5 = dihedral_group(5).group;
    std::vector<elem> c;
    for (elem x = 1; x < 10; ++x) c.push_back(x);
    auto ctx = UContext::build(D5, c);
    Frobenius F(ctx, 3);
    EXPECT_EQ(powering_orbits(ctx, 3), 2u); // reflections, and the two rotation classes swapped
    for (const auto& k : k_set(ctx, 6, 0)) {
        auto z = k;
        for (std::uint64_t i = 0; i < F.period(); ++i) z = F.apply(z);
        EXPECT_EQ(z, k);
    }
}

TEST(MomentPrediction, CyclicAndRankTwo)
{
    auto Z3 = inversion_action(3);
    EXPECT_EQ(moment_prediction(Z3, 1, 7), rational(1));
    EXPECT_EQ(moment_prediction(Z3, 0, std::nullopt), rational(1, 3)); // Gamma_inf trivial
    auto Z33 = inversion_action(3, 2);
    EXPECT_EQ(moment_prediction(Z33, 1, 7), rational(3));
    EXPECT_EQ(moment_prediction(Z33, 1, 5), rational(1));
    EXPECT_EQ(moment_prediction(Z33, 1, std::nullopt), rational(1));
    EXPECT_THROW(moment_prediction(Z3, 1, 3), DomainError);
    EXPECT_THROW(moment_prediction(Z3, 1, 4), DomainError);
}

TEST(Bridge, S3FromInversion)
{
    auto br = sur_hur_bridge(inversion_action(3), 1);
    EXPECT_EQ(br.factor, rational(1, 2));
    EXPECT_EQ(br.c_G.size(), 3u);
    for (elem x : br.c_G) EXPECT_EQ(br.G.group.elem_order(x), 2u);
    EXPECT_EQ(sur_hur_bridge(inversion_action(3), 0).factor, rational(3));
    rational x(7, 3);
    EXPECT_EQ(br.hur_from_sur(br.sur_from_hur(x)), x);
}
