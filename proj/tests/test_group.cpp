#include "imcl/catalog.hpp"
#include "imcl/group.hpp"

#include <gtest/gtest.h>

using namespace imcl;

TEST(FiniteGroup, SymmetricGroupBasics)
{
    auto S3 = symmetric_group(3);
    const auto& G = S3.group;
    EXPECT_EQ(G.order(), 6u);
    EXPECT_FALSE(G.is_abelian());
    EXPECT_EQ(conjugacy_classes(G).size(), 3u);
    EXPECT_EQ(derived_subgroup(G).size(), 3u);
    EXPECT_EQ(center(G).size(), 1u);
    EXPECT_EQ(abelianization(G).q.group.order(), 2u);
}

TEST(FiniteGroup, InversesAndOrders)
{
    for (const auto& [name, G] : small_groups_upto16()) {
        for (elem x = 0; x < G.order(); ++x) {
            EXPECT_EQ(G.mul(x, G.inv(x)), 0u) << name;
            EXPECT_EQ(G.pow(x, G.elem_order(x)), 0u) << name;
            EXPECT_EQ(G.order() % G.elem_order(x), 0u) << name;
        }
    }
}

TEST(Catalog, SmallGroupsCensus)
{
    auto gs = small_groups_upto16();
    EXPECT_EQ(gs.size(), 42u);
    // groups of order 8: 5 classes, order 16: 14 classes
    std::map<std::uint32_t, int> by_order;
    for (const auto& [n, G] : gs) ++by_order[G.order()];
    EXPECT_EQ(by_order[8], 5);
    EXPECT_EQ(by_order[12], 5);
    EXPECT_EQ(by_order[16], 14);
}

TEST(Catalog, NamedGroups)
{
    EXPECT_EQ(group_by_name("D5").group.order(), 10u);
    EXPECT_EQ(group_by_name("C3xC3").group.order(), 9u);
    EXPECT_EQ(group_by_name("A4").group.order(), 12u);
    EXPECT_THROW(group_by_name("Z7"), ValidationError);
}

TEST(GammaGroup, InversionIsAdmissible)
{
    auto H = inversion_action(3);
    EXPECT_TRUE(is_admissible(H));
    EXPECT_EQ(invariants(H, all_elements(H.gamma)).order(), 1u);
    auto T = GammaGroup::trivial_action(cyclic_group(3), cyclic_group(2));
    EXPECT_FALSE(is_admissible(T));
}

TEST(GammaGroup, SemidirectOfInversionIsS3)
{
    auto sd = semidirect(inversion_action(3));
    EXPECT_EQ(sd.group.order(), 6u);
    EXPECT_FALSE(sd.group.is_abelian());
}

TEST(GammaGroup, AutomorphismAndSurjectionCounts)
{
    // inversion is central in GL2(F3), so every automorphism is equivariant
    EXPECT_EQ(count_aut_gamma(inversion_action(3, 2)), 48u);
    EXPECT_EQ(count_aut_gamma(inversion_action(5)), 4u);
    // surjections Z3^2 -> Z3: 9 - 1
    EXPECT_EQ(count_gamma_surjections(inversion_action(3, 2), inversion_action(3)), 8u);
    EXPECT_EQ(count_gamma_surjections(inversion_action(3), inversion_action(3, 2)), 0u);
}

TEST(GammaGroup, RejectsNonAutomorphism)
{
    FiniteGroup C3 = cyclic_group(3);
    std::vector<std::vector<elem>> act{{0, 1, 2}, {0, 1, 1}};
    EXPECT_THROW(GammaGroup::make(C3, cyclic_group(2), act), ValidationError);
}
