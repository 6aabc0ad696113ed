#include "imcl/catalog.hpp"
#include "imcl/cocycle_oracle.hpp"
#include "imcl/homology.hpp"

#include <gtest/gtest.h>

using namespace imcl;

namespace {
std::vector<elem> nontrivial(const FiniteGroup& G)
{
    std::vector<elem> c;
    for (elem x = 1; x < G.order(); ++x) c.push_back(x);
    return c;
}
} // namespace

// Known Schur multipliers.
TEST(H2, KnownValues)
{
    std::map<std::string, std::vector<std::uint64_t>> expected = {
        {"C2xC2", {2}}, {"S3", {}}, {"Q8", {}}, {"D8", {2}}, {"A4", {2}}, {"C3xC3", {3}},
        {"C4xC4", {4}}, {"C2^3", {2, 2, 2}}, {"C2^4", {2, 2, 2, 2, 2, 2}}, {"C16", {}}, {"D12", {2}},
    };
    for (const auto& [name, G] : small_groups_upto16()) {
        auto it = expected.find(name);
        if (it == expected.end()) continue;
        EXPECT_EQ(h2(G).d, it->second) << name;
    }
    // (Z/5)^2 x| Z/2 by inversion: wedge^2 is fixed
    EXPECT_EQ(h2(semidirect(inversion_action(5, 2)).group).d, std::vector<std::uint64_t>{5});
    EXPECT_TRUE(h2(dihedral_group(5).group).trivial());
}

TEST(H2, AgreesWithCocycleOracle)
{
    for (const auto& [name, G] : small_groups_upto16()) {
        EXPECT_EQ(h2(G), h2_oracle(G)) << name;
        auto c = nontrivial(G);
        EXPECT_EQ(h2_reduced(G, c), h2_oracle(G, c)) << name;
    }
}

TEST(H2, ReducedKillsCommutingPairs)
{
    // abelian groups with c = all nontrivial: every pair commutes
    EXPECT_TRUE(h2_reduced(elementary_abelian(3, 2), nontrivial(elementary_abelian(3, 2))).trivial());
    auto S3 = symmetric_group(3).group;
    std::vector<elem> tr;
    for (elem x = 1; x < 6; ++x)
        if (S3.elem_order(x) == 2) tr.push_back(x);
    EXPECT_TRUE(h2_reduced(S3, tr).trivial());
}

TEST(SchurCover, IsStem)
{
    auto G = product_of({cyclic_group(2), cyclic_group(2)});
    auto S = schur_cover(G);
    EXPECT_EQ(S.total.order(), 8u);
    EXPECT_FALSE(S.total.is_abelian());
}

TEST(UContext, ClassesAndKernel)
{
    auto S3 = symmetric_group(3).group;
    std::vector<elem> tr;
    for (elem x = 1; x < 6; ++x)
        if (S3.elem_order(x) == 2) tr.push_back(x);
    auto ctx = UContext::build(S3, tr);
    EXPECT_EQ(ctx.num_classes(), 1u);
    // bracket lifts multiply like G modulo the kernel
    for (elem x : tr)
        for (elem y : tr) {
            auto u = ctx.mul(ctx.bracket(x), ctx.bracket(y));
            EXPECT_TRUE(ctx.is_element(u));
            EXPECT_EQ(ctx.Sc.proj(u.s), S3.mul(x, y));
        }
}

TEST(ValidateC, RejectsNonClassClosed)
{
    auto S3 = symmetric_group(3).group;
    elem t = 0;
    for (elem x = 1; x < 6; ++x)
        if (S3.elem_order(x) == 2) t = x;
    EXPECT_THROW(validate_c(S3, {t}), ValidationError);
}
