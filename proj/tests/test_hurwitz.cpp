#include "imcl/catalog.hpp"
#include "imcl/hurwitz.hpp"

#include <gtest/gtest.h>

using namespace imcl;

namespace {
struct S3Fixture {
    PermGroup S3 = symmetric_group(3);
    std::vector<elem> tr;
    elem g12;
    S3Fixture()
    {
        for (elem x = 1; x < 6; ++x)
            if (S3.group.elem_order(x) == 2) tr.push_back(x);
        g12 = *S3.find(parse_cycles("(0 1)", 3));
    }
};
} // namespace

TEST(Braid, MoveAndInverse)
{
    S3Fixture f;
    const auto& G = f.S3.group;
    NielsenTuple t{{f.tr[0], f.tr[1], f.tr[2]}, f.g12};
    for (std::size_t i = 1; i <= 2; ++i) EXPECT_EQ(braid_inverse(G, i, braid_act(G, i, t)).entries, t.entries);
    // braid relation s1 s2 s1 = s2 s1 s2
    auto a = braid_act(G, 1, braid_act(G, 2, braid_act(G, 1, t)));
    auto b = braid_act(G, 2, braid_act(G, 1, braid_act(G, 2, t)));
    EXPECT_EQ(a.entries, b.entries);
}

TEST(Enumerate, S3TranspositionsFourPoints)
{
    S3Fixture f;
    auto ts = enumerate_tuples(f.S3.group, f.tr, f.g12, 4);
    EXPECT_EQ(ts.size(), 8u);
    // lexicographic order
    for (std::size_t i = 1; i < ts.size(); ++i) EXPECT_LT(ts[i - 1].entries, ts[i].entries);
}

TEST(Orbits, S3TranspositionsFourPoints)
{
    S3Fixture f;
    auto ctx = UContext::build(f.S3.group, f.tr);
    auto orb = orbits(f.S3.group, f.tr, f.g12, 4, &ctx);
    ASSERT_EQ(orb.orbits.size(), 1u);
    EXPECT_EQ(orb.orbits[0].size, 8u);
    EXPECT_TRUE(orb.invariant_constant);
    EXPECT_EQ(orb.orbits[0].invariant.z_full.v, std::vector<std::int64_t>{4});
}

TEST(Orbits, SizesPartitionTuples)
{
    auto D5 = dihedral_group(5).group;
    std::vector<elem> c;
    elem refl = 0;
    for (elem x = 1; x < 10; ++x) {
        c.push_back(x);
        if (!refl && D5.elem_order(x) == 2) refl = x;
    }
    auto ctx = UContext::build(D5, c);
    for (std::size_t n = 2; n <= 5; ++n) {
        auto orb = orbits(D5, c, refl, n, &ctx);
        std::uint64_t s = 0;
        for (const auto& o : orb.orbits) s += o.size;
        EXPECT_EQ(s, orb.tuple_count);
        EXPECT_EQ(orb.tuple_count, enumerate_tuples(D5, c, refl, n).size());
        EXPECT_TRUE(orb.invariant_constant);
    }
}

TEST(Stable, BijectionForS3)
{
    S3Fixture f;
    auto ctx = UContext::build(f.S3.group, f.tr);
    for (std::size_t n = 4; n <= 8; ++n) {
        auto rep = stable_bijection_report(ctx, f.g12, n, 1);
        EXPECT_TRUE(rep.bijective()) << n;
    }
}

TEST(Enumerate, CapacityGuard)
{
    auto S5 = symmetric_group(5).group;
    std::vector<elem> c;
    for (elem x = 1; x < S5.order(); ++x) c.push_back(x);
    HurwitzLimits lim;
    lim.memory_bytes = 1 << 20;
    EXPECT_THROW(enumerate_tuples(S5, c, 1, 6, [](const std::vector<elem>&) {}, lim), CapacityError);
}

TEST(OrbitsCsv, Header)
{
    S3Fixture f;
    auto ctx = UContext::build(f.S3.group, f.tr);
    auto orb = orbits(f.S3.group, f.tr, f.g12, 4, &ctx);
    std::ostringstream os;
    write_orbits_csv(os, ctx, orb);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "g_inf,representative,size,h,v,shape");
}
