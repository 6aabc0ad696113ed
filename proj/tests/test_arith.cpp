#include "imcl/arith.hpp"

#include <gtest/gtest.h>

#include <cstdio>

using namespace imcl;

TEST(Poly, DivisionAndBezout)
{
    const std::uint32_t p = 7;
    Poly a{3, 0, 5, 1, 2}, b{1, 4, 1};
    auto [q, r] = poly::divmod(a, b, p);
    EXPECT_EQ(poly::add(poly::mul(q, b, p), r, p), a);
    EXPECT_LT(poly::deg(r), poly::deg(b));
    auto [d, s, t] = poly::xgcd(a, b, p);
    EXPECT_EQ(poly::add(poly::mul(s, a, p), poly::mul(t, b, p), p), d);
    EXPECT_FALSE(poly::squarefree(Poly{1, 2, 1}, 5)); // (t+1)^2
    EXPECT_TRUE(poly::irreducible(Poly{1, 0, 1}, 3));  // t^2 + 1 over F_3
    EXPECT_FALSE(poly::irreducible(Poly{1, 0, 1}, 5));
}

TEST(Enumerate, CountsUnderSquareScaling)
{
    std::uint64_t monic = 0;
    auto total = enumerate_imaginary(3, 3, [&](const HyperellipticModel& m) { monic += m.f.back() == 1; });
    EXPECT_EQ(monic, 18u);
    EXPECT_EQ(total, 36u);
    EXPECT_EQ(enumerate_imaginary(5, 3, [](const HyperellipticModel&) {}), 200u);
    EXPECT_THROW(enumerate_imaginary(3, 4, [](const HyperellipticModel&) {}), DomainError);
}

TEST(Enumerate, RepresentativesInequivalent)
{
    for (std::uint32_t q : {3u, 5u}) {
        // canonical form: monic part plus square class of the leading coefficient
        std::set<std::pair<Poly, bool>> seen;
        std::size_t n = enumerate_imaginary(q, 3, [&](const HyperellipticModel& m) {
            bool square = pow_mod(m.f.back(), (q - 1) / 2, q) == 1;
            EXPECT_TRUE(seen.insert({poly::monic(m.f, q), square}).second);
        });
        EXPECT_EQ(seen.size(), n);
    }
}

TEST(Jacobian, Examples)
{
    EXPECT_EQ(jacobian_order({3, {1, 2, 0, 1}}), 7);
    EXPECT_EQ(jacobian_order({3, {1, 1}}), 1);
    HyperellipticModel e{3, {0, 2, 0, 1}}; // t^3 + 2t
    EXPECT_EQ(static_cast<std::size_t>(jacobian_order(e)), enumerate_classes(e).size());
    EXPECT_THROW(jacobian_order({3, {1, 2, 1}}), DomainError); // even degree
    EXPECT_THROW(jacobian_order({3, {0, 0, 0, 1}}), DomainError); // not squarefree
}

TEST(Jacobian, GenusOneExhaustive)
{
    for (std::uint32_t q : {3u, 5u, 7u}) {
        PointCounter pc(q);
        enumerate_imaginary(q, 3, [&](const HyperellipticModel& m) {
            auto h = pc.lpoly(m).at_one();
            EXPECT_EQ(h, pc.points(m.f, 1));
            EXPECT_EQ(static_cast<std::size_t>(h), enumerate_classes(m).size());
        });
    }
}

TEST(Jacobian, GenusTwoExhaustiveOverF3)
{
    PointCounter pc(3);
    enumerate_imaginary(3, 5, [&](const HyperellipticModel& m) {
        auto L = pc.lpoly(m);
        EXPECT_EQ(L.a[4], 9 * L.a[0]);
        EXPECT_EQ(L.a[3], 3 * L.a[1]);
        EXPECT_EQ(static_cast<std::size_t>(L.at_one()), enumerate_classes(m).size());
    });
}

TEST(Cantor, GroupLaw)
{
    HyperellipticModel m{5, {1, 3, 0, 2, 0, 1}};
    ASSERT_NO_THROW(m.validate());
    auto N = static_cast<std::uint64_t>(jacobian_order(m));
    SplitMix64 rng(3);
    for (int i = 0; i < 300; ++i) {
        auto a = random_divclass(m, rng), b = random_divclass(m, rng), c = random_divclass(m, rng);
        EXPECT_EQ(divclass_add(m, a, DivisorClass{}), a);
        EXPECT_EQ(divclass_add(m, a, divclass_negate(m, a)), DivisorClass{});
        EXPECT_EQ(divclass_add(m, a, b), divclass_add(m, b, a));
        EXPECT_EQ(divclass_add(m, divclass_add(m, a, b), c), divclass_add(m, a, divclass_add(m, b, c)));
        EXPECT_EQ(divclass_mul(m, a, N), DivisorClass{});
    }
    EXPECT_THROW(divclass_add(m, DivisorClass{{1, 1}, {3}}, DivisorClass{}), DomainError);
}

TEST(Sylow, CyclicAndTrivial)
{
    HyperellipticModel m{3, {1, 2, 0, 1}};
    SplitMix64 rng(1);
    auto s7 = sylow_structure(m, 7, 7, rng);
    EXPECT_EQ(s7.structure.d, std::vector<std::uint64_t>{7});
    auto s5 = sylow_structure(m, 5, 7, rng);
    EXPECT_TRUE(s5.structure.trivial());
    EXPECT_EQ(count_abelian_surjections(s7.structure, abelian_from_cyclic({5})), 0u);
}

TEST(Sylow, MatchesExhaustiveStructure)
{
    // structure from sampling equals structure from all classes
    std::size_t tested = 0;
    enumerate_imaginary(3, 5, [&](const HyperellipticModel& m) {
        auto N = static_cast<std::uint64_t>(jacobian_order(m));
        auto classes = enumerate_classes(m);
        for (std::uint64_t ell : {2u, 5u, 7u}) {
            if (valuation(N, ell) < 2) continue;
            SplitMix64 rng(N, ell);
            auto s = sylow_structure(m, ell, N, rng);
            ASSERT_TRUE(s.conclusive);
            std::uint64_t tors = 0;
            for (const auto& c : classes) tors += divclass_mul(m, c, ell) == DivisorClass{};
            EXPECT_EQ(s.structure.torsion_count(ell), tors);
            ++tested;
        }
    });
    EXPECT_GT(tested, 0u);
}

TEST(Surjections, AgainstFormulas)
{
    auto A = abelian_from_cyclic({25, 5});
    // homs to Z/25: 25 * 5; those landing in 5Z/25: 5 * 5
    EXPECT_EQ(count_abelian_surjections(A, abelian_from_cyclic({25})), 100u);
    EXPECT_EQ(count_abelian_surjections(abelian_from_cyclic({9, 3}), abelian_from_cyclic({3, 3})), 48u);
    EXPECT_EQ(count_abelian_surjections(abelian_from_cyclic({}), abelian_from_cyclic({5})), 0u);
    EXPECT_EQ(count_abelian_surjections(abelian_from_cyclic({4, 2}), abelian_from_cyclic({4})), 4u);
    EXPECT_EQ(count_abelian_homs(abelian_from_cyclic({4, 2}), abelian_from_cyclic({2, 2})), 16u);
}

TEST(Moment, PredictionsAndPreconditions)
{
    MomentOptions o;
    o.d_max = 3;
    auto r = empirical_moment(3, abelian_from_cyclic({5}), o);
    EXPECT_EQ(r.prediction, rational(1));
    EXPECT_EQ(r.total_fields, 36u);
    EXPECT_THROW(empirical_moment(3, abelian_from_cyclic({3}), o), DomainError);
    EXPECT_EQ(gerth_prediction(abelian_from_cyclic({2}), 3), 1u);
    EXPECT_EQ(gerth_prediction(abelian_from_cyclic({4, 4}), 5), 2u); // v = 2
    o.weight = MomentWeight::gerth;
    auto g = empirical_moment(3, abelian_from_cyclic({2}), o);
    EXPECT_EQ(g.prediction, rational(1));
}

TEST(Moment, CacheRoundTrip)
{
    const std::string path = ::testing::TempDir() + "imcl_curve_cache.txt";
    std::remove(path.c_str());
    CurveCache cache;
    MomentOptions o;
    o.d_max = 5;
    o.cache = &cache;
    auto a = empirical_moment(3, abelian_from_cyclic({5}), o);
    cache.save(path);
    CurveCache loaded;
    loaded.load(path);
    EXPECT_EQ(loaded.size(), 36u + 324u);
    o.cache = &loaded;
    auto b = empirical_moment(3, abelian_from_cyclic({5}), o);
    EXPECT_EQ(a.csv(), b.csv());
    std::remove(path.c_str());
}

TEST(NumberField, ClassGroups)
{
    EXPECT_EQ(nf_class_group(23).structure.d, std::vector<std::uint64_t>{3});
    EXPECT_TRUE(nf_class_group(1).structure.trivial());
    EXPECT_TRUE(nf_class_group(3).structure.trivial());
    EXPECT_EQ(nf_class_group(5).structure.d, std::vector<std::uint64_t>{2});
    EXPECT_EQ(nf_class_group(14).structure.d, std::vector<std::uint64_t>{4});
    EXPECT_EQ(nf_class_group(21).structure.d, (std::vector<std::uint64_t>{2, 2}));
    EXPECT_EQ(nf_class_group(4027).structure.d, (std::vector<std::uint64_t>{3, 3}));
    // class numbers 1: the Heegner list
    for (std::int64_t d : {1, 2, 3, 7, 11, 19, 43, 67, 163}) EXPECT_EQ(nf_class_group(d).order, 1) << d;
    EXPECT_THROW(nf_class_group(12), DomainError);
}

TEST(NumberField, CompositionIsAssociative)
{
    auto forms = reduced_forms(-4 * 4027 + 0); // not fundamental but a valid discriminant
    const std::int64_t D = -4027;
    auto fs = reduced_forms(D);
    ASSERT_EQ(fs.size(), 9u);
    for (const auto& a : fs)
        for (const auto& b : fs) {
            EXPECT_EQ(compose_forms(a, b), compose_forms(b, a));
            for (const auto& c : fs) EXPECT_EQ(compose_forms(compose_forms(a, b), c), compose_forms(a, compose_forms(b, c)));
        }
    (void)forms;
}
