#pragma once

// Acceptance suites shared by the acceptance binary and `imcl verify`.

#include "imcl/arith.hpp"
#include "imcl/catalog.hpp"
#include "imcl/cocycle_oracle.hpp"
#include "imcl/frob.hpp"
#include "imcl/hurwitz.hpp"
#include "imcl/randgrp.hpp"

#include <chrono>
#include <ostream>

namespace imcl::verify {

// Tolerances and sizes, pinned.
inline constexpr std::size_t kMaxN = 9;
inline constexpr std::size_t kMaxNQuick = 7;
inline constexpr std::size_t kBruteCountMaxN = 6;
inline constexpr double kMonteCarloSigmas = 4.0;
inline constexpr std::uint64_t kMonteCarloTrials = 100000;
inline constexpr std::uint64_t kMonteCarloTrialsQuick = 10000;
inline constexpr std::uint64_t kMonteCarloSeed = 20240601;
inline constexpr std::size_t kMonteCarloN = 8;
inline constexpr std::size_t kMomentLimitN = 12;
inline constexpr double kMomentLimitTol = 1e-3;
inline constexpr std::uint64_t kCantorTriples = 10000;
inline constexpr std::uint64_t kCantorTriplesQuick = 1000;
inline constexpr double kBandLow = 0.5, kBandHigh = 1.5;
inline constexpr std::uint64_t kFfMomentSeed = 7;
inline constexpr std::uint32_t kBridgeFixtures = 20;
inline constexpr std::uint64_t kBridgeSeed = 99;

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

class Suite {
public:
    Suite(std::string name, std::ostream* log) : name_(std::move(name)), log_(log) {}
    void check(const std::string& what, bool ok, const std::string& detail = "")
    {
        checks_.push_back({what, ok, detail});
        if (log_) *log_ << "  [" << (ok ? "ok" : "FAIL") << "] " << what << (detail.empty() ? "" : ": " + detail) << '\n';
    }
    bool passed() const
    {
        return !checks_.empty() && std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.pass; });
    }
    std::size_t failures() const
    {
        return static_cast<std::size_t>(std::count_if(checks_.begin(), checks_.end(), [](const Check& c) { return !c.pass; }));
    }
    std::size_t size() const { return checks_.size(); }
    const std::string& name() const { return name_; }

private:
    std::string name_;
    std::ostream* log_;
    std::vector<Check> checks_;
};

struct HurwitzFixture {
    std::string name;
    FiniteGroup G;
    std::vector<elem> c;
    elem g_inf;
};

inline std::vector<HurwitzFixture> hurwitz_fixtures()
{
    std::vector<HurwitzFixture> out;
    auto S3 = symmetric_group(3);
    const auto& G = S3.group;
    std::vector<elem> tr, all;
    for (elem x = 1; x < G.order(); ++x) {
        all.push_back(x);
        if (G.elem_order(x) == 2) tr.push_back(x);
    }
    elem g12 = *S3.find(parse_cycles("(0 1)", 3));
    out.push_back({"S3 transpositions", G, tr, g12});
    out.push_back({"S3 all nontrivial", G, all, g12});
    auto D5 = dihedral_group(5).group;
    std::vector<elem> d5;
    elem refl = 0;
    for (elem x = 1; x < D5.order(); ++x) {
        d5.push_back(x);
        if (!refl && D5.elem_order(x) == 2) refl = x;
    }
    out.push_back({"D5 all nontrivial", D5, d5, refl});
    auto br = sur_hur_bridge(inversion_action(3), 1);
    elem inv = 0;
    for (elem x : br.G_inf)
        if (x) inv = x;
    out.push_back({"Z3:Z2 with c_G", br.G.group, br.c_G, inv});
    return out;
}

inline std::uint64_t brute_tuple_count(const FiniteGroup& G, const std::vector<elem>& c, elem g_inf, std::size_t n)
{
    const std::size_t len = n - 1;
    std::vector<std::size_t> idx(len, 0);
    const elem target = G.inv(g_inf);
    std::uint64_t count = 0;
    std::vector<elem> gens(len + 1);
    while (true) {
        elem prod = 0;
        for (std::size_t i = 0; i < len; ++i) {
            gens[i] = c[idx[i]];
            prod = G.mul(prod, gens[i]);
        }
        gens[len] = g_inf;
        if (prod == target && subgroup_closure(G, gens).size() == G.order()) ++count;
        std::size_t k = 0;
        while (k < len && ++idx[k] == c.size()) idx[k++] = 0;
        if (k == len) break;
    }
    return count;
}

// 1. braid orbits, lifting invariants and the stable bijection
inline Suite stable_bijection(bool quick, std::ostream* log)
{
    Suite s("stable-bijection", log);
    const std::size_t nmax = quick ? kMaxNQuick : kMaxN;
    for (const auto& f : hurwitz_fixtures()) {
        auto ctx = UContext::build(f.G, f.c);
        const std::size_t classes = ctx.num_classes();
        const std::uint64_t ord = f.G.elem_order(f.g_inf);
        bool constant = true, partition = true, brute = true, bij = true;
        std::size_t compared = 0;
        for (std::size_t n = 2; n <= nmax; ++n)
            for (std::uint64_t k = 1; k <= ord; ++k) {
                if (std::gcd(k, ord) != 1) continue;
                elem g = f.G.pow(f.g_inf, static_cast<std::int64_t>(k));
                auto orb = orbits(f.G, ctx.c, g, n, &ctx);
                constant = constant && orb.invariant_constant && orb.violations.empty();
                std::uint64_t total = 0;
                for (const auto& o : orb.orbits) total += o.size;
                partition = partition && total == orb.tuple_count;
                if (n <= kBruteCountMaxN) brute = brute && brute_tuple_count(f.G, ctx.c, g, n) == orb.tuple_count;
                for (std::int64_t M = 1; M <= 3; ++M) {
                    if (n < 2 * classes * static_cast<std::size_t>(M) + 2) continue;
                    auto pg = compare_with_k(ctx, orb, g, n, M);
                    if (pg.orbit_count == 0 || pg.k_count == 0) continue;
                    ++compared;
                    bij = bij && pg.bijective();
                }
            }
        s.check(f.name + ": lifting invariant constant on orbits", constant);
        s.check(f.name + ": orbit sizes partition the tuple set", partition && brute, "n <= " + std::to_string(nmax));
        // the stable range starts at n = 2 |c/G| + 2
        const bool reachable = nmax >= 2 * classes + 2;
        s.check(f.name + ": stable bijection", bij && (compared > 0 || !reachable),
                reachable ? std::to_string(compared) + " (n, M, g_inf) cases" : "stable range beyond n = " + std::to_string(nmax));
    }
    return s;
}

// 2. H2 against the cocycle oracle
inline Suite homology_oracle(bool /*quick*/, std::ostream* log)
{
    Suite s("homology-oracle", log);
    auto gs = small_groups_upto16();
    gs.emplace_back("S3", symmetric_group(3).group);
    gs.emplace_back("D5", dihedral_group(5).group);
    gs.emplace_back("Z5^2:Z2", semidirect(inversion_action(5, 2)).group);
    gs.emplace_back("Z3^2", elementary_abelian(3, 2));
    std::size_t bad = 0, reduced = 0;
    std::string first_bad;
    for (const auto& [name, G] : gs) {
        auto a = h2(G), b = h2_oracle(G);
        std::vector<std::vector<elem>> cs;
        std::vector<elem> all, inv;
        for (elem x = 1; x < G.order(); ++x) {
            all.push_back(x);
            if (G.elem_order(x) == 2) inv.push_back(x);
        }
        cs.push_back(all);
        if (!inv.empty() && subgroup_closure(G, inv).size() == G.order()) cs.push_back(inv);
        bool ok = a == b;
        for (const auto& c : cs) {
            ++reduced;
            ok = ok && h2_reduced(G, c) == h2_oracle(G, c);
        }
        if (!ok) {
            ++bad;
            if (first_bad.empty()) first_bad = name;
        }
    }
    s.check("H2 and reduced H2 equal the oracle", bad == 0,
            std::to_string(gs.size()) + " groups, " + std::to_string(reduced) + " reduced cases" + (bad ? ", first failure " + first_bad : ""));
    return s;
}

// 3. Frobenius fixed counts and periodicity
inline Suite frobenius(bool quick, std::ostream* log)
{
    Suite s("frobenius", log);
    const std::size_t nmax = quick ? kMaxNQuick : kMaxN;
    for (const auto& f : hurwitz_fixtures()) {
        auto ctx = UContext::build(f.G, f.c);
        std::size_t cases = 0;
        bool ok = true, period = true;
        std::string err;
        for (std::uint64_t q : {3, 5, 7, 11, 13}) {
            try {
                check_frobenius_params(f.G, f.g_inf, q);
            } catch (const DomainError&) {
                continue;
            }
            Frobenius F(ctx, q);
            for (std::size_t n = 2; n <= nmax; ++n) {
                try {
                    for (std::int64_t M : {0, 1}) {
                        auto fc = fixed_counts(ctx, f.g_inf, q, n, M);
                        ok = ok && fc.b == fc.brute;
                        ++cases;
                    }
                } catch (const InternalError& e) {
                    ok = false;
                    err = e.what();
                }
                for (const auto& k : k_set(ctx, static_cast<std::int64_t>(n), 0)) {
                    auto z = k;
                    for (std::uint64_t i = 0; i < F.period(); ++i) z = F.apply(z);
                    period = period && z == k;
                }
            }
        }
        s.check(f.name + ": closed form equals brute force", ok && cases > 0, std::to_string(cases) + " (q, n, M) cases" + (err.empty() ? "" : "; " + err));
        s.check(f.name + ": Frobenius period returns the identity", period);
    }
    return s;
}

// 4. exact random-group identities at small n
inline Suite randgrp_exact(bool /*quick*/, std::ostream* log)
{
    Suite s("randgrp-exact", log);
    auto V = abelian_variety(3, 2);
    auto H0 = randgrp_detail::trivial_gamma_group(V.gamma);
    auto H1 = inversion_action(3), H2 = inversion_action(3, 2);
    for (std::size_t n = 0; n <= 3; ++n) {
        auto F = free_admissible(n, V);
        auto census = quotient_census(F);
        for (elem gi : {elem(1), elem(0)}) {
            auto ex = enumerate_outcomes(F, gi);
            bool moments = true, probs = true;
            rational sum = 0;
            for (const GammaGroup* H : {&H0, &H1, &H2}) moments = moments && moment_n(*H, n, gi) == ex.expected_sur(*H);
            for (std::size_t i = 0; i < census.size(); ++i) {
                auto m = mu_n(F, census.rep(i), gi);
                sum += m;
                probs = probs && m == ex.probability(census.rep(i));
            }
            std::string tag = "n=" + std::to_string(n) + (gi ? ", Gamma_inf = Gamma" : ", Gamma_inf = 1");
            s.check(tag + ": moment_n equals the exhaustive expectation", moments);
            s.check(tag + ": mu_n equals exhaustive probabilities and sums to 1", probs && sum == 1,
                    std::to_string(census.size()) + " classes, sum " + to_string(sum));
        }
    }
    return s;
}

// 5. Monte Carlo against closed forms
inline Suite monte_carlo_suite(bool quick, std::ostream* log)
{
    Suite s("monte-carlo", log);
    auto V = abelian_variety(3, 2);
    auto H0 = randgrp_detail::trivial_gamma_group(V.gamma);
    auto H1 = inversion_action(3);
    auto F = free_admissible(kMonteCarloN, V);
    const std::uint64_t trials = quick ? kMonteCarloTrialsQuick : kMonteCarloTrials;
    auto mc = monte_carlo(F, 1, trials, kMonteCarloSeed);
    auto within = [&](const std::string& what, Estimate e, const rational& exact) {
        double x = exact.convert_to<double>();
        double z = e.se > 0 ? std::abs(e.mean - x) / e.se : (e.mean == x ? 0 : 1e9);
        std::ostringstream d;
        d << "empirical " << e.mean << " +- " << e.se << ", exact " << x << ", z = " << z;
        s.check(what, z <= kMonteCarloSigmas, d.str());
    };
    within("P(X trivial)", mc.probability(H0), mu_n(F, H0, 1));
    within("P(X = Z/3)", mc.probability(H1), mu_n(F, H1, 1));
    within("E #Sur(X, Z/3)", mc.sur_moment(H1), moment_n(H1, kMonteCarloN, 1));
    double m12 = moment_n(H1, kMomentLimitN, 1).convert_to<double>();
    std::ostringstream d;
    d.precision(8);
    d << m12;
    s.check("moment_12(Z/3) within 1e-3 of 1", std::abs(m12 - 1) <= kMomentLimitTol, d.str());
    return s;
}

// 6. moment predictions across modules
inline Suite prediction_consistency(bool /*quick*/, std::ostream* log)
{
    Suite s("prediction-consistency", log);
    for (std::uint32_t ell : {3u, 5u})
        for (std::uint32_t k : {1u, 2u}) {
            auto H = inversion_action(ell, k);
            std::string tag = "(Z/" + std::to_string(ell) + ")^" + std::to_string(k);
            auto lim = moment_prediction(H, 1, std::nullopt);
            s.check(tag + ": q -> infinity prediction equals moment_mu", lim == moment_mu(H, 1), to_string(lim));
            // |H2(H x| Gamma)[q-1]| from the cocycle oracle on the odd part
            auto h2o = h2_oracle(semidirect(H).group);
            bool ok = true;
            std::string vals;
            for (std::uint64_t q : {5, 7, 11, 13, 31}) {
                if (q == ell) continue;
                std::uint64_t odd_part = 1;
                for (auto d : h2o.d) {
                    std::uint64_t t = d;
                    while (t % 2 == 0) t /= 2;
                    odd_part *= std::gcd(t, q - 1);
                }
                std::uint64_t expected = (k == 2 && (q - 1) % ell == 0) ? ell : 1;
                auto f = roots_of_unity_factor(H, q);
                ok = ok && f == odd_part && f == expected && moment_prediction(H, 1, q) == lim * f;
                vals += (vals.empty() ? "" : " ") + std::string("q=") + std::to_string(q) + ":" + std::to_string(f);
            }
            s.check(tag + ": finite-q factor equals |H2(H x| Gamma)[q-1]|", ok, vals);
        }
    return s;
}

// 7. arithmetic ground truth
inline Suite arith_ground_truth(bool quick, std::ostream* log)
{
    Suite s("arith-ground-truth", log);
    HyperellipticModel m{3, {1, 2, 0, 1}}; // t^3 - t + 1
    auto N = jacobian_order(m);
    s.check("q=3, t^3 - t + 1 has class number 7", N == 7 && enumerate_classes(m).size() == 7, std::to_string(N));
    s.check("genus 0 has class number 1", jacobian_order(HyperellipticModel{3, {1, 1}}) == 1);
    for (std::uint32_t q : {3u, 5u}) {
        std::size_t curves = 0, bad = 0;
        PointCounter pc(q);
        enumerate_imaginary(q, 3, [&](const HyperellipticModel& e) {
            ++curves;
            auto h = pc.lpoly(e).at_one();
            auto aff = pc.points(e.f, 1) - 1;
            if (static_cast<std::size_t>(h) != enumerate_classes(e).size() || h != aff + 1) ++bad;
        });
        s.check("genus 1 over F_" + std::to_string(q) + ": L(1) equals class enumeration", bad == 0 && curves > 0,
                std::to_string(curves) + " curves");
    }
    // Hasse-Weil and the functional equation are enforced inside lpoly; run them over every q = 3 model up to genus 3
    std::size_t hw = 0;
    bool hw_ok = true;
    try {
        PointCounter pc(3);
        for (std::uint32_t d : {3u, 5u, 7u}) enumerate_imaginary(3, d, [&](const HyperellipticModel& e) {
            ++hw;
            pc.lpoly(e);
        });
    } catch (const InternalError&) {
        hw_ok = false;
    }
    s.check("Hasse-Weil bounds over F_3, genus <= 3", hw_ok, std::to_string(hw) + " curves");

    // t^3 - t + 1 plus the 100th model of genus 2 and 3 over F_3 and of genus 2 over F_5
    std::vector<HyperellipticModel> fixtures{m};
    for (auto [q, d] : {std::pair{3u, 5u}, {3u, 7u}, {5u, 5u}}) {
        std::size_t i = 0;
        enumerate_imaginary(q, d, [&](const HyperellipticModel& e) {
            if (i++ == 100) fixtures.push_back(e);
        });
    }
    const std::uint64_t triples = quick ? kCantorTriplesQuick : kCantorTriples;
    SplitMix64 rng(11);
    for (const auto& e : fixtures) {
        auto h = static_cast<std::uint64_t>(jacobian_order(e));
        bool assoc = true, lagrange = true, inverse = true;
        for (std::uint64_t t = 0; t < triples; ++t) {
            auto a = random_divclass(e, rng), b = random_divclass(e, rng), c = random_divclass(e, rng);
            assoc = assoc && divclass_add(e, divclass_add(e, a, b), c) == divclass_add(e, a, divclass_add(e, b, c));
            if (t < 200) {
                lagrange = lagrange && divclass_mul(e, a, h) == DivisorClass{};
                inverse = inverse && divclass_add(e, a, divclass_negate(e, a)) == DivisorClass{} && divclass_add(e, a, DivisorClass{}) == a;
            }
        }
        std::string tag = "q=" + std::to_string(e.q) + ", f=" + poly::str(e.f);
        s.check(tag + ": Cantor associativity, identity, inverse, Lagrange", assoc && lagrange && inverse,
                std::to_string(triples) + " triples, class number " + std::to_string(h));
    }
    auto c23 = nf_class_group(23), c1 = nf_class_group(1), c3 = nf_class_group(3);
    s.check("Q(sqrt -23) has class group Z/3; d = 1, 3 trivial", c23.structure.d == std::vector<std::uint64_t>{3} && c1.structure.trivial() && c3.structure.trivial());
    return s;
}

// 8. empirical function-field moment for H = Z/5 over F_3
inline MomentReport ff_moment_report(std::uint32_t d_max)
{
    MomentOptions opt;
    opt.d_min = 3;
    opt.d_max = d_max;
    opt.seed = kFfMomentSeed;
    opt.band_low = kBandLow;
    opt.band_high = kBandHigh;
    return empirical_moment(3, abelian_from_cyclic({5}), opt);
}

inline Suite ff_moment(bool quick, std::ostream* log)
{
    Suite s("ff-moment", log);
    const std::uint32_t dmax = quick ? 5 : 7;
    auto a = ff_moment_report(dmax), b = ff_moment_report(dmax);
    std::ostringstream d;
    d << "average " << a.average << " over " << a.total_fields << " fields (" << a.total_inconclusive << " inconclusive), prediction "
      << to_string(a.prediction);
    s.check("cumulative average of #Sur(Cl, Z/5) in [0.5, 1.5]", a.average >= kBandLow && a.average <= kBandHigh && a.total_inconclusive == 0, d.str());
    s.check("report is byte-reproducible", a.csv() == b.csv(), "fingerprint " + std::to_string(fnv1a(a.csv())));
    return s;
}

// 9. Sur/Hur bridge
inline Suite bridge(bool /*quick*/, std::ostream* log)
{
    Suite s("bridge", log);
    SplitMix64 rng(kBridgeSeed);
    const std::vector<std::pair<std::uint32_t, std::uint32_t>> gm{{3, 2}, {5, 2}, {7, 2}, {5, 4}, {7, 3}, {7, 6}, {13, 3}, {13, 4}};
    std::size_t ok = 0;
    for (std::uint32_t i = 0; i < kBridgeFixtures; ++i) {
        auto [m, d] = gm[rng.below(gm.size())];
        std::uint32_t k = 1 + static_cast<std::uint32_t>(rng.below(m <= 5 ? 2 : 1));
        // unit of exact order d modulo m
        std::uint32_t u = 0;
        for (std::uint32_t x = 2; x < m && !u; ++x)
            if (mult_order(x, m) == d) u = x;
        auto H = scalar_action(m, k, d, u);
        elem gi = static_cast<elem>(rng.below(d));
        auto br = sur_hur_bridge(H, gi);
        auto idx = invariant_index(H, gi);
        bool good = br.factor == idx / rational(bigint(br.G_inf.size()));
        for (int t = 0; t < 5; ++t) {
            rational x(bigint(1 + rng.below(1000)), bigint(1 + rng.below(97)));
            good = good && br.hur_from_sur(br.sur_from_hur(x)) == x && br.sur_from_hur(br.hur_from_sur(x)) == x;
        }
        // c_G: conjugation-closed, above nontrivial Gamma elements, element order equals image order
        const auto& G = br.G.group;
        std::vector<char> in(G.order(), 0);
        for (elem x : br.c_G) in[x] = 1;
        for (elem x : br.c_G)
            for (elem g = 0; g < G.order(); ++g) good = good && in[G.conj(g, x)];
        ok += good;
    }
    s.check("round trips and factor on random fixtures", ok == kBridgeFixtures, std::to_string(ok) + "/" + std::to_string(kBridgeFixtures));
    auto br = sur_hur_bridge(inversion_action(3), 1);
    const auto& G = br.G.group;
    std::vector<elem> invs;
    for (elem x = 1; x < G.order(); ++x)
        if (G.elem_order(x) == 2) invs.push_back(x);
    auto cg = br.c_G;
    std::sort(cg.begin(), cg.end());
    s.check("c_G for Z/3 with inversion is the 3 involutions of S3", G.order() == 6 && !G.is_abelian() && cg == invs && cg.size() == 3);
    return s;
}

struct SuiteEntry {
    int criterion;
    const char* name;
    Suite (*run)(bool, std::ostream*);
};

inline const std::vector<SuiteEntry>& suites()
{
    static const std::vector<SuiteEntry> s{
        {1, "stable-bijection", stable_bijection}, {2, "homology-oracle", homology_oracle},
        {3, "frobenius", frobenius},               {4, "randgrp-exact", randgrp_exact},
        {5, "monte-carlo", monte_carlo_suite},     {6, "prediction-consistency", prediction_consistency},
        {7, "arith-ground-truth", arith_ground_truth}, {8, "ff-moment", ff_moment},
        {9, "bridge", bridge},
    };
    return s;
}

// Runs one suite (or "all"), printing one summary line per criterion to out.
// Returns true iff every selected suite passed; unknown names throw ValidationError.
inline bool run(const std::string& which, bool quick, std::ostream& out, std::ostream* detail)
{
    bool any = false, all_ok = true;
    for (const auto& e : suites()) {
        if (which != "all" && which != e.name && which != std::to_string(e.criterion)) continue;
        any = true;
        auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        std::string summary;
        try {
            auto s = e.run(quick, detail);
            ok = s.passed();
            summary = std::to_string(s.size() - s.failures()) + "/" + std::to_string(s.size()) + " checks";
        } catch (const std::exception& ex) {
            summary = std::string("error: ") + ex.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ostringstream line;
        line.setf(std::ios::fixed);
        line.precision(1);
        line << (ok ? "PASS" : "FAIL") << " criterion " << e.criterion << " " << e.name << ": " << summary << " (" << secs << " s)";
        out << line.str() << std::endl;
        all_ok = all_ok && ok;
    }
    if (!any) throw ValidationError("unknown suite '" + which + "'");
    return all_ok;
}

} // namespace imcl::verify
