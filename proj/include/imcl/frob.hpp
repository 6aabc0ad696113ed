#pragma once

#include "imcl/hurwitz.hpp"

#include <map>
#include <optional>

namespace imcl {

// q-th power lift correction delta(x) = [x^{q^-1}]^q [x]^-1, an element of K(G,c).
inline KElement delta_correction(const UContext& ctx, elem x, std::uint64_t q)
{
    const std::uint64_t o = ctx.G.elem_order(x);
    if (std::gcd(q, o) != 1) throw DomainError("delta_correction: q is not prime to the order of x");
    elem y = ctx.G.pow(x, static_cast<std::int64_t>(inv_mod(q % o, o)));
    UElement d = ctx.mul(ctx.pow(ctx.bracket(y), static_cast<std::int64_t>(q)), ctx.inverse(ctx.bracket(x)));
    return ctx.k_decompose(d);
}

class Frobenius {
public:
    Frobenius(const UContext& ctx, std::uint64_t q) : ctx_(ctx), q_(q)
    {
        if (q < 2) throw DomainError("q must be at least 2");
        if (std::gcd<std::uint64_t>(q, ctx.G.order()) != 1) throw DomainError("q must be prime to |G|");
        const auto& tau = ctx.h2c();
        for (auto d : tau.d) qinv_.push_back(static_cast<std::int64_t>(inv_mod(q % d, d)));
        for (elem r : ctx.reps) {
            auto dl = delta_correction(ctx, r, q);
            hdelta_.push_back(dl.h);
            elem y = ctx.G.pow(r, static_cast<std::int64_t>(inv_mod(q % ctx.G.elem_order(r), ctx.G.elem_order(r))));
            perm_.push_back(ctx.class_index(y));
        }
    }

    std::uint64_t q() const { return q_; }
    // class of x^{q^-1} for the representative of class i
    const std::vector<std::uint32_t>& class_perm() const { return perm_; }

    std::vector<std::int64_t> h_D(const std::vector<std::int64_t>& v) const
    {
        const auto& tau = ctx_.h2c();
        std::vector<std::int64_t> h(tau.d.size(), 0);
        for (std::size_t g = 0; g < v.size(); ++g)
            for (std::size_t i = 0; i < h.size(); ++i) {
                auto d = static_cast<std::int64_t>(tau.d[i]);
                h[i] = mod_floor(h[i] + mod_floor(v[g], d) * hdelta_[g][i], d);
            }
        return h;
    }

    KElement apply(const KElement& z) const
    {
        const auto& tau = ctx_.h2c();
        // D z has degree vector q * (v pushed along the class permutation)
        std::vector<std::int64_t> w(z.v.size(), 0);
        for (std::size_t g = 0; g < z.v.size(); ++g) {
            std::int64_t dv = z.v[g] * static_cast<std::int64_t>(q_);
            w[perm_[g]] += dv;
        }
        for (auto& x : w) {
            if (x % static_cast<std::int64_t>(q_) != 0) throw InternalError("frobenius: free coordinate not divisible by q");
            x /= static_cast<std::int64_t>(q_);
        }
        auto hd = h_D(z.v);
        std::vector<std::int64_t> h(tau.d.size());
        for (std::size_t i = 0; i < h.size(); ++i) {
            auto d = static_cast<std::int64_t>(tau.d[i]);
            h[i] = mod_floor((z.h[i] + hd[i]) % d * qinv_[i], d);
        }
        return {h, w};
    }

    LiftingInvariant apply(const LiftingInvariant& inv) const
    {
        if (q_ % ctx_.G.elem_order(inv.g_inf) != 1 % ctx_.G.elem_order(inv.g_inf))
            throw DomainError("frobenius_map: q must be 1 modulo the order of g_inf");
        return {apply(inv.z_full), inv.g_inf};
    }

    // Steps after which the map is the identity: order of q modulo the exponent of S_c.
    std::uint64_t period() const { return mult_order(q_ % ctx_.Sc.total.exponent(), ctx_.Sc.total.exponent()); }

private:
    const UContext& ctx_;
    std::uint64_t q_;
    std::vector<std::int64_t> qinv_;
    std::vector<std::vector<std::int64_t>> hdelta_;
    std::vector<std::uint32_t> perm_;
};

inline LiftingInvariant frobenius_map(const UContext& ctx, const LiftingInvariant& inv, std::uint64_t q)
{
    return Frobenius(ctx, q).apply(inv);
}

inline void check_frobenius_params(const FiniteGroup& G, elem g_inf_gen, std::uint64_t q)
{
    if (q < 2) throw DomainError("q must be at least 2");
    if (std::gcd<std::uint64_t>(q, G.order()) != 1) throw DomainError("q must be prime to |G|");
    auto o = G.elem_order(g_inf_gen);
    if (q % o != 1 % o) throw DomainError("q must be 1 modulo |G_inf| = " + std::to_string(o));
}

struct FixedCount {
    std::uint64_t b = 0;
    std::uint64_t d = 0;
    std::map<std::vector<std::int64_t>, std::uint64_t> by_h; // refinement by H2(G,c) coordinate
    std::uint64_t brute = 0;
};

// Number of orbits of q-th powering on the classes in c.
inline std::uint64_t powering_orbits(const UContext& ctx, std::uint64_t q)
{
    Frobenius F(ctx, q);
    const auto& p = F.class_perm();
    std::vector<char> seen(p.size(), 0);
    std::uint64_t d = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (seen[i]) continue;
        ++d;
        for (std::size_t j = i; !seen[j]; j = p[j]) seen[j] = 1;
    }
    return d;
}

// b counted in closed form and by scanning K(G,c)_{n,>=M}; the two must agree.
inline FixedCount fixed_counts(const UContext& ctx, elem g_inf_gen, std::uint64_t q, std::size_t n, std::int64_t M = 0)
{
    check_frobenius_params(ctx.G, g_inf_gen, q);
    Frobenius F(ctx, q);
    FixedCount out;
    out.d = powering_orbits(ctx, q);
    const auto& tau = ctx.h2c();
    const auto& perm = F.class_perm();

    // (a) closed form: v constant on powering orbits, then solve (q-1) h = h_D(v)
    std::vector<std::vector<std::int64_t>> vs;
    for (const auto& k : k_set(ctx, static_cast<std::int64_t>(n), M))
        if (std::all_of(k.h.begin(), k.h.end(), [](std::int64_t x) { return x == 0; })) vs.push_back(k.v);
    for (const auto& v : vs) {
        bool constant = true;
        for (std::size_t g = 0; g < v.size(); ++g) constant = constant && v[perm[g]] == v[g];
        if (!constant) continue;
        auto hd = F.h_D(v);
        // per cyclic factor: (q-1) h = t mod d has gcd(q-1, d) solutions if gcd | t, else none
        std::uint64_t sols = 1;
        for (std::size_t i = 0; i < tau.d.size() && sols; ++i) {
            std::uint64_t g = std::gcd(q - 1, tau.d[i]);
            sols = (static_cast<std::uint64_t>(hd[i]) % g == 0) ? sols * g : 0;
        }
        out.b += sols;
    }

    // (b) brute force over the K-set
    for (const auto& k : k_set(ctx, static_cast<std::int64_t>(n), M))
        if (F.apply(k) == k) {
            ++out.brute;
            ++out.by_h[k.h];
        }
    if (out.b != out.brute)
        throw InternalError("fixed_counts: closed form " + std::to_string(out.b) + " != brute force " + std::to_string(out.brute));
    return out;
}

struct HurPrediction {
    bigint pi;
    bigint main_term;
    std::string error_term; // symbolic
};

inline HurPrediction predicted_hur_count(const UContext& ctx, elem g_inf_gen, std::uint64_t q, std::size_t n)
{
    auto fc = fixed_counts(ctx, g_inf_gen, q, n);
    std::uint64_t o = ctx.G.elem_order(g_inf_gen), gens = 0;
    for (std::uint64_t k = 1; k <= o; ++k) gens += std::gcd(k, o) == 1;
    HurPrediction p;
    p.pi = bigint(fc.b) * gens;
    p.main_term = p.pi * boost::multiprecision::pow(bigint(q), static_cast<unsigned>(n - 1));
    p.error_term = "O(q^((2n-3)/2)) = O(q^(" + std::to_string(2 * n - 3) + "/2))";
    return p;
}

inline void check_moment_params(const GammaGroup& H, elem gamma_inf_gen, std::optional<std::uint64_t> q)
{
    if (!is_admissible(H)) throw DomainError("H is not an admissible Gamma-group");
    if (!q) return;
    auto o = H.gamma.elem_order(gamma_inf_gen);
    if (std::gcd<std::uint64_t>(*q, std::uint64_t(H.base.order()) * H.gamma.order()) != 1)
        throw DomainError("q must be prime to |H||Gamma|");
    if (*q % o != 1 % o)
        throw DomainError("q must be 1 modulo |Gamma_inf| = " + std::to_string(o) + "; otherwise no imaginary extensions exist");
}

inline rational invariant_index(const GammaGroup& H, elem gamma_inf_gen)
{
    auto hinf = invariants(H, cyclic_subgroup(H.gamma, gamma_inf_gen)).order();
    auto hg = invariants(H, all_elements(H.gamma)).order();
    return rational(bigint(hinf), bigint(hg));
}

// |H2(H x| Gamma)_{(|Gamma|)'}[q-1]|
inline std::uint64_t roots_of_unity_factor(const GammaGroup& H, std::uint64_t q)
{
    auto h2g = h2(semidirect(H).group);
    std::uint64_t count = 1;
    for (auto d : h2g.d) {
        std::uint64_t part = d;
        for (auto p : prime_factors(H.gamma.order()))
            while (part % p == 0) part /= p;
        count *= std::gcd(part, q - 1);
    }
    return count;
}

// q empty means the fixed-delta limit q -> infinity.
inline rational moment_prediction(const GammaGroup& H, elem gamma_inf_gen, std::optional<std::uint64_t> q)
{
    check_moment_params(H, gamma_inf_gen, q);
    rational base = 1 / invariant_index(H, gamma_inf_gen);
    if (!q) return base;
    return base * roots_of_unity_factor(H, *q);
}

struct BridgeResult {
    rational factor;      // sum of #Sur = factor * #Hur
    std::vector<elem> c_G;
    Semidirect G;
    std::vector<elem> G_inf;
    rational sur_from_hur(const rational& hur) const { return factor * hur; }
    rational hur_from_sur(const rational& sur) const { return sur / factor; }
};

inline BridgeResult sur_hur_bridge(const GammaGroup& H, elem gamma_inf_gen)
{
    BridgeResult r;
    r.G = semidirect(H);
    const auto& G = r.G.group;
    for (elem x = 1; x < G.order(); ++x) {
        elem img = r.G.proj_Gamma[x];
        if (img != 0 && G.elem_order(x) == H.gamma.elem_order(img)) r.c_G.push_back(x);
    }
    for (elem g : cyclic_subgroup(H.gamma, gamma_inf_gen)) r.G_inf.push_back(r.G.embed_Gamma[g]);
    std::sort(r.G_inf.begin(), r.G_inf.end());
    for (elem x : r.G_inf)
        if (x != 0 && r.G.proj_Gamma[x] == 0) throw DomainError("G_inf meets H nontrivially");
    r.factor = invariant_index(H, gamma_inf_gen) / rational(bigint(r.G_inf.size()));
    return r;
}

} // namespace imcl
