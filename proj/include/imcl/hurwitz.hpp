#pragma once

#include "imcl/homology.hpp"

#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace imcl {

struct HurwitzLimits {
    std::size_t memory_bytes = std::size_t(2) << 30;
    static constexpr std::size_t bytes_per_tuple = 40; // key, union-find slot, hash slots
};

struct NielsenTuple {
    std::vector<elem> entries; // n-1 entries, product = g_inf^-1
    elem g_inf = 0;
    bool operator==(const NielsenTuple& o) const { return entries == o.entries && g_inf == o.g_inf; }
};

struct LiftingInvariant {
    KElement z_full;
    elem g_inf = 0;
    bool operator==(const LiftingInvariant& o) const { return z_full == o.z_full && g_inf == o.g_inf; }
};

struct BraidOrbit {
    NielsenTuple rep;
    std::uint64_t size = 0;
    LiftingInvariant invariant;
};

inline NielsenTuple braid_act(const FiniteGroup& G, std::size_t i, NielsenTuple t)
{
    if (i < 1 || i + 1 > t.entries.size()) throw DomainError("braid index out of range");
    elem a = t.entries[i - 1], b = t.entries[i];
    t.entries[i - 1] = G.conj(a, b);
    t.entries[i] = a;
    return t;
}

inline NielsenTuple braid_inverse(const FiniteGroup& G, std::size_t i, NielsenTuple t)
{
    if (i < 1 || i + 1 > t.entries.size()) throw DomainError("braid index out of range");
    elem a = t.entries[i - 1], b = t.entries[i];
    t.entries[i - 1] = b;
    t.entries[i] = G.conj(G.inv(b), a);
    return t;
}

namespace hurwitz_detail {

// Tuples over a fixed alphabet c packed into 64 bits, first entry most significant.
struct Packer {
    std::vector<elem> c;
    std::vector<std::uint32_t> pos; // G element -> index in c, or ~0
    unsigned bits = 1;
    std::size_t len = 0;

    Packer(const FiniteGroup& G, const std::vector<elem>& cc, std::size_t length) : c(cc), pos(G.order(), ~0u), len(length)
    {
        for (std::size_t i = 0; i < c.size(); ++i) pos[c[i]] = static_cast<std::uint32_t>(i);
        while ((std::size_t(1) << bits) < c.size()) ++bits;
        if (bits * len > 64) throw CapacityError("tuple of length " + std::to_string(len) + " over " + std::to_string(c.size()) + " symbols does not fit a 64-bit key");
    }
    std::uint64_t pack(const elem* e) const
    {
        std::uint64_t k = 0;
        for (std::size_t i = 0; i < len; ++i) k = (k << bits) | pos[e[i]];
        return k;
    }
    void unpack(std::uint64_t k, elem* e) const
    {
        const std::uint64_t mask = (std::uint64_t(1) << bits) - 1;
        for (std::size_t i = len; i-- > 0;) {
            e[i] = c[k & mask];
            k >>= bits;
        }
    }
};

// Open-addressing map from packed key to dense index.
class KeyIndex {
public:
    explicit KeyIndex(std::size_t n)
    {
        std::size_t cap = 16;
        while (cap < 2 * n + 1) cap <<= 1;
        slots_.assign(cap, kEmpty);
        mask_ = cap - 1;
    }
    void insert(std::uint64_t key, std::uint32_t idx, const std::vector<std::uint64_t>& keys)
    {
        std::size_t h = mix(key) & mask_;
        while (slots_[h] != kEmpty) {
            if (keys[slots_[h]] == key) return;
            h = (h + 1) & mask_;
        }
        slots_[h] = idx;
    }
    std::uint32_t find(std::uint64_t key, const std::vector<std::uint64_t>& keys) const
    {
        std::size_t h = mix(key) & mask_;
        while (slots_[h] != kEmpty) {
            if (keys[slots_[h]] == key) return slots_[h];
            h = (h + 1) & mask_;
        }
        return kEmpty;
    }
    static constexpr std::uint32_t kEmpty = ~0u;

private:
    static std::size_t mix(std::uint64_t x)
    {
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        x *= 0xc4ceb9fe1a85ec53ULL;
        x ^= x >> 33;
        return static_cast<std::size_t>(x);
    }
    std::vector<std::uint32_t> slots_;
    std::size_t mask_ = 0;
};

inline std::vector<elem> sorted_c(const FiniteGroup& G, std::vector<elem> c)
{
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    validate_c(G, c);
    return c;
}

} // namespace hurwitz_detail

// Rough size of the tuple set used for the capacity check.
inline double estimate_tuple_count(const FiniteGroup& G, std::size_t csize, std::size_t n)
{
    return std::pow(double(csize), double(n - 1)) / double(G.order());
}

// Calls emit(entries) for every Nielsen tuple in lexicographic order.
inline void enumerate_tuples(const FiniteGroup& G, const std::vector<elem>& c_in, elem g_inf, std::size_t n,
                             const std::function<void(const std::vector<elem>&)>& emit, const HurwitzLimits& lim = {})
{
    if (g_inf == 0) throw DomainError("g_inf must be nontrivial");
    if (n < 2) throw DomainError("n must be at least 2");
    auto c = hurwitz_detail::sorted_c(G, c_in);
    const std::size_t len = n - 1;
    double est = estimate_tuple_count(G, c.size(), n);
    if (est * HurwitzLimits::bytes_per_tuple > double(lim.memory_bytes))
        throw CapacityError("estimated " + std::to_string(static_cast<std::uint64_t>(est)) + " tuples exceed the memory budget");
    const elem target = G.inv(g_inf);
    std::vector<char> in_c(G.order(), 0);
    for (elem x : c) in_c[x] = 1;

    // generation test memoized on the set of distinct entries
    const bool use_mask = c.size() <= 64;
    std::vector<std::uint32_t> pos(G.order(), 0);
    for (std::size_t i = 0; i < c.size(); ++i) pos[c[i]] = static_cast<std::uint32_t>(i);
    std::unordered_map<std::uint64_t, bool> gen_cache;
    auto generates = [&](const std::vector<elem>& t) {
        std::uint64_t mask = 0;
        if (use_mask) {
            for (elem x : t) mask |= std::uint64_t(1) << pos[x];
            auto it = gen_cache.find(mask);
            if (it != gen_cache.end()) return it->second;
        }
        SubgroupBuilder b(G);
        b.add(g_inf);
        for (elem x : t) {
            if (b.full()) break;
            b.add(x);
        }
        bool ok = b.full();
        if (use_mask) gen_cache.emplace(mask, ok);
        return ok;
    };

    std::vector<elem> t(len);
    if (len == 1) {
        t[0] = target;
        if (in_c[target] && generates(t)) emit(t);
        return;
    }
    // split: prefix of length a, suffix of length len - a indexed by product
    const std::size_t a = len / 2, b = len - a;
    std::vector<std::vector<std::vector<elem>>> suffix_by_prod(G.order());
    {
        std::vector<std::size_t> idx(b, 0);
        std::vector<elem> s(b);
        while (true) {
            elem p = 0;
            for (std::size_t i = 0; i < b; ++i) {
                s[i] = c[idx[i]];
                p = G.mul(p, s[i]);
            }
            suffix_by_prod[p].push_back(s);
            std::size_t k = b;
            while (k > 0 && ++idx[k - 1] == c.size()) idx[--k] = 0;
            if (k == 0) break;
        }
    }
    std::vector<std::size_t> idx(a, 0);
    while (true) {
        elem p = 0;
        for (std::size_t i = 0; i < a; ++i) {
            t[i] = c[idx[i]];
            p = G.mul(p, t[i]);
        }
        for (const auto& s : suffix_by_prod[G.mul(G.inv(p), target)]) {
            std::copy(s.begin(), s.end(), t.begin() + static_cast<std::ptrdiff_t>(a));
            if (generates(t)) emit(t);
        }
        std::size_t k = a;
        while (k > 0 && ++idx[k - 1] == c.size()) idx[--k] = 0;
        if (k == 0) break;
    }
}

inline std::vector<NielsenTuple> enumerate_tuples(const FiniteGroup& G, const std::vector<elem>& c, elem g_inf, std::size_t n,
                                                  const HurwitzLimits& lim = {})
{
    std::vector<NielsenTuple> out;
    enumerate_tuples(G, c, g_inf, n, [&](const std::vector<elem>& t) { out.push_back({t, g_inf}); }, lim);
    return out;
}

inline LiftingInvariant lifting_invariant(const UContext& ctx, const NielsenTuple& t)
{
    if (!ctx.in_c[t.g_inf]) throw DomainError("g_inf is not in c");
    UElement z = ctx.identity();
    for (elem x : t.entries) z = ctx.mul(z, ctx.bracket(x));
    z = ctx.mul(z, ctx.bracket(t.g_inf));
    return {ctx.k_decompose(z), t.g_inf};
}

// Permutations of c/G induced by the invertible power maps that preserve c.
inline std::vector<std::vector<std::uint32_t>> class_power_permutations(const UContext& ctx)
{
    std::set<std::vector<std::uint32_t>> perms;
    const std::uint64_t e = ctx.G.exponent();
    for (std::uint64_t k = 1; k <= e; ++k) {
        if (std::gcd(k, e) != 1) continue;
        auto pm = ctx.classes.power_map(ctx.G, static_cast<std::int64_t>(k));
        std::vector<std::uint32_t> perm(ctx.num_classes());
        bool ok = true;
        for (std::size_t i = 0; i < ctx.num_classes() && ok; ++i) {
            auto img = ctx.cls[pm[ctx.classes.class_of[ctx.reps[i]]]];
            if (img == ~0u) ok = false;
            else perm[i] = img;
        }
        if (ok) perms.insert(perm);
    }
    return {perms.begin(), perms.end()};
}

// Lexicographically minimal image of v under the class power permutations.
inline std::vector<std::int64_t> shape_of(const std::vector<std::vector<std::uint32_t>>& perms, const std::vector<std::int64_t>& v)
{
    std::vector<std::int64_t> best = v;
    for (const auto& p : perms) {
        std::vector<std::int64_t> w(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) w[p[i]] = v[i];
        best = std::min(best, w);
    }
    return best;
}

inline std::vector<std::int64_t> shape_invariant(const UContext& ctx, const NielsenTuple& t)
{
    return shape_of(class_power_permutations(ctx), lifting_invariant(ctx, t).z_full.v);
}

struct OrbitResult {
    std::vector<BraidOrbit> orbits;
    std::uint64_t tuple_count = 0;
    bool invariant_constant = true; // every tuple has its orbit's invariant
    std::vector<std::pair<NielsenTuple, NielsenTuple>> violations;
};

// Braid orbits modulo <g_inf>-conjugation. With ctx, every tuple's invariant is
// compared with the orbit representative's.
inline OrbitResult orbits(const FiniteGroup& G, const std::vector<elem>& c_in, elem g_inf, std::size_t n, const UContext* ctx = nullptr,
                          const HurwitzLimits& lim = {})
{
    using namespace hurwitz_detail;
    auto c = sorted_c(G, c_in);
    const std::size_t len = n - 1;
    Packer pk(G, c, len);
    std::vector<std::uint64_t> keys;
    const std::size_t max_tuples = lim.memory_bytes / HurwitzLimits::bytes_per_tuple;
    enumerate_tuples(G, c, g_inf, n, [&](const std::vector<elem>& t) {
        if (keys.size() >= max_tuples) throw CapacityError("tuple count exceeds the memory budget at " + std::to_string(keys.size()));
        keys.push_back(pk.pack(t.data()));
    }, lim);
    const std::size_t N = keys.size();
    KeyIndex index(N);
    for (std::size_t i = 0; i < N; ++i) index.insert(keys[i], static_cast<std::uint32_t>(i), keys);

    std::vector<std::uint32_t> parent(N);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](std::uint32_t x, std::uint32_t y) {
        x = find(x);
        y = find(y);
        if (x == y) return;
        if (x < y) parent[y] = x;
        else parent[x] = y;
    };
    auto lookup = [&](const std::vector<elem>& t) {
        auto j = index.find(pk.pack(t.data()), keys);
        if (j == KeyIndex::kEmpty) throw InternalError("braid move left the tuple set");
        return j;
    };
    std::vector<elem> t(len), u(len);
    const elem gi = G.inv(g_inf);
    for (std::size_t i = 0; i < N; ++i) {
        pk.unpack(keys[i], t.data());
        for (std::size_t k = 0; k + 1 < len; ++k) {
            u = t;
            u[k] = G.conj(t[k], t[k + 1]);
            u[k + 1] = t[k];
            unite(static_cast<std::uint32_t>(i), lookup(u));
        }
        for (std::size_t k = 0; k < len; ++k) u[k] = G.mul(G.mul(g_inf, t[k]), gi);
        unite(static_cast<std::uint32_t>(i), lookup(u));
    }

    OrbitResult res;
    res.tuple_count = N;
    std::vector<std::uint32_t> slot(N, ~0u);
    for (std::size_t i = 0; i < N; ++i) {
        std::uint32_t r = find(static_cast<std::uint32_t>(i));
        if (r == i) {
            slot[i] = static_cast<std::uint32_t>(res.orbits.size());
            BraidOrbit o;
            o.rep.g_inf = g_inf;
            o.rep.entries.resize(len);
            pk.unpack(keys[i], o.rep.entries.data());
            if (ctx) o.invariant = lifting_invariant(*ctx, o.rep);
            res.orbits.push_back(std::move(o));
        }
        auto& o = res.orbits[slot[r]];
        ++o.size;
        if (ctx && r != i) {
            NielsenTuple tt{std::vector<elem>(len), g_inf};
            pk.unpack(keys[i], tt.entries.data());
            if (!(lifting_invariant(*ctx, tt) == o.invariant)) {
                res.invariant_constant = false;
                if (res.violations.size() < 8) res.violations.emplace_back(o.rep, tt);
            }
        }
    }
    return res;
}

// K(G,c) elements with total degree n and every class coordinate >= M.
inline std::vector<KElement> k_set(const UContext& ctx, std::int64_t n, std::int64_t M)
{
    std::vector<KElement> out;
    const std::size_t m = ctx.num_classes();
    if (m == 0) return out;
    std::vector<std::int64_t> v(m, M);
    std::int64_t rest = n - M * static_cast<std::int64_t>(m);
    if (rest < 0) return out;
    const auto& tau = ctx.h2c();
    std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t i, std::int64_t left) {
        if (i + 1 == m) {
            v[i] = M + left;
            if (ctx.ab_of_vector(v) != 0) return;
            for (std::uint64_t h = 0; h < tau.order(); ++h) out.push_back({tau.decode(h), v});
            return;
        }
        for (std::int64_t x = 0; x <= left; ++x) {
            v[i] = M + x;
            rec(i + 1, left - x);
        }
    };
    rec(0, rest);
    std::sort(out.begin(), out.end());
    return out;
}

struct StableReport {
    struct PerGenerator {
        elem g_inf = 0;
        std::size_t orbit_count = 0;  // orbits with all multiplicities >= M
        std::size_t k_count = 0;      // |K_{n,>=M}|
        std::vector<std::pair<KElement, std::vector<NielsenTuple>>> collisions; // non-injective fibers
        std::vector<KElement> missing;                                          // not hit by any orbit
        bool injective() const { return collisions.empty(); }
        bool surjective() const { return missing.empty(); }
        bool bijective() const { return injective() && surjective(); }
    };
    std::size_t n = 0;
    std::int64_t M = 0;
    std::vector<PerGenerator> per_generator;
    bool bijective() const
    {
        return std::all_of(per_generator.begin(), per_generator.end(), [](const auto& g) { return g.bijective(); });
    }
};

inline StableReport::PerGenerator compare_with_k(const UContext& ctx, const OrbitResult& orb, elem g_inf, std::size_t n, std::int64_t M)
{
    StableReport::PerGenerator pg;
    pg.g_inf = g_inf;
    std::map<KElement, std::vector<NielsenTuple>> hit;
    for (const auto& o : orb.orbits) {
        const auto& v = o.invariant.z_full.v;
        if (std::all_of(v.begin(), v.end(), [&](std::int64_t x) { return x >= M; })) {
            ++pg.orbit_count;
            hit[o.invariant.z_full].push_back(o.rep);
        }
    }
    auto K = k_set(ctx, static_cast<std::int64_t>(n), M);
    pg.k_count = K.size();
    for (auto& [k, reps] : hit)
        if (reps.size() > 1) pg.collisions.emplace_back(k, reps);
    for (const auto& k : K)
        if (!hit.count(k)) pg.missing.push_back(k);
    return pg;
}

// G_inf is given by one generator; all its generators are examined.
inline StableReport stable_bijection_report(const UContext& ctx, elem g_inf_gen, std::size_t n, std::int64_t M, const HurwitzLimits& lim = {})
{
    StableReport rep;
    rep.n = n;
    rep.M = M;
    const auto& G = ctx.G;
    const std::uint64_t ord = G.elem_order(g_inf_gen);
    for (std::uint64_t k = 1; k <= ord; ++k) {
        if (std::gcd(k, ord) != 1) continue;
        elem g = G.pow(g_inf_gen, static_cast<std::int64_t>(k));
        auto orb = orbits(G, ctx.c, g, n, &ctx, lim);
        rep.per_generator.push_back(compare_with_k(ctx, orb, g, n, M));
    }
    return rep;
}

inline std::string join_ints(const std::vector<std::int64_t>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
    return s;
}

// CSV: g_inf,representative,size,h,v,shape (lists are ';'-separated element indices or integers)
inline void write_orbits_csv(std::ostream& os, const UContext& ctx, const OrbitResult& res)
{
    auto perms = class_power_permutations(ctx);
    os << "g_inf,representative,size,h,v,shape\n";
    for (const auto& o : res.orbits) {
        std::string r;
        for (std::size_t i = 0; i < o.rep.entries.size(); ++i) r += (i ? ";" : "") + std::to_string(o.rep.entries[i]);
        os << o.rep.g_inf << ',' << r << ',' << o.size << ',' << join_ints(o.invariant.z_full.h) << ',' << join_ints(o.invariant.z_full.v) << ','
           << join_ints(shape_of(perms, o.invariant.z_full.v)) << '\n';
    }
}

} // namespace imcl
