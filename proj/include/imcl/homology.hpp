#pragma once

#include "imcl/group.hpp"
#include "imcl/snf.hpp"

#include <cstring>
#include <fstream>

namespace imcl {

struct HomologyLimits {
    std::uint32_t max_order = 4096;        // groups handled by the presentation route
    std::uint64_t max_cover_order = 20000; // |G| * |H2|
};

// Reidemeister-Schreier data for the presentation of G on a greedy generating set X.
// R/[F,R] is the cokernel of the conjugation relations on the Schreier generators of R;
// its torsion is H2(G) and its free part is complemented away in the cover.
class Presentation {
public:
    explicit Presentation(const FiniteGroup& G, const HomologyLimits& lim = {}) : G_(G)
    {
        if (G.order() > lim.max_order)
            throw CapacityError("h2: order " + std::to_string(G.order()) + " above the configured cap " + std::to_string(lim.max_order));
        X_ = generating_set(G);
        const std::uint32_t n = G.order();
        const std::size_t k = X_.size();
        parent_.assign(n, 0);
        pgen_.assign(n, 0);
        std::vector<char> seen(n, 0);
        seen[0] = 1;
        std::vector<elem> queue{0};
        for (std::size_t i = 0; i < queue.size(); ++i)
            for (std::size_t j = 0; j < k; ++j) {
                elem h = G.mul(queue[i], X_[j]);
                if (!seen[h]) {
                    seen[h] = 1;
                    parent_[h] = queue[i];
                    pgen_[h] = static_cast<elem>(j);
                    queue.push_back(h);
                }
            }
        edge_.assign(std::size_t(n) * k, -1);
        for (elem g = 0; g < n; ++g)
            for (std::size_t j = 0; j < k; ++j) {
                elem h = G.mul(g, X_[j]);
                bool tree = h != 0 && parent_[h] == g && pgen_[h] == j;
                if (!tree) {
                    edge_[std::size_t(g) * k + j] = static_cast<std::int64_t>(edges_.size());
                    edges_.push_back({g, static_cast<elem>(j)});
                }
            }
        words_.assign(n, {});
        for (elem h : queue) {
            if (h == 0) continue;
            words_[h] = words_[parent_[h]];
            words_[h].push_back(static_cast<int>(pgen_[h]) + 1);
        }

        // relations y * r * y^-1 - r for every Schreier generator r and y in X
        const std::size_t N = edges_.size();
        IntMatrix rel;
        std::vector<std::int64_t> acc(N);
        for (std::size_t r = 0; r < N; ++r) {
            auto [g, j] = edges_[r];
            for (std::size_t y = 0; y < k; ++y) {
                std::vector<int> w{static_cast<int>(y) + 1};
                append(w, words_[g]);
                w.push_back(static_cast<int>(j) + 1);
                append_inverse(w, words_[G.mul(g, X_[j])]);
                w.push_back(-static_cast<int>(y) - 1);
                std::fill(acc.begin(), acc.end(), 0);
                rewrite(w, acc);
                acc[r] -= 1;
                std::vector<bigint> row(N);
                bool nz = false;
                for (std::size_t e = 0; e < N; ++e) {
                    row[e] = acc[e];
                    nz = nz || acc[e] != 0;
                }
                if (nz) rel.push_back(std::move(row));
            }
        }
        SmithForm snf = smith_normal_form(std::move(rel), N);
        std::vector<std::uint64_t> d;
        for (std::size_t i = 0; i < N; ++i) {
            bigint di = i < snf.diag.size() ? snf.diag[i] : bigint(0);
            if (di > 1) {
                torsion_cols_.push_back(i);
                d.push_back(static_cast<std::uint64_t>(di));
            }
        }
        h2_.d = d;
        Qt_.assign(N, std::vector<std::int64_t>(torsion_cols_.size()));
        for (std::size_t e = 0; e < N; ++e)
            for (std::size_t t = 0; t < torsion_cols_.size(); ++t) {
                bigint q = snf.Q[e][torsion_cols_[t]] % bigint(d[t]);
                if (q < 0) q += d[t];
                Qt_[e][t] = static_cast<std::int64_t>(q);
            }
    }

    const AbelianStructure& h2() const { return h2_; }
    const std::vector<elem>& generators() const { return X_; }

    // Torsion coordinates of the relator w_g w_h w_gh^-1.
    std::vector<std::int64_t> cocycle(elem g, elem h) const
    {
        std::vector<int> w = words_[g];
        append(w, words_[h]);
        append_inverse(w, words_[G_.mul(g, h)]);
        std::vector<std::int64_t> acc(edges_.size(), 0);
        rewrite(w, acc);
        std::vector<std::int64_t> y(h2_.d.size(), 0);
        for (std::size_t e = 0; e < acc.size(); ++e)
            if (acc[e] != 0)
                for (std::size_t t = 0; t < y.size(); ++t) y[t] += acc[e] * Qt_[e][t];
        for (std::size_t t = 0; t < y.size(); ++t) y[t] = mod_floor(y[t], static_cast<std::int64_t>(h2_.d[t]));
        return y;
    }

private:
    static void append(std::vector<int>& w, const std::vector<int>& u) { w.insert(w.end(), u.begin(), u.end()); }
    static void append_inverse(std::vector<int>& w, const std::vector<int>& u)
    {
        for (auto it = u.rbegin(); it != u.rend(); ++it) w.push_back(-*it);
    }
    void rewrite(const std::vector<int>& w, std::vector<std::int64_t>& acc) const
    {
        const std::size_t k = X_.size();
        elem c = 0;
        for (int letter : w) {
            if (letter > 0) {
                std::size_t j = static_cast<std::size_t>(letter - 1);
                auto e = edge_[std::size_t(c) * k + j];
                if (e >= 0) acc[e] += 1;
                c = G_.mul(c, X_[j]);
            } else {
                std::size_t j = static_cast<std::size_t>(-letter - 1);
                elem c2 = G_.mul(c, G_.inv(X_[j]));
                auto e = edge_[std::size_t(c2) * k + j];
                if (e >= 0) acc[e] -= 1;
                c = c2;
            }
        }
    }

    FiniteGroup G_;
    std::vector<elem> X_, parent_, pgen_;
    std::vector<std::int64_t> edge_;
    std::vector<std::pair<elem, elem>> edges_;
    std::vector<std::vector<int>> words_;
    std::vector<std::size_t> torsion_cols_;
    std::vector<std::vector<std::int64_t>> Qt_;
    AbelianStructure h2_;
};

inline AbelianStructure h2(const FiniteGroup& G, const HomologyLimits& lim = {}) { return Presentation(G, lim).h2(); }

// Central extension 1 -> A -> S -> G -> 1 with S-index a * |G| + g, a the mixed-radix index in tau.
struct CentralExtension {
    FiniteGroup total;
    FiniteGroup base;
    AbelianStructure tau;
    std::vector<std::uint32_t> sigma; // a-index of the cocycle, |G|^2 entries

    std::uint32_t base_order() const { return base.order(); }
    elem proj(elem s) const { return s % base.order(); }
    std::uint64_t a_index(elem s) const { return s / base.order(); }
    bool in_kernel(elem s) const { return proj(s) == 0; }
    elem kernel_elem(const std::vector<std::int64_t>& a) const { return static_cast<elem>(tau.encode(a) * base.order()); }
    std::vector<std::int64_t> kernel_coords(elem s) const
    {
        if (!in_kernel(s)) throw DomainError("element is not in the central kernel");
        return tau.decode(a_index(s));
    }
    elem section(elem g) const { return g; }
    std::vector<elem> kernel_members() const
    {
        std::vector<elem> k;
        for (std::uint64_t a = 0; a < tau.order(); ++a) k.push_back(static_cast<elem>(a * base.order()));
        return k;
    }
};

inline CentralExtension extension_from_cocycle(const FiniteGroup& G, const AbelianStructure& tau, std::vector<std::uint32_t> sigma,
                                               const HomologyLimits& lim = {})
{
    const std::uint64_t na = tau.order(), ng = G.order(), n = na * ng;
    if (n > lim.max_cover_order) throw CapacityError("cover order " + std::to_string(n) + " above the configured cap");
    std::vector<std::uint32_t> addA(na * na);
    for (std::uint64_t a = 0; a < na; ++a) {
        auto va = tau.decode(a);
        for (std::uint64_t b = 0; b < na; ++b) addA[a * na + b] = static_cast<std::uint32_t>(tau.encode(tau.add(va, tau.decode(b))));
    }
    std::vector<elem> t(n * n);
    for (std::uint64_t x = 0; x < n; ++x) {
        std::uint64_t a1 = x / ng, g1 = x % ng;
        for (std::uint64_t y = 0; y < n; ++y) {
            std::uint64_t a2 = y / ng, g2 = y % ng;
            std::uint64_t a = addA[addA[a1 * na + a2] * na + sigma[g1 * ng + g2]];
            t[x * n + y] = static_cast<elem>(a * ng + G.mul(static_cast<elem>(g1), static_cast<elem>(g2)));
        }
    }
    return {FiniteGroup::trusted(static_cast<std::uint32_t>(n), std::move(t)), G, tau, std::move(sigma)};
}

// Stem condition and order certificate.
inline void verify_stem(const CentralExtension& S, const AbelianStructure& expected)
{
    if (S.total.order() != std::uint64_t(S.base_order()) * expected.order())
        throw InternalError("cover order is not |G| * |H2(G)|");
    auto D = derived_subgroup(S.total);
    std::vector<char> inD(S.total.order(), 0);
    for (elem x : D) inD[x] = 1;
    std::uint64_t hits = 0;
    for (elem k : S.kernel_members()) hits += inD[k];
    if (hits != expected.order()) throw InternalError("stem check failed: kernel not inside the commutator subgroup");
    for (elem k : S.kernel_members())
        for (elem s = 0; s < S.total.order(); ++s)
            if (S.total.mul(k, s) != S.total.mul(s, k)) throw InternalError("cover kernel is not central");
}

inline CentralExtension schur_cover(const FiniteGroup& G, const HomologyLimits& lim = {})
{
    Presentation P(G, lim);
    const auto& tau = P.h2();
    const std::uint32_t n = G.order();
    std::vector<std::uint32_t> sigma(std::size_t(n) * n, 0);
    if (!tau.trivial())
        for (elem g = 0; g < n; ++g)
            for (elem h = 0; h < n; ++h) sigma[std::size_t(g) * n + h] = static_cast<std::uint32_t>(tau.encode(P.cocycle(g, h)));
    auto S = extension_from_cocycle(G, tau, std::move(sigma), lim);
    verify_stem(S, tau);
    return S;
}

// Validation of a conjugation- and invertible-power-closed generating subset of G \ {1}.
inline void validate_c(const FiniteGroup& G, const std::vector<elem>& c)
{
    if (c.empty()) throw ValidationError("c is empty");
    std::vector<char> in(G.order(), 0);
    for (elem x : c) {
        if (x >= G.order()) throw ValidationError("c contains an out-of-range element");
        if (x == 0) throw ValidationError("c contains the identity");
        in[x] = 1;
    }
    for (elem x : c) {
        for (elem g = 0; g < G.order(); ++g)
            if (!in[G.conj(g, x)])
                throw ValidationError("c is not closed under conjugation: " + std::to_string(x) + " conjugated by " + std::to_string(g));
        std::uint32_t o = G.elem_order(x);
        for (std::uint32_t m = 2; m < o; ++m)
            if (std::gcd(m, o) == 1 && !in[G.pow(x, m)])
                throw ValidationError("c is not closed under invertible powers: " + std::to_string(x) + "^" + std::to_string(m));
    }
    if (subgroup_closure(G, c).size() != G.order()) throw ValidationError("c does not generate G");
}

// Quotient of the central kernel by commutators of lifts of commuting pairs (x in c).
inline CentralExtension reduce_cover(const CentralExtension& S, const std::vector<elem>& c, const HomologyLimits& lim = {})
{
    const FiniteGroup& G = S.base;
    const std::size_t k = S.tau.d.size();
    std::set<std::vector<std::int64_t>> W;
    for (elem x : c)
        for (elem y : centralizer(G, x)) {
            auto v = S.kernel_coords(S.total.commutator(S.section(x), S.section(y)));
            if (std::any_of(v.begin(), v.end(), [](std::int64_t t) { return t != 0; })) W.insert(v);
        }
    if (W.empty()) return S;
    IntMatrix M;
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<bigint> r(k);
        r[i] = S.tau.d[i];
        M.push_back(r);
    }
    for (const auto& w : W) {
        std::vector<bigint> r(k);
        for (std::size_t i = 0; i < k; ++i) r[i] = w[i];
        M.push_back(r);
    }
    SmithForm snf = smith_normal_form(std::move(M), k);
    std::vector<std::size_t> cols;
    AbelianStructure tau2;
    for (std::size_t i = 0; i < k; ++i)
        if (snf.diag[i] > 1) {
            cols.push_back(i);
            tau2.d.push_back(static_cast<std::uint64_t>(snf.diag[i]));
        }
    auto project = [&](const std::vector<std::int64_t>& a) {
        std::vector<std::int64_t> y(cols.size());
        for (std::size_t t = 0; t < cols.size(); ++t) {
            bigint s = 0;
            for (std::size_t i = 0; i < k; ++i) s += bigint(a[i]) * snf.Q[i][cols[t]];
            s %= bigint(tau2.d[t]);
            if (s < 0) s += tau2.d[t];
            y[t] = static_cast<std::int64_t>(s);
        }
        return y;
    };
    std::vector<std::uint32_t> amap(S.tau.order());
    for (std::uint64_t a = 0; a < S.tau.order(); ++a) amap[a] = static_cast<std::uint32_t>(tau2.encode(project(S.tau.decode(a))));
    std::vector<std::uint32_t> sigma(S.sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = amap[S.sigma[i]];
    return extension_from_cocycle(G, tau2, std::move(sigma), lim);
}

inline AbelianStructure h2_reduced(const FiniteGroup& G, const std::vector<elem>& c, const HomologyLimits& lim = {})
{
    return reduce_cover(schur_cover(G, lim), c, lim).tau;
}

// ---------------------------------------------------------------- U(G, c)

struct UElement {
    elem s = 0;
    std::vector<std::int64_t> v;
    bool operator==(const UElement& o) const { return s == o.s && v == o.v; }
};

struct KElement {
    std::vector<std::int64_t> h; // coordinates in H2(G, c)
    std::vector<std::int64_t> v; // class-multiplicity vector
    bool operator==(const KElement& o) const { return h == o.h && v == o.v; }
    bool operator<(const KElement& o) const { return h != o.h ? h < o.h : v < o.v; }
};

class UContext {
public:
    FiniteGroup G;
    std::vector<elem> c;
    std::vector<char> in_c;
    ConjClassTable classes;
    std::vector<std::uint32_t> cls;    // G-class id -> index in c/G, or ~0
    std::vector<elem> reps;            // representative x_gamma per c/G index
    CentralExtension Sc;
    std::vector<elem> lift;            // bracket lift per element of c (indexed by G element)
    Quotient ab;                       // G -> G^ab
    std::vector<elem> class_ab;        // image of x_gamma in G^ab

    static UContext build(const FiniteGroup& G, std::vector<elem> c, const HomologyLimits& lim = {})
    {
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        validate_c(G, c);
        return with_cover(G, c, reduce_cover(schur_cover(G, lim), c, lim));
    }

    static UContext with_cover(const FiniteGroup& G, const std::vector<elem>& c, CentralExtension Sc)
    {
        UContext u;
        u.G = G;
        u.c = c;
        u.in_c.assign(G.order(), 0);
        for (elem x : c) u.in_c[x] = 1;
        u.classes = conjugacy_classes(G);
        u.cls.assign(u.classes.size(), ~0u);
        for (std::size_t k = 0; k < u.classes.size(); ++k)
            if (u.in_c[u.classes.reps[k]]) {
                u.cls[k] = static_cast<std::uint32_t>(u.reps.size());
                u.reps.push_back(u.classes.reps[k]);
            }
        u.Sc = std::move(Sc);
        u.lift.assign(G.order(), 0);
        const FiniteGroup& S = u.Sc.total;
        for (elem x : c) {
            elem r = u.classes.reps[u.classes.class_of[x]];
            elem g = u.classes.conjugator[x];
            u.lift[x] = S.conj(u.Sc.section(g), u.Sc.section(r));
        }
        u.ab = abelianization(G).q;
        for (elem r : u.reps) u.class_ab.push_back(u.ab.proj[r]);
        return u;
    }

    std::size_t num_classes() const { return reps.size(); }
    const AbelianStructure& h2c() const { return Sc.tau; }
    std::uint32_t class_index(elem x) const
    {
        auto k = cls[classes.class_of[x]];
        if (k == ~0u) throw DomainError("element " + std::to_string(x) + " is not in c");
        return k;
    }

    UElement identity() const { return {0, std::vector<std::int64_t>(num_classes(), 0)}; }
    UElement bracket(elem x) const
    {
        UElement u = identity();
        u.s = lift[x];
        u.v[class_index(x)] = 1;
        return u;
    }
    UElement mul(const UElement& a, const UElement& b) const
    {
        UElement r{Sc.total.mul(a.s, b.s), a.v};
        for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] += b.v[i];
        return r;
    }
    UElement inverse(const UElement& a) const
    {
        UElement r{Sc.total.inv(a.s), a.v};
        for (auto& x : r.v) x = -x;
        return r;
    }
    UElement pow(const UElement& a, std::int64_t k) const
    {
        UElement r{Sc.total.pow(a.s, k), a.v};
        for (auto& x : r.v) x *= k;
        return r;
    }

    elem ab_of_vector(const std::vector<std::int64_t>& v) const
    {
        elem r = 0;
        for (std::size_t i = 0; i < v.size(); ++i) r = ab.group.mul(r, ab.group.pow(class_ab[i], v[i]));
        return r;
    }
    // Fiber-product compatibility of a pair (s, v).
    bool is_element(const UElement& u) const { return ab.proj[Sc.proj(u.s)] == ab_of_vector(u.v); }
    bool in_K(const UElement& u) const { return Sc.proj(u.s) == 0 && ab_of_vector(u.v) == 0; }

    KElement k_decompose(const UElement& u) const
    {
        if (!in_K(u)) throw DomainError("k_decompose: element is not in K(G,c)");
        return {Sc.kernel_coords(u.s), u.v};
    }
    UElement k_compose(const KElement& k) const
    {
        UElement u{Sc.kernel_elem(k.h), k.v};
        if (ab_of_vector(k.v) != 0) throw DomainError("k_compose: degree vector does not vanish in G^ab");
        return u;
    }

    std::uint64_t c_hash() const { return fnv1a(c.data(), c.size() * sizeof(elem)); }
};

// Versioned binary cache of the reduced cover keyed by (group hash, c hash).
inline constexpr std::uint32_t kUCacheVersion = 1;

inline std::string ucache_name(const FiniteGroup& G, const std::vector<elem>& c)
{
    std::vector<elem> cs = c;
    std::sort(cs.begin(), cs.end());
    char buf[64];
    std::snprintf(buf, sizeof buf, "u_%016llx_%016llx.bin", static_cast<unsigned long long>(G.hash()),
                  static_cast<unsigned long long>(fnv1a(cs.data(), cs.size() * sizeof(elem))));
    return buf;
}

inline void save_ucontext(const UContext& u, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write cache file " + path);
    auto put = [&](std::uint64_t x) { out.write(reinterpret_cast<const char*>(&x), sizeof x); };
    out.write("IMCLUCTX", 8);
    put(kUCacheVersion);
    put(u.G.hash());
    put(u.c_hash());
    put(u.G.order());
    put(u.c.size());
    for (elem x : u.c) put(x);
    put(u.Sc.tau.d.size());
    for (auto d : u.Sc.tau.d) put(d);
    out.write(reinterpret_cast<const char*>(u.Sc.sigma.data()), static_cast<std::streamsize>(u.Sc.sigma.size() * sizeof(std::uint32_t)));
}

// Returns nullopt when the file is absent, stale, or keyed to another input.
inline std::optional<UContext> load_ucontext(const FiniteGroup& G, std::vector<elem> c, const std::string& path,
                                            const HomologyLimits& lim = {})
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::sort(c.begin(), c.end());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "IMCLUCTX", 8) != 0) return std::nullopt;
    auto get = [&]() {
        std::uint64_t x = 0;
        in.read(reinterpret_cast<char*>(&x), sizeof x);
        return x;
    };
    if (get() != kUCacheVersion) return std::nullopt;
    if (get() != G.hash()) return std::nullopt;
    if (get() != fnv1a(c.data(), c.size() * sizeof(elem))) return std::nullopt;
    if (get() != G.order()) return std::nullopt;
    std::vector<elem> cc(get());
    for (auto& x : cc) x = static_cast<elem>(get());
    if (cc != c) return std::nullopt;
    AbelianStructure tau;
    tau.d.resize(get());
    for (auto& d : tau.d) d = get();
    std::vector<std::uint32_t> sigma(std::size_t(G.order()) * G.order());
    in.read(reinterpret_cast<char*>(sigma.data()), static_cast<std::streamsize>(sigma.size() * sizeof(std::uint32_t)));
    if (!in) return std::nullopt;
    validate_c(G, c);
    return UContext::with_cover(G, c, extension_from_cocycle(G, tau, std::move(sigma), lim));
}

// Cached construction; cache_dir empty disables the cache.
inline UContext build_U(const FiniteGroup& G, const std::vector<elem>& c, const std::string& cache_dir = "",
                        const HomologyLimits& lim = {})
{
    if (!cache_dir.empty()) {
        std::string path = cache_dir + "/" + ucache_name(G, c);
        if (auto u = load_ucontext(G, c, path, lim)) return std::move(*u);
        UContext u = UContext::build(G, c, lim);
        save_ucontext(u, path);
        return u;
    }
    return UContext::build(G, c, lim);
}

} // namespace imcl
