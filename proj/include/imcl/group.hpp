#pragma once

#include "imcl/common.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace imcl {

struct GroupLimits {
    std::size_t order_cap = 100000;
    std::size_t table_bytes = std::size_t(1) << 30;
};

// Finite group as a dense multiplication table; identity is always index 0.
class FiniteGroup {
public:
    FiniteGroup() : FiniteGroup(trusted(1, {0})) {}

    std::uint32_t order() const { return d_->n; }
    elem mul(elem a, elem b) const { return d_->mul[std::size_t(a) * d_->n + b]; }
    elem inv(elem a) const { return d_->inv[a]; }
    const elem* row(elem a) const { return d_->mul.data() + std::size_t(a) * d_->n; }
    const std::vector<elem>& table() const { return d_->mul; }
    std::uint32_t elem_order(elem a) const { return d_->orders[a]; }
    std::uint64_t exponent() const { return d_->exponent; }
    std::uint64_t hash() const { return d_->hash; }
    bool same_as(const FiniteGroup& o) const { return d_ == o.d_; }

    elem conj(elem g, elem x) const { return mul(mul(g, x), inv(g)); }
    elem commutator(elem a, elem b) const { return mul(mul(a, b), mul(inv(a), inv(b))); }

    elem pow(elem a, std::int64_t k) const
    {
        std::int64_t o = elem_order(a);
        k = mod_floor(k, o);
        elem r = 0, x = a;
        while (k) {
            if (k & 1) r = mul(r, x);
            x = mul(x, x);
            k >>= 1;
        }
        return r;
    }

    bool is_abelian() const
    {
        for (elem a = 0; a < order(); ++a)
            for (elem b = a + 1; b < order(); ++b)
                if (mul(a, b) != mul(b, a)) return false;
        return true;
    }

    // Table taken as given; identity must already sit at index 0.
    static FiniteGroup trusted(std::uint32_t n, std::vector<elem> table)
    {
        auto d = std::make_shared<Data>();
        d->n = n;
        d->mul = std::move(table);
        d->inv.assign(n, 0);
        for (elem a = 0; a < n; ++a) {
            const elem* r = d->mul.data() + std::size_t(a) * n;
            for (elem b = 0; b < n; ++b)
                if (r[b] == 0) {
                    d->inv[a] = b;
                    break;
                }
        }
        d->orders.assign(n, 1);
        d->exponent = 1;
        for (elem a = 1; a < n; ++a) {
            std::uint32_t k = 1;
            elem x = a;
            while (x != 0) {
                x = d->mul[std::size_t(x) * n + a];
                ++k;
            }
            d->orders[a] = k;
            d->exponent = lcm_u(d->exponent, k);
        }
        d->hash = fnv1a(d->mul.data(), d->mul.size() * sizeof(elem));
        FiniteGroup g(0);
        g.d_ = std::move(d);
        return g;
    }

    static FiniteGroup from_mult_table(const std::vector<std::vector<elem>>& rows, bool exhaustive_assoc = false)
    {
        const std::size_t n = rows.size();
        if (n == 0) throw ValidationError("multiplication table is empty");
        std::vector<elem> t(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            if (rows[i].size() != n) throw ValidationError("multiplication table is not square (row " + std::to_string(i) + ")");
            for (std::size_t j = 0; j < n; ++j) {
                if (rows[i][j] >= n) throw ValidationError("table entry out of range at (" + std::to_string(i) + "," + std::to_string(j) + ")");
                t[i * n + j] = rows[i][j];
            }
        }
        return from_flat_table(static_cast<std::uint32_t>(n), std::move(t), exhaustive_assoc);
    }

    static FiniteGroup from_flat_table(std::uint32_t n, std::vector<elem> t, bool exhaustive_assoc = false)
    {
        auto at = [&](elem a, elem b) { return t[std::size_t(a) * n + b]; };
        // identity
        std::optional<elem> e;
        for (elem a = 0; a < n && !e; ++a) {
            bool ok = true;
            for (elem b = 0; b < n && ok; ++b) ok = at(a, b) == b && at(b, a) == b;
            if (ok) e = a;
        }
        if (!e) throw ValidationError("axiom violated: no identity element");
        if (*e != 0) {
            std::vector<elem> relabel(n);
            std::iota(relabel.begin(), relabel.end(), 0);
            std::swap(relabel[0], relabel[*e]);
            std::vector<elem> u(t.size());
            for (elem a = 0; a < n; ++a)
                for (elem b = 0; b < n; ++b) u[std::size_t(relabel[a]) * n + relabel[b]] = relabel[at(a, b)];
            t = std::move(u);
        }
        // inverses
        for (elem a = 0; a < n; ++a) {
            bool ok = false;
            for (elem b = 0; b < n && !ok; ++b) ok = at(a, b) == 0 && at(b, a) == 0;
            if (!ok) throw ValidationError("axiom violated: element " + std::to_string(a) + " has no inverse");
        }
        // associativity
        if (exhaustive_assoc || n <= 128) {
            for (elem a = 0; a < n; ++a)
                for (elem b = 0; b < n; ++b) {
                    elem ab = at(a, b);
                    for (elem c = 0; c < n; ++c)
                        if (at(ab, c) != at(a, at(b, c)))
                            throw ValidationError("axiom violated: associativity fails at (" + std::to_string(a) + "," +
                                                  std::to_string(b) + "," + std::to_string(c) + ")");
                }
        } else {
            std::mt19937_64 rng(n);
            std::uniform_int_distribution<elem> pick(0, n - 1);
            for (int i = 0; i < 200000; ++i) {
                elem a = pick(rng), b = pick(rng), c = pick(rng);
                if (at(at(a, b), c) != at(a, at(b, c)))
                    throw ValidationError("axiom violated: associativity fails at (" + std::to_string(a) + "," +
                                          std::to_string(b) + "," + std::to_string(c) + ")");
            }
        }
        return trusted(n, std::move(t));
    }

private:
    struct Data {
        std::uint32_t n = 1;
        std::vector<elem> mul, inv;
        std::vector<std::uint32_t> orders;
        std::uint64_t exponent = 1;
        std::uint64_t hash = 0;
    };
    explicit FiniteGroup(int) {}
    std::shared_ptr<const Data> d_;
};

inline FiniteGroup trivial_group() { return FiniteGroup::trusted(1, {0}); }

// Closure of gens under right multiplication; elements in BFS order unless `less`
// reorders them (identity is kept first). Table filled by walking the BFS tree.
template <class T, class Hash, class MulFn>
std::pair<FiniteGroup, std::vector<T>> close_group(const T& identity, const std::vector<T>& gens, MulFn mulfn,
                                                   const GroupLimits& lim = {},
                                                   std::function<bool(const T&, const T&)> less = nullptr)
{
    std::vector<T> elems{identity};
    std::unordered_map<T, elem, Hash> index;
    index.emplace(identity, 0);
    const std::size_t ng = gens.size();
    std::vector<elem> parent{0}, pgen{0};
    std::vector<elem> right;
    for (std::size_t i = 0; i < elems.size(); ++i) {
        for (std::size_t j = 0; j < ng; ++j) {
            T y = mulfn(elems[i], gens[j]);
            auto it = index.find(y);
            elem k;
            if (it == index.end()) {
                if (elems.size() >= lim.order_cap)
                    throw CapacityError("group closure exceeds order cap " + std::to_string(lim.order_cap));
                k = static_cast<elem>(elems.size());
                index.emplace(y, k);
                elems.push_back(std::move(y));
                parent.push_back(static_cast<elem>(i));
                pgen.push_back(static_cast<elem>(j));
            } else {
                k = it->second;
            }
            right.push_back(k);
        }
    }
    const std::size_t n = elems.size();
    if (n * n * sizeof(elem) > lim.table_bytes)
        throw CapacityError("multiplication table for order " + std::to_string(n) + " exceeds the memory budget");
    index.clear();
    std::vector<elem> table(n * n);
    for (std::size_t a = 0; a < n; ++a) {
        elem* r = table.data() + a * n;
        r[0] = static_cast<elem>(a);
        for (std::size_t b = 1; b < n; ++b) r[b] = right[std::size_t(r[parent[b]]) * ng + pgen[b]];
    }
    if (less) {
        std::vector<elem> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin() + 1, order.end(), [&](elem x, elem y) { return less(elems[x], elems[y]); });
        std::vector<elem> pos(n);
        for (std::size_t i = 0; i < n; ++i) pos[order[i]] = static_cast<elem>(i);
        std::vector<elem> t2(n * n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) t2[std::size_t(pos[a]) * n + pos[b]] = pos[table[a * n + b]];
        std::vector<T> e2(n);
        for (std::size_t i = 0; i < n; ++i) e2[i] = std::move(elems[order[i]]);
        table = std::move(t2);
        elems = std::move(e2);
    }
    return {FiniteGroup::trusted(static_cast<std::uint32_t>(n), std::move(table)), std::move(elems)};
}

// Group built from an explicit multiplication on encoded elements 0..n-1 (0 = identity).
inline FiniteGroup group_from_rule(std::uint32_t n, const std::function<elem(elem, elem)>& rule)
{
    std::vector<elem> t(std::size_t(n) * n);
    for (elem a = 0; a < n; ++a)
        for (elem b = 0; b < n; ++b) t[std::size_t(a) * n + b] = rule(a, b);
    return FiniteGroup::from_flat_table(n, std::move(t));
}

// ---------------------------------------------------------------- permutations

using Perm = std::vector<std::uint32_t>;

struct PermHash {
    std::size_t operator()(const Perm& p) const { return fnv1a(p.data(), p.size() * sizeof(std::uint32_t)); }
};

struct PermGroup {
    FiniteGroup group;
    std::vector<Perm> elements;

    std::optional<elem> find(const Perm& p) const
    {
        auto it = std::lower_bound(elements.begin() + 1, elements.end(), p);
        if (it != elements.end() && *it == p) return static_cast<elem>(it - elements.begin());
        if (!elements.empty() && elements[0] == p) return 0;
        return std::nullopt;
    }
};

// Cycle notation such as "(0 1 2)(3 4)" or "()" on points 0..degree-1.
inline Perm parse_cycles(const std::string& s, std::uint32_t degree)
{
    Perm p(degree);
    std::iota(p.begin(), p.end(), 0);
    std::size_t i = 0;
    while (i < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
            continue;
        }
        if (s[i] != '(') throw ValidationError("bad cycle notation: " + s);
        auto j = s.find(')', i);
        if (j == std::string::npos) throw ValidationError("unclosed cycle: " + s);
        std::string body = s.substr(i + 1, j - i - 1);
        for (char& ch : body)
            if (ch == ',') ch = ' ';
        std::istringstream in(body);
        std::vector<std::uint32_t> cyc;
        long long x;
        while (in >> x) {
            if (x < 0 || x >= degree) throw ValidationError("cycle point out of range: " + std::to_string(x));
            cyc.push_back(static_cast<std::uint32_t>(x));
        }
        std::set<std::uint32_t> seen(cyc.begin(), cyc.end());
        if (seen.size() != cyc.size()) throw ValidationError("repeated point in cycle: " + s);
        Perm c(degree);
        std::iota(c.begin(), c.end(), 0);
        for (std::size_t k = 0; k < cyc.size(); ++k) c[cyc[k]] = cyc[(k + 1) % cyc.size()];
        // cycles written left to right are applied right to left
        Perm q(degree);
        for (std::uint32_t t = 0; t < degree; ++t) q[t] = p[c[t]];
        p = q;
        i = j + 1;
    }
    return p;
}

inline std::string cycles_string(const Perm& p)
{
    std::string out;
    std::vector<char> seen(p.size(), 0);
    for (std::uint32_t i = 0; i < p.size(); ++i) {
        if (seen[i] || p[i] == i) continue;
        out += "(";
        std::uint32_t j = i;
        bool first = true;
        while (!seen[j]) {
            seen[j] = 1;
            if (!first) out += " ";
            out += std::to_string(j);
            first = false;
            j = p[j];
        }
        out += ")";
    }
    return out.empty() ? "()" : out;
}

// Product convention: (a*b)(i) = a(b(i)). Elements sorted by image list.
inline PermGroup from_permutations(const std::vector<Perm>& gens, std::uint32_t degree, const GroupLimits& lim = {})
{
    for (const auto& g : gens) {
        if (g.size() != degree) throw ValidationError("permutation has wrong degree");
        std::vector<char> hit(degree, 0);
        for (auto x : g) {
            if (x >= degree || hit[x]) throw ValidationError("generator is not a bijection");
            hit[x] = 1;
        }
    }
    Perm id(degree);
    std::iota(id.begin(), id.end(), 0);
    auto mulfn = [](const Perm& a, const Perm& b) {
        Perm c(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[b[i]];
        return c;
    };
    auto [g, elems] = close_group<Perm, PermHash>(id, gens, mulfn, lim, [](const Perm& a, const Perm& b) { return a < b; });
    return {std::move(g), std::move(elems)};
}

// ---------------------------------------------------------------- subgroups

struct Subgroup {
    FiniteGroup parent;
    std::vector<elem> members; // sorted

    std::size_t order() const { return members.size(); }
    bool contains(elem x) const { return std::binary_search(members.begin(), members.end(), x); }
};

// Incremental closure under left multiplication by the accumulated generators.
class SubgroupBuilder {
public:
    explicit SubgroupBuilder(const FiniteGroup& G) : G_(G), in_(G.order(), 0), list_{0} { in_[0] = 1; }

    bool contains(elem x) const { return in_[x] != 0; }
    std::size_t size() const { return list_.size(); }
    const std::vector<elem>& elements() const { return list_; }
    const std::vector<elem>& generators() const { return gens_; }
    bool full() const { return list_.size() == G_.order(); }

    bool add(elem x)
    {
        if (in_[x]) return false;
        gens_.push_back(x);
        const std::size_t old = list_.size();
        const elem* rx = G_.row(x);
        for (std::size_t i = 0; i < old; ++i) push(rx[list_[i]]);
        for (std::size_t i = old; i < list_.size(); ++i)
            for (elem g : gens_) push(G_.row(g)[list_[i]]);
        return true;
    }

    std::vector<elem> sorted() const
    {
        std::vector<elem> v = list_;
        std::sort(v.begin(), v.end());
        return v;
    }

private:
    void push(elem y)
    {
        if (!in_[y]) {
            in_[y] = 1;
            list_.push_back(y);
        }
    }
    const FiniteGroup& G_;
    std::vector<char> in_;
    std::vector<elem> list_;
    std::vector<elem> gens_;
};

inline std::vector<elem> subgroup_closure(const FiniteGroup& G, const std::vector<elem>& gens)
{
    SubgroupBuilder b(G);
    for (elem g : gens) b.add(g);
    return b.sorted();
}

// Greedy generating set: elements of large order first.
inline std::vector<elem> generating_set(const FiniteGroup& G)
{
    std::vector<elem> cand(G.order());
    std::iota(cand.begin(), cand.end(), 0);
    std::stable_sort(cand.begin(), cand.end(), [&](elem a, elem b) { return G.elem_order(a) > G.elem_order(b); });
    SubgroupBuilder b(G);
    for (elem x : cand) {
        if (b.full()) break;
        b.add(x);
    }
    return b.generators();
}

// Smallest subgroup containing S and stable under conjugation by `conjugators`
// and under every permutation in `autos`.
inline std::vector<elem> stable_closure(const FiniteGroup& G, const std::vector<elem>& S, const std::vector<elem>& conjugators,
                                        const std::vector<const std::vector<elem>*>& autos)
{
    SubgroupBuilder b(G);
    for (elem s : S) b.add(s);
    for (std::size_t i = 0; i < b.generators().size(); ++i) {
        if (b.full()) break;
        elem s = b.generators()[i];
        for (elem t : conjugators) b.add(G.conj(t, s));
        for (auto* a : autos) b.add((*a)[s]);
    }
    return b.sorted();
}

inline std::vector<elem> normal_closure(const FiniteGroup& G, const std::vector<elem>& S)
{
    return stable_closure(G, S, generating_set(G), {});
}

inline std::vector<elem> derived_subgroup(const FiniteGroup& G)
{
    auto gens = generating_set(G);
    std::vector<elem> comms;
    for (elem a : gens)
        for (elem b : gens) comms.push_back(G.commutator(a, b));
    return normal_closure(G, comms);
}

inline std::vector<elem> center(const FiniteGroup& G)
{
    auto gens = generating_set(G);
    std::vector<elem> z;
    for (elem x = 0; x < G.order(); ++x) {
        bool ok = true;
        for (elem g : gens) ok = ok && G.mul(g, x) == G.mul(x, g);
        if (ok) z.push_back(x);
    }
    return z;
}

inline std::vector<elem> centralizer(const FiniteGroup& G, elem x)
{
    std::vector<elem> c;
    for (elem y = 0; y < G.order(); ++y)
        if (G.mul(x, y) == G.mul(y, x)) c.push_back(y);
    return c;
}

struct Quotient {
    FiniteGroup group;
    std::vector<elem> proj; // G -> Q
    std::vector<elem> lift; // Q -> minimal coset member
};

// Quotient by a normal subgroup N (sorted members).
inline Quotient quotient(const FiniteGroup& G, const std::vector<elem>& N)
{
    const std::uint32_t n = G.order();
    std::vector<elem> proj(n, ~elem(0)), lift;
    for (elem g = 0; g < n; ++g) {
        if (proj[g] != ~elem(0)) continue;
        elem c = static_cast<elem>(lift.size());
        lift.push_back(g);
        const elem* r = G.row(g);
        for (elem x : N) proj[r[x]] = c;
    }
    const std::uint32_t m = static_cast<std::uint32_t>(lift.size());
    std::vector<elem> t(std::size_t(m) * m);
    for (elem a = 0; a < m; ++a)
        for (elem b = 0; b < m; ++b) t[std::size_t(a) * m + b] = proj[G.mul(lift[a], lift[b])];
    return {FiniteGroup::trusted(m, std::move(t)), std::move(proj), std::move(lift)};
}

struct Abelianization {
    Quotient q;
    std::vector<elem> derived;
};

inline Abelianization abelianization(const FiniteGroup& G)
{
    auto D = derived_subgroup(G);
    return {quotient(G, D), D};
}

// ---------------------------------------------------------------- conjugacy

struct ConjClassTable {
    std::vector<std::uint32_t> class_of;
    std::vector<elem> reps;                  // minimal element of each class
    std::vector<std::vector<elem>> members;  // sorted
    std::vector<elem> conjugator;            // conjugator[x] * rep * conjugator[x]^-1 = x

    std::size_t size() const { return reps.size(); }

    // Class map gamma -> gamma^k; requires gcd(k, exponent) = 1.
    std::vector<std::uint32_t> power_map(const FiniteGroup& G, std::int64_t k) const
    {
        if (std::gcd(static_cast<std::uint64_t>(mod_floor(k, std::int64_t(G.exponent()))), G.exponent()) != 1 &&
            G.exponent() > 1)
            throw DomainError("power_map: exponent " + std::to_string(k) + " is not a unit modulo the group exponent");
        std::vector<std::uint32_t> pm(reps.size());
        for (std::size_t i = 0; i < reps.size(); ++i) pm[i] = class_of[G.pow(reps[i], k)];
        return pm;
    }
};

inline ConjClassTable conjugacy_classes(const FiniteGroup& G)
{
    const std::uint32_t n = G.order();
    ConjClassTable t;
    t.class_of.assign(n, ~0u);
    t.conjugator.assign(n, 0);
    for (elem x = 0; x < n; ++x) {
        if (t.class_of[x] != ~0u) continue;
        std::uint32_t id = static_cast<std::uint32_t>(t.reps.size());
        t.reps.push_back(x);
        std::vector<elem> mem;
        for (elem g = 0; g < n; ++g) {
            elem y = G.conj(g, x);
            if (t.class_of[y] == ~0u) {
                t.class_of[y] = id;
                t.conjugator[y] = g;
                mem.push_back(y);
            }
        }
        std::sort(mem.begin(), mem.end());
        t.members.push_back(std::move(mem));
    }
    return t;
}

// ---------------------------------------------------------------- products

struct ProductGroup {
    FiniteGroup group;
    std::vector<elem> embed_first, embed_second;
};

// Index of (a, b) is a * |B| + b.
inline ProductGroup direct_product(const FiniteGroup& A, const FiniteGroup& B)
{
    const std::uint32_t na = A.order(), nb = B.order(), n = na * nb;
    std::vector<elem> t(std::size_t(n) * n);
    for (elem x = 0; x < n; ++x)
        for (elem y = 0; y < n; ++y)
            t[std::size_t(x) * n + y] = A.mul(x / nb, y / nb) * nb + B.mul(x % nb, y % nb);
    ProductGroup p{FiniteGroup::trusted(n, std::move(t)), {}, {}};
    for (elem a = 0; a < na; ++a) p.embed_first.push_back(a * nb);
    for (elem b = 0; b < nb; ++b) p.embed_second.push_back(b);
    return p;
}

// ---------------------------------------------------------------- Gamma-groups

class GammaGroup {
public:
    FiniteGroup base, gamma;
    std::vector<std::vector<elem>> act; // act[g][h]

    GammaGroup() : act{{0}} {}

    elem apply(elem g, elem h) const { return act[g][h]; }

    static GammaGroup make(FiniteGroup base, FiniteGroup gamma, std::vector<std::vector<elem>> act)
    {
        GammaGroup G;
        G.base = std::move(base);
        G.gamma = std::move(gamma);
        G.act = std::move(act);
        G.validate();
        return G;
    }

    static GammaGroup trivial_action(FiniteGroup base, FiniteGroup gamma)
    {
        std::vector<elem> id(base.order());
        std::iota(id.begin(), id.end(), 0);
        std::vector<std::vector<elem>> act(gamma.order(), id);
        return make(std::move(base), std::move(gamma), std::move(act));
    }

    void validate() const
    {
        const std::uint32_t n = base.order();
        if (act.size() != gamma.order()) throw ValidationError("Gamma action must list one permutation per Gamma element");
        auto gens = generating_set(base);
        for (std::size_t g = 0; g < act.size(); ++g) {
            const auto& a = act[g];
            if (a.size() != n) throw ValidationError("Gamma action permutation has wrong length");
            std::vector<char> hit(n, 0);
            for (elem x : a) {
                if (x >= n || hit[x]) throw ValidationError("Gamma action entry is not a permutation");
                hit[x] = 1;
            }
            for (elem x = 0; x < n; ++x)
                for (elem y : gens)
                    if (a[base.mul(x, y)] != base.mul(a[x], a[y]))
                        throw ValidationError("Gamma element " + std::to_string(g) + " does not act by an automorphism");
        }
        for (elem x = 0; x < n; ++x)
            if (act[0][x] != x) throw ValidationError("Gamma identity does not act trivially");
        for (elem g = 0; g < gamma.order(); ++g)
            for (elem h = 0; h < gamma.order(); ++h) {
                const auto& gh = act[gamma.mul(g, h)];
                for (elem x = 0; x < n; ++x)
                    if (gh[x] != act[g][act[h][x]]) throw ValidationError("Gamma action is not a homomorphism");
            }
    }

    std::vector<const std::vector<elem>*> action_ptrs() const
    {
        std::vector<const std::vector<elem>*> v;
        for (const auto& a : act) v.push_back(&a);
        return v;
    }
};

// Cyclic subgroup generated by g, sorted.
inline std::vector<elem> cyclic_subgroup(const FiniteGroup& G, elem g)
{
    std::vector<elem> s{0};
    for (elem x = g; x != 0; x = G.mul(x, g)) s.push_back(x);
    std::sort(s.begin(), s.end());
    return s;
}

inline bool coprime_action(const GammaGroup& H) { return std::gcd<std::uint64_t>(H.base.order(), H.gamma.order()) == 1; }

// Fixed points of the action of the Gamma-elements in D.
inline Subgroup invariants(const GammaGroup& H, const std::vector<elem>& D)
{
    Subgroup s{H.base, {}};
    for (elem x = 0; x < H.base.order(); ++x) {
        bool fixed = true;
        for (elem g : D) fixed = fixed && H.act[g][x] == x;
        if (fixed) s.members.push_back(x);
    }
    return s;
}

inline std::vector<elem> all_elements(const FiniteGroup& G)
{
    std::vector<elem> v(G.order());
    std::iota(v.begin(), v.end(), 0);
    return v;
}

// Y(g)_gamma = g^-1 gamma(g), indexed by Gamma elements.
inline std::vector<elem> Y(const GammaGroup& H, elem g)
{
    std::vector<elem> y(H.gamma.order());
    for (elem k = 0; k < H.gamma.order(); ++k) y[k] = H.base.mul(H.base.inv(g), H.act[k][g]);
    return y;
}

inline Subgroup admissible_closure(const GammaGroup& H, const std::vector<elem>& S)
{
    std::vector<elem> seeds;
    for (elem s : S)
        for (elem y : Y(H, s)) seeds.push_back(y);
    return {H.base, stable_closure(H.base, seeds, {}, H.action_ptrs())};
}

inline bool is_admissible(const GammaGroup& H)
{
    return coprime_action(H) && admissible_closure(H, all_elements(H.base)).order() == H.base.order();
}

struct Semidirect {
    FiniteGroup group;
    std::vector<elem> embed_H, embed_Gamma, proj_Gamma;
};

// (h1,g1)(h2,g2) = (h1 g1(h2), g1 g2); index of (h, g) is g * |H| + h.
inline Semidirect semidirect(const GammaGroup& H)
{
    const std::uint32_t nh = H.base.order(), ng = H.gamma.order(), n = nh * ng;
    std::vector<elem> t(std::size_t(n) * n);
    for (elem x = 0; x < n; ++x) {
        elem h1 = x % nh, g1 = x / nh;
        for (elem y = 0; y < n; ++y) {
            elem h2 = y % nh, g2 = y / nh;
            t[std::size_t(x) * n + y] = H.gamma.mul(g1, g2) * nh + H.base.mul(h1, H.act[g1][h2]);
        }
    }
    Semidirect s{FiniteGroup::trusted(n, std::move(t)), {}, {}, {}};
    for (elem h = 0; h < nh; ++h) s.embed_H.push_back(h);
    for (elem g = 0; g < ng; ++g) s.embed_Gamma.push_back(g * nh);
    for (elem x = 0; x < n; ++x) s.proj_Gamma.push_back(x / nh);
    return s;
}

// All Gamma-stable subgroups, sorted by order then members.
inline std::vector<std::vector<elem>> gamma_subgroups(const GammaGroup& H, std::size_t cap = 100000)
{
    std::set<std::vector<elem>> seen;
    std::vector<std::vector<elem>> out{{0}};
    seen.insert({0});
    auto autos = H.action_ptrs();
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::vector<char> in(H.base.order(), 0);
        for (elem x : out[i]) in[x] = 1;
        std::vector<char> tried(H.base.order(), 0);
        for (elem x = 1; x < H.base.order(); ++x) {
            if (in[x] || tried[x]) continue;
            std::vector<elem> gens = out[i];
            gens.push_back(x);
            auto K = stable_closure(H.base, gens, {}, autos);
            for (elem y : K)
                if (!in[y]) tried[y] = 1;
            if (seen.insert(K).second) {
                if (seen.size() > cap) throw CapacityError("Gamma-subgroup lattice exceeds cap");
                out.push_back(std::move(K));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; });
    return out;
}

// Number of Gamma-homomorphisms F_n -> H that are onto, counted as admissibly
// generating n-tuples divided by |H^Gamma|^n (Y is constant on left H^Gamma-cosets).
inline bigint count_generating_tuples_direct(std::size_t n, const GammaGroup& H)
{
    const std::uint32_t m = H.base.order();
    bigint total = 0;
    std::vector<elem> t(n, 0);
    while (true) {
        if (admissible_closure(H, t).order() == m) total += 1;
        std::size_t k = 0;
        while (k < n && ++t[k] == m) t[k++] = 0;
        if (k == n) break;
    }
    return total;
}

inline bigint count_generating_tuples_mobius(std::size_t n, const GammaGroup& H)
{
    auto subs = gamma_subgroups(H);
    // T(K): elements whose Y-coordinates lie in K
    std::vector<bigint> f(subs.size());
    for (std::size_t i = 0; i < subs.size(); ++i) {
        std::vector<char> in(H.base.order(), 0);
        for (elem x : subs[i]) in[x] = 1;
        std::uint64_t T = 0;
        for (elem h = 0; h < H.base.order(); ++h) {
            bool ok = true;
            for (elem y : Y(H, h)) ok = ok && in[y];
            if (ok) ++T;
        }
        bigint val = boost::multiprecision::pow(bigint(T), static_cast<unsigned>(n));
        for (std::size_t j = 0; j < i; ++j)
            if (subs[j].size() < subs[i].size() && std::includes(subs[i].begin(), subs[i].end(), subs[j].begin(), subs[j].end()))
                val -= f[j];
        f[i] = val;
    }
    return f.back();
}

inline bigint count_generating_tuples(std::size_t n, const GammaGroup& H)
{
    double work = std::pow(double(H.base.order()), double(n));
    return work <= 2e5 ? count_generating_tuples_direct(n, H) : count_generating_tuples_mobius(n, H);
}

inline bigint count_sur_free_admissible(std::size_t n, const GammaGroup& H)
{
    bigint tuples = count_generating_tuples(n, H);
    bigint fix = invariants(H, all_elements(H.gamma)).order();
    bigint denom = boost::multiprecision::pow(fix, static_cast<unsigned>(n));
    if (tuples % denom != 0) throw InternalError("tuple count not divisible by |H^Gamma|^n");
    return tuples / denom;
}

// ---------------------------------------------------------------- isomorphisms

namespace detail {

// Backtracking over images of a generating set of A. `visit` receives each
// complete bijective Gamma-equivariant map and returns false to stop.
inline void gamma_iso_search(const GammaGroup& A, const GammaGroup& B,
                             const std::function<bool(const std::vector<elem>&)>& visit)
{
    const std::uint32_t n = A.base.order();
    if (B.base.order() != n || A.gamma.order() != B.gamma.order()) return;
    auto gens = generating_set(A.base);
    const std::size_t k = gens.size();
    std::vector<std::vector<elem>> cands(k);
    for (std::size_t j = 0; j < k; ++j)
        for (elem b = 0; b < n; ++b)
            if (B.base.elem_order(b) == A.base.elem_order(gens[j])) cands[j].push_back(b);
    std::vector<elem> img(k);
    std::function<bool(std::size_t, std::vector<elem>&, std::vector<elem>&)> rec;
    const elem NONE = ~elem(0);
    rec = [&](std::size_t j, std::vector<elem>& phi, std::vector<elem>& domain) -> bool {
        if (j == k) {
            if (domain.size() != n) return true;
            std::vector<char> hit(n, 0);
            for (elem x = 0; x < n; ++x) {
                if (hit[phi[x]]) return true;
                hit[phi[x]] = 1;
            }
            for (elem g = 0; g < A.gamma.order(); ++g)
                for (elem x = 0; x < n; ++x)
                    if (phi[A.act[g][x]] != B.act[g][phi[x]]) return true;
            return visit(phi);
        }
        for (elem b : cands[j]) {
            std::vector<elem> phi2 = phi, dom2 = domain;
            img[j] = b;
            // extend the partial homomorphism to <gens[0..j]>
            bool ok = true;
            std::size_t start = 0;
            if (phi2[gens[j]] != NONE) ok = phi2[gens[j]] == b;
            for (std::size_t i = start; ok && i < dom2.size(); ++i) {
                elem a = dom2[i];
                for (std::size_t t = 0; t <= j && ok; ++t) {
                    elem x = A.base.mul(a, gens[t]);
                    elem y = B.base.mul(phi2[a], img[t]);
                    if (phi2[x] == NONE) {
                        phi2[x] = y;
                        dom2.push_back(x);
                    } else if (phi2[x] != y) {
                        ok = false;
                    }
                }
            }
            if (ok && !rec(j + 1, phi2, dom2)) return false;
        }
        return true;
    };
    std::vector<elem> phi(n, NONE), dom{0};
    phi[0] = 0;
    rec(0, phi, dom);
}

} // namespace detail

inline std::optional<std::vector<elem>> find_gamma_isomorphism(const GammaGroup& A, const GammaGroup& B)
{
    std::optional<std::vector<elem>> out;
    detail::gamma_iso_search(A, B, [&](const std::vector<elem>& phi) {
        out = phi;
        return false;
    });
    return out;
}

inline std::uint64_t count_aut_gamma(const GammaGroup& H)
{
    std::uint64_t c = 0;
    detail::gamma_iso_search(H, H, [&](const std::vector<elem>&) {
        ++c;
        return true;
    });
    return c;
}

// Gamma-equivariant homomorphisms A -> B; `visit` gets the full map and returns false to stop.
inline void gamma_hom_search(const GammaGroup& A, const GammaGroup& B, const std::function<bool(const std::vector<elem>&)>& visit)
{
    if (A.gamma.order() != B.gamma.order()) return;
    const std::uint32_t n = A.base.order();
    auto gens = generating_set(A.base);
    const std::size_t k = gens.size();
    std::vector<std::vector<elem>> cands(k);
    for (std::size_t j = 0; j < k; ++j)
        for (elem b = 0; b < B.base.order(); ++b)
            if (A.base.elem_order(gens[j]) % B.base.elem_order(b) == 0) cands[j].push_back(b);
    const elem NONE = ~elem(0);
    std::vector<elem> img(k);
    std::function<bool(std::size_t, const std::vector<elem>&, const std::vector<elem>&)> rec;
    rec = [&](std::size_t j, const std::vector<elem>& phi, const std::vector<elem>& dom) -> bool {
        if (j == k) {
            if (dom.size() != n) return true;
            for (elem g = 0; g < A.gamma.order(); ++g)
                for (elem x : gens)
                    if (phi[A.act[g][x]] != B.act[g][phi[x]]) return true;
            return visit(phi);
        }
        for (elem b : cands[j]) {
            if (phi[gens[j]] != NONE && phi[gens[j]] != b) continue;
            std::vector<elem> phi2 = phi, dom2 = dom;
            img[j] = b;
            bool ok = true;
            for (std::size_t i = 0; ok && i < dom2.size(); ++i) {
                elem a = dom2[i];
                for (std::size_t t = 0; t <= j && ok; ++t) {
                    elem x = A.base.mul(a, gens[t]);
                    elem y = B.base.mul(phi2[a], img[t]);
                    if (phi2[x] == NONE) {
                        phi2[x] = y;
                        dom2.push_back(x);
                    } else if (phi2[x] != y) {
                        ok = false;
                    }
                }
            }
            if (ok && !rec(j + 1, phi2, dom2)) return false;
        }
        return true;
    };
    std::vector<elem> phi(n, NONE), dom{0};
    phi[0] = 0;
    rec(0, phi, dom);
}

inline std::uint64_t count_gamma_surjections(const GammaGroup& A, const GammaGroup& B)
{
    if (B.base.order() > A.base.order() || A.base.order() % B.base.order() != 0) return 0;
    std::uint64_t c = 0;
    gamma_hom_search(A, B, [&](const std::vector<elem>& phi) {
        std::vector<char> hit(B.base.order(), 0);
        std::size_t m = 0;
        for (elem y : phi)
            if (!hit[y]) {
                hit[y] = 1;
                ++m;
            }
        if (m == B.base.order()) ++c;
        return true;
    });
    return c;
}

// Invariant fingerprint used to bucket outcomes before isomorphism search.
inline std::string gamma_fingerprint(const GammaGroup& H)
{
    const FiniteGroup& G = H.base;
    std::ostringstream os;
    os << "o" << G.order() << ".e" << G.exponent();
    std::map<std::uint32_t, std::uint32_t> orders;
    for (elem x = 0; x < G.order(); ++x) orders[G.elem_order(x)]++;
    os << ".ord";
    for (auto [k, v] : orders) os << "_" << k << "x" << v;
    auto ab = abelianization(G);
    os << ".ab" << ab.q.group.order();
    auto cc = conjugacy_classes(G);
    std::map<std::size_t, std::uint32_t> sizes;
    for (const auto& m : cc.members) sizes[m.size()]++;
    os << ".cls";
    for (auto [k, v] : sizes) os << "_" << k << "x" << v;
    os << ".fix";
    for (elem g = 0; g < H.gamma.order(); ++g) os << "_" << invariants(H, {g}).order();
    return os.str();
}

} // namespace imcl
