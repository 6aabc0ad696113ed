#pragma once

#include "imcl/group.hpp"

#include <cctype>
#include <string>
#include <utility>

namespace imcl {

inline FiniteGroup cyclic_group(std::uint32_t n)
{
    return group_from_rule(n, [n](elem a, elem b) { return (a + b) % n; });
}

// (Z/m)^k, coordinates little-endian base m.
inline FiniteGroup elementary_abelian(std::uint32_t m, std::uint32_t k)
{
    std::uint32_t n = 1;
    for (std::uint32_t i = 0; i < k; ++i) n *= m;
    return group_from_rule(n, [m, k](elem a, elem b) {
        elem r = 0, p = 1;
        for (std::uint32_t i = 0; i < k; ++i) {
            r += ((a / p % m + b / p % m) % m) * p;
            p *= m;
        }
        return r;
    });
}

inline PermGroup symmetric_group(std::uint32_t n)
{
    if (n <= 1) return from_permutations({}, std::max<std::uint32_t>(n, 1));
    std::vector<Perm> gens;
    Perm t(n), c(n);
    std::iota(t.begin(), t.end(), 0);
    std::swap(t[0], t[1]);
    for (std::uint32_t i = 0; i < n; ++i) c[i] = (i + 1) % n;
    return from_permutations({t, c}, n);
}

inline PermGroup alternating_group(std::uint32_t n)
{
    std::vector<Perm> gens;
    for (std::uint32_t i = 2; i < n; ++i) {
        Perm p(n);
        std::iota(p.begin(), p.end(), 0);
        p[0] = 1;
        p[1] = i;
        p[i] = 0;
        gens.push_back(p);
    }
    return from_permutations(gens, std::max<std::uint32_t>(n, 1));
}

// Dihedral group of order 2n acting on n points.
inline PermGroup dihedral_group(std::uint32_t n)
{
    Perm r(n), s(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        r[i] = (i + 1) % n;
        s[i] = (n - i) % n;
    }
    return from_permutations({r, s}, n);
}

// <a, b | a^m, b^n, b a b^-1 = a^r>, element a^i b^j encoded j*m + i.
inline FiniteGroup metacyclic_group(std::uint32_t m, std::uint32_t n, std::uint32_t r)
{
    if (pow_mod(r, n, m) != 1 % m) throw ValidationError("metacyclic: r^n must be 1 mod m");
    std::vector<std::uint32_t> rp(n);
    for (std::uint32_t j = 0; j < n; ++j) rp[j] = static_cast<std::uint32_t>(pow_mod(r, j, m));
    return group_from_rule(m * n, [=](elem x, elem y) {
        elem i1 = x % m, j1 = x / m, i2 = y % m, j2 = y / m;
        return ((j1 + j2) % n) * m + (i1 + i2 * rp[j1]) % m;
    });
}

// Dicyclic group of order 4n: a^(2n) = 1, x^2 = a^n, x a x^-1 = a^-1.
inline FiniteGroup dicyclic_group(std::uint32_t n)
{
    const std::uint32_t m = 2 * n;
    return group_from_rule(2 * m, [=](elem x, elem y) {
        elem i1 = x % m, j1 = x / m, i2 = y % m, j2 = y / m;
        if (j1 == 0) return j2 * m + (i1 + i2) % m;
        elem i = (i1 + m - i2) % m;
        if (j2 == 0) return m + i;
        return (i + n) % m;
    });
}

// Pauli group i^k X^a Z^b, encoded k + 4a + 8b.
inline FiniteGroup pauli_group()
{
    return group_from_rule(16, [](elem x, elem y) {
        elem k1 = x % 4, a1 = x / 4 % 2, b1 = x / 8, k2 = y % 4, a2 = y / 4 % 2, b2 = y / 8;
        elem k = (k1 + k2 + 2 * b1 * a2) % 4;
        return k + 4 * (a1 ^ a2) + 8 * (b1 ^ b2);
    });
}

// (Z/m)^k with Gamma = Z/d acting through multiplication by unit u (u^d = 1 mod m).
inline GammaGroup scalar_action(std::uint32_t m, std::uint32_t k, std::uint32_t d, std::uint32_t u)
{
    if (pow_mod(u, d, m) != 1 % m) throw ValidationError("scalar_action: u^d must be 1 mod m");
    FiniteGroup H = elementary_abelian(m, k);
    std::vector<std::vector<elem>> act(d, std::vector<elem>(H.order()));
    for (std::uint32_t j = 0; j < d; ++j) {
        std::uint64_t uj = pow_mod(u, j, m);
        for (elem x = 0; x < H.order(); ++x) {
            elem r = 0, p = 1;
            for (std::uint32_t i = 0; i < k; ++i) {
                r += static_cast<elem>((x / p % m) * uj % m) * p;
                p *= m;
            }
            act[j][x] = r;
        }
    }
    return GammaGroup::make(H, cyclic_group(d), std::move(act));
}

inline GammaGroup inversion_action(std::uint32_t m, std::uint32_t k = 1) { return scalar_action(m, k, 2, m - 1); }

// (Z/m)^2 with Z/2 swapping the coordinates.
inline GammaGroup swap_action(std::uint32_t m)
{
    FiniteGroup H = elementary_abelian(m, 2);
    std::vector<std::vector<elem>> act(2, std::vector<elem>(H.order()));
    for (elem x = 0; x < H.order(); ++x) {
        act[0][x] = x;
        act[1][x] = (x % m) * m + x / m;
    }
    return GammaGroup::make(H, cyclic_group(2), std::move(act));
}

inline FiniteGroup product_of(std::initializer_list<FiniteGroup> gs)
{
    FiniteGroup acc = trivial_group();
    for (const auto& g : gs) acc = direct_product(acc, g).group;
    return acc;
}

// All 42 groups of order at most 16, one per isomorphism class.
inline std::vector<std::pair<std::string, FiniteGroup>> small_groups_upto16()
{
    std::vector<std::pair<std::string, FiniteGroup>> v;
    auto C = cyclic_group;
    for (std::uint32_t n : {1u, 2u, 3u, 5u, 7u, 11u, 13u}) v.emplace_back("C" + std::to_string(n), C(n));
    v.emplace_back("C4", C(4));
    v.emplace_back("C2xC2", product_of({C(2), C(2)}));
    v.emplace_back("C6", C(6));
    v.emplace_back("S3", symmetric_group(3).group);
    v.emplace_back("C8", C(8));
    v.emplace_back("C4xC2", product_of({C(4), C(2)}));
    v.emplace_back("C2^3", product_of({C(2), C(2), C(2)}));
    v.emplace_back("D8", dihedral_group(4).group);
    v.emplace_back("Q8", dicyclic_group(2));
    v.emplace_back("C9", C(9));
    v.emplace_back("C3xC3", product_of({C(3), C(3)}));
    v.emplace_back("C10", C(10));
    v.emplace_back("D10", dihedral_group(5).group);
    v.emplace_back("C12", C(12));
    v.emplace_back("C6xC2", product_of({C(6), C(2)}));
    v.emplace_back("D12", dihedral_group(6).group);
    v.emplace_back("A4", alternating_group(4).group);
    v.emplace_back("Dic3", dicyclic_group(3));
    v.emplace_back("C14", C(14));
    v.emplace_back("D14", dihedral_group(7).group);
    v.emplace_back("C15", C(15));
    v.emplace_back("C16", C(16));
    v.emplace_back("C4xC4", product_of({C(4), C(4)}));
    {
        GammaGroup sw = swap_action(2);
        GammaGroup g4 = GammaGroup::make(sw.base, C(4), {sw.act[0], sw.act[1], sw.act[0], sw.act[1]});
        v.emplace_back("C2^2:C4", semidirect(g4).group);
    }
    v.emplace_back("C4:C4", metacyclic_group(4, 4, 3));
    v.emplace_back("C8xC2", product_of({C(8), C(2)}));
    v.emplace_back("M16", metacyclic_group(8, 2, 5));
    v.emplace_back("D16", dihedral_group(8).group);
    v.emplace_back("SD16", metacyclic_group(8, 2, 3));
    v.emplace_back("Q16", dicyclic_group(4));
    v.emplace_back("C4xC2^2", product_of({C(4), C(2), C(2)}));
    v.emplace_back("C2xD8", product_of({C(2), dihedral_group(4).group}));
    v.emplace_back("C2xQ8", product_of({C(2), dicyclic_group(2)}));
    v.emplace_back("Pauli", pauli_group());
    v.emplace_back("C2^4", product_of({C(2), C(2), C(2), C(2)}));
    return v;
}

struct NamedGroup {
    FiniteGroup group;
    std::vector<Perm> perms; // filled when the group is a permutation group
    std::uint32_t degree = 0;
};

// Names: Cn, Dn (order 2n), Sn, An, Dicn, Q8, Pauli, and products joined by 'x'.
inline NamedGroup group_by_name(const std::string& name)
{
    auto pos = name.find('x');
    if (pos != std::string::npos) {
        FiniteGroup acc = trivial_group();
        std::size_t start = 0;
        while (true) {
            auto end = name.find('x', start);
            acc = direct_product(acc, group_by_name(name.substr(start, end - start)).group).group;
            if (end == std::string::npos) break;
            start = end + 1;
        }
        return {acc, {}, 0};
    }
    auto num = [&](std::size_t from) -> std::uint32_t {
        std::string d = name.substr(from);
        if (d.empty() || !std::all_of(d.begin(), d.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            throw ValidationError("unknown group name: " + name);
        return static_cast<std::uint32_t>(std::stoul(d));
    };
    if (name == "Q8") return {dicyclic_group(2), {}, 0};
    if (name == "Pauli") return {pauli_group(), {}, 0};
    if (name.rfind("Dic", 0) == 0) return {dicyclic_group(num(3)), {}, 0};
    if (name.empty()) throw ValidationError("empty group name");
    PermGroup pg;
    std::uint32_t n;
    switch (name[0]) {
    case 'C': return {cyclic_group(num(1)), {}, 0};
    case 'D': n = num(1); pg = dihedral_group(n); break;
    case 'S': n = num(1); pg = symmetric_group(n); break;
    case 'A': n = num(1); pg = alternating_group(n); break;
    default: throw ValidationError("unknown group name: " + name);
    }
    return {pg.group, pg.elements, n};
}

} // namespace imcl
