#pragma once

#include "imcl/fl.hpp"
#include "imcl/group.hpp"
#include "imcl/snf.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace imcl {

// A finite variety of Gamma-groups, given by generators.
struct VarietySpec {
    std::string name;
    FiniteGroup gamma;
    std::vector<GammaGroup> generators;

    void validate() const
    {
        for (const auto& T : generators) {
            if (T.gamma.order() != gamma.order()) throw ValidationError("variety generators must share Gamma");
            if (std::gcd<std::uint64_t>(T.base.order(), 2 * std::uint64_t(gamma.order())) != 1)
                throw ValidationError("variety member orders must be prime to 2|Gamma|");
        }
    }
};

// Abelian groups of exponent dividing N with Gamma = Z/d acting through units.
inline VarietySpec abelian_variety(std::uint32_t N, std::uint32_t d)
{
    VarietySpec v;
    v.name = "abelian-exp" + std::to_string(N);
    v.gamma = group_from_rule(d, [d](elem a, elem b) { return (a + b) % d; });
    for (std::uint32_t u = 1; u < N; ++u)
        if (std::gcd(u, N) == 1 && pow_mod(u, d, N) == 1 % N) {
            FiniteGroup T = group_from_rule(N, [N](elem a, elem b) { return (a + b) % N; });
            std::vector<std::vector<elem>> act(d, std::vector<elem>(N));
            for (std::uint32_t j = 0; j < d; ++j)
                for (elem x = 0; x < N; ++x) act[j][x] = static_cast<elem>(x * pow_mod(u, j, N) % N);
            v.generators.push_back(GammaGroup::make(T, v.gamma, std::move(act)));
        }
    v.validate();
    return v;
}

struct FreeAdmissible {
    std::size_t n = 0;
    GammaGroup group;
    std::vector<std::vector<elem>> marked; // marked[i][gamma] = y_{i,gamma}
    std::vector<elem> generators;          // distinct nontrivial marked elements
    bool abelian = true;

    std::vector<elem> invariant_subgroup(elem gamma_inf_gen) const
    {
        return invariants(group, cyclic_subgroup(group.gamma, gamma_inf_gen)).members;
    }
};

namespace randgrp_detail {

using Comp = std::vector<std::uint16_t>;
struct CompHash {
    std::size_t operator()(const Comp& c) const { return fnv1a(c.data(), c.size() * sizeof(std::uint16_t)); }
};

inline GammaGroup trivial_gamma_group(const FiniteGroup& gamma)
{
    GammaGroup g;
    g.base = trivial_group();
    g.gamma = gamma;
    g.act.assign(gamma.order(), std::vector<elem>{0});
    return g;
}

} // namespace randgrp_detail

// Free object on n admissible generators: the subgroup of the product over all
// Gamma-maps to variety generators that the Y-coordinates generate.
inline FreeAdmissible free_admissible(std::size_t n, const VarietySpec& spec, GroupLimits lim = {6561, std::size_t(1) << 30})
{
    using namespace randgrp_detail;
    spec.validate();
    FreeAdmissible F;
    F.n = n;
    const FiniteGroup& Gm = spec.gamma;
    const std::uint32_t ng = Gm.order();
    struct Target {
        std::size_t t;
        std::vector<elem> tuple;
    };
    std::vector<Target> targets;
    for (std::size_t ti = 0; ti < spec.generators.size() && n > 0; ++ti) {
        const auto& T = spec.generators[ti];
        auto fixed = invariants(T, all_elements(Gm)).members;
        // left coset representatives of T^Gamma
        std::vector<elem> reps;
        std::vector<char> seen(T.base.order(), 0);
        for (elem t = 0; t < T.base.order(); ++t) {
            if (seen[t]) continue;
            reps.push_back(t);
            for (elem h : fixed) seen[T.base.mul(h, t)] = 1;
        }
        if (reps.size() == 1) continue;
        std::vector<std::size_t> idx(n, 0);
        while (true) {
            Target tg{ti, std::vector<elem>(n)};
            for (std::size_t i = 0; i < n; ++i) tg.tuple[i] = reps[idx[i]];
            targets.push_back(std::move(tg));
            if (targets.size() > 65535 * 64) throw CapacityError("too many targets for the free object");
            std::size_t k = 0;
            while (k < n && ++idx[k] == reps.size()) idx[k++] = 0;
            if (k == n) break;
        }
    }
    if (targets.empty()) {
        F.group = trivial_gamma_group(Gm);
        F.marked.assign(n, std::vector<elem>(ng, 0));
        return F;
    }
    const std::size_t nt = targets.size();
    std::vector<std::vector<Comp>> ycomp(n, std::vector<Comp>(ng, Comp(nt)));
    for (std::size_t k = 0; k < nt; ++k) {
        const auto& T = spec.generators[targets[k].t];
        for (std::size_t i = 0; i < n; ++i) {
            elem t = targets[k].tuple[i];
            for (elem g = 0; g < ng; ++g) ycomp[i][g][k] = static_cast<std::uint16_t>(T.base.mul(T.base.inv(t), T.act[g][t]));
        }
    }
    std::vector<Comp> gens;
    for (std::size_t i = 0; i < n; ++i)
        for (elem g = 1; g < ng; ++g)
            if (std::find(gens.begin(), gens.end(), ycomp[i][g]) == gens.end()) gens.push_back(ycomp[i][g]);
    auto mul = [&](const Comp& a, const Comp& b) {
        Comp r(nt);
        for (std::size_t k = 0; k < nt; ++k) r[k] = static_cast<std::uint16_t>(spec.generators[targets[k].t].base.mul(a[k], b[k]));
        return r;
    };
    auto [G, elems] = close_group<Comp, CompHash>(Comp(nt, 0), gens, mul, lim, [](const Comp& a, const Comp& b) { return a < b; });
    std::unordered_map<Comp, elem, CompHash> index;
    for (std::size_t i = 0; i < elems.size(); ++i) index.emplace(elems[i], static_cast<elem>(i));
    std::vector<std::vector<elem>> act(ng, std::vector<elem>(G.order()));
    for (elem g = 0; g < ng; ++g)
        for (std::size_t e = 0; e < elems.size(); ++e) {
            Comp c(nt);
            for (std::size_t k = 0; k < nt; ++k) c[k] = static_cast<std::uint16_t>(spec.generators[targets[k].t].act[g][elems[e][k]]);
            act[g][e] = index.at(c);
        }
    F.group.base = G;
    F.group.gamma = Gm;
    F.group.act = std::move(act);
    F.marked.assign(n, std::vector<elem>(ng));
    for (std::size_t i = 0; i < n; ++i)
        for (elem g = 0; g < ng; ++g) F.marked[i][g] = index.at(ycomp[i][g]);
    for (const auto& row : F.marked)
        for (elem y : row)
            if (y != 0 && std::find(F.generators.begin(), F.generators.end(), y) == F.generators.end()) F.generators.push_back(y);
    for (elem a : F.generators)
        for (elem b : F.generators) F.abelian = F.abelian && G.mul(a, b) == G.mul(b, a);
    return F;
}

// Gamma-normal closure of the Y-coordinates of xs; Gamma-stability is automatic.
inline std::vector<elem> relation_subgroup(const FreeAdmissible& F, const std::vector<elem>& xs)
{
    const auto& G = F.group.base;
    SubgroupBuilder b(G);
    for (elem x : xs)
        for (elem y : Y(F.group, x)) {
            if (b.full()) break;
            b.add(y);
        }
    if (b.full() || F.abelian) return b.sorted();
    return stable_closure(G, b.generators(), F.generators, {});
}

inline GammaGroup quotient_gamma(const GammaGroup& F, const std::vector<elem>& N)
{
    Quotient q = quotient(F.base, N);
    GammaGroup X;
    X.base = q.group;
    X.gamma = F.gamma;
    X.act.assign(F.gamma.order(), std::vector<elem>(q.group.order()));
    for (elem g = 0; g < F.gamma.order(); ++g)
        for (elem c = 0; c < q.group.order(); ++c) X.act[g][c] = q.proj[F.act[g][q.lift[c]]];
    return X;
}

// Isomorphism classes of Gamma-groups: fingerprint buckets, then explicit search.
class IsoClassifier {
public:
    std::size_t classify(const GammaGroup& X)
    {
        std::string fp = gamma_fingerprint(X);
        auto& bucket = buckets_[fp];
        for (std::size_t id : bucket)
            if (find_gamma_isomorphism(reps_[id], X)) return id;
        std::size_t id = reps_.size();
        reps_.push_back(X);
        labels_.push_back(fp + "#" + std::to_string(bucket.size()));
        bucket.push_back(id);
        return id;
    }
    std::optional<std::size_t> find(const GammaGroup& X) const
    {
        auto it = buckets_.find(gamma_fingerprint(X));
        if (it == buckets_.end()) return std::nullopt;
        for (std::size_t id : it->second)
            if (find_gamma_isomorphism(reps_[id], X)) return id;
        return std::nullopt;
    }
    std::size_t size() const { return reps_.size(); }
    const GammaGroup& rep(std::size_t id) const { return reps_[id]; }
    const std::string& label(std::size_t id) const { return labels_[id]; }

private:
    std::map<std::string, std::vector<std::size_t>> buckets_;
    std::vector<GammaGroup> reps_;
    std::vector<std::string> labels_;
};

struct SampleOutcome {
    GammaGroup quotient;
    std::vector<elem> witnesses; // x_1..x_{n+1}
    std::vector<elem> relations; // the normal subgroup
};

inline std::vector<elem> draw_witnesses(const FreeAdmissible& F, const std::vector<elem>& inv, SplitMix64& rng)
{
    std::vector<elem> xs(F.n + 1);
    for (std::size_t i = 0; i < F.n; ++i) xs[i] = static_cast<elem>(rng.below(F.group.base.order()));
    xs[F.n] = inv[rng.below(inv.size())];
    return xs;
}

inline SampleOutcome sample_X(const FreeAdmissible& F, elem gamma_inf_gen, SplitMix64& rng)
{
    auto inv = F.invariant_subgroup(gamma_inf_gen);
    SampleOutcome o;
    o.witnesses = draw_witnesses(F, inv, rng);
    o.relations = relation_subgroup(F, o.witnesses);
    o.quotient = quotient_gamma(F.group, o.relations);
    return o;
}

inline rational invariant_ratio(const GammaGroup& H, const std::vector<elem>& D)
{
    return rational(bigint(invariants(H, D).order()), bigint(H.base.order()));
}

// |Sur_Gamma(F_n, H)| (|H^Gamma|/|H|)^n |H^Gamma|/|H^Gamma_inf|
inline rational moment_n(const GammaGroup& H, std::size_t n, elem gamma_inf_gen)
{
    bigint sur = count_sur_free_admissible(n, H);
    bigint hg = invariants(H, all_elements(H.gamma)).order();
    bigint hi = invariants(H, cyclic_subgroup(H.gamma, gamma_inf_gen)).order();
    rational r(sur * boost::multiprecision::pow(hg, static_cast<unsigned>(n)), boost::multiprecision::pow(bigint(H.base.order()), static_cast<unsigned>(n)));
    return r * rational(hg, hi);
}

inline rational moment_mu(const GammaGroup& H, elem gamma_inf_gen)
{
    bigint hg = invariants(H, all_elements(H.gamma)).order();
    bigint hi = invariants(H, cyclic_subgroup(H.gamma, gamma_inf_gen)).order();
    return rational(hg, hi);
}

// Irreducible constituent A of the semisimple head of R, with its multiplicity.
struct ModuleData {
    std::uint32_t ell = 0;
    std::size_t dim = 0, h = 0, mult = 0, dim_fix_gamma = 0, dim_fix_inf = 0;
    auto key() const { return std::tie(ell, dim, h, mult, dim_fix_gamma, dim_fix_inf); }
    bool operator<(const ModuleData& o) const { return key() < o.key(); }
    bool operator==(const ModuleData& o) const { return key() == o.key(); }
};

// Head of R (a Gamma-stable normal subgroup of F) as an (F x| Gamma)-module.
inline std::vector<ModuleData> head_constituents(const FreeAdmissible& F, const std::vector<elem>& R, elem gamma_inf_gen,
                                                 std::size_t vector_cap = 200000)
{
    std::vector<ModuleData> out;
    const auto& G = F.group.base;
    if (R.size() <= 1) return out;
    SubgroupBuilder rb(G);
    for (elem r : R)
        if (!rb.contains(r)) rb.add(r);
    const auto rgens = rb.generators();
    auto inf = cyclic_subgroup(F.group.gamma, gamma_inf_gen);
    for (auto ell : prime_factors(R.size())) {
        const auto p = static_cast<std::uint32_t>(ell);
        std::vector<elem> seeds;
        for (elem a : rgens)
            for (elem b : rgens) seeds.push_back(G.commutator(a, b));
        for (elem r : R) seeds.push_back(G.pow(r, p));
        auto Phi = stable_closure(G, seeds, rgens, {});
        if (Phi.size() == R.size()) continue;
        SubgroupBuilder qb(G);
        for (elem x : Phi) qb.add(x);
        std::vector<elem> basis;
        for (elem r : R)
            if (!qb.contains(r)) {
                qb.add(r);
                basis.push_back(r);
            }
        const std::size_t d = basis.size();
        std::uint64_t qsize = 1;
        for (std::size_t i = 0; i < d; ++i) qsize *= p;
        if (qsize * Phi.size() != R.size()) throw InternalError("head_constituents: quotient is not elementary abelian");
        if (qsize > vector_cap) throw CapacityError("module of dimension " + std::to_string(d) + " over F_" + std::to_string(p) + " exceeds the vector cap");
        // coordinates of every element of R
        std::vector<fl::Vec> coord(G.order());
        for (std::uint64_t a = 0; a < qsize; ++a) {
            fl::Vec v(d);
            std::uint64_t t = a;
            elem w = 0;
            for (std::size_t j = 0; j < d; ++j) {
                v[j] = static_cast<std::uint32_t>(t % p);
                t /= p;
                w = G.mul(w, G.pow(basis[j], v[j]));
            }
            for (elem f : Phi) coord[G.mul(w, f)] = v;
        }
        auto matrix_of = [&](const std::function<elem(elem)>& img) {
            fl::Mat M(d, fl::Vec(d));
            for (std::size_t j = 0; j < d; ++j) {
                const auto& c = coord[img(basis[j])];
                for (std::size_t i = 0; i < d; ++i) M[i][j] = c[i];
            }
            return M;
        };
        // dual action: transposes
        std::vector<fl::Mat> gens, gam, gam_inf;
        for (elem y : F.generators) gens.push_back(fl::transpose(matrix_of([&](elem b) { return G.conj(y, b); })));
        for (elem g = 1; g < F.group.gamma.order(); ++g) {
            auto M = fl::transpose(matrix_of([&](elem b) { return F.group.act[g][b]; }));
            gens.push_back(M);
            gam.push_back(M);
            if (std::binary_search(inf.begin(), inf.end(), g)) gam_inf.push_back(M);
        }
        const std::size_t n_f = F.generators.size(), n_g = gam.size();
        // irreducible submodules of the dual are spins that contain no smaller spin
        std::vector<fl::Subspace> spins;
        std::set<fl::Mat> seen;
        for (std::uint64_t a = 1; a < qsize; ++a) {
            fl::Vec v(d);
            std::uint64_t t = a;
            for (std::size_t j = 0; j < d; ++j) {
                v[j] = static_cast<std::uint32_t>(t % p);
                t /= p;
            }
            auto lead = std::find_if(v.begin(), v.end(), [](std::uint32_t x) { return x != 0; });
            if (*lead != 1) continue;
            auto S = fl::spin({v}, gens, p);
            if (seen.insert(S.basis).second) spins.push_back(std::move(S));
        }
        std::sort(spins.begin(), spins.end(), [](const auto& a, const auto& b) { return a.dim() < b.dim(); });
        std::vector<std::vector<fl::Mat>> classes; // restricted matrices of one irreducible per class
        std::vector<std::size_t> class_dim;
        for (std::size_t i = 0; i < spins.size(); ++i) {
            bool minimal = true;
            for (std::size_t j = 0; j < i && minimal; ++j)
                if (spins[j].dim() < spins[i].dim() && spins[i].contains(spins[j], p)) minimal = false;
            if (!minimal) continue;
            auto X = fl::restrict_to(gens, spins[i], p);
            bool known = false;
            for (const auto& c : classes)
                if (c[0].size() == X[0].size() && fl::hom_dim(X, c, p) > 0) known = true;
            if (known) continue;
            classes.push_back(X);
            class_dim.push_back(spins[i].dim());
        }
        for (const auto& X : classes) {
            ModuleData m;
            m.ell = p;
            m.dim = X[0].size();
            m.h = fl::hom_dim(X, X, p);
            std::size_t hv = fl::hom_dim(X, gens, p);
            if (hv % m.h != 0) throw InternalError("head_constituents: Hom dimension not divisible by End dimension");
            m.mult = hv / m.h;
            std::vector<fl::Mat> xg(X.begin() + static_cast<std::ptrdiff_t>(n_f), X.begin() + static_cast<std::ptrdiff_t>(n_f + n_g));
            std::vector<fl::Mat> xi;
            for (std::size_t k = 0; k < n_g; ++k)
                if (std::binary_search(inf.begin(), inf.end(), static_cast<elem>(k + 1))) xi.push_back(xg[k]);
            m.dim_fix_gamma = fl::fixed_dim(xg, m.dim, p);
            m.dim_fix_inf = fl::fixed_dim(xi, m.dim, p);
            out.push_back(m);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// prod_{i<m} (1 - l^{h i} |A^Gamma|^{n+1} / (|A|^n |A^Gamma_inf|)); 0 once a factor is <= 0.
inline rational prob_module_formula(const ModuleData& A, std::size_t n)
{
    rational r = 1;
    const bigint l = A.ell;
    for (std::size_t i = 0; i < A.mult; ++i) {
        bigint num = boost::multiprecision::pow(l, static_cast<unsigned>(A.h * i + A.dim_fix_gamma * (n + 1)));
        bigint den = boost::multiprecision::pow(l, static_cast<unsigned>(A.dim * n + A.dim_fix_inf));
        rational f = 1 - rational(num, den);
        if (f <= 0) return 0;
        r *= f;
    }
    return r;
}

// A Gamma-surjection F -> H from the first admissibly generating tuple (reverse order if `last`).
inline std::optional<std::vector<elem>> find_surjection(const FreeAdmissible& F, const GammaGroup& H, bool last)
{
    const std::uint32_t m = H.base.order();
    const std::size_t n = F.n;
    std::vector<elem> t(n, last ? m - 1 : 0);
    std::optional<std::vector<elem>> tuple;
    if (n == 0) {
        if (m == 1) tuple = t;
    } else {
        while (true) {
            if (admissible_closure(H, t).order() == m) {
                tuple = t;
                break;
            }
            std::size_t k = 0;
            if (last) {
                while (k < n && t[k] == 0) t[k++] = m - 1;
                if (k == n) break;
                --t[k];
            } else {
                while (k < n && ++t[k] == m) t[k++] = 0;
                if (k == n) break;
            }
        }
    }
    if (!tuple) return std::nullopt;
    const auto& G = F.group.base;
    const elem NONE = ~elem(0);
    std::vector<elem> rho(G.order(), NONE);
    rho[0] = 0;
    std::vector<std::pair<elem, elem>> gens; // (generator of F, image)
    for (std::size_t i = 0; i < n; ++i) {
        auto y = Y(H, (*tuple)[i]);
        for (elem g = 0; g < F.group.gamma.order(); ++g) gens.emplace_back(F.marked[i][g], y[g]);
    }
    std::vector<elem> queue{0};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        elem e = queue[qi];
        for (auto [y, hy] : gens) {
            elem x = G.mul(e, y), v = H.base.mul(rho[e], hy);
            if (rho[x] == NONE) {
                rho[x] = v;
                queue.push_back(x);
            } else if (rho[x] != v) {
                throw DomainError("H is not a quotient of the free object of this variety");
            }
        }
    }
    for (elem g = 0; g < F.group.gamma.order(); ++g)
        for (elem x = 0; x < G.order(); ++x)
            if (rho[F.group.act[g][x]] != H.act[g][rho[x]]) throw InternalError("find_surjection: map is not Gamma-equivariant");
    return rho;
}

struct MuResult {
    rational value;
    rational base;
    bigint sur;
    std::uint64_t aut = 0;
    std::vector<ModuleData> modules;
};

// Closed-form probability that X is isomorphic to H at level n.
inline MuResult mu_n_detail(const FreeAdmissible& F, const GammaGroup& H, elem gamma_inf_gen)
{
    MuResult res;
    auto rho = find_surjection(F, H, false);
    if (!rho) {
        res.value = 0;
        return res;
    }
    auto kernel = [&](const std::vector<elem>& r) {
        std::vector<elem> R;
        for (elem x = 0; x < r.size(); ++x)
            if (r[x] == 0) R.push_back(x);
        return R;
    };
    res.modules = head_constituents(F, kernel(*rho), gamma_inf_gen);
    auto rho2 = find_surjection(F, H, true);
    if (head_constituents(F, kernel(*rho2), gamma_inf_gen) != res.modules)
        throw InternalError("head multiplicities depend on the chosen surjection");
    const std::size_t n = F.n;
    res.sur = count_sur_free_admissible(n, H);
    res.aut = count_aut_gamma(H);
    bigint hg = invariants(H, all_elements(H.gamma)).order();
    bigint hi = invariants(H, cyclic_subgroup(H.gamma, gamma_inf_gen)).order();
    bigint hh = H.base.order();
    res.base = rational(res.sur * boost::multiprecision::pow(hg, static_cast<unsigned>(n + 1)),
                        bigint(res.aut) * boost::multiprecision::pow(hh, static_cast<unsigned>(n)) * hi);
    res.value = res.base;
    for (const auto& A : res.modules) res.value *= prob_module_formula(A, n);
    return res;
}

inline rational mu_n(const FreeAdmissible& F, const GammaGroup& H, elem gamma_inf_gen) { return mu_n_detail(F, H, gamma_inf_gen).value; }

// Multiplicity of the irreducible A (matched by its numeric data) in the head of ker(F_n -> H).
inline std::vector<ModuleData> m_ad(const FreeAdmissible& F, const GammaGroup& H, elem gamma_inf_gen)
{
    return mu_n_detail(F, H, gamma_inf_gen).modules;
}

struct MuLimit {
    bool converged = false;
    rational value;
    std::vector<std::pair<std::size_t, rational>> sequence;
    std::string status;
};

inline MuLimit mu_limit(const GammaGroup& H, const VarietySpec& spec, elem gamma_inf_gen, double tolerance, std::size_t n_max,
                        GroupLimits lim = {6561, std::size_t(1) << 30})
{
    MuLimit out;
    for (std::size_t n = 0; n <= n_max; ++n) {
        FreeAdmissible F;
        try {
            F = free_admissible(n, spec, lim);
        } catch (const CapacityError& e) {
            out.status = std::string("inconclusive: ") + e.what();
            return out;
        }
        rational v = mu_n(F, H, gamma_inf_gen);
        if (!out.sequence.empty() && v != 0 && out.sequence.back().second != 0 &&
            std::fabs(static_cast<double>(v - out.sequence.back().second)) < tolerance) {
            out.sequence.emplace_back(n, v);
            out.converged = true;
            out.value = v;
            out.status = "converged";
            return out;
        }
        out.sequence.emplace_back(n, v);
    }
    out.status = "inconclusive: n budget exhausted";
    return out;
}

struct Estimate {
    double mean = 0, se = 0;
};

struct MonteCarloResult {
    std::uint64_t trials = 0, seed = 0;
    IsoClassifier classes;
    std::vector<std::uint64_t> counts; // by class id

    Estimate probability(const GammaGroup& H) const
    {
        auto id = classes.find(H);
        double p = id && *id < counts.size() ? double(counts[*id]) / double(trials) : 0.0;
        return {p, std::sqrt(p * (1 - p) / double(trials))};
    }
    Estimate sur_moment(const GammaGroup& H) const
    {
        std::vector<double> s(counts.size());
        double mean = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            s[i] = double(count_gamma_surjections(classes.rep(i), H));
            mean += s[i] * double(counts[i]);
        }
        mean /= double(trials);
        double var = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) var += double(counts[i]) * (s[i] - mean) * (s[i] - mean);
        var /= trials > 1 ? double(trials - 1) : 1.0;
        return {mean, std::sqrt(var / double(trials))};
    }
};

inline MonteCarloResult monte_carlo(const FreeAdmissible& F, elem gamma_inf_gen, std::uint64_t trials, std::uint64_t seed)
{
    if (trials == 0) throw DomainError("monte_carlo: trials must be positive");
    MonteCarloResult res;
    res.trials = trials;
    res.seed = seed;
    auto inv = F.invariant_subgroup(gamma_inf_gen);
    std::map<std::vector<elem>, std::size_t> by_relations;
    for (std::uint64_t t = 0; t < trials; ++t) {
        SplitMix64 rng(seed, t);
        auto xs = draw_witnesses(F, inv, rng);
        auto N = relation_subgroup(F, xs);
        std::size_t id;
        if (N.size() == F.group.base.order()) {
            id = res.classes.classify(randgrp_detail::trivial_gamma_group(F.group.gamma));
        } else {
            auto it = by_relations.find(N);
            if (it != by_relations.end()) {
                id = it->second;
            } else {
                id = res.classes.classify(quotient_gamma(F.group, N));
                if (by_relations.size() < 100000) by_relations.emplace(N, id);
            }
        }
        if (res.counts.size() <= id) res.counts.resize(id + 1, 0);
        ++res.counts[id];
    }
    return res;
}

// Exact outcome distribution by running over every witness tuple.
struct ExactDistribution {
    IsoClassifier classes;
    std::vector<bigint> counts;
    bigint total = 0;

    rational probability(const GammaGroup& H) const
    {
        auto id = classes.find(H);
        if (!id) return 0;
        return rational(counts[*id], total);
    }
    rational expected_sur(const GammaGroup& H) const
    {
        rational e = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) e += rational(counts[i] * count_gamma_surjections(classes.rep(i), H), total);
        return e;
    }
};

inline ExactDistribution enumerate_outcomes(const FreeAdmissible& F, elem gamma_inf_gen, std::uint64_t max_outcomes = 5000000)
{
    auto inv = F.invariant_subgroup(gamma_inf_gen);
    const std::uint32_t m = F.group.base.order();
    double work = std::pow(double(m), double(F.n)) * double(inv.size());
    if (work > double(max_outcomes)) throw CapacityError("outcome enumeration of " + std::to_string(static_cast<std::uint64_t>(work)) + " witness tuples exceeds the cap");
    std::map<std::vector<elem>, bigint> byN;
    std::vector<elem> xs(F.n + 1, 0);
    std::vector<std::size_t> idx(F.n + 1, 0);
    while (true) {
        for (std::size_t i = 0; i < F.n; ++i) xs[i] = static_cast<elem>(idx[i]);
        xs[F.n] = inv[idx[F.n]];
        byN[relation_subgroup(F, xs)] += 1;
        std::size_t k = 0;
        while (k <= F.n && ++idx[k] == (k < F.n ? m : inv.size())) idx[k++] = 0;
        if (k > F.n) break;
    }
    ExactDistribution d;
    for (const auto& [N, c] : byN) {
        auto id = d.classes.classify(quotient_gamma(F.group, N));
        if (d.counts.size() <= id) d.counts.resize(id + 1, 0);
        d.counts[id] += c;
        d.total += c;
    }
    return d;
}

// Every Gamma-quotient of F up to isomorphism.
inline IsoClassifier quotient_census(const FreeAdmissible& F)
{
    IsoClassifier c;
    const auto& G = F.group.base;
    auto gens = generating_set(G);
    for (const auto& N : gamma_subgroups(F.group)) {
        std::vector<char> in(G.order(), 0);
        for (elem x : N) in[x] = 1;
        bool normal = true;
        for (elem g : gens)
            for (elem x : N) normal = normal && in[G.conj(g, x)];
        if (normal) c.classify(quotient_gamma(F.group, N));
    }
    return c;
}

// Invariant factors of a finite abelian group from its p-power torsion counts.
inline AbelianStructure abelian_invariants(const FiniteGroup& G)
{
    if (!G.is_abelian()) throw DomainError("abelian_invariants: group is not abelian");
    std::vector<std::uint64_t> cyc;
    for (auto p : prime_factors(G.order())) {
        // r_k = log_p #{x : x^{p^k} = 1}
        std::vector<int> r{0};
        std::uint64_t pk = 1;
        while (true) {
            pk *= p;
            std::uint64_t cnt = 0;
            for (elem x = 0; x < G.order(); ++x) cnt += G.pow(x, static_cast<std::int64_t>(pk)) == 0;
            r.push_back(valuation(cnt, p));
            if (r.back() == r[r.size() - 2]) break;
        }
        // n_k = r_k - r_{k-1} counts factors of order >= p^k
        for (std::size_t k = 1; k + 1 < r.size(); ++k) {
            int exact = (r[k] - r[k - 1]) - (r[k + 1] - r[k]);
            std::uint64_t q = 1;
            for (std::size_t t = 0; t < k; ++t) q *= p;
            for (int t = 0; t < exact; ++t) cyc.push_back(q);
        }
    }
    return abelian_from_cyclic(cyc);
}

// Distribution of coker(M) for M uniform in Mat_n(Z/N), keyed by invariant factors.
inline std::map<std::string, rational> cokernel_distribution(std::uint32_t N, std::size_t n)
{
    std::map<std::string, bigint> cnt;
    const std::size_t cells = n * n;
    std::vector<std::uint32_t> a(cells, 0);
    bigint total = 0;
    while (true) {
        IntMatrix M(n + n, std::vector<bigint>(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) M[i][j] = a[i * n + j];
        for (std::size_t i = 0; i < n; ++i) M[n + i][i] = N;
        auto S = smith_normal_form(M, n);
        std::vector<std::uint64_t> cyc;
        for (std::size_t i = 0; i < n; ++i) cyc.push_back(static_cast<std::uint64_t>(S.diag[i]));
        cnt[abelian_from_cyclic(cyc).str()] += 1;
        total += 1;
        std::size_t k = 0;
        while (k < cells && ++a[k] == N) a[k++] = 0;
        if (k == cells) break;
    }
    std::map<std::string, rational> out;
    for (auto& [k, c] : cnt) out[k] = rational(c, total);
    return out;
}

} // namespace imcl
