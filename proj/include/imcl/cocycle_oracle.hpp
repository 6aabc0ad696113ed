#pragma once

// Second route to H2(G) and H2(G, c): counts normalized 2-cocycles with
// coefficients in Z/p^k by linear algebra over Z/p^k, no integer SNF.
// |Z^2_norm(G, Z/p^k)| = p^{k(|G|-1)} * |Hom(H2, Z/p^k)|, and imposing
// f(x,y) = f(y,x) on commuting pairs with x in c cuts H2 down to H2(G, c).

#include "imcl/group.hpp"
#include "imcl/snf.hpp"

namespace imcl {

namespace oracle_detail {

class ModPkSpan {
public:
    ModPkSpan(std::uint32_t p, std::uint32_t k, std::size_t cols) : p_(p), n_(cols), pivot_col_(cols, -1)
    {
        R_ = 1;
        for (std::uint32_t i = 0; i < k; ++i) R_ *= p;
        k_ = k;
    }

    void insert(std::vector<std::uint32_t> r)
    {
        for (std::size_t i = 0; i < P_.size(); ++i) {
            std::uint32_t t = r[pc_[i]];
            if (t) axpy(r, P_[i], R_ - t);
        }
        std::size_t c = n_;
        for (std::size_t j = 0; j < n_; ++j)
            if (r[j] % p_ != 0) {
                c = j;
                break;
            }
        if (c == n_) {
            if (std::any_of(r.begin(), r.end(), [](std::uint32_t x) { return x != 0; })) {
                D_.push_back(std::move(r));
                if (D_.size() > 2 * n_ + 16) compress();
            }
            return;
        }
        std::uint32_t s = static_cast<std::uint32_t>(inv_mod(r[c], R_));
        for (auto& x : r) x = static_cast<std::uint32_t>((std::uint64_t(x) * s) % R_);
        for (auto& row : P_)
            if (row[c]) axpy(row, r, R_ - row[c]);
        for (auto& row : D_)
            if (row[c]) axpy(row, r, R_ - row[c]);
        pivot_col_[c] = static_cast<std::int64_t>(P_.size());
        pc_.push_back(c);
        P_.push_back(std::move(r));
    }

    // log_p of the size of the row module.
    std::uint64_t log_size()
    {
        compress();
        auto M = D_;
        std::uint64_t lg = std::uint64_t(k_) * P_.size();
        // diagonalize with min-valuation pivots; column operations keep the size
        std::vector<char> row_used(M.size(), 0), col_used(n_, 0);
        while (true) {
            int best = static_cast<int>(k_);
            std::size_t bi = 0, bj = 0;
            for (std::size_t i = 0; i < M.size(); ++i) {
                if (row_used[i]) continue;
                for (std::size_t j = 0; j < n_; ++j)
                    if (!col_used[j] && M[i][j]) {
                        int v = valuation(M[i][j], p_);
                        if (v < best) {
                            best = v;
                            bi = i;
                            bj = j;
                        }
                    }
            }
            if (best == static_cast<int>(k_)) break;
            row_used[bi] = 1;
            col_used[bj] = 1;
            lg += k_ - best;
            std::uint32_t pv = M[bi][bj];
            std::uint32_t pu = 1;
            for (int t = 0; t < best; ++t) pu *= p_;
            std::uint32_t unit_inv = static_cast<std::uint32_t>(inv_mod(pv / pu, R_));
            for (std::size_t i = 0; i < M.size(); ++i) {
                if (i == bi || !M[i][bj]) continue;
                std::uint32_t f = static_cast<std::uint32_t>((std::uint64_t(M[i][bj] / pu) * unit_inv) % R_);
                axpy(M[i], M[bi], R_ - f);
            }
            // column elimination only changes the module by an isomorphism
            for (std::size_t j = 0; j < n_; ++j) {
                if (j == bj || !M[bi][j]) continue;
                std::uint32_t f = static_cast<std::uint32_t>((std::uint64_t(M[bi][j] / pu) * unit_inv) % R_);
                for (auto& row : M) row[j] = static_cast<std::uint32_t>((row[j] + std::uint64_t(R_ - f) * row[bj]) % R_);
            }
        }
        return lg;
    }

private:
    void axpy(std::vector<std::uint32_t>& r, const std::vector<std::uint32_t>& s, std::uint32_t f) const
    {
        for (std::size_t j = 0; j < n_; ++j)
            if (s[j]) r[j] = static_cast<std::uint32_t>((r[j] + std::uint64_t(f) * s[j]) % R_);
    }

    // span-preserving echelon reduction of the deferred rows
    void compress()
    {
        std::vector<std::vector<std::uint32_t>> out;
        auto M = std::move(D_);
        D_.clear();
        while (!M.empty()) {
            int best = static_cast<int>(k_);
            std::size_t bi = 0, bj = 0;
            for (std::size_t i = 0; i < M.size(); ++i)
                for (std::size_t j = 0; j < n_; ++j)
                    if (M[i][j]) {
                        int v = valuation(M[i][j], p_);
                        if (v < best) {
                            best = v;
                            bi = i;
                            bj = j;
                        }
                    }
            if (best == static_cast<int>(k_)) break;
            std::uint32_t pu = 1;
            for (int t = 0; t < best; ++t) pu *= p_;
            std::uint32_t unit_inv = static_cast<std::uint32_t>(inv_mod(M[bi][bj] / pu, R_));
            for (std::size_t i = 0; i < M.size(); ++i) {
                if (i == bi || !M[i][bj]) continue;
                std::uint32_t f = static_cast<std::uint32_t>((std::uint64_t(M[i][bj] / pu) * unit_inv) % R_);
                axpy(M[i], M[bi], R_ - f);
            }
            out.push_back(std::move(M[bi]));
            M.erase(M.begin() + static_cast<std::ptrdiff_t>(bi));
            M.erase(std::remove_if(M.begin(), M.end(),
                                   [](const auto& r) { return std::all_of(r.begin(), r.end(), [](std::uint32_t x) { return x == 0; }); }),
                    M.end());
        }
        D_ = std::move(out);
    }

    std::uint32_t p_, k_, R_;
    std::size_t n_;
    std::vector<std::int64_t> pivot_col_;
    std::vector<std::size_t> pc_;
    std::vector<std::vector<std::uint32_t>> P_, D_;
};

} // namespace oracle_detail

// log_p |Hom(H2(G, c), Z/p^k)|; c empty means the plain multiplier.
inline std::uint64_t cocycle_hom_log(const FiniteGroup& G, std::uint32_t p, std::uint32_t k, const std::vector<elem>& c)
{
    const std::uint32_t n = G.order();
    std::uint32_t R = 1;
    for (std::uint32_t i = 0; i < k; ++i) R *= p;
    auto X = generating_set(G);
    const std::size_t nx = X.size();
    // BFS tree: h = parent[h] * X[pgen[h]]
    std::vector<elem> parent(n, 0), pgen(n, 0), order{0};
    std::vector<char> seen(n, 0);
    seen[0] = 1;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = 0; j < nx; ++j) {
            elem h = G.mul(order[i], X[j]);
            if (!seen[h]) {
                seen[h] = 1;
                parent[h] = order[i];
                pgen[h] = static_cast<elem>(j);
                order.push_back(h);
            }
        }
    // unknowns u(g, j) = f(g, X[j]) for g != 1
    const std::size_t U = std::size_t(n - 1) * nx;
    auto uidx = [&](elem g, std::size_t j) { return std::size_t(g - 1) * nx + j; };
    // f(a, h) as a vector over the unknowns: f(a, p x) = u(ap, x) + f(a, p) - u(p, x)
    std::vector<std::vector<std::uint32_t>> f(std::size_t(n) * n, std::vector<std::uint32_t>(U, 0));
    for (elem a = 0; a < n; ++a)
        for (elem h : order) {
            if (h == 0) continue;
            elem pp = parent[h];
            std::size_t j = pgen[h];
            auto& v = f[std::size_t(a) * n + h];
            v = f[std::size_t(a) * n + pp];
            elem ap = G.mul(a, pp);
            if (ap != 0) v[uidx(ap, j)] = (v[uidx(ap, j)] + 1) % R;
            if (pp != 0) v[uidx(pp, j)] = (v[uidx(pp, j)] + R - 1) % R;
        }
    oracle_detail::ModPkSpan span(p, k, U);
    auto F = [&](elem a, elem b) -> const std::vector<std::uint32_t>& { return f[std::size_t(a) * n + b]; };
    std::vector<std::uint32_t> row(U);
    auto emit = [&]() {
        if (std::any_of(row.begin(), row.end(), [](std::uint32_t x) { return x != 0; })) span.insert(row);
    };
    for (elem h = 1; h < n; ++h) {
        row = F(0, h);
        emit();
    }
    for (elem a = 1; a < n; ++a)
        for (elem b = 1; b < n; ++b)
            for (elem cc = 1; cc < n; ++cc) {
                const auto& f1 = F(b, cc);
                const auto& f2 = F(G.mul(a, b), cc);
                const auto& f3 = F(a, G.mul(b, cc));
                const auto& f4 = F(a, b);
                for (std::size_t t = 0; t < U; ++t) row[t] = (f1[t] + 2 * R - f2[t] + f3[t] + R - f4[t]) % R;
                emit();
            }
    for (elem x : c)
        for (elem y = 1; y < n; ++y)
            if (G.mul(x, y) == G.mul(y, x)) {
                const auto& f1 = F(x, y);
                const auto& f2 = F(y, x);
                for (std::size_t t = 0; t < U; ++t) row[t] = (f1[t] + R - f2[t]) % R;
                emit();
            }
    std::uint64_t log_rows = span.log_size();
    std::uint64_t log_Z = std::uint64_t(k) * U - log_rows;
    std::uint64_t log_B = std::uint64_t(k) * (n - 1);
    if (log_Z < log_B) throw InternalError("cocycle oracle: fewer cocycles than normalized cochains of degree one");
    return log_Z - log_B;
}

// H2(G) (c empty) or H2(G, c) from the cocycle counts at every p^k with k <= v_p(|G|).
inline AbelianStructure h2_oracle(const FiniteGroup& G, const std::vector<elem>& c = {})
{
    std::vector<std::uint64_t> cyc;
    for (auto p : prime_factors(G.order())) {
        int K = valuation(G.order(), p);
        std::vector<std::uint64_t> r(K + 2, 0);
        for (int k = 1; k <= K; ++k) r[k] = cocycle_hom_log(G, static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(k), c);
        // n_k = #factors of order >= p^k
        std::vector<std::int64_t> nk(K + 2, 0);
        for (int k = 1; k <= K; ++k) nk[k] = static_cast<std::int64_t>(r[k] - r[k - 1]);
        for (int k = 1; k <= K; ++k) {
            std::int64_t exact = nk[k] - nk[k + 1];
            if (exact < 0) throw InternalError("cocycle oracle: inconsistent counts");
            std::uint64_t pk = 1;
            for (int t = 0; t < k; ++t) pk *= p;
            for (std::int64_t t = 0; t < exact; ++t) cyc.push_back(pk);
        }
    }
    return abelian_from_cyclic(cyc);
}

} // namespace imcl
