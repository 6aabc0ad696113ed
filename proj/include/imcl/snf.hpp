#pragma once

#include "imcl/common.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace imcl {

using IntMatrix = std::vector<std::vector<bigint>>;

// P * A * Q = diag; only the column transform Q is recorded.
struct SmithForm {
    std::vector<bigint> diag; // length min(rows, cols), nonnegative, divisibility chain on the nonzero prefix
    IntMatrix Q;              // cols x cols, unimodular
    std::size_t rank = 0;
};

inline SmithForm smith_normal_form(IntMatrix A, std::size_t cols)
{
    const std::size_t m = A.size(), n = cols;
    for (auto& r : A) r.resize(n);
    IntMatrix Q(n, std::vector<bigint>(n));
    for (std::size_t i = 0; i < n; ++i) Q[i][i] = 1;

    auto swap_cols = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        for (auto& r : A) std::swap(r[a], r[b]);
        for (auto& r : Q) std::swap(r[a], r[b]);
    };
    // col_j -= f * col_t
    auto col_axpy = [&](std::size_t j, std::size_t t, const bigint& f) {
        for (auto& r : A)
            if (r[t] != 0) r[j] -= f * r[t];
        for (auto& r : Q)
            if (r[t] != 0) r[j] -= f * r[t];
    };
    auto row_axpy = [&](std::size_t i, std::size_t t, const bigint& f) {
        for (std::size_t j = 0; j < n; ++j)
            if (A[t][j] != 0) A[i][j] -= f * A[t][j];
    };

    SmithForm out;
    const std::size_t steps = std::min(m, n);
    for (std::size_t t = 0; t < steps; ++t) {
        // pivot: smallest nonzero magnitude in the trailing block
        auto find_min = [&](std::size_t& pi, std::size_t& pj) {
            bool found = false;
            bigint best;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j)
                    if (A[i][j] != 0) {
                        bigint a = abs(A[i][j]);
                        if (!found || a < best) {
                            best = a;
                            pi = i;
                            pj = j;
                            found = true;
                            if (best == 1) return true;
                        }
                    }
            return found;
        };
        std::size_t pi = 0, pj = 0;
        if (!find_min(pi, pj)) break;
        std::swap(A[t], A[pi]);
        swap_cols(t, pj);
        while (true) {
            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i)
                if (A[i][t] != 0) {
                    bigint f = A[i][t] / A[t][t];
                    if (f != 0) row_axpy(i, t, f);
                    if (A[i][t] != 0) clean = false;
                }
            for (std::size_t j = t + 1; j < n; ++j)
                if (A[t][j] != 0) {
                    bigint f = A[t][j] / A[t][t];
                    if (f != 0) col_axpy(j, t, f);
                    if (A[t][j] != 0) clean = false;
                }
            if (!clean) {
                // move the smallest leftover in row t / column t onto the pivot
                std::size_t bi = t, bj = t;
                bigint best = abs(A[t][t]);
                for (std::size_t i = t + 1; i < m; ++i)
                    if (A[i][t] != 0 && abs(A[i][t]) < best) {
                        best = abs(A[i][t]);
                        bi = i;
                        bj = t;
                    }
                for (std::size_t j = t + 1; j < n; ++j)
                    if (A[t][j] != 0 && abs(A[t][j]) < best) {
                        best = abs(A[t][j]);
                        bi = t;
                        bj = j;
                    }
                std::swap(A[t], A[bi]);
                swap_cols(t, bj);
                continue;
            }
            // divisibility of the trailing block
            bool fixed = false;
            for (std::size_t i = t + 1; i < m && !fixed; ++i)
                for (std::size_t j = t + 1; j < n && !fixed; ++j)
                    if (A[i][j] % A[t][t] != 0) {
                        row_axpy(t, i, bigint(-1));
                        fixed = true;
                    }
            if (!fixed) break;
        }
        if (A[t][t] < 0)
            for (std::size_t j = 0; j < n; ++j) A[t][j] = -A[t][j];
        out.diag.push_back(A[t][t]);
        ++out.rank;
    }
    out.diag.resize(steps, bigint(0));
    out.Q = std::move(Q);
    return out;
}

// Finite abelian group Z/d1 x ... x Z/dk with d1 | d2 | ... | dk, all > 1.
struct AbelianStructure {
    std::vector<std::uint64_t> d;

    std::uint64_t order() const
    {
        std::uint64_t o = 1;
        for (auto x : d) o *= x;
        return o;
    }
    std::uint64_t exponent() const { return d.empty() ? 1 : d.back(); }
    bool trivial() const { return d.empty(); }

    std::uint64_t encode(const std::vector<std::int64_t>& a) const
    {
        std::uint64_t idx = 0, p = 1;
        for (std::size_t i = 0; i < d.size(); ++i) {
            idx += static_cast<std::uint64_t>(mod_floor(a[i], static_cast<std::int64_t>(d[i]))) * p;
            p *= d[i];
        }
        return idx;
    }
    std::vector<std::int64_t> decode(std::uint64_t idx) const
    {
        std::vector<std::int64_t> a(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            a[i] = static_cast<std::int64_t>(idx % d[i]);
            idx /= d[i];
        }
        return a;
    }
    std::vector<std::int64_t> add(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) const
    {
        std::vector<std::int64_t> r(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) r[i] = mod_floor(a[i] + b[i], static_cast<std::int64_t>(d[i]));
        return r;
    }
    std::vector<std::int64_t> scale(const std::vector<std::int64_t>& a, std::int64_t k) const
    {
        std::vector<std::int64_t> r(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            auto di = static_cast<std::int64_t>(d[i]);
            r[i] = mod_floor(static_cast<std::int64_t>((static_cast<__int128>(a[i]) * mod_floor(k, di)) % di), di);
        }
        return r;
    }
    // Number of elements killed by k.
    std::uint64_t torsion_count(std::uint64_t k) const
    {
        std::uint64_t c = 1;
        for (auto x : d) c *= std::gcd(x, k);
        return c;
    }
    std::string str() const
    {
        if (d.empty()) return "0";
        std::string s;
        for (std::size_t i = 0; i < d.size(); ++i) s += (i ? " x Z/" : "Z/") + std::to_string(d[i]);
        return s;
    }
    bool operator==(const AbelianStructure& o) const { return d == o.d; }
};

// Invariant factors from a multiset of prime-power orders (or arbitrary cyclic orders).
inline AbelianStructure abelian_from_cyclic(const std::vector<std::uint64_t>& orders)
{
    std::map<std::uint64_t, std::vector<std::uint64_t>> by_p;
    for (auto o : orders) {
        if (o <= 1) continue;
        for (auto p : prime_factors(o)) {
            std::uint64_t q = 1;
            while (o % p == 0) {
                o /= p;
                q *= p;
            }
            by_p[p].push_back(q);
        }
    }
    std::size_t k = 0;
    for (auto& [p, v] : by_p) {
        std::sort(v.rbegin(), v.rend());
        k = std::max(k, v.size());
    }
    std::vector<std::uint64_t> d(k, 1);
    for (auto& [p, v] : by_p)
        for (std::size_t i = 0; i < v.size(); ++i) d[k - 1 - i] *= v[i];
    return {d};
}

} // namespace imcl
