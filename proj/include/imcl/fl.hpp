#pragma once

// Dense linear algebra over F_l and modules given by generator matrices.
// Matrices are row-major; a matrix acts on column vectors.

#include "imcl/common.hpp"

#include <algorithm>
#include <vector>

namespace imcl::fl {

using Vec = std::vector<std::uint32_t>;
using Mat = std::vector<Vec>;

inline Mat identity(std::size_t d, std::uint32_t = 0)
{
    Mat m(d, Vec(d, 0));
    for (std::size_t i = 0; i < d; ++i) m[i][i] = 1;
    return m;
}

inline Vec apply(const Mat& M, const Vec& v, std::uint32_t p)
{
    Vec r(M.size(), 0);
    for (std::size_t i = 0; i < M.size(); ++i) {
        std::uint64_t s = 0;
        for (std::size_t j = 0; j < v.size(); ++j) s += std::uint64_t(M[i][j]) * v[j];
        r[i] = static_cast<std::uint32_t>(s % p);
    }
    return r;
}

inline Mat transpose(const Mat& M)
{
    if (M.empty()) return {};
    Mat t(M[0].size(), Vec(M.size()));
    for (std::size_t i = 0; i < M.size(); ++i)
        for (std::size_t j = 0; j < M[i].size(); ++j) t[j][i] = M[i][j];
    return t;
}

// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(Mat& A, std::uint32_t p)
{
    std::vector<std::size_t> piv;
    if (A.empty()) return piv;
    const std::size_t n = A[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < A.size(); ++c) {
        std::size_t k = r;
        while (k < A.size() && A[k][c] == 0) ++k;
        if (k == A.size()) continue;
        std::swap(A[r], A[k]);
        std::uint64_t s = inv_mod(A[r][c], p);
        for (auto& x : A[r]) x = static_cast<std::uint32_t>(x * s % p);
        for (std::size_t i = 0; i < A.size(); ++i) {
            if (i == r || A[i][c] == 0) continue;
            std::uint64_t f = p - A[i][c];
            for (std::size_t j = 0; j < n; ++j) A[i][j] = static_cast<std::uint32_t>((A[i][j] + f * A[r][j]) % p);
        }
        piv.push_back(c);
        ++r;
    }
    A.resize(r);
    return piv;
}

inline std::size_t rank(Mat A, std::uint32_t p) { return rref(A, p).size(); }

// Basis of {x : A x = 0}.
inline std::vector<Vec> nullspace(Mat A, std::size_t ncols, std::uint32_t p)
{
    for (auto& r : A) r.resize(ncols, 0);
    auto piv = rref(A, p);
    std::vector<char> is_piv(ncols, 0);
    for (auto c : piv) is_piv[c] = 1;
    std::vector<Vec> out;
    for (std::size_t f = 0; f < ncols; ++f) {
        if (is_piv[f]) continue;
        Vec x(ncols, 0);
        x[f] = 1;
        for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = (p - A[i][f]) % p;
        out.push_back(std::move(x));
    }
    return out;
}

// Subspace in reduced echelon form.
struct Subspace {
    Mat basis;
    std::vector<std::size_t> piv;
    std::size_t dim() const { return basis.size(); }

    // Reduce v against the basis; zero iff v lies in the span.
    Vec reduce(Vec v, std::uint32_t p) const
    {
        for (std::size_t i = 0; i < basis.size(); ++i) {
            std::uint32_t t = v[piv[i]];
            if (!t) continue;
            std::uint64_t f = p - t;
            for (std::size_t j = 0; j < v.size(); ++j) v[j] = static_cast<std::uint32_t>((v[j] + f * basis[i][j]) % p);
        }
        return v;
    }
    bool contains(const Vec& v, std::uint32_t p) const
    {
        auto r = reduce(v, p);
        return std::all_of(r.begin(), r.end(), [](std::uint32_t x) { return x == 0; });
    }
    bool contains(const Subspace& o, std::uint32_t p) const
    {
        return std::all_of(o.basis.begin(), o.basis.end(), [&](const Vec& v) { return contains(v, p); });
    }
    // coordinates of a member in this basis
    Vec coords(const Vec& v) const
    {
        Vec c(basis.size());
        for (std::size_t i = 0; i < basis.size(); ++i) c[i] = v[piv[i]];
        return c;
    }
};

inline Subspace span(Mat vs, std::uint32_t p)
{
    Subspace s;
    s.piv = rref(vs, p);
    s.basis = std::move(vs);
    return s;
}

// Smallest subspace containing seeds and stable under every generator.
inline Subspace spin(const std::vector<Vec>& seeds, const std::vector<Mat>& gens, std::uint32_t p)
{
    Mat all;
    Subspace s;
    std::vector<Vec> queue;
    for (const auto& v : seeds) queue.push_back(v);
    while (!queue.empty()) {
        Vec v = std::move(queue.back());
        queue.pop_back();
        if (s.contains(v, p)) continue;
        all.push_back(v);
        s = span(all, p);
        for (const auto& g : gens) queue.push_back(apply(g, v, p));
    }
    return s;
}

// Action matrices of the generators restricted to an invariant subspace, in its basis.
inline std::vector<Mat> restrict_to(const std::vector<Mat>& gens, const Subspace& W, std::uint32_t p)
{
    std::vector<Mat> out;
    const std::size_t d = W.dim();
    for (const auto& g : gens) {
        Mat X(d, Vec(d, 0));
        for (std::size_t k = 0; k < d; ++k) {
            auto c = W.coords(apply(g, W.basis[k], p));
            for (std::size_t i = 0; i < d; ++i) X[i][k] = c[i];
        }
        out.push_back(std::move(X));
    }
    return out;
}

// dim {T : T A_g = B_g T for all g}, with A_g of size da and B_g of size db.
inline std::size_t hom_dim(const std::vector<Mat>& A, const std::vector<Mat>& B, std::uint32_t p)
{
    if (A.empty()) return 0;
    const std::size_t da = A[0].size(), db = B[0].size(), nv = da * db;
    if (nv == 0) return 0;
    Mat eqs;
    // unknown T[i][j] at index i * da + j
    for (std::size_t g = 0; g < A.size(); ++g)
        for (std::size_t i = 0; i < db; ++i)
            for (std::size_t j = 0; j < da; ++j) {
                Vec row(nv, 0);
                // (T A)_{ij} = sum_k T[i][k] A[k][j]
                for (std::size_t k = 0; k < da; ++k) row[i * da + k] = (row[i * da + k] + A[g][k][j]) % p;
                // (B T)_{ij} = sum_k B[i][k] T[k][j]
                for (std::size_t k = 0; k < db; ++k) row[k * da + j] = (row[k * da + j] + p - B[g][i][k]) % p;
                eqs.push_back(std::move(row));
            }
    return nv - rank(std::move(eqs), p);
}

// dim of the common fixed space of the given matrices.
inline std::size_t fixed_dim(const std::vector<Mat>& gens, std::size_t d, std::uint32_t p)
{
    Mat eqs;
    for (const auto& g : gens)
        for (std::size_t i = 0; i < d; ++i) {
            Vec row = g[i];
            row[i] = (row[i] + p - 1) % p;
            eqs.push_back(std::move(row));
        }
    return d - (eqs.empty() ? 0 : rank(std::move(eqs), p));
}

} // namespace imcl::fl
