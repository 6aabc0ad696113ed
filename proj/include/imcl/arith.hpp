#pragma once

// Class groups of imaginary quadratic function fields F_p(t)(sqrt f), deg f odd,
// through the Jacobian of y^2 = f, and of imaginary quadratic number fields
// through reduced binary quadratic forms.

#include "imcl/catalog.hpp"
#include "imcl/frob.hpp"
#include "imcl/snf.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace imcl {

// ---------------------------------------------------------------- F_p[t]

using Poly = std::vector<std::uint32_t>; // low degree first, no trailing zeros

namespace poly {

inline void trim(Poly& a)
{
    while (!a.empty() && a.back() == 0) a.pop_back();
}
inline int deg(const Poly& a) { return static_cast<int>(a.size()) - 1; } // -1 for zero
inline bool is_zero(const Poly& a) { return a.empty(); }
inline Poly constant(std::uint64_t c, std::uint32_t p)
{
    Poly r{static_cast<std::uint32_t>(c % p)};
    trim(r);
    return r;
}

inline Poly add(const Poly& a, const Poly& b, std::uint32_t p)
{
    Poly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        std::uint32_t x = i < a.size() ? a[i] : 0, y = i < b.size() ? b[i] : 0;
        r[i] = (x + y) % p;
    }
    trim(r);
    return r;
}
inline Poly neg(Poly a, std::uint32_t p)
{
    for (auto& x : a) x = (p - x) % p;
    return a;
}
inline Poly sub(const Poly& a, const Poly& b, std::uint32_t p) { return add(a, neg(b, p), p); }
inline Poly scale(Poly a, std::uint64_t c, std::uint32_t p)
{
    for (auto& x : a) x = static_cast<std::uint32_t>(x * (c % p) % p);
    trim(a);
    return a;
}
inline Poly mul(const Poly& a, const Poly& b, std::uint32_t p)
{
    if (a.empty() || b.empty()) return {};
    std::vector<std::uint64_t> acc(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < b.size(); ++j) acc[i + j] = (acc[i + j] + std::uint64_t(a[i]) * b[j]) % p;
    }
    Poly r(acc.begin(), acc.end());
    trim(r);
    return r;
}

// a = q b + r, deg r < deg b
inline std::pair<Poly, Poly> divmod(Poly a, const Poly& b, std::uint32_t p)
{
    if (b.empty()) throw DomainError("polynomial division by zero");
    if (a.size() < b.size()) return {{}, a};
    Poly q(a.size() - b.size() + 1, 0);
    const std::uint64_t inv = static_cast<std::uint64_t>(inv_mod(b.back(), p));
    for (int i = deg(a); i >= deg(b); --i) {
        std::uint32_t c = a[i];
        if (!c) continue;
        std::uint64_t f = c * inv % p;
        std::size_t shift = static_cast<std::size_t>(i - deg(b));
        q[shift] = static_cast<std::uint32_t>(f);
        for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] = static_cast<std::uint32_t>((a[shift + j] + (p - f) * b[j]) % p);
    }
    trim(a);
    trim(q);
    return {q, a};
}
inline Poly mod(const Poly& a, const Poly& b, std::uint32_t p) { return divmod(a, b, p).second; }

inline Poly exact_div(const Poly& a, const Poly& b, std::uint32_t p)
{
    auto [q, r] = divmod(a, b, p);
    if (!r.empty()) throw InternalError("polynomial division not exact");
    return q;
}

inline Poly monic(Poly a, std::uint32_t p)
{
    if (a.empty()) return a;
    return scale(std::move(a), static_cast<std::uint64_t>(inv_mod(a.back(), p)), p);
}

// Returns (d, s, t) with s a + t b = d monic (d = 0 iff a = b = 0).
inline std::tuple<Poly, Poly, Poly> xgcd(const Poly& a, const Poly& b, std::uint32_t p)
{
    Poly r0 = a, r1 = b, s0{1}, s1, t0, t1{1};
    while (!r1.empty()) {
        auto [q, r] = divmod(r0, r1, p);
        r0 = std::move(r1);
        r1 = std::move(r);
        Poly s2 = sub(s0, mul(q, s1, p), p), t2 = sub(t0, mul(q, t1, p), p);
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (r0.empty()) return {r0, s0, t0};
    std::uint64_t inv = static_cast<std::uint64_t>(inv_mod(r0.back(), p));
    return {scale(r0, inv, p), scale(s0, inv, p), scale(t0, inv, p)};
}
inline Poly gcd(const Poly& a, const Poly& b, std::uint32_t p) { return std::get<0>(xgcd(a, b, p)); }

inline Poly derivative(const Poly& a, std::uint32_t p)
{
    Poly r;
    for (std::size_t i = 1; i < a.size(); ++i) r.push_back(static_cast<std::uint32_t>(i % p * a[i] % p));
    trim(r);
    return r;
}
inline bool squarefree(const Poly& a, std::uint32_t p) { return !a.empty() && deg(gcd(a, derivative(a, p), p)) == 0; }

inline std::uint32_t eval(const Poly& a, std::uint32_t x, std::uint32_t p)
{
    std::uint64_t r = 0;
    for (std::size_t i = a.size(); i-- > 0;) r = (r * x + a[i]) % p;
    return static_cast<std::uint32_t>(r);
}

inline Poly powmod(Poly b, std::uint64_t e, const Poly& m, std::uint32_t p)
{
    Poly r = mod(Poly{1}, m, p);
    b = mod(b, m, p);
    while (e) {
        if (e & 1) r = mod(mul(r, b, p), m, p);
        b = mod(mul(b, b, p), m, p);
        e >>= 1;
    }
    return r;
}

inline bool irreducible(const Poly& m, std::uint32_t p)
{
    const int n = deg(m);
    if (n < 1) return false;
    Poly x{0, 1}, xp = x;
    for (int k = 1; k <= n / 2; ++k) {
        xp = powmod(xp, p, m, p);
        if (deg(gcd(m, sub(xp, x, p), p)) != 0) return false;
    }
    return true;
}

// Coefficients as "c0,c1,...", low degree first.
inline std::string str(const Poly& a)
{
    std::string s;
    for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + std::to_string(a[i]);
    return s.empty() ? "0" : s;
}
inline Poly parse(const std::string& s, std::uint32_t p)
{
    Poly r;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) throw ValidationError("empty polynomial coefficient in '" + s + "'");
        long long v = std::stoll(tok);
        r.push_back(static_cast<std::uint32_t>(mod_floor(v, p)));
    }
    trim(r);
    return r;
}

} // namespace poly

// ---------------------------------------------------------------- F_{p^i}

// Elements are integers sum c_j p^j (coefficients in the polynomial basis).
class FiniteField {
public:
    FiniteField(std::uint32_t p, std::uint32_t k) : p_(p), k_(k)
    {
        Q_ = 1;
        for (std::uint32_t i = 0; i < k; ++i) {
            if (Q_ > (1u << 24) / p) throw CapacityError("finite field too large for log tables");
            Q_ *= p;
        }
        // smallest irreducible monic of degree k in the index order
        for (std::uint64_t idx = 0;; ++idx) {
            Poly m = from_index(idx);
            m.resize(k + 1, 0);
            m[k] = 1;
            poly::trim(m);
            if (poly::irreducible(m, p)) {
                modulus_ = m;
                break;
            }
        }
        log_.assign(Q_, 0);
        exp_.assign(Q_ - 1, 0);
        if (p < 3) throw DomainError("finite field tables need an odd prime");
        for (std::uint32_t g = 2; g < Q_; ++g)
            if (try_generator(g)) return;
        throw InternalError("no primitive element found");
    }

    std::uint32_t size() const { return Q_; }
    std::uint32_t add(std::uint32_t a, std::uint32_t b) const
    {
        std::uint32_t r = 0, w = 1;
        for (std::uint32_t i = 0; i < k_; ++i) {
            r += ((a % p_ + b % p_) % p_) * w;
            a /= p_;
            b /= p_;
            w *= p_;
        }
        return r;
    }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const
    {
        if (!a || !b) return 0;
        return exp_[(log_[a] + log_[b]) % (Q_ - 1)];
    }
    // 1, -1 or 0
    int chi(std::uint32_t a) const { return a == 0 ? 0 : (log_[a] % 2 == 0 ? 1 : -1); }

    std::uint32_t eval(const Poly& f, std::uint32_t t) const
    {
        std::uint32_t r = 0;
        for (std::size_t i = f.size(); i-- > 0;) r = add(mul(r, t), f[i]);
        return r;
    }

private:
    Poly from_index(std::uint64_t idx) const
    {
        Poly r;
        while (idx) {
            r.push_back(static_cast<std::uint32_t>(idx % p_));
            idx /= p_;
        }
        return r;
    }
    std::uint32_t to_index(const Poly& a) const
    {
        std::uint32_t r = 0, w = 1;
        for (auto c : a) {
            r += c * w;
            w *= p_;
        }
        return r;
    }
    bool try_generator(std::uint32_t g)
    {
        Poly gp = from_index(g), x{1};
        std::vector<char> seen(Q_, 0);
        for (std::uint32_t e = 0; e < Q_ - 1; ++e) {
            std::uint32_t xi = to_index(x);
            if (seen[xi]) return false;
            seen[xi] = 1;
            exp_[e] = xi;
            log_[xi] = e;
            x = poly::mod(poly::mul(x, gp, p_), modulus_, p_);
        }
        return true;
    }

    std::uint32_t p_, k_, Q_;
    Poly modulus_;
    std::vector<std::uint32_t> log_, exp_;
};

// ---------------------------------------------------------------- curves

struct HyperellipticModel {
    std::uint32_t q = 3;
    Poly f;
    std::uint32_t genus() const { return static_cast<std::uint32_t>((poly::deg(f) - 1) / 2); }

    void validate() const
    {
        if (q < 3 || !is_prime_u(q)) throw DomainError("q must be an odd prime");
        for (auto c : f)
            if (c >= q) throw ValidationError("coefficient out of range");
        if (f.empty() || poly::deg(f) % 2 == 0) throw DomainError("deg f must be odd (imaginary model)");
        if (!poly::squarefree(f, q)) throw DomainError("f must be squarefree");
    }
};

inline std::uint32_t smallest_nonsquare(std::uint32_t q)
{
    for (std::uint32_t c = 2; c < q; ++c)
        if (pow_mod(c, (q - 1) / 2, q) == q - 1) return c;
    throw DomainError("no nonsquare: q must be an odd prime");
}

// Monic squarefree f of degree d in index order, each followed by its twist n*f,
// n the least nonsquare. These represent F_q^* f up to squares. Returns the count.
inline std::uint64_t enumerate_imaginary(std::uint32_t q, std::uint32_t d, const std::function<void(const HyperellipticModel&)>& visit)
{
    if (q < 3 || !is_prime_u(q)) throw DomainError("q must be an odd prime");
    if (d % 2 == 0) throw DomainError("even degree is unsupported: only imaginary models (deg f odd)");
    std::uint64_t total = 1;
    for (std::uint32_t i = 0; i < d; ++i) {
        if (total > (std::uint64_t(1) << 40) / q) throw CapacityError("degree too large to enumerate");
        total *= q;
    }
    const std::uint32_t ns = smallest_nonsquare(q);
    std::uint64_t count = 0;
    Poly f(d + 1, 0);
    f[d] = 1;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        std::uint64_t x = idx;
        for (std::uint32_t i = 0; i < d; ++i) {
            f[i] = static_cast<std::uint32_t>(x % q);
            x /= q;
        }
        if (!poly::squarefree(f, q)) continue;
        visit(HyperellipticModel{q, f});
        visit(HyperellipticModel{q, poly::scale(f, ns, q)});
        count += 2;
    }
    return count;
}

struct LPolynomial {
    std::vector<std::int64_t> a; // a_0 .. a_{2g}
    std::int64_t at_one() const { return std::accumulate(a.begin(), a.end(), std::int64_t(0)); }
};

inline double hasse_weil_low(std::uint32_t q, std::uint32_t g) { return std::pow(std::sqrt(double(q)) - 1, 2.0 * g); }
inline double hasse_weil_high(std::uint32_t q, std::uint32_t g) { return std::pow(std::sqrt(double(q)) + 1, 2.0 * g); }

// Point counts through the quadratic character; keeps one field table per extension degree.
class PointCounter {
public:
    explicit PointCounter(std::uint32_t q) : q_(q) {}

    const FiniteField& field(std::uint32_t k)
    {
        auto it = fields_.find(k);
        if (it == fields_.end()) it = fields_.emplace(k, FiniteField(q_, k)).first;
        return it->second;
    }

    // #C(F_{q^k}) for the smooth model with one point at infinity (deg f odd).
    std::int64_t points(const Poly& f, std::uint32_t k)
    {
        const auto& F = field(k);
        std::int64_t s = 0;
        for (std::uint32_t t = 0; t < F.size(); ++t) s += F.chi(F.eval(f, t));
        return std::int64_t(F.size()) + 1 + s;
    }

    LPolynomial lpoly(const HyperellipticModel& m, std::uint64_t check_limit = 1u << 16)
    {
        m.validate();
        const std::uint32_t g = m.genus();
        if (g > 3) throw CapacityError("genus above 3 is not supported");
        std::vector<std::int64_t> S(g + 2, 0), a(2 * g + 1, 0), qp(g + 2, 1);
        for (std::uint32_t k = 1; k <= g + 1; ++k) qp[k] = qp[k - 1] * q_;
        a[0] = 1;
        for (std::uint32_t k = 1; k <= g; ++k) S[k] = qp[k] + 1 - points(m.f, k);
        for (std::uint32_t k = 1; k <= g; ++k) {
            std::int64_t s = 0;
            for (std::uint32_t j = 1; j <= k; ++j) s += S[j] * a[k - j];
            if (s % k != 0) throw InternalError("Newton identity not integral: point count bug");
            a[k] = -s / static_cast<std::int64_t>(k);
        }
        for (std::uint32_t k = 0; k < g; ++k) a[2 * g - k] = qp[g - k] * a[k];
        LPolynomial L{a};
        check(m, L);
        // predicted count over the next extension against a direct count
        if (qp[g + 1] <= static_cast<std::int64_t>(check_limit) && g > 0) {
            std::int64_t s = (g + 1) * a[g + 1];
            for (std::uint32_t j = 1; j <= g; ++j) s += S[j] * a[g + 1 - j];
            std::int64_t predicted = qp[g + 1] + 1 + s;
            if (predicted != points(m.f, g + 1)) throw InternalError("L-polynomial does not predict the next point count");
        }
        return L;
    }

    void check(const HyperellipticModel& m, const LPolynomial& L) const
    {
        const std::uint32_t g = m.genus();
        if (L.a.size() != 2 * g + 1 || L.a[0] != 1) throw InternalError("malformed L-polynomial");
        std::int64_t qg = 1;
        for (std::uint32_t k = 0; k < g; ++k) qg *= q_;
        // functional equation a_{2g-k} = q^{g-k} a_k
        for (std::uint32_t k = 0; k <= g; ++k) {
            std::int64_t w = 1;
            for (std::uint32_t j = k; j < g; ++j) w *= q_;
            if (L.a[2 * g - k] != w * L.a[k]) throw InternalError("L-polynomial violates the functional equation");
        }
        double h = static_cast<double>(L.at_one());
        if (h < hasse_weil_low(q_, g) - 1e-6 || h > hasse_weil_high(q_, g) + 1e-6)
            throw InternalError("class number outside the Hasse-Weil interval");
        (void)qg;
    }

private:
    std::uint32_t q_;
    std::map<std::uint32_t, FiniteField> fields_;
};

inline std::int64_t jacobian_order(const HyperellipticModel& m)
{
    PointCounter pc(m.q);
    return pc.lpoly(m).at_one();
}

// ---------------------------------------------------------------- Cantor arithmetic

struct DivisorClass {
    Poly u{1}, v;
    bool operator==(const DivisorClass& o) const { return u == o.u && v == o.v; }
    bool operator<(const DivisorClass& o) const { return std::tie(u, v) < std::tie(o.u, o.v); }
    std::string str() const { return "(" + poly::str(u) + ";" + poly::str(v) + ")"; }
};

inline DivisorClass divclass_identity() { return {}; }

inline bool valid_divclass(const HyperellipticModel& m, const DivisorClass& a)
{
    if (a.u.empty() || a.u.back() != 1) return false;
    if (poly::deg(a.v) >= poly::deg(a.u) || poly::deg(a.u) > static_cast<int>(m.genus())) return false;
    for (auto c : a.v)
        if (c >= m.q) return false;
    return poly::mod(poly::sub(poly::mul(a.v, a.v, m.q), m.f, m.q), a.u, m.q).empty();
}

inline DivisorClass divclass_negate(const HyperellipticModel& m, const DivisorClass& a) { return {a.u, poly::neg(a.v, m.q)}; }

namespace arith_detail {

inline DivisorClass reduce(const HyperellipticModel& m, Poly u, Poly v)
{
    const std::uint32_t p = m.q;
    const int g = static_cast<int>(m.genus());
    v = poly::mod(v, u, p);
    while (poly::deg(u) > g) {
        Poly u2 = poly::exact_div(poly::sub(m.f, poly::mul(v, v, p), p), u, p);
        u = poly::monic(u2, p);
        v = poly::mod(poly::neg(v, p), u, p);
    }
    u = poly::monic(u, p);
    return {u, poly::mod(v, u, p)};
}

} // namespace arith_detail

inline DivisorClass divclass_add(const HyperellipticModel& m, const DivisorClass& a, const DivisorClass& b)
{
    if (!valid_divclass(m, a) || !valid_divclass(m, b)) throw DomainError("divisor operand violates the Mumford invariants");
    const std::uint32_t p = m.q;
    auto [d1, e1, e2] = poly::xgcd(a.u, b.u, p);
    auto [d, c1, c2] = poly::xgcd(d1, poly::add(a.v, b.v, p), p);
    Poly s1 = poly::mul(c1, e1, p), s2 = poly::mul(c1, e2, p), s3 = c2;
    Poly u = poly::exact_div(poly::mul(a.u, b.u, p), poly::mul(d, d, p), p);
    Poly t = poly::add(poly::add(poly::mul(poly::mul(s1, a.u, p), b.v, p), poly::mul(poly::mul(s2, b.u, p), a.v, p), p),
                       poly::mul(s3, poly::add(poly::mul(a.v, b.v, p), m.f, p), p), p);
    Poly v = poly::exact_div(t, d, p);
    return arith_detail::reduce(m, u, v);
}

inline DivisorClass divclass_mul(const HyperellipticModel& m, DivisorClass a, std::uint64_t k)
{
    DivisorClass r;
    while (k) {
        if (k & 1) r = divclass_add(m, r, a);
        k >>= 1;
        if (k) a = divclass_add(m, a, a);
    }
    return r;
}

inline std::uint64_t divclass_order(const HyperellipticModel& m, const DivisorClass& a, std::uint64_t N)
{
    if (!(divclass_mul(m, a, N) == DivisorClass{})) throw InternalError("class order does not divide the class number");
    std::uint64_t o = N;
    for (auto l : prime_factors(N))
        while (o % l == 0 && divclass_mul(m, a, o / l) == DivisorClass{}) o /= l;
    return o;
}

// Every reduced pair (u, v); these are exactly the classes.
inline std::vector<DivisorClass> enumerate_classes(const HyperellipticModel& m, std::uint64_t cap = 5000000)
{
    m.validate();
    const std::uint32_t p = m.q, g = m.genus();
    std::uint64_t work = 0, pk = 1;
    for (std::uint32_t k = 0; k <= g; ++k, pk *= std::uint64_t(p) * p) work += pk;
    if (work > cap) throw CapacityError("class enumeration exceeds the work cap");
    std::vector<DivisorClass> out;
    for (std::uint32_t k = 0; k <= g; ++k) {
        std::uint64_t n = 1;
        for (std::uint32_t i = 0; i < k; ++i) n *= p;
        for (std::uint64_t ui = 0; ui < n; ++ui)
            for (std::uint64_t vi = 0; vi < n; ++vi) {
                Poly u(k + 1, 0), v(k, 0);
                u[k] = 1;
                std::uint64_t x = ui, y = vi;
                for (std::uint32_t i = 0; i < k; ++i) {
                    u[i] = static_cast<std::uint32_t>(x % p);
                    x /= p;
                    v[i] = static_cast<std::uint32_t>(y % p);
                    y /= p;
                }
                poly::trim(v);
                DivisorClass c{u, v};
                if (valid_divclass(m, c)) out.push_back(std::move(c));
            }
    }
    return out;
}

// Uniform class: candidate pairs of degree k drawn with weight p^{2k}, then rejected unless reduced.
inline DivisorClass random_divclass(const HyperellipticModel& m, SplitMix64& rng, std::uint64_t budget = 1000000)
{
    const std::uint32_t p = m.q, g = m.genus();
    std::vector<std::uint64_t> w;
    std::uint64_t total = 0, pk = 1;
    for (std::uint32_t k = 0; k <= g; ++k, pk *= std::uint64_t(p) * p) {
        w.push_back(pk);
        total += pk;
    }
    for (std::uint64_t it = 0; it < budget; ++it) {
        std::uint64_t r = rng.below(total);
        std::uint32_t k = 0;
        while (r >= w[k]) r -= w[k++];
        Poly u(k + 1, 0), v(k, 0);
        u[k] = 1;
        for (std::uint32_t i = 0; i < k; ++i) {
            u[i] = static_cast<std::uint32_t>(rng.below(p));
            v[i] = static_cast<std::uint32_t>(rng.below(p));
        }
        poly::trim(v);
        DivisorClass c{u, v};
        if (valid_divclass(m, c)) return c;
    }
    throw CapacityError("random class sampling exhausted its budget");
}

// ---------------------------------------------------------------- Sylow structure

struct SylowResult {
    std::uint64_t ell = 0;
    int valuation = 0;
    AbelianStructure structure;
    bool conclusive = true;
};

// l-part of Cl from explicit closure of random l-power-order classes.
// Certified when the generated subgroup reaches l^v; otherwise flagged inconclusive.
inline SylowResult sylow_structure(const HyperellipticModel& m, std::uint64_t ell, std::uint64_t N, SplitMix64& rng, std::uint32_t attempts = 200)
{
    if (!is_prime_u(ell)) throw DomainError("ell must be prime");
    if (m.q % ell == 0) throw DomainError("ell must not divide q");
    SylowResult r;
    r.ell = ell;
    r.valuation = valuation(N, ell);
    if (r.valuation == 0) return r;
    std::uint64_t target = 1;
    for (int i = 0; i < r.valuation; ++i) target *= ell;
    if (r.valuation == 1) {
        r.structure = abelian_from_cyclic({ell});
        return r;
    }
    if (target > 2000000) throw CapacityError("Sylow subgroup too large for explicit closure");
    const std::uint64_t cofactor = N / target;
    std::set<DivisorClass> S{DivisorClass{}};
    for (std::uint32_t it = 0; it < attempts && S.size() < target; ++it) {
        DivisorClass x = divclass_mul(m, random_divclass(m, rng), cofactor);
        if (S.count(x)) continue;
        // S <- S + <x>
        std::vector<DivisorClass> base(S.begin(), S.end());
        DivisorClass y = x;
        while (!S.count(y)) {
            for (const auto& s : base) S.insert(divclass_add(m, s, y));
            y = divclass_add(m, y, x);
        }
        if (S.size() > target) throw InternalError("Sylow closure exceeds the l-part of the class number");
    }
    if (S.size() != target) {
        r.conclusive = false;
        return r;
    }
    // invariant factors from the l^k-torsion counts
    std::vector<std::uint64_t> tors(r.valuation + 1, 0);
    for (const auto& s : S) {
        int e = 0;
        DivisorClass y = s;
        while (!(y == DivisorClass{})) {
            y = divclass_mul(m, y, ell);
            ++e;
        }
        for (int k = e; k <= r.valuation; ++k) ++tors[k];
    }
    std::vector<std::uint64_t> cyc;
    auto logl = [&](std::uint64_t x) {
        int e = 0;
        while (x > 1) {
            x /= ell;
            ++e;
        }
        return e;
    };
    std::vector<int> atleast(r.valuation + 2, 0);
    for (int k = 1; k <= r.valuation; ++k) atleast[k] = logl(tors[k] / tors[k - 1]);
    for (int k = 1; k <= r.valuation; ++k) {
        std::uint64_t lk = 1;
        for (int i = 0; i < k; ++i) lk *= ell;
        for (int t = 0; t < atleast[k] - atleast[k + 1]; ++t) cyc.push_back(lk);
    }
    r.structure = abelian_from_cyclic(cyc);
    if (r.structure.order() != target) throw InternalError("Sylow structure does not match the valuation");
    return r;
}

// ---------------------------------------------------------------- surjection counts

inline std::uint64_t count_abelian_homs(const AbelianStructure& A, const AbelianStructure& H)
{
    std::uint64_t c = 1;
    for (auto a : A.d)
        for (auto h : H.d) c *= std::gcd(a, h);
    return c;
}

inline AbelianStructure primary_part(const AbelianStructure& A, std::uint64_t p)
{
    std::vector<std::uint64_t> cyc;
    for (auto x : A.d) {
        std::uint64_t q = 1;
        while (x % p == 0) {
            x /= p;
            q *= p;
        }
        cyc.push_back(q);
    }
    return abelian_from_cyclic(cyc);
}

// #Sur(A, H) for finite abelian A, H by enumerating images of the cyclic generators of A.
inline std::uint64_t count_abelian_surjections(const AbelianStructure& A, const AbelianStructure& H, std::uint64_t cap = 50000000)
{
    if (H.trivial()) return 1;
    std::uint64_t total = 1;
    for (auto p : prime_factors(H.order())) {
        auto Ap = primary_part(A, p), Hp = primary_part(H, p);
        if (Ap.d.size() < Hp.d.size()) return 0;
        // elementary abelian target: count bases of the image modulo p
        if (Hp.exponent() == p) {
            std::uint64_t s = Ap.d.size(), r = Hp.d.size(), c = 1, ps = 1, pi = 1;
            for (std::uint64_t i = 0; i < s; ++i) ps *= p;
            for (std::uint64_t i = 0; i < r; ++i, pi *= p) c *= ps - pi;
            total *= c;
            continue;
        }
        std::uint64_t work = 1;
        for (auto a : Ap.d) {
            work *= Hp.torsion_count(a);
            if (work > cap) throw CapacityError("surjection count exceeds the work cap");
        }
        const std::uint64_t n = Hp.order();
        std::vector<std::vector<std::uint64_t>> cand;
        for (auto a : Ap.d) {
            std::vector<std::uint64_t> c;
            for (std::uint64_t x = 0; x < n; ++x) {
                auto v = Hp.decode(x);
                auto w = Hp.scale(v, static_cast<std::int64_t>(a));
                if (Hp.encode(w) == 0) c.push_back(x);
            }
            cand.push_back(std::move(c));
        }
        std::uint64_t count = 0;
        std::vector<std::size_t> idx(cand.size(), 0);
        while (true) {
            // span of the chosen images
            std::vector<char> in(n, 0);
            std::vector<std::uint64_t> span{0};
            in[0] = 1;
            for (std::size_t i = 0; i < cand.size(); ++i) {
                auto g = Hp.decode(cand[i][idx[i]]);
                for (std::size_t j = 0; j < span.size(); ++j) {
                    auto s = Hp.decode(span[j]);
                    auto y = Hp.add(s, g);
                    auto e = Hp.encode(y);
                    if (!in[e]) {
                        in[e] = 1;
                        span.push_back(e);
                    }
                }
            }
            count += span.size() == n;
            std::size_t i = 0;
            while (i < idx.size() && ++idx[i] == cand[i].size()) idx[i++] = 0;
            if (i == idx.size()) break;
        }
        total *= count;
    }
    return total;
}

// Abelian H with Gamma = Z/2 acting by inversion, as a Gamma-group.
inline GammaGroup abelian_with_inversion(const AbelianStructure& H)
{
    const auto n = static_cast<std::uint32_t>(H.order());
    FiniteGroup G = group_from_rule(n, [&](elem a, elem b) {
        return static_cast<elem>(H.encode(H.add(H.decode(a), H.decode(b))));
    });
    std::vector<std::vector<elem>> act(2, std::vector<elem>(n));
    for (elem x = 0; x < n; ++x) {
        act[0][x] = x;
        act[1][x] = static_cast<elem>(H.encode(H.scale(H.decode(x), -1)));
    }
    return GammaGroup::make(std::move(G), cyclic_group(2), std::move(act));
}

// ---------------------------------------------------------------- curve cache

// One line per curve: q;f-coefficients;L-coefficients (comma separated, low degree first).
class CurveCache {
public:
    void load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) return;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto a = line.find(';'), b = line.find(';', a + 1);
            if (a == std::string::npos || b == std::string::npos) throw ValidationError("malformed curve cache line: " + line);
            auto q = static_cast<std::uint32_t>(std::stoul(line.substr(0, a)));
            Poly f = poly::parse(line.substr(a + 1, b - a - 1), q);
            LPolynomial L;
            std::stringstream ss(line.substr(b + 1));
            std::string tok;
            while (std::getline(ss, tok, ',')) L.a.push_back(std::stoll(tok));
            entries_[{q, f}] = L;
        }
    }
    void save(const std::string& path) const
    {
        std::ofstream out(path);
        if (!out) throw ValidationError("cannot write curve cache " + path);
        for (const auto& [k, L] : entries_) {
            out << k.first << ';' << poly::str(k.second) << ';';
            for (std::size_t i = 0; i < L.a.size(); ++i) out << (i ? "," : "") << L.a[i];
            out << '\n';
        }
    }
    const LPolynomial* find(std::uint32_t q, const Poly& f) const
    {
        auto it = entries_.find({q, f});
        return it == entries_.end() ? nullptr : &it->second;
    }
    void insert(std::uint32_t q, const Poly& f, const LPolynomial& L) { entries_[{q, f}] = L; }
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::pair<std::uint32_t, Poly>, LPolynomial> entries_;
};

// ---------------------------------------------------------------- empirical moments

enum class MomentWeight { none, gerth };

struct MomentRow {
    std::uint32_t degree = 0;
    std::uint64_t fields = 0;
    std::uint64_t inconclusive = 0;
    bigint sum_sur = 0;         // weighted sum in Gerth mode
    bigint sum_weight = 0;      // = fields when unweighted
    double running_average = 0; // cumulative over degrees so far
    double se = 0;              // cumulative standard error proxy
};

struct MomentReport {
    std::uint32_t q = 0;
    AbelianStructure H;
    MomentWeight weight = MomentWeight::none;
    rational prediction;
    std::vector<MomentRow> rows;
    std::uint64_t total_fields = 0, total_inconclusive = 0;
    double average = 0;
    double gap = 0;
    std::string verdict; // "in-band", "out-of-band" or "insufficient-sample"

    std::string csv() const
    {
        std::ostringstream o;
        o << "degree,fields,sum_sur,running_average,prediction,se\n";
        o.setf(std::ios::fixed);
        o.precision(6);
        for (const auto& r : rows)
            o << r.degree << ',' << r.fields << ',' << r.sum_sur << ',' << r.running_average << ',' << to_string(prediction) << ',' << r.se << '\n';
        return o.str();
    }
};

// |(wedge^2 H)[2^{v-1}]| for an abelian 2-group H.
inline std::uint64_t gerth_prediction(const AbelianStructure& H, std::uint32_t q)
{
    const int v = valuation(q - 1, 2);
    const std::uint64_t t = std::uint64_t(1) << (v - 1);
    std::uint64_t c = 1;
    for (std::size_t i = 0; i < H.d.size(); ++i)
        for (std::size_t j = i + 1; j < H.d.size(); ++j) c *= std::gcd(std::gcd(H.d[i], H.d[j]), t);
    return c;
}

struct MomentOptions {
    std::uint32_t d_min = 3, d_max = 7;
    MomentWeight weight = MomentWeight::none;
    std::uint64_t seed = 0;
    std::uint64_t sample_floor = 100;
    double band_low = 0.5, band_high = 1.5;
    CurveCache* cache = nullptr;
};

inline MomentReport empirical_moment(std::uint32_t q, const AbelianStructure& H, const MomentOptions& opt)
{
    if (q < 3 || !is_prime_u(q)) throw DomainError("q must be an odd prime");
    if (H.trivial()) throw DomainError("H must be nontrivial");
    if (std::gcd<std::uint64_t>(H.order(), q) != 1) throw DomainError("|H| must be prime to q");
    MomentReport rep;
    rep.q = q;
    rep.H = H;
    rep.weight = opt.weight;
    auto primes = prime_factors(H.order());
    if (opt.weight == MomentWeight::gerth) {
        if (primes != std::vector<std::uint64_t>{2}) throw DomainError("Gerth mode needs H to be a 2-group");
        rep.prediction = rational(gerth_prediction(H, q));
    } else {
        if (H.order() % 2 == 0) throw DomainError("H must have odd order (coprime to |Gamma| = 2)");
        rep.prediction = moment_prediction(abelian_with_inversion(H), 1, q);
    }
    AbelianStructure Hmod2;
    if (opt.weight == MomentWeight::gerth) Hmod2 = abelian_from_cyclic(std::vector<std::uint64_t>(H.d.size(), 2));

    PointCounter pc(q);
    bigint cum_sur = 0, cum_w = 0;
    long double cum_sq = 0;
    std::uint64_t cum_n = 0, field_index = 0;
    for (std::uint32_t d = opt.d_min; d <= opt.d_max; d += 2) {
        if (d % 2 == 0) throw DomainError("degrees must be odd");
        MomentRow row;
        row.degree = d;
        enumerate_imaginary(q, d, [&](const HyperellipticModel& m) {
            SplitMix64 rng(opt.seed, (std::uint64_t(d) << 40) ^ field_index++);
            LPolynomial L;
            if (const auto* hit = opt.cache ? opt.cache->find(q, m.f) : nullptr) {
                L = *hit;
                pc.check(m, L);
            } else {
                L = pc.lpoly(m);
                if (opt.cache) opt.cache->insert(q, m.f, L);
            }
            auto N = static_cast<std::uint64_t>(L.at_one());
            std::vector<std::uint64_t> cyc;
            bool ok = true;
            for (auto p : primes) {
                auto s = sylow_structure(m, p, N, rng);
                if (!s.conclusive) ok = false;
                cyc.insert(cyc.end(), s.structure.d.begin(), s.structure.d.end());
            }
            ++row.fields;
            if (!ok) {
                ++row.inconclusive;
                return;
            }
            auto cl = abelian_from_cyclic(cyc);
            std::uint64_t w = 1, s = 0;
            if (opt.weight == MomentWeight::gerth) {
                w = count_abelian_surjections(cl, Hmod2) ? count_abelian_homs(cl, Hmod2) : 0;
                std::vector<std::uint64_t> halves;
                for (auto x : cl.d) halves.push_back(x / 2);
                if (w) s = count_abelian_surjections(abelian_from_cyclic(halves), H);
            } else {
                s = count_abelian_surjections(cl, H);
            }
            row.sum_sur += bigint(w) * s;
            row.sum_weight += w;
            cum_sq += static_cast<long double>(w) * s * s;
        });
        cum_sur += row.sum_sur;
        cum_w += row.sum_weight;
        cum_n += row.fields - row.inconclusive;
        if (cum_w > 0) {
            long double mean = static_cast<long double>(cum_sur.convert_to<double>()) / cum_w.convert_to<double>();
            row.running_average = static_cast<double>(mean);
            long double var = cum_sq / cum_w.convert_to<double>() - mean * mean;
            row.se = cum_n > 1 ? static_cast<double>(std::sqrt(std::max<long double>(var, 0) / (cum_n - 1))) : 0.0;
        }
        rep.total_fields += row.fields;
        rep.total_inconclusive += row.inconclusive;
        rep.rows.push_back(row);
    }
    rep.average = rep.rows.empty() ? 0 : rep.rows.back().running_average;
    rep.gap = rep.average - rep.prediction.convert_to<double>();
    if (cum_n < opt.sample_floor) rep.verdict = "insufficient-sample";
    else rep.verdict = (rep.average >= opt.band_low && rep.average <= opt.band_high) ? "in-band" : "out-of-band";
    return rep;
}

// ---------------------------------------------------------------- number fields

struct QuadForm {
    std::int64_t a, b, c;
    bool operator==(const QuadForm& o) const { return a == o.a && b == o.b && c == o.c; }
    bool operator<(const QuadForm& o) const { return std::tie(a, b, c) < std::tie(o.a, o.b, o.c); }
};

inline std::int64_t fundamental_discriminant(std::int64_t d)
{
    if (d < 1) throw DomainError("d must be positive");
    for (std::int64_t p = 2; p * p <= d; ++p)
        if (d % (p * p) == 0) throw DomainError("d must be squarefree");
    return (d % 4 == 3) ? -d : -4 * d;
}

inline QuadForm reduce_form(QuadForm f)
{
    const std::int64_t D = f.b * f.b - 4 * f.a * f.c;
    auto normalize = [&](QuadForm& g) {
        // b into (-a, a]
        std::int64_t two_a = 2 * g.a;
        std::int64_t r = (g.a - g.b) >= 0 ? (g.a - g.b) / two_a : -((g.b - g.a + two_a - 1) / two_a);
        g.b += 2 * r * g.a;
        g.c = (g.b * g.b - D) / (4 * g.a);
    };
    normalize(f);
    while (f.a > f.c) {
        f = {f.c, -f.b, f.a};
        normalize(f);
    }
    if (f.a == f.c && f.b < 0) f.b = -f.b;
    return f;
}

inline std::tuple<std::int64_t, std::int64_t, std::int64_t> ext_gcd(std::int64_t a, std::int64_t b)
{
    if (b == 0) return {a >= 0 ? a : -a, a >= 0 ? 1 : -1, 0};
    auto [g, x, y] = ext_gcd(b, a % b);
    return {g, y, x - (a / b) * y};
}

// Gauss composition of primitive forms of the same negative discriminant, then reduction.
inline QuadForm compose_forms(QuadForm f1, QuadForm f2)
{
    if (f1.a > f2.a) std::swap(f1, f2);
    const std::int64_t s = (f1.b + f2.b) / 2, n = f2.b - s;
    std::int64_t y1 = 0, d = f1.a;
    if (f2.a % f1.a != 0) {
        auto [g, u, v] = ext_gcd(f2.a, f1.a);
        d = g;
        y1 = u;
        (void)v;
    }
    std::int64_t x2 = 0, y2 = -1, d1 = d;
    if (s % d != 0) {
        auto [g, x, y] = ext_gcd(s, d);
        d1 = g;
        x2 = x;
        y2 = -y;
    }
    const std::int64_t v1 = f1.a / d1, v2 = f2.a / d1;
    std::int64_t r = static_cast<std::int64_t>(mod_floor(static_cast<std::int64_t>((static_cast<__int128>(y1) * y2 * n - static_cast<__int128>(x2) * f2.c) % v1), v1));
    QuadForm g{v1 * v2, f2.b + 2 * v2 * r, 0};
    g.c = (f2.c * d1 + r * (f2.b + v2 * r)) / v1;
    return reduce_form(g);
}

struct ClassGroupStructure {
    bigint order;
    AbelianStructure structure;
    std::map<std::uint64_t, AbelianStructure> parts;
};

inline std::vector<QuadForm> reduced_forms(std::int64_t D)
{
    std::vector<QuadForm> out;
    const std::int64_t aD = -D;
    for (std::int64_t a = 1; 3 * a * a <= aD; ++a)
        for (std::int64_t b = -a + 1; b <= a; ++b) {
            if ((b * b - D) % (4 * a) != 0) continue;
            std::int64_t c = (b * b - D) / (4 * a);
            if (c < a || (a == c && b < 0)) continue;
            if (std::gcd(std::gcd(a, std::llabs(b)), c) != 1) continue;
            out.push_back({a, b, c});
        }
    return out;
}

inline ClassGroupStructure nf_class_group(std::int64_t d, std::int64_t bound = 10000000)
{
    if (d > bound) throw CapacityError("d exceeds the configured bound");
    const std::int64_t D = fundamental_discriminant(d);
    auto forms = reduced_forms(D);
    const QuadForm id = reduce_form({1, D % 2 == 0 ? 0 : 1, D % 2 == 0 ? -D / 4 : (1 - D) / 4});
    ClassGroupStructure out;
    out.order = forms.size();
    const std::uint64_t h = forms.size();
    std::vector<std::uint64_t> cyc;
    for (auto p : prime_factors(h)) {
        const int e = valuation(h, p);
        std::vector<std::uint64_t> tors(e + 1, 0);
        for (const auto& f : forms) {
            // p-adic order of the p-part of f
            std::uint64_t co = h;
            while (co % p == 0) co /= p;
            QuadForm y = id, base = f;
            for (std::uint64_t k = co; k; k >>= 1) {
                if (k & 1) y = compose_forms(y, base);
                base = compose_forms(base, base);
            }
            int j = 0;
            while (!(y == id)) {
                QuadForm z = id;
                for (std::uint64_t t = 0; t < p; ++t) z = compose_forms(z, y);
                y = z;
                if (++j > e) throw InternalError("form order exceeds the class number");
            }
            for (int k = j; k <= e; ++k) ++tors[k];
        }
        auto logp = [&](std::uint64_t x) {
            int t = 0;
            while (x > 1) {
                x /= p;
                ++t;
            }
            return t;
        };
        std::vector<int> atleast(e + 2, 0);
        for (int k = 1; k <= e; ++k) atleast[k] = logp(tors[k] / tors[k - 1]);
        std::vector<std::uint64_t> pc;
        for (int k = 1; k <= e; ++k) {
            std::uint64_t pk = 1;
            for (int i = 0; i < k; ++i) pk *= p;
            for (int t = 0; t < atleast[k] - atleast[k + 1]; ++t) pc.push_back(pk);
        }
        out.parts[p] = abelian_from_cyclic(pc);
        cyc.insert(cyc.end(), pc.begin(), pc.end());
    }
    out.structure = abelian_from_cyclic(cyc);
    if (out.structure.order() != h) throw InternalError("class group structure does not match the class number");
    return out;
}

struct NfMomentReport {
    std::uint64_t fields = 0;
    bigint sum_sur = 0;
    double average = 0;
    rational prediction;
};

// Average #Sur(Cl(Q(sqrt -d)), H) over squarefree d <= bound.
inline NfMomentReport nf_moment(std::int64_t bound, const AbelianStructure& H)
{
    if (H.order() % 2 == 0) throw DomainError("H must have odd order");
    NfMomentReport r;
    for (std::int64_t d = 1; d <= bound; ++d) {
        bool sqf = true;
        for (std::int64_t p = 2; p * p <= d && sqf; ++p) sqf = d % (p * p) != 0;
        if (!sqf) continue;
        auto cl = nf_class_group(d, bound);
        r.sum_sur += count_abelian_surjections(cl.structure, H);
        ++r.fields;
    }
    r.average = r.fields ? r.sum_sur.convert_to<double>() / r.fields : 0.0;
    r.prediction = moment_prediction(abelian_with_inversion(H), 1, std::nullopt);
    return r;
}

} // namespace imcl
