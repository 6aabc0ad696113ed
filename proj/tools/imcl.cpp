// imcl: command-line driver for the Hurwitz, Frobenius, random-group and arithmetic pipelines.

#include "imcl/arith.hpp"
#include "imcl/catalog.hpp"
#include "imcl/frob.hpp"
#include "imcl/hurwitz.hpp"
#include "imcl/randgrp.hpp"
#include "imcl/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>

using json = nlohmann::ordered_json;
using namespace imcl;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr const char* kSchema = "imcl-report/1";

// ------------------------------------------------------------------ configuration

struct KeySpec {
    const char* key;
    const char* flag;
    const char* help;
};

// Every key any command understands; each command accepts a subset.
const std::vector<KeySpec> kKeys = {
    {"experiment", "", "experiment kind; must match the subcommand when present"},
    {"seed", "--seed", "random seed (required by randomized commands)"},
    {"group.name", "--group", "group: Cn, Dn, Sn, An, Dicn, Q8, Pauli, products AxB, or sd:<H> for H x| Gamma"},
    {"group.c", "--c", "c: all | involutions | order:k | c_G | list of elements separated by ';'"},
    {"group.ginf", "--ginf", "generator of G_inf: cycle notation for permutation groups, else an element index"},
    {"params.n", "--n", "number of branch points / generators"},
    {"params.M", "--M", "multiplicity floor M"},
    {"params.q", "--q", "prime power q, or 'inf' where allowed"},
    {"params.H", "--H", "target: inv:m[,k] | scalar:m,k,d,u | swap:m | trivial:d; arith takes cyclic orders like 5 or 3,3"},
    {"params.gamma_inf", "--gamma-inf", "generator of Gamma_inf as an element index of Gamma"},
    {"params.variety_exponent", "--exponent", "exponent N of the abelian variety"},
    {"params.gamma_order", "--gamma-order", "order d of the cyclic Gamma"},
    {"params.trials", "--trials", "Monte Carlo trials"},
    {"params.dmin", "--dmin", "smallest odd degree"},
    {"params.dmax", "--dmax", "largest odd degree"},
    {"params.weight", "--weight", "none | gerth"},
    {"params.sample_floor", "--sample-floor", "fields needed before a verdict is printed"},
    {"params.cache", "--cache", "curve cache file (q;f;L lines)"},
    {"params.bound", "--bound", "largest d for Q(sqrt -d)"},
    {"params.workers", "--workers", "worker count (execution is single-threaded and deterministic)"},
    {"output.path", "--out", "write the report here instead of stdout"},
    {"output.format", "--format", "json | csv (default: from the --out extension, else json)"},
};

using Config = std::map<std::string, std::string>;

void flatten(const nlohmann::json& j, const std::string& prefix, Config& out)
{
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        std::string s;
        for (const auto& e : j) s += (s.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
        out[prefix] = s;
    } else if (j.is_string()) {
        out[prefix] = j.get<std::string>();
    } else {
        out[prefix] = j.dump();
    }
}

std::string trim(const std::string& s)
{
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// key = value lines with [section] headers and # comments, or JSON when the file starts with '{'.
Config parse_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    Config out;
    if (trim(text).rfind('{', 0) == 0) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const std::exception& e) {
            throw ValidationError(std::string("malformed JSON config: ") + e.what());
        }
        flatten(j, "", out);
        return out;
    }
    std::string section, line;
    std::size_t lineno = 0;
    std::istringstream ls(text);
    while (std::getline(ls, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError("config line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
        out[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
    }
    return out;
}

class Params {
public:
    Params(std::string command, Config cfg, const std::vector<std::string>& allowed) : command_(std::move(command)), cfg_(std::move(cfg))
    {
        std::set<std::string> ok(allowed.begin(), allowed.end());
        ok.insert({"experiment", "output.path", "output.format", "params.workers"});
        for (const auto& [k, v] : cfg_)
            if (!ok.count(k)) throw ValidationError("unknown config key '" + k + "' for " + command_);
        if (cfg_.count("experiment") && cfg_["experiment"] != command_)
            throw ValidationError("config experiment '" + cfg_["experiment"] + "' does not match command '" + command_ + "'");
        if (cfg_.count("params.workers") && get_u64("params.workers", 1) < 1) throw ValidationError("workers must be at least 1");
    }

    bool has(const std::string& k) const { return cfg_.count(k) > 0; }
    std::string str(const std::string& k) const
    {
        auto it = cfg_.find(k);
        if (it == cfg_.end()) throw ValidationError("missing required parameter '" + k + "'");
        return it->second;
    }
    std::string str(const std::string& k, const std::string& def) const { return has(k) ? str(k) : def; }
    std::uint64_t get_u64(const std::string& k) const
    {
        const std::string s = str(k);
        try {
            std::size_t pos = 0;
            if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
            auto v = std::stoull(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ValidationError("parameter '" + k + "' must be a nonnegative integer, got '" + s + "'");
        }
    }
    std::uint64_t get_u64(const std::string& k, std::uint64_t def) const { return has(k) ? get_u64(k) : def; }
    const Config& all() const { return cfg_; }
    const std::string& command() const { return command_; }

private:
    std::string command_;
    Config cfg_;
};

// ------------------------------------------------------------------ input parsing

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string t;
    while (std::getline(ss, t, sep)) out.push_back(trim(t));
    return out;
}

std::vector<std::uint32_t> parse_uints(const std::string& s, const std::string& what)
{
    std::vector<std::uint32_t> v;
    for (const auto& t : split(s, ',')) {
        if (t.empty() || !std::all_of(t.begin(), t.end(), ::isdigit)) throw ValidationError(what + ": expected integers, got '" + s + "'");
        v.push_back(static_cast<std::uint32_t>(std::stoul(t)));
    }
    return v;
}

GammaGroup parse_gamma_group(const std::string& spec)
{
    auto colon = spec.find(':');
    if (colon == std::string::npos) throw ValidationError("H spec needs a kind prefix: " + spec);
    std::string kind = spec.substr(0, colon);
    auto a = parse_uints(spec.substr(colon + 1), "H spec");
    if (kind == "inv" && (a.size() == 1 || a.size() == 2)) return inversion_action(a[0], a.size() == 2 ? a[1] : 1);
    if (kind == "scalar" && a.size() == 4) return scalar_action(a[0], a[1], a[2], a[3]);
    if (kind == "swap" && a.size() == 1) return swap_action(a[0]);
    if (kind == "trivial" && a.size() == 1) return randgrp_detail::trivial_gamma_group(cyclic_group(a[0]));
    throw ValidationError("unrecognized H spec: " + spec);
}

struct GroupInput {
    NamedGroup named;
    std::optional<BridgeResult> bridge; // for sd:<H>
};

GroupInput parse_group(const Params& P)
{
    GroupInput g;
    std::string name = P.str("group.name");
    if (name.rfind("sd:", 0) == 0) {
        auto H = parse_gamma_group(name.substr(3));
        elem gi = static_cast<elem>(P.get_u64("params.gamma_inf", 1));
        if (gi >= H.gamma.order()) throw ValidationError("gamma_inf out of range");
        g.bridge = sur_hur_bridge(H, gi);
        g.named.group = g.bridge->G.group;
    } else {
        g.named = group_by_name(name);
    }
    return g;
}

elem parse_element(const GroupInput& g, const std::string& s)
{
    const auto& G = g.named.group;
    if (!s.empty() && s[0] == '(') {
        if (g.named.degree == 0) throw ValidationError("cycle notation needs a permutation group");
        auto p = parse_cycles(s, g.named.degree);
        auto it = std::lower_bound(g.named.perms.begin() + 1, g.named.perms.end(), p);
        if (g.named.perms[0] == p) return 0;
        if (it == g.named.perms.end() || *it != p) throw ValidationError("permutation " + s + " is not in the group");
        return static_cast<elem>(it - g.named.perms.begin());
    }
    if (s.empty() || !std::all_of(s.begin(), s.end(), ::isdigit)) throw ValidationError("bad element '" + s + "'");
    auto x = std::stoul(s);
    if (x >= G.order()) throw ValidationError("element index " + s + " out of range");
    return static_cast<elem>(x);
}

std::vector<elem> parse_c(const GroupInput& g, const std::string& spec)
{
    const auto& G = g.named.group;
    std::vector<elem> c;
    if (spec == "all") {
        for (elem x = 1; x < G.order(); ++x) c.push_back(x);
    } else if (spec == "involutions") {
        for (elem x = 1; x < G.order(); ++x)
            if (G.elem_order(x) == 2) c.push_back(x);
    } else if (spec.rfind("order:", 0) == 0) {
        auto k = parse_uints(spec.substr(6), "c spec");
        for (elem x = 1; x < G.order(); ++x)
            if (G.elem_order(x) == k.at(0)) c.push_back(x);
    } else if (spec == "c_G") {
        if (!g.bridge) throw ValidationError("c = c_G needs group sd:<H>");
        c = g.bridge->c_G;
    } else {
        std::set<elem> closed;
        for (const auto& t : split(spec, ';'))
            for (elem h = 0; h < G.order(); ++h) closed.insert(G.conj(h, parse_element(g, t)));
        c.assign(closed.begin(), closed.end());
    }
    if (c.empty()) throw ValidationError("c is empty");
    return c;
}

elem parse_ginf(const GroupInput& g, const Params& P)
{
    if (!P.has("group.ginf") && g.bridge) {
        for (elem x : g.bridge->G_inf)
            if (x) return x;
    }
    return parse_element(g, P.str("group.ginf"));
}

AbelianStructure parse_abelian(const std::string& s)
{
    std::vector<std::uint64_t> v;
    for (auto x : parse_uints(s, "H")) v.push_back(x);
    return abelian_from_cyclic(v);
}

std::uint64_t require_seed(const Params& P)
{
    if (!P.has("seed")) throw ValidationError("randomized commands require an explicit seed");
    return P.get_u64("seed");
}

std::string hex64(std::uint64_t x)
{
    std::ostringstream o;
    o << std::hex << std::setw(16) << std::setfill('0') << x;
    return o.str();
}

json ints(const std::vector<std::int64_t>& v) { return json(v); }

// ------------------------------------------------------------------ reports

struct Output {
    json results = json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::string csv_override; // used verbatim when set
};

std::string to_csv(const Output& o)
{
    if (!o.csv_override.empty()) return o.csv_override;
    std::ostringstream s;
    for (std::size_t i = 0; i < o.columns.size(); ++i) s << (i ? "," : "") << o.columns[i];
    s << '\n';
    for (const auto& r : o.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) s << (i ? "," : "") << r[i];
        s << '\n';
    }
    return s.str();
}

void emit(const Params& P, Output o, double seconds, bool timing)
{
    std::string format = P.str("output.format", "");
    const std::string path = P.str("output.path", "");
    if (format.empty()) format = (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") ? "csv" : "json";
    if (format != "json" && format != "csv") throw ValidationError("format must be json or csv");
    std::string body;
    if (format == "csv") {
        body = to_csv(o);
    } else {
        json rows = json::array();
        for (const auto& r : o.rows) {
            json row = json::object();
            for (std::size_t i = 0; i < o.columns.size(); ++i) row[o.columns[i]] = r[i];
            rows.push_back(row);
        }
        json rep;
        rep["schema"] = kSchema;
        rep["version"] = kVersion;
        rep["command"] = P.command();
        json cfg = json::object();
        for (const auto& [k, v] : P.all())
            if (k != "output.path") cfg[k] = v; // destination does not affect results
        rep["config"] = cfg;
        rep["results"] = o.results;
        rep["rows"] = rows;
        rep["fingerprint"] = hex64(fnv1a(o.results.dump() + rows.dump()));
        if (timing) rep["wall_clock_s"] = seconds;
        body = rep.dump(2) + "\n";
    }
    if (path.empty()) {
        std::cout << body;
    } else {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ValidationError("cannot write " + path);
        out << body;
    }
}

// ------------------------------------------------------------------ commands

Output cmd_orbits(const Params& P)
{
    auto g = parse_group(P);
    auto c = parse_c(g, P.str("group.c"));
    elem ginf = parse_ginf(g, P);
    auto n = P.get_u64("params.n");
    if (n < 2) throw ValidationError("n must be at least 2");
    // fail on capacity before building the cover
    if (estimate_tuple_count(g.named.group, c.size(), n) * HurwitzLimits::bytes_per_tuple > double(HurwitzLimits{}.memory_bytes))
        throw CapacityError("tuple count estimate exceeds the memory budget");
    auto ctx = UContext::build(g.named.group, c);
    auto orb = orbits(ctx.G, ctx.c, ginf, n, &ctx);
    Output o;
    std::string sizes;
    for (const auto& b : orb.orbits) sizes += (sizes.empty() ? "" : ";") + std::to_string(b.size);
    o.results["summary"] = "orbits=" + std::to_string(orb.orbits.size()) + ", size=" + sizes;
    o.results["tuple_count"] = orb.tuple_count;
    o.results["orbit_count"] = orb.orbits.size();
    o.results["invariant_constant"] = orb.invariant_constant;
    o.results["H2_c"] = ctx.h2c().str();
    std::ostringstream csv;
    write_orbits_csv(csv, ctx, orb);
    o.csv_override = csv.str();
    o.columns = {"g_inf", "representative", "size", "h", "v", "shape"};
    auto lines = split(csv.str(), '\n');
    for (std::size_t i = 1; i < lines.size(); ++i)
        if (!lines[i].empty()) o.rows.push_back(split(lines[i], ','));
    if (!orb.invariant_constant) throw InternalError("lifting invariant is not constant on a braid orbit");
    return o;
}

Output cmd_invariants(const Params& P)
{
    auto g = parse_group(P);
    auto c = parse_c(g, P.str("group.c"));
    elem ginf = parse_ginf(g, P);
    auto n = P.get_u64("params.n");
    auto M = static_cast<std::int64_t>(P.get_u64("params.M", 1));
    auto ctx = UContext::build(g.named.group, c);
    auto rep = stable_bijection_report(ctx, ginf, n, M);
    Output o;
    o.results["H2_c"] = ctx.h2c().str();
    o.results["classes"] = ctx.num_classes();
    o.results["stable_range"] = n >= 2 * ctx.num_classes() * static_cast<std::size_t>(M) + 2;
    o.results["bijective"] = rep.bijective();
    o.columns = {"g_inf", "orbits", "k_count", "collisions", "missing", "bijective"};
    for (const auto& pg : rep.per_generator)
        o.rows.push_back({std::to_string(pg.g_inf), std::to_string(pg.orbit_count), std::to_string(pg.k_count),
                          std::to_string(pg.collisions.size()), std::to_string(pg.missing.size()), pg.bijective() ? "true" : "false"});
    return o;
}

Output cmd_frob_count(const Params& P)
{
    auto g = parse_group(P);
    auto c = parse_c(g, P.str("group.c"));
    elem ginf = parse_ginf(g, P);
    auto q = P.get_u64("params.q");
    auto n = P.get_u64("params.n");
    auto M = static_cast<std::int64_t>(P.get_u64("params.M", 0));
    check_frobenius_params(g.named.group, ginf, q);
    auto ctx = UContext::build(g.named.group, c);
    auto fc = fixed_counts(ctx, ginf, q, n, M);
    auto pred = predicted_hur_count(ctx, ginf, q, n);
    Output o;
    o.results["b"] = fc.b;
    o.results["b_brute_force"] = fc.brute;
    o.results["d"] = fc.d;
    o.results["period"] = Frobenius(ctx, q).period();
    o.results["pi"] = pred.pi.str();
    o.results["main_term"] = pred.main_term.str();
    o.results["error_term"] = pred.error_term;
    o.columns = {"h", "fixed"};
    for (const auto& [h, k] : fc.by_h) o.rows.push_back({join_ints(h), std::to_string(k)});
    return o;
}

Output cmd_predict_moment(const Params& P)
{
    auto H = parse_gamma_group(P.str("params.H"));
    elem gi = static_cast<elem>(P.get_u64("params.gamma_inf", 1));
    if (gi >= H.gamma.order()) throw ValidationError("gamma_inf out of range");
    std::optional<std::uint64_t> q;
    std::string qs = P.str("params.q", "inf");
    if (qs != "inf") q = P.get_u64("params.q");
    auto pred = moment_prediction(H, gi, q);
    auto br = sur_hur_bridge(H, gi);
    Output o;
    o.results["prediction"] = to_string(pred);
    o.results["prediction_q_infinity"] = to_string(moment_prediction(H, gi, std::nullopt));
    o.results["invariant_index"] = to_string(invariant_index(H, gi));
    if (q) o.results["roots_of_unity_factor"] = roots_of_unity_factor(H, *q);
    o.results["moment_mu"] = to_string(moment_mu(H, gi));
    o.results["bridge_factor"] = to_string(br.factor);
    o.results["c_G_size"] = br.c_G.size();
    return o;
}

Output cmd_randgrp(const std::string& sub, const Params& P)
{
    auto N = static_cast<std::uint32_t>(P.get_u64("params.variety_exponent", 3));
    auto d = static_cast<std::uint32_t>(P.get_u64("params.gamma_order", 2));
    auto V = abelian_variety(N, d);
    elem gi = static_cast<elem>(P.get_u64("params.gamma_inf", 1));
    if (gi >= d) throw ValidationError("gamma_inf out of range");
    auto n = P.get_u64("params.n");
    Output o;
    if (sub == "moment") {
        auto H = parse_gamma_group(P.str("params.H"));
        o.results["moment_n"] = to_string(moment_n(H, n, gi));
        o.results["moment_n_decimal"] = moment_n(H, n, gi).convert_to<double>();
        o.results["moment_limit"] = to_string(moment_mu(H, gi));
        return o;
    }
    auto F = free_admissible(n, V);
    o.results["free_order"] = F.group.base.order();
    if (sub == "measure") {
        auto H = parse_gamma_group(P.str("params.H"));
        auto mr = mu_n_detail(F, H, gi);
        o.results["mu_n"] = to_string(mr.value);
        o.results["mu_n_decimal"] = mr.value.convert_to<double>();
        o.results["moment_n"] = to_string(moment_n(H, n, gi));
        return o;
    }
    // sample
    const std::uint64_t seed = require_seed(P);
    const std::uint64_t trials = P.get_u64("params.trials");
    auto mc = monte_carlo(F, gi, trials, seed);
    o.results["trials"] = trials;
    o.results["seed"] = seed;
    o.results["classes"] = mc.classes.size();
    o.columns = {"class", "order", "count", "probability", "se", "mu_n"};
    std::ostringstream fmt;
    for (std::size_t i = 0; i < mc.classes.size(); ++i) {
        const auto& X = mc.classes.rep(i);
        auto e = mc.probability(X);
        std::ostringstream p, s;
        p << std::setprecision(10) << e.mean;
        s << std::setprecision(10) << e.se;
        o.rows.push_back({mc.classes.label(i), std::to_string(X.base.order()), std::to_string(i < mc.counts.size() ? mc.counts[i] : 0), p.str(), s.str(),
                          to_string(mu_n(F, X, gi))});
    }
    return o;
}

Output cmd_ff_moment(const Params& P)
{
    MomentOptions opt;
    auto q = static_cast<std::uint32_t>(P.get_u64("params.q"));
    opt.d_min = static_cast<std::uint32_t>(P.get_u64("params.dmin", 3));
    opt.d_max = static_cast<std::uint32_t>(P.get_u64("params.dmax"));
    if (opt.d_min % 2 == 0 || opt.d_max % 2 == 0 || opt.d_min > opt.d_max)
        throw ValidationError("dmin and dmax must be odd with dmin <= dmax");
    opt.seed = require_seed(P);
    opt.sample_floor = P.get_u64("params.sample_floor", opt.sample_floor);
    std::string w = P.str("params.weight", "none");
    if (w == "gerth") opt.weight = MomentWeight::gerth;
    else if (w != "none") throw ValidationError("weight must be none or gerth");
    auto H = parse_abelian(P.str("params.H"));
    CurveCache cache;
    std::string cache_path = P.str("params.cache", "");
    if (!cache_path.empty()) {
        cache.load(cache_path);
        opt.cache = &cache;
    }
    auto rep = empirical_moment(q, H, opt);
    if (!cache_path.empty()) cache.save(cache_path);
    Output o;
    o.csv_override = rep.csv();
    o.columns = {"degree", "fields", "sum_sur", "running_average", "prediction", "se"};
    auto lines = split(rep.csv(), '\n');
    for (std::size_t i = 1; i < lines.size(); ++i)
        if (!lines[i].empty()) o.rows.push_back(split(lines[i], ','));
    o.results["H"] = H.str();
    o.results["prediction"] = to_string(rep.prediction);
    o.results["average"] = rep.average;
    o.results["gap"] = rep.gap;
    o.results["fields"] = rep.total_fields;
    o.results["inconclusive"] = rep.total_inconclusive;
    o.results["verdict"] = rep.verdict;
    return o;
}

Output cmd_nf_moment(const Params& P)
{
    auto bound = static_cast<std::int64_t>(P.get_u64("params.bound"));
    auto H = parse_abelian(P.str("params.H"));
    auto r = nf_moment(bound, H);
    Output o;
    o.results["fields"] = r.fields;
    o.results["sum_sur"] = r.sum_sur.str();
    o.results["average"] = r.average;
    o.results["prediction"] = to_string(r.prediction);
    return o;
}

// ------------------------------------------------------------------ main

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const CapacityError*>(&e)) return 2;
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const DomainError*>(&e)) return 3;
    return 4;
}

struct Command {
    std::string name;
    std::vector<std::string> keys;
    std::function<Output(const Params&)> run;
    std::string help;
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"imcl: Hurwitz orbits, lifting invariants, Frobenius counts, random Gamma-groups and class-group moments"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    const std::vector<std::string> grp = {"group.name", "group.c", "group.ginf", "params.gamma_inf"};
    auto with = [](std::vector<std::string> a, std::initializer_list<std::string> b) {
        a.insert(a.end(), b);
        return a;
    };
    std::vector<Command> commands = {
        {"orbits", with(grp, {"params.n"}), cmd_orbits, "braid orbits on Nielsen tuples with their lifting invariants"},
        {"invariants", with(grp, {"params.n", "params.M"}), cmd_invariants, "compare orbit invariants with K_{n,>=M} in U(G,c)"},
        {"frob-count", with(grp, {"params.n", "params.q", "params.M"}), cmd_frob_count, "Frobenius-fixed components and the predicted Hurwitz count"},
        {"predict-moment", {"params.H", "params.gamma_inf", "params.q"}, cmd_predict_moment, "predicted moment for H x| Gamma at q or in the limit"},
        {"randgrp sample", {"params.variety_exponent", "params.gamma_order", "params.gamma_inf", "params.n", "params.trials", "seed"},
         [](const Params& P) { return cmd_randgrp("sample", P); }, "Monte Carlo sampling of random Gamma-group quotients"},
        {"randgrp measure", {"params.variety_exponent", "params.gamma_order", "params.gamma_inf", "params.n", "params.H"},
         [](const Params& P) { return cmd_randgrp("measure", P); }, "limiting probability mu_n of a Gamma-group"},
        {"randgrp moment", {"params.variety_exponent", "params.gamma_order", "params.gamma_inf", "params.n", "params.H"},
         [](const Params& P) { return cmd_randgrp("moment", P); }, "surjection moment of the free admissible object"},
        {"arith ff-moment", {"params.q", "params.dmin", "params.dmax", "params.H", "params.weight", "params.sample_floor", "params.cache", "seed"},
         cmd_ff_moment, "class-group moments over imaginary quadratic function fields"},
        {"arith nf-moment", {"params.bound", "params.H"}, cmd_nf_moment, "class-group moments over imaginary quadratic number fields"},
    };

    struct Bound {
        CLI::App* app;
        const Command* cmd;
        std::map<std::string, std::string> flags;
        std::string config;
        bool timing = false;
    };
    std::vector<std::unique_ptr<Bound>> bound;
    CLI::App* randgrp = app.add_subcommand("randgrp", "random Gamma-group pipelines");
    CLI::App* arith = app.add_subcommand("arith", "class-group moment pipelines");
    randgrp->require_subcommand(1);
    arith->require_subcommand(1);

    for (const auto& cmd : commands) {
        auto b = std::make_unique<Bound>();
        b->cmd = &cmd;
        auto sp = cmd.name.find(' ');
        CLI::App* parent = &app;
        std::string leaf = cmd.name;
        if (sp != std::string::npos) {
            parent = cmd.name.substr(0, sp) == "randgrp" ? randgrp : arith;
            leaf = cmd.name.substr(sp + 1);
        }
        b->app = parent->add_subcommand(leaf, cmd.help);
        b->app->add_option("--config", b->config, "config file (key = value with [sections], or JSON)");
        b->app->add_flag("--timing", b->timing, "add wall-clock seconds to the JSON report (breaks byte identity)");
        std::vector<std::string> keys = cmd.keys;
        keys.insert(keys.end(), {"output.path", "output.format", "params.workers"});
        for (const auto& k : keys) {
            auto it = std::find_if(kKeys.begin(), kKeys.end(), [&](const KeySpec& s) { return k == s.key; });
            if (it == kKeys.end() || !*it->flag) continue;
            b->app->add_option(it->flag, b->flags[k], it->help);
        }
        bound.push_back(std::move(b));
    }

    std::string suite;
    bool quick = false, detail = false;
    auto* verify_app = app.add_subcommand("verify", "run an acceptance suite: all, a suite name, or a criterion number");
    verify_app->add_option("suite", suite, "suite name")->required();
    verify_app->add_flag("--quick", quick, "reduced sizes");
    verify_app->add_flag("--detail", detail, "print every check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    try {
        if (verify_app->parsed()) {
            bool ok = verify::run(suite, quick, std::cout, detail ? &std::cout : nullptr);
            return ok ? 0 : 4;
        }
        for (const auto& b : bound) {
            if (!b->app->parsed()) continue;
            Config cfg;
            if (!b->config.empty()) cfg = parse_config(b->config);
            for (const auto& [k, v] : b->flags)
                if (b->app->count(std::find_if(kKeys.begin(), kKeys.end(), [&](const KeySpec& s) { return k == s.key; })->flag)) cfg[k] = v;
            auto t0 = std::chrono::steady_clock::now();
            Params P(b->cmd->name, cfg, b->cmd->keys);
            Output out = b->cmd->run(P);
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            emit(P, std::move(out), secs, b->timing);
            return 0;
        }
        throw ValidationError("no command given");
    } catch (const std::exception& e) {
        int code = exit_code_for(e);
        std::cerr << "imcl: " << (code == 2 ? "capacity" : code == 3 ? "invalid input" : "internal error") << ": " << e.what() << '\n';
        return code;
    }
}
