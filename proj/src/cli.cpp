#include "geolab/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "geolab/charsums.hpp"
#include "geolab/sieve.hpp"
#include "geolab/thermo.hpp"

namespace geolab::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kSchema = 1;

struct IoError : Error {
    using Error::Error;
};
struct BoundViolation : Error {
    using Error::Error;
};

void write_file(const fs::path& p, const std::string& content) {
    std::error_code ec;
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot write " + p.string());
    f << content;
    if (!f) throw IoError("write failed for " + p.string());
}

std::optional<std::string> read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) return std::nullopt;
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Records parameters and content hashes; written last as manifest.json.
class Manifest {
public:
    explicit Manifest(std::string command) {
        j_["command"] = std::move(command);
        j_["params"] = json::object();
        j_["versions"] = {{"geolab", kVersion}, {"schema", kSchema}};
        j_["input_hashes"] = json::object();
        j_["output_hashes"] = json::object();
    }
    template <class T>
    void param(const std::string& k, const T& v) { j_["params"][k] = v; }
    void input(const std::string& name, const std::string& content) { j_["input_hashes"][name] = git_blob_sha1(content); }
    void output(const fs::path& dir, const std::string& name, const std::string& content) {
        write_file(dir / name, content);
        j_["output_hashes"][name] = git_blob_sha1(content);
    }
    void output_at(const fs::path& path, const std::string& content) {
        write_file(path, content);
        j_["output_hashes"][path.filename().string()] = git_blob_sha1(content);
    }
    void finish(const fs::path& dir) { write_file(dir / "manifest.json", j_.dump(2) + "\n"); }

private:
    json j_;
};

struct Common {
    std::string out = ".";
    std::string cache = ".geolab_cache";
    bool no_cache = false;
    int workers = 1;
    u64 seed = 1;
};

void add_common(CLI::App* c, Common& o) {
    c->add_option("--out", o.out, "Output directory")->capture_default_str();
    c->add_option("--cache-dir", o.cache, "Cache directory (GEODESIC_LAB_CACHE overrides)")->capture_default_str();
    c->add_flag("--no-cache", o.no_cache, "Do not read or write the cache");
    c->add_option("--workers", o.workers, "Worker threads")->check(CLI::Range(1, 256))->capture_default_str();
    c->add_option("--seed", o.seed, "Seed recorded in the sieve manifest; all commands are deterministic")->capture_default_str();
}

json structure_json(const TransitionMatrix& A) {
    const Structure st = check_irreducible_aperiodic(A);
    json j;
    j["irreducible"] = st.irreducible;
    j["aperiodic"] = st.irreducible && st.period == 1;
    j["period"] = st.period;
    if (st.primitivity_index) j["primitivity_index"] = *st.primitivity_index;
    else j["primitivity_index"] = nullptr;
    return j;
}

// ---- partition

struct PartitionArgs {
    double R = 4;
};

int cmd_partition(const PartitionArgs& a, const Common& c, std::ostream& out) {
    if (!(a.R >= 3)) throw DomainError("partition: radius must be >= 3");
    const fs::path dir(c.out);
    const Partition P = build_partition(a.R);
    const TransitionMatrix A = build_transitions(P);
    Manifest m("partition");
    m.param("radius", a.R);
    const std::string pj = P.to_json();
    m.output(dir, "partition.json", pj);
    m.output(dir, "transitions.csv", transitions_csv(A));
    json s;
    s["radius"] = a.R;
    s["parts"] = P.size();
    s["transitions"] = A.ones();
    const json st = structure_json(A);
    for (auto& [k, v] : st.items()) s[k] = v;
    m.output(dir, "summary.json", s.dump(2) + "\n");
    m.finish(dir);
    out << s.dump(2) << '\n';
    return ok;
}

// ---- delta

struct DeltaArgs {
    double R = 4, tol = 1e-4;
    int max_depth = 5;
    bool require_certified = false;
};

int cmd_delta(const DeltaArgs& a, const Common& c, std::ostream& out) {
    if (!(a.R >= 3)) throw DomainError("delta: radius must be >= 3");
    if (!(a.tol > 0)) throw DomainError("delta: tol must be positive");
    if (a.max_depth < 2 || a.max_depth > 6) throw DomainError("delta: max-depth must be in [2, 6]");
    const fs::path dir(c.out);
    const System sys = make_system(a.R);
    const auto levels = build_cylinder_levels(sys, a.max_depth);
    const DeltaResult d = solve_delta(levels, a.R, a.tol);

    std::ostringstream csv;
    csv << "R,s,n,lower,upper,center\n";
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back(1.0 + 0.1 * k);
    grid.push_back(d.delta);
    for (const auto& lv : levels)
        for (double s : grid) csv << pressure_csv_row(a.R, pressure(lv, s)) << '\n';

    json j;
    j["R"] = a.R;
    j["delta"] = d.delta;
    j["lo"] = d.lo;
    j["hi"] = d.hi;
    j["certified"] = d.certified;
    j["depth"] = d.depth;
    j["tol"] = a.tol;
    Manifest m("delta");
    m.param("radius", a.R);
    m.param("tol", a.tol);
    m.param("max_depth", a.max_depth);
    m.input("partition", sys.partition.to_json());
    m.output(dir, "delta.json", j.dump(2) + "\n");
    m.output(dir, "pressure.csv", csv.str());
    m.finish(dir);
    out << j.dump(2) << '\n';
    if (a.require_certified && !d.certified) throw CertificationError("delta: bracket wider than tol");
    return ok;
}

// ---- enumerate

std::vector<GeodesicClass> cached_enumeration(const System& sys, double X, const Common& c) {
    if (!(X >= 2 && X <= 64)) throw LimitError("ball X must be in [2, 64]");
    const std::string key =
        git_blob_sha1("enumerate\nR=" + format_real(sys.R) + "\nX=" + format_real(X) + "\naperiodic=1\nschema=" + std::to_string(kSchema) + "\n");
    const fs::path file = cache_dir(c.cache) / ("enum-" + key + ".csv");
    if (!c.no_cache)
        if (auto text = read_file(file)) return parse_geodesics_csv(sys, *text);
    auto classes = enumerate_ball(sys, X, true, c.workers);
    if (!c.no_cache) {
        try {
            write_file(file, geodesics_csv(classes));
        } catch (const IoError&) {
            // an unwritable cache only costs time
        }
    }
    return classes;
}

struct EnumerateArgs {
    double R = 4, X = 16;
    std::string mod, csv;
};

int cmd_enumerate(const EnumerateArgs& a, const Common& c, std::ostream& out) {
    if (!(a.R >= 3)) throw DomainError("enumerate: radius must be >= 3");
    const fs::path dir(c.out);
    const System sys = make_system(a.R);
    const auto classes = cached_enumeration(sys, a.X, c);
    Manifest m("enumerate");
    m.param("radius", a.R);
    m.param("ball", a.X);
    if (!a.mod.empty()) m.param("mod", a.mod);
    m.input("partition", sys.partition.to_json());
    const std::string text = geodesics_csv(classes);
    if (a.csv.empty()) m.output(dir, "geodesics.csv", text);
    else m.output_at(a.csv, text);

    json s;
    s["R"] = a.R;
    s["X"] = a.X;
    s["classes"] = classes.size();
    i64 sf = 0, fe = 0;
    for (const auto& g : classes) sf += g.squarefree_disc, fe += g.fundamental_eligible;
    s["squarefree"] = sf;
    s["fundamental_eligible"] = fe;
    s["collisions"] = matrix_collisions(classes);
    if (!a.mod.empty()) {
        const GaussianInt q = parse_gaussian(a.mod);
        if (q.is_zero() || q.is_unit()) throw DomainError("enumerate: modulus must be a nonzero non-unit");
        if (norm(q) > kMaxEnumNorm) throw LimitError("enumerate: modulus norm above " + std::to_string(kMaxEnumNorm));
        const auto r = equidist_stats(classes, q, a.X);
        m.output(dir, "equidist.csv", equidist_csv(a.R, r));
        i64 binned = 0;
        for (i64 k : r.counts) binned += k;
        s["equidist"] = {{"q", to_string(r.q)},           {"total", r.total},         {"binned", binned},
                         {"expected", r.expected},         {"max_rel_dev", r.max_rel_dev}, {"l2_dev", r.l2_dev},
                         {"classes_hit", r.classes_hit}, {"group_order", r.counts.size()}};
    }
    m.output(dir, "summary.json", s.dump(2) + "\n");
    m.finish(dir);
    out << s.dump(2) << '\n';
    return ok;
}

// ---- charsums

struct CharsumArgs {
    std::string mod, xi;
    bool all_xi = false;
};

Xi parse_xi(const std::string& s) {
    Xi x;
    std::stringstream ss(s);
    std::string tok;
    size_t k = 0;
    while (std::getline(ss, tok, ',')) {
        if (k == 4) throw DomainError("--xi takes exactly four entries");
        x[k++] = parse_gaussian(tok);
    }
    if (k != 4) throw DomainError("--xi takes exactly four entries");
    return x;
}

int cmd_charsums(const CharsumArgs& a, const Common& c, std::ostream& out) {
    const GaussianInt q0 = parse_gaussian(a.mod);
    if (q0.is_zero() || q0.is_unit()) throw DomainError("charsums: modulus must be a nonzero non-unit");
    if (norm(q0) > kMaxEnumNorm) throw LimitError("charsums: modulus norm above " + std::to_string(kMaxEnumNorm));
    if (!is_squarefree(q0)) throw DomainError("charsums: modulus must be square-free");
    if (a.all_xi == !a.xi.empty()) throw DomainError("charsums: give exactly one of --all-xi, --xi");
    const GaussianInt q = canonical_associate(q0);
    auto ring = std::make_shared<const ResidueRing>(q);
    const auto fac = factor(q).factors;

    std::vector<Xi> xis;
    if (a.all_xi) {
        const auto units = ring->units();
        const double n = std::pow(static_cast<double>(units.size()), 4) * static_cast<double>(ring->size());
        if (n > 2e7) throw LimitError("charsums: full scan too large for this modulus; use --xi");
        for (i64 x : units)
            for (i64 y : units)
                for (i64 z : units)
                    for (i64 w : units) xis.push_back({ring->rep(x), ring->rep(y), ring->rep(z), ring->rep(w)});
    } else {
        xis.push_back(parse_xi(a.xi));
    }

    std::vector<MarginRow> rows;
    i64 violations = 0;
    double worst = 0;
    for (const auto& chi : all_characters(ring)) {
        if (chi.trivial()) continue;
        // per prime factor: 2 N^(3/2) where chi is nontrivial, the group order where it is trivial
        double bound = 1;
        for (auto [p, e] : fac) {
            const bool triv = fac.size() > 1 && restrict_to_prime(chi, p).trivial();
            const double Np = static_cast<double>(norm(p));
            bound *= triv ? static_cast<double>(sl2_order_formula(p)) : 2 * std::pow(Np, 1.5);
        }
        for (const auto& x : xis) {
            MarginRow r;
            r.q = q;
            r.character_index = chi.multiplier;
            r.xi = x;
            r.abs_sum = std::abs(sl2_charsum_strata(chi, x));
            r.bound = bound;
            if (r.margin() < -1e-9 * bound) ++violations;
            worst = std::max(worst, r.abs_sum / bound);
            rows.push_back(r);
        }
    }
    const fs::path dir(c.out);
    Manifest m("charsums");
    m.param("mod", to_string(q));
    m.param("all_xi", a.all_xi);
    if (!a.xi.empty()) m.param("xi", a.xi);
    m.output(dir, "charsum_margins.csv", charsum_margins_csv(rows));
    json s = {{"q", to_string(q)}, {"rows", rows.size()}, {"violations", violations}, {"max_ratio", worst}};
    m.output(dir, "summary.json", s.dump(2) + "\n");
    m.finish(dir);
    out << s.dump(2) << '\n';
    if (violations) throw BoundViolation("charsums: " + std::to_string(violations) + " bound violations");
    return ok;
}

// ---- sieve

struct SieveArgs {
    double R = 4, X = 32, Y = 4, Z = 4;
    i64 level = 20;
};

int cmd_sieve(const SieveArgs& a, const Common& c, std::ostream& out) {
    if (a.level < 1 || a.level > kMaxEnumNorm) throw LimitError("sieve: level must be in [1, " + std::to_string(kMaxEnumNorm) + "]");
    if (!(a.X <= 64 && a.Y <= 16 && a.Z <= 16)) throw LimitError("sieve: X <= 64, Y <= 16, Z <= 16 at desk scale");
    const SiftingSet s = build_sifting_set(a.R, a.X, a.Y, a.Z);
    const SieveLedger l = sieve_ledger(s, a.level);
    const BallConstant bc = measure_ball_constant(s);

    const fs::path dir(c.out);
    Manifest m("sieve");
    m.param("R", a.R);
    m.param("X", a.X);
    m.param("Y", a.Y);
    m.param("Z", a.Z);
    m.param("Q", a.level);
    m.param("seed", c.seed);
    m.input("partition", build_partition(a.R).to_json());
    m.input("partition_8", build_partition(8).to_json());
    m.output(dir, "ledger.csv", ledger_csv(l));
    json j;
    j["xi"] = {{"size", s.xi.size()}, {"length", s.l_x}};
    j["aleph"] = {{"size", s.aleph.size()}};
    j["omega"] = {{"size", s.omega.size()}, {"length", s.l_z}};
    j["pi_size"] = s.size();
    j["N"] = s.N();
    j["moduli"] = l.rows.size();
    j["abs_remainder_sum"] = l.abs_remainder_sum;
    j["health"] = l.health();
    j["ball_constant"] = {{"C", bc.C}, {"glue_factor", bc.glue_factor}, {"C_reduced", bc.C_reduced()}, {"sampled", bc.sampled}};
    m.output(dir, "summary.json", j.dump(2) + "\n");
    m.finish(dir);
    out << j.dump(2) << '\n';
    return ok;
}

// ---- harvest

struct HarvestArgs {
    double R = 4, X = 32, eta = 0.01;
    double delta = -1;  // solved when negative
};

int cmd_harvest(const HarvestArgs& a, const Common& c, std::ostream& out) {
    if (!(a.R >= 4)) throw DomainError("harvest: radius must be >= 4");
    const System sys = make_system(a.R);
    const double delta = a.delta > 0 ? a.delta : solve_delta(sys, 1e-2, 4).delta;
    const auto classes = cached_enumeration(sys, a.X, c);
    const HarvestResult h = harvest(classes, a.R, a.X, delta, a.eta);

    const fs::path dir(c.out);
    Manifest m("harvest");
    m.param("radius", a.R);
    m.param("ball", a.X);
    m.param("delta", delta);
    m.param("eta", a.eta);
    m.input("partition", sys.partition.to_json());
    m.output(dir, "harvest.csv", harvest_csv(h));
    i64 maxM = 0;
    for (auto [t, M] : h.multiplicity) maxM = std::max(maxM, M);
    json j;
    j["R"] = a.R;
    j["X"] = a.X;
    j["classes"] = h.classes;
    j["traces"] = h.multiplicity.size();
    j["max_multiplicity"] = maxM;
    j["squarefree_traces"] = h.T.size();
    j["discriminants"] = h.D.size();
    j["above_threshold"] = h.above_threshold;
    j["delta"] = delta;
    m.output(dir, "summary.json", j.dump(2) + "\n");
    m.finish(dir);
    out << j.dump(2) << '\n';
    return ok;
}

// key=value lines become flags unless the flag is already on the command line.
std::vector<std::string> apply_config(std::vector<std::string> args) {
    auto it = std::find(args.begin(), args.end(), "--config");
    if (it == args.end()) return args;
    if (it + 1 == args.end()) throw DomainError("--config needs a path");
    const std::string path = *(it + 1);
    args.erase(it, it + 2);
    auto text = read_file(path);
    if (!text) throw DomainError("cannot read config " + path);
    std::istringstream is(*text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DomainError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw DomainError("config line " + std::to_string(lineno) + ": empty key");
        const std::string flag = (key.size() == 1 ? "-" : "--") + key;
        if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
        if (value == "true") args.push_back(flag);
        else if (value != "false") args.insert(args.end(), {flag, value});
    }
    return args;
}

}  // namespace

std::string git_blob_sha1(const std::string& content) {
    const std::string head = "blob " + std::to_string(content.size()) + std::string(1, '\0');
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) != 1 || EVP_DigestUpdate(ctx, head.data(), head.size()) != 1 ||
        EVP_DigestUpdate(ctx, content.data(), content.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha1 failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) s += hex[md[i] >> 4], s += hex[md[i] & 15];
    return s;
}

fs::path cache_dir(const std::string& fallback) {
    if (const char* env = std::getenv("GEODESIC_LAB_CACHE"); env && *env) return env;
    return fallback;
}

int run(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
    CLI::App app{"Closed geodesics, the Hurwitz subshift and the sieve at desk scale", "geolab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    app.add_option("--config", "Flat key=value file mirroring the flags");  // consumed before parsing

    Common common;
    PartitionArgs pa;
    auto* p = app.add_subcommand("partition", "Markov partition, transitions and structure summary");
    p->add_option("--radius", pa.R)->capture_default_str();
    add_common(p, common);

    DeltaArgs da;
    auto* d = app.add_subcommand("delta", "Solve the pressure equation for delta_R");
    d->add_option("--radius", da.R)->capture_default_str();
    d->add_option("--tol", da.tol)->capture_default_str();
    d->add_option("--max-depth", da.max_depth)->capture_default_str();
    d->add_flag("--require-certified", da.require_certified, "Exit 4 when the bracket is wider than tol");
    add_common(d, common);

    EnumerateArgs ea;
    auto* e = app.add_subcommand("enumerate", "Primitive closed geodesics in the norm ball");
    e->add_option("--radius", ea.R)->capture_default_str();
    e->add_option("--ball", ea.X)->capture_default_str();
    e->add_option("--mod", ea.mod, "Square-free Gaussian modulus for congruence statistics");
    e->add_option("--csv", ea.csv, "Path for geodesics.csv (default OUT/geodesics.csv)");
    add_common(e, common);

    CharsumArgs ca;
    auto* cs = app.add_subcommand("charsums", "SL2 dot-product character sums against 2 N^(3/2)");
    cs->add_option("--mod", ca.mod)->required();
    auto* all = cs->add_flag("--all-xi", ca.all_xi, "Every xi with unit entries");
    auto* one = cs->add_option("--xi", ca.xi, "a,b,c,d");
    all->excludes(one);
    add_common(cs, common);

    SieveArgs sa;
    auto* sv = app.add_subcommand("sieve", "Sifting set and congruence ledger");
    sv->add_option("--radius", sa.R)->capture_default_str();
    sv->add_option("-X", sa.X)->capture_default_str();
    sv->add_option("-Y", sa.Y)->capture_default_str();
    sv->add_option("-Z", sa.Z)->capture_default_str();
    sv->add_option("--level", sa.level)->capture_default_str();
    add_common(sv, common);

    HarvestArgs ha;
    auto* hv = app.add_subcommand("harvest", "Trace multiplicities and square-free discriminants");
    hv->add_option("--radius", ha.R)->capture_default_str();
    hv->add_option("--ball", ha.X)->capture_default_str();
    hv->add_option("--delta", ha.delta, "delta_R for the multiplicity threshold (solved when omitted)");
    hv->add_option("--eta", ha.eta)->capture_default_str();
    add_common(hv, common);

    try {
        auto args = apply_config(raw);
        std::vector<const char*> argv{"geolab"};
        for (const auto& s : args) argv.push_back(s.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? ok : usage;
    } catch (const Error& ex) {
        err << "error: " << ex.what() << '\n';
        return usage;
    }

    try {
        if (p->parsed()) return cmd_partition(pa, common, out);
        if (d->parsed()) return cmd_delta(da, common, out);
        if (e->parsed()) return cmd_enumerate(ea, common, out);
        if (cs->parsed()) return cmd_charsums(ca, common, out);
        if (sv->parsed()) return cmd_sieve(sa, common, out);
        if (hv->parsed()) return cmd_harvest(ha, common, out);
    } catch (const BoundViolation& ex) {
        err << "violation: " << ex.what() << '\n';
        return violation;
    } catch (const CertificationError& ex) {
        err << "certification failure: " << ex.what() << '\n';
        return certification;
    } catch (const DomainError& ex) {
        err << "usage: " << ex.what() << '\n';
        return usage;
    } catch (const LimitError& ex) {
        err << "over limit: " << ex.what() << '\n';
        return usage;
    } catch (const IoError& ex) {
        err << "io: " << ex.what() << '\n';
        return usage;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return failure;
    }
    return usage;
}

}  // namespace geolab::cli
