#include "germlin/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "germlin/hopf.hpp"
#include "germlin/majorant.hpp"
#include "germlin/parallel.hpp"
#include "germlin/toroidal.hpp"

namespace germlin::cli {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kFileKeys = {"spec", "bundle", "decks", "perturbation"};

bool is_file_key(const std::string& k) {
    return kFileKeys.count(k) || (k.size() > 5 && k.compare(k.size() - 5, 5, "_file") == 0);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tuple_text(const std::vector<int>& xs) {
    std::string s = "(";
    for (size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
    return s + ")";
}

// Typed access to config values; every lookup is remembered for the unused-key check.
class Params {
public:
    explicit Params(const RunConfig& c) : cfg_(c) {}

    bool has(const std::string& k) const {
        used_.insert(k);
        return cfg_.params.count(k) || cfg_.inputs.count(k);
    }
    std::string str(const std::string& k, const std::string& def) const {
        used_.insert(k);
        auto it = cfg_.params.find(k);
        return it == cfg_.params.end() ? def : it->second;
    }
    std::string required(const std::string& k) const {
        used_.insert(k);
        auto it = cfg_.params.find(k);
        if (it == cfg_.params.end()) throw InputError("missing config key '" + k + "'");
        return it->second;
    }
    int bound(const std::string& k, int def) const {
        const std::string s = str(k, std::to_string(def));
        int v = 0;
        try {
            size_t used = 0;
            v = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
        } catch (const std::exception&) {
            throw InputError("'" + k + "' must be an integer: " + s);
        }
        if (v < 1) throw InputError("'" + k + "' must be positive");
        return v;
    }
    double real(const std::string& k, const std::string& def) const {
        try {
            return parse_double(str(k, def));
        } catch (const std::invalid_argument& e) {
            throw InputError("'" + k + "': " + e.what());
        }
    }
    mpq_class rational(const std::string& k, const std::string& def) const {
        try {
            return parse_rational(str(k, def));
        } catch (const std::invalid_argument& e) {
            throw InputError("'" + k + "': " + e.what());
        }
    }
    bool flag(const std::string& k, bool def) const {
        const std::string s = str(k, def ? "true" : "false");
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw InputError("'" + k + "' must be true or false");
    }
    std::string choice(const std::string& k, const std::string& def, std::initializer_list<const char*> allowed) const {
        const std::string s = str(k, def);
        for (const char* a : allowed)
            if (s == a) return s;
        throw InputError("'" + k + "' has unsupported value " + s);
    }
    json file_json(const std::string& k) const {
        used_.insert(k);
        auto it = cfg_.inputs.find(k);
        if (it == cfg_.inputs.end()) throw InputError("missing input file '" + k + "'");
        try {
            return json::parse(read_file(it->second));
        } catch (const json::parse_error& e) {
            throw InputError("malformed JSON in " + it->second + ": " + e.what());
        }
    }
    std::vector<std::string> unused() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : cfg_.params)
            if (!used_.count(k)) out.push_back(k);
        for (const auto& [k, v] : cfg_.inputs)
            if (!used_.count(k)) out.push_back(k);
        return out;
    }

private:
    const RunConfig& cfg_;
    mutable std::set<std::string> used_;
};

// "re" or "re,im"
template <class C>
C config_scalar(const std::string& s) {
    auto parts = split(s, ',');
    if (parts.size() == 1) return scalar_traits<C>::parse(parts[0], "0");
    if (parts.size() == 2) return scalar_traits<C>::parse(parts[0], parts[1]);
    throw InputError("complex value needs re or re,im: " + s);
}

std::vector<double> real_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    for (const auto& p : split(s, ',')) {
        try {
            out.push_back(parse_double(p));
        } catch (const std::invalid_argument& e) {
            throw InputError("'" + key + "': " + e.what());
        }
    }
    return out;
}

class Report {
public:
    json stages = json::object();
    json checks = json::array();
    bool failed = false;

    void check(const std::string& name, bool pass, const std::string& detail) {
        checks.push_back(json{{"name", name}, {"status", pass ? "pass" : "fail"}, {"detail", detail}});
        failed = failed || !pass;
    }
    void info(const std::string& name, const std::string& detail) {
        checks.push_back(json{{"name", name}, {"status", "info"}, {"detail", detail}});
    }
};

std::string witness_text(const DivisorWitness& w) {
    return key_string(Key{w.P, w.Q}) + ", target " + target_name(w.target) + "_" + std::to_string(w.idx + 1) +
           ", deck " + std::to_string(w.l + 1);
}

// ---- toroidal-validate

void cmd_toroidal(const Params& p, Report& r) {
    const ToroidalSpec spec = toroidal_spec_from_json(p.file_json("spec"));
    const int H = p.bound("height_bound", 8);
    const auto irr = validate_irrationality(spec, H);
    r.stages["irrationality"] = json{{"pass", irr.pass}, {"bound", irr.bound}, {"witness", irr.witness}};
    if (irr.pass)
        r.check("irrationality", true, "no integral relation with height <= " + std::to_string(H));
    else
        r.check("irrationality", false, "integral relation s=" + tuple_text(irr.witness));
    const LatticeBasis basis = shear_to_standard(spec);
    json gp = json::array();
    for (const auto& col : basis.gamma_prime) {
        json c = json::array();
        for (const auto& z : col) c.push_back(json::array({format_double(z.real()), format_double(z.imag())}));
        gp.push_back(c);
    }
    r.stages["gamma_prime"] = gp;
    if (p.has("epsilon")) {
        DomainSpec dom;
        dom.epsilon = p.real("epsilon", "0.1");
        dom.Rcap = p.real("Rcap", "1");
        const double eta = convex_extension_eta(spec, dom);
        r.stages["eta"] = format_double(eta);
        r.info("eta", format_double(eta));
    }
}

// ---- scans and linearization

ScanMode scan_mode_of(LinMode m) { return m == LinMode::Vertical ? ScanMode::Vertical : ScanMode::Full; }

// Returns false (and records the failure) when the scan finds a resonance.
bool record_scan(const DiophantineReport& rep, Report& r) {
    r.stages["scan"] = diophantine_report_json(rep);
    if (rep.resonant()) {
        r.check("diophantine", false, "resonance at " + witness_text(rep.resonances[0]));
        return false;
    }
    r.check("diophantine", true,
            "min divisor " + format_double(rep.min_divisor) + " at " + witness_text(rep.argmin) + ", " +
                std::to_string(rep.scanned) + " monomials");
    if (rep.fit_valid)
        r.info("fit", "D=" + format_double(rep.D) + ", tau=" + format_double(rep.tau));
    else
        r.info("fit", "no valid (D, tau) fit, " + std::to_string(rep.violations.size()) + " violations");
    return true;
}

template <class C>
void cmd_scan(const Params& p, Report& r) {
    const Decks<C> decks = decks_from_json<C>(p.file_json("decks"));
    const int N = p.bound("N", 12);
    const ScanMode mode = p.choice("scan_mode", "vertical", {"vertical", "full"}) == "full" ? ScanMode::Full : ScanMode::Vertical;
    record_scan(diophantine_scan(decks, std::max(N, 2), mode), r);
}

template <class C>
struct Loaded {
    DeckPerturbation<C> pert;
    std::optional<VSeries<C>> phi0;
};

template <class C>
Loaded<C> load_perturbation(const Params& p, std::uint64_t seed, int N_v, Report& r) {
    Loaded<C> out;
    if (p.has("perturbation")) {
        out.pert = perturbation_from_json<C>(p.file_json("perturbation"));
        return out;
    }
    const std::string prof = p.choice("generate", "coboundary", {"coboundary", "generic"});
    GenOptions o;
    o.scale = p.rational("gen_scale", "1");
    o.horizontal = p.flag("gen_horizontal", true);
    o.vertical = p.flag("gen_vertical", true);
    auto g = generate_commuting_decks<C>(seed, p.bound("n_h", 1), p.bound("d", 1), p.bound("q", 1), N_v,
                                         prof == "generic" ? GenProfile::Generic : GenProfile::Coboundary, o);
    r.stages["perturbation"] = perturbation_json(g.pert);
    out.pert = std::move(g.pert);
    if (prof == "coboundary") out.phi0 = std::move(g.phi0);
    return out;
}

template <class C>
double max_diff(const VSeries<C>& a, const VSeries<C>& b) {
    double worst = 0;
    for (size_t c = 0; c < a.size(); ++c) worst = std::max(worst, sub(a[c], with_trunc(b[c], a[c].trunc)).max_abs());
    return worst;
}

struct LinSetup {
    LinMode mode;
    int N_v;
    double tol;
};

// Scan, commutation check, solve. Returns the solution, or nothing after a recorded failure.
template <class C>
std::optional<LinearizationResult<C>> linearize_stage(const Loaded<C>& in, const LinSetup& s, bool inverse,
                                                      DiophantineReport& rep, Report& r) {
    rep = diophantine_scan(in.pert.decks, s.N_v, scan_mode_of(s.mode));
    if (!record_scan(rep, r)) return std::nullopt;
    const double comm = check_commutation(in.pert, s.N_v);
    const std::string deg = " through degree " + std::to_string(s.N_v);
    r.stages["commutation"] = format_double(comm);
    if (comm > s.tol) {
        r.check("commutation", false, "commutator coefficient " + format_double(comm) + deg);
        return std::nullopt;
    }
    r.check("commutation", true, "decks commute" + deg);
    LinearizationResult<C> res;
    try {
        res = s.mode == LinMode::Full ? full_linearize(in.pert, s.N_v, &rep, inverse)
                                      : vertical_linearize(in.pert, s.N_v, &rep, inverse);
    } catch (const ResonanceError& e) {
        r.check("conjugacy", false, e.what());
        return std::nullopt;
    } catch (const IncompatibleError& e) {
        r.check("conjugacy", false, e.what());
        return std::nullopt;
    }
    r.stages["linearization"] = linearization_json(res);
    int bad = -1;
    double worst = 0;
    for (size_t m = 0; m < res.residual.size(); ++m) {
        worst = std::max(worst, res.residual[m]);
        if (bad < 0 && res.residual[m] > s.tol) bad = static_cast<int>(m);
    }
    if (bad >= 0)
        r.check("conjugacy", false, "residual " + format_double(res.residual[static_cast<size_t>(bad)]) + " at degree " +
                                        std::to_string(bad));
    else if (worst == 0)
        r.check("conjugacy", true, "residuals 0" + deg);
    else
        r.check("conjugacy", true, "residuals <= " + format_double(worst) + deg);
    return res;
}

LinSetup lin_setup(const Params& p, bool exact, const char* def_mode, int def_N) {
    LinSetup s;
    s.mode = p.choice("lin_mode", def_mode, {"vertical", "full"}) == "full" ? LinMode::Full : LinMode::Vertical;
    s.N_v = p.bound("N_v", def_N);
    if (s.N_v < 2) throw InputError("'N_v' must be >= 2");
    const double tol = p.real("tolerance", "1e-10");
    s.tol = exact ? 0.0 : tol;
    return s;
}

template <class C>
void cmd_linearize(const Params& p, const RunConfig& cfg, Report& r) {
    const LinSetup s = lin_setup(p, scalar_traits<C>::exact, "full", 5);
    const bool inverse = p.flag("inverse", false);
    const auto in = load_perturbation<C>(p, cfg.seed, s.N_v, r);
    DiophantineReport rep;
    const auto res = linearize_stage(in, s, inverse, rep, r);
    if (!res || !in.phi0) return;
    // hidden phi0 is comparable in full mode, and in vertical mode when it has no h part
    const bool vertical_only = !p.flag("gen_horizontal", true);
    if (s.mode == LinMode::Vertical && !vertical_only) return;
    const VSeries<C> want = s.mode == LinMode::Full ? *in.phi0 : v_block(*in.phi0, in.pert.n_h);
    const double diff = max_diff(res->phi, want);
    r.stages["recovery_error"] = format_double(diff);
    if (diff <= s.tol)
        r.check("recovery", true, diff == 0 ? "phi equals phi0 coefficientwise" : "|phi - phi0| <= " + format_double(diff));
    else
        r.check("recovery", false, "|phi - phi0| = " + format_double(diff));
}

template <class C>
void cmd_certify(const Params& p, const RunConfig& cfg, Report& r) {
    const LinSetup s = lin_setup(p, scalar_traits<C>::exact, "vertical", 6);
    const auto in = load_perturbation<C>(p, cfg.seed, s.N_v, r);
    Ladder ladder;
    const auto hr = real_list("h_radii", p.str("h_radii", "0.8,1,1.25"));
    ladder.base.h_radii.assign(static_cast<size_t>(in.pert.n_h), hr);
    const auto vr = real_list("v_radius", p.str("v_radius", "0.3"));
    if (vr.size() == 1)
        ladder.base.v_radius.assign(static_cast<size_t>(in.pert.d), vr[0]);
    else if (static_cast<int>(vr.size()) == in.pert.d)
        ladder.base.v_radius = vr;
    else
        throw InputError("'v_radius' needs one value or one per vertical coordinate");
    ladder.base.n_angle = p.bound("n_angle", 16);
    ladder.kappa = p.real("kappa", "1");
    ladder.eta_margin = p.real("eta_margin", "0.25");
    const int M = p.bound("M", 20);
    const double nu = p.real("nu", "3");
    MajorantConstants base;
    base.full_h_from_zero = p.flag("full_h_from_zero", false);
    DiophantineReport rep;
    const double tau_override = p.has("tau") ? p.real("tau", "1") : -1.0;
    const auto res = linearize_stage(in, s, false, rep, r);
    if (!res) return;
    // without a valid fit the exponent falls back to 1 unless the config pins one
    const double tau = tau_override > 0 ? tau_override : (rep.fit_valid ? rep.tau : 1.0);
    const auto cert = fit_certificate(in.pert, s.mode, tau, ladder, M, nu, base);
    r.stages["majorant"] = majorant_json(cert);
    r.info("eta growth", "eta_m <= D^m with D=" + format_double(cert.eta.D_growth()) + " through m=" + std::to_string(M));
    const auto dom = certify_domination(res->phi, s.N_v, cert, ladder, in.pert.decks);
    r.stages["domination"] = domination_json(dom);
    const int top = std::min(M, s.N_v);
    if (dom.pass) {
        r.check("domination", true, "|[phi]_m| <= A_m eta_m for m = 2.." + std::to_string(top));
    } else {
        const auto& row = dom.rows[static_cast<size_t>(dom.first_fail - 2)];
        r.check("domination", false, "degree " + std::to_string(row.m) + ": sup " + format_double(row.sup) + " vs bound " +
                                         format_double(row.bound) + ", B side " + format_double(row.sup_B) + " vs " +
                                         format_double(row.bound_B));
    }
}

// ---- Hopf

template <class C>
void cmd_classify(const Params& p, Report& r) {
    const auto spec = hopf_spec_from_json<C>(p.file_json("spec"));
    const int B = p.bound("exp_bound", 12);
    const auto cls = classify_hopf(spec, B);
    r.stages["classification"] = classification_json(cls);
    std::string detail = std::string(hopf_type_name(cls.type)) + " up to |v|_1 <= " + std::to_string(B);
    if (!cls.relation.empty()) detail += ", relation v=" + tuple_text(cls.relation);
    r.info("classification", detail);
    if (!p.has("variant")) return;
    const auto bundle = flat_bundle_from_json<C>(p.file_json("bundle"));
    const auto variant = parse_vanishing_variant(p.required("variant"));
    const auto van = vanishing_predicate(bundle, spec, variant, B);
    r.stages["vanishing"] = vanishing_json(van);
    std::string vd = van.reason;
    if (!van.witness.is_null()) vd += ", witness " + van.witness.dump();
    r.check(std::string("vanishing ") + vanishing_variant_name(variant), van.criterion_holds, vd);
}

template <class C>
void cmd_precheck(const Params& p, Report& r) {
    const auto spec = hopf_spec_from_json<C>(p.file_json("spec"));
    const auto bundle = flat_bundle_from_json<C>(p.file_json("bundle"));
    const int B = p.bound("exp_bound", 12);
    const auto cl = hopf_precheck(bundle, spec, p.bound("N_v", 6), B);
    r.stages["precheck"] = checklist_json(cl);
    for (const auto& it : cl.items) {
        if (it.pass) {
            r.check(it.condition, true, "none with |v|_1 <= " + std::to_string(B));
        } else if (it.witness.contains("v")) {
            r.check(it.condition, false, "witness v=" + tuple_text(it.witness["v"].template get<std::vector<int>>()));
        } else {
            std::string d = it.witness.value("type", "") + ": " + it.witness.value("reason", "");
            const auto& rel = it.witness["relation"];
            if (rel.is_object() && rel.contains("v")) d += ", relation v=" + tuple_text(rel["v"].template get<std::vector<int>>());
            r.check(it.condition, false, d);
        }
    }
}

template <class C>
NestedCoveringSpec covering_from(const Params& p, const HopfSpec<C>& spec) {
    const mpq_class delta = p.rational("delta", "1/10");
    std::vector<mpq_class> r1;
    if (p.has("r1")) {
        for (const auto& s : split(p.required("r1"), ',')) r1.push_back(parse_rational(s));
    } else {
        r1.assign(static_cast<size_t>(spec.n()), mpq_class(1));
    }
    return build_covering(spec, delta, r1);
}

template <class C>
void cmd_cover(const Params& p, const RunConfig& cfg, Report& r) {
    const auto spec = hopf_spec_from_json<C>(p.file_json("spec"));
    const auto c = covering_from(p, spec);
    r.stages["covering"] = covering_json(c);
    r.check("annuli cover", c.arcs_cover, c.arcs_cover ? "three annuli cover every fundamental annulus" : "gap between annuli");
    r.check("common outer radius", c.common_outer, c.common_outer ? "all r_4 agree" : "r_4 differs between coordinates");
    if (c.exact) {
        bool ok = true;
        for (int j = 0; j < c.n; ++j) ok = ok && c.r4_q[static_cast<size_t>(j)] * c.modulus_q[static_cast<size_t>(j)] == c.r1_q[static_cast<size_t>(j)];
        r.check("r4*|alpha| = r1", ok, ok ? "exact for every coordinate" : "rational identity fails");
    } else {
        r.info("r4*|alpha| = r1", "moduli not rational, checked in floating point only");
    }
    const int pts = p.bound("mc_points", 10000);
    const auto mc = monte_carlo_cover(c, pts, cfg.seed);
    r.stages["monte_carlo"] = json{{"points", mc.points}, {"uncovered", mc.uncovered}, {"triple", mc.triple}};
    r.check("monte carlo cover", mc.uncovered == 0, std::to_string(mc.uncovered) + " uncovered of " + std::to_string(mc.points));
    r.check("no triple overlap", mc.triple == 0, std::to_string(mc.triple) + " triple-overlap orbits");
    if (!p.has("bundle")) return;
    const auto bundle = flat_bundle_from_json<C>(p.file_json("bundle"));
    const CD beta = scalar_traits<C>::to_cd(bundle.beta);
    const auto g = covering_graph(spec.n(), beta);
    const auto ch = transition_chain_search(g);
    r.stages["chains"] = chain_json(g, ch);
    const bool unit = std::abs(std::abs(beta) - 1.0) <= kHopfTol;
    const std::string nodes = std::to_string(g.nodes.size()) + " nodes";
    if (unit)
        r.check("transition chains", ch.none_found(), ch.none_found() ? "none, |beta| = 1 (" + nodes + ")" : "chain found with |beta| = 1");
    else
        r.check("transition chains", ch.all_found(), ch.all_found() ? "chain from every start (" + nodes + ")" : "some start has no chain");
}

ShilovPiece parse_piece(const std::string& s) {
    ShilovPiece piece;
    for (const auto& coord : split(s, ';')) piece.radii.push_back(real_list("radii", coord));
    return piece;
}

template <class C>
void cmd_shilov(const Params& p, Report& r) {
    ShilovPiece piece;
    std::optional<HopfSpec<C>> spec;
    if (p.has("spec")) spec = hopf_spec_from_json<C>(p.file_json("spec"));
    if (p.has("radii")) {
        piece = parse_piece(p.required("radii"));
    } else {
        if (!spec) throw InputError("shilov needs 'radii' or a Hopf 'spec' with a covering");
        const auto c = covering_from(p, *spec);
        const auto ji = split(p.str("piece", "1,1"), ',');
        if (ji.size() != 2) throw InputError("'piece' needs j,i");
        piece = covering_piece(c, std::stoi(ji[0]), std::stoi(ji[1]));
    }
    const FieldKind kind = p.choice("field", "diagonal", {"diagonal", "jordan"}) == "jordan" ? FieldKind::Jordan : FieldKind::Diagonal;
    CD alpha(1, 0);
    if (p.has("alpha"))
        alpha = scalar_traits<C>::to_cd(config_scalar<C>(p.required("alpha")));
    else if (spec)
        alpha = scalar_traits<C>::to_cd(spec->alpha[0]);
    const auto sh = shilov_constant(piece, kind, alpha);
    json radii = json::array();
    for (const auto& rs : piece.radii) {
        json a = json::array();
        for (double x : rs) a.push_back(format_double(x));
        radii.push_back(a);
    }
    json arg = json::array();
    for (double x : sh.argmax_radii) arg.push_back(format_double(x));
    r.stages["shilov"] = json{{"field", kind == FieldKind::Jordan ? "jordan" : "diagonal"},
                              {"piece", radii},
                              {"C", format_double(sh.C)},
                              {"argmax_radii", arg}};
    r.info("shilov constant", "C=" + format_double(sh.C));
}

template <class C>
void dispatch(const Params& p, const RunConfig& cfg, Report& r) {
    const std::string& c = cfg.command;
    if (c == "dioph-scan") cmd_scan<C>(p, r);
    else if (c == "linearize") cmd_linearize<C>(p, cfg, r);
    else if (c == "certify") cmd_certify<C>(p, cfg, r);
    else if (c == "hopf-classify") cmd_classify<C>(p, r);
    else if (c == "hopf-precheck") cmd_precheck<C>(p, r);
    else if (c == "hopf-cover") cmd_cover<C>(p, cfg, r);
    else if (c == "shilov") cmd_shilov<C>(p, r);
    else throw InputError("unknown command '" + c + "'");
}

std::string input_digest(const RunConfig& cfg) {
    std::string blob = "germlin-config\ncommand=" + cfg.command + "\nmode=" + cfg.mode + "\nseed=" + std::to_string(cfg.seed) + "\n";
    for (const auto& [k, v] : cfg.params) blob += k + "=" + v + "\n";
    for (const auto& [k, path] : cfg.inputs) blob += k + ":" + sha256_hex(read_file(path)) + "\n";
    return "sha256:" + sha256_hex(blob);
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"toroidal-validate", "dioph-scan",    "linearize",     "certify",
                                                   "hopf-classify",     "hopf-precheck", "hopf-cover",    "shilov"};
    return names;
}

void RunConfig::validate() const {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), command) == names.end()) throw InputError("unknown command '" + command + "'");
    if (mode != "exact" && mode != "float") throw InputError("mode must be exact or float");
    if (threads < 0) throw InputError("threads must be >= 0");
    for (const auto& [k, path] : inputs)
        if (!fs::is_regular_file(path)) throw InputError("input file for '" + k + "' not found: " + path);
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (k.empty()) throw InputError("config line " + std::to_string(lineno) + ": empty key");
        if (cfg.params.count(k) || cfg.inputs.count(k)) throw InputError("duplicate config key '" + k + "'");
        if (k == "command") cfg.command = v;
        else if (k == "mode") cfg.mode = v;
        else if (k == "out") cfg.out_path = (fs::path(base_dir) / v).string();
        else if (k == "threads" || k == "seed") {
            try {
                size_t used = 0;
                const long long x = std::stoll(v, &used);
                if (used != v.size() || x < 0) throw std::invalid_argument(v);
                if (k == "threads") cfg.threads = static_cast<int>(x);
                else cfg.seed = static_cast<std::uint64_t>(x);
            } catch (const std::exception&) {
                throw InputError("'" + k + "' must be a nonnegative integer");
            }
        } else if (is_file_key(k)) {
            const fs::path p(v);
            cfg.inputs[k] = (p.is_absolute() ? p : fs::path(base_dir) / p).string();
            if (!fs::is_regular_file(cfg.inputs[k])) throw InputError("input file for '" + k + "' not found: " + cfg.inputs[k]);
        } else {
            cfg.params[k] = v;
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    const std::string text = read_file(path);
    return parse_config(text, fs::path(path).parent_path().string());
}

RunReport run(const RunConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const Params p(cfg);
    Report r;
    if (cfg.command == "toroidal-validate") cmd_toroidal(p, r);
    else if (cfg.exact()) dispatch<QC>(p, cfg, r);
    else dispatch<CD>(p, cfg, r);
    const auto unused = p.unused();
    if (!unused.empty()) {
        std::string s;
        for (const auto& k : unused) s += (s.empty() ? "" : ", ") + k;
        throw InputError("config keys not used by " + cfg.command + ": " + s);
    }

    RunReport out;
    out.exit_code = r.failed ? kFail : kPass;
    json echo{{"command", cfg.command}, {"mode", cfg.mode}, {"seed", cfg.seed}, {"params", cfg.params}};
    json inputs = json::object();
    for (const auto& [k, path] : cfg.inputs) inputs[k] = fs::path(path).filename().string();
    echo["inputs"] = inputs;
    out.body = json{{"tool", "germlin"},
                    {"version", kVersion},
                    {"command", cfg.command},
                    {"config", echo},
                    {"input_digest", input_digest(cfg)},
                    {"stages", r.stages},
                    {"checks", r.checks},
                    {"pass", !r.failed},
                    {"exit_code", out.exit_code}};
    if (!cfg.exact()) {
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        out.body["timing"] = json{{"wall_ms", ms}, {"threads", thread_count()}};
    }
    return out;
}

std::string render_summary(const json& report) {
    std::string out = "germlin ";
    out += report.is_object() && report.contains("version") ? report["version"].get<std::string>() : kVersion;
    if (report.is_object() && report.contains("command")) out += " " + report["command"].get<std::string>();
    out += "\n";
    if (!report.is_object() || !report.contains("checks")) return out;
    for (const auto& c : report["checks"]) {
        std::string st = c.value("status", "info");
        std::transform(st.begin(), st.end(), st.begin(), [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
        out += "[" + st + "] " + c.value("name", "") + ": " + c.value("detail", "") + "\n";
    }
    return out;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw std::runtime_error("SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

int cli_main(int argc, char** argv) {
    CLI::App app{"germlin: linearization and vanishing-criterion pipelines"};
    std::string command, config_path, out_path, mode, summary_path;
    int threads = -1;
    long long seed = -1;
    app.add_option("command", command, "pipeline to run (or 'command' in the config)");
    app.add_option("--config", config_path, "key-value run config")->required();
    app.add_option("--out", out_path, "report JSON path");
    app.add_option("--mode", mode, "exact or float");
    app.add_option("--threads", threads, "worker threads (GERMLIN_THREADS wins)");
    app.add_option("--seed", seed, "seed for generated data and sampling");
    app.add_option("--summary", summary_path, "also write the text summary here");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    RunConfig cfg;
    RunReport rep;
    try {
        cfg = load_config(config_path);
        if (!command.empty()) cfg.command = command;
        if (!mode.empty()) cfg.mode = mode;
        if (threads >= 0) cfg.threads = threads;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (!out_path.empty()) cfg.out_path = out_path;
        set_threads(cfg.threads);
        rep = run(cfg);
    } catch (const std::exception& e) {
        std::cerr << "germlin: input error: " << e.what() << "\n";
        return kInputError;
    }

    const std::string text = rep.body.dump(2) + "\n";
    const std::string summary = render_summary(rep.body);
    if (cfg.out_path.empty()) {
        std::cout << text;
        std::cerr << summary;
    } else {
        std::ofstream f(cfg.out_path, std::ios::binary);
        if (!f) {
            std::cerr << "germlin: cannot write " << cfg.out_path << "\n";
            return kInputError;
        }
        f << text;
        std::cout << summary;
    }
    if (!summary_path.empty()) {
        std::ofstream f(summary_path, std::ios::binary);
        f << summary;
    }
    return rep.exit_code;
}

}  // namespace germlin::cli
