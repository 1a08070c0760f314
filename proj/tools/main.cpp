#include <chrono>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "plot.hpp"

#include "qem/checks.hpp"
#include "qem/embeddings.hpp"
#include "qem/equivalence.hpp"
#include "qem/errors.hpp"
#include "qem/field.hpp"
#include "qem/parser.hpp"
#include "qem/poly.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;           // positive verdict / clean run
constexpr int kExitNegative = 1;     // NotEquivalent / DoesNotExtend
constexpr int kExitFailure = 2;      // verification failure or internal error
constexpr int kExitBudget = 3;       // suite aborted on budget exhaustion
constexpr int kExitInconclusive = 4; // no decision
constexpr int kExitBadInput = 5;     // flags, parse errors, violated constraints
constexpr int kExitIo = 6;           // filesystem problems

// Input-shaped problems are funneled through this local type so the
// top-level handler can map them all to kExitBadInput.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FieldChoice {
    qem::FieldPtr k;
    std::string label;
};

FieldChoice parse_field(const std::string& text) {
    if (text == "Q")
        return {qem::FieldDescriptor::rationals(), "Q"};
    if (text.rfind("Fp:", 0) == 0) {
        const std::string digits = text.substr(3);
        if (digits.empty() ||
            digits.find_first_not_of("0123456789") != std::string::npos)
            throw InputError("--field " + text + ": expected Fp:<prime>");
        unsigned long p = 0;
        try {
            p = std::stoul(digits);
        } catch (const std::exception&) {
            throw InputError("--field " + text + ": modulus out of range");
        }
        if (p >= (1ul << 31))
            throw InputError("--field " + text + ": modulus must be < 2^31");
        try {
            return {qem::FieldDescriptor::prime_field(static_cast<std::uint32_t>(p)),
                    "Fp:" + std::to_string(p)};
        } catch (const qem::UnsupportedField& e) {
            throw InputError("--field " + text + ": " + std::string(e.what()));
        }
    }
    throw InputError("--field " + text + ": expected Q or Fp:<prime>");
}

double elapsed_ms(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

qem::Poly parse_flag_poly(const std::string& flag, const std::string& text,
                          const qem::RingPtr& ring) {
    try {
        return qem::parse_poly(text, ring);
    } catch (const qem::SyntaxError& e) {
        throw InputError("flag " + flag + " '" + text + "': " + e.what());
    } catch (const qem::UnknownVariable& e) {
        throw InputError("flag " + flag + " '" + text + "': " + e.what());
    }
}

qem::FieldValue parse_flag_value(const std::string& flag, const std::string& text,
                                 const qem::FieldPtr& k) {
    const qem::RingPtr ring = qem::Ring::make(k, {"t"});
    const qem::Poly p = parse_flag_poly(flag, text, ring);
    if (!p.is_constant())
        throw InputError("flag " + flag + " '" + text +
                         "': expected a constant field element");
    return p.as_constant();
}

long parse_flag_integer(const std::string& flag, const std::string& text) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(text, &used);
    } catch (const std::exception&) {
        throw InputError("flag " + flag + " '" + text + "': expected an integer");
    }
    if (used != text.size())
        throw InputError("flag " + flag + " '" + text + "': expected an integer");
    return v;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i != 0)
            out += sep;
        out += parts[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON report assembly
// ---------------------------------------------------------------------------

struct Report {
    ordered_json doc;

    Report(const std::string& field_label, const std::string& command) {
        doc["schema_version"] = 1;
        doc["tool"] = ordered_json{{"name", "qembed"}, {"version", qem::kToolVersion}};
        if (field_label.empty())
            doc["field"] = nullptr;
        else
            doc["field"] = field_label;
        doc["command"] = command;
        doc["records"] = ordered_json::array();
    }

    void add(ordered_json record) { doc["records"].push_back(std::move(record)); }
};

int write_report(const Report& rep, const std::string& path) {
    if (path.empty())
        return kExitOk;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open '" << path << "' for writing\n";
        return kExitIo;
    }
    out << rep.doc.dump(2) << '\n';
    out.flush();
    if (!out) {
        std::cerr << "error: write to '" << path << "' failed\n";
        return kExitIo;
    }
    return kExitOk;
}

// Attaches the summary block and flushes the report.  A report-write failure
// only surfaces when the run itself succeeded; a nonzero verdict code wins.
int finish(Report& rep, const std::string& json_path, std::size_t passed,
           std::size_t failed, std::size_t skipped, std::size_t inconclusive,
           bool budget_exhausted, int code) {
    ordered_json summary;
    summary["passed"] = passed;
    summary["failed"] = failed;
    summary["skipped"] = skipped;
    summary["inconclusive"] = inconclusive;
    summary["budget_exhausted"] = budget_exhausted;
    summary["exit_code"] = code;
    rep.doc["summary"] = std::move(summary);
    const int io = write_report(rep, json_path);
    return (code == kExitOk && io != kExitOk) ? io : code;
}

void print_header(const std::string& subcommand, const FieldChoice& field) {
    std::cout << "qembed " << qem::kToolVersion << " " << subcommand
              << "  field=" << field.label << "\n";
}

// ---------------------------------------------------------------------------
// verify-paper
// ---------------------------------------------------------------------------

int run_verify(const std::string& field_flag, const std::string& filter,
               const std::string& json_path, const std::string& command) {
    const FieldChoice field = parse_field(field_flag);
    qem::SuiteReport suite;
    try {
        suite = qem::run_checks(field.k, filter);
    } catch (const qem::UnsupportedField& e) {
        throw InputError(e.what());
    }

    std::cout << "qembed " << qem::kToolVersion << " verify-paper  field="
              << field.label << "  filter=" << filter << "\n";
    double total = 0.0;
    for (const auto& r : suite.records) {
        total += r.milliseconds;
        std::ostringstream ms;
        ms << std::fixed << std::setprecision(2) << r.milliseconds;
        std::cout << "  " << std::left << std::setw(6)
                  << qem::status_name(r.status) << std::setw(44) << r.name
                  << r.detail << " (" << ms.str() << " ms)\n";
    }
    std::ostringstream total_ms;
    total_ms << std::fixed << std::setprecision(1) << total;
    std::cout << "summary: " << suite.passed << " passed, " << suite.failed
              << " failed, " << suite.skipped << " skipped ("
              << total_ms.str() << " ms total)\n";
    if (suite.budget_exhausted)
        std::cout << "suite aborted: computation budget exhausted\n";

    const int code = suite.budget_exhausted
                         ? kExitBudget
                         : (suite.failed != 0 ? kExitFailure : kExitOk);
    Report rep(field.label, command);
    for (const auto& r : suite.records) {
        ordered_json rec;
        rec["name"] = r.name;
        rec["claim"] = r.claim;
        rec["status"] = qem::status_name(r.status);
        rec["detail"] = r.detail;
        rec["milliseconds"] = r.milliseconds;
        rep.add(std::move(rec));
    }
    return finish(rep, json_path, suite.passed, suite.failed, suite.skipped, 0,
                  suite.budget_exhausted, code);
}

// ---------------------------------------------------------------------------
// equiv nu / equiv pr
// ---------------------------------------------------------------------------

std::string outcome_name(qem::Outcome o) {
    switch (o) {
    case qem::Outcome::Equivalent:
        return "Equivalent";
    case qem::Outcome::NotEquivalent:
        return "NotEquivalent";
    default:
        return "Inconclusive";
    }
}

int outcome_exit(qem::Outcome o) {
    switch (o) {
    case qem::Outcome::Equivalent:
        return kExitOk;
    case qem::Outcome::NotEquivalent:
        return kExitNegative;
    default:
        return kExitInconclusive;
    }
}

std::string outcome_status(qem::Outcome o) {
    switch (o) {
    case qem::Outcome::Equivalent:
        return "pass";
    case qem::Outcome::NotEquivalent:
        return "fail";
    default:
        return "inconclusive";
    }
}

ordered_json witness_to_json(const qem::EquivWitness& w) {
    ordered_json obj;
    for (const auto& [name, v] : w.values)
        obj[name] = v.str();
    for (const auto& [name, p] : w.polys)
        obj[name] = p.str();
    return obj;
}

void print_verdict(const qem::EquivalenceVerdict& v) {
    std::cout << "verdict: " << outcome_name(v.outcome) << "\n";
    for (const auto& w : v.witnesses) {
        std::cout << "  witness:";
        bool first = true;
        for (const auto& [name, val] : w.values) {
            std::cout << (first ? " " : ", ") << name << " = " << val.str();
            first = false;
        }
        for (const auto& [name, p] : w.polys) {
            std::cout << (first ? " " : ", ") << name << " = " << p.str();
            first = false;
        }
        std::cout << "\n";
    }
    if (!v.obstruction_kind.empty()) {
        std::cout << "  obstruction [" << v.obstruction_kind << "]\n";
        for (const auto& d : v.obstruction_data)
            std::cout << "    " << d << "\n";
    }
    if (!v.reason.empty())
        std::cout << "  reason: " << v.reason << "\n";
    for (const auto& f : v.flags)
        std::cout << "  flag: " << f << "\n";
}

void attach_verdict(ordered_json& rec, const qem::EquivalenceVerdict& v) {
    if (!v.witnesses.empty()) {
        ordered_json arr = ordered_json::array();
        for (const auto& w : v.witnesses)
            arr.push_back(witness_to_json(w));
        rec["witnesses"] = std::move(arr);
    }
    if (!v.obstruction_kind.empty())
        rec["obstruction"] =
            ordered_json{{"kind", v.obstruction_kind}, {"data", v.obstruction_data}};
    if (!v.reason.empty())
        rec["reason"] = v.reason;
    if (!v.flags.empty())
        rec["flags"] = v.flags;
}

int run_equiv_univariate(const FieldChoice& field, const std::string& family,
                         const std::string& first_flag, const std::string& first_text,
                         const std::string& second_flag, const std::string& second_text,
                         const std::string& json_path, const std::string& command) {
    const qem::RingPtr ring = qem::Ring::make(field.k, {"t"});
    const qem::Poly a = parse_flag_poly(first_flag, first_text, ring);
    const qem::Poly b = parse_flag_poly(second_flag, second_text, ring);
    print_header("equiv " + family, field);
    std::cout << first_flag.substr(2) << " = " << a.str() << "\n"
              << second_flag.substr(2) << " = " << b.str() << "\n";

    const auto t0 = std::chrono::steady_clock::now();
    const qem::EquivalenceVerdict v =
        family == "nu" ? qem::nu_equiv(a, b) : qem::pr_equiv(a, b);
    const double ms = elapsed_ms(t0);
    print_verdict(v);

    const int code = outcome_exit(v.outcome);
    Report rep(field.label, command);
    ordered_json rec;
    rec["name"] = "equiv." + family;
    rec["claim"] = family == "nu"
                       ? "p(t) = lambda q(lambda t + mu) admits a solution "
                         "(lambda, mu) in k* x k"
                       : "the hypersurfaces ty - (x-t)(x-1-t^2 r) for r and s "
                         "are related by an ambient automorphism";
    rec["status"] = outcome_status(v.outcome);
    std::string detail = outcome_name(v.outcome);
    if (!v.witnesses.empty())
        detail += "; " + std::to_string(v.witnesses.size()) + " witness" +
                  (v.witnesses.size() == 1 ? "" : "es");
    rec["detail"] = detail;
    rec["milliseconds"] = ms;
    rec["inputs"] = ordered_json{{first_flag.substr(2), a.str()},
                                 {second_flag.substr(2), b.str()}};
    attach_verdict(rec, v);
    rep.add(std::move(rec));

    const bool pos = v.outcome == qem::Outcome::Equivalent;
    const bool neg = v.outcome == qem::Outcome::NotEquivalent;
    return finish(rep, json_path, pos ? 1 : 0, neg ? 1 : 0, 0,
                  (!pos && !neg) ? 1 : 0, false, code);
}

// ---------------------------------------------------------------------------
// equiv jac / lift
// ---------------------------------------------------------------------------

std::vector<std::string> detect_plane_vars(const std::string& f_text,
                                           const std::string& g_text,
                                           const std::string& vars_flag) {
    if (!vars_flag.empty()) {
        const auto comma = vars_flag.find(',');
        if (comma == std::string::npos)
            throw InputError("--vars expects two comma-separated names");
        const std::string a = vars_flag.substr(0, comma);
        const std::string b = vars_flag.substr(comma + 1);
        if (a.empty() || b.empty() || a == b)
            throw InputError("--vars expects two distinct names");
        return {a, b};
    }
    std::set<std::string> ids;
    const auto scan = [&ids](const std::string& s) {
        std::size_t i = 0;
        while (i < s.size()) {
            const unsigned char c = static_cast<unsigned char>(s[i]);
            if (std::isalpha(c) || s[i] == '_') {
                std::size_t j = i + 1;
                while (j < s.size() &&
                       (std::isalnum(static_cast<unsigned char>(s[j])) ||
                        s[j] == '_'))
                    ++j;
                ids.insert(s.substr(i, j - i));
                i = j;
            } else {
                ++i;
            }
        }
    };
    scan(f_text);
    scan(g_text);
    const auto subset_of = [&ids](const char* u, const char* v) {
        for (const auto& id : ids)
            if (id != u && id != v)
                return false;
        return true;
    };
    if (subset_of("x", "y"))
        return {"x", "y"};
    if (subset_of("s", "t"))
        return {"s", "t"};
    if (ids.size() == 2)
        return {*ids.begin(), *std::next(ids.begin())};
    if (ids.size() == 1)
        return {*ids.begin(), "y"};
    throw InputError(
        "cannot infer the two plane variables from the inputs; pass --vars v1,v2");
}

std::string extension_name(qem::ExtensionOutcome o) {
    switch (o) {
    case qem::ExtensionOutcome::Extends:
        return "Extends";
    case qem::ExtensionOutcome::DoesNotExtend:
        return "DoesNotExtend";
    default:
        return "NotAnAutomorphism";
    }
}

std::string factor_str(const qem::AutoFactor& fac) {
    switch (fac.kind) {
    case qem::FactorKind::Swap:
        return "swap";
    case qem::FactorKind::Triangular:
        return "triangular(" + fac.p->str() + ")";
    case qem::FactorKind::Diagonal:
        return "diagonal(" + fac.xi.str() + ")";
    case qem::FactorKind::Translation:
        return "translation(" + fac.c1.str() + ", " + fac.c2.str() + ")";
    case qem::FactorKind::AffineLinear:
        return "affine(" + fac.a.str() + ", " + fac.b.str() + ", " +
               fac.c.str() + ", " + fac.d.str() + ")";
    }
    return "?";
}

int run_jac(const FieldChoice& field, const std::string& subcommand,
            const std::string& record_name, const std::string& f_text,
            const std::string& g_text, const std::string& vars_flag,
            const std::string& json_path, const std::string& command) {
    const std::vector<std::string> vars =
        detect_plane_vars(f_text, g_text, vars_flag);
    const qem::RingPtr ring = qem::Ring::make(field.k, {vars[0], vars[1]});
    const qem::Poly f = parse_flag_poly("--f", f_text, ring);
    const qem::Poly g = parse_flag_poly("--g", g_text, ring);
    print_header(subcommand, field);
    std::cout << "plane variables: (" << vars[0] << ", " << vars[1] << ")\n"
              << "f = " << f.str() << "\ng = " << g.str() << "\n";

    const auto t0 = std::chrono::steady_clock::now();
    std::optional<qem::ExtensionDecision> dec;
    std::string stall;
    try {
        dec = qem::jac_extension_decide(f, g);
    } catch (const qem::DecompositionFailed& e) {
        stall = e.what();
    }
    const double ms = elapsed_ms(t0);

    Report rep(field.label, command);
    ordered_json rec;
    rec["name"] = record_name;
    rec["claim"] = "the plane pair extends along (x, y) -> (x, 1; xy-1, y) to "
                   "an automorphism of the group surface";
    rec["milliseconds"] = ms;
    rec["inputs"] = ordered_json{
        {"f", f.str()}, {"g", g.str()}, {"vars", vars[0] + "," + vars[1]}};

    if (!dec) {
        std::cout << "verdict: Inconclusive (tame decomposition stalled; the "
                     "pair is not a plane automorphism)\n  reason: "
                  << stall << "\n";
        rec["status"] = "inconclusive";
        rec["detail"] = "tame decomposition stalled";
        rec["reason"] = stall;
        rep.add(std::move(rec));
        return finish(rep, json_path, 0, 0, 0, 1, false, kExitInconclusive);
    }

    std::cout << "jacobian = " << dec->jacobian.str() << "\n"
              << "verdict: " << extension_name(dec->outcome) << "\n";
    if (!dec->reason.empty())
        std::cout << "  reason: " << dec->reason << "\n";
    if (dec->word) {
        std::vector<std::string> factors;
        for (const auto& fac : dec->word->factors)
            factors.push_back(factor_str(fac));
        std::cout << "  word: " << join(factors, ", ") << "\n";
        rec["word"] = factors;
    }
    if (dec->lift) {
        for (const char* v : {"t", "u", "x", "y"})
            std::cout << "  lift " << v << " -> " << dec->lift->images.at(v).str()
                      << "\n";
        std::cout << "  relation residual: " << dec->lift->relation_residual.str()
                  << "\n";
        ordered_json images;
        for (const char* v : {"t", "u", "x", "y"})
            images[v] = dec->lift->images.at(v).str();
        rec["lift"] = std::move(images);
        rec["relation_residual"] = dec->lift->relation_residual.str();
    }

    const bool pos = dec->outcome == qem::ExtensionOutcome::Extends;
    const bool neg = dec->outcome == qem::ExtensionOutcome::DoesNotExtend;
    rec["status"] = pos ? "pass" : (neg ? "fail" : "inconclusive");
    rec["detail"] = extension_name(dec->outcome);
    rec["jacobian"] = dec->jacobian.str();
    if (!dec->reason.empty())
        rec["reason"] = dec->reason;
    rep.add(std::move(rec));

    const int code =
        pos ? kExitOk : (neg ? kExitNegative : kExitInconclusive);
    return finish(rep, json_path, pos ? 1 : 0, neg ? 1 : 0, 0,
                  (!pos && !neg) ? 1 : 0, false, code);
}

// ---------------------------------------------------------------------------
// construct
// ---------------------------------------------------------------------------

struct ConstructFlags {
    std::string p, q, r, lambda, a, b, mu, n, m;
};

const std::string& need(const std::string& tag, const char* flag,
                        const std::string& value) {
    if (value.empty())
        throw InputError("construct " + tag + " requires " + flag);
    return value;
}

qem::Parameters build_parameters(const FieldChoice& field, qem::Family family,
                                 const std::string& tag, const ConstructFlags& fl,
                                 ordered_json& echo) {
    qem::Parameters params;
    const qem::RingPtr kt = qem::Ring::make(field.k, {"t"});
    switch (family) {
    case qem::Family::NuP:
        params.polys.emplace("p",
                             parse_flag_poly("--p", need(tag, "--p", fl.p), kt));
        echo["p"] = params.polys.at("p").str();
        break;
    case qem::Family::RhoLambda:
        params.values.emplace(
            "lambda",
            parse_flag_value("--lambda", need(tag, "--lambda", fl.lambda), field.k));
        echo["lambda"] = params.values.at("lambda").str();
        break;
    case qem::Family::FibredGeneral: {
        params.integers["n"] = parse_flag_integer("--n", need(tag, "--n", fl.n));
        params.integers["m"] = parse_flag_integer("--m", need(tag, "--m", fl.m));
        params.values.emplace(
            "mu", parse_flag_value("--mu", need(tag, "--mu", fl.mu), field.k));
        const qem::RingPtr ktx = qem::Ring::make(field.k, {"t", "x"});
        params.polys.emplace("q",
                             parse_flag_poly("--q", need(tag, "--q", fl.q), ktx));
        echo["n"] = params.integers["n"];
        echo["m"] = params.integers["m"];
        echo["mu"] = params.values.at("mu").str();
        echo["q"] = params.polys.at("q").str();
        break;
    }
    case qem::Family::PrFamily:
        params.polys.emplace("r",
                             parse_flag_poly("--r", need(tag, "--r", fl.r), kt));
        echo["r"] = params.polys.at("r").str();
        break;
    case qem::Family::NonEquivPair:
        break;
    case qem::Family::CharPLine:
        params.integers["p"] = parse_flag_integer("--p", need(tag, "--p", fl.p));
        params.integers["q"] = parse_flag_integer("--q", need(tag, "--q", fl.q));
        params.values.emplace(
            "a", parse_flag_value("--a", need(tag, "--a", fl.a), field.k));
        params.values.emplace(
            "b", parse_flag_value("--b", need(tag, "--b", fl.b), field.k));
        echo["p"] = params.integers["p"];
        echo["q"] = params.integers["q"];
        echo["a"] = params.values.at("a").str();
        echo["b"] = params.values.at("b").str();
        break;
    case qem::Family::CharPHypersurface:
        params.integers["p"] = parse_flag_integer("--p", need(tag, "--p", fl.p));
        params.integers["q"] = parse_flag_integer("--q", need(tag, "--q", fl.q));
        params.integers["n"] = parse_flag_integer("--n", need(tag, "--n", fl.n));
        params.values.emplace(
            "a", parse_flag_value("--a", need(tag, "--a", fl.a), field.k));
        echo["p"] = params.integers["p"];
        echo["q"] = params.integers["q"];
        echo["n"] = params.integers["n"];
        echo["a"] = params.values.at("a").str();
        break;
    case qem::Family::ExampleNotVarKt:
        params.integers["p"] = parse_flag_integer("--p", need(tag, "--p", fl.p));
        params.integers["q"] = parse_flag_integer("--q", need(tag, "--q", fl.q));
        echo["p"] = params.integers["p"];
        echo["q"] = params.integers["q"];
        break;
    case qem::Family::SurfaceE:
    case qem::Family::ShastriA3:
    case qem::Family::ShastriSL2:
        break;
    }
    return params;
}

int run_construct(const FieldChoice& field, const std::string& tag,
                  const ConstructFlags& fl, const std::string& json_path,
                  const std::string& command) {
    qem::Family family;
    try {
        family = qem::family_from_tag(tag);
    } catch (const qem::Error& e) {
        throw InputError(e.what());
    }
    ordered_json echo = ordered_json::object();
    const qem::Parameters params = build_parameters(field, family, tag, fl, echo);

    print_header("construct " + tag, field);
    const auto t0 = std::chrono::steady_clock::now();
    const qem::EmbeddingSpec spec = qem::construct(field.k, family, params);
    const double ms = elapsed_ms(t0);

    if (spec.source)
        std::cout << "source variables: (" << join(spec.source->vars(), ", ")
                  << ")\n";
    std::cout << "ambient variables: (" << join(spec.ambient->vars(), ", ")
              << ")\n";
    if (spec.ambient_relation)
        std::cout << "ambient relation: " << spec.ambient_relation->str() << "\n";

    bool ok = true;
    std::vector<std::string> residuals;
    const std::vector<std::string>& avars = spec.ambient->vars();
    if (!spec.components.empty()) {
        for (std::size_t i = 0; i < spec.components.size(); ++i)
            std::cout << "component " << avars[i] << " = "
                      << spec.components[i].str() << "\n";
        if (spec.components.size() == 4 && avars.size() == 4) {
            // SL2-valued families: components follow ambient order (t,u,x,y)
            // with matrix slots x=f11, t=f12, u=f21, y=f22.
            std::cout << "matrix [" << spec.components[2].str() << ", "
                      << spec.components[0].str() << "; "
                      << spec.components[1].str() << ", "
                      << spec.components[3].str() << "]\n";
        }
        if (spec.ambient_relation) {
            const qem::ZeroCheckReport zr = qem::verify_on_quadric(spec);
            residuals.push_back(zr.residual.str());
            ok = ok && zr.passed();
            std::cout << "on-quadric residual: " << zr.residual.str() << "\n";
        }
        if (!spec.image_equations.empty()) {
            std::map<std::string, qem::Poly> images;
            for (std::size_t i = 0; i < spec.components.size(); ++i)
                images.emplace(avars[i], spec.components[i]);
            for (const auto& eq : spec.image_equations) {
                const qem::Poly res = qem::substitute(eq, images);
                residuals.push_back(res.str());
                ok = ok && res.is_zero();
                std::cout << "image equation: " << eq.str()
                          << "\n  residual: " << res.str() << "\n";
            }
        }
    } else {
        std::cout << "hypersurface equations:\n";
        for (const auto& eq : spec.image_equations)
            std::cout << "  " << eq.str() << "\n";
    }

    Report rep(field.label, command);
    ordered_json rec;
    rec["name"] = "construct." + tag;
    rec["claim"] =
        "the constructed family member satisfies its defining identities";
    rec["status"] = ok ? "pass" : "fail";
    rec["detail"] =
        spec.components.empty()
            ? "hypersurface datum; " +
                  std::to_string(spec.image_equations.size()) + " equation(s)"
            : std::to_string(spec.components.size()) +
                  " components; all residuals zero";
    if (!ok)
        rec["detail"] = "nonzero residual";
    rec["milliseconds"] = ms;
    rec["parameters"] = std::move(echo);
    if (spec.source)
        rec["source_vars"] = spec.source->vars();
    rec["ambient_vars"] = avars;
    if (spec.ambient_relation)
        rec["ambient_relation"] = spec.ambient_relation->str();
    if (!spec.components.empty()) {
        ordered_json comps;
        for (std::size_t i = 0; i < spec.components.size(); ++i)
            comps[avars[i]] = spec.components[i].str();
        rec["components"] = std::move(comps);
    }
    if (!spec.image_equations.empty()) {
        std::vector<std::string> eqs;
        for (const auto& eq : spec.image_equations)
            eqs.push_back(eq.str());
        rec["image_equations"] = eqs;
    }
    if (!residuals.empty())
        rec["residuals"] = residuals;
    rep.add(std::move(rec));

    const int code = ok ? kExitOk : kExitFailure;
    return finish(rep, json_path, ok ? 1 : 0, ok ? 0 : 1, 0, 0, false, code);
}

// ---------------------------------------------------------------------------
// plot-trefoil
// ---------------------------------------------------------------------------

int run_plot(const std::string& out_dir, int size, int samples,
             const std::string& json_path, const std::string& command) {
    if (samples < 2)
        throw InputError("--samples must be at least 2");
    if (size < 16)
        throw InputError("--size must be at least 16");
    namespace fs = std::filesystem;
    const std::string dir = out_dir.empty() ? "." : out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory '" << dir
                  << "': " << ec.message() << "\n";
        return kExitIo;
    }

    Report rep("", command);
    std::size_t written = 0;
    for (const auto& proj : qemtool::trefoil_projections()) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::string svg = qemtool::trefoil_svg(proj, size, samples);
        const double ms = elapsed_ms(t0);
        const fs::path path = fs::path(dir) / proj.file_name;
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot open '" << path.string()
                      << "' for writing\n";
            return kExitIo;
        }
        out << svg;
        out.flush();
        if (!out) {
            std::cerr << "error: write to '" << path.string() << "' failed\n";
            return kExitIo;
        }
        std::cout << "wrote " << path.string() << " (" << svg.size()
                  << " bytes)\n";
        std::string stem = proj.file_name;
        if (const auto dot = stem.rfind('.'); dot != std::string::npos)
            stem.resize(dot);
        ordered_json rec;
        rec["name"] = "plot." + stem;
        rec["claim"] = proj.title;
        rec["status"] = "pass";
        rec["detail"] = "wrote " + std::to_string(svg.size()) + " bytes";
        rec["milliseconds"] = ms;
        rec["path"] = path.string();
        rec["bytes"] = svg.size();
        rep.add(std::move(rec));
        ++written;
    }
    return finish(rep, json_path, written, 0, 0, 0, false, kExitOk);
}

} // namespace

int main(int argc, char** argv) {
    std::string command;
    for (int i = 1; i < argc; ++i) {
        if (i > 1)
            command += ' ';
        const std::string arg = argv[i];
        command += arg.find(' ') == std::string::npos ? arg : "'" + arg + "'";
    }

    CLI::App app{"exact workbench for algebraic embeddings of affine spaces "
                 "into smooth affine quadrics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("qembed ") + qem::kToolVersion);

    std::string v_field = "Q", v_filter = "*", v_json;
    CLI::App* verify = app.add_subcommand(
        "verify-paper", "run the built-in verification suite");
    verify->add_option("--field", v_field, "coefficient field: Q or Fp:<prime>");
    verify->add_option("--filter", v_filter, "glob over check names");
    verify->add_option("--json", v_json, "write the JSON report to this path");

    std::string e_family, e_field = "Q", e_json, e_p, e_q, e_r, e_s, e_f, e_g,
                e_vars;
    CLI::App* equiv = app.add_subcommand(
        "equiv", "decide equivalence or extension within a family");
    equiv->add_option("family", e_family, "one of: nu, pr, jac")
        ->required()
        ->check(CLI::IsMember({"nu", "pr", "jac"}));
    equiv->add_option("--field", e_field, "coefficient field: Q or Fp:<prime>");
    equiv->add_option("--json", e_json, "write the JSON report to this path");
    equiv->add_option("--p", e_p, "nu: first curve polynomial p(t)");
    equiv->add_option("--q", e_q, "nu: second curve polynomial q(t)");
    equiv->add_option("--r", e_r, "pr: first parameter polynomial r(t)");
    equiv->add_option("--s", e_s, "pr: second parameter polynomial s(t)");
    equiv->add_option("--f", e_f, "jac: first plane component");
    equiv->add_option("--g", e_g, "jac: second plane component");
    equiv->add_option("--vars", e_vars,
                      "jac: the two plane variables, e.g. x,y (default: inferred)");

    std::string c_tag, c_field = "Q", c_json;
    ConstructFlags c_flags;
    CLI::App* construct_cmd = app.add_subcommand(
        "construct", "build a family member and verify its identities");
    construct_cmd->add_option("family", c_tag, "family tag, e.g. nu-p, rho-lambda")
        ->required();
    construct_cmd->add_option("--field", c_field,
                              "coefficient field: Q or Fp:<prime>");
    construct_cmd->add_option("--json", c_json,
                              "write the JSON report to this path");
    construct_cmd->add_option("--p", c_flags.p,
                              "polynomial p(t) (nu-p) or integer p (charp families)");
    construct_cmd->add_option("--q", c_flags.q,
                              "polynomial q(t,x) (fibred-general) or integer q");
    construct_cmd->add_option("--r", c_flags.r, "polynomial r(t) (pr)");
    construct_cmd->add_option("--lambda", c_flags.lambda,
                              "field element (rho-lambda)");
    construct_cmd->add_option("--a", c_flags.a, "field element a");
    construct_cmd->add_option("--b", c_flags.b, "field element b");
    construct_cmd->add_option("--mu", c_flags.mu, "field element mu");
    construct_cmd->add_option("--n", c_flags.n, "integer n");
    construct_cmd->add_option("--m", c_flags.m, "integer m");

    std::string l_field = "Q", l_json, l_f, l_g, l_vars;
    CLI::App* lift = app.add_subcommand(
        "lift", "lift a plane automorphism to the group surface xy - tu = 1");
    lift->add_option("--field", l_field, "coefficient field: Q or Fp:<prime>");
    lift->add_option("--json", l_json, "write the JSON report to this path");
    lift->add_option("--f", l_f, "first plane component")->required();
    lift->add_option("--g", l_g, "second plane component")->required();
    lift->add_option("--vars", l_vars,
                     "the two plane variables, e.g. x,y (default: inferred)");

    std::string p_out = ".", p_json;
    int p_size = 480, p_samples = 600;
    CLI::App* plot = app.add_subcommand(
        "plot-trefoil", "render the knotted curve's planar projections as SVG");
    plot->add_option("--out", p_out, "output directory (default: .)");
    plot->add_option("--size", p_size, "canvas size in pixels (default: 480)");
    plot->add_option("--samples", p_samples,
                     "number of parameter samples (default: 600)");
    plot->add_option("--json", p_json, "write the JSON report to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitBadInput;
    }

    try {
        if (verify->parsed())
            return run_verify(v_field, v_filter, v_json, command);
        if (equiv->parsed()) {
            const FieldChoice field = parse_field(e_field);
            if (e_family == "nu") {
                if (e_p.empty() || e_q.empty())
                    throw InputError("equiv nu requires --p and --q");
                return run_equiv_univariate(field, "nu", "--p", e_p, "--q", e_q,
                                            e_json, command);
            }
            if (e_family == "pr") {
                if (e_r.empty() || e_s.empty())
                    throw InputError("equiv pr requires --r and --s");
                return run_equiv_univariate(field, "pr", "--r", e_r, "--s", e_s,
                                            e_json, command);
            }
            if (e_f.empty() || e_g.empty())
                throw InputError("equiv jac requires --f and --g");
            return run_jac(field, "equiv jac", "equiv.jac", e_f, e_g, e_vars,
                           e_json, command);
        }
        if (construct_cmd->parsed())
            return run_construct(parse_field(c_field), c_tag, c_flags, c_json,
                                 command);
        if (lift->parsed())
            return run_jac(parse_field(l_field), "lift", "lift", l_f, l_g,
                           l_vars, l_json, command);
        if (plot->parsed())
            return run_plot(p_out, p_size, p_samples, p_json, command);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const qem::SyntaxError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const qem::ParameterConstraintViolated& e) {
        std::cerr << "parameter constraint violated: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const qem::UnsupportedField& e) {
        std::cerr << "unsupported field: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const qem::BudgetExceeded& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return kExitInconclusive;
    } catch (const qem::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitBadInput;
}
