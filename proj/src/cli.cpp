#include "fgw/cli.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "fgw/parallel.hpp"
#include "fgw/theorems.hpp"

namespace fgw::cli {

namespace {

using nlohmann::json;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// "inf" or a real.
double parse_exponent(const std::string& text)
{
    if (text == "inf" || text == "infinity")
        return kInfinity;
    std::size_t used = 0;
    double x = 0;
    try {
        x = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(x))
        throw UsageError(fmt::format("malformed exponent '{}'", text));
    return x;
}

json exponent_json(double x) { return std::isinf(x) ? json("inf") : json(x); }

const char* const kThmIds[] = {"thm1", "lemma1", "r22", "thm3", "thm4", "thm5", "pcolumn", "qcolumn"};

/// Options of every subcommand, filled by CLI11.
struct Options {
    RunConfig config;
    std::string format = "json";

    // convolve
    std::optional<int> n, m;
    std::string f_text, g_text;
    bool oracle = false;

    // norms
    double p = 2;
    std::string s_text = "2";

    // search, verify, conjecture
    std::string radial;
    std::string estimator = "restricted";

    // verify
    std::string theorem;
    std::optional<int> k_max, n_max;
    std::vector<double> ps{1.25, 1.5, 1.75};
    std::string t_text = "inf";
    int n_lo = 4, n_hi = 40;
    std::size_t samples = 100;

    // conjecture
    std::vector<double> s_grid{1, 1.5, 2};
};

/// Families used when --family is absent; they match the acceptance runs.
std::vector<SetFamily> default_families(std::uint64_t random_budget)
{
    return {{FamilyKind::exhaustive, 1, 32, 0},
            {FamilyKind::sphere_unions, 8, 511, 0},
            {FamilyKind::random_subsets, 4, random_budget, 42}};
}

std::vector<SetFamily> families(const RunConfig& c, std::uint64_t random_budget)
{
    if (c.family.empty())
        return default_families(random_budget);
    return {{parse_family_kind(c.family), c.radius.value_or(4), c.budget, c.seed}};
}

std::vector<SuiteFunction> suite_or_radial(const Options& o, const FreeGroupCtx& ctx,
                                           std::vector<SuiteFunction> fallback)
{
    if (o.radial.empty())
        return fallback;
    return {{"f", parse_radial(ctx, o.radial)}};
}

VerificationReport convolve_report(const Options& o, const FreeGroupCtx& ctx)
{
    const bool spheres = o.n || o.m;
    if (spheres == (!o.f_text.empty() || !o.g_text.empty()))
        throw UsageError("convolve takes either --n and --m or --f and --g");
    if (spheres && !(o.n && o.m))
        throw UsageError("convolve needs both --n and --m");
    if (!spheres && (o.f_text.empty() || o.g_text.empty()))
        throw UsageError("convolve needs both --f and --g");

    const RadialFunction f = spheres ? RadialFunction::sphere(ctx, *o.n) : parse_radial(ctx, o.f_text);
    const RadialFunction g = spheres ? RadialFunction::sphere(ctx, *o.m) : parse_radial(ctx, o.g_text);
    const RadialFunction h = convolve_radial(f, g);

    // The oracle counts pairs in the group; for general f, g it convolves g's embedding.
    std::optional<RadialFunction> oracle;
    bool match = true;
    if (o.oracle) {
        if (spheres) {
            oracle = oracle_convolve(ctx, *o.n, *o.m, o.config.sphere_cap);
            match = *oracle == h;
        } else {
            const FunctionOnGroup brute = left_convolve(f, embed(g, o.config.sphere_cap), o.config.sphere_cap);
            match = brute == embed(h, o.config.sphere_cap);
            std::vector<Rational> c(static_cast<std::size_t>(std::max(h.degree(), 0)) + 1, Rational(0));
            for (const auto& [w, v] : brute.entries())
                if (w.length() < c.size())
                    c[w.length()] = v;
            oracle = RadialFunction(ctx, std::move(c));
        }
    }

    VerificationReport r;
    r.id = "convolve";
    r.parameters = {{"k", ctx.k()}, {"f", format_radial(f)}, {"g", format_radial(g)}, {"oracle", o.oracle}};
    r.inequality = "f * g = sum_l c_l chi_l";
    json coefficients = json::object();
    for (int l = 0; l <= h.degree(); ++l) {
        if (h[l] == 0 && !(oracle && (*oracle)[l] != 0))
            continue;
        coefficients[std::to_string(l)] = format_rational(h[l]);
        ReportRow row;
        row.instance = fmt::format("l={}", l);
        row.params = {{"l", l}, {"coefficient", format_rational(h[l])}};
        row.lhs = h[l].convert_to<double>();
        row.rhs = row.lhs;
        row.status = Status::informational;
        if (oracle) {
            row.params["oracle"] = format_rational((*oracle)[l]);
            row.rhs = (*oracle)[l].convert_to<double>();
            row.status = h[l] == (*oracle)[l] ? Status::pass : Status::fail;
        }
        r.rows.push_back(std::move(row));
    }
    r.summary = {{"coefficients", coefficients}, {"oracle_match", o.oracle ? json(match) : json(nullptr)}};
    r.status = !o.oracle ? Status::informational : match ? Status::pass : Status::fail;
    if (!match)
        r.witness = fmt::format("convolution of {} and {} disagrees with the pair-count oracle", format_radial(f),
                                format_radial(g));
    r.rendered = fmt::format("{} * {} = {}", format_radial(f), format_radial(g), format_radial(h));
    return r;
}

VerificationReport norms_report(const Options& o, const FreeGroupCtx& ctx)
{
    if (o.radial.empty())
        throw UsageError("norms needs --radial");
    const RadialFunction f = parse_radial(ctx, o.radial);
    const double s = parse_exponent(o.s_text);
    const LorentzIndex idx(o.p, s);
    const auto r = rearrange_radial(f);
    const double norm = static_cast<double>(lorentz_norm(r, idx));
    const double weak = static_cast<double>(weak_norm(r, o.p));

    VerificationReport out;
    out.id = "norms";
    out.parameters = {{"k", ctx.k()}, {"p", o.p}, {"s", exponent_json(s)}, {"radial", format_radial(f)}};
    out.inequality = "||f||_{p,s}";
    // Informational rows carry the value on both sides.
    out.rows.push_back({"lorentz", {{"p", o.p}, {"s", exponent_json(s)}}, norm, norm, Status::informational});
    out.rows.push_back({"weak", {{"p", o.p}}, weak, weak, Status::informational});
    out.summary = {{"norm", round12(norm)}, {"weak_norm", round12(weak)}};
    if (o.p <= 2) {
        const double w = static_cast<double>(radial_weighted_sum(f, o.p));
        out.rows.push_back({"weighted sum", {{"p", o.p}}, w, w, Status::informational});
        out.summary["weighted_sum"] = round12(w);
    }
    out.status = Status::informational;
    out.rendered = fmt::format("||{}||_({},{}) = {:.12g}", format_radial(f), o.p, o.s_text, norm);
    return out;
}

VerificationReport search_report(const Options& o, const FreeGroupCtx& ctx)
{
    if (o.radial.empty())
        throw UsageError("search needs --radial");
    if (o.estimator != "restricted" && o.estimator != "weak")
        throw UsageError(fmt::format("unknown estimator '{}'", o.estimator));
    const RadialFunction f = parse_radial(ctx, o.radial);
    const RunConfig& c = o.config;
    const SetFamily family{c.family.empty() ? FamilyKind::sphere_unions : parse_family_kind(c.family),
                           c.radius.value_or(4), c.budget, c.seed};
    const EstimateReport est = o.estimator == "weak" ? weak_estimate_21_to_2(f, family, c.sphere_cap)
                                                     : restricted_weak_estimate(f, family, c.sphere_cap);

    VerificationReport r;
    r.id = "search";
    r.parameters = {{"k", ctx.k()}, {"radial", format_radial(f)}, {"estimator", o.estimator},
                    {"family", family_json(family)}};
    r.inequality = o.estimator == "weak" ? "max_E ||f * chi_E||_2 / |E|^{1/2}"
                                         : "max_E max_F <f * chi_E, chi_F> / (|E| |F|)^{1/2}";
    const double value = static_cast<double>(est.estimate);
    json params = {{"set", est.argmax ? est.argmax->describe() : "none"},
                   {"prefix", est.prefix.str()},
                   {"candidates", est.candidates}};
    if (est.estimate_squared)
        params["estimate_squared"] = format_rational(*est.estimate_squared);
    r.rows.push_back({"estimate", params, value, value, Status::informational});
    r.summary = {{"estimate", round12(value)}, {"candidates", est.candidates}};
    r.status = Status::informational;
    r.rendered = fmt::format("estimate {:.12g} over {} candidate sets", value, est.candidates);
    return r;
}

VerificationReport verify_report(const Options& o, const FreeGroupCtx& ctx)
{
    const RunConfig& c = o.config;
    const std::string& id = o.theorem;
    if (id == "thm1")
        return verify_thm1(suite_or_radial(o, ctx, theorem_suite_functions(ctx, c.seed)), families(c, 200),
                           c.sphere_cap);
    if (id == "lemma1")
        return verify_lemma1(ctx, families(c, 1000), o.k_max.value_or(8), c.sphere_cap);
    if (id == "r22")
        return verify_r22(ctx, families(c, 1000), o.n_max.value_or(8), c.sphere_cap);
    if (id == "thm3")
        return thm3_equivalence_report(
            suite_or_radial(o, ctx, random_suite_functions(ctx, o.samples, c.max_degree, c.seed)), families(c, 200),
            c.sphere_cap);
    if (id == "thm4")
        return thm4_lower_chain(suite_or_radial(o, ctx, theorem_suite_functions(ctx, c.seed)), o.ps);
    if (id == "thm5")
        return thm5_exponent_fit(ctx, parse_exponent(o.s_text), parse_exponent(o.t_text), o.n_lo, o.n_hi);
    if (id == "pcolumn")
        return p_column_study(ctx, o.k_max.value_or(6), c.radius.value_or(8), c.sphere_cap);
    if (id == "qcolumn")
        return q_column_study(ctx, o.n_max.value_or(6), c.radius.value_or(8), c.sphere_cap);
    throw UsageError(fmt::format("unknown theorem '{}'", id));
}

VerificationReport conjecture_report(const Options& o, const FreeGroupCtx& ctx)
{
    return conjecture_scan(suite_or_radial(o, ctx, conjecture_suite_functions(ctx)), o.s_grid);
}

void emit(const VerificationReport& report, const RunConfig& c, std::ostream& out)
{
    const std::span<const VerificationReport> reports(&report, 1);
    const std::string text = c.format == Format::csv ? reports_to_csv(reports) : reports_to_json(reports).dump(2) + "\n";
    if (c.output.empty()) {
        out << text;
        return;
    }
    std::ofstream file(c.output, std::ios::binary);
    if (!file)
        throw UsageError(fmt::format("cannot open '{}' for writing", c.output));
    file << text;
}

/// Restores the thread override when a run ends.
struct ThreadScope {
    explicit ThreadScope(int n) { set_thread_count(n); }
    ~ThreadScope() { set_thread_count(0); }
    ThreadScope(const ThreadScope&) = delete;
    ThreadScope& operator=(const ThreadScope&) = delete;
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    RunConfig& c = o.config;

    CLI::App app{"Convolution operators on free groups: exact checks and estimates"};
    app.name(args.empty() ? "fgw" : args.front());
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--k", c.k, "Number of free generators")->check(CLI::Range(2, 26));
    app.add_option("--max-degree", c.max_degree, "Largest degree of sampled functions")->check(CLI::Range(0, 64));
    app.add_option("--radius", c.radius, "Radius of the set family or column ball")->check(CLI::Range(0, 64));
    app.add_option("--budget", c.budget, "Largest number of candidate sets");
    app.add_option("--seed", c.seed, "Seed for sampled sets and functions");
    app.add_option("--threads", c.threads, "Worker threads (overrides FGW_THREADS)")->check(CLI::Range(1, 1024));
    app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--output", c.output, "Write the report here instead of stdout");
    app.add_option("--sphere-cap", c.sphere_cap, "Largest number of enumerated words");
    app.add_option("--family", c.family, "Set family")
        ->check(CLI::IsMember({"spheres", "balls", "sphere-unions", "exhaustive", "random-subsets", "greedy"}));

    auto* convolve = app.add_subcommand("convolve", "Exact radial convolution");
    convolve->add_option("--n", o.n, "Degree of the sphere chi_n")->check(CLI::Range(0, 64));
    convolve->add_option("--m", o.m, "Degree of the sphere chi_m")->check(CLI::Range(0, 64));
    convolve->add_option("--f", o.f_text, "Radial literal, e.g. \"1,1/2\"");
    convolve->add_option("--g", o.g_text, "Radial literal");
    convolve->add_flag("--oracle", o.oracle, "Cross-check against brute-force pair counts");

    auto* norms = app.add_subcommand("norms", "Lorentz norms of a radial function");
    norms->add_option("--p", o.p, "Exponent p > 1")->required();
    norms->add_option("--s", o.s_text, "Exponent s >= 1 or inf")->required();
    norms->add_option("--radial", o.radial, "Radial literal")->required();

    auto* search = app.add_subcommand("search", "Lower-bound the operator norm over a set family");
    search->add_option("--radial", o.radial, "Radial literal")->required();
    search->add_option("--estimator", o.estimator, "restricted or weak")
        ->check(CLI::IsMember({"restricted", "weak"}));

    auto* verify = app.add_subcommand("verify", "Run one verifier and report pass or fail");
    verify->add_option("theorem", o.theorem, "Verifier")
        ->required()
        ->check(CLI::IsMember(std::vector<std::string>(std::begin(kThmIds), std::end(kThmIds))));
    verify->add_option("--radial", o.radial, "Check a single radial function instead of the suite");
    verify->add_option("--k-max", o.k_max, "Largest k (lemma1, pcolumn)")->check(CLI::Range(0, 64));
    verify->add_option("--n-max", o.n_max, "Largest n (r22, qcolumn)")->check(CLI::Range(0, 64));
    verify->add_option("--p", o.ps, "Exponents p for thm4")->delimiter(',');
    verify->add_option("--s", o.s_text, "Exponent s for thm5");
    verify->add_option("--t", o.t_text, "Exponent t for thm5, or inf");
    verify->add_option("--n-lo", o.n_lo, "First n of the thm5 fit");
    verify->add_option("--n-hi", o.n_hi, "Last n of the thm5 fit");
    verify->add_option("--samples", o.samples, "Number of sampled functions for thm3");

    auto* conjecture = app.add_subcommand("conjecture", "Tabulate the conjecture functional");
    conjecture->add_option("--radial", o.radial, "Scan a single radial function");
    conjecture->add_option("--s", o.s_grid, "Grid of exponents s")->delimiter(',');

    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    if (argv.empty())
        argv.push_back("fgw");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kPass : kUsage;
    }
    c.format = o.format == "csv" ? Format::csv : Format::json;

    try {
        if (o.s_text.empty())
            o.s_text = "2";
        ThreadScope threads(c.threads);
        const FreeGroupCtx ctx(c.k);
        VerificationReport report;
        if (convolve->parsed())
            report = convolve_report(o, ctx);
        else if (norms->parsed())
            report = norms_report(o, ctx);
        else if (search->parsed())
            report = search_report(o, ctx);
        else if (verify->parsed())
            report = verify_report(o, ctx);
        else
            report = conjecture_report(o, ctx);
        emit(report, c, out);
        if (report.status == Status::fail) {
            err << "violation: " << report.witness.value_or(report.id) << "\n";
            return kViolation;
        }
        return kPass;
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return kUsage;
}

} // namespace fgw::cli
