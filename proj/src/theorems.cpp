#include "fgw/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <fmt/format.h>

#include "fgw/parallel.hpp"

namespace fgw {

namespace {

using nlohmann::json;

BigInt qpow(const FreeGroupCtx& ctx, int e)
{
    return boost::multiprecision::pow(BigInt(ctx.q()), static_cast<unsigned>(e));
}

double to_double(const Rational& r) { return r.convert_to<double>(); }
double to_double(const BigInt& b) { return b.convert_to<double>(); }

/// Infinite exponents are written as the string "inf".
json number(double x)
{
    if (std::isinf(x))
        return x > 0 ? json("inf") : json("-inf");
    return round12(x);
}

const FreeGroupCtx& suite_ctx(std::span<const SuiteFunction> suite)
{
    if (suite.empty())
        throw std::invalid_argument("empty function suite");
    for (const auto& s : suite)
        s.f.check_ctx(suite.front().f);
    return suite.front().f.ctx();
}

json suite_json(std::span<const SuiteFunction> suite)
{
    json out = json::array();
    for (const auto& s : suite)
        out.push_back({{"name", s.name}, {"f", format_radial(s.f)}});
    return out;
}

json families_json(std::span<const SetFamily> families)
{
    json out = json::array();
    for (const auto& f : families)
        out.push_back(family_json(f));
    return out;
}

/// Candidate sets of the non-greedy families, flattened in input order.
struct CandidateSets {
    std::vector<ElementSet> sets;
    std::vector<std::string> labels;
    std::vector<SetFamily> greedy;
};

CandidateSets collect(const FreeGroupCtx& ctx, std::span<const SetFamily> families, bool allow_greedy)
{
    CandidateSets out;
    for (const auto& family : families) {
        if (family.kind == FamilyKind::greedy) {
            if (!allow_greedy)
                throw std::invalid_argument("the greedy family needs a function to optimize");
            out.greedy.push_back(family);
            continue;
        }
        auto sets = generate_family(ctx, family);
        for (std::size_t i = 0; i < sets.size(); ++i) {
            out.labels.push_back(fmt::format("{}#{}", to_string(family.kind), i));
            out.sets.push_back(std::move(sets[i]));
        }
    }
    return out;
}

int max_degree(std::span<const SuiteFunction> suite)
{
    int d = 0;
    for (const auto& s : suite)
        d = std::max(d, s.f.degree());
    return d;
}

/// Small sets are spelled out; large ones are identified by their family index.
std::string set_text(const ElementSet& E)
{
    if (E.is_radial() || E.size() <= 16)
        return E.describe();
    return fmt::format("<{} words>", E.size().str());
}

void finalize(VerificationReport& r, bool informational = false)
{
    r.status = informational ? Status::informational : Status::pass;
    const ReportRow* tightest = nullptr;
    for (const auto& row : r.rows) {
        if (row.status == Status::fail && r.status != Status::fail) {
            r.status = Status::fail;
            r.witness = fmt::format("{}: {:.12g} <= {:.12g} fails; {}", row.instance, row.lhs, row.rhs,
                                    row.params.dump());
        }
        if (row.status == Status::informational || !row.margin())
            continue;
        if (!tightest || *row.margin() < *tightest->margin())
            tightest = &row;
    }
    if (tightest)
        r.rendered = fmt::format("{:.12g} <= {:.12g} at {}", tightest->lhs, tightest->rhs, tightest->instance);
}

Status verdict(bool holds) { return holds ? Status::pass : Status::fail; }

std::vector<ReportRow> flatten(std::vector<std::vector<ReportRow>> nested)
{
    std::vector<ReportRow> out;
    for (auto& v : nested)
        out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
    return out;
}

Rational radial_l2_squared(const RadialFunction& g)
{
    Rational total = 0;
    for (int l = 0; l <= g.degree(); ++l)
        if (g[l] != 0)
            total += g[l] * g[l] * Rational(sphere_size(g.ctx(), l));
    return total;
}

boost::random::mt19937_64 seeded(std::uint64_t seed) { return boost::random::mt19937_64(seed); }

RadialFunction random_radial(boost::random::mt19937_64& rng, const FreeGroupCtx& ctx, int degree, int zero_in,
                             int max_num, int max_den)
{
    boost::random::uniform_int_distribution<int> zero(0, zero_in - 1), num(1, max_num), den(1, max_den);
    std::vector<Rational> c(static_cast<std::size_t>(degree) + 1, Rational(0));
    for (int n = 0; n <= degree; ++n) {
        const bool keep = n == degree || zero(rng) != 0;
        const int p = num(rng), q = den(rng);
        if (keep)
            c[static_cast<std::size_t>(n)] = Rational(p, q);
    }
    return {ctx, std::move(c)};
}

} // namespace

std::string to_string(Status status)
{
    switch (status) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::informational: return "informational";
    }
    return "?";
}

std::optional<double> ReportRow::margin() const
{
    if (status == Status::informational || lhs == 0)
        return std::nullopt;
    return rhs / lhs;
}

std::optional<double> VerificationReport::margin() const
{
    std::optional<double> out;
    for (const auto& row : rows)
        if (auto m = row.margin(); m && (!out || *m < *out))
            out = m;
    return out;
}

double round12(double x)
{
    if (!std::isfinite(x) || x == 0)
        return x;
    return std::stod(fmt::format("{:.12g}", x));
}

json family_json(const SetFamily& family)
{
    return {{"kind", to_string(family.kind)},
            {"radius", family.radius},
            {"budget", family.budget},
            {"seed", family.seed}};
}

// ---------------------------------------------------------------------------
// Test functions

RadialFunction truncated_geometric(const FreeGroupCtx& ctx, double beta, int degree)
{
    std::vector<Rational> c;
    for (int n = 0; n <= degree; ++n)
        c.push_back(exact_rational(std::pow(static_cast<double>(ctx.q()), -beta * n)));
    return {ctx, std::move(c)};
}

std::vector<SuiteFunction> theorem_suite_functions(const FreeGroupCtx& ctx, std::uint64_t seed)
{
    std::vector<SuiteFunction> out;
    for (int n = 0; n <= 6; ++n)
        out.push_back({fmt::format("chi_{}", n), RadialFunction::sphere(ctx, n)});
    for (double beta : {0.4, 0.5, 0.6})
        for (int d = 1; d <= 6; ++d)
            out.push_back({fmt::format("geometric(beta={},deg={})", beta, d), truncated_geometric(ctx, beta, d)});
    auto rng = seeded(seed);
    boost::random::uniform_int_distribution<int> degree(1, 6);
    for (int i = 0; i < 25; ++i) {
        const int d = degree(rng);
        out.push_back({fmt::format("sparse#{}", i), random_radial(rng, ctx, d, 2, 6, 3)});
    }
    return out;
}

std::vector<SuiteFunction> random_suite_functions(const FreeGroupCtx& ctx, std::size_t count, int max_degree,
                                                  std::uint64_t seed)
{
    if (max_degree < 0)
        throw DomainError("random suite degree must be nonnegative");
    auto rng = seeded(seed);
    boost::random::uniform_int_distribution<int> degree(0, max_degree);
    std::vector<SuiteFunction> out;
    for (std::size_t i = 0; i < count; ++i) {
        const int d = degree(rng);
        out.push_back({fmt::format("random#{}", i), random_radial(rng, ctx, d, 3, 9, 4)});
    }
    return out;
}

std::vector<SuiteFunction> conjecture_suite_functions(const FreeGroupCtx& ctx)
{
    std::vector<SuiteFunction> out;
    for (int n = 0; n <= 4; ++n)
        out.push_back({fmt::format("chi_{}", n), RadialFunction::sphere(ctx, n)});
    for (double beta : {0.25, 0.5, 0.75})
        out.push_back({fmt::format("geometric(beta={},deg=6)", beta), truncated_geometric(ctx, beta, 6)});
    out.push_back({"sparse{0,3}", RadialFunction{ctx, {1, 0, 0, 1}}});
    out.push_back({"sparse{1,5}", RadialFunction{ctx, {0, 1, 0, 0, 0, 1}}});
    out.push_back({"sparse{0,2,4}", RadialFunction{ctx, {1, 0, 1, 0, 1}}});
    return out;
}

// ---------------------------------------------------------------------------
// Two-sided weak-norm certificate

VerificationReport verify_thm1(std::span<const SuiteFunction> suite, std::span<const SetFamily> families,
                               std::uint64_t cap)
{
    const FreeGroupCtx& ctx = suite_ctx(suite);
    VerificationReport report;
    report.id = "thm1";
    report.inequality =
        "||f*chi_E||_2^2 / |E| <= 4 A(f) for every tested E;  A(f) / 15 <= max_m ||f*chi_m||_2^2 / |S_m|";
    report.parameters = {{"k", ctx.k()}, {"families", families_json(families)}, {"functions", suite_json(suite)},
                         {"chain_offsets", {0, 1, 2, 3, 4}}, {"lower_slack", "1/15"}};
    const CandidateSets candidates = collect(ctx, families, true);
    const PreparedFamily prepared(candidates.sets, max_degree(suite), cap);

    auto rows = parallel_map<std::vector<ReportRow>>(suite.size(), [&](std::size_t i) {
        const RadialFunction& f = suite[i].f;
        const QuadraticSurd A = a_functional(f);

        Rational best = 0;
        std::string best_set = "none";
        const EstimateReport scan = weak_estimate_21_to_2(f, prepared);
        if (scan.estimate_squared) {
            best = *scan.estimate_squared;
            best_set = set_text(*scan.argmax);
        }
        for (const auto& family : candidates.greedy) {
            const EstimateReport g = weak_estimate_21_to_2(f, family, cap);
            if (g.estimate_squared && *g.estimate_squared > best) {
                best = *g.estimate_squared;
                best_set = set_text(*g.argmax);
            }
        }
        const QuadraticSurd four_a = Rational(4) * A;
        ReportRow upper{suite[i].name + " upper",
                        {{"f", format_radial(f)}, {"A", round12(static_cast<double>(A.value()))}, {"set", best_set},
                         {"estimate_squared", format_rational(best)}},
                        to_double(best), static_cast<double>(four_a.value()), verdict(less_equal(best, four_a))};

        const int d = std::max(f.degree(), 0);
        Rational chain = 0;
        int chain_m = 2 * d;
        for (int m = 2 * d; m <= 2 * d + 4; ++m) {
            const Rational v = radial_l2_squared(convolve_radial(f, RadialFunction::sphere(ctx, m))) /
                               Rational(sphere_size(ctx, m));
            if (v > chain) {
                chain = v;
                chain_m = m;
            }
        }
        const QuadraticSurd a15 = Rational(1, 15) * A;
        ReportRow lower{suite[i].name + " lower",
                        {{"f", format_radial(f)}, {"A", round12(static_cast<double>(A.value()))}, {"m", chain_m},
                         {"chain", format_rational(chain)}},
                        static_cast<double>(a15.value()), to_double(chain), verdict(less_equal(a15, chain))};
        return std::vector<ReportRow>{std::move(upper), std::move(lower)};
    });
    report.rows = flatten(std::move(rows));
    report.summary = {{"functions", suite.size()}, {"sets", candidates.sets.size()},
                      {"greedy_families", candidates.greedy.size()}};
    finalize(report);
    return report;
}

// ---------------------------------------------------------------------------
// Distance pairing bound

VerificationReport verify_lemma1(const FreeGroupCtx& ctx, std::span<const SetFamily> families, int k_max,
                                 std::uint64_t cap)
{
    if (k_max < 0)
        throw DomainError("k_max must be nonnegative");
    VerificationReport report;
    report.id = "lemma1";
    report.inequality = "<chi_k * chi_E, chi_E> <= 2 q^[k/2] |E|";
    report.parameters = {{"k", ctx.k()}, {"families", families_json(families)}, {"k_max", k_max}};
    const CandidateSets candidates = collect(ctx, families, false);

    auto rows = parallel_map<std::vector<ReportRow>>(candidates.sets.size(), [&](std::size_t i) {
        const ElementSet& E = candidates.sets[i];
        const BigInt size = E.size();
        std::vector<std::uint64_t> hist;
        if (!E.is_radial()) {
            if (size * size > cap)
                throw BudgetExceeded(fmt::format("{} has {} pairs, over the cap of {}", candidates.labels[i],
                                                 BigInt(size * size).str(), cap));
            hist = distance_histogram(E.words(), E.words());
        }
        std::vector<ReportRow> out;
        for (int k = 0; k <= k_max; ++k) {
            const BigInt lhs = E.is_radial()
                                   ? BigInt(boost::multiprecision::numerator(pairing(RadialFunction::sphere(ctx, k), E, E)))
                                   : BigInt(static_cast<std::size_t>(k) < hist.size() ? hist[static_cast<std::size_t>(k)] : 0);
            const BigInt rhs = 2 * qpow(ctx, k / 2) * size;
            out.push_back({fmt::format("{} k={}", candidates.labels[i], k),
                           {{"set", set_text(E)}, {"size", size.str()}, {"k", k}, {"pairing", lhs.str()}},
                           to_double(lhs), to_double(rhs), verdict(lhs <= rhs)});
        }
        return out;
    });
    report.rows = flatten(std::move(rows));
    report.summary = {{"sets", candidates.sets.size()}};
    finalize(report);
    return report;
}

// ---------------------------------------------------------------------------
// Restricted pairing bound

VerificationReport verify_r22(const FreeGroupCtx& ctx, std::span<const SetFamily> families, int n_max,
                              std::uint64_t cap)
{
    if (n_max < 0)
        throw DomainError("n_max must be nonnegative");
    VerificationReport report;
    report.id = "r22";
    report.inequality = "<chi_n * chi_E, chi_F> <= 2 q^{3/2} q^{n/2} |E|^{1/2} |F|^{1/2} (sup over F solved exactly)";
    report.parameters = {{"k", ctx.k()}, {"families", families_json(families)}, {"n_max", n_max}};
    const CandidateSets candidates = collect(ctx, families, false);
    const PreparedFamily prepared(candidates.sets, n_max, cap);
    const long double q = ctx.q();
    const long double constant = 2 * std::pow(q, 1.5L);

    // ratios[i][n] = max_F <chi_n * chi_E, chi_F> / (|F|^{1/2} |E|^{1/2} q^{n/2})
    std::vector<std::vector<long double>> ratios(candidates.sets.size());
    auto rows = parallel_map<std::vector<ReportRow>>(candidates.sets.size(), [&](std::size_t i) {
        const ElementSet& E = candidates.sets[i];
        std::vector<ReportRow> out;
        if (E.empty())
            return out;
        const BigInt size = E.size();
        const long double root_size = std::sqrt(size.convert_to<long double>());
        for (int n = 0; n <= n_max; ++n) {
            const Rearrangement image = prepared.image_rearrangement(i, RadialFunction::sphere(ctx, n));
            // Exact: S_j^2 <= 4 q^{3+n} |E| j at every run endpoint j; the
            // ratio S_j / j^{1/2} peaks at run endpoints.
            const Rational scale = Rational(4 * qpow(ctx, 3 + n) * size);
            bool holds = true;
            Rational mass = 0;
            BigInt J = 0;
            for (const auto& run : image.runs()) {
                const Rational first = mass + run.value;
                holds = holds && first * first <= scale * Rational(J + 1);
                mass += run.value * run.multiplicity;
                J += run.multiplicity;
                holds = holds && mass * mass <= scale * Rational(J);
            }
            const PrefixRatio best = best_F_ratio(image, 2.0);
            const long double rhs = constant * std::pow(q, n / 2.0L) * root_size;
            ratios[i].push_back(best.ratio / (root_size * std::pow(q, n / 2.0L)));
            out.push_back({fmt::format("{} n={}", candidates.labels[i], n),
                           {{"set", set_text(E)}, {"size", size.str()}, {"n", n}, {"F_size", best.prefix.str()}},
                           static_cast<double>(best.ratio), static_cast<double>(rhs), verdict(holds)});
        }
        return out;
    });
    report.rows = flatten(std::move(rows));

    // Restricted estimate of chi_n over the same sets, scaled by q^{-n/2}. Every
    // nonempty E gives at least |S_n|^{1/2} >= q^{n/2} (take F = supp chi_n * chi_E),
    // so c = 1 is a floor.
    double band_lo = std::numeric_limits<double>::infinity(), band_hi = 0;
    for (int n = 1; n <= n_max; ++n) {
        long double best = 0;
        for (const auto& r : ratios)
            if (!r.empty())
                best = std::max(best, r[static_cast<std::size_t>(n)]);
        if (best == 0)
            continue;
        band_lo = std::min(band_lo, static_cast<double>(best));
        band_hi = std::max(band_hi, static_cast<double>(best));
        report.rows.push_back({fmt::format("band n={} lower", n), {{"n", n}, {"c", 1}}, 1.0, static_cast<double>(best),
                               verdict(best >= 1)});
        report.rows.push_back({fmt::format("band n={} upper", n), {{"n", n}}, static_cast<double>(best),
                               static_cast<double>(constant), verdict(best <= constant)});
    }
    report.summary = {{"sets", candidates.sets.size()},
                      {"band", {round12(band_lo), round12(band_hi)}},
                      {"band_floor", 1},
                      {"band_ceiling", round12(static_cast<double>(constant))}};
    finalize(report);
    return report;
}

// ---------------------------------------------------------------------------
// Restricted estimate equivalence

VerificationReport thm3_equivalence_report(std::span<const SuiteFunction> samples,
                                           std::span<const SetFamily> families, std::uint64_t cap)
{
    const FreeGroupCtx& ctx = suite_ctx(samples);
    VerificationReport report;
    report.id = "thm3";
    report.inequality = "restricted_weak_estimate(f) <= 2 q^{3/2} sum_n f_n q^{n/2}";
    report.parameters = {{"k", ctx.k()}, {"families", families_json(families)}, {"functions", suite_json(samples)}};
    const CandidateSets candidates = collect(ctx, families, true);
    const PreparedFamily prepared(candidates.sets, max_degree(samples), cap);
    const long double q = ctx.q();
    const long double constant = 2 * std::pow(q, 1.5L);

    struct Sample {
        ReportRow upper, pairs;
        double ratio = 0, pair_ratio = 0;
    };
    auto results = parallel_map<Sample>(samples.size(), [&](std::size_t i) {
        const RadialFunction& f = samples[i].f;
        EstimateReport est = restricted_weak_estimate(f, prepared);
        for (const auto& family : candidates.greedy) {
            EstimateReport g = restricted_weak_estimate(f, family, cap);
            if (g.estimate > est.estimate)
                est = std::move(g);
        }
        const long double weighted = radial_weighted_sum(f, 2.0);
        Sample s;
        s.ratio = static_cast<double>(est.estimate / weighted);
        s.upper = {samples[i].name + " upper",
                   {{"f", format_radial(f)}, {"set", est.argmax ? set_text(*est.argmax) : "none"},
                    {"weighted_sum", round12(static_cast<double>(weighted))}, {"ratio", round12(s.ratio)}},
                   static_cast<double>(est.estimate), static_cast<double>(constant * weighted),
                   verdict(est.estimate <= constant * weighted)};

        // Sphere pairs (S_n, S_m), m in {n, n + 1}, against the parity-split sums.
        const int d = std::max(f.degree(), 0);
        long double pair_best = 0;
        int best_n = 0, best_m = 0;
        for (int n = 0; n <= 2 * d + 2; ++n)
            for (int m = n; m <= n + 1; ++m) {
                const Rational v = pairing(f, ElementSet::sphere(ctx, n), ElementSet::sphere(ctx, m));
                const long double r = v.convert_to<long double>() /
                                      std::sqrt(sphere_size(ctx, n).convert_to<long double>() *
                                                sphere_size(ctx, m).convert_to<long double>());
                if (r > pair_best) {
                    pair_best = r;
                    best_n = n;
                    best_m = m;
                }
            }
        long double even = 0, odd = 0;
        for (int n = 0; n <= f.degree(); ++n)
            (n % 2 == 0 ? even : odd) += f[n].convert_to<long double>() * std::pow(q, n / 2.0L);
        const long double split = std::max(even, odd);
        s.pair_ratio = static_cast<double>(pair_best / split);
        s.pairs = {samples[i].name + " sphere pairs",
                   {{"f", format_radial(f)}, {"n", best_n}, {"m", best_m}, {"ratio", round12(s.pair_ratio)}},
                   static_cast<double>(split), static_cast<double>(pair_best), Status::informational};
        return s;
    });

    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    double pair_lo = std::numeric_limits<double>::infinity(), pair_hi = 0;
    for (auto& s : results) {
        lo = std::min(lo, s.ratio);
        hi = std::max(hi, s.ratio);
        pair_lo = std::min(pair_lo, s.pair_ratio);
        pair_hi = std::max(pair_hi, s.pair_ratio);
        report.rows.push_back(std::move(s.upper));
        report.rows.push_back(std::move(s.pairs));
    }
    const double spread = hi / lo;
    report.rows.push_back({"band spread", {{"c1", round12(lo)}, {"c2", round12(hi)}}, spread, 25.0, verdict(spread <= 25)});
    report.summary = {{"samples", samples.size()},
                      {"sets", candidates.sets.size()},
                      {"band", {round12(lo), round12(hi)}},
                      {"spread", round12(spread)},
                      {"upper_constant", round12(static_cast<double>(constant))},
                      {"sphere_pair_band", {round12(pair_lo), round12(pair_hi)}}};
    finalize(report);
    return report;
}

// ---------------------------------------------------------------------------
// Lower chain

VerificationReport thm4_lower_chain(std::span<const SuiteFunction> suite, std::span<const double> ps)
{
    const FreeGroupCtx& ctx = suite_ctx(suite);
    for (double p : ps)
        if (!(p > 1 && p < 2))
            throw DomainError(fmt::format("the lower chain needs 1 < p < 2, got {}", p));
    for (const auto& s : suite)
        for (const auto& c : s.f.coefficients())
            if (c < 0)
                throw DomainError("the lower chain needs nonnegative functions");
    VerificationReport report;
    report.id = "thm4";
    report.inequality = "(2/3)^{p'} sum_{l<=n} q^{l p'/p} f_l^{p'} <= q^{-n} ||f * chi_n||_{p'}^{p'}";
    json p_list = json::array();
    for (double p : ps)
        p_list.push_back(p);
    report.parameters = {{"k", ctx.k()}, {"p", p_list}, {"functions", suite_json(suite)}, {"offsets", {0, 1, 2, 3}},
                         {"tolerance", 1e-9}};
    const long double q = ctx.q();

    const std::size_t cells = suite.size() * ps.size();
    auto rows = parallel_map<std::vector<ReportRow>>(cells, [&](std::size_t cell) {
        const RadialFunction& f = suite[cell / ps.size()].f;
        const double p = ps[cell % ps.size()];
        const long double pc = p / (p - 1);
        std::vector<ReportRow> out;
        if (f.is_zero())
            return out;
        const long double weighted = radial_weighted_sum(f, p);
        for (int n = f.degree(); n <= f.degree() + 3; ++n) {
            const RadialFunction g = convolve_radial(f, RadialFunction::sphere(ctx, n));
            CompensatedSum norm;
            for (int l = 0; l <= g.degree(); ++l)
                if (g[l] != 0)
                    norm.add(std::pow(g[l].convert_to<long double>(), pc) *
                             sphere_size(ctx, l).convert_to<long double>());
            const long double rhs = norm.value() / std::pow(q, static_cast<long double>(n));
            CompensatedSum sum;
            for (int l = 0; l <= std::min(n, f.degree()); ++l)
                if (f[l] != 0)
                    sum.add(std::pow(q, l * pc / p) * std::pow(f[l].convert_to<long double>(), pc));
            const long double lhs = std::pow(2.0L / 3.0L, pc) * sum.value();
            out.push_back({fmt::format("{} p={} n={}", suite[cell / ps.size()].name, p, n),
                           {{"f", format_radial(f)}, {"p", p}, {"n", n},
                            {"weighted_sum", round12(static_cast<double>(weighted))}},
                           static_cast<double>(lhs), static_cast<double>(rhs), verdict(lhs <= rhs * (1 + 1e-9L))});
        }
        return out;
    });
    report.rows = flatten(std::move(rows));
    report.summary = {{"cells", cells}};
    finalize(report);
    return report;
}

// ---------------------------------------------------------------------------
// Exponent fit

VerificationReport thm5_exponent_fit(const FreeGroupCtx& ctx, double s, double t, int n_lo, int n_hi)
{
    if (!(s >= 1 && s <= 2 && t >= 2))
        throw DomainError(fmt::format("the exponent fit needs 1 <= s <= 2 <= t, got s={} t={}", s, t));
    if (n_lo < 1 || n_hi - n_lo + 1 < 8)
        throw DomainError(fmt::format("the exponent fit needs at least 8 points n >= 1, got [{}, {}]", n_lo, n_hi));
    VerificationReport report;
    report.id = "thm5";
    const double expected = 1 - 1 / s + (std::isinf(t) ? 0 : 1 / t);
    report.inequality = "|slope of log(||chi_n*f||_(2,t) / ||f||_(2,s) q^{-n/2}) vs log n - (1 - 1/s + 1/t)| <= 0.15";
    report.parameters = {{"k", ctx.k()}, {"s", number(s)}, {"t", number(t)}, {"n_lo", n_lo}, {"n_hi", n_hi}};
    const long double q = ctx.q();
    const LorentzIndex source(2, s), target(2, t);

    struct Point {
        double x, y;
    };
    auto points = parallel_map<Point>(static_cast<std::size_t>(n_hi - n_lo + 1), [&](std::size_t i) {
        const int n = n_lo + static_cast<int>(i);
        std::vector<long double> c;
        for (int j = 0; j <= 2 * n; ++j)
            c.push_back(std::pow(q, -j / 2.0L));
        const RealRadialFunction f(ctx, std::move(c));
        const RealRadialFunction image = convolve_radial(RealRadialFunction::sphere(ctx, n), f);
        const long double ratio =
            lorentz_norm(rearrange_radial(image), target) / lorentz_norm(rearrange_radial(f), source);
        return Point{std::log(static_cast<double>(n)), static_cast<double>(std::log(ratio) - n / 2.0L * std::log(q))};
    });

    double mx = 0, my = 0;
    for (const auto& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());
    double sxy = 0, sxx = 0;
    for (const auto& p : points) {
        sxy += (p.x - mx) * (p.y - my);
        sxx += (p.x - mx) * (p.x - mx);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;

    double upper_constant = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int n = n_lo + static_cast<int>(i);
        upper_constant = std::max(upper_constant, std::exp(points[i].y - expected * points[i].x));
        report.rows.push_back({fmt::format("n={}", n), {{"n", n}, {"log_scaled_ratio", round12(points[i].y)}},
                               points[i].x, points[i].y, Status::informational});
    }
    const double deviation = std::abs(slope - expected);
    report.rows.push_back({"slope",
                           {{"slope", round12(slope)}, {"expected", round12(expected)}},
                           deviation, 0.15, verdict(deviation <= 0.15)});
    report.summary = {{"slope", round12(slope)},
                      {"expected", round12(expected)},
                      {"intercept", round12(intercept)},
                      {"upper_constant", round12(upper_constant)}};
    finalize(report);
    return report;
}

// ---------------------------------------------------------------------------
// Functional scan

VerificationReport conjecture_scan(std::span<const SuiteFunction> suite, std::span<const double> s_grid)
{
    const FreeGroupCtx& ctx = suite_ctx(suite);
    VerificationReport report;
    report.id = "conjecture";
    report.inequality =
        "sum f_n f_m q^{+-(n+m)/2} (1 + min(n^{1/s'}, m^{1/s'})) against (||f*g||_(2,inf) / ||g||_(2,s))^2";
    json grid = json::array();
    for (double s : s_grid)
        grid.push_back(s);
    report.parameters = {{"k", ctx.k()}, {"s", grid}, {"functions", suite_json(suite)}, {"test_inputs", "chi_m and sum_{j<=M} q^{-j/2} chi_j, m, M <= 8"}};
    const long double q = ctx.q();

    // Radial test inputs g for the (2,s) -> (2,inf) estimate.
    std::vector<std::pair<std::string, RealRadialFunction>> inputs;
    for (int m = 0; m <= 8; ++m)
        inputs.emplace_back(fmt::format("chi_{}", m), RealRadialFunction::sphere(ctx, m));
    for (int M = 1; M <= 8; ++M) {
        std::vector<long double> c;
        for (int j = 0; j <= M; ++j)
            c.push_back(std::pow(q, -j / 2.0L));
        inputs.emplace_back(fmt::format("geometric_{}", M), RealRadialFunction(ctx, std::move(c)));
    }

    const std::size_t cells = suite.size() * s_grid.size();
    auto rows = parallel_map<ReportRow>(cells, [&](std::size_t cell) {
        const auto& entry = suite[cell / s_grid.size()];
        const double s = s_grid[cell % s_grid.size()];
        const RealRadialFunction f = to_real(entry.f);
        long double best = 0;
        std::string best_input;
        for (const auto& [name, g] : inputs) {
            const long double r = weak_norm(rearrange_radial(convolve_radial(f, g)), 2.0) /
                                  lorentz_norm(rearrange_radial(g), LorentzIndex(2, s));
            if (r > best) {
                best = r;
                best_input = name;
            }
        }
        const long double positive = conjecture_functional(entry.f, s, ExponentSign::positive);
        const long double negative = conjecture_functional(entry.f, s, ExponentSign::negative);
        return ReportRow{fmt::format("{} s={}", entry.name, s),
                         {{"f", format_radial(entry.f)}, {"s", s}, {"functional_positive", round12(static_cast<double>(positive))},
                          {"functional_negative", round12(static_cast<double>(negative))},
                          {"estimate_squared", round12(static_cast<double>(best * best))}, {"input", best_input}},
                         static_cast<double>(best * best), static_cast<double>(positive), Status::informational};
    });
    report.rows = std::move(rows);
    report.summary = {{"cells", cells}};
    finalize(report, true);
    return report;
}

// ---------------------------------------------------------------------------
// Column studies

VerificationReport p_column_study(const FreeGroupCtx& ctx, int k_max, int radius, std::uint64_t cap)
{
    if (k_max < 0 || radius < 0)
        throw DomainError("column study needs nonnegative k_max and radius");
    VerificationReport report;
    report.id = "pcolumn";
    report.inequality = "sup_{x in B_R} ||P_k delta_x||_1 <= q^[k/2]";
    report.parameters = {{"k", ctx.k()}, {"k_max", k_max}, {"radius", radius}};
    bool equality_at_even = true;
    for (int k = 0; k <= k_max; ++k) {
        const ColumnSup sup = column_l1_sup(ctx, {ColumnKind::P, k, 0}, radius, cap);
        const bool equal = BigInt(sup.sup_mass) == qpow(ctx, k / 2);
        if (k % 2 == 0)
            equality_at_even = equality_at_even && equal;
        report.rows.push_back({fmt::format("k={}", k),
                               {{"k", k}, {"argmax", to_string(sup.argmax)}, {"equality", equal},
                                {"violation", sup.violation ? json(to_string(*sup.violation)) : json(nullptr)}},
                               static_cast<double>(sup.sup_mass), static_cast<double>(sup.bound),
                               verdict(!sup.violation)});
    }
    report.summary = {{"equality_at_every_even_k", equality_at_even}};
    finalize(report);
    return report;
}

VerificationReport q_column_study(const FreeGroupCtx& ctx, int n_max, int radius, std::uint64_t cap)
{
    if (n_max < 0 || radius < 0)
        throw DomainError("column study needs nonnegative n_max and radius");
    VerificationReport report;
    report.id = "qcolumn";
    report.inequality = "sup_{x in B_R} ||Q_n^alpha delta_x||_1 <= q^{3/2 - alpha + n/2}, |alpha| <= n/2";
    report.parameters = {{"k", ctx.k()}, {"n_max", n_max}, {"radius", radius}, {"alpha_step", 0.5}};
    json gap = json::array();
    json negative_failures = json::array();
    bool nonnegative_pass = true;
    for (int n = 0; n <= n_max; ++n) {
        std::vector<double> alphas;
        for (int twice = -n; twice <= n; ++twice)
            alphas.push_back(twice / 2.0);
        if (n >= 1)
            alphas.push_back(n);
        const auto sups = column_l1_sups(ctx, n, alphas, radius, cap);
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            const double alpha = alphas[i];
            const ColumnSup& sup = sups[i];
            const bool regime = std::abs(alpha) <= n / 2.0;
            if (regime) {
                if (sup.violation) {
                    if (alpha < 0)
                        negative_failures.push_back({{"n", n}, {"alpha", alpha}, {"x", to_string(*sup.violation)}});
                    else
                        nonnegative_pass = false;
                }
                report.rows.push_back(
                    {fmt::format("n={} alpha={}", n, alpha),
                     {{"n", n}, {"alpha", alpha}, {"argmax", to_string(sup.argmax)},
                      {"violation", sup.violation ? json(to_string(*sup.violation)) : json(nullptr)}},
                     static_cast<double>(sup.sup_mass), static_cast<double>(sup.bound), verdict(!sup.violation)});
                continue;
            }
            // Full cancellation: x = a^n and w = x^{-1} put delta_e in the column.
            ReducedWord x;
            {
                std::vector<Letter> letters(static_cast<std::size_t>(n), Letter{0});
                x = normalize(ctx, letters);
            }
            const ColumnParams params{ColumnKind::Q, n, alpha};
            const FunctionOnGroup column = truncated_column(ctx, params, x, cap);
            const auto mass = static_cast<std::uint64_t>(column.support_size());
            const bool violated = exceeds_column_bound(ctx, params, mass);
            if (violated)
                gap.push_back({{"n", n}, {"alpha", alpha}, {"x", to_string(x)}, {"mass", mass},
                               {"bound", round12(static_cast<double>(sup.bound))}});
            report.rows.push_back(
                {fmt::format("n={} alpha={} witness", n, alpha),
                 {{"n", n}, {"alpha", alpha}, {"x", to_string(x)}, {"contains_identity", column.at(ReducedWord{}) == 1},
                  {"violated", violated},
                  {"first_violation", sup.violation ? json(to_string(*sup.violation)) : json(nullptr)},
                  {"sup_mass", sup.sup_mass}},
                 static_cast<double>(mass), static_cast<double>(sup.bound), Status::informational});
        }
    }
    report.summary = {{"cancellation_witnesses", gap},
                      {"nonnegative_alpha_pass", nonnegative_pass},
                      {"negative_alpha_violations", negative_failures}};
    finalize(report);
    return report;
}

// ---------------------------------------------------------------------------
// Emission

nlohmann::json reports_to_json(std::span<const VerificationReport> reports)
{
    json out = json::array();
    for (const auto& r : reports) {
        json rows = json::array();
        for (const auto& row : r.rows) {
            const auto m = row.margin();
            rows.push_back({{"instance", row.instance},
                            {"params", row.params},
                            {"lhs", number(row.lhs)},
                            {"rhs", number(row.rhs)},
                            {"margin", m ? number(*m) : json(nullptr)},
                            {"status", to_string(row.status)}});
        }
        const auto m = r.margin();
        out.push_back({{"id", r.id},
                       {"parameters", r.parameters},
                       {"inequality", r.inequality},
                       {"rendered", r.rendered},
                       {"status", to_string(r.status)},
                       {"margin", m ? number(*m) : json(nullptr)},
                       {"witness", r.witness ? json(*r.witness) : json(nullptr)},
                       {"summary", r.summary},
                       {"rows", rows}});
    }
    return out;
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_number(double x)
{
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    return fmt::format("{:.12g}", x);
}

} // namespace

std::string reports_to_csv(std::span<const VerificationReport> reports)
{
    std::string out = "id,params,lhs,rhs,margin,status\n";
    for (const auto& r : reports)
        for (const auto& row : r.rows) {
            const auto m = row.margin();
            out += fmt::format("{},{},{},{},{},{}\n", csv_field(r.id + "/" + row.instance), csv_field(row.params.dump()),
                               csv_number(row.lhs), csv_number(row.rhs), m ? csv_number(*m) : "",
                               to_string(row.status));
        }
    return out;
}

} // namespace fgw
