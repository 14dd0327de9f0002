#include "fgw/group_operators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <unordered_map>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <fmt/format.h>

#include "fgw/parallel.hpp"

namespace fgw {

namespace {

void require_same_ctx(const FreeGroupCtx& a, const FreeGroupCtx& b)
{
    if (!(a == b))
        throw ContextMismatch("operands live in different free groups");
}

void require_nonnegative(const RadialFunction& f)
{
    for (const auto& c : f.coefficients())
        if (c < 0)
            throw DomainError("estimators need a nonnegative radial function");
}

} // namespace

// ---------------------------------------------------------------------------
// ElementSet

ElementSet ElementSet::from_words(const FreeGroupCtx& ctx, std::vector<ReducedWord> words)
{
    ElementSet e(ctx, false);
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    e.words_ = std::move(words);
    return e;
}

ElementSet ElementSet::sphere_union(const FreeGroupCtx& ctx, std::vector<int> radii)
{
    ElementSet e(ctx, true);
    for (int r : radii)
        if (r < 0)
            throw DomainError("sphere radius must be nonnegative");
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    e.radii_ = std::move(radii);
    return e;
}

ElementSet ElementSet::ball(const FreeGroupCtx& ctx, int radius)
{
    std::vector<int> radii(static_cast<std::size_t>(radius) + 1);
    std::iota(radii.begin(), radii.end(), 0);
    return sphere_union(ctx, std::move(radii));
}

const std::vector<ReducedWord>& ElementSet::words() const
{
    if (radial_)
        throw std::logic_error("sphere unions are not stored as word lists");
    return words_;
}

std::vector<ReducedWord> ElementSet::enumerate(std::uint64_t cap) const
{
    if (!radial_)
        return words_;
    if (size() > cap)
        throw BudgetExceeded(fmt::format("{} exceeds the cap of {} elements", describe(), cap));
    std::vector<ReducedWord> out;
    for (int r : radii_) {
        auto s = enumerate_sphere(ctx_, r, cap);
        out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
    }
    return out;
}

BigInt ElementSet::size() const
{
    if (!radial_)
        return words_.size();
    BigInt total = 0;
    for (int r : radii_)
        total += sphere_size(ctx_, r);
    return total;
}

int ElementSet::max_length() const noexcept
{
    if (radial_)
        return radii_.empty() ? 0 : radii_.back();
    return words_.empty() ? 0 : static_cast<int>(words_.back().length());
}

RadialFunction ElementSet::indicator_radial() const
{
    if (!radial_)
        throw std::logic_error("explicit sets have no radial indicator");
    RadialFunction f(ctx_);
    for (int r : radii_)
        f += RadialFunction::sphere(ctx_, r);
    return f;
}

FunctionOnGroup ElementSet::indicator(std::uint64_t cap) const
{
    FunctionOnGroup g(ctx_);
    for (const auto& w : enumerate(cap))
        g.set(w, 1);
    return g;
}

std::string ElementSet::describe() const
{
    std::string out = radial_ ? "S{" : "{";
    bool first = true;
    if (radial_) {
        for (int r : radii_) {
            out += first ? "" : ",";
            out += std::to_string(r);
            first = false;
        }
    } else {
        for (const auto& w : words_) {
            out += first ? "" : ",";
            out += to_string(w);
            first = false;
        }
    }
    return out + "}";
}

// ---------------------------------------------------------------------------
// Families

std::string to_string(FamilyKind kind)
{
    switch (kind) {
    case FamilyKind::spheres: return "spheres";
    case FamilyKind::balls: return "balls";
    case FamilyKind::sphere_unions: return "sphere-unions";
    case FamilyKind::exhaustive: return "exhaustive";
    case FamilyKind::random_subsets: return "random-subsets";
    case FamilyKind::greedy: return "greedy";
    }
    return "?";
}

FamilyKind parse_family_kind(std::string_view name)
{
    for (auto kind : {FamilyKind::spheres, FamilyKind::balls, FamilyKind::sphere_unions, FamilyKind::exhaustive,
                      FamilyKind::random_subsets, FamilyKind::greedy})
        if (to_string(kind) == name)
            return kind;
    throw std::invalid_argument(fmt::format("unknown set family '{}'", name));
}

std::vector<ElementSet> generate_family(const FreeGroupCtx& ctx, const SetFamily& family)
{
    const int R = family.radius;
    if (R < 0)
        throw DomainError("family radius must be nonnegative");
    auto over_budget = [&](const BigInt& count) {
        return BudgetExceeded(fmt::format("family {} of radius {} has {} sets, budget {}", to_string(family.kind), R,
                                          count.str(), family.budget));
    };
    std::vector<ElementSet> out;
    switch (family.kind) {
    case FamilyKind::spheres:
    case FamilyKind::balls:
        if (static_cast<std::uint64_t>(R) + 1 > family.budget)
            throw over_budget(R + 1);
        for (int r = 0; r <= R; ++r)
            out.push_back(family.kind == FamilyKind::spheres ? ElementSet::sphere(ctx, r) : ElementSet::ball(ctx, r));
        break;
    case FamilyKind::sphere_unions: {
        if (R > 62 || (std::uint64_t{1} << (R + 1)) - 1 > family.budget)
            throw over_budget((BigInt(1) << (R + 1)) - 1);
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << (R + 1)); ++mask) {
            std::vector<int> radii;
            for (int r = 0; r <= R; ++r)
                if (mask >> r & 1u)
                    radii.push_back(r);
            out.push_back(ElementSet::sphere_union(ctx, std::move(radii)));
        }
        break;
    }
    case FamilyKind::exhaustive: {
        const BigInt n = ball_size(ctx, R);
        if (n > 62 || (BigInt(1) << static_cast<unsigned>(n)) > family.budget)
            throw over_budget(n > 62 ? BigInt(-1) : BigInt(1) << static_cast<unsigned>(n));
        const auto pool = enumerate_ball(ctx, R);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pool.size()); ++mask) {
            std::vector<ReducedWord> words;
            for (std::size_t i = 0; i < pool.size(); ++i)
                if (mask >> i & 1u)
                    words.push_back(pool[i]);
            out.push_back(ElementSet::from_words(ctx, std::move(words)));
        }
        break;
    }
    case FamilyKind::random_subsets: {
        const auto pool = enumerate_ball(ctx, R);
        boost::random::mt19937_64 rng(family.seed);
        std::vector<std::size_t> idx(pool.size());
        for (std::uint64_t t = 0; t < family.budget; ++t) {
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            boost::random::uniform_int_distribution<std::size_t> size_dist(1, pool.size());
            const std::size_t size = size_dist(rng);
            for (std::size_t j = 0; j < size; ++j) {
                boost::random::uniform_int_distribution<std::size_t> pick(j, pool.size() - 1);
                std::swap(idx[j], idx[pick(rng)]);
            }
            std::vector<ReducedWord> words;
            words.reserve(size);
            for (std::size_t j = 0; j < size; ++j)
                words.push_back(pool[idx[j]]);
            out.push_back(ElementSet::from_words(ctx, std::move(words)));
        }
        break;
    }
    case FamilyKind::greedy:
        throw std::invalid_argument("the greedy family has no fixed candidate list");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Convolution and pairings

FunctionOnGroup left_convolve(const RadialFunction& f, const FunctionOnGroup& g, std::uint64_t cap)
{
    require_same_ctx(f.ctx(), g.ctx());
    FunctionOnGroup out(g.ctx());
    if (f.is_zero() || g.empty())
        return out;
    const int reach = f.degree() + static_cast<int>(g.max_length());
    if (ball_size(f.ctx(), reach) > cap)
        throw BudgetExceeded(fmt::format("convolution support B_{} exceeds the cap of {}", reach, cap));
    std::unordered_map<ReducedWord, Rational> acc;
    for (int n = 0; n <= f.degree(); ++n) {
        if (f[n] == 0)
            continue;
        const auto sphere = enumerate_sphere(f.ctx(), n, cap);
        for (const auto& [x, v] : g.entries()) {
            const Rational weight = f[n] * v;
            for (const auto& w : sphere)
                acc[mul(w, x)] += weight;
        }
    }
    for (auto& [z, v] : acc)
        out.add(z, v);
    return out;
}

std::vector<std::uint64_t> distance_histogram(const std::vector<ReducedWord>& E, const std::vector<ReducedWord>& F)
{
    std::size_t reach = 0;
    for (const auto& x : E)
        reach = std::max(reach, x.length());
    std::size_t reach_f = 0;
    for (const auto& y : F)
        reach_f = std::max(reach_f, y.length());
    std::vector<std::uint64_t> hist(reach + reach_f + 1, 0);
    for (const auto& x : E)
        for (const auto& y : F)
            ++hist[quotient_length(y, x)];
    return hist;
}

Rational pairing(const RadialFunction& f, const ElementSet& E, const ElementSet& F)
{
    require_same_ctx(f.ctx(), E.ctx());
    require_same_ctx(f.ctx(), F.ctx());
    const FreeGroupCtx& ctx = f.ctx();
    if (E.is_radial()) {
        const RadialFunction h = convolve_radial(f, E.indicator_radial());
        Rational total = 0;
        if (F.is_radial()) {
            for (int l : F.radii())
                total += h[l] * Rational(sphere_size(ctx, l));
        } else {
            for (const auto& y : F.words())
                total += h[static_cast<int>(y.length())];
        }
        return total;
    }
    if (F.is_radial())
        return pairing(f, F, E);  // lambda(f) is self-adjoint for real radial f
    const auto hist = distance_histogram(E.words(), F.words());
    Rational total = 0;
    for (std::size_t d = 0; d < hist.size(); ++d)
        if (hist[d] != 0)
            total += f[static_cast<int>(d)] * hist[d];
    return total;
}

// ---------------------------------------------------------------------------
// SetProfile

namespace {

/// Length of the longest common suffix of a and b.
std::size_t common_suffix(std::span<const Letter> a, std::span<const Letter> b) noexcept
{
    std::size_t c = 0;
    while (c < a.size() && c < b.size() && a[a.size() - 1 - c] == b[b.size() - 1 - c])
        ++c;
    return c;
}

} // namespace

SetProfile SetProfile::build(const ElementSet& E, int degree, std::uint64_t cap)
{
    if (degree < 0)
        throw DomainError("profile degree must be nonnegative");
    const FreeGroupCtx& ctx = E.ctx();
    const auto words = E.enumerate(cap);
    const int R = E.max_length();
    const int reach = R + degree;
    if (ball_size(ctx, reach) >= BigInt(1) << 63)
        throw BudgetExceeded(fmt::format("convolution support B_{} is too large to count", reach));
    const std::size_t width = static_cast<std::size_t>(degree) + 1;

    // For |z| = L >= R the product z x^{-1} cancels exactly the common suffix of
    // z and x, which has at most R letters. So the count vector of z depends only
    // on L and the last R letters sigma of z, and q^{L-R} words share a given
    // (L, sigma) when R >= 1. Words shorter than R are handled one by one.
    std::map<std::vector<std::uint32_t>, std::uint64_t> grouped;
    std::vector<std::uint32_t> counts(width);
    auto emit = [&](std::uint64_t multiplicity) {
        if (std::any_of(counts.begin(), counts.end(), [](std::uint32_t c) { return c != 0; }))
            grouped[counts] += multiplicity;
    };

    for (int L = 0; L < R; ++L) {
        SphereStream stream(ctx, L, cap);
        while (auto z = stream.next()) {
            std::fill(counts.begin(), counts.end(), 0u);
            for (const auto& x : words)
                if (const auto d = quotient_length(*z, x); d < width)
                    ++counts[d];
            emit(1);
        }
    }

    std::vector<std::size_t> shared(words.size());
    SphereStream tails(ctx, R, cap);
    while (auto sigma = tails.next()) {
        for (std::size_t i = 0; i < words.size(); ++i)
            shared[i] = common_suffix(sigma->letters(), words[i].letters());
        for (int L = R; L <= reach; ++L) {
            std::fill(counts.begin(), counts.end(), 0u);
            for (std::size_t i = 0; i < words.size(); ++i)
                if (const auto d = static_cast<std::size_t>(L) + words[i].length() - 2 * shared[i]; d < width)
                    ++counts[d];
            emit(R == 0 ? static_cast<std::uint64_t>(sphere_size(ctx, L))
                        : static_cast<std::uint64_t>(boost::multiprecision::pow(BigInt(ctx.q()),
                                                                                static_cast<unsigned>(L - R))));
        }
    }

    SetProfile p;
    p.degree_ = degree;
    p.rows_.reserve(grouped.size());
    for (auto& [vec, mult] : grouped)
        p.rows_.push_back({vec, mult});
    p.compute_gram();
    return p;
}

namespace {

/// f = F / D with integer F_n and D > 0, so row values are integer dot products.
struct ScaledRadial {
    std::vector<BigInt> numerators;
    BigInt denominator = 1;
    bool fits_int64 = true;

    explicit ScaledRadial(const RadialFunction& f)
    {
        for (const auto& c : f.coefficients())
            denominator = boost::multiprecision::lcm(denominator, boost::multiprecision::denominator(c));
        const BigInt limit = BigInt(1) << 62;
        for (const auto& c : f.coefficients()) {
            numerators.push_back(boost::multiprecision::numerator(c) * (denominator / boost::multiprecision::denominator(c)));
            fits_int64 = fits_int64 && abs(numerators.back()) < limit;
        }
    }
};

using Wide = __int128;

} // namespace

Rearrangement SetProfile::image_rearrangement(const RadialFunction& f) const
{
    if (f.degree() > degree_)
        throw DomainError("radial function exceeds the profile degree");
    const ScaledRadial scaled(f);
    const std::size_t terms = scaled.numerators.size();
    std::vector<Run<Rational>> runs;
    if (scaled.fits_int64 && terms <= 64) {
        // |F_n| < 2^62 and counts < 2^32, so at most 64 terms stay below 2^100.
        std::vector<std::int64_t> F;
        for (const auto& v : scaled.numerators)
            F.push_back(static_cast<std::int64_t>(v));
        std::vector<std::pair<Wide, std::uint64_t>> values;
        values.reserve(rows_.size());
        for (const auto& row : rows_) {
            Wide v = 0;
            for (std::size_t n = 0; n < terms; ++n)
                v += static_cast<Wide>(F[n]) * row.counts[n];
            values.emplace_back(v < 0 ? -v : v, row.multiplicity);
        }
        std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        auto to_big = [](Wide v) {
            const auto hi = static_cast<std::uint64_t>(static_cast<unsigned __int128>(v) >> 64);
            return (BigInt(hi) << 64) + BigInt(static_cast<std::uint64_t>(v));
        };
        for (std::size_t i = 0; i < values.size();) {
            BigInt multiplicity = 0;
            std::size_t j = i;
            for (; j < values.size() && values[j].first == values[i].first; ++j)
                multiplicity += values[j].second;
            runs.push_back({Rational(to_big(values[i].first), scaled.denominator), multiplicity});
            i = j;
        }
    } else {
        runs.reserve(rows_.size());
        for (const auto& row : rows_) {
            BigInt v = 0;
            for (std::size_t n = 0; n < terms; ++n)
                v += scaled.numerators[n] * row.counts[n];
            runs.push_back({Rational(v, scaled.denominator), row.multiplicity});
        }
    }
    return Rearrangement::from_pairs(std::move(runs));
}

Rational SetProfile::image_l2_squared(const RadialFunction& f) const
{
    if (f.degree() > degree_)
        throw DomainError("radial function exceeds the profile degree");
    // ||f * chi_E||^2 = sum_{n,m} f_n f_m <chi_n * chi_E, chi_m * chi_E>.
    const ScaledRadial scaled(f);
    const std::size_t width = static_cast<std::size_t>(degree_) + 1;
    BigInt total = 0;
    for (std::size_t n = 0; n < scaled.numerators.size(); ++n) {
        if (scaled.numerators[n] == 0)
            continue;
        BigInt inner = 0;
        for (std::size_t m = 0; m < scaled.numerators.size(); ++m)
            if (scaled.numerators[m] != 0)
                inner += scaled.numerators[m] * gram_[n * width + m];
        total += scaled.numerators[n] * inner;
    }
    return Rational(total, scaled.denominator * scaled.denominator);
}

BigInt SetProfile::gram(int n, int m) const
{
    if (n < 0 || m < 0 || n > degree_ || m > degree_)
        throw DomainError("gram index outside the profile degree");
    return gram_[static_cast<std::size_t>(n) * (static_cast<std::size_t>(degree_) + 1) + static_cast<std::size_t>(m)];
}

void SetProfile::compute_gram()
{
    const std::size_t width = static_cast<std::size_t>(degree_) + 1;
    gram_.assign(width * width, BigInt(0));
    for (std::size_t n = 0; n < width; ++n)
        for (std::size_t m = n; m < width; ++m) {
            unsigned __int128 acc = 0;
            bool overflow = false;
            for (const auto& row : rows_) {
                unsigned __int128 term = static_cast<unsigned __int128>(row.counts[n]) * row.counts[m];
                overflow = overflow || __builtin_mul_overflow(term, row.multiplicity, &term) ||
                           __builtin_add_overflow(acc, term, &acc);
            }
            BigInt value;
            if (overflow) {
                for (const auto& row : rows_)
                    value += BigInt(row.counts[n]) * row.counts[m] * row.multiplicity;
            } else {
                value = (BigInt(static_cast<std::uint64_t>(acc >> 64)) << 64) + BigInt(static_cast<std::uint64_t>(acc));
            }
            gram_[n * width + m] = value;
            gram_[m * width + n] = value;
        }
}

// ---------------------------------------------------------------------------
// Images of sets

Rearrangement image_rearrangement(const RadialFunction& f, const ElementSet& E, std::uint64_t cap)
{
    require_same_ctx(f.ctx(), E.ctx());
    if (E.is_radial())
        return rearrange_radial(convolve_radial(f, E.indicator_radial()));
    return SetProfile::build(E, std::max(f.degree(), 0), cap).image_rearrangement(f);
}

Rational image_l2_squared(const RadialFunction& f, const ElementSet& E, std::uint64_t cap)
{
    require_same_ctx(f.ctx(), E.ctx());
    if (E.is_radial()) {
        const RadialFunction h = convolve_radial(f, E.indicator_radial());
        Rational total = 0;
        for (int l = 0; l <= h.degree(); ++l)
            total += h[l] * h[l] * Rational(sphere_size(f.ctx(), l));
        return total;
    }
    return SetProfile::build(E, std::max(f.degree(), 0), cap).image_l2_squared(f);
}

PreparedFamily::PreparedFamily(const FreeGroupCtx& ctx, const SetFamily& family, int max_degree, std::uint64_t cap)
    : family_(family), max_degree_(max_degree), sets_(generate_family(ctx, family))
{
    prepare(cap);
}

PreparedFamily::PreparedFamily(std::vector<ElementSet> sets, int max_degree, std::uint64_t cap)
    : max_degree_(max_degree), sets_(std::move(sets))
{
    prepare(cap);
}

void PreparedFamily::prepare(std::uint64_t cap)
{
    if (max_degree_ < 0)
        throw DomainError("family degree must be nonnegative");
    profiles_.resize(sets_.size());
    parallel_for(sets_.size(), [&](std::size_t i) {
        if (!sets_[i].is_radial())
            profiles_[i] = SetProfile::build(sets_[i], max_degree_, cap);
    });
}

Rearrangement PreparedFamily::image_rearrangement(std::size_t i, const RadialFunction& f) const
{
    const auto& E = sets_.at(i);
    require_same_ctx(f.ctx(), E.ctx());
    if (E.is_radial())
        return rearrange_radial(convolve_radial(f, E.indicator_radial()));
    return profiles_[i]->image_rearrangement(f);
}

Rational PreparedFamily::image_l2_squared(std::size_t i, const RadialFunction& f) const
{
    const auto& E = sets_.at(i);
    if (E.is_radial())
        return fgw::image_l2_squared(f, E);
    require_same_ctx(f.ctx(), E.ctx());
    return profiles_[i]->image_l2_squared(f);
}

// ---------------------------------------------------------------------------
// Estimators

PrefixRatio best_F_ratio(const Rearrangement& r, double p)
{
    if (!(p > 1))
        throw DomainError(fmt::format("best_F_ratio needs p > 1, got {}", p));
    const long double beta = 1.0L - 1.0L / p;  // 1/p'
    PrefixRatio best;
    Rational mass = 0;
    BigInt J = 0;
    auto consider = [&](const Rational& prefix_mass, const BigInt& j) {
        const long double ratio =
            prefix_mass.convert_to<long double>() / std::pow(j.convert_to<long double>(), beta);
        if (ratio > best.ratio) {
            best.ratio = ratio;
            best.prefix = j;
        }
    };
    for (const auto& run : r.runs()) {
        // Within a run the ratio is quasi-convex in j, so only the endpoints matter.
        consider(mass + run.value, J + 1);
        mass += run.value * run.multiplicity;
        J += run.multiplicity;
        if (run.multiplicity > 1)
            consider(mass, J);
    }
    return best;
}

PrefixRatio best_F_ratio(const FunctionOnGroup& g, double p)
{
    for (const auto& [w, v] : g.entries())
        if (v < 0)
            throw DomainError("best_F_ratio needs a nonnegative function");
    return best_F_ratio(rearrange(g), p);
}

namespace {

struct Candidate {
    bool valid = false;
    long double value = 0;
    std::optional<Rational> exact;  // exact square of value, when known
    BigInt prefix = 0;
};

bool better(const Candidate& a, const Candidate& b)
{
    if (!a.valid)
        return false;
    if (!b.valid)
        return true;
    if (a.exact && b.exact)
        return *a.exact > *b.exact;
    return a.value > b.value;
}

Candidate restricted_value(const Rearrangement& image, const BigInt& size)
{
    const PrefixRatio pr = best_F_ratio(image, 2.0);
    return {true, pr.ratio / std::sqrt(size.convert_to<long double>()), std::nullopt, pr.prefix};
}

Candidate weak_value(const Rational& l2sq, const BigInt& size)
{
    const Rational sq = l2sq / Rational(size);
    return {true, std::sqrt(sq.convert_to<long double>()), sq, 0};
}

template <class Eval>
EstimateReport scan_family(const PreparedFamily& family, Eval&& eval)
{
    auto results = parallel_map<Candidate>(family.size(), [&](std::size_t i) {
        const auto& E = family.set(i);
        return E.empty() ? Candidate{} : eval(i);
    });
    EstimateReport report;
    report.family = family.family();
    report.candidates = family.size();
    Candidate best;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (better(results[i], best)) {
            best = results[i];
            report.argmax = family.set(i);
        }
    }
    report.estimate = best.value;
    report.estimate_squared = best.exact;
    report.prefix = best.prefix;
    return report;
}

/// Grows E from {1} one element of B_R at a time, taking the best improvement.
template <class Eval>
EstimateReport greedy_search(const RadialFunction& f, const SetFamily& family, std::uint64_t cap, Eval&& eval)
{
    const FreeGroupCtx& ctx = f.ctx();
    const auto pool = enumerate_ball(ctx, family.radius, cap);
    const int degree = std::max(f.degree(), 0);
    std::vector<ReducedWord> current{ReducedWord{}};
    auto score = [&](const std::vector<ReducedWord>& words) {
        const ElementSet E = ElementSet::from_words(ctx, words);
        return eval(SetProfile::build(E, degree, cap), E);
    };
    Candidate best = score(current);
    EstimateReport report;
    report.family = family;
    report.candidates = 1;
    for (std::uint64_t step = 0; step < family.budget; ++step) {
        std::vector<std::size_t> options;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (!std::binary_search(current.begin(), current.end(), pool[i]))
                options.push_back(i);
        if (options.empty())
            break;
        auto results = parallel_map<Candidate>(options.size(), [&](std::size_t t) {
            auto words = current;
            words.push_back(pool[options[t]]);
            return score(words);
        });
        report.candidates += options.size();
        std::size_t pick = options.size();
        Candidate step_best = best;
        for (std::size_t t = 0; t < results.size(); ++t)
            if (better(results[t], step_best)) {
                step_best = results[t];
                pick = t;
            }
        if (pick == options.size())
            break;
        current.push_back(pool[options[pick]]);
        std::sort(current.begin(), current.end());
        best = step_best;
    }
    report.argmax = ElementSet::from_words(ctx, current);
    report.estimate = best.value;
    report.estimate_squared = best.exact;
    report.prefix = best.prefix;
    return report;
}

} // namespace

EstimateReport restricted_weak_estimate(const RadialFunction& f, const PreparedFamily& family)
{
    require_nonnegative(f);
    return scan_family(family, [&](std::size_t i) {
        return restricted_value(family.image_rearrangement(i, f), family.set(i).size());
    });
}

EstimateReport restricted_weak_estimate(const RadialFunction& f, const SetFamily& family, std::uint64_t cap)
{
    require_nonnegative(f);
    if (family.kind == FamilyKind::greedy)
        return greedy_search(f, family, cap, [&](const SetProfile& p, const ElementSet& E) {
            return restricted_value(p.image_rearrangement(f), E.size());
        });
    return restricted_weak_estimate(f, PreparedFamily(f.ctx(), family, std::max(f.degree(), 0), cap));
}

EstimateReport weak_estimate_21_to_2(const RadialFunction& f, const PreparedFamily& family)
{
    require_nonnegative(f);
    return scan_family(family, [&](std::size_t i) {
        return weak_value(family.image_l2_squared(i, f), family.set(i).size());
    });
}

EstimateReport weak_estimate_21_to_2(const RadialFunction& f, const SetFamily& family, std::uint64_t cap)
{
    require_nonnegative(f);
    if (family.kind == FamilyKind::greedy)
        return greedy_search(f, family, cap, [&](const SetProfile& p, const ElementSet& E) {
            return weak_value(p.image_l2_squared(f), E.size());
        });
    return weak_estimate_21_to_2(f, PreparedFamily(f.ctx(), family, std::max(f.degree(), 0), cap));
}

// ---------------------------------------------------------------------------
// Truncated columns

bool q_admissible(const FreeGroupCtx& ctx, double alpha, std::size_t x_len, std::size_t y_len)
{
    if (y_len == 0)
        return true;
    const double twice = 2 * alpha;
    if (twice == std::floor(twice) && std::abs(twice) < 4096) {
        // q^alpha |y| <= |x|  <=>  q^{2 alpha} |y|^2 <= |x|^2
        const auto a = static_cast<long>(twice);
        const BigInt qa = boost::multiprecision::pow(BigInt(ctx.q()), static_cast<unsigned>(std::abs(a)));
        const BigInt y2 = BigInt(y_len) * y_len;
        const BigInt x2 = BigInt(x_len) * x_len;
        return a >= 0 ? qa * y2 <= x2 : y2 <= x2 * qa;
    }
    return std::pow(static_cast<long double>(ctx.q()), static_cast<long double>(alpha)) * y_len <= x_len;
}

long double column_bound(const FreeGroupCtx& ctx, const ColumnParams& params)
{
    const long double q = ctx.q();
    if (params.kind == ColumnKind::P)
        return std::pow(q, static_cast<long double>(params.length / 2));
    return std::pow(q, 1.5L - params.alpha + params.length / 2.0L);
}

bool exceeds_column_bound(const FreeGroupCtx& ctx, const ColumnParams& params, std::uint64_t mass)
{
    if (params.kind == ColumnKind::P)
        return BigInt(mass) > boost::multiprecision::pow(BigInt(ctx.q()), static_cast<unsigned>(params.length / 2));
    const double twice_exp = 3 - 2 * params.alpha + params.length;  // 2 (3/2 - alpha + n/2)
    if (twice_exp == std::floor(twice_exp) && std::abs(twice_exp) < 4096) {
        const auto e = static_cast<long>(twice_exp);
        const BigInt qe = boost::multiprecision::pow(BigInt(ctx.q()), static_cast<unsigned>(std::abs(e)));
        const BigInt m2 = BigInt(mass) * mass;
        return e >= 0 ? m2 > qe : m2 * qe > 1;
    }
    return mass > column_bound(ctx, params);
}

namespace {


bool column_admits(const FreeGroupCtx& ctx, const ColumnParams& params, std::size_t x_len, std::size_t z_len)
{
    if (params.kind == ColumnKind::P)
        return z_len <= x_len;
    return q_admissible(ctx, params.alpha, x_len, z_len);
}

} // namespace

FunctionOnGroup truncated_column(const FreeGroupCtx& ctx, const ColumnParams& params, const ReducedWord& x,
                                 std::uint64_t cap)
{
    FunctionOnGroup column(ctx);
    SphereStream stream(ctx, params.length, cap);
    while (auto w = stream.next()) {
        ReducedWord z = mul(*w, x);
        if (column_admits(ctx, params, x.length(), z.length()))
            column.add(z, 1);
    }
    return column;
}

namespace {

/// tallies[i][l] = #{w in S_length : |w x_i| = l} for every x_i in B_radius.
std::vector<std::vector<std::uint64_t>> product_length_tallies(const std::vector<ReducedWord>& ball,
                                                               const std::vector<ReducedWord>& sphere,
                                                               std::size_t reach)
{
    return parallel_map<std::vector<std::uint64_t>>(ball.size(), [&](std::size_t i) {
        const auto& x = ball[i];
        std::vector<std::uint64_t> by_length(reach + 1, 0);
        for (const auto& w : sphere)
            ++by_length[w.length() + x.length() - 2 * cancellation_depth(w, x)];
        return by_length;
    });
}

ColumnSup sup_from_tallies(const FreeGroupCtx& ctx, const ColumnParams& params, const std::vector<ReducedWord>& ball,
                           const std::vector<std::vector<std::uint64_t>>& tallies, int radius, std::size_t reach)
{
    // admits[x_len][z_len]
    std::vector<std::vector<char>> admits(static_cast<std::size_t>(radius) + 1, std::vector<char>(reach + 1));
    for (std::size_t xl = 0; xl < admits.size(); ++xl)
        for (std::size_t zl = 0; zl <= reach; ++zl)
            admits[xl][zl] = column_admits(ctx, params, xl, zl);
    ColumnSup out;
    out.bound = column_bound(ctx, params);
    for (std::size_t i = 0; i < ball.size(); ++i) {
        std::uint64_t mass = 0;
        for (std::size_t zl = 0; zl <= reach; ++zl)
            if (admits[ball[i].length()][zl])
                mass += tallies[i][zl];
        if (i == 0 || mass > out.sup_mass) {
            out.sup_mass = mass;
            out.argmax = ball[i];
        }
        if (!out.violation && exceeds_column_bound(ctx, params, mass))
            out.violation = ball[i];
    }
    return out;
}

} // namespace

ColumnSup column_l1_sup(const FreeGroupCtx& ctx, const ColumnParams& params, int radius, std::uint64_t cap)
{
    const auto ball = enumerate_ball(ctx, radius, cap);
    const auto sphere = enumerate_sphere(ctx, params.length, cap);
    const std::size_t reach = static_cast<std::size_t>(radius + params.length);
    // |w x| depends only on the cancellation depth, so tally lengths first.
    return sup_from_tallies(ctx, params, ball, product_length_tallies(ball, sphere, reach), radius, reach);
}

std::vector<ColumnSup> column_l1_sups(const FreeGroupCtx& ctx, int length, std::span<const double> alphas, int radius,
                                      std::uint64_t cap)
{
    const auto ball = enumerate_ball(ctx, radius, cap);
    const auto sphere = enumerate_sphere(ctx, length, cap);
    const std::size_t reach = static_cast<std::size_t>(radius + length);
    const auto tallies = product_length_tallies(ball, sphere, reach);
    std::vector<ColumnSup> out;
    for (double alpha : alphas)
        out.push_back(sup_from_tallies(ctx, {ColumnKind::Q, length, alpha}, ball, tallies, radius, reach));
    return out;
}

} // namespace fgw
