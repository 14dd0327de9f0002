#include "fgw/lorentz.hpp"

#include <cmath>
#include <map>

#include <fmt/format.h>

namespace fgw {

namespace {

template <class V>
long double as_real(const V& v)
{
    if constexpr (std::is_same_v<V, Rational>)
        return v.template convert_to<long double>();
    else
        return v;
}

long double as_real(const BigInt& v) { return v.convert_to<long double>(); }

/// (J + m)^e - J^e without cancellation when m << J.
long double power_increment(long double J, long double m, long double e)
{
    if (J == 0)
        return std::pow(m, e);
    return std::pow(J, e) * std::expm1(e * std::log1p(m / J));
}

} // namespace

LorentzIndex::LorentzIndex(double p, double s) : p_(p), s_(s)
{
    if (!(p > 1) || !std::isfinite(p))
        throw DomainError(fmt::format("Lorentz index needs 1 < p < inf, got p = {}", p));
    if (!(s >= 1))
        throw DomainError(fmt::format("Lorentz index needs s >= 1, got s = {}", s));
}

Rearrangement rearrange(const FunctionOnGroup& g)
{
    std::map<Rational, BigInt> counts;
    for (const auto& [w, v] : g.entries())
        counts[abs(v)] += 1;
    std::vector<Run<Rational>> pairs;
    pairs.reserve(counts.size());
    for (auto& [v, m] : counts)
        pairs.push_back({v, m});
    return Rearrangement::from_pairs(std::move(pairs));
}

template <class V>
long double weak_norm(const BasicRearrangement<V>& r, double p)
{
    if (!(p > 1))
        throw DomainError(fmt::format("weak norm needs p > 1, got {}", p));
    long double best = 0;
    BigInt J = 0;
    for (const auto& run : r.runs()) {
        J += run.multiplicity;
        best = std::max(best, as_real(run.value) * std::pow(as_real(J), 1.0L / p));
    }
    return best;
}

template <class V>
long double lorentz_norm(const BasicRearrangement<V>& r, const LorentzIndex& idx)
{
    if (idx.is_weak())
        return weak_norm(r, idx.p());
    const long double s = idx.s();
    const long double e = s / idx.p();
    CompensatedSum total;
    long double J = 0;
    for (const auto& run : r.runs()) {
        const long double m = as_real(run.multiplicity);
        total.add(std::pow(as_real(run.value), s) * power_increment(J, m, e));
        J += m;
    }
    return std::pow(total.value(), 1.0L / s);
}

template <class V>
long double radial_weighted_sum(const BasicRadialFunction<V>& f, double p)
{
    if (!(p > 1 && p <= 2))
        throw DomainError(fmt::format("radial weighted sum needs 1 < p <= 2, got {}", p));
    for (const auto& c : f.coefficients())
        if (c < V(0))
            throw DomainError("radial weighted sum needs nonnegative coefficients");
    const long double q = f.ctx().q();
    CompensatedSum total;
    if (p == 2) {
        for (int n = 0; n <= f.degree(); ++n)
            total.add(as_real(f[n]) * std::pow(q, n / 2.0L));
        return total.value();
    }
    const long double pc = p / (p - 1);
    for (int n = 0; n <= f.degree(); ++n)
        total.add(std::pow(as_real(f[n]), pc) * std::pow(q, n * pc / p));
    return std::pow(total.value(), 1 / pc);
}

template long double weak_norm(const Rearrangement&, double);
template long double weak_norm(const RealRearrangement&, double);
template long double lorentz_norm(const Rearrangement&, const LorentzIndex&);
template long double lorentz_norm(const RealRearrangement&, const LorentzIndex&);
template long double radial_weighted_sum(const RadialFunction&, double);
template long double radial_weighted_sum(const RealRadialFunction&, double);

} // namespace fgw
