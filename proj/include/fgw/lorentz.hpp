#pragma once

// Lorentz L^{p,s} and weak-L^p norms on counting measure, computed from
// decreasing rearrangements without ever expanding multiplicities.

#include <algorithm>
#include <limits>
#include <vector>

#include "fgw/function_on_group.hpp"
#include "fgw/radial_algebra.hpp"

namespace fgw {

template <class V>
struct Run {
    V value;
    BigInt multiplicity;

    bool operator==(const Run&) const = default;
};

/// Values of |g| in strictly decreasing order, each with its multiplicity.
template <class V>
class BasicRearrangement {
public:
    BasicRearrangement() = default;

    /// Takes absolute values, drops zeros, sorts, and merges equal values.
    static BasicRearrangement from_pairs(std::vector<Run<V>> pairs)
    {
        BasicRearrangement r;
        for (auto& p : pairs)
            if (p.value < V(0))
                p.value = -p.value;
        std::erase_if(pairs, [](const Run<V>& p) { return p.value == V(0) || p.multiplicity <= 0; });
        std::sort(pairs.begin(), pairs.end(), [](const Run<V>& a, const Run<V>& b) { return a.value > b.value; });
        for (auto& p : pairs) {
            if (!r.runs_.empty() && r.runs_.back().value == p.value)
                r.runs_.back().multiplicity += p.multiplicity;
            else
                r.runs_.push_back(std::move(p));
        }
        return r;
    }

    const std::vector<Run<V>>& runs() const noexcept { return runs_; }
    bool empty() const noexcept { return runs_.empty(); }

    BigInt total_multiplicity() const
    {
        BigInt total = 0;
        for (const auto& r : runs_)
            total += r.multiplicity;
        return total;
    }

    bool operator==(const BasicRearrangement&) const = default;

private:
    std::vector<Run<V>> runs_;
};

using Rearrangement = BasicRearrangement<Rational>;
using RealRearrangement = BasicRearrangement<long double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Lorentz exponents (p, s) with p > 1 and s >= 1; s may be infinite.
class LorentzIndex {
public:
    LorentzIndex(double p, double s);

    double p() const noexcept { return p_; }
    double s() const noexcept { return s_; }
    double conjugate_p() const noexcept { return p_ / (p_ - 1); }
    bool is_weak() const noexcept { return s_ == kInfinity; }

private:
    double p_;
    double s_;
};

Rearrangement rearrange(const FunctionOnGroup& g);

/// |f_n| repeated |S_n| times, from sphere sizes alone.
template <class V>
BasicRearrangement<V> rearrange_radial(const BasicRadialFunction<V>& f)
{
    std::vector<Run<V>> pairs;
    for (int n = 0; n <= f.degree(); ++n)
        if (f[n] != V(0))
            pairs.push_back({f[n], sphere_size(f.ctx(), n)});
    return BasicRearrangement<V>::from_pairs(std::move(pairs));
}

/// ||g||_{p,s} = (sum_i a_i^s (i^{s/p} - (i-1)^{s/p}))^{1/s}, so ||chi_E||_{p,s} = |E|^{1/p}.
/// Delegates to weak_norm when s is infinite.
template <class V>
long double lorentz_norm(const BasicRearrangement<V>& r, const LorentzIndex& idx);

/// sup_i i^{1/p} a_i.
template <class V>
long double weak_norm(const BasicRearrangement<V>& r, double p);

/// sum f_n q^{n/2} for p = 2, else (sum f_n^{p'} q^{n p'/p})^{1/p'} for 1 < p < 2.
template <class V>
long double radial_weighted_sum(const BasicRadialFunction<V>& f, double p);

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(long double x)
    {
        const long double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            carry_ += (sum_ - t) + x;
        else
            carry_ += (x - t) + sum_;
        sum_ = t;
    }
    long double value() const noexcept { return sum_ + carry_; }

private:
    long double sum_ = 0;
    long double carry_ = 0;
};

} // namespace fgw
