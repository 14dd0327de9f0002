#include "fgw/function_on_group.hpp"

namespace fgw {

void FunctionOnGroup::add(const ReducedWord& w, const Rational& value)
{
    if (value == 0)
        return;
    auto [it, inserted] = entries_.try_emplace(w, value);
    if (!inserted) {
        it->second += value;
        if (it->second == 0)
            entries_.erase(it);
    }
}

void FunctionOnGroup::set(const ReducedWord& w, const Rational& value)
{
    if (value == 0)
        entries_.erase(w);
    else
        entries_.insert_or_assign(w, value);
}

Rational FunctionOnGroup::at(const ReducedWord& w) const
{
    auto it = entries_.find(w);
    return it == entries_.end() ? Rational(0) : it->second;
}

Rational FunctionOnGroup::l2_norm_squared() const
{
    Rational total = 0;
    for (const auto& [w, v] : entries_)
        total += v * v;
    return total;
}

std::size_t FunctionOnGroup::max_length() const noexcept
{
    // Shortlex order puts the longest word last.
    return entries_.empty() ? 0 : entries_.rbegin()->first.length();
}

FunctionOnGroup delta(const FreeGroupCtx& ctx, const ReducedWord& w)
{
    FunctionOnGroup g(ctx);
    g.set(w, 1);
    return g;
}

} // namespace fgw
