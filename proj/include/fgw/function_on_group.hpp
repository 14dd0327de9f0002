#pragma once

#include <map>

#include "fgw/free_words.hpp"

namespace fgw {

/// Finitely supported function F_k -> Q. Zero values are never stored.
class FunctionOnGroup {
public:
    explicit FunctionOnGroup(const FreeGroupCtx& ctx) : ctx_(ctx) {}

    const FreeGroupCtx& ctx() const noexcept { return ctx_; }

    void add(const ReducedWord& w, const Rational& value);
    void set(const ReducedWord& w, const Rational& value);
    Rational at(const ReducedWord& w) const;

    std::size_t support_size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    /// Ordered by shortlex so iteration is reproducible.
    const std::map<ReducedWord, Rational>& entries() const noexcept { return entries_; }

    Rational l2_norm_squared() const;
    std::size_t max_length() const noexcept;

    bool operator==(const FunctionOnGroup&) const = default;

private:
    FreeGroupCtx ctx_;
    std::map<ReducedWord, Rational> entries_;
};

FunctionOnGroup delta(const FreeGroupCtx& ctx, const ReducedWord& w);

} // namespace fgw
