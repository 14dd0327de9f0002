#include "fgw/free_words.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace fgw {

FreeGroupCtx::FreeGroupCtx(int k) : k_(k)
{
    if (k < 2 || k > 26)
        throw DomainError(fmt::format("generator count must lie in [2, 26], got {}", k));
}

std::strong_ordering operator<=>(const ReducedWord& a, const ReducedWord& b) noexcept
{
    if (a.length() != b.length())
        return a.length() <=> b.length();
    return std::lexicographical_compare_three_way(a.letters_.begin(), a.letters_.end(),
                                                  b.letters_.begin(), b.letters_.end());
}

ReducedWord normalize(const FreeGroupCtx& ctx, std::span<const Letter> seq)
{
    ReducedWord::Storage out;
    out.reserve(seq.size());
    for (Letter c : seq) {
        if (c >= ctx.alphabet_size())
            throw InvalidLetter(fmt::format("letter code {} out of range for k = {}", int(c), ctx.k()));
        if (!out.empty() && out.back() == inverse_letter(c))
            out.pop_back();
        else
            out.push_back(c);
    }
    return ReducedWord(std::move(out));
}

std::size_t cancellation_depth(const ReducedWord& x, const ReducedWord& y) noexcept
{
    const std::size_t limit = std::min(x.length(), y.length());
    std::size_t c = 0;
    while (c < limit && x[x.length() - 1 - c] == inverse_letter(y[c]))
        ++c;
    return c;
}

ReducedWord mul(const ReducedWord& x, const ReducedWord& y)
{
    const std::size_t c = cancellation_depth(x, y);
    ReducedWord::Storage out;
    out.reserve(x.length() + y.length() - 2 * c);
    out.insert(out.end(), x.letters_.begin(), x.letters_.end() - static_cast<std::ptrdiff_t>(c));
    out.insert(out.end(), y.letters_.begin() + static_cast<std::ptrdiff_t>(c), y.letters_.end());
    return ReducedWord(std::move(out));
}

ReducedWord inverse(const ReducedWord& x)
{
    ReducedWord::Storage out(x.length());
    std::transform(x.letters_.rbegin(), x.letters_.rend(), out.begin(), inverse_letter);
    return ReducedWord(std::move(out));
}

std::size_t quotient_length(const ReducedWord& z, const ReducedWord& x) noexcept
{
    // z x^{-1} cancels the common suffix of z and x.
    std::size_t s = 0;
    const std::size_t limit = std::min(z.length(), x.length());
    while (s < limit && z[z.length() - 1 - s] == x[x.length() - 1 - s])
        ++s;
    return z.length() + x.length() - 2 * s;
}

BigInt sphere_size(const FreeGroupCtx& ctx, int n)
{
    if (n < 0)
        throw DomainError("sphere radius must be nonnegative");
    if (n == 0)
        return 1;
    BigInt q = ctx.q();
    return (q + 1) * boost::multiprecision::pow(q, static_cast<unsigned>(n - 1));
}

BigInt ball_size(const FreeGroupCtx& ctx, int n)
{
    BigInt total = 0;
    for (int r = 0; r <= n; ++r)
        total += sphere_size(ctx, r);
    return total;
}

SphereStream::SphereStream(const FreeGroupCtx& ctx, int n, std::uint64_t cap) : ctx_(ctx)
{
    if (n < 0)
        throw DomainError("sphere radius must be nonnegative");
    if (sphere_size(ctx, n) > cap)
        throw BudgetExceeded(fmt::format("sphere S_{} in F_{} exceeds the cap of {} elements", n, ctx.k(), cap));
    current_.resize(static_cast<std::size_t>(n));
}

bool SphereStream::advance()
{
    const int a = ctx_.alphabet_size();
    std::size_t i = current_.size();
    while (i-- > 0) {
        int c = current_[i] + 1;
        if (i > 0 && c == inverse_letter(current_[i - 1]))
            ++c;
        if (c < a) {
            current_[i] = static_cast<Letter>(c);
            for (std::size_t j = i + 1; j < current_.size(); ++j)
                current_[j] = inverse_letter(current_[j - 1]) == 0 ? 1 : 0;
            return true;
        }
    }
    return false;
}

std::optional<ReducedWord> SphereStream::next()
{
    if (done_)
        return std::nullopt;
    if (!started_) {
        started_ = true;
        for (std::size_t j = 0; j < current_.size(); ++j)
            current_[j] = j == 0 ? 0 : (inverse_letter(current_[j - 1]) == 0 ? 1 : 0);
    } else if (!advance()) {
        done_ = true;
        return std::nullopt;
    }
    if (current_.empty()) {
        // The identity is the only element of S_0.
        ReducedWord w(current_);
        done_ = true;
        return w;
    }
    return ReducedWord(current_);
}

std::vector<ReducedWord> enumerate_sphere(const FreeGroupCtx& ctx, int n, std::uint64_t cap)
{
    SphereStream stream(ctx, n, cap);
    std::vector<ReducedWord> out;
    out.reserve(static_cast<std::size_t>(sphere_size(ctx, n)));
    while (auto w = stream.next())
        out.push_back(std::move(*w));
    return out;
}

std::vector<ReducedWord> enumerate_ball(const FreeGroupCtx& ctx, int n, std::uint64_t cap)
{
    if (ball_size(ctx, n) > cap)
        throw BudgetExceeded(fmt::format("ball B_{} in F_{} exceeds the cap of {} elements", n, ctx.k(), cap));
    std::vector<ReducedWord> out;
    for (int r = 0; r <= n; ++r) {
        auto s = enumerate_sphere(ctx, r, cap);
        out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
    }
    return out;
}

ShortlexIndex::ShortlexIndex(const FreeGroupCtx& ctx, int max_length) : ctx_(ctx)
{
    if (max_length < 0)
        throw DomainError("ball radius must be nonnegative");
    if (ball_size(ctx, max_length) >= BigInt(1) << 62)
        throw BudgetExceeded(fmt::format("ball B_{} in F_{} is too large to index", max_length, ctx.k()));
    offsets_.push_back(0);
    qpowers_.push_back(1);
    for (int n = 0; n <= max_length; ++n) {
        offsets_.push_back(offsets_.back() + static_cast<std::uint64_t>(sphere_size(ctx, n)));
        qpowers_.push_back(qpowers_.back() * static_cast<std::uint64_t>(ctx.q()));
    }
}

std::uint64_t ShortlexIndex::rank(const ReducedWord& w) const
{
    const std::size_t n = w.length();
    if (n + 2 > offsets_.size())
        throw BudgetExceeded(fmt::format("word of length {} outside the indexed ball B_{}", n, max_length()));
    if (n == 0)
        return 0;
    std::uint64_t r = w[0];
    for (std::size_t i = 1; i < n; ++i) {
        const Letter c = w[i];
        r = r * static_cast<std::uint64_t>(ctx_.q()) + (c > inverse_letter(w[i - 1]) ? c - 1u : c);
    }
    return offsets_[n] + r;
}

ReducedWord ShortlexIndex::unrank(std::uint64_t r) const
{
    if (r >= size())
        throw DomainError("rank outside the indexed ball");
    std::size_t n = 0;
    while (offsets_[n + 1] <= r)
        ++n;
    r -= offsets_[n];
    ReducedWord::Storage letters(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t place = qpowers_[n - 1 - i];
        auto digit = static_cast<Letter>(r / place);
        r %= place;
        if (i > 0 && digit >= inverse_letter(letters[i - 1]))
            ++digit;
        letters[i] = digit;
    }
    return ReducedWord(std::move(letters));
}

std::string to_string(const ReducedWord& w)
{
    if (w.is_identity())
        return "1";
    std::string s;
    s.reserve(w.length());
    for (Letter c : w.letters())
        s.push_back(static_cast<char>((is_inverted(c) ? 'A' : 'a') + generator_of(c)));
    return s;
}

ReducedWord parse_word(const FreeGroupCtx& ctx, std::string_view text)
{
    std::vector<Letter> seq;
    if (text == "1")
        return {};
    for (char ch : text) {
        int code;
        if (ch >= 'a' && ch <= 'z')
            code = 2 * (ch - 'a');
        else if (ch >= 'A' && ch <= 'Z')
            code = 2 * (ch - 'A') + 1;
        else
            throw InvalidLetter(fmt::format("'{}' is not a letter", ch));
        if (code >= ctx.alphabet_size())
            throw InvalidLetter(fmt::format("letter '{}' not in F_{}", ch, ctx.k()));
        seq.push_back(static_cast<Letter>(code));
    }
    return normalize(ctx, seq);
}

} // namespace fgw
