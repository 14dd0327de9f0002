#pragma once

// Reduced words in the free group F_k and sphere/ball enumeration.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/container/small_vector.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/rational_adaptor.hpp>

namespace fgw {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<
    boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>, boost::multiprecision::et_off>;

/// Thrown when an enumeration would exceed its configured element budget.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidLetter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ContextMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::uint64_t kDefaultSphereCap = 10'000'000;

/// Letter code c: generator c / 2, inverted when c is odd. inverse(c) = c ^ 1.
using Letter = std::uint8_t;

constexpr Letter inverse_letter(Letter c) noexcept { return static_cast<Letter>(c ^ 1u); }
constexpr int generator_of(Letter c) noexcept { return c >> 1; }
constexpr bool is_inverted(Letter c) noexcept { return (c & 1u) != 0; }

/// Shape of F_k: generator count k >= 2 and branching number q = 2k - 1.
/// k is capped at 26 so every word has a one-character-per-letter spelling.
class FreeGroupCtx {
public:
    explicit FreeGroupCtx(int k);

    int k() const noexcept { return k_; }
    int q() const noexcept { return 2 * k_ - 1; }
    int alphabet_size() const noexcept { return 2 * k_; }

    bool operator==(const FreeGroupCtx&) const = default;

private:
    int k_;
};

/// A cancellation-free letter sequence; the empty word is the identity.
/// Words do not carry their context; containers that hold words do.
class ReducedWord {
public:
    using Storage = boost::container::small_vector<Letter, 24>;

    ReducedWord() = default;

    std::span<const Letter> letters() const noexcept { return {letters_.data(), letters_.size()}; }
    std::size_t length() const noexcept { return letters_.size(); }
    bool is_identity() const noexcept { return letters_.empty(); }
    Letter operator[](std::size_t i) const noexcept { return letters_[i]; }

    /// Shortlex: shorter words first, then lexicographic on letter codes.
    friend std::strong_ordering operator<=>(const ReducedWord& a, const ReducedWord& b) noexcept;
    friend bool operator==(const ReducedWord& a, const ReducedWord& b) noexcept
    {
        return a.letters_ == b.letters_;
    }

private:
    explicit ReducedWord(Storage letters) : letters_(std::move(letters)) {}

    Storage letters_;

    friend ReducedWord normalize(const FreeGroupCtx&, std::span<const Letter>);
    friend ReducedWord mul(const ReducedWord&, const ReducedWord&);
    friend ReducedWord inverse(const ReducedWord&);
    friend class SphereStream;
    friend class ShortlexIndex;
};

/// Freely reduces an arbitrary letter sequence. Throws InvalidLetter on codes >= 2k.
ReducedWord normalize(const FreeGroupCtx& ctx, std::span<const Letter> seq);

ReducedWord mul(const ReducedWord& x, const ReducedWord& y);
ReducedWord inverse(const ReducedWord& x);

/// Number of letters cancelled when forming x * y.
std::size_t cancellation_depth(const ReducedWord& x, const ReducedWord& y) noexcept;

/// |z x^{-1}|, i.e. the length of the unique w with w x = z.
std::size_t quotient_length(const ReducedWord& z, const ReducedWord& x) noexcept;

/// 1 for n = 0, else (q + 1) q^{n-1}.
BigInt sphere_size(const FreeGroupCtx& ctx, int n);
BigInt ball_size(const FreeGroupCtx& ctx, int n);

/// Yields every reduced word of length n once, lexicographically on letter codes.
class SphereStream {
public:
    SphereStream(const FreeGroupCtx& ctx, int n, std::uint64_t cap = kDefaultSphereCap);

    /// Next word, or nullopt once the sphere is exhausted.
    std::optional<ReducedWord> next();

private:
    bool advance();

    FreeGroupCtx ctx_;
    ReducedWord::Storage current_;
    bool started_ = false;
    bool done_ = false;
};

std::vector<ReducedWord> enumerate_sphere(const FreeGroupCtx& ctx, int n,
                                          std::uint64_t cap = kDefaultSphereCap);
/// Ball B_n in shortlex order.
std::vector<ReducedWord> enumerate_ball(const FreeGroupCtx& ctx, int n,
                                        std::uint64_t cap = kDefaultSphereCap);

/// Dense ranks of the ball B_R in shortlex order (the order of enumerate_ball).
class ShortlexIndex {
public:
    ShortlexIndex(const FreeGroupCtx& ctx, int max_length);

    int max_length() const noexcept { return static_cast<int>(offsets_.size()) - 2; }
    /// |B_R|.
    std::uint64_t size() const noexcept { return offsets_.back(); }
    std::uint64_t rank(const ReducedWord& w) const;
    ReducedWord unrank(std::uint64_t r) const;

private:
    FreeGroupCtx ctx_;
    std::vector<std::uint64_t> offsets_;  // offsets_[n] = |B_{n-1}|
    std::vector<std::uint64_t> qpowers_;
};

/// "abA" = a b a^{-1}; capital letters are inverses. The identity prints as "1".
std::string to_string(const ReducedWord& w);
ReducedWord parse_word(const FreeGroupCtx& ctx, std::string_view text);

} // namespace fgw

template <>
struct std::hash<fgw::ReducedWord> {
    std::size_t operator()(const fgw::ReducedWord& w) const noexcept
    {
        std::uint64_t h = 1469598103934665603ull ^ w.length();
        for (auto c : w.letters()) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};
