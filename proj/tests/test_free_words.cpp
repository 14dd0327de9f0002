#include <doctest.h>

#include <set>

#include "fgw/free_words.hpp"
#include "test_support.hpp"

using namespace fgw;
using namespace fgw::testing;

namespace {

constexpr Letter a = 0, A = 1, b = 2, B = 3;

/// Deletes the leftmost adjacent inverse pair until none is left.
std::vector<Letter> reduce_by_rescanning(std::vector<Letter> seq)
{
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
            if (seq[i] == inverse_letter(seq[i + 1])) {
                seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(i), seq.begin() + static_cast<std::ptrdiff_t>(i) + 2);
                changed = true;
                break;
            }
        }
    }
    return seq;
}

bool is_reduced(const ReducedWord& w)
{
    for (std::size_t i = 0; i + 1 < w.length(); ++i)
        if (w[i] == inverse_letter(w[i + 1]))
            return false;
    return true;
}

} // namespace

TEST_CASE("context validates the generator count")
{
    CHECK_THROWS_AS(FreeGroupCtx(1), DomainError);
    CHECK_THROWS_AS(FreeGroupCtx(27), DomainError);
    const FreeGroupCtx ctx(3);
    CHECK(ctx.q() == 5);
    CHECK(ctx.alphabet_size() == 6);
}

TEST_CASE("letters")
{
    for (Letter c = 0; c < 8; ++c) {
        CHECK(inverse_letter(inverse_letter(c)) == c);
        CHECK(inverse_letter(c) != c);
        CHECK(generator_of(inverse_letter(c)) == generator_of(c));
    }
}

TEST_CASE("normalize")
{
    const FreeGroupCtx ctx(2);
    std::vector<Letter> abB{a, b, B};
    CHECK(to_string(normalize(ctx, abB)) == "a");
    CHECK(normalize(ctx, std::vector<Letter>{}).is_identity());
    std::vector<Letter> aAaA{a, A, a, A};
    CHECK(normalize(ctx, aAaA).is_identity());

    std::vector<Letter> bad{a, 4};
    CHECK_THROWS_AS(normalize(ctx, bad), InvalidLetter);

    Rng rng(7);
    for (int t = 0; t < 500; ++t) {
        const auto seq = random_letters(rng, ctx, 16);
        const ReducedWord w = normalize(ctx, seq);
        const auto expected = reduce_by_rescanning(seq);
        CHECK(std::vector<Letter>(w.letters().begin(), w.letters().end()) == expected);
        CHECK(normalize(ctx, w.letters()) == w);
    }
}

TEST_CASE("mul and inverse")
{
    const FreeGroupCtx ctx(2);
    const ReducedWord x = parse_word(ctx, "abA");
    const ReducedWord y = parse_word(ctx, "aB");
    CHECK(to_string(mul(x, y)) == "a");
    CHECK(cancellation_depth(x, y) == 2);
    CHECK(mul(x, ReducedWord{}) == x);
    CHECK(to_string(inverse(parse_word(ctx, "ab"))) == "BA");
    CHECK(inverse(ReducedWord{}).is_identity());

    Rng rng(11);
    for (int t = 0; t < 100; ++t) {
        const ReducedWord u = random_word(rng, ctx, 12);
        CHECK(mul(u, inverse(u)).is_identity());
        CHECK(inverse(inverse(u)) == u);
        CHECK(inverse(u).length() == u.length());
    }
    for (int t = 0; t < 300; ++t) {
        const ReducedWord u = random_word(rng, ctx, 10);
        const ReducedWord v = random_word(rng, ctx, 10);
        const ReducedWord s = random_word(rng, ctx, 10);
        CHECK(mul(mul(u, v), s) == mul(u, mul(v, s)));
        // Oracle: normalize the concatenation.
        std::vector<Letter> cat(u.letters().begin(), u.letters().end());
        cat.insert(cat.end(), v.letters().begin(), v.letters().end());
        const ReducedWord uv = mul(u, v);
        CHECK(uv == normalize(ctx, cat));
        CHECK((uv.length() + u.length() + v.length()) % 2 == 0);
        CHECK(uv.length() == u.length() + v.length() - 2 * cancellation_depth(u, v));
        CHECK(quotient_length(u, v) == mul(u, inverse(v)).length());
    }
}

TEST_CASE("sphere sizes")
{
    const FreeGroupCtx f2(2), f3(3);
    CHECK(sphere_size(f2, 0) == 1);
    CHECK(sphere_size(f2, 1) == 4);
    CHECK(sphere_size(f2, 2) == 12);
    CHECK(sphere_size(f3, 4) == 750);
    CHECK(ball_size(f2, 8) == 13121);
    CHECK(enumerate_sphere(f3, 4).size() == 750);
    CHECK_THROWS_AS(sphere_size(f2, -1), DomainError);
}

TEST_CASE("sphere stream enumerates each reduced word once, in lexicographic order")
{
    for (int k : {2, 3}) {
        const FreeGroupCtx ctx(k);
        for (int n = 0; n <= (k == 2 ? 7 : 5); ++n) {
            const auto words = enumerate_sphere(ctx, n);
            CHECK(BigInt(words.size()) == sphere_size(ctx, n));
            std::set<ReducedWord> seen(words.begin(), words.end());
            CHECK(seen.size() == words.size());
            for (std::size_t i = 0; i < words.size(); ++i) {
                CHECK(words[i].length() == static_cast<std::size_t>(n));
                CHECK(is_reduced(words[i]));
                if (i > 0)
                    CHECK(words[i - 1] < words[i]);
            }
        }
    }
    const FreeGroupCtx ctx(2);
    const auto s0 = enumerate_sphere(ctx, 0);
    REQUIRE(s0.size() == 1);
    CHECK(s0[0].is_identity());
    std::vector<std::string> s1;
    for (const auto& w : enumerate_sphere(ctx, 1))
        s1.push_back(to_string(w));
    CHECK(s1 == std::vector<std::string>{"a", "A", "b", "B"});
    CHECK(enumerate_sphere(ctx, 3).size() == 36);
}

TEST_CASE("sphere stream refuses spheres over the cap")
{
    const FreeGroupCtx ctx(2);
    CHECK_THROWS_AS(SphereStream(ctx, 5, 100), BudgetExceeded);
    CHECK_NOTHROW(SphereStream(ctx, 4, 108));
    CHECK_THROWS_AS(enumerate_ball(ctx, 3, 52), BudgetExceeded);
}

TEST_CASE("shortlex index matches ball enumeration order")
{
    const FreeGroupCtx ctx(3);
    const auto ball = enumerate_ball(ctx, 4);
    const ShortlexIndex index(ctx, 4);
    REQUIRE(index.size() == ball.size());
    for (std::size_t i = 0; i < ball.size(); ++i) {
        CHECK(index.rank(ball[i]) == i);
        CHECK(index.unrank(i) == ball[i]);
    }
    CHECK_THROWS_AS(index.rank(parse_word(ctx, "abcab")), BudgetExceeded);
}

TEST_CASE("word strings")
{
    const FreeGroupCtx ctx(2);
    CHECK(to_string(parse_word(ctx, "abA")) == "abA");
    CHECK(to_string(parse_word(ctx, "aA")) == "1");
    CHECK(parse_word(ctx, "1").is_identity());
    CHECK(parse_word(ctx, "").is_identity());
    CHECK_THROWS_AS(parse_word(ctx, "ac"), InvalidLetter);
    CHECK_THROWS_AS(parse_word(ctx, "a-b"), InvalidLetter);
}
