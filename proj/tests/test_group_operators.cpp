#include <doctest.h>

#include <cmath>

#include "fgw/group_operators.hpp"
#include "test_support.hpp"

using namespace fgw;
using namespace fgw::testing;

namespace {

ReducedWord w(const FreeGroupCtx& ctx, const char* s) { return parse_word(ctx, s); }

FunctionOnGroup from_values(const FreeGroupCtx& ctx, const std::vector<std::pair<const char*, int>>& entries)
{
    FunctionOnGroup g(ctx);
    for (auto [word, v] : entries)
        g.set(parse_word(ctx, word), v);
    return g;
}

/// <chi_n * delta_x, delta_y> = [|y x^{-1}| = n].
int kernel(int n, const ReducedWord& x, const ReducedWord& y)
{
    return quotient_length(y, x) == static_cast<std::size_t>(n) ? 1 : 0;
}

} // namespace

TEST_CASE("left convolution")
{
    const FreeGroupCtx ctx(2);
    const FunctionOnGroup e = delta(ctx, ReducedWord{});
    CHECK(left_convolve(RadialFunction::sphere(ctx, 0), from_values(ctx, {{"ab", 3}, {"B", 1}})) ==
          from_values(ctx, {{"ab", 3}, {"B", 1}}));
    const FunctionOnGroup image = left_convolve(RadialFunction::sphere(ctx, 1), e);
    CHECK(image == embed(RadialFunction::sphere(ctx, 1)));

    // f * chi_{S_n} is radial: compare with the radial algebra pointwise.
    Rng rng(5);
    for (int t = 0; t < 12; ++t) {
        const RadialFunction f = random_radial(rng, ctx, 3);
        const int n = static_cast<int>(rng() % 4);
        const FunctionOnGroup direct = left_convolve(f, embed(RadialFunction::sphere(ctx, n)));
        CHECK(direct == embed(convolve_radial(f, RadialFunction::sphere(ctx, n))));
    }

    // <f * chi_{S_n}, chi_{S_m}> = sum_l f_l c(l, n, m) |S_m|.
    for (int t = 0; t < 6; ++t) {
        const RadialFunction f = random_radial(rng, ctx, 4);
        for (int n = 0; n <= 4; ++n)
            for (int m = 0; m <= 4; ++m) {
                Rational expected = 0;
                for (int l = 0; l <= f.degree(); ++l)
                    expected += f[l] * Rational(structure_constant(ctx, l, n, m) * sphere_size(ctx, m));
                CHECK(pairing(f, ElementSet::sphere(ctx, n), ElementSet::sphere(ctx, m)) == expected);
                const auto En = ElementSet::from_words(ctx, enumerate_sphere(ctx, n));
                const auto Em = ElementSet::from_words(ctx, enumerate_sphere(ctx, m));
                if (n + m <= 5)
                    CHECK(pairing(f, En, Em) == expected);
            }
    }
}

TEST_CASE("pairings")
{
    const FreeGroupCtx ctx(2);
    const auto chi1 = RadialFunction::sphere(ctx, 1);
    CHECK(pairing(chi1, ElementSet::ball(ctx, 0), ElementSet::sphere(ctx, 1)) == 4);
    CHECK(pairing(chi1, ElementSet::ball(ctx, 1), ElementSet::ball(ctx, 1)) == 8);
    CHECK(pairing(chi1, ElementSet::from_words(ctx, enumerate_ball(ctx, 1)),
                  ElementSet::from_words(ctx, enumerate_ball(ctx, 1))) == 8);

    // Self-adjointness for radial f, and agreement with a direct double sum.
    Rng rng(8);
    const auto ball = enumerate_ball(ctx, 3);
    auto random_set = [&] {
        std::vector<ReducedWord> words;
        for (const auto& x : ball)
            if (rng() % 5 == 0)
                words.push_back(x);
        return ElementSet::from_words(ctx, std::move(words));
    };
    for (int t = 0; t < 25; ++t) {
        const RadialFunction f = random_radial(rng, ctx, 4);
        const ElementSet E = random_set(), F = random_set();
        const Rational value = pairing(f, E, F);
        CHECK(value == pairing(f, F, E));
        Rational direct = 0;
        for (const auto& x : E.words())
            for (const auto& y : F.words())
                direct += f[static_cast<int>(quotient_length(y, x))];
        CHECK(value == direct);
        FunctionOnGroup image = left_convolve(f, E.indicator());
        Rational via_convolution = 0;
        for (const auto& y : F.words())
            via_convolution += image.at(y);
        CHECK(value == via_convolution);
    }
}

TEST_CASE("majorization split of chi_k * delta_x")
{
    const FreeGroupCtx ctx(2);
    Rng rng(13);
    for (int t = 0; t < 300; ++t) {
        const ReducedWord x = random_word(rng, ctx, 6);
        const ReducedWord y = random_word(rng, ctx, 6);
        const int k = static_cast<int>(quotient_length(y, x));
        const FunctionOnGroup px = truncated_column(ctx, {ColumnKind::P, k, 0}, x);
        const FunctionOnGroup py = truncated_column(ctx, {ColumnKind::P, k, 0}, y);
        CHECK(kernel(k, x, y) <= px.at(y) + py.at(x));
    }
}

TEST_CASE("best F ratio")
{
    const FreeGroupCtx ctx(2);
    const auto g = from_values(ctx, {{"a", 3}, {"b", 1}, {"ab", 1}});
    const PrefixRatio r = best_F_ratio(g, 2.0);
    CHECK(static_cast<double>(r.ratio) == doctest::Approx(3.0));
    CHECK(r.prefix == 1);
    const PrefixRatio ind = best_F_ratio(embed(RadialFunction{ctx, {1, 1}}), 1.5);
    CHECK(static_cast<double>(ind.ratio) == doctest::Approx(std::pow(5.0, 1 / 1.5)));

    // Exhaustive sup over F within the support.
    Rng rng(99);
    const auto ball = enumerate_ball(ctx, 2);
    for (int t = 0; t < 40; ++t) {
        FunctionOnGroup h(ctx);
        const std::size_t support = 1 + rng() % 12;
        for (std::size_t i = 0; i < support; ++i)
            h.set(ball[rng() % ball.size()], static_cast<int>(1 + rng() % 4));
        for (double p : {1.5, 2.0, 3.0}) {
            std::vector<Rational> values;
            for (const auto& [word, v] : h.entries())
                values.push_back(v);
            double best = 0;
            for (std::uint32_t mask = 1; mask < (1u << values.size()); ++mask) {
                double sum = 0;
                int count = 0;
                for (std::size_t i = 0; i < values.size(); ++i)
                    if (mask >> i & 1) {
                        sum += values[i].convert_to<double>();
                        ++count;
                    }
                best = std::max(best, sum / std::pow(count, 1 - 1 / p));
            }
            CHECK(static_cast<double>(best_F_ratio(h, p).ratio) == doctest::Approx(best).epsilon(1e-12));
        }
    }
}

TEST_CASE("set families")
{
    const FreeGroupCtx ctx(2);
    CHECK(generate_family(ctx, {FamilyKind::spheres, 3, 100, 0}).size() == 4);
    CHECK(generate_family(ctx, {FamilyKind::balls, 3, 100, 0}).back() == ElementSet::ball(ctx, 3));
    CHECK(generate_family(ctx, {FamilyKind::sphere_unions, 3, 100, 0}).size() == 15);
    const auto all = generate_family(ctx, {FamilyKind::exhaustive, 1, 32, 0});
    CHECK(all.size() == 32);
    CHECK_THROWS_AS(generate_family(ctx, {FamilyKind::exhaustive, 1, 31, 0}), BudgetExceeded);
    CHECK_THROWS_AS(generate_family(ctx, {FamilyKind::sphere_unions, 8, 100, 0}), BudgetExceeded);

    const SetFamily random{FamilyKind::random_subsets, 3, 50, 7};
    const auto a = generate_family(ctx, random);
    CHECK(a == generate_family(ctx, random));
    CHECK(a.size() == 50);
    for (const auto& E : a) {
        CHECK(E.max_length() <= 3);
        CHECK(std::is_sorted(E.words().begin(), E.words().end()));
        CHECK(std::adjacent_find(E.words().begin(), E.words().end()) == E.words().end());
    }
    CHECK(a != generate_family(ctx, {FamilyKind::random_subsets, 3, 50, 8}));

    for (auto kind : {FamilyKind::spheres, FamilyKind::balls, FamilyKind::sphere_unions, FamilyKind::exhaustive,
                      FamilyKind::random_subsets, FamilyKind::greedy})
        CHECK(parse_family_kind(to_string(kind)) == kind);
    CHECK_THROWS(parse_family_kind("cubes"));
    CHECK(ElementSet::sphere_union(ctx, {0, 2}).describe() == "S{0,2}");
    CHECK(ElementSet::from_words(ctx, {w(ctx, "bA"), w(ctx, "a"), ReducedWord{}}).describe() == "{1,a,bA}");
    CHECK(ElementSet::sphere_union(ctx, {1, 2}).size() == 16);
}

TEST_CASE("set profiles agree with brute force and with the radial algebra")
{
    const FreeGroupCtx ctx(2);
    Rng rng(17);
    for (int t = 0; t < 20; ++t) {
        const int radius = t % 5;
        const int degree = 1 + t % 6;
        std::vector<ReducedWord> words;
        for (const auto& x : enumerate_ball(ctx, radius))
            if (rng() % 4 == 0)
                words.push_back(x);
        const ElementSet E = ElementSet::from_words(ctx, words);
        const SetProfile profile = SetProfile::build(E, degree);
        const RadialFunction f = random_radial(rng, ctx, degree);
        const FunctionOnGroup image = left_convolve(f, E.indicator());
        CHECK(profile.image_rearrangement(f) == rearrange(image));
        CHECK(profile.image_l2_squared(f) == image.l2_norm_squared());

        const auto hist = distance_histogram(E.words(), E.words());
        for (int n = 0; n <= degree; ++n)
            for (int m = 0; m <= degree; ++m) {
                BigInt expected = 0;
                for (int l = 0; l < static_cast<int>(hist.size()); ++l)
                    expected += structure_constant(ctx, n, m, l) * hist[l];
                CHECK(profile.gram(n, m) == expected);
            }
    }

    // Coefficients with 2^50-sized denominators, and signed coefficients.
    const ElementSet E = ElementSet::from_words(ctx, {w(ctx, "1"), w(ctx, "ab"), w(ctx, "Ba"), w(ctx, "aab")});
    const SetProfile profile = SetProfile::build(E, 4);
    std::vector<Rational> geometric, signed_coeffs;
    for (int n = 0; n <= 4; ++n) {
        geometric.push_back(exact_rational(std::pow(3.0, -0.45 * n)));
        signed_coeffs.push_back(Rational(n % 2 == 0 ? 2 : -3, n + 1));
    }
    for (const RadialFunction& f : {RadialFunction(ctx, geometric), RadialFunction(ctx, signed_coeffs)}) {
        const FunctionOnGroup image = left_convolve(f, E.indicator());
        CHECK(profile.image_rearrangement(f) == rearrange(image));
        CHECK(profile.image_l2_squared(f) == image.l2_norm_squared());
    }

    // Sphere unions: symbolic path against enumerated words.
    for (std::vector<int> radii : {std::vector<int>{0}, {2}, {1, 3}, {0, 1, 2, 3}}) {
        const ElementSet symbolic = ElementSet::sphere_union(ctx, radii);
        const ElementSet explicit_set = ElementSet::from_words(ctx, symbolic.enumerate());
        const RadialFunction f = random_radial(rng, ctx, 3);
        CHECK(image_rearrangement(f, symbolic) == image_rearrangement(f, explicit_set));
        CHECK(image_l2_squared(f, symbolic) == image_l2_squared(f, explicit_set));
    }
}

TEST_CASE("estimators")
{
    const FreeGroupCtx ctx(2);
    const auto chi0 = RadialFunction::sphere(ctx, 0);
    for (auto kind : {FamilyKind::spheres, FamilyKind::sphere_unions, FamilyKind::random_subsets, FamilyKind::greedy}) {
        const SetFamily family{kind, 3, 40, 1};
        CHECK(static_cast<double>(restricted_weak_estimate(chi0, family).estimate) == doctest::Approx(1.0));
        const auto weak = weak_estimate_21_to_2(chi0, family);
        CHECK(weak.estimate_squared == Rational(1));
    }

    // chi_n against spheres: the restricted estimate sits between q^{n/2}/2 and 2 q^{3/2} q^{n/2}.
    for (int n = 0; n <= 5; ++n) {
        const auto r = restricted_weak_estimate(RadialFunction::sphere(ctx, n), {FamilyKind::spheres, 6, 100, 0});
        const double scaled = static_cast<double>(r.estimate) / std::pow(3.0, n / 2.0);
        CHECK(scaled >= 0.5);
        CHECK(scaled <= 2 * std::pow(3.0, 1.5));
        REQUIRE(r.argmax);
    }

    // Enlarging the family never lowers an estimate.
    Rng rng(3);
    for (int t = 0; t < 8; ++t) {
        const RadialFunction f = random_radial(rng, ctx, 3);
        const auto spheres = restricted_weak_estimate(f, {FamilyKind::spheres, 4, 100, 0});
        const auto balls = restricted_weak_estimate(f, {FamilyKind::balls, 4, 100, 0});
        const auto unions = restricted_weak_estimate(f, {FamilyKind::sphere_unions, 4, 100, 0});
        CHECK(unions.estimate >= spheres.estimate);
        CHECK(unions.estimate >= balls.estimate);
        const auto w_spheres = weak_estimate_21_to_2(f, {FamilyKind::spheres, 4, 100, 0});
        const auto w_unions = weak_estimate_21_to_2(f, {FamilyKind::sphere_unions, 4, 100, 0});
        CHECK(*w_unions.estimate_squared >= *w_spheres.estimate_squared);

        const auto greedy = weak_estimate_21_to_2(f, {FamilyKind::greedy, 2, 50, 0});
        const auto single = ElementSet::ball(ctx, 0);
        CHECK(*greedy.estimate_squared >= image_l2_squared(f, single));

        // Squared weak estimate never exceeds 4 A(f).
        CHECK(less_equal(*w_unions.estimate_squared, Rational(4) * a_functional(f)));
        CHECK(less_equal(*greedy.estimate_squared, Rational(4) * a_functional(f)));
    }

    // A prepared family gives the same report as the one-shot call.
    const SetFamily random{FamilyKind::random_subsets, 3, 30, 11};
    const PreparedFamily prepared(ctx, random, 3);
    const RadialFunction f{ctx, {1, 2, 0, 1}};
    const auto once = restricted_weak_estimate(f, random);
    const auto reused = restricted_weak_estimate(f, prepared);
    CHECK(once.estimate == reused.estimate);
    CHECK(once.argmax == reused.argmax);
    CHECK(once.prefix == reused.prefix);
}

TEST_CASE("truncated columns")
{
    const FreeGroupCtx ctx(2);
    const FunctionOnGroup p = truncated_column(ctx, {ColumnKind::P, 2, 0}, w(ctx, "ab"));
    CHECK(p == from_values(ctx, {{"1", 1}, {"bb", 1}, {"Ab", 1}}));
    for (int k = 1; k <= 4; ++k)
        CHECK(truncated_column(ctx, {ColumnKind::P, k, 0}, ReducedWord{}).empty());

    // Q always contains delta_e through w = x^{-1}.
    for (double alpha : {-2.0, 0.0, 1.5, 4.0, 10.0}) {
        const auto x = w(ctx, "abAB");
        CHECK(truncated_column(ctx, {ColumnKind::Q, 4, alpha}, x).at(ReducedWord{}) == 1);
    }

    CHECK(q_admissible(ctx, 0.5, 6, 3));   // 6 >= sqrt(3) * 3
    CHECK(!q_admissible(ctx, 0.5, 5, 3));  // 25 < 27
    CHECK(q_admissible(ctx, 1.0, 3, 1));
    CHECK(!q_admissible(ctx, 1.0, 2, 1));
    CHECK(q_admissible(ctx, -1.0, 1, 3));
    CHECK(q_admissible(ctx, 7.0, 3, 0));

    // Column sups against brute force over B_4.
    for (int k = 0; k <= 4; ++k) {
        const ColumnParams params{ColumnKind::P, k, 0};
        std::uint64_t best = 0;
        for (const auto& x : enumerate_ball(ctx, 4)) {
            std::uint64_t mass = 0;
            const FunctionOnGroup column = truncated_column(ctx, params, x);
            for (const auto& [y, v] : column.entries())
                mass += v.convert_to<std::uint64_t>();
            best = std::max(best, mass);
        }
        const ColumnSup sup = column_l1_sup(ctx, params, 4);
        CHECK(sup.sup_mass == best);
        CHECK(!sup.violation);
        CHECK(sup.bound == doctest::Approx(std::pow(3.0, k / 2)));
    }
    const ColumnSup q_sup = column_l1_sup(ctx, {ColumnKind::Q, 4, 0}, 5);
    CHECK(!q_sup.violation);
    CHECK(static_cast<double>(q_sup.sup_mass) <= std::pow(3.0, 1.5 + 2));
    const ColumnSup gap = column_l1_sup(ctx, {ColumnKind::Q, 4, 4}, 5);
    REQUIRE(gap.violation);
    CHECK(gap.sup_mass >= 1);
}
