#include <doctest.h>

#include <cmath>

#include <fmt/format.h>

#include "fgw/parallel.hpp"
#include "fgw/theorems.hpp"

using namespace fgw;

namespace {

const ReportRow& row(const VerificationReport& r, const std::string& instance)
{
    for (const auto& x : r.rows)
        if (x.instance == instance)
            return x;
    FAIL("missing row " << instance);
    throw std::logic_error("unreachable");
}

/// ||chi_n * chi_m||_2^2 from brute-force pair tallies.
BigInt oracle_l2_squared(const FreeGroupCtx& ctx, int n, int m)
{
    const RadialFunction g = oracle_convolve(ctx, n, m);
    Rational total = 0;
    for (int l = 0; l <= g.degree(); ++l)
        total += g[l] * g[l] * Rational(sphere_size(ctx, l));
    return boost::multiprecision::numerator(total);
}

} // namespace

TEST_CASE("two-sided weak-norm certificate")
{
    const FreeGroupCtx ctx(2);
    const std::vector<SetFamily> families{{FamilyKind::exhaustive, 1, 32, 0}, {FamilyKind::sphere_unions, 5, 63, 0}};

    const std::vector<SuiteFunction> chi0{{"chi_0", RadialFunction::sphere(ctx, 0)}};
    const auto r0 = verify_thm1(chi0, families);
    CHECK(r0.status == Status::pass);
    CHECK(row(r0, "chi_0 upper").lhs == 1);
    CHECK(row(r0, "chi_0 upper").rhs == 4);
    CHECK(*row(r0, "chi_0 upper").margin() == doctest::Approx(4));
    CHECK(*row(r0, "chi_0 lower").margin() == doctest::Approx(15));

    // chi_2: A = 3 q^2 = 27; the chain maximum over m in [4, 8] from brute-force tallies.
    const std::vector<SuiteFunction> chi2{{"chi_2", RadialFunction::sphere(ctx, 2)}};
    const auto r2 = verify_thm1(chi2, families);
    CHECK(r2.status == Status::pass);
    Rational best = 0;
    for (int m = 4; m <= 8; ++m)
        best = std::max(best, Rational(oracle_l2_squared(ctx, 2, m)) / Rational(sphere_size(ctx, m)));
    CHECK(row(r2, "chi_2 lower").params.at("chain").get<std::string>() == format_rational(best));
    CHECK(row(r2, "chi_2 lower").lhs == doctest::Approx(27.0 / 15));
    CHECK(row(r2, "chi_2 upper").rhs == doctest::Approx(108));

    // Near-extremal q^{-n/2} up to degree 6.
    const std::vector<SuiteFunction> near{{"near", truncated_geometric(ctx, 0.5, 6)}};
    const auto rn = verify_thm1(near, families);
    CHECK(rn.status == Status::pass);
    CHECK(*row(rn, "near upper").margin() >= 1);

    const auto suite = theorem_suite_functions(ctx);
    CHECK(suite.size() == 50);
    for (const auto& s : suite)
        CHECK(s.f.degree() <= 6);
}

TEST_CASE("distance pairing bound")
{
    const FreeGroupCtx ctx(2);
    const std::vector<SetFamily> subsets{{FamilyKind::exhaustive, 1, 32, 0}};
    const auto r = verify_lemma1(ctx, subsets, 4);
    CHECK(r.status == Status::pass);
    CHECK(r.rows.size() == 32 * 5);
    // Mask 31 is all of B_1: <chi_1 * chi_E, chi_E> = 8 <= 10.
    CHECK(row(r, "exhaustive#31 k=1").lhs == 8);
    CHECK(row(r, "exhaustive#31 k=1").rhs == 10);
    // The empty set: both sides vanish and the margin is undefined.
    CHECK(!row(r, "exhaustive#0 k=2").margin());

    // S_4 at k = 8 against a brute-force distance count.
    const std::vector<SetFamily> spheres{{FamilyKind::spheres, 4, 10, 0}};
    const auto rs = verify_lemma1(ctx, spheres, 8);
    const auto words = enumerate_sphere(ctx, 4);
    std::uint64_t pairs = 0;
    for (const auto& x : words)
        for (const auto& y : words)
            pairs += quotient_length(y, x) == 8;
    CHECK(row(rs, "spheres#4 k=8").lhs == static_cast<double>(pairs));
    CHECK(row(rs, "spheres#4 k=8").rhs == 2 * 81 * 108);
    CHECK(rs.status == Status::pass);

    const std::vector<SetFamily> greedy{{FamilyKind::greedy, 2, 5, 0}};
    CHECK_THROWS_AS(verify_lemma1(ctx, greedy, 2), std::invalid_argument);
}

TEST_CASE("restricted pairing bound and the chi_n band")
{
    const FreeGroupCtx ctx(2);
    // E = F = S_2, n = 4 directly.
    const Rational pair = pairing(RadialFunction::sphere(ctx, 4), ElementSet::sphere(ctx, 2), ElementSet::sphere(ctx, 2));
    CHECK(pair.convert_to<double>() <= 2 * std::pow(3.0, 1.5) * 9 * 12);

    const std::vector<SetFamily> families{{FamilyKind::spheres, 3, 10, 0},
                                          {FamilyKind::random_subsets, 3, 40, 42}};
    const auto r = verify_r22(ctx, families, 5);
    CHECK(r.status == Status::pass);
    // E = B_0 = S_0: chi_n * delta_e = chi_n, best F is all of S_n.
    for (int n = 0; n <= 5; ++n) {
        const auto& x = row(r, fmt::format("spheres#0 n={}", n));
        CHECK(x.lhs == doctest::Approx(std::sqrt(sphere_size(ctx, n).convert_to<double>())));
    }
    const auto band = r.summary.at("band");
    CHECK(band[0].get<double>() >= 1);
    CHECK(band[1].get<double>() <= 2 * std::pow(3.0, 1.5));
}

TEST_CASE("restricted estimate equivalence band")
{
    const FreeGroupCtx ctx(2);
    const std::vector<SetFamily> families{{FamilyKind::sphere_unions, 6, 127, 0}};
    const std::vector<SuiteFunction> chi0{{"chi_0", RadialFunction::sphere(ctx, 0)}};
    const auto r0 = thm3_equivalence_report(chi0, families);
    CHECK(r0.summary.at("band")[0].get<double>() == doctest::Approx(1));

    std::vector<SuiteFunction> spheres;
    for (int n = 1; n <= 4; ++n)
        spheres.push_back({fmt::format("chi_{}", n), RadialFunction::sphere(ctx, n)});
    const auto r = thm3_equivalence_report(spheres, families);
    CHECK(r.status == Status::pass);
    for (const auto& s : spheres) {
        const double ratio = row(r, s.name + " upper").params.at("ratio").get<double>();
        CHECK(ratio >= 1);
        CHECK(ratio <= 2 * std::pow(3.0, 1.5));
    }

    const auto samples = random_suite_functions(ctx, 20, 6, 5);
    const auto rr = thm3_equivalence_report(samples, families);
    CHECK(rr.status == Status::pass);
    CHECK(rr.summary.at("spread").get<double>() <= 25);
}

TEST_CASE("p-prime lower chain")
{
    const FreeGroupCtx ctx(2);
    const std::vector<double> ps{1.25, 1.5, 1.75};
    const std::vector<SuiteFunction> chi0{{"chi_0", RadialFunction::sphere(ctx, 0)}};
    const auto r0 = thm4_lower_chain(chi0, ps);
    CHECK(r0.status == Status::pass);
    for (double p : ps) {
        const double pc = p / (p - 1);
        const auto& x = row(r0, fmt::format("chi_0 p={} n=0", p));
        CHECK(x.lhs == doctest::Approx(std::pow(2.0 / 3.0, pc)));
        CHECK(x.rhs == doctest::Approx(1.0));
    }

    // chi_2, p = 1.5 against brute-force tallies of chi_2 * chi_n.
    const std::vector<double> p15{1.5};
    const std::vector<SuiteFunction> chi2{{"chi_2", RadialFunction::sphere(ctx, 2)}};
    const auto r2 = thm4_lower_chain(chi2, p15);
    CHECK(r2.status == Status::pass);
    for (int n = 2; n <= 5; ++n) {
        const RadialFunction g = oracle_convolve(ctx, 2, n);
        double norm = 0;
        for (int l = 0; l <= g.degree(); ++l)
            norm += std::pow(g[l].convert_to<double>(), 3.0) * sphere_size(ctx, l).convert_to<double>();
        const auto& x = row(r2, fmt::format("chi_2 p=1.5 n={}", n));
        CHECK(x.rhs == doctest::Approx(norm / std::pow(3.0, n)));
        CHECK(x.lhs == doctest::Approx(std::pow(2.0 / 3.0, 3.0) * std::pow(3.0, 2 * 3.0 / 1.5)));
    }

    const auto random = random_suite_functions(ctx, 10, 5, 3);
    CHECK(thm4_lower_chain(random, ps).status == Status::pass);
    const std::vector<double> bad{2.0};
    CHECK_THROWS_AS(thm4_lower_chain(chi0, bad), DomainError);
}

TEST_CASE("Lorentz exponent fit")
{
    const FreeGroupCtx ctx(2);
    const auto r = thm5_exponent_fit(ctx, 2, kInfinity, 4, 40);
    CHECK(r.status == Status::pass);
    CHECK(r.summary.at("expected").get<double>() == doctest::Approx(0.5));
    CHECK(r.parameters.at("t") == "inf");
    CHECK(r.rows.size() == 38);
    CHECK_THROWS_AS(thm5_exponent_fit(ctx, 2, 2, 4, 10), DomainError);
    CHECK_THROWS_AS(thm5_exponent_fit(ctx, 2.5, 3, 4, 40), DomainError);
    CHECK_THROWS_AS(thm5_exponent_fit(ctx, 1, 1.5, 4, 40), DomainError);
}

TEST_CASE("exponent functional scan")
{
    const FreeGroupCtx ctx(2);
    const std::vector<double> grid{1, 1.5, 2};
    std::vector<SuiteFunction> suite{{"chi_0", RadialFunction::sphere(ctx, 0)}, {"chi_3", RadialFunction::sphere(ctx, 3)}};
    const auto r = conjecture_scan(suite, grid);
    CHECK(r.status == Status::informational);
    for (double s : grid) {
        const auto& x = row(r, fmt::format("chi_0 s={}", s));
        CHECK(x.lhs == doctest::Approx(1));
        CHECK(x.rhs == doctest::Approx(1));
    }
    // chi_n at s = 2: (1 + sqrt n) q^n in the positive convention, (1 + sqrt n) q^{-n} in the other.
    const auto& x = row(r, "chi_3 s=2");
    CHECK(x.params.at("functional_positive").get<double>() == doctest::Approx((1 + std::sqrt(3.0)) * 27));
    CHECK(x.params.at("functional_negative").get<double>() == doctest::Approx((1 + std::sqrt(3.0)) / 27));
}

TEST_CASE("column studies")
{
    const FreeGroupCtx ctx(2);
    const auto p = p_column_study(ctx, 4, 5);
    CHECK(p.status == Status::pass);
    CHECK(p.summary.at("equality_at_every_even_k").get<bool>());
    CHECK(row(p, "k=2").lhs == 3);

    const auto q = q_column_study(ctx, 4, 4);
    for (int n = 1; n <= 4; ++n) {
        const auto& w = row(q, fmt::format("n={} alpha={} witness", n, n));
        CHECK(w.status == Status::informational);
        CHECK(w.params.at("contains_identity").get<bool>());
        CHECK(w.params.at("violated").get<bool>() == (n >= 4));
    }
    CHECK(q.summary.at("nonnegative_alpha_pass").get<bool>());

    // The multi-alpha sweep agrees with single sups.
    const std::vector<double> alphas{-1.0, -0.5, 0, 0.5, 1.0, 3.0};
    const auto sweep = column_l1_sups(ctx, 3, alphas, 5);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const auto single = column_l1_sup(ctx, {ColumnKind::Q, 3, alphas[i]}, 5);
        CHECK(sweep[i].sup_mass == single.sup_mass);
        CHECK(sweep[i].violation == single.violation);
    }
}

TEST_CASE("report emission and determinism")
{
    const FreeGroupCtx ctx(2);
    const std::vector<SetFamily> families{{FamilyKind::exhaustive, 1, 32, 0}, {FamilyKind::random_subsets, 3, 30, 9}};
    auto run = [&] {
        std::vector<VerificationReport> reports{verify_lemma1(ctx, families, 3), verify_r22(ctx, families, 3),
                                                verify_thm1(theorem_suite_functions(ctx), families)};
        return std::pair{reports_to_json(reports).dump(2), reports_to_csv(reports)};
    };
    set_thread_count(1);
    const auto serial = run();
    set_thread_count(4);
    const auto threaded = run();
    set_thread_count(1);
    CHECK(serial == threaded);

    const auto json = nlohmann::json::parse(serial.first);
    REQUIRE(json.is_array());
    CHECK(json.size() == 3);
    CHECK(json[0].at("id") == "lemma1");
    CHECK(json[0].at("rows")[0].at("margin").is_null());
    CHECK(serial.second.rfind("id,params,lhs,rhs,margin,status\n", 0) == 0);

    CHECK(round12(1.0 / 3.0) == 0.333333333333);
    CHECK(round12(2.0 / 3.0 * 1e20) == 6.66666666667e19);
    const std::vector<VerificationReport> one{thm5_exponent_fit(ctx, 2, 2, 4, 12)};
    const auto dumped = reports_to_json(one).dump();
    CHECK(dumped.find("0.85521957364947") == std::string::npos);  // no more than 12 digits survive
}
