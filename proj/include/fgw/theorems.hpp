#pragma once

// Composite verifiers. Each binds functionals, estimators and norms into a
// report whose verdict can be recomputed from its parameter block.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fgw/group_operators.hpp"
#include "fgw/lorentz.hpp"
#include "fgw/radial_algebra.hpp"

namespace fgw {

enum class Status { pass, fail, informational };

std::string to_string(Status status);

/// One tested instance of `lhs <= rhs`. Lower-bound checks are stored the same
/// way round, so rhs / lhs >= 1 always means the inequality holds.
struct ReportRow {
    std::string instance;
    nlohmann::json params = nlohmann::json::object();
    double lhs = 0;
    double rhs = 0;
    Status status = Status::pass;

    /// rhs / lhs; absent when lhs = 0.
    std::optional<double> margin() const;
};

struct VerificationReport {
    std::string id;
    nlohmann::json parameters = nlohmann::json::object();
    /// The checked inequality in symbols.
    std::string inequality;
    /// The tightest checked instance with numbers substituted.
    std::string rendered;
    std::vector<ReportRow> rows;
    nlohmann::json summary = nlohmann::json::object();
    std::optional<std::string> witness;
    Status status = Status::pass;

    /// Smallest margin over the rows that carry a verdict.
    std::optional<double> margin() const;
};

/// A named radial test function.
struct SuiteFunction {
    std::string name;
    RadialFunction f;
};

/// Single spheres chi_0..chi_6, truncated geometric q^{-beta n} for
/// beta in {0.4, 0.5, 0.6} and degrees 1..6, and 25 seeded sparse supports.
std::vector<SuiteFunction> theorem_suite_functions(const FreeGroupCtx& ctx, std::uint64_t seed = 0);

/// Nonnegative radial functions with degree <= max_degree, a nonzero top
/// coefficient and small rational coefficients.
std::vector<SuiteFunction> random_suite_functions(const FreeGroupCtx& ctx, std::size_t count, int max_degree,
                                                  std::uint64_t seed);

/// sum_{n <= degree} q^{-beta n} chi_n, coefficients rounded to doubles and then held exactly.
RadialFunction truncated_geometric(const FreeGroupCtx& ctx, double beta, int degree);

/// Upper: (weak estimate)^2 <= 4 A(f) over every set of every family.
/// Lower: max over m in [2 deg f, 2 deg f + 4] of ||f * chi_m||^2 / |S_m| >= A(f) / 15.
VerificationReport verify_thm1(std::span<const SuiteFunction> suite, std::span<const SetFamily> families,
                               std::uint64_t cap = kDefaultSphereCap);

/// <chi_k * chi_E, chi_E> <= 2 q^{[k/2]} |E| for k <= k_max and every E.
VerificationReport verify_lemma1(const FreeGroupCtx& ctx, std::span<const SetFamily> families, int k_max,
                                 std::uint64_t cap = kDefaultSphereCap);

/// <chi_n * chi_E, chi_F> <= 2 q^{3/2} q^{n/2} |E|^{1/2} |F|^{1/2} for n <= n_max, with
/// the sup over F solved exactly, plus the band of restricted estimates of chi_n / q^{n/2}.
VerificationReport verify_r22(const FreeGroupCtx& ctx, std::span<const SetFamily> families, int n_max,
                              std::uint64_t cap = kDefaultSphereCap);

/// restricted_weak_estimate(f) <= 2 q^{3/2} sum f_n q^{n/2} per sample, the empirical band of
/// their ratio, and the sphere-pair lower bound against the parity-split sums.
VerificationReport thm3_equivalence_report(std::span<const SuiteFunction> samples,
                                           std::span<const SetFamily> families,
                                           std::uint64_t cap = kDefaultSphereCap);

/// (2/3)^{p'} sum_{l <= n} q^{l p'/p} f_l^{p'} <= q^{-n} ||f * chi_n||_{p'}^{p'} for
/// n = deg f .. deg f + 3, with exact convolution; relative tolerance 1e-9.
VerificationReport thm4_lower_chain(std::span<const SuiteFunction> suite, std::span<const double> ps);

/// Least-squares slope of log(||chi_n * f||_{(2,t)} / ||f||_{(2,s)} q^{-n/2}) against log n
/// for f = sum_{j <= 2n} q^{-j/2} chi_j; passes within 0.15 of 1 - 1/s + 1/t.
/// Throws DomainError for fewer than 8 points or exponents outside 1 <= s <= 2 <= t.
VerificationReport thm5_exponent_fit(const FreeGroupCtx& ctx, double s, double t, int n_lo, int n_hi);

/// Informational: the conjecture functional under both exponent signs against the
/// squared (2,s) -> (2,inf) estimate over radial test inputs.
VerificationReport conjecture_scan(std::span<const SuiteFunction> suite, std::span<const double> s_grid);

/// Test family for conjecture_scan: single spheres, geometric decays and sparse supports.
std::vector<SuiteFunction> conjecture_suite_functions(const FreeGroupCtx& ctx);

/// sup over B_radius of ||P_k delta_x||_1 against q^{[k/2]} for k <= k_max.
VerificationReport p_column_study(const FreeGroupCtx& ctx, int k_max, int radius,
                                  std::uint64_t cap = kDefaultSphereCap);

/// Q_n^alpha columns for n <= n_max over the grid |alpha| <= n/2 (step 1/2), plus the
/// informational alpha = n rows carrying the full-cancellation witness.
VerificationReport q_column_study(const FreeGroupCtx& ctx, int n_max, int radius,
                                  std::uint64_t cap = kDefaultSphereCap);

nlohmann::json family_json(const SetFamily& family);

/// Top-level array of report objects, floats rounded to 12 significant digits.
nlohmann::json reports_to_json(std::span<const VerificationReport> reports);
/// Header "id,params,lhs,rhs,margin,status" and one row per tested instance.
std::string reports_to_csv(std::span<const VerificationReport> reports);

/// Rounds to 12 significant digits.
double round12(double x);

} // namespace fgw
