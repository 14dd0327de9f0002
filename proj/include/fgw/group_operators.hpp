#pragma once

// Brute-force convolution on truncated supports, the truncation operators
// P_k and Q_n^alpha, and set-search estimators for weak-type norms of
// radial convolution operators.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fgw/free_words.hpp"
#include "fgw/function_on_group.hpp"
#include "fgw/lorentz.hpp"
#include "fgw/radial_algebra.hpp"

namespace fgw {

/// Finite E in F_k: an explicit sorted word list, or a union of spheres kept
/// symbolically so that radial fast paths never enumerate it.
class ElementSet {
public:
    static ElementSet from_words(const FreeGroupCtx& ctx, std::vector<ReducedWord> words);
    static ElementSet sphere_union(const FreeGroupCtx& ctx, std::vector<int> radii);
    static ElementSet sphere(const FreeGroupCtx& ctx, int n) { return sphere_union(ctx, {n}); }
    static ElementSet ball(const FreeGroupCtx& ctx, int radius);

    const FreeGroupCtx& ctx() const noexcept { return ctx_; }
    bool is_radial() const noexcept { return radial_; }
    /// Sphere radii of a radial set, ascending.
    const std::vector<int>& radii() const noexcept { return radii_; }
    /// Words of an explicit set; throws std::logic_error for a radial set.
    const std::vector<ReducedWord>& words() const;
    std::vector<ReducedWord> enumerate(std::uint64_t cap = kDefaultSphereCap) const;

    BigInt size() const;
    bool empty() const noexcept { return radial_ ? radii_.empty() : words_.empty(); }
    int max_length() const noexcept;

    /// sum of chi_n over the radii; radial sets only.
    RadialFunction indicator_radial() const;
    FunctionOnGroup indicator(std::uint64_t cap = kDefaultSphereCap) const;

    /// "S{0,2}" for sphere unions, "{1,a,bA}" for explicit sets.
    std::string describe() const;

    bool operator==(const ElementSet&) const = default;

private:
    ElementSet(const FreeGroupCtx& ctx, bool radial) : ctx_(ctx), radial_(radial) {}

    FreeGroupCtx ctx_;
    bool radial_;
    std::vector<int> radii_;
    std::vector<ReducedWord> words_;
};

enum class FamilyKind { spheres, balls, sphere_unions, exhaustive, random_subsets, greedy };

std::string to_string(FamilyKind kind);
FamilyKind parse_family_kind(std::string_view name);

/// Search-space descriptor. Every produced set lies in B_radius; at most
/// budget sets are produced (greedy: at most budget augmentation steps).
struct SetFamily {
    FamilyKind kind = FamilyKind::sphere_unions;
    int radius = 4;
    std::uint64_t budget = 1000;
    std::uint64_t seed = 0;
};

/// Candidate sets of a non-greedy family, in a fixed order. Sphere unions are
/// ordered by bit mask; exhaustive subsets of B_R (the empty set included) by
/// mask over shortlex-ordered B_R; random subsets draw a uniform size and then a
/// uniform sample of that size. Throws BudgetExceeded when an enumerative family
/// would exceed its budget.
std::vector<ElementSet> generate_family(const FreeGroupCtx& ctx, const SetFamily& family);

/// (f * g)(z) = sum over w x = z of f(|w|) g(x), exactly.
FunctionOnGroup left_convolve(const RadialFunction& f, const FunctionOnGroup& g,
                              std::uint64_t cap = kDefaultSphereCap);

/// Counts of pairs (x, y) in E x F by |y x^{-1}|.
std::vector<std::uint64_t> distance_histogram(const std::vector<ReducedWord>& E,
                                              const std::vector<ReducedWord>& F);

/// <f * chi_E, chi_F>, exactly.
Rational pairing(const RadialFunction& f, const ElementSet& E, const ElementSet& F);

/// Brute-force convolution profile of an explicit set: for every z within
/// distance `degree` of E, the vector ((chi_n * chi_E)(z))_{n <= degree},
/// aggregated over z with equal vectors. Any f * chi_E with deg f <= degree is
/// read off from it.
class SetProfile {
public:
    struct Row {
        std::vector<std::uint32_t> counts;
        std::uint64_t multiplicity;
    };

    static SetProfile build(const ElementSet& E, int degree, std::uint64_t cap = kDefaultSphereCap);

    int degree() const noexcept { return degree_; }
    const std::vector<Row>& rows() const noexcept { return rows_; }

    Rearrangement image_rearrangement(const RadialFunction& f) const;
    Rational image_l2_squared(const RadialFunction& f) const;
    /// <chi_n * chi_E, chi_m * chi_E>.
    BigInt gram(int n, int m) const;

private:
    void compute_gram();

    int degree_ = 0;
    std::vector<Row> rows_;
    std::vector<BigInt> gram_;  // row-major, (degree + 1)^2
};

/// Candidate sets prepared once (profiles for explicit sets) and reused across f.
class PreparedFamily {
public:
    PreparedFamily(const FreeGroupCtx& ctx, const SetFamily& family, int max_degree,
                   std::uint64_t cap = kDefaultSphereCap);
    PreparedFamily(std::vector<ElementSet> sets, int max_degree, std::uint64_t cap = kDefaultSphereCap);

    const SetFamily& family() const noexcept { return family_; }
    std::size_t size() const noexcept { return sets_.size(); }
    const ElementSet& set(std::size_t i) const { return sets_.at(i); }
    int max_degree() const noexcept { return max_degree_; }

    Rearrangement image_rearrangement(std::size_t i, const RadialFunction& f) const;
    Rational image_l2_squared(std::size_t i, const RadialFunction& f) const;

private:
    void prepare(std::uint64_t cap);

    SetFamily family_;
    int max_degree_;
    std::vector<ElementSet> sets_;
    std::vector<std::optional<SetProfile>> profiles_;
};

/// f * chi_E as a rearrangement (radial fast path for sphere unions).
Rearrangement image_rearrangement(const RadialFunction& f, const ElementSet& E,
                                  std::uint64_t cap = kDefaultSphereCap);
Rational image_l2_squared(const RadialFunction& f, const ElementSet& E, std::uint64_t cap = kDefaultSphereCap);

struct PrefixRatio {
    long double ratio = 0;
    BigInt prefix = 0;
};

/// max over F of <g, chi_F> / |F|^{1/p'} for g >= 0. The optimum is a level-set
/// prefix of the rearrangement, so this is max_j (a_1 + ... + a_j) / j^{1/p'},
/// attained at a run endpoint.
PrefixRatio best_F_ratio(const Rearrangement& r, double p);
PrefixRatio best_F_ratio(const FunctionOnGroup& g, double p);

struct EstimateReport {
    long double estimate = 0;
    /// Exact square of the estimate when it is rational (weak estimator only).
    std::optional<Rational> estimate_squared;
    std::optional<ElementSet> argmax;
    BigInt prefix = 0;
    SetFamily family;
    std::uint64_t candidates = 0;
};

/// Certified lower bound on ||lambda(f)||_{(2,1)->(2,inf)}:
/// max over E of best_F_ratio(f * chi_E, 2) / |E|^{1/2}.
EstimateReport restricted_weak_estimate(const RadialFunction& f, const SetFamily& family,
                                        std::uint64_t cap = kDefaultSphereCap);
EstimateReport restricted_weak_estimate(const RadialFunction& f, const PreparedFamily& family);

/// Certified lower bound on ||lambda(f)||_{2->(2,inf)} = ||lambda(f)||_{(2,1)->2}:
/// max over E of ||f * chi_E||_2 / |E|^{1/2}.
EstimateReport weak_estimate_21_to_2(const RadialFunction& f, const SetFamily& family,
                                     std::uint64_t cap = kDefaultSphereCap);
EstimateReport weak_estimate_21_to_2(const RadialFunction& f, const PreparedFamily& family);

enum class ColumnKind { P, Q };

struct ColumnParams {
    ColumnKind kind = ColumnKind::P;
    /// k for P_k, n for Q_n^alpha.
    int length = 0;
    /// Q only.
    double alpha = 0;
};

/// P_k delta_x = sum over |w| = k, |wx| <= |x| of delta_{wx};
/// Q_n^alpha delta_x = sum over |w| = n, |x| >= q^alpha |wx| of delta_{wx}.
FunctionOnGroup truncated_column(const FreeGroupCtx& ctx, const ColumnParams& params, const ReducedWord& x,
                                 std::uint64_t cap = kDefaultSphereCap);

/// Whether |x| >= q^alpha |y|; exact when 2 alpha is an integer.
bool q_admissible(const FreeGroupCtx& ctx, double alpha, std::size_t x_len, std::size_t y_len);

/// q^{[k/2]} for P, q^{3/2 - alpha + n/2} for Q.
long double column_bound(const FreeGroupCtx& ctx, const ColumnParams& params);
/// mass > column_bound, exactly when 2 alpha is an integer.
bool exceeds_column_bound(const FreeGroupCtx& ctx, const ColumnParams& params, std::uint64_t mass);

struct ColumnSup {
    std::uint64_t sup_mass = 0;
    ReducedWord argmax;
    long double bound = 0;
    /// Lexicographically first x whose column mass exceeds the bound.
    std::optional<ReducedWord> violation;
};

/// max over x in B_R of the column's l1 mass.
ColumnSup column_l1_sup(const FreeGroupCtx& ctx, const ColumnParams& params, int radius,
                        std::uint64_t cap = kDefaultSphereCap);
/// Q columns of one length for several alpha, sharing the length tallies.
std::vector<ColumnSup> column_l1_sups(const FreeGroupCtx& ctx, int length, std::span<const double> alphas, int radius,
                                      std::uint64_t cap = kDefaultSphereCap);

} // namespace fgw
