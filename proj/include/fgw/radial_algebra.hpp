#pragma once

// The commutative algebra of finitely supported radial functions on F_k.

#include <string>
#include <string_view>
#include <vector>

#include "fgw/free_words.hpp"
#include "fgw/function_on_group.hpp"

namespace fgw {

/// Finitely supported radial function sum_n f_n chi_n. Trailing zero
/// coefficients are trimmed, so degree() is the last nonzero index
/// (-1 for the zero function).
template <class T>
class BasicRadialFunction {
public:
    explicit BasicRadialFunction(const FreeGroupCtx& ctx) : ctx_(ctx) {}
    BasicRadialFunction(const FreeGroupCtx& ctx, std::vector<T> coeffs) : ctx_(ctx), coeffs_(std::move(coeffs))
    {
        trim();
    }

    /// The indicator chi_n of the sphere S_n.
    static BasicRadialFunction sphere(const FreeGroupCtx& ctx, int n)
    {
        std::vector<T> c(static_cast<std::size_t>(n) + 1, T(0));
        c.back() = T(1);
        return {ctx, std::move(c)};
    }

    const FreeGroupCtx& ctx() const noexcept { return ctx_; }
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    const std::vector<T>& coefficients() const noexcept { return coeffs_; }

    T operator[](int n) const
    {
        return n >= 0 && n <= degree() ? coeffs_[static_cast<std::size_t>(n)] : T(0);
    }

    BasicRadialFunction& operator+=(const BasicRadialFunction& other)
    {
        check_ctx(other);
        if (other.coeffs_.size() > coeffs_.size())
            coeffs_.resize(other.coeffs_.size(), T(0));
        for (std::size_t i = 0; i < other.coeffs_.size(); ++i)
            coeffs_[i] += other.coeffs_[i];
        trim();
        return *this;
    }

    BasicRadialFunction& operator*=(const T& scale)
    {
        for (auto& c : coeffs_)
            c *= scale;
        trim();
        return *this;
    }

    friend BasicRadialFunction operator+(BasicRadialFunction a, const BasicRadialFunction& b) { return a += b; }
    friend BasicRadialFunction operator*(BasicRadialFunction a, const T& s) { return a *= s; }

    bool operator==(const BasicRadialFunction&) const = default;

    void check_ctx(const BasicRadialFunction& other) const
    {
        if (!(ctx_ == other.ctx_))
            throw ContextMismatch("radial functions over different free groups");
    }

private:
    void trim()
    {
        while (!coeffs_.empty() && coeffs_.back() == T(0))
            coeffs_.pop_back();
    }

    FreeGroupCtx ctx_;
    std::vector<T> coeffs_;
};

using RadialFunction = BasicRadialFunction<Rational>;
using RealRadialFunction = BasicRadialFunction<long double>;

/// Exact c(n, m, l) in chi_n * chi_m = sum_l c(n, m, l) chi_l.
BigInt structure_constant(const FreeGroupCtx& ctx, int n, int m, int l);

/// The coarser closed form q^{(n+m-l)/2} (+ q^{n-1} at l = 0 when n = m >= 1).
/// It majorizes the exact constants within a factor of two; used for bound checks only.
BigInt display_coefficient(const FreeGroupCtx& ctx, int n, int m, int l);

namespace detail {
template <class T>
T convert_count(const BigInt& c)
{
    if constexpr (std::is_same_v<T, Rational>)
        return Rational(c);
    else
        return c.template convert_to<T>();
}
} // namespace detail

template <class T>
BasicRadialFunction<T> convolve_radial(const BasicRadialFunction<T>& f, const BasicRadialFunction<T>& g)
{
    f.check_ctx(g);
    if (f.is_zero() || g.is_zero())
        return BasicRadialFunction<T>(f.ctx());
    std::vector<T> out(static_cast<std::size_t>(f.degree() + g.degree()) + 1, T(0));
    const auto& fc = f.coefficients();
    const auto& gc = g.coefficients();
    for (int n = 0; n <= f.degree(); ++n) {
        if (fc[n] == T(0))
            continue;
        for (int m = 0; m <= g.degree(); ++m) {
            if (gc[m] == T(0))
                continue;
            const T weight = fc[n] * gc[m];
            for (int l = std::abs(n - m); l <= n + m; l += 2)
                out[l] += weight * detail::convert_count<T>(structure_constant(f.ctx(), n, m, l));
        }
    }
    return {f.ctx(), std::move(out)};
}

/// chi_n * chi_m by tallying |xy| over every pair |x| = n, |y| = m.
/// Throws BudgetExceeded when |S_n| |S_m| exceeds the cap.
RadialFunction oracle_convolve(const FreeGroupCtx& ctx, int n, int m, std::uint64_t cap = kDefaultSphereCap);

/// f spread over the group: value f_n on every word of length n.
FunctionOnGroup embed(const RadialFunction& f, std::uint64_t cap = kDefaultSphereCap);

RealRadialFunction to_real(const RadialFunction& f);

/// a + b sqrt(r) with rational a, b; holds half-integer powers of q exactly.
struct QuadraticSurd {
    Rational a = 0;
    Rational b = 0;
    int radicand = 1;

    long double value() const;
    friend bool operator==(const QuadraticSurd&, const QuadraticSurd&) = default;
};

/// Exact test of x <= s.
bool less_equal(const Rational& x, const QuadraticSurd& s);
/// Exact test of s <= x.
bool less_equal(const QuadraticSurd& s, const Rational& x);
QuadraticSurd operator*(const Rational& scale, const QuadraticSurd& s);

/// Sign of the exponent in q^{±(n+m)/2}; both conventions are supported.
enum class ExponentSign { positive, negative };

/// A(f) = sum_{n,m} |f_n||f_m| q^{+-(n+m)/2} (1 + min(n, m)), exactly.
QuadraticSurd a_functional(const RadialFunction& f, ExponentSign sign = ExponentSign::positive);
long double a_functional(const RealRadialFunction& f, ExponentSign sign = ExponentSign::positive);

/// sum_{n,m} f_n f_m q^{+-(n+m)/2} {1 + min(n^{1/s'}, m^{1/s'})}, s' = s/(s-1).
/// At s = 1 the exponent 1/s' is 0; n^0 is taken as 1 for n >= 1 and 0 for n = 0,
/// which keeps the functional continuous in s. Throws DomainError unless 1 <= s <= 2.
long double conjecture_functional(const RadialFunction& f, double s,
                                  ExponentSign sign = ExponentSign::positive);

/// Parses "1,1/3,0,2" into f_0 = 1, f_1 = 1/3, f_2 = 0, f_3 = 2.
RadialFunction parse_radial(const FreeGroupCtx& ctx, std::string_view text);
std::string format_radial(const RadialFunction& f);
/// "p/q" or "p".
std::string format_rational(const Rational& r);
Rational parse_rational(std::string_view text);
/// The exact binary value of a finite double.
Rational exact_rational(double x);

} // namespace fgw
