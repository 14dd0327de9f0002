#include "fgw/radial_algebra.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

namespace fgw {

namespace {

BigInt qpow(const FreeGroupCtx& ctx, int e)
{
    return boost::multiprecision::pow(BigInt(ctx.q()), static_cast<unsigned>(e));
}

void require_nonnegative(int n, int m, int l)
{
    if (n < 0 || m < 0 || l < 0)
        throw DomainError("sphere indices must be nonnegative");
}

} // namespace

BigInt structure_constant(const FreeGroupCtx& ctx, int n, int m, int l)
{
    require_nonnegative(n, m, l);
    if (n < m)
        std::swap(n, m);
    if (m == 0)
        return l == n ? 1 : 0;
    if (l < n - m || l > n + m || (n + m - l) % 2 != 0)
        return 0;
    // j letters cancel between x and y.
    const int j = (n + m - l) / 2;
    if (j == 0)
        return 1;
    if (j < m)
        return (ctx.q() - 1) * qpow(ctx, j - 1);
    if (n > m)
        return qpow(ctx, m);
    return (ctx.q() + 1) * qpow(ctx, n - 1);
}

BigInt display_coefficient(const FreeGroupCtx& ctx, int n, int m, int l)
{
    require_nonnegative(n, m, l);
    if (n < m)
        std::swap(n, m);
    if (l < n - m || l > n + m || (n + m - l) % 2 != 0)
        return 0;
    BigInt c = qpow(ctx, (n + m - l) / 2);
    if (n == m && n >= 1 && l == 0)
        c += qpow(ctx, n - 1);
    return c;
}

RadialFunction oracle_convolve(const FreeGroupCtx& ctx, int n, int m, std::uint64_t cap)
{
    if (sphere_size(ctx, n) * sphere_size(ctx, m) > cap)
        throw BudgetExceeded(fmt::format("oracle for chi_{} * chi_{} exceeds the pair budget of {}", n, m, cap));
    const auto xs = enumerate_sphere(ctx, n, cap);
    const auto ys = enumerate_sphere(ctx, m, cap);
    std::vector<std::uint64_t> tally(static_cast<std::size_t>(n + m) + 1, 0);
    for (const auto& x : xs)
        for (const auto& y : ys)
            ++tally[mul(x, y).length()];
    // The product is radial, so the mass on S_l is spread evenly over |S_l| words.
    std::vector<Rational> coeffs(tally.size());
    for (std::size_t l = 0; l < tally.size(); ++l) {
        const BigInt size = sphere_size(ctx, static_cast<int>(l));
        if (BigInt(tally[l]) % size != 0)
            throw std::logic_error("non-radial tally in oracle convolution");
        coeffs[l] = Rational(BigInt(tally[l]) / size);
    }
    return {ctx, std::move(coeffs)};
}

FunctionOnGroup embed(const RadialFunction& f, std::uint64_t cap)
{
    FunctionOnGroup g(f.ctx());
    if (f.is_zero())
        return g;
    if (ball_size(f.ctx(), f.degree()) > cap)
        throw BudgetExceeded(fmt::format("embedding a degree-{} radial function exceeds the cap of {}", f.degree(), cap));
    for (int n = 0; n <= f.degree(); ++n) {
        if (f[n] == 0)
            continue;
        SphereStream stream(f.ctx(), n, cap);
        while (auto w = stream.next())
            g.set(*w, f[n]);
    }
    return g;
}

RealRadialFunction to_real(const RadialFunction& f)
{
    std::vector<long double> c;
    c.reserve(f.coefficients().size());
    for (const auto& v : f.coefficients())
        c.push_back(v.convert_to<long double>());
    return {f.ctx(), std::move(c)};
}

long double QuadraticSurd::value() const
{
    return a.convert_to<long double>() + b.convert_to<long double>() * std::sqrt(static_cast<long double>(radicand));
}

bool less_equal(const Rational& x, const QuadraticSurd& s)
{
    // x - a <= b sqrt(r)
    const Rational d = x - s.a;
    const Rational d2 = d * d;
    const Rational b2r = s.b * s.b * s.radicand;
    if (s.b >= 0)
        return d <= 0 || d2 <= b2r;
    return d < 0 && d2 >= b2r;
}

bool less_equal(const QuadraticSurd& s, const Rational& x)
{
    // b sqrt(r) <= x - a
    const Rational d = x - s.a;
    const Rational d2 = d * d;
    const Rational b2r = s.b * s.b * s.radicand;
    if (s.b <= 0)
        return d >= 0 || b2r >= d2;
    return d >= 0 && b2r <= d2;
}

QuadraticSurd operator*(const Rational& scale, const QuadraticSurd& s)
{
    return {scale * s.a, scale * s.b, s.radicand};
}

QuadraticSurd a_functional(const RadialFunction& f, ExponentSign sign)
{
    const FreeGroupCtx& ctx = f.ctx();
    QuadraticSurd out{0, 0, ctx.q()};
    for (int n = 0; n <= f.degree(); ++n) {
        if (f[n] == 0)
            continue;
        for (int m = 0; m <= f.degree(); ++m) {
            if (f[m] == 0)
                continue;
            const Rational w = abs(f[n]) * abs(f[m]) * (1 + std::min(n, m));
            const int e = n + m;
            if (sign == ExponentSign::positive) {
                if (e % 2 == 0)
                    out.a += w * qpow(ctx, e / 2);
                else
                    out.b += w * qpow(ctx, (e - 1) / 2);
            } else {
                if (e % 2 == 0)
                    out.a += w / Rational(qpow(ctx, e / 2));
                else
                    out.b += w / Rational(qpow(ctx, (e + 1) / 2));
            }
        }
    }
    return out;
}

long double a_functional(const RealRadialFunction& f, ExponentSign sign)
{
    const long double q = f.ctx().q();
    const long double dir = sign == ExponentSign::positive ? 0.5L : -0.5L;
    long double total = 0;
    for (int n = 0; n <= f.degree(); ++n)
        for (int m = 0; m <= f.degree(); ++m)
            total += std::fabs(f[n]) * std::fabs(f[m]) * std::pow(q, dir * (n + m)) * (1 + std::min(n, m));
    return total;
}

long double conjecture_functional(const RadialFunction& f, double s, ExponentSign sign)
{
    if (!(s >= 1.0 && s <= 2.0))
        throw DomainError(fmt::format("conjecture functional needs 1 <= s <= 2, got {}", s));
    for (const auto& c : f.coefficients())
        if (c < 0)
            throw DomainError("conjecture functional needs nonnegative coefficients");
    const long double inv_conj = s == 1.0 ? 0.0L : 1.0L - 1.0L / s;
    auto root = [&](int n) -> long double {
        if (n == 0)
            return 0;
        return inv_conj == 0 ? 1.0L : std::pow(static_cast<long double>(n), inv_conj);
    };
    const long double q = f.ctx().q();
    const long double dir = sign == ExponentSign::positive ? 0.5L : -0.5L;
    long double total = 0;
    for (int n = 0; n <= f.degree(); ++n) {
        if (f[n] == 0)
            continue;
        for (int m = 0; m <= f.degree(); ++m) {
            if (f[m] == 0)
                continue;
            total += f[n].convert_to<long double>() * f[m].convert_to<long double>() *
                     std::pow(q, dir * (n + m)) * (1 + std::min(root(n), root(m)));
        }
    }
    return total;
}

Rational parse_rational(std::string_view text)
{
    auto fail = [&] { return std::invalid_argument(fmt::format("malformed rational '{}'", text)); };
    while (!text.empty() && text.front() == ' ')
        text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ')
        text.remove_suffix(1);
    if (text.empty())
        throw fail();
    auto parse_integer = [&](std::string_view digits) {
        bool negative = false;
        if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) {
            negative = digits.front() == '-';
            digits.remove_prefix(1);
        }
        if (digits.empty())
            throw fail();
        BigInt v = 0;
        for (char ch : digits) {
            if (ch < '0' || ch > '9')
                throw fail();
            v = v * 10 + (ch - '0');
        }
        return negative ? BigInt(-v) : v;
    };
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        BigInt den = parse_integer(text.substr(slash + 1));
        if (den == 0)
            throw fail();
        return Rational(parse_integer(text.substr(0, slash)), den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view frac = text.substr(dot + 1);
        std::string_view whole = text.substr(0, dot);
        const bool negative = !whole.empty() && whole.front() == '-';
        if (frac.empty() || frac.front() == '-' || frac.front() == '+')
            throw fail();
        std::string digits(whole);
        if (digits.empty() || digits == "-" || digits == "+")
            digits += "0";
        BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
        Rational r(parse_integer(digits));
        Rational f(parse_integer(frac), scale);
        return negative ? r - f : r + f;
    }
    return Rational(parse_integer(text));
}

RadialFunction parse_radial(const FreeGroupCtx& ctx, std::string_view text)
{
    std::vector<Rational> coeffs;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        coeffs.push_back(parse_rational(text.substr(start, comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return {ctx, std::move(coeffs)};
}

std::string format_rational(const Rational& r)
{
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    if (den == 1)
        return num.str();
    return num.str() + "/" + den.str();
}

std::string format_radial(const RadialFunction& f)
{
    if (f.is_zero())
        return "0";
    std::string out;
    for (int n = 0; n <= f.degree(); ++n) {
        if (n > 0)
            out += ',';
        out += format_rational(f[n]);
    }
    return out;
}

Rational exact_rational(double x)
{
    if (!std::isfinite(x))
        throw DomainError("cannot convert a non-finite double to a rational");
    if (x == 0)
        return 0;
    int exp = 0;
    const double mant = std::frexp(x, &exp);
    const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
    exp -= 53;
    Rational r{BigInt(scaled)};
    if (exp >= 0)
        return r * Rational(BigInt(1) << exp);
    return r / Rational(BigInt(1) << -exp);
}

} // namespace fgw
