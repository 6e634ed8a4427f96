#ifndef BILAT_NUMERIC_HPP
#define BILAT_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bilat {

// Log-gamma via the Lanczos approximation (g = 7, 9 coefficients).
inline double log_gamma(double x) {
    static constexpr double kLanczosG = 7.0;
    static constexpr double kCoeff[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7
    };

    if (!(x > 0.0))
        throw std::domain_error("log_gamma: argument must be positive");

    if (x < 0.5) {
        // Reflection formula
        return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
    }

    x -= 1.0;
    double a = kCoeff[0];
    for (int i = 1; i < 9; ++i)
        a += kCoeff[i] / (x + i);

    const double t = x + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * M_PI) + (x + 0.5) * std::log(t) - t + std::log(a);
}

inline double log_factorial(double n) {
    return log_gamma(n + 1.0);
}

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
// Series for the lower tail when x < a + 1, Lentz continued fraction above.
inline double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw std::domain_error("regularized_gamma_q: need a > 0 and x >= 0");
    if (x == 0.0)
        return 1.0;

    const double log_prefactor = a * std::log(x) - x - log_gamma(a);

    if (x < a + 1.0) {
        double ap = a;
        double term = 1.0 / a;
        double sum = term;
        for (int i = 0; i < 1000; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-17)
                break;
        }
        const double p = sum * std::exp(log_prefactor);
        return std::clamp(1.0 - p, 0.0, 1.0);
    }

    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16)
            break;
    }
    return std::clamp(h * std::exp(log_prefactor), 0.0, 1.0);
}

struct QuadraticRoots {
    int count = 0;
    double root[2] = {0.0, 0.0};  // sorted ascending when count == 2
};

// Real roots of a x^2 + b x + c = 0 in the cancellation-safe form
// q = -(b + sign(b) sqrt(disc)) / 2, roots q/a and c/q.
inline QuadraticRoots solve_quadratic(double a, double b, double c) {
    if (a == 0.0 && b == 0.0 && c == 0.0)
        throw std::invalid_argument("solve_quadratic: all coefficients zero");

    QuadraticRoots out;
    if (a == 0.0) {
        if (b == 0.0)
            return out;  // c != 0: no root
        out.count = 1;
        out.root[0] = -c / b;
        return out;
    }

    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0)
        return out;
    if (disc == 0.0) {
        out.count = 1;
        out.root[0] = -b / (2.0 * a);
        return out;
    }

    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(sq, b));
    const double r1 = q / a;
    const double r2 = c / q;
    out.count = 2;
    out.root[0] = std::min(r1, r2);
    out.root[1] = std::max(r1, r2);
    return out;
}

}  // namespace bilat

#endif  // BILAT_NUMERIC_HPP
