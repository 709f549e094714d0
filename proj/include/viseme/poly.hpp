#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace viseme {

// Monomial order: 1, x, y, x^2, xy, y^2, x^3, x^2y, xy^2, y^3.
inline constexpr int kTerms = 10;

inline constexpr std::array<std::array<int, 2>, kTerms> kExponents{{
    {0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}}};

constexpr int term_index(int px, int py) {
    const int d = px + py;
    return d * (d + 1) / 2 + py;
}

constexpr int terms_for_order(int order) { return (order + 1) * (order + 2) / 2; }

// Bivariate polynomial of total degree <= 3.
struct Cubic {
    std::array<double, kTerms> c{};

    double operator()(double x, double y) const;
    double& operator[](int i) { return c[i]; }
    double operator[](int i) const { return c[i]; }
    int degree(double tol = 0.0) const;

    bool operator==(const Cubic&) const = default;
};

Cubic operator+(const Cubic& a, const Cubic& b);
Cubic operator-(const Cubic& a, const Cubic& b);
Cubic operator*(double s, const Cubic& a);

// Product with all monomials of degree > 3 dropped.
Cubic multiply_truncated(const Cubic& a, const Cubic& b);

// p(u(X, Y), v(X, Y)) truncated at degree 3.
Cubic compose(const Cubic& p, const Cubic& u, const Cubic& v);

Cubic linear_form(double c0, double cx, double cy);

// q(X, Y) = p(X + x0, Y + y0).
Cubic shifted(const Cubic& p, double x0, double y0);

// Per-band polynomial model; coefficients above `order` are zero by construction.
struct PolyModel {
    int order = 1;
    std::vector<Cubic> bands;

    int band_count() const { return static_cast<int>(bands.size()); }
    double eval(int band, double x, double y) const { return bands[band](x, y); }
    bool operator==(const PolyModel&) const = default;
};

// Same polynomial in recentred variables X = x - cx, Y = y - cy.
PolyModel recentre_cubic(const PolyModel& model, double cx, double cy);

// Drops coefficients above `order`.
PolyModel truncate(const PolyModel& model, int order);

}  // namespace viseme
