#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "curvint/bivarpoly.hpp"
#include "curvint/discriminant.hpp"
#include "curvint/roots.hpp"

using namespace curvint;

namespace {

GaussRational Q(long long n, long long d = 1) { return GaussRational{Rational(n, d)}; }

// y^2 - (1 - x^2)(1 - k^2 x^2)
BivarPolyQ legendre(const Rational& k) {
    Rational k2 = k * k;
    BivarPolyQ p;
    p.add_term(0, 2, Q(1));
    p.add_term(0, 0, Q(-1));
    p.add_term(2, 0, GaussRational{Rational(1) + k2});
    p.add_term(4, 0, GaussRational{-k2});
    return p;
}

// y^2 - x^3 + a x + b
BivarPolyQ weierstrass(const Rational& a, const Rational& b) {
    BivarPolyQ p;
    p.add_term(0, 2, Q(1));
    p.add_term(3, 0, Q(-1));
    p.add_term(1, 0, GaussRational{a});
    p.add_term(0, 0, GaussRational{b});
    return p;
}

// 1 + x^3 + y^3 + t x y
BivarPolyQ cubic(const Rational& t) {
    BivarPolyQ p;
    p.add_term(0, 0, Q(1));
    p.add_term(3, 0, Q(1));
    p.add_term(0, 3, Q(1));
    p.add_term(1, 1, GaussRational{t});
    return p;
}

}  // namespace

TEST_CASE("eval") {
    BivarPolyQ p;  // y^2 - x^3
    p.add_term(0, 2, Q(1));
    p.add_term(3, 0, Q(-1));
    CHECK(p.eval(Q(1), Q(1)).is_zero());
    BivarPolyQ zero;
    CHECK(zero.eval(Q(7), Q(-3)).is_zero());
    auto leg = legendre(Rational(1, 2));
    CHECK(leg.eval(Q(0), Q(1)).is_zero());
    // float mode hits the compiled path
    CompiledBivar f(to_complex(leg));
    CHECK(std::abs(f(cplx(0), cplx(1))) < 1e-15);
}

TEST_CASE("partial derivatives") {
    auto w = weierstrass(Rational(2), Rational(3));  // g2=2, g3=3
    auto wy = w.partial('y');
    CHECK(wy.coeff(0, 1) == Q(2));
    CHECK(wy.terms().size() == 1);
    auto wx = w.partial('x');
    CHECK(wx.coeff(2, 0) == Q(-3));
    CHECK(wx.coeff(0, 0) == Q(2));
    auto c = cubic(Rational(5));
    auto cy = c.partial('y');
    CHECK(cy.coeff(0, 2) == Q(3));
    CHECK(cy.coeff(1, 0) == Q(5));
    // mixed partials commute exactly
    auto l = legendre(Rational(3, 7));
    CHECK(l.partial('x').partial('y') == l.partial('y').partial('x'));
}

TEST_CASE("shift") {
    // degenerate Weierstrass with g2=3u^2, g3=-2u^3 shifted by (u,0):
    // direct expansion gives y^2 - x^3 - 3u x^2 (support {(0,2),(3,0),(2,0)})
    Rational u(3);
    auto p = weierstrass(Rational(3) * u * u, Rational(-2) * u * u * u);
    auto s = p.shift(GaussRational{u}, Q(0));
    BivarPolyQ expect;
    expect.add_term(0, 2, Q(1));
    expect.add_term(3, 0, Q(-1));
    expect.add_term(2, 0, GaussRational{Rational(-3) * u});
    CHECK(s == expect);

    auto l = legendre(Rational(2, 5));
    CHECK(l.shift(Q(0), Q(0)) == l);
    CHECK(l.shift(Q(4), Q(-2)).shift(Q(-4), Q(2)) == l);

    BivarPolyQ q;  // y^2 - x shifted by (1,0) -> y^2 - x - 1
    q.add_term(0, 2, Q(1));
    q.add_term(1, 0, Q(-1));
    auto qs = q.shift(Q(1), Q(0));
    CHECK(qs.coeff(0, 0) == Q(-1));
    CHECK(qs.coeff(1, 0) == Q(-1));
    CHECK(qs.coeff(0, 2) == Q(1));
}

TEST_CASE("discriminant in y") {
    // Weierstrass: Delta(x) = -4(x^3 - a x - b), several exact (a, b)
    for (auto [a, b] : {std::pair<Rational, Rational>{Rational(2), Rational(3)},
                        {Rational(-1), Rational(5)},
                        {Rational(7, 2), Rational(-4, 3)}}) {
        auto dx = discriminant_y(weierstrass(a, b));
        UniPolyQ expect({GaussRational{Rational(4) * b}, GaussRational{Rational(4) * a}, Q(0), Q(-4)});
        CHECK(dx.coeffs().size() == expect.coeffs().size());
        for (int i = 0; i <= 3; ++i) CHECK(dx.coeff(i) == expect.coeff(i));
    }
    // a y^2 + b y + c -> -a (b^2 - 4 a c)
    BivarPolyQ g;
    g.add_term(0, 2, Q(3));
    g.add_term(0, 1, Q(5));
    g.add_term(0, 0, Q(7));
    auto d = discriminant_y(g);
    CHECK(d.degree() == 0);
    CHECK(d.coeff(0) == GaussRational{Rational(-3) * (Rational(25) - Rational(4 * 3 * 7))});
    // y^2 - x -> -4x
    BivarPolyQ s;
    s.add_term(0, 2, Q(1));
    s.add_term(1, 0, Q(-1));
    auto ds = discriminant_y(s);
    CHECK(ds.coeff(1) == Q(-4));
    CHECK(ds.coeff(0) == Q(0));
    // Delta(x) is always divisible by P_d(x): exercise a non-constant leading row
    BivarPolyQ h;  // x y^2 + y + 1
    h.add_term(1, 2, Q(1));
    h.add_term(0, 1, Q(1));
    h.add_term(0, 0, Q(1));
    UniPolyQ quotient;
    CHECK(h.coeff_of_y(2).divides_exactly(discriminant_y(h), &quotient));
}

TEST_CASE("scalar discriminant") {
    for (auto [a, b] : {std::pair<Rational, Rational>{Rational(2), Rational(3)},
                        {Rational(-1), Rational(5)},
                        {Rational(7, 2), Rational(-4, 3)}}) {
        auto sd = discriminant_scalar(weierstrass(a, b));
        Rational expect = Rational(256) * (Rational(27) * b * b - Rational(4) * a * a * a);
        CHECK(sd.value == GaussRational{expect});
    }
    for (Rational k : {Rational(1, 2), Rational(3, 4), Rational(2, 5)}) {
        auto sd = discriminant_scalar(legendre(k));
        Rational k2 = k * k;
        Rational om = Rational(1) - k2;
        Rational expect = Rational(65536) * k2 * om * om * om * om;
        CHECK(sd.value == GaussRational{expect});
    }
    // cubic: eliminating y from P = P_y = 0 by hand gives
    // Delta(x) = 4 t^3 x^3 + 27 (x^3+1)^2, so degeneracy happens at t = 0 and
    // t^3 = -27 (t = -3 factors as (x+y+1)(x^2+y^2+1-xy-x-y)).
    for (Rational t : {Rational(1), Rational(2), Rational(5)}) {
        auto dx = discriminant_y(cubic(t));
        UniPolyQ target;  // 4t^3 x^3 + 27(x^6 + 2x^3 + 1)
        {
            std::vector<GaussRational> c(7, Q(0));
            c[0] = Q(27);
            c[3] = GaussRational{Rational(4) * t * t * t + Rational(54)};
            c[6] = Q(27);
            target = UniPolyQ(std::move(c));
        }
        // proportionality: dx = lambda * target
        REQUIRE(dx.degree() == target.degree());
        GaussRational lambda = dx.leading() / target.leading();
        for (int i = 0; i <= dx.degree(); ++i) CHECK(dx.coeff(i) == lambda * target.coeff(i));
        CHECK(discriminant_scalar(cubic(t)).generic);
    }
    CHECK_FALSE(discriminant_scalar(cubic(Rational(0))).generic);
    CHECK_FALSE(discriminant_scalar(cubic(Rational(-3))).generic);
    // genericity iff Delta(x) has simple roots: cross-check via exact gcd
    auto dx = discriminant_y(legendre(Rational(1, 2)));
    auto g = UniPolyQ::gcd(dx, dx.derivative());
    CHECK(g.degree() == 0);
    auto dxdeg = discriminant_y(weierstrass(Rational(3), Rational(-2)));  // 4a^3 = 27 b^2: u=1
    auto gdeg = UniPolyQ::gcd(dxdeg, dxdeg.derivative());
    CHECK(gdeg.degree() > 0);
    CHECK_FALSE(discriminant_scalar(weierstrass(Rational(3), Rational(-2))).generic);
}

TEST_CASE("degenerate points") {
    // Legendre: x in {1,-1,2,-2} for k=1/2, all with y=0
    auto pts = degenerate_points(legendre(Rational(1, 2)));
    REQUIRE(pts.size() == 4);
    std::vector<double> xs;
    for (auto& p : pts) {
        CHECK(std::abs(p.y) < 1e-9);
        xs.push_back(p.x.real());
    }
    std::sort(xs.begin(), xs.end());
    CHECK(xs[0] == doctest::Approx(-2).epsilon(1e-10));
    CHECK(xs[1] == doctest::Approx(-1).epsilon(1e-10));
    CHECK(xs[2] == doctest::Approx(1).epsilon(1e-10));
    CHECK(xs[3] == doctest::Approx(2).epsilon(1e-10));

    // generic Weierstrass: roots of x^3 - a x - b with y = 0
    auto wp = degenerate_points(weierstrass(Rational(2), Rational(1)));
    REQUIRE(wp.size() == 3);
    for (auto& p : wp) {
        CHECK(std::abs(p.y) < 1e-9);
        cplx v = p.x * p.x * p.x - 2.0 * p.x - 1.0;
        CHECK(std::abs(v) < 1e-9);
    }

    // degenerate Weierstrass (u=1): includes the nodal point (1, 0)
    auto dp = degenerate_points(weierstrass(Rational(3), Rational(-2)));
    bool found = false;
    for (auto& p : dp)
        if (std::abs(p.x - cplx(1)) < 1e-7 && std::abs(p.y) < 1e-7 && p.x_multiplicity > 1) found = true;
    CHECK(found);
}

TEST_CASE("root finder basics") {
    // (x-1)(x-2)(x-3i)
    UniPolyC p({cplx(0, -6), cplx(2, 9), cplx(-3, -3), cplx(1, 0)});
    // build instead from factors to avoid hand errors
    UniPolyC f1({cplx(-1), cplx(1)}), f2({cplx(-2), cplx(1)}), f3({cplx(0, -3), cplx(1)});
    auto roots = poly_roots(f1 * f2 * f3);
    REQUIRE(roots.size() == 3);
    CHECK(std::abs(roots[0] - cplx(0, 3)) < 1e-10);
    CHECK(std::abs(roots[1] - cplx(1)) < 1e-10);
    CHECK(std::abs(roots[2] - cplx(2)) < 1e-10);
    // double root clustering
    UniPolyC g = f1 * f1 * f2;
    auto cl = cluster_roots(poly_roots(g));
    REQUIRE(cl.size() == 2);
    int mult2 = cl[0].multiplicity == 2 ? 0 : 1;
    CHECK(cl[mult2].multiplicity == 2);
    CHECK(std::abs(cl[mult2].value - cplx(1)) < 1e-6);
}
