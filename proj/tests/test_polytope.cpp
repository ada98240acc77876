#include "qopt/ehrhart.hpp"
#include "qopt/polytope.hpp"
#include "qopt/presets.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace qopt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

BigInt binom(int n, int k) {
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

TEST_CASE("analytic simplex volumes", "[polytope]") {
    CHECK_THAT(volume(preset_model("P2"), VolumeMethod::analytic_simplex).volume, WithinRel(1.0 / 192, 1e-15));
    CHECK_THAT(volume(BoundModel::legendre_sqrt({1.0}), VolumeMethod::analytic_simplex).volume, WithinRel(0.5, 1e-15));
    CHECK_THAT(volume(BoundModel::legendre_sqrt({1.0, 0.5}), VolumeMethod::analytic_simplex).volume, WithinRel(0.25, 1e-15));
    CHECK_THROWS_AS(volume(preset_model("P5"), VolumeMethod::analytic_simplex), DomainError);
    CHECK(volume_method_from_string("lattice_scaling") == VolumeMethod::lattice_scaling);
    CHECK_THROWS_AS(volume_method_from_string("monte_carlo"), ArgumentError);
}

TEST_CASE("vertices of the anisotropic simplex", "[polytope]") {
    const auto v = polytope_vertices(preset_model("P2"));
    CHECK(v.size() == 5);
    CHECK(vertex_denominator_lcm(v) == 4);
}

TEST_CASE("sup affine preset polytopes have 65 vertices", "[polytope]") {
    CHECK(polytope_vertices(preset_model("P5")).size() == 65);
    CHECK(polytope_vertices(preset_model("P6")).size() == 65);
}

TEST_CASE("Ehrhart fit of the unit simplex in eight dimensions", "[polytope][ehrhart]") {
    const auto qp = ehrhart_fit(preset_model("P3"));
    CHECK(qp.q() == 1);
    for (int j = 0; j <= 25; ++j) CHECK(qp.evaluate(j) == binom(j + 8, 8));
    CHECK(qp.leading_exact() == BigRational(1, 40320));
}

TEST_CASE("Ehrhart fit of the anisotropic example", "[polytope][ehrhart]") {
    const auto m = preset_model("P2");
    const auto qp = ehrhart_fit(m);
    CHECK(4 % qp.q() == 0);
    CHECK(qp.leading_exact() == BigRational(1, 192));
    const std::vector<std::pair<int, int>> counts{{0, 1}, {1, 3}, {2, 7}, {3, 13}, {4, 23}, {8, 118}, {16, 895}, {40, 20306}};
    for (auto [j, c] : counts) CHECK(qp.evaluate(j) == c);
    // residue 1 row, frozen from the exact fit
    CHECK(qp.rows()[1][0] == BigRational(63, 64));
    CHECK(qp.rows()[1][1] == BigRational(43, 32));
}

TEST_CASE("Ehrhart fits reproduce lattice counts for every preset", "[polytope][ehrhart]") {
    for (const auto& p : presets) {
        const auto m = preset_model(p.name);
        const auto qp = ehrhart_fit(m);
        const auto poly = m.scaled_polytope();
        LatticeCounter counter(poly.rows);
        for (std::int64_t j = 0; j < static_cast<std::int64_t>(m.dimension() + 3) * qp.q(); ++j)
            CHECK(qp.evaluate(j) == detail::to_big(counter.count(j * poly.denom)));
        for (const auto& row : qp.rows()) CHECK(row.back() == qp.leading_exact());
    }
}

TEST_CASE("lattice counter agrees with enumeration", "[polytope]") {
    const auto m = preset_model("P5");
    const auto poly = m.scaled_polytope();
    LatticeCounter counter(poly.rows);
    for (double tau : {0.0, 1.0, 2.0, 3.2, 4.0}) {
        CHECK(count_to_u64(counter.count(poly.capacity(tau))) == enumerate_superlevel(m, tau).size());
    }
}

TEST_CASE("injected wrong period is a consistency failure", "[polytope][ehrhart]") {
    EhrhartOptions opts;
    opts.inject_period = 1;
    CHECK_THROWS_AS(ehrhart_fit(preset_model("P2"), opts), ConsistencyError);
    opts.inject_period = 4;
    CHECK(ehrhart_fit(preset_model("P2"), opts).q() == 4);
    CHECK_THROWS_AS(ehrhart_fit(BoundModel::weighted_linear(std::vector<double>{1.0, 2.0})), DomainError);
}

TEST_CASE("Ehrhart json export", "[polytope][ehrhart]") {
    const auto doc = ehrhart_fit(preset_model("P2")).to_json();
    CHECK(doc["N"] == 4);
    CHECK(doc["volume_exact"] == "1/192");
    CHECK(doc["rows_exact"].size() == static_cast<std::size_t>(doc["q"].get<int>()));
}

TEST_CASE("lattice scaling volumes of rational presets", "[polytope][scaling]") {
    for (const char* name : {"P1", "P2", "P3", "P4"}) {
        const auto m = preset_model(name);
        VolumeOptions opts;
        opts.tol = 1e-4;
        const auto ls = volume(m, VolumeMethod::lattice_scaling, opts);
        CHECK_THAT(ls.volume, WithinRel(volume(m, VolumeMethod::analytic_simplex).volume, 1e-3));
        CHECK(ls.method == VolumeMethod::lattice_scaling);
    }
}

TEST_CASE("lattice scaling for non-rational families", "[polytope][scaling]") {
    VolumeOptions opts;
    opts.tol = 1e-4;
    const auto leg = BoundModel::legendre_sqrt({0.7, 1.3});
    CHECK_THAT(volume(leg, VolumeMethod::lattice_scaling, opts).volume, WithinRel(1.0 / (8 * 0.7 * 1.3), 1e-3));
    const auto sup = BoundModel::sup_affine({{0.3, {1.0, 0.5}, std::nullopt}, {0.6, {0.5, 1.0}, std::nullopt}});
    // quadrilateral with corners (0,0), (1,0), (2/3,2/3), (0,1)
    CHECK_THAT(volume(sup, VolumeMethod::lattice_scaling, opts).volume, WithinRel(2.0 / 3.0, 1e-3));
    opts.tol = 1e-3;
    // integral of 1/(8(1-H(t))^2), H the binary entropy in nats, by quadrature
    const auto fa = BoundModel::factorial_alpha({std::exp(-1.0), std::exp(-1.0)});
    CHECK_THAT(volume(fa, VolumeMethod::lattice_scaling, opts).volume, WithinRel(0.70157030675, 1e-2));
}

TEST_CASE("volume point ceiling", "[polytope][scaling]") {
    VolumeOptions opts;
    opts.tol = 1e-14;
    opts.max_points = 2000;
    try {
        volume(BoundModel::legendre_sqrt({0.7, 1.3}), VolumeMethod::lattice_scaling, opts);
        FAIL("expected a resource error");
    } catch (const ResourceError& e) {
        REQUIRE(e.best_estimate().has_value());
        CHECK(*e.best_estimate() > 0.0);
    }
}
