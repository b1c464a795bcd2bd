#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hjb/mesh.hpp"

using namespace hjb;

TEST_CASE("build: 1-D uniform grid") {
    const auto mesh = Mesh::build(BoxDomain::create({0.0}, {1.0}), {2});
    CHECK(mesh.num_vertices() == 3);
    CHECK(mesh.vertex(0)[0] == doctest::Approx(0.0));
    CHECK(mesh.vertex(1)[0] == doctest::Approx(0.5));
    CHECK(mesh.vertex(2)[0] == doctest::Approx(1.0));
    CHECK(mesh.mesh_size() == doctest::Approx(0.5));
}

TEST_CASE("build: unit square Kuhn split") {
    const auto mesh = Mesh::build(BoxDomain::create({0.0, 0.0}, {1.0, 1.0}), {1, 1});
    CHECK(mesh.num_vertices() == 4);
    CHECK(mesh.mesh_size() == doctest::Approx(std::sqrt(2.0)));
    // Two triangles: the point (0.7, 0.2) lands in {(0,0),(1,0),(1,1)}.
    const auto loc = mesh.locate({0.7, 0.2});
    REQUIRE(loc.vertex_indices.size() == 3);
    CHECK(mesh.vertex(loc.vertex_indices[0]) == Point{0.0, 0.0});
    CHECK(mesh.vertex(loc.vertex_indices[1]) == Point{1.0, 0.0});
    CHECK(mesh.vertex(loc.vertex_indices[2]) == Point{1.0, 1.0});
    CHECK(loc.weights[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(loc.weights[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(loc.weights[2] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("build: centered 1-D grid") {
    const auto mesh = Mesh::build(BoxDomain::create({-2.0}, {2.0}), {4});
    CHECK(mesh.num_vertices() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(mesh.vertex(i)[0] == doctest::Approx(-2.0 + i));
    }
    CHECK(mesh.mesh_size() == doctest::Approx(1.0));
}

TEST_CASE("build: degenerate domain rejected") {
    CHECK_THROWS_AS(BoxDomain::create({1.0}, {1.0}), MeshError);
    CHECK_THROWS_AS(BoxDomain::create({0.0, 2.0}, {1.0, 1.0}), MeshError);
    CHECK_THROWS_AS(Mesh::build(BoxDomain::create({0.0}, {1.0}), {0}), MeshError);
}

TEST_CASE("locate: cell midpoint") {
    const auto mesh = Mesh::build(BoxDomain::create({0.0}, {1.0}), {2});
    const auto loc = mesh.locate({0.25});
    CHECK(mesh.vertex(loc.vertex_indices[0])[0] == 0.0);
    CHECK(mesh.vertex(loc.vertex_indices[1])[0] == 0.5);
    CHECK(loc.weights[0] == doctest::Approx(0.5));
    CHECK(loc.weights[1] == doctest::Approx(0.5));
}

TEST_CASE("locate: vertices get weight one") {
    const auto mesh = Mesh::build(BoxDomain::create({-1.0, 0.0}, {1.0, 3.0}), {2, 3});
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        const auto loc = mesh.locate(mesh.vertex(i));
        double weight_on_i = 0.0;
        double total = 0.0;
        for (std::size_t j = 0; j < loc.weights.size(); ++j) {
            total += loc.weights[j];
            if (loc.vertex_indices[j] == i) {
                weight_on_i += loc.weights[j];
            }
        }
        CHECK(weight_on_i == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("locate: outside point names offending coordinate") {
    const auto mesh = Mesh::build(BoxDomain::create({0.0, 0.0}, {1.0, 1.0}), {2, 2});
    CHECK_THROWS_AS(mesh.locate({0.5, 1.5}), LocationError);
    try {
        mesh.locate({0.5, 1.5});
    } catch (const LocationError& e) {
        CHECK(std::string(e.what()).find("coordinate 1") != std::string::npos);
    }
}

TEST_CASE("locate: deterministic on faces") {
    const auto mesh = Mesh::build(BoxDomain::create({0.0, 0.0}, {1.0, 1.0}), {2, 2});
    // Diagonal point shared by both triangles of a cell and a cell face point.
    for (const Point x : {Point{0.25, 0.25}, Point{0.5, 0.25}, Point{0.5, 0.5}}) {
        const auto a = mesh.locate(x);
        const auto b = mesh.locate(x);
        CHECK(a.vertex_indices == b.vertex_indices);
        CHECK(a.weights == b.weights);
    }
}

TEST_CASE("interp_scalar: affine reproduction in 1-D") {
    const auto mesh = Mesh::build(BoxDomain::create({0.0}, {1.0}), {2});
    const std::vector<double> nodal{1.0, 2.0, 3.0};  // g(x) = 2x + 1
    CHECK(mesh.interp_scalar(nodal, {0.3}) == doctest::Approx(1.6).epsilon(1e-14));
}

TEST_CASE("interp_scalar: abs on a kink-aligned mesh") {
    const auto mesh = Mesh::build(BoxDomain::create({-1.0}, {1.0}), {2});
    const std::vector<double> nodal{1.0, 0.0, 1.0};
    CHECK(mesh.interp_scalar(nodal, {0.5}) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("interp_scalar: quadratic nodal data") {
    const auto mesh = Mesh::build(BoxDomain::create({0.0}, {1.0}), {2});
    const std::vector<double> nodal{0.0, 0.25, 1.0};  // x^2 at the nodes
    CHECK(mesh.interp_scalar(nodal, {0.25}) == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("interp with node controls") {
    const auto mesh = Mesh::build(BoxDomain::create({0.0}, {1.0}), {1});
    const auto f = [](double x, double u) { return x + u; };
    const std::vector<double> node_controls{0.0, 1.0};

    const auto loc = mesh.locate({0.5});
    const double mixed = mesh.interp_node_scalar(loc, [&](std::size_t j) {
        return f(mesh.vertex(j)[0], node_controls[j]);
    });
    CHECK(mixed == doctest::Approx(1.0).epsilon(1e-14));

    // At a vertex only that node is evaluated.
    const auto at_node = mesh.locate({1.0});
    int evaluated = 0;
    const double v = mesh.interp_node_scalar(at_node, [&](std::size_t j) {
        ++evaluated;
        return f(mesh.vertex(j)[0], node_controls[j]);
    });
    CHECK(evaluated == 1);
    CHECK(v == doctest::Approx(2.0));
}

TEST_CASE("property: partition of unity and reconstruction") {
    const auto domain = BoxDomain::create({-1.0, 0.0, 2.0}, {2.0, 1.0, 5.0});
    const auto mesh = Mesh::build(domain, {3, 2, 4});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double tol = 1e-12 * domain.diameter();
    for (int s = 0; s < 10000; ++s) {
        Point x(3);
        for (std::size_t a = 0; a < 3; ++a) {
            x[a] = domain.lower[a] + domain.edge(a) * unit(rng);
        }
        const auto loc = mesh.locate(x);
        double total = 0.0;
        Point recon(3, 0.0);
        for (std::size_t j = 0; j < loc.weights.size(); ++j) {
            CHECK(loc.weights[j] >= 0.0);
            total += loc.weights[j];
            const Point vj = mesh.vertex(loc.vertex_indices[j]);
            for (std::size_t a = 0; a < 3; ++a) {
                recon[a] += loc.weights[j] * vj[a];
            }
        }
        REQUIRE(std::abs(total - 1.0) <= 1e-12);
        for (std::size_t a = 0; a < 3; ++a) {
            REQUIRE(std::abs(recon[a] - x[a]) <= tol);
        }
    }
}

TEST_CASE("property: affine exactness in 2-D") {
    const auto domain = BoxDomain::create({-1.0, -1.0}, {1.0, 1.0});
    const auto mesh = Mesh::build(domain, {4, 3});
    const auto affine = [](const Point& x) { return 0.7 - 1.3 * x[0] + 2.1 * x[1]; };
    std::vector<double> nodal(mesh.num_vertices());
    for (std::size_t i = 0; i < nodal.size(); ++i) {
        nodal[i] = affine(mesh.vertex(i));
    }
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < 2000; ++s) {
        Point x{-1.0 + 2.0 * unit(rng), -1.0 + 2.0 * unit(rng)};
        REQUIRE(std::abs(mesh.interp_scalar(nodal, x) - affine(x)) <= 1e-12);
    }
}

TEST_CASE("property: Lipschitz interpolation error bound") {
    const auto domain = BoxDomain::create({-1.0}, {1.0});
    const auto mesh = Mesh::build(domain, {5});  // kink of |x| off the grid
    const auto g = [](const Point& x) { return std::abs(x[0]); };
    std::vector<double> nodal(mesh.num_vertices());
    for (std::size_t i = 0; i < nodal.size(); ++i) {
        nodal[i] = g(mesh.vertex(i));
    }
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < 10000; ++s) {
        Point x{-1.0 + 2.0 * unit(rng)};
        REQUIRE(std::abs(mesh.interp_scalar(nodal, x) - g(x)) <= mesh.mesh_size());
    }
}

TEST_CASE("describe serializes shape only") {
    const auto mesh = Mesh::build(BoxDomain::create({0.0}, {1.0}), {8});
    const auto text = mesh.describe();
    CHECK(text.find("subdivisions") != std::string::npos);
    CHECK(text.find("mesh_size") != std::string::npos);
}
