#include "doctest.h"
#include "meso/core/error.hpp"
#include "meso/core/kernels.hpp"
#include "oracles.hpp"

using namespace meso;

namespace {

const double R = 7.0;
const double mu = oracle::kSteel;

DomainSpec ball() { return DomainSpec::ball(R, Material::from_shear("m", mu)); }
DomainSpec space() { return DomainSpec::full_space(Material::from_shear("m", mu)); }

Inclusion sphere(const Vec3& c, double a, double mu_I) {
  return {c, a, Material::from_shear("i", mu_I)};
}

/// Random pair of interior points at least `gap` apart.
std::pair<Vec3, Vec3> interior_pair(std::mt19937_64& g, double radius, double gap) {
  for (;;) {
    Vec3 x = oracle::in_ball(g, radius), y = oracle::in_ball(g, radius);
    if ((x - y).norm() > gap) return {x, y};
  }
}

}  // namespace

TEST_CASE("w_f closed form against the radial quadrature") {
  const RadialSource src{1.5};
  const auto dom = ball();
  CHECK(w_f_eval(Vec3::Zero(), src, dom).value ==
        doctest::Approx(-1.5 * 1.5 * 1.5 * (14 - 1.5) / (12 * 7 * mu)).epsilon(1e-14));
  CHECK(w_f_eval(Vec3::Zero(), src, dom).value * mu == doctest::Approx(-0.502232).epsilon(1e-6));
  for (double r : {0.0, 0.3, 0.9, 1.49, 1.5, 1.51, 2.0, 4.33, 6.5, 7.0}) {
    const Vec3 x = r * Vec3(2, -1, 2).normalized();
    CHECK(oracle::rel(w_f_eval(x, src, dom).value, oracle::radial_w(r, R, 1.5, mu)) < 1e-9);
  }
  CHECK(w_f_eval(Vec3(0, 7, 0), src, dom).value == doctest::Approx(0.0).epsilon(1e-16));

  const Vec3 x(2.5, 2.5, 2.5);
  const Vec3 g = w_f_eval(x, src, dom).grad;
  CHECK(x.norm() == doctest::Approx(4.33013).epsilon(1e-6));
  CHECK(oracle::rel_norm(g, Vec3(0.0225 / mu * x.normalized())) < 1e-12);
}

TEST_CASE("w_f branches match to first order at r_f") {
  const RadialSource src{1.5};
  const auto dom = ball();
  const Vec3 n = Vec3(1, 2, 3).normalized();
  const double below = std::nextafter(1.5, 0.0), above = std::nextafter(1.5, 2.0);
  const auto in = w_f_eval(below * n, src, dom), out = w_f_eval(above * n, src, dom);
  CHECK(oracle::rel(in.value, out.value) < 1e-13);
  CHECK(oracle::rel(in.grad.dot(n), out.grad.dot(n)) < 1e-13);
}

TEST_CASE("w_f gradients against finite differences") {
  auto g = oracle::rng(11);
  const RadialSource src{1.5};
  const auto dom = ball();
  int tested = 0;
  while (tested < 200) {
    const Vec3 x = oracle::in_ball(g, 6.5);
    if (std::abs(x.norm() - 1.5) < 1e-3 || x.norm() < 1e-2) continue;
    const auto f = [&](const Vec3& p) { return w_f_eval(p, src, dom).value; };
    REQUIRE(oracle::rel_norm(w_f_eval(x, src, dom).grad, oracle::fd_grad(f, x, 1e-5 * R)) < 1e-6);
    ++tested;
  }
  const auto lin = w_f_eval(Vec3(0.3, 1, 2), LinearX{}, space());
  CHECK(lin.value == 0.3 / mu);
  CHECK(lin.grad == Vec3(1 / mu, 0, 0));
}

TEST_CASE("background and domain compatibility") {
  CHECK_THROWS_AS(w_f_eval(Vec3::Zero(), LinearX{}, ball()), Error);
  CHECK_THROWS_AS(w_f_eval(Vec3::Zero(), RadialSource{1.5}, space()), Error);
  CHECK_THROWS_AS(check_compatible(RadialSource{7.5}, ball()), Error);
  CHECK_THROWS_AS(check_compatible(RadialSource{0.0}, ball()), Error);
  CHECK_NOTHROW(check_compatible(RadialSource{1.5}, ball()));
}

TEST_CASE("Green's function against the image-charge formula") {
  auto g = oracle::rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto [x, y] = interior_pair(g, 6.9, 1e-2);
    const auto e = greens_ball(x, y, R, mu);
    REQUIRE(oracle::rel(e.H, oracle::image_H(x, y, R, mu)) < 1e-12);
    REQUIRE(std::abs(e.G - oracle::image_G(x, y, R, mu)) < 1e-12 * oracle::gamma(x, y, mu));
    REQUIRE(std::abs(e.G - greens_ball(y, x, R, mu).G) <= 1e-13 * std::abs(e.G));
  }
}

TEST_CASE("Green's function special points") {
  auto g = oracle::rng(5);
  for (int i = 0; i < 50; ++i) {
    const Vec3 y = oracle::in_ball(g, 6.9);
    CHECK(oracle::rel(greens_ball(Vec3::Zero(), y, R, mu).H, 1 / (4 * oracle::pi * mu * R)) <
          1e-14);
    // On the boundary the regular part equals the free-space kernel.
    const Vec3 x = R * oracle::unit_vector(g);
    const auto e = greens_ball(x, y, R, mu);
    CHECK(oracle::rel(e.H, oracle::gamma(x, y, mu)) < 1e-12);
    CHECK(std::abs(e.G) <= 1e-12 * oracle::gamma(x, y, mu));
    // Just inside, G/Gamma decays linearly in the distance to the boundary.
    const double delta = 1e-10 * R;
    const Vec3 xin = (R - delta) * x.normalized();
    const double ratio = greens_ball(xin, y, R, mu).G / oracle::gamma(xin, y, mu);
    CHECK(ratio >= -1e-12);
    CHECK(ratio <= 10 * 2 * R * delta / ((R - y.norm()) * (R - y.norm())));
  }
  // Regular part is smooth through y = 0.
  const Vec3 x(1, 2, -0.5);
  CHECK(oracle::rel(regular_part_H(x, Vec3(1e-13, 0, 0), R, mu), regular_part_H(x, Vec3::Zero(), R, mu)) <
        1e-12);
  CHECK_THROWS_AS(greens_ball(x, x, R, mu), Error);
  CHECK_THROWS_AS(greens_ball(Vec3(8, 0, 0), x, R, mu), Error);
}

TEST_CASE("grad_y H against finite differences") {
  auto g = oracle::rng(17);
  const auto dom = ball();
  for (int i = 0; i < 200; ++i) {
    const auto [x, y] = interior_pair(g, 6.5, 0.1);
    const auto f = [&](const Vec3& p) { return oracle::image_H(x, p, R, mu); };
    REQUIRE(oracle::rel_norm(grad_y_H(x, y, dom), oracle::fd_grad(f, y, 1e-5 * R)) < 1e-6);
  }
  // Axial symmetry at x = 0: the gradient is parallel to y.
  const Vec3 y(1, 2, 2);
  const Vec3 gy = grad_y_H(Vec3::Zero(), y, dom);
  CHECK(gy.cross(y).norm() <= 1e-14 * gy.norm() * y.norm());
  CHECK(grad_y_H(Vec3(1, 0, 0), y, space()) == Vec3::Zero());
}

TEST_CASE("free-space mixed Hessian") {
  const Mat3 m = free_space_mixed_hessian(Vec3(1, 0, 0), Vec3::Zero(), 1.0);
  CHECK(m(0, 0) == doctest::Approx(-0.159155).epsilon(1e-6));
  CHECK(m(1, 1) == doctest::Approx(0.079577).epsilon(1e-5));
  CHECK(m(2, 2) == doctest::Approx(0.079577).epsilon(1e-5));
  CHECK(std::abs(m(0, 1)) + std::abs(m(0, 2)) + std::abs(m(1, 2)) == 0.0);

  auto g = oracle::rng(23);
  for (int i = 0; i < 200; ++i) {
    const Vec3 z = oracle::in_ball(g, 5), w = oracle::in_ball(g, 5);
    if ((z - w).norm() < 1e-2) continue;
    const Mat3 h = free_space_mixed_hessian(z, w, mu);
    REQUIRE(std::abs(h.trace()) <= 1e-12 * h.norm());
    REQUIRE(oracle::rel_norm(h, oracle::free_mixed_hessian(z, w, mu)) < 1e-13);
    REQUIRE(oracle::rel_norm(hessian_G(z, w, space()), h) == 0.0);
  }
}

TEST_CASE("ball mixed Hessian against finite differences") {
  auto g = oracle::rng(29);
  const auto dom = ball();
  const double h = 1e-4 * R;
  for (int i = 0; i < 200; ++i) {
    const auto [z, w] = interior_pair(g, 6.0, 0.5);
    const auto G = [&](const Vec3& a, const Vec3& b) { return oracle::image_G(a, b, R, mu); };
    const auto H = [&](const Vec3& a, const Vec3& b) { return oracle::image_H(a, b, R, mu); };
    REQUIRE(oracle::rel_norm(hessian_G(z, w, dom), oracle::fd_mixed(G, z, w, h)) < 1e-5);
    REQUIRE(oracle::rel_norm(regular_part_mixed_hessian(z, w, R, mu), oracle::fd_mixed(H, z, w, h)) <
            1e-5);
    // Swapping the points transposes the matrix.
    REQUIRE(oracle::rel_norm(hessian_G(w, z, dom), Mat3(hessian_G(z, w, dom).transpose())) < 1e-12);
  }
  CHECK_THROWS_AS(hessian_G(Vec3(1, 1, 1), Vec3(1, 1, 1), dom), Error);
}

TEST_CASE("dipole field branches") {
  const double mu_I = oracle::kAluminum;
  const Inclusion inc = sphere(Vec3(0.5, -0.2, 1.0), 0.24, mu_I);
  CHECK(dipole_field_sphere(inc.center, inc, mu).value.norm() == 0.0);

  auto g = oracle::rng(31);
  for (int i = 0; i < 200; ++i) {
    const Vec3 n = oracle::unit_vector(g);
    const Vec3 x = inc.center + inc.radius * n;
    const auto out = dipole_field_sphere(x, inc, mu, Branch::exterior);
    const auto in = dipole_field_sphere(x, inc, mu, Branch::interior);
    REQUIRE(oracle::rel_norm(out.value, in.value) < 1e-14);
    // mu_O dD/dn (outside) - mu_I dD/dn (inside) = (mu_O - mu_I) n.
    const Vec3 jump = mu * out.jacobian * n - mu_I * in.jacobian * n;
    REQUIRE(oracle::rel_norm(jump, Vec3((mu - mu_I) * n)) < 1e-12);
  }
}

TEST_CASE("dipole values and Jacobians against the oracle") {
  auto g = oracle::rng(37);
  const Inclusion inc = sphere(Vec3(0.1, 0.2, 0.3), 0.3, oracle::kCopper);
  for (int i = 0; i < 200; ++i) {
    const Vec3 x = oracle::in_ball(g, 1.5, inc.center);
    if (std::abs((x - inc.center).norm() - inc.radius) < 1e-3) continue;
    const auto e = dipole_field_sphere(x, inc, mu);
    const auto f = [&](const Vec3& p) {
      return oracle::dipole(p, inc.center, inc.radius, mu, inc.material.shear());
    };
    REQUIRE(oracle::rel_norm(e.value, f(x)) < 1e-14);
    REQUIRE(oracle::rel_norm(e.jacobian, oracle::fd_jacobian(f, x, 1e-5 * inc.radius)) < 1e-6);
  }
}

TEST_CASE("dipole far field equals the polarization potential") {
  auto g = oracle::rng(41);
  const Inclusion inc = sphere(Vec3(0, 0, 0), 0.24, oracle::kAluminum);
  const auto P = polarization_sphere(inc.radius, mu, inc.material.shear()).matrix;
  for (int i = 0; i < 50; ++i) {
    const Vec3 xi = (2.0 + 5.0 * i / 50.0) * inc.radius * oracle::unit_vector(g);
    const auto gamma = [&](const Vec3& p) { return oracle::gamma(p, Vec3::Zero(), mu); };
    const Vec3 grad_gamma = -xi / (4 * oracle::pi * mu * std::pow(xi.norm(), 3));
    REQUIRE(oracle::rel_norm(dipole_field_sphere(xi, inc, mu).value, Vec3(-P * grad_gamma)) < 1e-13);
    REQUIRE(oracle::rel_norm(grad_gamma, oracle::fd_grad(gamma, xi, 1e-5)) < 1e-6);
  }
}

TEST_CASE("polarization tensors") {
  const auto p = polarization_sphere(0.24, oracle::kSteel, oracle::kAluminum);
  CHECK(p.matrix(0, 0) == doctest::Approx(-3.6126).epsilon(1e-4));
  CHECK(p.matrix(0, 0) ==
        doctest::Approx(oracle::polarization_scalar(0.24, oracle::kSteel, oracle::kAluminum))
            .epsilon(1e-14));
  CHECK(p.matrix.isDiagonal());
  CHECK(p.definiteness == Definiteness::negative);

  const auto v = polarization_sphere(0.3, 2.0, 0.0);
  CHECK(v.matrix(1, 1) == doctest::Approx(-2 * oracle::pi * 0.027 * 2.0).epsilon(1e-14));
  CHECK(v.definiteness == Definiteness::negative);

  const auto z = polarization_sphere(0.3, 2.0, 2.0);
  CHECK(z.matrix.isZero(0.0));
  CHECK(z.definiteness == Definiteness::zero);

  // Sign law and cubic scaling over a grid of pairs.
  for (double mo : {0.5, 26.3, 75.2, 300.0}) {
    for (double mi : {0.0, 0.1, 26.3, 75.2, 500.0}) {
      const auto t = polarization_sphere(0.1, mo, mi);
      const auto want = mi > mo ? Definiteness::positive
                                : (mi < mo ? Definiteness::negative : Definiteness::zero);
      REQUIRE(t.definiteness == want);
      if (mi != mo) {
        REQUIRE(oracle::rel(polarization_sphere(0.2, mo, mi).matrix(2, 2), 8 * t.matrix(2, 2)) <
                1e-14);
      }
    }
  }
}

TEST_CASE("contrast ratio") {
  CHECK(contrast_ratio(1.0, 0.0) == -0.5);
  CHECK(contrast_ratio(1.0, 1.0) == 0.0);
  CHECK(contrast_ratio(2.0, 3.0) == doctest::Approx(1.0 / 7.0));
}
