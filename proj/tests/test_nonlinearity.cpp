#include "nldecay/nonlinearity.hpp"

#include "doctest.h"

#include <cmath>

using namespace nldecay;

TEST_CASE("eval: radial maps vanish at the origin") {
    const Eigen::Vector2d out = eval(Nonlinearity::tanh_profile(), Eigen::Vector2d::Zero());
    CHECK(out.norm() == 0.0);
}

TEST_CASE("eval: radial tanh on an axis direction") {
    for (double r : {0.1, 1.0, 3.7}) {
        const Eigen::Vector2d out =
            eval(Nonlinearity::tanh_profile(), Eigen::Vector2d(r, 0.0));
        CHECK(std::abs(out(0) - std::tanh(r)) <= 1e-14);
        CHECK(std::abs(out(1)) <= 1e-14);
    }
}

TEST_CASE("eval: linear gain scales componentwise") {
    const Eigen::Vector2d out =
        eval(Nonlinearity::linear_gain(2.0), Eigen::Vector2d(1.0, -1.0));
    CHECK(out(0) == 2.0);
    CHECK(out(1) == -2.0);
}

TEST_CASE("eval: radial maps are rotation-equivariant") {
    const Nonlinearity phi = Nonlinearity::tanh_profile();
    const Eigen::Vector2d u(0.6, -1.3);
    const double r = u.norm();
    const Eigen::Vector2d direct = eval(phi, u);
    const Eigen::Vector2d axis = eval(phi, Eigen::Vector2d(r, 0.0));
    // rotate (|phi|, 0) back into the direction of u
    const Eigen::Vector2d rotated = axis(0) / r * u;
    CHECK((direct - rotated).norm() <= 1e-14);
}

TEST_CASE("eval: negative radial profile is rejected") {
    const Nonlinearity bad =
        Nonlinearity::radial([](double) { return -1.0; }, "bad");
    CHECK_THROWS(eval(bad, Eigen::Vector2d(1.0, 0.0)));
}

TEST_CASE("from_name parses the builtin family") {
    CHECK(Nonlinearity::from_name("identity").kind == PhiKind::Identity);
    CHECK(Nonlinearity::from_name("gain:2").gain == 2.0);
    CHECK(Nonlinearity::from_name("tanh").kind == PhiKind::Radial);
    CHECK(Nonlinearity::from_name("saturation").kind == PhiKind::Radial);
    CHECK(Nonlinearity::from_name("power:3").kind == PhiKind::Radial);
    CHECK(Nonlinearity::from_name("deadzone:0.1").kind == PhiKind::Radial);
    CHECK_THROWS(Nonlinearity::from_name("frobnicate"));
}

TEST_CASE("verify_sector: identity attains the exact constants") {
    const SectorReport rep = verify_sector(Nonlinearity::identity(), 2, 1.0, 10.0, 2000);
    CHECK(std::abs(rep.c_small - 1.0) <= 1e-14);
    CHECK(std::abs(rep.c_large - 1.0) <= 1e-14);
    CHECK(rep.pass);
}

TEST_CASE("verify_sector: tanh small-signal constant is tanh(1)") {
    const SectorReport rep =
        verify_sector(Nonlinearity::tanh_profile(), 2, 1.0, 10.0, 5000);
    // tanh(r)/r decreases, so the infimum over (0, 1] sits at r = 1
    CHECK(std::abs(rep.c_small - std::tanh(1.0)) <= 1e-3);
    CHECK(rep.pass);
}

TEST_CASE("verify_sector: deadzone switches off near the origin and fails") {
    const SectorReport rep =
        verify_sector(Nonlinearity::deadzone(0.1), 2, 1.0, 10.0, 5000);
    CHECK(rep.c_small <= 1e-12);
    CHECK(!rep.pass);
}

TEST_CASE("verify_monotone: builtin monotone family never witnesses a violation") {
    for (const Nonlinearity& phi :
         {Nonlinearity::identity(), Nonlinearity::tanh_profile(),
          Nonlinearity::saturation(), Nonlinearity::power(1.0),
          Nonlinearity::power(2.0), Nonlinearity::power(3.0)}) {
        const MonotoneReport rep = verify_monotone(phi, 2, 20000);
        CHECK(rep.min_pairing >= 0.0);
    }
}

TEST_CASE("verify_monotone: decreasing radial profile is caught") {
    const Nonlinearity hump =
        Nonlinearity::radial([](double r) { return std::max(r * (2.0 - r), 0.0); },
                             "hump");
    const MonotoneReport rep = verify_monotone(hump, 1, 20000);
    // (psi(1.8) - psi(1.2)) * 0.6 = (0.36 - 0.96) * 0.6 < 0
    CHECK(rep.min_pairing < 0.0);
}

TEST_CASE("fit_linearization: tanh has kappa = 1, cubic remainder") {
    const LinearizationFit fit =
        fit_linearization(Nonlinearity::tanh_profile(), 0.3);
    CHECK(std::abs(fit.kappa - 1.0) <= 1e-6);
    CHECK(std::abs(fit.gamma - 3.0) <= 0.05);
    CHECK(fit.clean);
}

TEST_CASE("fit_linearization: identity has an exactly zero remainder") {
    const LinearizationFit fit = fit_linearization(Nonlinearity::identity(), 0.3);
    CHECK(std::abs(fit.kappa - 1.0) <= 1e-12);
    CHECK(fit.C <= 1e-12);
}

TEST_CASE("fit_linearization: quadratic remainder of r + r^2") {
    const Nonlinearity phi =
        Nonlinearity::radial([](double r) { return r + r * r; }, "r+r2");
    const LinearizationFit fit = fit_linearization(phi, 0.3);
    CHECK(std::abs(fit.kappa - 1.0) <= 1e-6);
    CHECK(std::abs(fit.gamma - 2.0) <= 0.05);
}

TEST_CASE("fit_linearization: linear gain recovers kappa exactly") {
    const LinearizationFit fit =
        fit_linearization(Nonlinearity::linear_gain(2.5), 0.3);
    CHECK(std::abs(fit.kappa - 2.5) <= 1e-12);
}
