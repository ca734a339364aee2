#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <doctest.h>

#include "vol32/errors.hpp"
#include "vol32/models.hpp"

using namespace vol32;

namespace {

const ThreeHalvesParams kDrimus{22.84, 0.4669 * 0.4669, 8.56, -0.99,
                                0.2450 * 0.2450};

std::string temp_path(const char* name) {
    return std::string("vol32_test_") + name;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path);
    f << body;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(validate(kDrimus));
    ThreeHalvesParams p = kDrimus;
    p.kappa = 0.0;
    CHECK_THROWS_AS(validate(p), DomainError);
    p = kDrimus;
    p.rho = -1.2;
    CHECK_THROWS_AS(validate(p), DomainError);
    p = kDrimus;
    p.v0 = -0.1;
    CHECK_THROWS_AS(validate(p), DomainError);
    p = kDrimus;
    p.epsilon = 0.0;
    CHECK_THROWS_AS(validate(p), DomainError);

    MarketEnv env{0.01, 0.0};
    CHECK_THROWS_AS(validate(env), DomainError);
}

TEST_CASE("jump parameter identity is enforced") {
    // mu = log(1 + mu_bar) - sigma^2 / 2
    const JumpParams good = complete_jump_params_from_mu(0.1, 0.39, -0.30);
    CHECK(good.mu_bar ==
          doctest::Approx(-0.20064489887475584698).epsilon(1e-15));
    CHECK_NOTHROW(validate(good));

    JumpParams bad = good;
    bad.mu_bar = -0.1;  // inconsistent with (mu, sigma)
    CHECK_THROWS_AS(validate(bad), DomainError);

    // round trip through the other direction
    const JumpParams back =
        complete_jump_params_from_mu_bar(0.1, 0.39, good.mu_bar);
    CHECK(back.mu == doctest::Approx(good.mu).epsilon(1e-14));

    // a jump cannot shrink the mean below e^{sigma^2/2}-type floor:
    // mu_bar - mu = sigma^2/2 + (mu_bar - log(1+mu_bar)) >= 0 always
    for (double mb : {-0.5, -0.2, 0.0, 0.4})
        for (double sg : {0.05, 0.39, 1.0}) {
            const JumpParams jp = complete_jump_params_from_mu_bar(1.0, sg, mb);
            CHECK(jp.mu_bar - jp.mu >= sg * sg / 2 - 1e-15);
        }
}

TEST_CASE("martingale condition") {
    CHECK(check_martingale(kDrimus));
    // kappa - epsilon rho = -0.7 < -epsilon^2/2 = -0.5: strict local
    ThreeHalvesParams bad{0.2, 0.04, 1.0, 0.9, 0.04};
    CHECK_FALSE(check_martingale(bad));
    CHECK_THROWS_AS(require_martingale(bad), MartingaleError);
    CHECK_NOTHROW(require_martingale(bad, /*allow_strict_local=*/true));
    // exact boundary counts as a martingale
    ThreeHalvesParams edge{0.5, 0.04, 1.0, 1.0, 0.04};
    CHECK(check_martingale(edge));
}

TEST_CASE("parameter file round trip") {
    const std::string path = temp_path("roundtrip.txt");
    const JumpParams jp = complete_jump_params_from_mu(0.18, 0.39, -0.30);
    const MarketEnv env{0.0123456789012345, 1370.5};
    save_param_file(path, kDrimus, jp, env, "round trip fixture");

    const ParamFileData d = load_param_file(path);
    CHECK(d.diffusion.kappa == kDrimus.kappa);
    CHECK(d.diffusion.theta == kDrimus.theta);
    CHECK(d.diffusion.epsilon == kDrimus.epsilon);
    CHECK(d.diffusion.rho == kDrimus.rho);
    CHECK(d.diffusion.v0 == kDrimus.v0);
    CHECK(d.env.r == env.r);
    CHECK(d.env.s0 == env.s0);
    const JumpParams jr = resolve_jumps(d);
    CHECK(jr.lambda == jp.lambda);
    CHECK(jr.mu == doctest::Approx(jp.mu).epsilon(1e-15));
    CHECK(jr.mu_bar == doctest::Approx(jp.mu_bar).epsilon(1e-15));
    std::remove(path.c_str());
}

TEST_CASE("parameter file rejects malformed input") {
    const std::string path = temp_path("bad.txt");

    write_file(path, "kappa = 1\ntheta = 0.04\nepsilon = 2\nrho = -0.5\n");
    CHECK_THROWS_AS(load_param_file(path), Error);  // v0 missing

    write_file(path,
               "kappa = 1\ntheta = 0.04\nepsilon = 2\nrho = -0.5\nv0 = "
               "0.04\nspeed = 3\n");
    CHECK_THROWS_AS(load_param_file(path), Error);  // unknown key

    write_file(path,
               "kappa = 1x\ntheta = 0.04\nepsilon = 2\nrho = -0.5\nv0 = "
               "0.04\n");
    CHECK_THROWS_AS(load_param_file(path), Error);  // trailing junk

    CHECK_THROWS_AS(load_param_file(temp_path("does_not_exist.txt")), Error);
    std::remove(path.c_str());
}

TEST_CASE("parameter file comments, defaults and jump completion") {
    const std::string path = temp_path("defaults.txt");
    write_file(path,
               "# comment line\n"
               "kappa = 1\n"
               "theta = 0.04   # trailing comment\n"
               "epsilon = 2\n\n"
               "rho = -0.5\n"
               "v0 = 0.04\n");
    const ParamFileData d = load_param_file(path);
    CHECK(d.env.r == 0.0);
    CHECK(d.env.s0 == 1.0);
    CHECK(d.lambda == 0.0);
    const JumpParams jp = resolve_jumps(d);
    CHECK(jp.lambda == 0.0);

    // mu_bar-only file: mu is completed
    write_file(path,
               "kappa = 1\ntheta = 0.04\nepsilon = 2\nrho = -0.5\nv0 = 0.04\n"
               "lambda = 0.2\nmu_bar = -0.15\nsigma = 0.3\n");
    const JumpParams j2 = resolve_jumps(load_param_file(path));
    CHECK(j2.mu ==
          doctest::Approx(std::log(0.85) - 0.045).epsilon(1e-15));

    // lambda > 0 with neither mu nor mu_bar is unusable
    write_file(path,
               "kappa = 1\ntheta = 0.04\nepsilon = 2\nrho = -0.5\nv0 = 0.04\n"
               "lambda = 0.2\nsigma = 0.3\n");
    CHECK_THROWS_AS(resolve_jumps(load_param_file(path)), Error);

    // inconsistent pair is rejected
    write_file(path,
               "kappa = 1\ntheta = 0.04\nepsilon = 2\nrho = -0.5\nv0 = 0.04\n"
               "lambda = 0.2\nmu = -0.3\nmu_bar = -0.1\nsigma = 0.3\n");
    CHECK_THROWS_AS(resolve_jumps(load_param_file(path)), Error);
    std::remove(path.c_str());
}

TEST_CASE("the same file fields can be read as square-root parameters") {
    const std::string path = temp_path("svj.txt");
    write_file(path,
               "kappa = 3.8\ntheta = 0.09579025\nepsilon = 0.9288\n"
               "rho = -0.7829\nv0 = 0.06533136\nr = 0.01\ns0 = 1\n");
    const ParamFileData d = load_param_file(path);
    const SVJParams sp = as_svj(d);
    CHECK(sp.kappa_t == 3.8);
    CHECK(sp.theta_t == 0.09579025);
    CHECK(sp.epsilon_t == 0.9288);
    CHECK(sp.rho == -0.7829);
    CHECK(sp.v0 == 0.06533136);
    CHECK(sp.jumps.lambda == 0.0);
    std::remove(path.c_str());
}

}  // TEST_SUITE
