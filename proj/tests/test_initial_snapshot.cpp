#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "ksmix/errors.hpp"
#include "ksmix/initial_data.hpp"
#include "ksmix/snapshot.hpp"

using namespace ksmix;
namespace fs = std::filesystem;

TEST_CASE("bump field mass, sign, and peak location") {
    const Grid g = make_grid(2, 64);
    const std::array<double, 3> c{0.13, 0.21, 0.0};
    const ScalarField f = bump_field(g, 6.0, 0.25, c);
    const double cell_mass = f.samples().sum() * std::pow(g.h, g.d);
    CHECK(cell_mass == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(f.samples().minCoeff() >= 0.0);

    // argmax sits on the node nearest the center
    Eigen::Index imax = 0;
    f.samples().maxCoeff(&imax);
    const long i1 = imax / g.n, i2 = imax % g.n;
    const long want1 = std::lround((c[0] + 0.5) / g.h) % g.n;
    const long want2 = std::lround((c[1] + 0.5) / g.h) % g.n;
    CHECK(i1 == want1);
    CHECK(i2 == want2);
}

TEST_CASE("bump width and mass validation") {
    const Grid g = make_grid(2, 64);
    CHECK_THROWS_AS(bump_field(g, 1.0, 1.0 / g.n, {}), config_error);  // under 2h: unresolved
    CHECK_THROWS_AS(bump_field(g, 1.0, 0.4, {}), config_error);       // too wide for the box
    CHECK_THROWS_AS(bump_field(g, 0.0, 0.2, {}), config_error);
    CHECK_THROWS_AS(bump_field(g, -1.0, 0.2, {}), config_error);
}

TEST_CASE("two bumps carry the prescribed total mass") {
    const Grid g = make_grid(2, 64);
    InitialSpec spec;
    spec.kind = InitialKind::TWO_BUMP;
    spec.mass = 3.0;
    spec.width = 0.08;
    spec.center = {-0.2, 0.0, 0.0};
    spec.separation = 0.4;
    const ScalarField f = make_initial(spec, g);
    CHECK(f.samples().sum() * std::pow(g.h, g.d) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(f.samples().minCoeff() >= 0.0);
}

TEST_CASE("random smooth field: deterministic, mean zero, prescribed decay") {
    const Grid g = make_grid(2, 64);
    const ScalarField a = random_smooth_field(g, 7, 4.0);
    const ScalarField b = random_smooth_field(g, 7, 4.0);
    CHECK((a.samples() == b.samples()).all());
    const ScalarField c = random_smooth_field(g, 8, 4.0);
    CHECK((a.samples() != c.samples()).any());
    CHECK(std::abs(mean(a)) <= 1e-14);
    for (const std::array<int, 3> k : {std::array<int, 3>{1, 0, 0}, {3, 2, 0}, {0, 5, 0}}) {
        const double kn = std::sqrt(double(k[0]) * k[0] + double(k[1]) * k[1]);
        CHECK(std::abs(a.coefficient(k)) ==
              doctest::Approx(std::pow(1.0 + kn, -4.0)).epsilon(1e-12));
    }
}

TEST_CASE("make_initial normalizes random data to a nonnegative prescribed-mass field") {
    const Grid g = make_grid(2, 64);
    InitialSpec spec;
    spec.kind = InitialKind::RANDOM_SMOOTH;
    spec.mass = 2.0;
    spec.seed = 99;
    const ScalarField f = make_initial(spec, g);
    CHECK(f.samples().minCoeff() >= 0.0);
    CHECK(f.samples().sum() * std::pow(g.h, g.d) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("snapshot roundtrip and error paths") {
    const Grid g = make_grid(2, 32);
    const ScalarField f = random_smooth_field(g, 11, 3.0);
    const fs::path dir = fs::temp_directory_path() / "ksmix_snap_test";
    fs::create_directories(dir);
    const std::string base = (dir / "field").string();
    write_snapshot(base, f, 1.25, {{"note", "t"}});

    const Snapshot s = read_snapshot(base);
    CHECK(s.t == 1.25);
    CHECK(s.meta.at("note") == "t");
    CHECK((s.field.samples() == f.samples()).all());
    const Snapshot s2 = read_snapshot(base + ".json");  // .json path also accepted
    CHECK((s2.field.samples() == f.samples()).all());

    CHECK_THROWS_AS(read_snapshot((dir / "missing").string()), io_error);

    // truncated payload must be detected
    const std::string tb = (dir / "trunc").string();
    write_snapshot(tb, f, 0.0);
    fs::resize_file(tb + ".f64", 10);
    CHECK_THROWS_AS(read_snapshot(tb), io_error);

    // grid mismatch when used as an initial datum
    InitialSpec spec;
    spec.kind = InitialKind::SNAPSHOT;
    spec.path = base;
    CHECK_NOTHROW(make_initial(spec, g));
    CHECK_THROWS_AS(make_initial(spec, make_grid(2, 64)), config_error);
    fs::remove_all(dir);
}
