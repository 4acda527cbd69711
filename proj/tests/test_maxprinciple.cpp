#include <cmath>

#include <doctest.h>

#include "ksmix/diagnostics.hpp"
#include "ksmix/errors.hpp"
#include "ksmix/initial_data.hpp"
#include "ksmix/maxprinciple.hpp"

using namespace ksmix;

TEST_CASE("lemma constants: frozen closed forms") {
    const MaxPrincipleConstants c111 = lemma_constants(1.0, 1, 1.0);
    CHECK(c111.C_lower == doctest::Approx(0.07957747154594767).epsilon(1e-12));  // 1/(4*pi)
    CHECK(c111.omega_d == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(c111.M == 0.25);

    const MaxPrincipleConstants c122 = lemma_constants(1.0, 2, 2.0);
    CHECK(c122.C_upper == doctest::Approx(6.383076486422923).epsilon(1e-12));
    CHECK(c122.omega_d == doctest::Approx(M_PI).epsilon(1e-14));
    CHECK(lemma_constants(0.7, 3, 1.0).omega_d == doctest::Approx(4.1887902047863905).epsilon(1e-13));

    CHECK_THROWS_AS(lemma_constants(2.0, 2, 2.0), config_error);  // constants diverge at alpha=2
    CHECK_THROWS_AS(lemma_constants(1.0, 2, 0.5), config_error);
    CHECK_THROWS_AS(lemma_constants(1.0, 4, 1.0), config_error);
    CHECK_THROWS_AS(lemma_constants(1.0, 2, 2.0, 0.6), config_error);  // M <= 1/2
}

TEST_CASE("optimal radius") {
    CHECK(optimal_radius(1.0, 1.0, 1, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    // shrinking L^p norm shrinks the radius (sharper concentration)
    CHECK(optimal_radius(1.0, 0.01, 1, 1.0) < optimal_radius(1.0, 0.1, 1, 1.0));
    CHECK_THROWS_AS(optimal_radius(0.0, 1.0, 1, 1.0), input_error);
}

TEST_CASE("dichotomy branches agree with the proof radius") {
    const Grid g = make_grid(1, 256);
    const MaxPrincipleConstants c = lemma_constants(1.0, 1, 1.0);

    // narrow bump: small mass, R <= M, lower branch
    const ScalarField narrow = bump_field(g, 0.02, 0.01, {0.0, 0.0, 0.0});
    const DichotomyEval en = evaluate_dichotomy(narrow, c);
    CHECK(en.lower_active);
    CHECK(en.radius <= c.M);
    CHECK(en.lower_slack >= -1e-6);

    // broad positive field: R > M, the L^p branch holds
    const ScalarField broad = bump_field(g, 1.0, 0.3, {0.1, 0.0, 0.0});
    const DichotomyEval eb = evaluate_dichotomy(broad, c);
    CHECK_FALSE(eb.lower_active);
    CHECK(eb.upper_slack >= -1e-6);
}

TEST_CASE("dichotomy slacks are scale covariant") {
    const Grid g = make_grid(1, 256);
    const MaxPrincipleConstants c = lemma_constants(1.0, 1, 2.0);
    const ScalarField f = bump_field(g, 0.05, 0.02, {0.0, 0.0, 0.0});
    const DichotomyEval e1 = evaluate_dichotomy(f, c);
    for (double scale : {0.5, 2.0}) {
        const ScalarField sf = ScalarField::from_samples(g, scale * f.samples());
        const DichotomyEval e2 = evaluate_dichotomy(sf, c);
        CHECK(e2.radius == doctest::Approx(e1.radius).epsilon(1e-12));
        CHECK(e2.lower_slack == doctest::Approx(e1.lower_slack).epsilon(1e-9));
        CHECK(e2.upper_slack == doctest::Approx(e1.upper_slack).epsilon(1e-9));
    }
}

TEST_CASE("dichotomy classification is total and consistent") {
    const Grid g = make_grid(2, 64);
    const MaxPrincipleConstants c = lemma_constants(1.0, 2, 2.0);
    for (int i = 0; i < 10; ++i) {
        ScalarField f = random_smooth_field(g, 7000 + static_cast<std::uint64_t>(i), 3.0);
        f = ScalarField::from_samples(g, f.samples() - f.samples().minCoeff() + 0.2);
        const DichotomyFlag flag = maxprinciple_dichotomy(f, 1.0, 2.0, c);
        const DichotomyEval e = evaluate_dichotomy(f, c);
        if (flag == DichotomyFlag::LOWER_BOUND)
            CHECK(e.lower_slack >= -1e-6);
        else
            CHECK(e.upper_slack >= -1e-6);
    }
    CHECK_THROWS_AS(
        maxprinciple_dichotomy(bump_field(g, 1.0, 0.2, {0.0, 0.0, 0.0}), 0.5, 2.0, c),
        input_error);  // constants built for different alpha
}

TEST_CASE("sharpening bumps keep the lower branch honest as width shrinks") {
    const Grid g = make_grid(1, 256);
    const MaxPrincipleConstants c = lemma_constants(1.0, 1, 1.0);
    for (double w : {0.05, 0.02, 0.01, 4.0 / 256}) {
        ScalarField f = bump_field(g, 1.0, w, {0.0, 0.0, 0.0});
        f = ScalarField::from_samples(g, f.samples() / f.samples().maxCoeff());
        const DichotomyEval e = evaluate_dichotomy(f, c);
        if (e.lower_active) CHECK(e.lower_slack >= -1e-6);
    }
}

TEST_CASE("falsify: deterministic, clean, and serializable") {
    const FalsifyReport r1 = falsify(1.0, 1, 1.0, 60, 12345);
    const FalsifyReport r2 = falsify(1.0, 1, 1.0, 60, 12345);
    CHECK(falsify_report_json(r1) == falsify_report_json(r2));
    CHECK(r1.trials == 60);
    CHECK(r1.violations == 0);
    CHECK(r1.dichotomy_failures == 0);
    CHECK(r1.min_slack >= -1e-6);
    CHECK(r1.lower_branch_trials + r1.upper_branch_trials == r1.trials);
    CHECK(falsify_report_json(r1).find("\"violations\"") != std::string::npos);
}
