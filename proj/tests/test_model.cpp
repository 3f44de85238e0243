#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "ecoevo/common.hpp"
#include "ecoevo/kernels.hpp"
#include "ecoevo/model.hpp"
#include "ecoevo/mutation.hpp"
#include "ecoevo/numerics.hpp"
#include "ecoevo/presets.hpp"
#include "ecoevo/rng.hpp"

using namespace ecoevo;

// ---- interaction kernels ----

TEST_CASE("sigmoid competition kernel matches its closed form") {
    // 2 (1 - 1 / (1 + 1.2 exp(-4 h))): reference values computed at high
    // precision from the formula.
    KernelPtr U = sigmoid_kernel(2.0, 1.2, 4.0);
    CHECK((*U)(0.0) == doctest::Approx(12.0 / 11.0).epsilon(1e-14));
    CHECK((*U)(0.1) == doctest::Approx(0.891588520642899334).epsilon(1e-13));
    CHECK((*U)(-0.1) == doctest::Approx(1.283202842789970048).epsilon(1e-13));
    CHECK((*U)(0.05) == doctest::Approx(0.991161008597994628).epsilon(1e-13));
    CHECK((*U)(0.5) == doctest::Approx(0.279425349230028132).epsilon(1e-13));
    // Supremum is approached as h -> -inf.
    CHECK(U->bound() == doctest::Approx(2.0));
    for (double h = -6.0; h <= 6.0; h += 0.37) {
        CHECK((*U)(h) >= 0.0);
        CHECK((*U)(h) <= U->bound() * (1.0 + 1e-12));
    }
}

TEST_CASE("constant and gaussian kernels") {
    KernelPtr c = constant_kernel(0.7);
    CHECK((*c)(0.0) == 0.7);
    CHECK((*c)(-31.4) == 0.7);
    CHECK(c->bound() == 0.7);

    KernelPtr g = gaussian_kernel(1.5, 0.3);
    CHECK((*g)(0.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK((*g)(0.3) == doctest::Approx(1.5 * std::exp(-0.5)).epsilon(1e-14));
    CHECK(g->bound() == doctest::Approx(1.5));
}

TEST_CASE("batched kernel evaluation agrees with scalar evaluation") {
    std::vector<KernelPtr> kernels = {
        sigmoid_kernel(2.0, 1.2, 4.0),
        gaussian_kernel(1.0, 0.25),
        constant_kernel(0.4),
        function_kernel([](double h) { return 1.0 / (1.0 + h * h); }, 1.0, "cauchy"),
    };
    Rng rng(2024);
    for (const KernelPtr& k : kernels) {
        const std::size_t n = 37;
        std::vector<double> xs(n), a0(n), a1(n);
        const int na = k->aux_count();
        REQUIRE(na <= 2);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = 4.0 * rng.uniform();
            double aux[2] = {0.0, 0.0};
            k->prepare_aux(xs[i], aux);
            a0[i] = aux[0];
            a1[i] = aux[1];
        }
        const double z = 4.0 * rng.uniform();
        double zaux[2] = {0.0, 0.0};
        k->prepare_aux(z, zaux);
        std::vector<double> to_z(n), from_z(n);
        k->eval_many(xs.data(), a0.data(), a1.data(), n, z, zaux, to_z.data(), from_z.data());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(to_z[i] == doctest::Approx((*k)(xs[i] - z)).epsilon(1e-12));
            CHECK(from_z[i] == doctest::Approx((*k)(z - xs[i])).epsilon(1e-12));
        }
    }
}

// ---- mutation kernel ----

TEST_CASE("gaussian mutation law is normalized on the trait interval") {
    TraitSpace space{1, 0.0, 4.0, true};
    MutationKernel m = MutationKernel::gaussian(space, 0.1);
    for (double x : {0.0, 0.37, 2.0, 3.9, 4.0}) {
        const double mass =
            integrate([&](double z) { return m.density(x, z); }, 0.0, 4.0, 1e-10);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
    // Density vanishes outside the interval.
    CHECK(m.density(2.0, -0.1) == 0.0);
    CHECK(m.density(2.0, 4.1) == 0.0);
}

TEST_CASE("gaussian mutation sampling stays inside the space and centers on the parent") {
    TraitSpace space{1, 0.0, 4.0, true};
    MutationKernel m = MutationKernel::gaussian(space, 0.1);
    Rng rng(7);
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double z = m.sample(rng, 2.0);
        REQUIRE(z >= 0.0);
        REQUIRE(z <= 4.0);
        sum += z;
    }
    // Far from the boundary the conditioning is invisible: mean = parent.
    CHECK(sum / n == doctest::Approx(2.0).epsilon(1e-2));
    // Near the edge every sample still lands inside.
    for (int i = 0; i < 2000; ++i) {
        const double z = m.sample(rng, 0.01);
        REQUIRE(z >= 0.0);
        REQUIRE(z <= 4.0);
    }
}

TEST_CASE("gaussian mutation envelope dominates the conditioned density") {
    TraitSpace space{1, 0.0, 4.0, true};
    MutationKernel m = MutationKernel::gaussian(space, 0.1);
    // Worst containment: half the mass lost at a corner, so C = 2 exactly.
    CHECK(m.containment_mass(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.containment_mass(4.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.containment_mass(2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.envelope_c() == doctest::Approx(2.0).epsilon(1e-9));
    for (double x = 0.0; x <= 4.0; x += 0.13) {
        for (double h = -0.5; h <= 0.5; h += 0.01) {
            const double dens = m.density(x, x + h);
            const double env = m.envelope_c() * m.envelope_density(h);
            CHECK(dens <= env * (1.0 + 1e-9) + 1e-300);
        }
    }
    // The envelope sampler is the unconditioned displacement law.
    Rng rng(11);
    double s = 0.0, s2 = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        const double h = m.sample_envelope(rng);
        s += h;
        s2 += h * h;
    }
    CHECK(s / n == doctest::Approx(0.0).epsilon(2e-3));
    CHECK(s2 / n == doctest::Approx(0.01).epsilon(3e-2));
}

TEST_CASE("sigma rescaling produces the narrower gaussian law") {
    TraitSpace space{1, 0.0, 4.0, true};
    MutationKernel wide = MutationKernel::gaussian(space, 0.3);
    MutationKernel narrow = wide.with_sigma_scaled(0.1);
    MutationKernel direct = MutationKernel::gaussian(space, 0.03);
    CHECK(narrow.sigma() == doctest::Approx(0.03).epsilon(1e-15));
    for (double x : {0.2, 1.0, 3.8}) {
        for (double z : {0.19, 1.02, 3.81}) {
            CHECK(narrow.density(x, z) == doctest::Approx(direct.density(x, z)).epsilon(1e-12));
        }
    }
    // Non-gaussian kernels only admit the identity factor.
    MutationKernel flat = MutationKernel::custom(
        [](Rng& r, double) { return r.uniform(); },
        [](double, double z) { return (z >= 0.0 && z <= 1.0) ? 1.0 : 0.0; },
        [](double h) { return (h >= -1.0 && h <= 1.0) ? 0.5 : 0.0; },
        [](Rng& r) { return 2.0 * r.uniform() - 1.0; }, 2.0);
    CHECK_NOTHROW(flat.with_sigma_scaled(1.0));
    CHECK_THROWS_AS(flat.with_sigma_scaled(0.5), Error);
}

// ---- model validation ----

namespace {

ModelSpec base_affine_model() {
    TraitSpace space{1, 0.0, 1.0, true};
    return linear_logistic_model(2.0, 0.0, 1.0, 1.0, 1.0, 0.1, 0.05, space);
}

}  // namespace

TEST_CASE("factory models pass validation") {
    ValidationReport r1 = validate_model(kisdi_model(0.1, 0.03));
    CHECK(r1.ok);
    CHECK(r1.probes == 2048);
    CHECK(r1.worst_mass_deviation < 1e-6);
    CHECK(validate_model(base_affine_model()).ok);
    CHECK(validate_model(yule_model(0.3)).ok);
}

TEST_CASE("validation rejects a birth rate above its declared envelope") {
    ModelSpec m = base_affine_model();
    m.birth = [](double, double) { return 5.0; };  // declared sup stays at 2
    m.ll.reset();
    m.monotone = false;
    try {
        validate_model(m);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.hard);
        CHECK(std::string(e.what()).find("birth") != std::string::npos);
    }
}

TEST_CASE("validation rejects a death rate above its affine envelope") {
    ModelSpec m = base_affine_model();
    m.death = [](double, double zeta) { return 1.0 + 3.0 * zeta; };  // slope declared 1
    m.ll.reset();
    m.monotone = false;
    try {
        validate_model(m);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.hard);
    }
}

TEST_CASE("validation rejects mutation probabilities outside the unit interval") {
    ModelSpec m = base_affine_model();
    m.mu = [](double) { return 1.5; };
    CHECK_THROWS_AS(validate_model(m), ValidationError);
}

TEST_CASE("validation flags an unnormalized mutation kernel as a soft failure") {
    ModelSpec m = base_affine_model();
    TraitSpace space = m.space;
    MutationKernel good = MutationKernel::gaussian(space, 0.05);
    m.mutation = MutationKernel::custom(
        [good](Rng& r, double x) mutable { return good.sample(r, x); },
        [good](double x, double z) { return 0.9 * good.density(x, z); },
        [good](double h) { return good.envelope_density(h); },
        [good](Rng& r) mutable { return good.sample_envelope(r); }, good.envelope_c());
    try {
        validate_model(m);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK_FALSE(e.hard);  // normalization failure, not a bound breach
        CHECK(std::string(e.what()).find("normalized") != std::string::npos);
    }
}

TEST_CASE("validation enforces the declared monotonicity in competition") {
    ModelSpec m = base_affine_model();
    m.birth = [](double, double zeta) { return std::min(2.0, 0.5 + 0.1 * zeta); };
    m.ll.reset();
    m.monotone = true;
    CHECK_THROWS_AS(validate_model(m), ValidationError);
}

TEST_CASE("validation cross-checks the affine coefficients against the closures") {
    ModelSpec m = base_affine_model();
    // Lie about alpha: closure uses 1, coefficients claim 2.
    m.ll = LinearLogistic{[](double) { return 2.0; }, [](double) { return 1.0; },
                          [](double) { return 2.0; }};
    CHECK_THROWS_AS(validate_model(m), ValidationError);
}

// ---- scaling validation and resolution ----

TEST_CASE("scaling validation enforces the regime constraints") {
    ModelSpec m = kisdi_model(0.1, 0.03);

    ScalingSpec none{ScalingMode::none, 2.0};
    CHECK_THROWS_AS(validate_scaling(m, none), ConfigError);
    CHECK_THROWS_AS(AppliedModel(m, none), ConfigError);

    ScalingSpec bad_eta{ScalingMode::accel_gauss, 100.0, 1.5};
    CHECK_THROWS_AS(validate_scaling(m, bad_eta), ConfigError);
    ScalingSpec zero_eta{ScalingMode::accel_gauss, 100.0, 0.0};
    CHECK_THROWS_AS(validate_scaling(m, zero_eta), ConfigError);

    ModelSpec flat = m;
    flat.mutation = MutationKernel::custom(
        [](Rng& r, double) { return 4.0 * r.uniform(); },
        [](double, double z) { return (z >= 0.0 && z <= 4.0) ? 0.25 : 0.0; },
        [](double h) { return (h >= -4.0 && h <= 4.0) ? 0.125 : 0.0; },
        [](Rng& r) { return 8.0 * r.uniform() - 4.0; }, 2.0);
    ScalingSpec ag{ScalingMode::accel_gauss, 100.0, 0.5};
    CHECK_THROWS_AS(validate_scaling(flat, ag), ConfigError);
    CHECK_NOTHROW(validate_scaling(m, ag));

    ScalingSpec bad_u{ScalingMode::tss_rare, 100.0, 0.0, 0.0};
    CHECK_THROWS_AS(validate_scaling(m, bad_u), ConfigError);
}

TEST_CASE("weak timescale separation raises a warning, strong separation does not") {
    ModelSpec m = kisdi_model(0.1, 1.0);
    ScalingSpec weak{ScalingMode::tss_rare, 100.0, 0.0, 0.01};
    ValidationReport r = validate_scaling(m, weak);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("separation") != std::string::npos);
    ScalingSpec strong{ScalingMode::tss_rare, 1000.0, 0.0, 1e-6};
    CHECK(validate_scaling(m, strong).warnings.empty());
}

TEST_CASE("scaling resolution folds capacity, acceleration and mutation rescalings") {
    ModelSpec m = kisdi_model(0.1, 0.3);

    AppliedModel cap(m, {ScalingMode::capacity, 100.0});
    CHECK(cap.kernel_scale() == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(cap.accel() == 0.0);
    CHECK(cap.birth(1.2, 0.0) == doctest::Approx(2.8).epsilon(1e-15));
    CHECK(cap.death(1.2, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(cap.mu(1.2) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(cap.mutation().sigma() == doctest::Approx(0.1).epsilon(1e-15));

    AppliedModel ag(m, {ScalingMode::accel_gauss, 10000.0, 0.5});
    CHECK(ag.accel() == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(ag.birth(1.2, 0.0) == doctest::Approx(102.8).epsilon(1e-12));
    CHECK(ag.death(1.2, 0.0) == doctest::Approx(100.0).epsilon(1e-12));
    // sigma / K^(eta/2) = 0.1 / 10
    CHECK(ag.mutation().sigma() == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(ag.mu(1.2) == doctest::Approx(0.3).epsilon(1e-15));

    AppliedModel ar(m, {ScalingMode::accel_rare, 10000.0, 0.5});
    CHECK(ar.mutation().sigma() == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(ar.mu(1.2) == doctest::Approx(0.003).epsilon(1e-12));

    ScalingSpec tss{ScalingMode::tss_rare, 1000.0, 0.0, 1e-6};
    AppliedModel ts(m, tss);
    CHECK(ts.mu(1.2) == doctest::Approx(0.3e-6).epsilon(1e-12));
    CHECK(ts.accel() == 0.0);
}

TEST_CASE("candidate-rate envelope covers the applied rates") {
    ModelSpec m = kisdi_model(0.1, 0.03);
    AppliedModel cap(m, {ScalingMode::capacity, 100.0});
    // flat part: death_base + birth_max * max(C, 1) = 0 + 4 * 2 = 8,
    // linear part: death_slope * sup U / K = 2 / 100.
    CHECK(cap.cbar() == doctest::Approx(8.0).epsilon(1e-12));

    AppliedModel ag(m, {ScalingMode::accel_gauss, 256.0, 0.5});
    // accel K^eta = 16 with unit turnover bound enters both bands:
    // 16 * (1 + C) + birth_max * C = 48 + 8.
    CHECK(ag.cbar() == doctest::Approx(56.0).epsilon(1e-12));

    // With I individuals alive the competition sum is at most
    // kernel_scale * sup U * I, and every acceptance band must fit under
    // cbar * (I + 1).
    Rng rng(99);
    for (long long population : {1LL, 10LL, 1000LL, 100000LL}) {
        for (int i = 0; i < 50; ++i) {
            const double x = 4.0 * rng.uniform();
            const double zeta = cap.kernel_scale() * cap.U().bound() * population * rng.uniform();
            const double budget = cap.cbar() * (population + 1);
            CHECK(cap.death(x, zeta) <= budget * (1.0 + 1e-12));
            CHECK(cap.birth(x, zeta) * std::max(cap.mutation().envelope_c(), 1.0) <=
                  budget * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("applied affine coefficients mirror the closures") {
    ModelSpec m = base_affine_model();
    AppliedModel a(m, {ScalingMode::capacity, 50.0});
    REQUIRE(a.affine());
    CHECK(a.coef_b(0.3) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(a.coef_d0(0.3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.coef_alpha(0.3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_FALSE(a.needs_v());

    ModelSpec ym = yule_model(0.3);  // AppliedModel keeps a pointer to the spec
    AppliedModel y(ym, {ScalingMode::none, 1.0});
    REQUIRE(y.affine());
    CHECK(y.coef_b(0.5) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(y.coef_d0(0.5) == 0.0);
}
