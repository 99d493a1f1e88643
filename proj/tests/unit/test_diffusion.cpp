#include <doctest.h>

#include <cmath>

#include "pasguide/diffusion.hpp"
#include "pasguide/errors.hpp"
#include "pasguide/predictors.hpp"
#include "support/fixtures.hpp"

using namespace pasguide;

namespace {

Image scalar(double v) { return Image(1, 1, 1, v); }

}  // namespace

TEST_CASE("make_schedule produces the stated alpha_bar sequences") {
    const NoiseSchedule one = make_schedule(1, 0.02, 0.02);
    CHECK(one.alpha_bar(1) == doctest::Approx(0.98).epsilon(1e-15));

    const NoiseSchedule two(std::vector<double>{0.1, 0.2});
    CHECK(two.alpha_bar(1) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(two.alpha_bar(2) == doctest::Approx(0.72).epsilon(1e-15));

    CHECK_THROWS_AS(make_schedule(0, 0.1, 0.2), InvalidInputError);
    CHECK_THROWS_AS(make_schedule(5, 0.0, 0.2), InvalidInputError);
    CHECK_THROWS_AS(make_schedule(5, 0.3, 0.2), InvalidInputError);
    CHECK_THROWS_AS(make_schedule(5, 0.1, 1.0), InvalidInputError);
}

TEST_CASE("NoiseSchedule invariants hold for constructed schedules") {
    for (int timesteps : {1, 10, 50}) {
        const NoiseSchedule sched = make_schedule(timesteps);
        double product = 1.0;
        double prev_bar = 1.0;
        for (int t = 1; t <= timesteps; ++t) {
            CHECK(sched.beta(t) > 0.0);
            CHECK(sched.beta(t) < 1.0);
            CHECK(sched.alpha(t) == doctest::Approx(1.0 - sched.beta(t)).epsilon(1e-15));
            product *= sched.alpha(t);
            CHECK(std::fabs(sched.alpha_bar(t) - product) < 1e-12);
            CHECK(sched.alpha_bar(t) < prev_bar);
            const double expected_var =
                sched.beta(t) * (1.0 - sched.alpha_bar(t - 1)) / (1.0 - sched.alpha_bar(t));
            CHECK(std::fabs(sched.posterior_var(t) - expected_var) < 1e-15);
            prev_bar = sched.alpha_bar(t);
        }
        CHECK(sched.posterior_var(1) == 0.0);
    }
}

TEST_CASE("forward_sample limits and arithmetic") {
    // alpha_bar close to 1: tiny beta.
    const NoiseSchedule near_one = make_schedule(1, 1e-12, 1e-12);
    const Image x0 = scalar(0.5);
    const Image eps = scalar(0.1);
    CHECK(forward_sample(x0, 1, eps, near_one).at(0, 0, 0) == doctest::Approx(0.5).epsilon(1e-6));

    // alpha_bar close to 0: beta near 1 over many steps.
    const NoiseSchedule near_zero = make_schedule(40, 0.9, 0.99);
    CHECK(forward_sample(x0, 40, eps, near_zero).at(0, 0, 0) == doctest::Approx(0.1).epsilon(1e-6));

    // alpha_bar = 0.25 exactly: beta = 0.75.
    const NoiseSchedule quarter(std::vector<double>{0.75});
    CHECK(forward_sample(x0, 1, eps, quarter).at(0, 0, 0) ==
          doctest::Approx(0.25 + std::sqrt(0.75) * 0.1).epsilon(1e-12));

    CHECK_THROWS_AS(forward_sample(x0, 1, Image(2, 1, 1, 0.0), quarter), InvalidInputError);
}

TEST_CASE("predict_x0 inverts forward_sample") {
    Rng rng(7);
    const NoiseSchedule sched = make_schedule(10);
    for (int trial = 0; trial < 20; ++trial) {
        const Image x0 = fixtures::random_image(rng, 4, 4, 3);
        const Image eps = fixtures::random_image(rng, 4, 4, 3, -2.0, 2.0);
        const int t = static_cast<int>(rng.uniform_int(1, 10));
        const Image x_t = forward_sample(x0, t, eps, sched);
        CHECK(max_abs_diff(predict_x0(x_t, eps, t, sched), x0) < 1e-6);
    }

    const NoiseSchedule quarter(std::vector<double>{0.75});
    CHECK(predict_x0(scalar(0.3), scalar(0.0), 1, quarter).at(0, 0, 0) == doctest::Approx(0.6).epsilon(1e-12));
    const double x_t = 0.25 + std::sqrt(0.75) * 0.1;
    CHECK(predict_x0(scalar(x_t), scalar(0.1), 1, quarter).at(0, 0, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("reverse_mean formula") {
    // beta = 0.1, alpha = 0.9, alpha_bar = 0.9 (single step).
    const NoiseSchedule sched(std::vector<double>{0.1});
    const double expected = (0.5 - 0.1 * 0.5 / std::sqrt(0.1)) / std::sqrt(0.9);
    CHECK(reverse_mean(scalar(0.5), scalar(0.5), 1, sched).at(0, 0, 0) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.36037).epsilon(1e-4));

    // eps_hat = 0 collapses to x_t / sqrt(alpha).
    Rng rng(9);
    const Image x_t = fixtures::random_image(rng, 3, 3, 3);
    const Image zero(3, 3, 3, 0.0);
    const Image mu = reverse_mean(x_t, zero, 1, sched);
    for (std::size_t i = 0; i < mu.data().size(); ++i) {
        CHECK(mu.data()[i] == doctest::Approx(x_t.data()[i] / std::sqrt(0.9)).epsilon(1e-12));
    }
    CHECK(mu.all_finite());
}

TEST_CASE("guided_transition determinism and shift") {
    Rng rng(11);
    const Image mean = scalar(0.4);
    const Image zero_g = scalar(0.0);

    // variance 0: exact shifted mean, no rng consumption.
    const Image g = scalar(2.0);
    const Image out = guided_transition(mean, 0.0, g, 3.0, rng);
    CHECK(out.at(0, 0, 0) == 0.4 - 3.0 * 0.0 * 2.0);

    // Fixed seed reproduces mean + sqrt(var) * normal draw.
    Rng a(99), b(99);
    const Image sampled = guided_transition(mean, 0.25, zero_g, 1.0, a);
    CHECK(sampled.at(0, 0, 0) == doctest::Approx(0.4 + 0.5 * b.normal()).epsilon(1e-15));

    CHECK_THROWS_AS(guided_transition(mean, -0.5, zero_g, 1.0, rng), InvalidInputError);
}

TEST_CASE("guided_transition empirical mean matches the shifted mean") {
    Rng rng(123);
    const Image mean = scalar(0.0);
    const Image g = scalar(0.3);
    double acc = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) acc += guided_transition(mean, 1.0, g, 2.0, rng).at(0, 0, 0);
    CHECK(acc / n == doctest::Approx(-0.6).epsilon(0.034));  // +-0.02 absolute on -0.6
}

TEST_CASE("one exact-predictor reverse step lands on the analytic posterior mean") {
    const NoiseSchedule sched = make_schedule(10);
    const int t = 6;
    const Image x0 = scalar(0.7);
    const ExactPredictor predictor(x0);
    Rng rng(2024);
    const Image eps = scalar(rng.normal());
    const Image x_t = forward_sample(x0, t, eps, sched);

    const Image eps_hat = predictor.predict(x_t, t, sched);
    const Image mu = reverse_mean(x_t, eps_hat, t, sched);
    const double variance = sched.posterior_var(t);

    const int runs = 20000;
    double acc = 0.0;
    const Image zero_g = scalar(0.0);
    for (int i = 0; i < runs; ++i) {
        acc += guided_transition(mu, variance, zero_g, 0.0, rng).at(0, 0, 0);
    }
    const double empirical = acc / runs;
    const double stderr_mean = std::sqrt(variance / runs);
    CHECK(std::fabs(empirical - mu.at(0, 0, 0)) < 3.0 * stderr_mean);
}
