#include <doctest.h>

#include <cmath>

#include "pasguide/errors.hpp"
#include "pasguide/metrics.hpp"
#include "pasguide/sasi.hpp"
#include "support/fixtures.hpp"

using namespace pasguide;

TEST_CASE("channel_stats basics") {
    Image constant(4, 4, 3);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) {
            constant.at(y, x, 0) = 0.2;
            constant.at(y, x, 1) = 0.5;
            constant.at(y, x, 2) = 0.8;
        }
    }
    const ChannelStats stats = channel_stats(constant);
    CHECK(stats.mean[0] == doctest::Approx(0.2));
    CHECK(stats.mean[2] == doctest::Approx(0.8));
    for (double s : stats.stddev) CHECK(s == doctest::Approx(0.0));

    Image two(1, 2, 1, std::vector<double>{0.0, 1.0});
    const ChannelStats s2 = channel_stats(two);
    CHECK(s2.mean[0] == doctest::Approx(0.5));
    CHECK(s2.stddev[0] == doctest::Approx(0.5));  // population std
}

TEST_CASE("channel_stats is permutation invariant") {
    Rng rng(201);
    Image img = fixtures::random_image(rng, 4, 4, 3);
    const ChannelStats before = channel_stats(img);
    // Reverse the pixel order per channel.
    Image reversed(4, 4, 3);
    for (int p = 0; p < 16; ++p) {
        for (int c = 0; c < 3; ++c) {
            reversed.data()[static_cast<std::size_t>(p) * 3 + c] =
                img.data()[static_cast<std::size_t>(15 - p) * 3 + c];
        }
    }
    const ChannelStats after = channel_stats(reversed);
    for (int c = 0; c < 3; ++c) {
        CHECK(before.mean[static_cast<std::size_t>(c)] ==
              doctest::Approx(after.mean[static_cast<std::size_t>(c)]).epsilon(1e-12));
        CHECK(before.stddev[static_cast<std::size_t>(c)] ==
              doctest::Approx(after.stddev[static_cast<std::size_t>(c)]).epsilon(1e-12));
    }
}

TEST_CASE("adain_align examples") {
    Rng rng(203);
    const Image x = fixtures::random_image(rng, 5, 5, 3);
    CHECK(max_abs_diff(adain_align(x, x), x) < 1e-4);  // eps-perturbed identity

    const Image constant_prior(5, 5, 3, 0.9);
    const Image aligned = adain_align(constant_prior, x);
    const ChannelStats xs = channel_stats(x);
    for (int y = 0; y < 5; ++y) {
        for (int xx = 0; xx < 5; ++xx) {
            for (int c = 0; c < 3; ++c) {
                CHECK(aligned.at(y, xx, c) ==
                      doctest::Approx(xs.mean[static_cast<std::size_t>(c)]).epsilon(1e-9));
            }
        }
    }

    // mu/sigma arithmetic: x {0,1}, prior {2,6} -> {~0, ~1}.
    const Image x2(1, 2, 1, std::vector<double>{0.0, 1.0});
    const Image p2(1, 2, 1, std::vector<double>{2.0, 6.0});
    const Image a2 = adain_align(p2, x2);
    CHECK(a2.at(0, 0, 0) == doctest::Approx(0.0).epsilon(1e-4));
    CHECK(a2.at(0, 1, 0) == doctest::Approx(1.0).epsilon(1e-4));

    CHECK_THROWS_AS(adain_align(Image(2, 2, 3, 0.0), x), InvalidInputError);
    CHECK_THROWS_AS(adain_align(x, x, 0.0), InvalidInputError);
}

TEST_CASE("adain statistics contract") {
    Rng rng(207);
    for (int trial = 0; trial < 50; ++trial) {
        const Image x = fixtures::random_image(rng, 8, 8, 3);
        const Image prior = fixtures::random_image(rng, 8, 8, 3, -1.0, 2.0);
        const ChannelStats ps = channel_stats(prior);
        bool usable = true;
        for (double s : ps.stddev) usable = usable && s > 0.01;
        REQUIRE(usable);
        const Image aligned = adain_align(prior, x);
        const ChannelStats as = channel_stats(aligned);
        const ChannelStats xs = channel_stats(x);
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(std::fabs(as.mean[c] - xs.mean[c]) < 1e-5);
            CHECK(std::fabs(as.stddev[c] - xs.stddev[c]) < 1e-4 * (1.0 + xs.stddev[c]));
        }
    }
}

TEST_CASE("structural loss: identity and affine restorers vanish") {
    Rng rng(211);
    const Image x = fixtures::random_image(rng, 8, 8, 3);

    const IdentityRestorer identity;
    CHECK(structural_loss(x, identity).loss <= 1e-10);

    // Affine photometric remaps are cancelled by the alignment.
    struct AffineRestorer : Restorer {
        double a, b;
        AffineRestorer(double a_, double b_) : a(a_), b(b_) {}
        Image restore(const Image& in) const override {
            Image out = in;
            for (double& v : out.data()) v = a * v + b;
            return out;
        }
    };
    const AffineRestorer affine(1.3, -0.2);
    CHECK(structural_loss(x, affine).loss < 1e-8);

    // The MSE ablation sees the affine change.
    CHECK(mse_injection_loss(x, affine).loss > 1e-3);
    CHECK(mse_injection_loss(x, identity).loss == doctest::Approx(0.0));
}

TEST_CASE("style-agnosticism: composing an affine map changes nothing") {
    Rng rng(213);
    struct AffineOf : Restorer {
        const Restorer& inner;
        std::vector<double> a, b;
        AffineOf(const Restorer& r, std::vector<double> a_, std::vector<double> b_)
            : inner(r), a(std::move(a_)), b(std::move(b_)) {}
        Image restore(const Image& in) const override {
            Image out = inner.restore(in);
            for (int y = 0; y < out.height(); ++y) {
                for (int x = 0; x < out.width(); ++x) {
                    for (int c = 0; c < out.channels(); ++c) {
                        out.at(y, x, c) = a[static_cast<std::size_t>(c)] * out.at(y, x, c) +
                                          b[static_cast<std::size_t>(c)];
                    }
                }
            }
            return out;
        }
    };

    const UnsharpRestorer phi(0.8, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Image x = fixtures::random_image(rng, 8, 8, 3);
        std::vector<double> a{rng.uniform(0.75, 1.3), rng.uniform(0.75, 1.3), rng.uniform(0.75, 1.3)};
        std::vector<double> b{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
        const AffineOf affine_phi(phi, a, b);
        const double plain = structural_loss(x, phi).loss;
        const double mapped = structural_loss(x, affine_phi).loss;
        CHECK(std::fabs(plain - mapped) < 1e-5);
    }
}

TEST_CASE("structural gradient: finite differences and descent") {
    Rng rng(217);
    const UnsharpRestorer phi(0.8, 1.0);
    const Image x = fixtures::random_image(rng, 8, 8, 3);
    const InjectionResult inj = structural_loss(x, phi);

    CHECK(max_abs_diff(structural_grad(inj.target, inj.target), Image(8, 8, 3, 0.0)) == 0.0);

    const Image fd = fixtures::fd_gradient(
        [&](const Image& v) {
            double acc = 0.0;
            for (std::size_t i = 0; i < v.data().size(); ++i) {
                const double d = v.data()[i] - inj.target.data()[i];
                acc += d * d;
            }
            return acc / v.element_count();
        },
        x);
    CHECK(fixtures::max_rel_err(structural_grad(x, inj.target), fd) < 1e-6);

    // A small step along -grad lowers the frozen-target loss.
    const Image step = add_scaled(x, structural_grad(x, inj.target), -1e-2);
    double before = inj.loss, after = 0.0;
    for (std::size_t i = 0; i < step.data().size(); ++i) {
        const double d = step.data()[i] - inj.target.data()[i];
        after += d * d;
    }
    after /= step.element_count();
    CHECK(after < before);
}

TEST_CASE("unsharp restorer on a blurred image raises sharpness and the loss responds") {
    const Image face = fixtures::synthetic_face(21, 24);
    const Image blurred = gaussian_blur(face, 1.5);
    const UnsharpRestorer phi(1.0, 1.0);

    // Constant and amount-0 cases.
    const Image constant(8, 8, 3, 0.4);
    CHECK(max_abs_diff(phi.restore(constant), constant) < 1e-9);
    const UnsharpRestorer no_op(0.0, 1.0);
    Rng rng(219);
    const Image any = fixtures::random_image(rng, 6, 6, 3, 0.1, 0.9);
    CHECK(max_abs_diff(no_op.restore(any), any) < 1e-12);

    // Sharpening raises Laplacian variance on a blurred edge image.
    CHECK(laplacian_variance(phi.restore(blurred), 0.0) > laplacian_variance(blurred, 0.0));

    // Loss positive on the blurred input; a 1e-2 step along the descent
    // direction shrinks the distance to the aligned target.
    const InjectionResult inj = structural_loss(blurred, phi);
    CHECK(inj.loss > 0.0);
    Image stepped = blurred;
    for (std::size_t i = 0; i < stepped.data().size(); ++i) {
        stepped.data()[i] += 1e-2 * (inj.target.data()[i] - blurred.data()[i]);
    }
    double after = 0.0;
    for (std::size_t i = 0; i < stepped.data().size(); ++i) {
        const double d = stepped.data()[i] - inj.target.data()[i];
        after += d * d;
    }
    after /= stepped.element_count();
    CHECK(after < inj.loss);

    CHECK_THROWS_AS(UnsharpRestorer(-0.1, 1.0), InvalidInputError);
    CHECK_THROWS_AS(UnsharpRestorer(1.0, 0.0), InvalidInputError);
}

TEST_CASE("mse injection gradient passes finite differences") {
    Rng rng(223);
    const UnsharpRestorer phi(0.8, 1.0);
    const Image x = fixtures::random_image(rng, 8, 8, 3);
    const InjectionResult inj = mse_injection_loss(x, phi);
    const Image fd = fixtures::fd_gradient(
        [&](const Image& v) {
            double acc = 0.0;
            for (std::size_t i = 0; i < v.data().size(); ++i) {
                const double d = v.data()[i] - inj.target.data()[i];
                acc += d * d;
            }
            return acc / v.element_count();
        },
        x);
    CHECK(fixtures::max_rel_err(structural_grad(x, inj.target), fd) < 1e-6);
}

TEST_CASE("restorer registry") {
    CHECK(make_restorer("identity", 0.0, 1.0) != nullptr);
    CHECK(make_restorer("unsharp", 1.0, 1.0) != nullptr);
    CHECK_THROWS_AS(make_restorer("external", 0.0, 1.0), InvalidInputError);
    CHECK_THROWS_AS(make_restorer("bogus", 0.0, 1.0), InvalidInputError);
}
