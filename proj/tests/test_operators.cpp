#include <cmath>

#include "doctest.h"

#include "fixtures.hpp"
#include "jdac/corruption.hpp"
#include "jdac/error.hpp"
#include "jdac/metrics.hpp"
#include "jdac/operators.hpp"
#include "oracles.hpp"

using namespace jdac;

namespace {

const Dims k64{64, 64, 64};

// Returns a fixed volume regardless of input.
class FixedDenoiser final : public Denoiser {
public:
    explicit FixedDenoiser(Volume raw) : raw_(std::move(raw)) {}
    std::string name() const override { return "fixed"; }
    Volume raw_predict(const Volume&, double) const override { return raw_; }

private:
    Volume raw_;
};

class CountingDenoiser final : public Denoiser {
public:
    mutable int calls = 0;
    std::string name() const override { return "counting"; }
    Volume raw_predict(const Volume& x, double) const override {
        ++calls;
        return x.like(1.0);
    }
};

class ShrinkingCorrector final : public Corrector {
public:
    std::string name() const override { return "shrinking"; }
    Volume correct(const Volume&) const override { return Volume(Dims{3, 3, 3}); }
};

} // namespace

TEST_CASE("denoise_with") {
    const Volume x = make_phantom(Dims{32, 32, 32}, PhantomKind::Ellipsoids, 1);
    SUBCASE("zero sigma skips the plugin") {
        CountingDenoiser d;
        CHECK(test::bit_identical(denoise_with(d, x, 0.0), x));
        CHECK(d.calls == 0);
    }
    SUBCASE("zero prediction") {
        CHECK(test::bit_identical(denoise_with(IdentityDenoiser{}, x, 0.2), x));
        CHECK(test::bit_identical(denoise_with(*identity_denoiser(), x, 0.05), x));
    }
    SUBCASE("oracle prediction inverts the noise") {
        const double sigma = 0.1;
        const Volume xi = test::gaussian_volume(x.dims(), sigma, 4);
        const Volume y = x + xi;
        const FixedDenoiser oracle((1.0 / (sigma * sigma)) * xi);
        CHECK(test::max_abs_diff(denoise_with(oracle, y, sigma), x) <= 1e-9);
    }
    SUBCASE("linear in the raw output") {
        const Volume raw = test::uniform_volume(x.dims(), 8, -1.0, 1.0);
        const Volume once = x - denoise_with(FixedDenoiser(raw), x, 0.3);
        const Volume twice = x - denoise_with(FixedDenoiser(2.0 * raw), x, 0.3);
        CHECK(test::max_abs_diff(2.0 * once, twice) <= 1e-12);
    }
    SUBCASE("contract violations") {
        CHECK_THROWS_AS(denoise_with(FixedDenoiser(Volume(Dims{4, 4, 4})), x, 0.1), OperatorContractViolation);
        CHECK_THROWS_AS(correct_with(ShrinkingCorrector{}, x), OperatorContractViolation);
        CHECK_THROWS_AS(denoise_with(IdentityDenoiser{}, x, -0.1), InvalidArgument);
        CHECK_THROWS_AS(denoise_with(IdentityDenoiser{}, x, std::nan("")), InvalidArgument);
    }
}

TEST_CASE("identity corrector") {
    const Volume x = test::uniform_volume(Dims{9, 9, 9}, 2);
    CHECK(test::bit_identical(identity_corrector()->correct(x), x));
    CHECK(test::bit_identical(correct_with(IdentityCorrector{}, x), x));
}

TEST_CASE("gaussian denoiser") {
    const GaussianDenoiser g;
    SUBCASE("constants are fixed points") {
        const Volume c(Dims{20, 20, 20}, {}, 0.4);
        CHECK(test::max_abs_diff(denoise_with(g, c, 0.1), c) <= 1e-12);
    }
    SUBCASE("output equals the smoothed input") {
        const Volume v = test::uniform_volume(Dims{16, 16, 16}, 3);
        CHECK(test::max_abs_diff(denoise_with(g, v, 0.07), g.smooth(v, 0.07)) <= 1e-12);
    }
    SUBCASE("reduces error on a noisy phantom") {
        const Volume clean = make_phantom(k64, PhantomKind::Ellipsoids, 6);
        const Volume noisy = add_gaussian(clean, 0.10, 6);
        CHECK(rmse(denoise_with(g, noisy, 0.10), clean) < rmse(noisy, clean));
    }
    SUBCASE("kernel width follows sigma") {
        CHECK(g.kernel_std(0.30) / g.kernel_std(0.05) == doctest::Approx(6.0).epsilon(1e-15));
        const GaussianDenoiser unit(1.0);
        CHECK(unit.kernel_std(0.30) / unit.kernel_std(0.05) == doctest::Approx(6.0).epsilon(1e-15));
        CHECK(unit.kernel_std(0.001) == 0.01);
    }
    SUBCASE("larger sigma never adds total variation") {
        for (auto kind : {PhantomKind::Ellipsoids, PhantomKind::CheckerSmooth}) {
            const Volume noisy = add_gaussian(make_phantom(Dims{32, 32, 32}, kind, 2), 0.08, 2);
            double previous = oracle::total_variation(noisy);
            for (double sigma : {0.02, 0.05, 0.1, 0.2, 0.3}) {
                const double tv = oracle::total_variation(denoise_with(g, noisy, sigma));
                CHECK(tv <= previous);
                previous = tv;
            }
        }
    }
    CHECK_THROWS_AS(GaussianDenoiser(0.0), InvalidArgument);
    CHECK(g.name() == "gauss:10");
    CHECK(GaussianDenoiser(2.5).name() == "gauss:2.5");
}

TEST_CASE("spike notch corrector") {
    const SpikeNotchCorrector notch;
    const Volume clean = make_phantom(k64, PhantomKind::Ellipsoids, 3);
    SUBCASE("clean input passes through") {
        CHECK(rmse(notch.correct(clean), clean) < 1e-3);
        for (auto kind : {PhantomKind::CheckerSmooth, PhantomKind::SheppLogan}) {
            const Volume v = make_phantom(k64, kind, 1);
            CHECK(rmse(notch.correct(v), v) < 1e-3);
        }
    }
    SUBCASE("removes an injected spike") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const Volume spiked = apply_spike(clean, SpikeParams{}, seed);
            const double before = rmse(spiked, clean);
            const double after = rmse(notch.correct(spiked), clean);
            CHECK(after * 10.0 <= before);
        }
    }
    SUBCASE("idempotent") {
        const Volume once = notch.correct(apply_spike(clean, SpikeParams{}, 2));
        CHECK(test::max_abs_diff(notch.correct(once), once) <= 1e-6);
    }
    SUBCASE("real input stays real and dims are kept") {
        const Volume odd = make_phantom(Dims{33, 35, 32}, PhantomKind::Ellipsoids, 1);
        const Volume out = correct_with(notch, apply_spike(odd, SpikeParams{}, 1));
        CHECK(out.dims() == odd.dims());
    }
    CHECK_THROWS_AS(SpikeNotchCorrector(2.0), InvalidArgument);
    CHECK(notch.name() == "spike-notch:8");
}

TEST_CASE("losses") {
    const Dims d{8, 8, 8};
    const auto [a, b] = test::lcg_pair(d, 31, 32);
    SUBCASE("noise and image losses") {
        CHECK(loss_noise(a, a) == 0.0);
        CHECK(loss_noise(a + 0.1, a) == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(std::abs(loss_noise(a, b) - oracle::l1_mean(a, b)) <= 1e-12);
        CHECK(loss_motion(a, a) == 0.0);
        CHECK(loss_motion(a, a + 0.25) == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(std::abs(loss_motion(a, b) - oracle::l1_mean(a, b)) <= 1e-12);
    }
    SUBCASE("gradient loss") {
        CHECK(loss_gradient(a, a) == 0.0);
        CHECK(loss_gradient(a, a + 0.3) <= 1e-15);
        CHECK(std::abs(loss_gradient(a, b) - oracle::gradient_l1_mean(a, b)) <= 1e-12);
        CHECK_THROWS_AS(loss_gradient(Volume(Dims{2, 8, 8}), Volume(Dims{2, 8, 8})), DimensionTooSmall);
    }
    SUBCASE("total") {
        const LossReport same = loss_total(a, a);
        CHECK(same.l_a == 0.0);
        const LossReport offset = loss_total(a, a + 0.2);
        CHECK(offset.l_m == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(offset.l_g <= 1e-15);
        CHECK(offset.l_a == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(offset.l_n == 0.0);
        const LossReport r = loss_total(a, b);
        CHECK(r.l_a == r.l_m + r.l_g);
        CHECK(std::abs(r.l_a - (loss_motion(a, b) + loss_gradient(a, b))) <= 1e-12);
        const LossReport full = loss_total(a, b, b, a);
        CHECK(full.l_n == loss_noise(b, a));
    }
    SUBCASE("symmetric and positive") {
        CHECK(loss_noise(a, b) == loss_noise(b, a));
        CHECK(loss_motion(a, b) == loss_motion(b, a));
        CHECK(loss_gradient(a, b) == loss_gradient(b, a));
        CHECK(loss_motion(a, b) > 0.0);
        CHECK(loss_gradient(a, b) > 0.0);
    }
    CHECK_THROWS_AS(loss_motion(a, Volume(Dims{8, 8, 9})), DimensionMismatch);
    CHECK_THROWS_AS(loss_total(a, Volume(Dims{8, 8, 9})), DimensionMismatch);
}
