#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "simenh/common/error.hpp"
#include "simenh/common/rng.hpp"
#include "simenh/signal/ops.hpp"
#include "simenh/signal/time_series.hpp"

using namespace simenh;
using namespace simenh::signal;

namespace {

constexpr double kPi = 3.14159265358979323846;

TimeSeries random_series(Rng& rng, int n, double lo = -2.0, double hi = 2.0) {
    std::vector<double> values(static_cast<std::size_t>(n));
    for (double& v : values) v = rng.uniform(lo, hi);
    return TimeSeries{0, 1'000'000'000, std::move(values)};
}

}  // namespace

TEST_CASE("time series carries integer-nanosecond timestamps") {
    const TimeSeries s = TimeSeries::from_seconds(10.0, 0.5, {1.0, 2.0, 3.0});
    CHECK(s.start_time_ns == 10'000'000'000);
    CHECK(s.sample_interval_ns == 500'000'000);
    CHECK(s.timestamp_ns(2) == 11'000'000'000);
    CHECK(s.interval_seconds() == doctest::Approx(0.5));

    CHECK_THROWS_AS(TimeSeries::from_seconds(0.0, 0.0, {1.0}), ValidationError);
    CHECK_THROWS_AS(TimeSeries::from_seconds(0.0, -1.0, {1.0}), ValidationError);
    TimeSeries empty{0, 1'000'000'000, {}};
    CHECK_THROWS_AS(empty.validate(), ValidationError);
}

TEST_CASE("synthesize evaluates the component sum") {
    SUBCASE("zero amplitude gives the flat offset") {
        SignalSpec spec;
        spec.components = {{4.0, 0.0, 0.0}};
        spec.offset = 0.25;
        spec.num_samples = 10;
        const TimeSeries s = synthesize(spec);
        REQUIRE(s.size() == 10);
        for (double v : s.values) CHECK(v == doctest::Approx(0.25));
    }

    SUBCASE("quarter period of a unit sine is 1") {
        SignalSpec spec;
        spec.components = {{4.0, 1.0, 0.0}};
        spec.num_samples = 5;
        const TimeSeries s = synthesize(spec);
        CHECK(s.values[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(s.values[1] == doctest::Approx(1.0));
        CHECK(s.values[3] == doctest::Approx(-1.0));
    }

    SUBCASE("phase shifts the waveform") {
        SignalSpec spec;
        spec.components = {{4.0, 1.0, kPi / 2.0}};
        spec.num_samples = 1;
        CHECK(synthesize(spec).values[0] == doctest::Approx(1.0));
    }

    SUBCASE("component synthesis is additive") {
        SignalSpec both;
        both.components = {{480.0, 1.0, 0.0}, {120.0, 0.35, 0.3}};
        both.num_samples = 600;
        SignalSpec first = both, second = both;
        first.components = {both.components[0]};
        second.components = {both.components[1]};
        const TimeSeries a = synthesize(first);
        const TimeSeries b = synthesize(second);
        const TimeSeries sum = synthesize(both);
        for (std::size_t i = 0; i < sum.size(); ++i)
            CHECK(std::abs(sum.values[i] - (a.values[i] + b.values[i])) < 1e-12);
    }

    SUBCASE("mean over a full fundamental period stays at the offset") {
        SignalSpec spec;
        spec.components = {{480.0, 1.0, 0.0}, {120.0, 0.35, 0.0}};
        spec.offset = 0.5;
        spec.num_samples = 480;
        const TimeSeries s = synthesize(spec);
        CHECK(mean(s.values) == doctest::Approx(0.5).epsilon(1e-9));
    }

    SUBCASE("invalid specs are rejected") {
        SignalSpec bad;
        bad.components = {{0.0, 1.0, 0.0}};
        bad.num_samples = 4;
        CHECK_THROWS_AS(synthesize(bad), ValidationError);
        SignalSpec none;
        none.components = {{4.0, 1.0, 0.0}};
        none.num_samples = 0;
        CHECK_THROWS_AS(synthesize(none), ValidationError);
        SignalSpec interval;
        interval.components = {{4.0, 1.0, 0.0}};
        interval.num_samples = 4;
        interval.sample_interval_s = 0.0;
        CHECK_THROWS_AS(synthesize(interval), ValidationError);
    }
}

TEST_CASE("add_gaussian_noise is seeded and zero-mean at scale") {
    SignalSpec spec;
    spec.components = {{480.0, 1.0, 0.0}};
    spec.num_samples = 4000;
    const TimeSeries clean = synthesize(spec);

    const TimeSeries a = add_gaussian_noise(clean, 0.05, 7);
    const TimeSeries b = add_gaussian_noise(clean, 0.05, 7);
    const TimeSeries c = add_gaussian_noise(clean, 0.05, 8);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);

    std::vector<double> residual(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) residual[i] = a.values[i] - clean.values[i];
    CHECK(std::abs(mean(residual)) < 0.01);
    CHECK(stddev(residual) == doctest::Approx(0.05).epsilon(0.15));

    const TimeSeries zero = add_gaussian_noise(clean, 0.0, 7);
    CHECK(zero.values == clean.values);
}

TEST_CASE("quantize snaps to the level alphabet") {
    QuantizerSpec q;
    q.levels = 9;
    q.min_value = -1.0;
    q.max_value = 1.0;  // step 0.25

    SUBCASE("nearest level wins") {
        TimeSeries s{0, 1'000'000'000, {0.37, -0.37, 0.12, 0.13}};
        const TimeSeries out = quantize(s, q);
        CHECK(out.values[0] == 0.25);   // 0.37 is closer to 0.25 than to 0.5
        CHECK(out.values[1] == -0.25);
        CHECK(out.values[2] == 0.0);    // 0.12 -> 0.0
        CHECK(out.values[3] == 0.25);   // 0.13 -> 0.25
    }

    SUBCASE("values already on the grid are fixed points") {
        TimeSeries s{0, 1'000'000'000, {-1.0, -0.75, 0.0, 0.25, 1.0}};
        const TimeSeries out = quantize(s, q);
        CHECK(out.values == s.values);
    }

    SUBCASE("quantize is idempotent") {
        Rng rng(3);
        TimeSeries s = random_series(rng, 257, -1.5, 1.5);
        const TimeSeries once = quantize(s, q);
        const TimeSeries twice = quantize(once, q);
        CHECK(once.values == twice.values);
    }

    SUBCASE("every output belongs to the alphabet") {
        Rng rng(4);
        TimeSeries s = random_series(rng, 500, -3.0, 3.0);
        const TimeSeries out = quantize(s, q);
        const double step = 0.25;
        for (double v : out.values) {
            const double idx = (v - q.min_value) / step;
            CHECK(std::abs(idx - std::round(idx)) < 1e-9);
            CHECK(v >= q.min_value);
            CHECK(v <= q.max_value);
        }
    }

    SUBCASE("out-of-range samples clamp to the end levels") {
        TimeSeries s{0, 1'000'000'000, {-9.0, 9.0}};
        const TimeSeries out = quantize(s, q);
        CHECK(out.values[0] == -1.0);
        CHECK(out.values[1] == 1.0);
    }

    SUBCASE("midpoints round away from zero, zero midpoint goes positive") {
        QuantizerSpec q2;
        q2.levels = 3;
        q2.min_value = -1.0;
        q2.max_value = 1.0;  // levels {-1, 0, 1}
        TimeSeries s{0, 1'000'000'000, {0.5, -0.5}};
        const TimeSeries out = quantize(s, q2);
        CHECK(out.values[0] == 1.0);
        CHECK(out.values[1] == -1.0);

        QuantizerSpec q3;
        q3.levels = 2;
        q3.min_value = -1.0;
        q3.max_value = 1.0;  // midpoint 0 is equidistant; positive level wins
        TimeSeries z{0, 1'000'000'000, {0.0}};
        CHECK(quantize(z, q3).values[0] == 1.0);
    }

    SUBCASE("two-level quantization of a sine is the sign square wave") {
        SignalSpec spec;
        spec.components = {{120.0, 1.0, 0.0}};
        spec.num_samples = 600;
        const TimeSeries sine = synthesize(spec);
        QuantizerSpec q2;
        q2.levels = 2;
        q2.min_value = -1.0;
        q2.max_value = 1.0;
        const TimeSeries sq = quantize(sine, q2);
        for (std::size_t i = 0; i < sq.size(); ++i) {
            if (sine.values[i] == 0.0) continue;  // exact crossings excepted
            CHECK(sq.values[i] == (sine.values[i] > 0.0 ? 1.0 : -1.0));
        }
    }

    SUBCASE("invalid specs are rejected") {
        QuantizerSpec bad;
        bad.levels = 1;
        CHECK_THROWS_AS(quantize(TimeSeries{0, 1, {1.0}}, bad), ValidationError);
        QuantizerSpec inverted;
        inverted.levels = 4;
        inverted.min_value = 1.0;
        inverted.max_value = -1.0;
        CHECK_THROWS_AS(quantize(TimeSeries{0, 1, {1.0}}, inverted), ValidationError);
    }
}

TEST_CASE("moving average keeps the center and clips at the edges") {
    TimeSeries s{0, 1'000'000'000, {1, 2, 3, 4, 5}};

    SUBCASE("window 3 worked example") {
        const TimeSeries out = moving_average(s, 3);
        const std::vector<double> expected = {1.5, 2.0, 3.0, 4.0, 4.5};
        REQUIRE(out.size() == 5);
        for (std::size_t i = 0; i < 5; ++i) CHECK(out.values[i] == doctest::Approx(expected[i]));
    }

    SUBCASE("window 1 is the identity") {
        CHECK(moving_average(s, 1).values == s.values);
    }

    SUBCASE("constants stay constant") {
        TimeSeries c{0, 1'000'000'000, std::vector<double>(37, 2.5)};
        for (int w : {1, 3, 11, 37}) {
            const TimeSeries out = moving_average(c, w);
            for (double v : out.values) CHECK(v == doctest::Approx(2.5));
        }
    }

    SUBCASE("interior outputs are shift-equivariant") {
        Rng rng(5);
        TimeSeries x = random_series(rng, 64);
        TimeSeries shifted = x;
        shifted.values.insert(shifted.values.begin(), rng.uniform(-1.0, 1.0));
        shifted.values.pop_back();
        const TimeSeries mx = moving_average(x, 7);
        const TimeSeries ms = moving_average(shifted, 7);
        for (std::size_t i = 4; i + 4 < x.size(); ++i)
            CHECK(ms.values[i + 1] == doctest::Approx(mx.values[i]).epsilon(1e-12));
    }

    SUBCASE("invalid windows are rejected") {
        CHECK_THROWS_AS(moving_average(s, 2), ValidationError);
        CHECK_THROWS_AS(moving_average(s, -1), ValidationError);
        CHECK_THROWS_AS(moving_average(s, 7), ValidationError);  // exceeds length
    }
}

TEST_CASE("extract_noise decomposes exactly") {
    SUBCASE("constant input leaves zero noise") {
        TimeSeries c{0, 1'000'000'000, std::vector<double>(20, 1.25)};
        const Decomposition d = extract_noise(c, 5);
        for (double v : d.noise.values) CHECK(std::abs(v) < 1e-15);
    }

    SUBCASE("trend plus noise reconstructs the series") {
        Rng rng(6);
        for (int rep = 0; rep < 20; ++rep) {
            const int n = 5 + static_cast<int>(rng.uniform_int(200));
            TimeSeries s = random_series(rng, n);
            const int max_half = (n - 1) / 2;
            const int window = 1 + 2 * static_cast<int>(rng.uniform_int(
                                        static_cast<std::uint64_t>(max_half) + 1));
            const Decomposition d = extract_noise(s, window);
            REQUIRE(d.trend.size() == s.size());
            for (std::size_t i = 0; i < s.size(); ++i)
                CHECK(std::abs(d.trend.values[i] + d.noise.values[i] - s.values[i]) < 1e-12);
        }
    }

    SUBCASE("extracted noise scale tracks the injected noise") {
        SignalSpec spec;
        spec.components = {{480.0, 1.0, 0.0}};
        spec.num_samples = 4000;
        const TimeSeries noisy = add_gaussian_noise(synthesize(spec), 0.05, 11);
        const Decomposition d = extract_noise(noisy, 11);
        const double sd = stddev(d.noise.values);
        CHECK(sd > 0.03);
        CHECK(sd < 0.07);
    }
}

TEST_CASE("window_random_offset draws an in-range deterministic slice") {
    Rng rng(8);
    TimeSeries s = random_series(rng, 40);

    const std::vector<double> w1 = window_random_offset(s, 10, 99);
    const std::vector<double> w2 = window_random_offset(s, 10, 99);
    CHECK(w1.size() == 10);
    CHECK(w1 == w2);

    // Full-length window is forced to offset 0.
    const std::vector<double> full = window_random_offset(s, 40, 5);
    CHECK(full == s.values);

    CHECK_THROWS_AS(window_random_offset(s, 41, 1), ValidationError);

    // Different seeds reach different offsets and all slices match the source.
    std::set<std::size_t> offsets;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::vector<double> w = window_random_offset(s, 10, seed);
        bool matched = false;
        for (std::size_t off = 0; off + 10 <= s.size(); ++off) {
            if (std::equal(w.begin(), w.end(), s.values.begin() + static_cast<long>(off))) {
                offsets.insert(off);
                matched = true;
                break;
            }
        }
        CHECK(matched);
    }
    CHECK(offsets.size() >= 2);
    CHECK(*offsets.rbegin() <= 30);
}

TEST_CASE("window_at slices values and shifts the start time") {
    TimeSeries s{1'000'000'000, 500'000'000, {0, 1, 2, 3, 4, 5}};
    const TimeSeries w = window_at(s, 2, 3);
    CHECK(w.values == std::vector<double>{2, 3, 4});
    CHECK(w.start_time_ns == 2'000'000'000);
    CHECK(w.sample_interval_ns == 500'000'000);
    CHECK_THROWS_AS(window_at(s, 4, 3), ValidationError);
}

TEST_CASE("normalization maps the span onto the target range") {
    SUBCASE("worked example") {
        const std::vector<double> v = {0.0, 5.0, 10.0};
        const NormParams p = fit_norm_params(v, -1.0, 1.0);
        const std::vector<double> out = normalize(v, p);
        CHECK(out[0] == doctest::Approx(-1.0));
        CHECK(out[1] == doctest::Approx(0.0));
        CHECK(out[2] == doctest::Approx(1.0));
    }

    SUBCASE("round-trip is exact to 1e-12") {
        Rng rng(9);
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<double> v(100);
            for (double& x : v) x = rng.uniform(-50.0, 50.0);
            const NormParams p = fit_norm_params(v, -1.0, 1.0);
            const std::vector<double> back = denormalize(normalize(v, p), p);
            for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(back[i] - v[i]) < 1e-12);
        }
    }

    SUBCASE("constant series maps to the midpoint and is flagged") {
        const std::vector<double> v(5, 3.0);
        const NormParams p = fit_norm_params(v, -1.0, 1.0);
        CHECK(p.degenerate);
        const std::vector<double> out = normalize(v, p);
        for (double x : out) CHECK(x == doctest::Approx(0.0));
        const std::vector<double> back = denormalize(out, p);
        for (double x : back) CHECK(x == doctest::Approx(3.0));
    }

    SUBCASE("two-span fit covers the union") {
        const std::vector<double> a = {0.0, 1.0};
        const std::vector<double> b = {-3.0, 5.0};
        const NormParams p = fit_norm_params(a, b, -1.0, 1.0);
        CHECK(p.src_min == -3.0);
        CHECK(p.src_max == 5.0);
        CHECK(p.apply(-3.0) == doctest::Approx(-1.0));
        CHECK(p.apply(5.0) == doctest::Approx(1.0));
    }

    SUBCASE("series overload returns matching params") {
        TimeSeries s{0, 1'000'000'000, {2.0, 4.0}};
        const auto [out, p] = normalize(s, 0.0, 1.0);
        CHECK(out.values[0] == doctest::Approx(0.0));
        CHECK(out.values[1] == doctest::Approx(1.0));
        const TimeSeries back = denormalize(out, p);
        CHECK(back.values[0] == doctest::Approx(2.0));
        CHECK(back.start_time_ns == s.start_time_ns);
    }

    SUBCASE("inverted target range is rejected") {
        const std::vector<double> v = {0.0, 1.0};
        CHECK_THROWS_AS(fit_norm_params(v, 1.0, -1.0), ValidationError);
    }
}

TEST_CASE("mean and stddev use the population form") {
    const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
    CHECK(mean(v) == doctest::Approx(2.5));
    CHECK(stddev(v) == doctest::Approx(std::sqrt(1.25)));
}
