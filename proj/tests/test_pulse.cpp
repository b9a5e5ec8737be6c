#include <doctest.h>

#include <cmath>

#include "kerr/error.hpp"
#include "kerr/grid.hpp"
#include "kerr/pulse.hpp"

using namespace kerr;

namespace {

PulseTrain standard()
{
    PulseTrain p;
    p.omega = 6.0;
    p.width_T = 0.4;
    p.period_tau = 5.5;
    p.t0 = 2.0;
    return p;
}

} // namespace

TEST_CASE("envelope values")
{
    auto single = standard();
    single.count = 1;
    CHECK(envelope(single, 2.0) == 1.0);
    CHECK(envelope(single, 2.4) == doctest::Approx(std::exp(-1.0)));

    const auto train = standard();
    CHECK(envelope(train, 7.5) == doctest::Approx(1.0).epsilon(1e-15));

    const double mid = 2.0 + 2.75;
    const double want = 2.0 * std::exp(-std::pow(2.75 / 0.4, 2));
    CHECK(want < 1e-20);
    CHECK(want > 1e-21);
    CHECK(envelope(train, mid) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("envelope bounds and periodicity")
{
    const auto train = standard();
    for (double t = 2.0 + 8 * 0.4 + 1e-3; t < 40.0; t += 0.0137)
        CHECK(std::abs(envelope(train, t + 5.5) - envelope(train, t)) < 1e-12);

    auto overlapping = standard();
    overlapping.width_T = 2.0;
    overlapping.period_tau = 1.0;
    overlapping.count = 4;
    const double bound = envelope_bound(overlapping);
    CHECK(bound <= 4.0);
    for (double t = -5.0; t < 15.0; t += 0.01) {
        const double f = envelope(overlapping, t);
        CHECK(f >= 0.0);
        CHECK(f <= bound + 1e-12);
        CHECK(f <= 4.0);
    }
    CHECK(envelope_bound(standard()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cutoff error is below the dropped-term bound")
{
    auto train = standard();
    train.count = 3;
    for (double t = 0.0; t < 16.0; t += 0.05) {
        double full = 0.0;
        for (int n = 0; n < 3; ++n) full += std::exp(-std::pow((t - 2.0 - 5.5 * n) / 0.4, 2));
        CHECK(std::abs(envelope(train, t) - full) <= 3.0 * std::exp(-64.0));
    }
}

TEST_CASE("pulse count and validation")
{
    CHECK(window_spanning_count(22.0, 5.5) == 5);
    CHECK(window_spanning_count(16.0, 4.0) == 5);
    CHECK(window_spanning_count(1.0, 5.5) == 2);

    auto train = standard();
    train.count = 2;
    CHECK(train.pulses_within(22.0) == 2);
    train.count.reset();
    CHECK(train.pulses_within(22.0) == 4); // centers 2, 7.5, 13, 18.5

    train.width_T = 0.0;
    CHECK_THROWS_AS(train.validate(), InvalidParameter);
    train = standard();
    train.period_tau = -1.0;
    CHECK_THROWS_AS(train.validate(), InvalidParameter);
    train = standard();
    train.count = 0;
    CHECK_THROWS_AS(train.validate(), InvalidParameter);
}

TEST_CASE("resonance detuning")
{
    CHECK(resonance_detuning(1, 15.0) == 0.0);
    CHECK(!std::signbit(resonance_detuning(1, 15.0)));
    CHECK(resonance_detuning(2, 30.0) == -30.0);
    CHECK(resonance_detuning(3, 30.0) == -60.0);
    CHECK_THROWS_AS(resonance_detuning(0, 1.0), InvalidParameter);
}

TEST_CASE("selectivity diagnostics")
{
    SystemParams p;
    p.chi = 15;
    auto train = standard();
    auto rep = validate_selectivity(train, p);
    CHECK(rep.ok());
    CHECK(rep.shorter_than_lifetime);
    CHECK(rep.spectrally_resolved);
    CHECK(rep.separated);

    train.width_T = 0.05;
    rep = validate_selectivity(train, p);
    CHECK_FALSE(rep.spectrally_resolved);
    CHECK(rep.shorter_than_lifetime);
    CHECK(rep.warnings.size() == 1);

    train.width_T = 2.0;
    rep = validate_selectivity(train, p);
    CHECK_FALSE(rep.shorter_than_lifetime);
    CHECK(rep.spectrally_resolved);

    train = standard();
    train.period_tau = 0.5;
    CHECK_FALSE(validate_selectivity(train, p).separated);
}

TEST_CASE("time grid")
{
    const auto g = make_grid(22.0, 0.01, 1e-3);
    CHECK(g.intervals == 2200);
    CHECK(g.substeps == 10);
    CHECK(g.step() <= 1e-3 * (1 + 1e-12));
    CHECK(g.time(g.intervals) == 22.0);
    CHECK(g.samples() == 2201);

    const auto h = make_grid(1.0, 0.3, 0.07);
    CHECK(h.step() <= 0.07);
    CHECK(h.sample_interval() <= 0.3);
    CHECK(h.time(h.intervals) == 1.0);

    CHECK_THROWS_AS(make_grid(1.0, 0.1, 1e-10), StepUnderflow);
}
