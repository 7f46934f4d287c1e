#include "iqpe/refine.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"

namespace iqpe {
namespace {

const double kHubbardTop = (1.0 + std::sqrt(17.0)) / 2.0;
const double kHubbardPhase = kHubbardTop / (2.0 * std::numbers::pi);

DistributionSource phase_source(double phase, int n_ancilla) {
    return [=](std::uint64_t alpha) {
        return analytic_distribution_for_phase(std::fmod(static_cast<double>(alpha) * phase, 1.0), n_ancilla);
    };
}

RefinementOptions exact_options(double eps_max, double beta = 1.0) {
    RefinementOptions o;
    o.eps_max = eps_max;
    o.beta = beta;
    return o;
}

TEST(OptimalAlpha, TableValues) {
    for (int n_ancilla = 1; n_ancilla <= 12; ++n_ancilla) EXPECT_EQ(optimal_alpha(0, n_ancilla), 1u);
    EXPECT_EQ(optimal_alpha(2, 3), 49u);
    EXPECT_EQ(optimal_alpha(3, 2), 27u);
    EXPECT_EQ(optimal_alpha(4, 4), 50625u);
    EXPECT_EQ(optimal_alpha(40, 2), 12157665459056928801ull);  // 3^40 still fits
    EXPECT_THROW(optimal_alpha(41, 2), Error);
    EXPECT_THROW(optimal_alpha(6, 12), Error);
    EXPECT_THROW(optimal_alpha(-1, 3), Error);
}

TEST(ErrorBound, Values) {
    EXPECT_DOUBLE_EQ(error_bound(1, 3, 0), 1.0 / 8.0);
    EXPECT_DOUBLE_EQ(error_bound(1, 3, 2), 1.0 / 392.0);
    EXPECT_DOUBLE_EQ(error_bound(2, 4, 1), 1.0 / 120.0);
    EXPECT_THROW(error_bound(0, 3, 1), Error);
}

TEST(PhaseInterval, CyclicMembership) {
    const auto p = PhaseInterval::make(0.99, 0.02);
    EXPECT_TRUE(p.contains(0.005));
    EXPECT_TRUE(p.contains(0.975));
    EXPECT_FALSE(p.contains(0.5));
    EXPECT_TRUE(p.contains(PhaseInterval::make(1.0, 0.005)));
    EXPECT_FALSE(p.contains(PhaseInterval::make(0.02, 0.02)));
    EXPECT_EQ(PhaseInterval::make(-0.25, 0.1).center, 0.75);
    EXPECT_THROW(PhaseInterval::make(0.5, 0.0), Error);
    EXPECT_THROW(PhaseInterval::make(0.5, 0.6), Error);
}

TEST(Comb, AlphaOneIsTheSingleSlot) {
    const CombFamily comb(2, 2, 1, 1, 2);
    ASSERT_EQ(comb.stripe_count(), 1u);
    const auto s = comb.stripe(0);
    EXPECT_DOUBLE_EQ(s.lo(), 0.375);
    EXPECT_DOUBLE_EQ(s.hi(), 0.625);
}

TEST(Comb, AlphaThreeStripesMatchEnumeration) {
    const CombFamily comb(2, 2, 1, 3, 2);
    const auto ref = oracle::enumerate_stripes(2, 1, 3, 2);
    const double expected_lo[] = {0.125, 0.125 + 1.0 / 3.0, 0.125 + 2.0 / 3.0};
    for (std::uint64_t k = 0; k < 3; ++k) {
        const auto s = comb.stripe(k);
        EXPECT_NEAR(s.lo(), expected_lo[k], 1e-15);
        EXPECT_NEAR(s.lo(), static_cast<double>(ref[k].lo), 1e-15);
        EXPECT_NEAR(s.hi(), static_cast<double>(ref[k].hi), 1e-15);
        EXPECT_NEAR(s.width(), 1.0 / 12.0, 1e-16);
    }
    EXPECT_NEAR(comb.neighbor_gap(), 1.0 / 3.0 - 1.0 / 12.0, 1e-16);
}

TEST(Comb, WidthScalesWithPlateau) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 4;
        const std::size_t slots = std::size_t{1} << n;
        const std::uint64_t alpha = 1 + rng() % 500;
        const std::size_t c = 1 + rng() % 3;
        const std::size_t start = rng() % slots;
        const CombFamily comb(start, start, c, alpha, n);
        EXPECT_NEAR(comb.stripe_width(), static_cast<double>(c) / (static_cast<double>(slots * alpha)), 1e-18);
        const auto ref = oracle::enumerate_stripes(start, c, alpha, n);
        for (std::uint64_t k = 0; k < alpha; k += 1 + alpha / 7) {
            const auto s = comb.stripe(k);
            EXPECT_NEAR(s.lo() - std::floor(s.lo()), static_cast<double>(ref[k].lo), 1e-12);
        }
    }
}

TEST(Intersect, PicksTheStripeInsideTheSlot) {
    const auto prev = CombFamily(2, 2, 1, 1, 2).stripe(0);
    const auto r = intersect(prev, CombFamily(2, 2, 1, 3, 2));
    EXPECT_NEAR(r.lo(), 0.125 + 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.hi(), 0.125 + 1.0 / 3.0 + 1.0 / 12.0, 1e-15);
    EXPECT_NEAR(r.width(), 1.0 / 12.0, 1e-16);
}

TEST(Intersect, ClipsAPartialOverlap) {
    // prev [0.40, 0.50] meets stripe [0.4583, 0.5417] only on [0.4583, 0.50].
    const auto prev = PhaseInterval::make(0.45, 0.05);
    const auto r = intersect(prev, CombFamily(2, 2, 1, 3, 2));
    EXPECT_NEAR(r.lo(), 0.125 + 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.hi(), 0.5, 1e-15);
    EXPECT_TRUE(prev.contains(r, 1e-15));
}

TEST(Intersect, NoOverlapAndFullCircle) {
    const auto prev = PhaseInterval::make(0.3, 0.02);  // falls in the gap after [0.125, 0.2083]
    try {
        intersect(prev, CombFamily(2, 2, 1, 3, 2));
        FAIL() << "expected NoOverlap";
    } catch (const RefinementError& e) {
        EXPECT_EQ(e.kind(), RefinementFailure::NoOverlap);
    }
    EXPECT_THROW(intersect(PhaseInterval::make(0.5, 0.5), CombFamily(2, 2, 1, 3, 2)), Error);
}

TEST(Intersect, AlphaAboveTheBoundIsAmbiguousNearASlotEdge) {
    for (int n = 2; n <= 4; ++n) {
        const std::size_t m = std::size_t{1} << n;
        // Just below the upper edge of slot 1: the first run reports y = 1,
        // the run at alpha = 2^N reports y = 2^N / 2, whose stripe straddles
        // the edge together with its neighbour.
        const double phase = (1.5 - 0.01) / static_cast<double>(m);
        const auto prev = CombFamily(1, 1, 1, 1, n).stripe(0);
        const auto peak = detect_peak_plateau(
            analytic_distribution_for_phase(std::fmod(static_cast<double>(m) * phase, 1.0), n), 1.0);
        EXPECT_EQ(peak.y, m / 2);
        const CombFamily comb = comb_from_outcome(peak, m, n);
        EXPECT_EQ(oracle::count_meeting_stripes(prev.center, prev.half_width,
                                                oracle::enumerate_stripes(peak.plateau_start, 1, m, n), 1e-12L),
                  2);
        try {
            intersect(prev, comb);
            FAIL() << "expected AmbiguousOverlap for N=" << n;
        } catch (const RefinementError& e) {
            EXPECT_EQ(e.kind(), RefinementFailure::AmbiguousOverlap);
        }
    }
}

TEST(Intersect, AgreesWithEnumerationOnRandomInstances) {
    std::mt19937_64 rng(314);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int unique = 0, ambiguous = 0, none = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 2 + trial % 3;
        const std::size_t m = std::size_t{1} << n;
        const std::uint64_t alpha = 1 + rng() % 60;
        const std::size_t start = rng() % m;
        const std::size_t c = 1 + rng() % 2;
        const auto prev = PhaseInterval::make(unit(rng), 0.3 * unit(rng) + 1e-3);
        const CombFamily comb(start, start, c, alpha, n);
        const int count = oracle::count_meeting_stripes(
            prev.center, prev.half_width, oracle::enumerate_stripes(start, c, alpha, n),
            1e-9L * static_cast<long double>(comb.stripe_width()));
        try {
            const auto r = intersect(prev, comb);
            EXPECT_EQ(count, 1);
            EXPECT_TRUE(prev.contains(r, 1e-12));
            ++unique;
        } catch (const RefinementError& e) {
            if (e.kind() == RefinementFailure::NoOverlap) {
                EXPECT_EQ(count, 0);
                ++none;
            } else {
                EXPECT_GE(count, 2);
                ++ambiguous;
            }
        }
    }
    EXPECT_GT(unique, 0);
    EXPECT_GT(ambiguous, 0);
    EXPECT_GT(none, 0);
}

TEST(PhaseToEnergy, ScalesEndpoints) {
    const auto slot = PhaseInterval::make(0.5, 0.125);
    const auto [lo, hi] = phase_to_energy(slot, 1.0);
    EXPECT_NEAR(lo, 2.0 * std::numbers::pi * 0.375, 1e-14);
    EXPECT_NEAR(hi, 2.0 * std::numbers::pi * 0.625, 1e-14);
    EXPECT_NEAR(lo, 2.356, 1e-3);
    EXPECT_NEAR(hi, 3.927, 1e-3);
    const auto [lo2, hi2] = phase_to_energy(slot, 2.0);
    EXPECT_NEAR(hi2 - lo2, 0.5 * (hi - lo), 1e-14);
    EXPECT_THROW(phase_to_energy(slot, 0.0), Error);
}

TEST(RunRefinement, HubbardN3ThreeIterations) {
    const Propagator prop = exact_propagator(build_hubbard({1.0, 1.0}));
    const auto trace = run_refinement(prop, prop.eigenstate(15), {3, 1.0, 1.0}, exact_options(1e-3, 0.8));
    ASSERT_EQ(trace.iterations.size(), 4u);
    const std::uint64_t alphas[] = {1, 7, 49, 343};
    const std::size_t ys[] = {3, 7, 0, 7};
    for (int n = 0; n < 4; ++n) {
        const auto& r = trace.iterations[static_cast<std::size_t>(n)];
        EXPECT_EQ(r.alpha, alphas[n]);
        EXPECT_EQ(r.y, ys[n]);
        EXPECT_EQ(r.c_slots, 1u);
        EXPECT_NEAR(r.epsilon, error_bound(1, 3, n), 1e-15 * error_bound(1, 3, n) * 8);
        EXPECT_TRUE(r.interval.contains(kHubbardPhase));
    }
    EXPECT_NEAR(trace.final_record().epsilon, 1.0 / 2744.0, 1e-18);
    EXPECT_LE(trace.energy_low, kHubbardTop);
    EXPECT_GE(trace.energy_high, kHubbardTop);
    EXPECT_NEAR(trace.energy_high - trace.energy_low, 2.0 * std::numbers::pi / 2744.0, 1e-13);
    EXPECT_NEAR(trace.energy_high - trace.energy_low, 2.29e-3, 1e-5);
}

TEST(RunRefinement, LooseTargetStopsAtTheFirstSlot) {
    const auto trace = run_refinement(phase_source(kHubbardPhase, 3), 3, 1.0, exact_options(0.2));
    ASSERT_EQ(trace.iterations.size(), 1u);
    EXPECT_EQ(trace.iterations[0].alpha, 1u);
    EXPECT_DOUBLE_EQ(trace.iterations[0].epsilon, 0.125);
    const auto exact_target = run_refinement(phase_source(kHubbardPhase, 3), 3, 1.0, exact_options(0.125));
    EXPECT_EQ(exact_target.iterations.size(), 1u);
}

TEST(RunRefinement, WidthLawNestingAndContainmentOnRandomPhases) {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int n_anc = 2 + trial % 3;
        const double phase = unit(rng);
        RefinementOptions o = exact_options(error_bound(1, n_anc, 4) * 1.001);
        o.max_iterations = 4;
        const auto trace = run_refinement(phase_source(phase, n_anc), n_anc, 1.0, o);
        ASSERT_EQ(trace.iterations.size(), 5u);
        for (std::size_t k = 0; k < trace.iterations.size(); ++k) {
            const auto& r = trace.iterations[k];
            const double law = error_bound(1, n_anc, static_cast<int>(k));
            EXPECT_EQ(r.alpha, optimal_alpha(static_cast<int>(k), n_anc));
            EXPECT_NEAR(r.epsilon, law, 4e-16 * law);
            EXPECT_TRUE(r.interval.contains(phase, 1e-15)) << phase << " n=" << k;
            if (k > 0) {
                const auto& prev = trace.iterations[k - 1].interval;
                EXPECT_TRUE(prev.contains(r.interval, 1e-15));
                EXPECT_LT(r.epsilon, trace.iterations[k - 1].epsilon);
            }
        }
    }
}

TEST(RunRefinement, WrapsAroundTheCircle) {
    for (double phase : {0.999, 0.001, 0.0, 0.5}) {
        for (int n_anc : {2, 3, 4}) {
            const auto trace = run_refinement(phase_source(phase, n_anc), n_anc, 1.0, exact_options(1e-5));
            EXPECT_TRUE(trace.final_record().interval.contains(phase, 1e-15)) << phase << ' ' << n_anc;
            EXPECT_LE(trace.final_record().epsilon, 1e-5);
        }
    }
    // Through the circuit, with energies whose phase sits just below 1 and just above 0.
    for (double phase : {0.999, 0.001}) {
        const auto lvl = exact_propagator(single_level(2.0 * std::numbers::pi * phase));
        const auto trace = run_refinement(lvl, lvl.eigenstate(1), {3, 1.0, 1.0}, exact_options(1e-4));
        EXPECT_TRUE(trace.final_record().interval.contains(phase, 1e-12));
    }
}

TEST(RunRefinement, PlateauWidensStripesAndShrinksAlpha) {
    const Propagator prop = exact_propagator(build_hubbard({1.0, 1.0}));
    const auto trace = run_refinement(prop, prop.eigenstate(15), {4, 1.0, 1.0}, exact_options(1e-4, 0.8));
    const auto& first = trace.iterations.front();
    EXPECT_EQ(first.c_slots, 2u);
    EXPECT_EQ(first.plateau_start, 6u);
    EXPECT_NEAR(first.epsilon, 2.0 / 16.0, 1e-16);
    // (2^N - C) / (2^N W) = 14/16 / (1/8) = 7.
    ASSERT_GE(trace.iterations.size(), 2u);
    EXPECT_EQ(trace.iterations[1].alpha, 7u);
    for (std::size_t k = 0; k < trace.iterations.size(); ++k) {
        EXPECT_TRUE(trace.iterations[k].interval.contains(kHubbardPhase, 1e-14)) << k;
        if (k > 0) EXPECT_TRUE(trace.iterations[k - 1].interval.contains(trace.iterations[k].interval, 1e-15));
    }
    EXPECT_LE(trace.final_record().epsilon, 1e-4);
}

TEST(RunRefinement, SampledModeIsSeededAndContainsThePhase) {
    const Propagator prop = exact_propagator(build_hubbard({1.0, 1.0}));
    RefinementOptions o = exact_options(1e-3, 0.8);
    o.mode = SamplingMode::Sampled;
    o.shots = 20000;
    o.seed = 7;
    const auto a = run_refinement(prop, prop.eigenstate(15), {3, 1.0, 1.0}, o);
    const auto b = run_refinement(prop, prop.eigenstate(15), {3, 1.0, 1.0}, o);
    ASSERT_EQ(a.iterations.size(), b.iterations.size());
    for (std::size_t k = 0; k < a.iterations.size(); ++k) {
        EXPECT_EQ(a.iterations[k].y, b.iterations[k].y);
        EXPECT_EQ(a.iterations[k].interval.center, b.iterations[k].interval.center);
    }
    EXPECT_TRUE(a.final_record().interval.contains(kHubbardPhase));
}

TEST(RunRefinement, SampledNoOverlapRetriesThenAborts) {
    // Second iteration always reports a slot inconsistent with the first.
    const DistributionSource liar = [](std::uint64_t alpha) {
        std::vector<double> p(4, 0.0);
        p[alpha == 1 ? 0 : 2] = 1.0;
        return OutcomeDistribution(2, p);
    };
    RefinementOptions o = exact_options(1e-3);
    o.mode = SamplingMode::Sampled;
    o.shots = 10;
    int calls = 0;
    const DistributionSource counted = [&](std::uint64_t alpha) {
        ++calls;
        return liar(alpha);
    };
    try {
        run_refinement(counted, 2, 1.0, o);
        FAIL() << "expected NoOverlap";
    } catch (const RefinementError& e) {
        EXPECT_EQ(e.kind(), RefinementFailure::NoOverlap);
        ASSERT_EQ(e.partial_trace().iterations.size(), 1u);
        EXPECT_EQ(e.partial_trace().iterations[0].alpha, 1u);
    }
    EXPECT_EQ(calls, 2);  // the exact distribution is computed once per iteration

    o.mode = SamplingMode::Exact;
    EXPECT_THROW(run_refinement(liar, 2, 1.0, o), RefinementError);
}

TEST(RunRefinement, IterationCapAndNoProgress) {
    RefinementOptions o = exact_options(1e-12);
    o.max_iterations = 2;
    try {
        run_refinement(phase_source(0.3, 3), 3, 1.0, o);
        FAIL();
    } catch (const RefinementError& e) {
        EXPECT_EQ(e.kind(), RefinementFailure::IterationCap);
        EXPECT_EQ(e.partial_trace().iterations.size(), 3u);
    }
    // One ancilla admits alpha = (2 - 1)^n = 1 forever.
    try {
        run_refinement(phase_source(0.3, 1), 1, 1.0, exact_options(1e-3));
        FAIL();
    } catch (const RefinementError& e) {
        EXPECT_EQ(e.kind(), RefinementFailure::NoProgress);
    }
    // Deep schedules stop at the phase-resolution limit instead of overflowing.
    RefinementOptions deep = exact_options(1e-300);
    deep.max_iterations = 100;
    try {
        run_refinement(phase_source(0.3, 4), 4, 1.0, deep);
        FAIL();
    } catch (const RefinementError& e) {
        EXPECT_EQ(e.kind(), RefinementFailure::PrecisionLimit);
        EXPECT_GE(e.partial_trace().iterations.size(), 5u);
    }
}

}  // namespace
}  // namespace iqpe
