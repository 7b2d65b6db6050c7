#include <gtest/gtest.h>

#include <random>

#include "spinwing/springs.hpp"

using namespace spinwing;

namespace {

SpringSpec ti_spec() { return *paper_reference_config().ti_spring; }

SpringSpec steel_ungrounded() {
    auto s = *paper_reference_config().steel_spring;
    s.n_grounded = 0;
    return s;
}

double deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace

TEST(BeamStiffness, ReferenceBeams) {
    const auto ti = ti_spec();
    // Y w t^3 / 12 l evaluated by hand.
    const double expected_ti = 114e9 * 0.4e-3 * 1e-12 / (12.0 * 1.83e-3);
    EXPECT_NEAR(springs::beam_stiffness(ti.material, ti.beam), expected_ti, 1e-15);
    EXPECT_NEAR(springs::beam_stiffness(ti.material, ti.beam), 2.077e-3, 0.001e-3);
    const auto st = steel_ungrounded();
    EXPECT_NEAR(springs::beam_stiffness(st.material, st.beam), 2.975e-4, 0.001e-4);
}

TEST(BeamStiffness, CubicInThickness) {
    auto s = ti_spec();
    const double k = springs::beam_stiffness(s.material, s.beam);
    s.beam.thickness *= 2.0;
    EXPECT_NEAR(springs::beam_stiffness(s.material, s.beam) / k, 8.0, 1e-12);
}

TEST(SpringStiffness, Tables) {
    EXPECT_NEAR(springs::spring_stiffness(ti_spec()) * 1e6, 1038.0, 1.0);
    EXPECT_NEAR(springs::spring_stiffness(steel_ungrounded()) * 1e6, 74.4, 0.1);
    EXPECT_NEAR(springs::spring_stiffness(*paper_reference_config().steel_spring) * 1e6, 148.8, 0.1);
}

TEST(SpringStiffness, FullyGroundedThrows) {
    auto s = steel_ungrounded();
    s.n_grounded = 4;
    EXPECT_THROW(springs::spring_stiffness(s), DomainError);
}

TEST(MaxRotation, Tables) {
    EXPECT_NEAR(deg(springs::max_rotation(ti_spec())), 36.07, 0.01);
    EXPECT_NEAR(deg(springs::max_rotation(steel_ungrounded())), 48.05, 0.01);
    auto g = steel_ungrounded();
    g.n_grounded = 2;
    EXPECT_NEAR(springs::max_rotation(g) / springs::max_rotation(steel_ungrounded()), 0.5, 1e-15);
}

TEST(Resonance, SizingAndInverse) {
    EXPECT_NEAR(springs::resonance_stiffness(4.16e-10, 250.0), 1.027e-3, 0.001e-3);
    EXPECT_NEAR(springs::resonance_stiffness(4.16e-10, 500.0) / springs::resonance_stiffness(4.16e-10, 250.0), 4.0,
                1e-12);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> j(1e-12, 1e-8);
    std::uniform_real_distribution<double> f(1.0, 2000.0);
    for (int i = 0; i < 500; ++i) {
        const double J = j(rng);
        const double F = f(rng);
        const auto nf = springs::natural_frequency(springs::resonance_stiffness(J, F), J, F);
        EXPECT_NEAR(nf.hz, F, 1e-12 * F);
        EXPECT_NEAR(nf.ratio, 1.0, 1e-12);
    }
}

TEST(NaturalFrequency, RatchetShaft) {
    const double J = springs::cylinder_inertia(7e-6, 1.4e-3);
    EXPECT_NEAR(J, 6.86e-12, 1e-16);
    const auto a = springs::natural_frequency(150e-6, J, 250.0);
    EXPECT_NEAR(a.hz, 744.0, 1.0);
    EXPECT_NEAR(a.ratio, 2.98, 0.01);
    EXPECT_TRUE(a.quasi_static);
    const auto b = springs::natural_frequency(75e-6, J, 250.0);
    EXPECT_NEAR(b.hz, 526.0, 1.0);
    EXPECT_NEAR(springs::natural_frequency(600e-6, J, 250.0).hz / a.hz, 2.0, 1e-12);
}

TEST(SpringProperties, MonotoneAndGrounding) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int i = 0; i < 500; ++i) {
        auto s = ti_spec();
        s.beam.length *= u(rng);
        s.beam.width *= u(rng);
        s.beam.thickness *= 0.5 * u(rng);
        s.n_series = 2 + static_cast<int>(u(rng) * 3);
        const double k = springs::spring_stiffness(s);
        const double th = springs::max_rotation(s);
        auto thicker = s;
        thicker.beam.thickness *= 1.1;
        EXPECT_GT(springs::spring_stiffness(thicker), k);
        EXPECT_LT(springs::max_rotation(thicker), th);
        auto wider = s;
        wider.beam.width *= 1.1;
        EXPECT_GT(springs::spring_stiffness(wider), k);
        auto longer = s;
        longer.beam.length *= 1.1;
        EXPECT_LT(springs::spring_stiffness(longer), k);
        EXPECT_GT(springs::max_rotation(longer), th);
        for (int m = 1; m < s.n_series; ++m) {
            auto g = s;
            g.n_grounded = m;
            const double ratio_k = static_cast<double>(s.n_series) / (s.n_series - m);
            EXPECT_NEAR(springs::spring_stiffness(g) / k, ratio_k, 1e-12);
            EXPECT_NEAR(springs::max_rotation(g) / th, 1.0 / ratio_k, 1e-12);
            EXPECT_GE(springs::spring_stiffness(g), k);
        }
    }
}

TEST(DesignSpring, FindsTableLikeTitanium) {
    const auto ti = ti_spec();
    const springs::DesignBounds bounds{1.0e-3, 3.0e-3, 0.2e-3, 0.8e-3, 50e-6, 150e-6};
    const springs::Topology topo{2, 4, 0};
    const double swing = 0.45;
    const auto spec = springs::design_spring(1.027e-3, ti.material, bounds, topo, swing);
    EXPECT_NEAR(springs::spring_stiffness(spec), 1.027e-3, 0.02 * 1.027e-3);
    EXPECT_GE(springs::max_rotation(spec), swing);
    EXPECT_GT(spec.beam.width, spec.beam.thickness);
    EXPECT_GE(spec.beam.length, bounds.l_min);
    EXPECT_LE(spec.beam.thickness, bounds.t_max);
}

TEST(DesignSpring, InfeasibleReportsClosest) {
    const auto ti = ti_spec();
    const springs::DesignBounds bounds{1.0e-3, 3.0e-3, 0.2e-3, 0.8e-3, 50e-6, 150e-6};
    try {
        springs::design_spring(1e-7, ti.material, bounds, {2, 4, 0}, 0.1);
        FAIL();
    } catch (const InfeasibleError& e) {
        EXPECT_GT(e.best_achievable(), 1e-7);
    }
}

TEST(DesignSpring, SwingConstraintIsHard) {
    const auto ti = ti_spec();
    const springs::DesignBounds bounds{1.0e-3, 3.0e-3, 0.2e-3, 0.8e-3, 50e-6, 150e-6};
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> k(5e-4, 3e-3);
    std::uniform_real_distribution<double> sw(0.1, 0.8);
    for (int i = 0; i < 20; ++i) {
        const double swing = sw(rng);
        try {
            const auto spec = springs::design_spring(k(rng), ti.material, bounds, {2, 4, 0}, swing, 31);
            EXPECT_GE(springs::max_rotation(spec), swing);
        } catch (const InfeasibleError&) {
        }
    }
}
