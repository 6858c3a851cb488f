#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "superosc/errors.hpp"
#include "superosc/measurement.hpp"

using namespace superosc;

namespace {
const OpticalSystem& sys() {
    static const OpticalSystem s = build_optics(OtfKind::rectangular, oracle::pi, 6);
    return s;
}
const OrthoBasis& basis() {
    static const OrthoBasis b = build_basis(ReferenceDensity::rectangle(), 8);
    return b;
}
}  // namespace

TEST(Measurement, PointAtOriginFractions) {
    const auto s = SceneModel::point(0.1, 0.0);
    const auto f0 = expected_fractions(sys(), s, 0);
    EXPECT_NEAR(f0.plus, 0.25, 1e-14);
    EXPECT_NEAR(f0.minus, 0.25, 1e-14);
    for (int q = 1; q < 6; ++q) {
        const auto f = expected_fractions(sys(), s, q);
        EXPECT_EQ(f.plus, 0.0);
        EXPECT_EQ(f.minus, 0.0);
    }
}

TEST(Measurement, RectFractionsMatchIndependentQuadrature) {
    const double d = 0.2;
    const auto f = expected_fractions(sys(), SceneModel::rect(d), 1);
    // h_1^{+-} = (O_1 +- O_2)^2 / 2 from the spherical Bessel oracle
    auto h = [&](double X, double sign) {
        const double o1 = std::sqrt(3.0) * oracle::sph_bessel(1, oracle::pi * X);
        const double o2 = std::sqrt(5.0) * oracle::sph_bessel(2, oracle::pi * X);
        return 0.5 * (o1 + sign * o2) * (o1 + sign * o2);
    };
    const double plus = 0.5 * oracle::simpson([&](double X) { return h(X, 1.0) / (2 * d); }, -d, d, 1e-15);
    const double minus = 0.5 * oracle::simpson([&](double X) { return h(X, -1.0) / (2 * d); }, -d, d, 1e-15);
    EXPECT_NEAR(f.plus, plus, 1e-12);
    EXPECT_NEAR(f.minus, minus, 1e-12);
}

TEST(Measurement, MomentFilterLimits) {
    for (double X : {-0.7, 0.0, 0.3}) EXPECT_EQ(moment_filter(sys(), 0, X), 1.0);
    const double h = 1e-4;
    EXPECT_NEAR((moment_filter(sys(), 1, h) - moment_filter(sys(), 1, -h)) / (2 * h), 1.0, 1e-6);
    EXPECT_NEAR(moment_filter(sys(), 2, 1e-3) / 1e-6, 1.0, 1e-4);
    for (int nu = 3; nu <= 8; ++nu) EXPECT_NEAR(moment_filter(sys(), nu, 1e-3) / std::pow(1e-3, nu), 1.0, 1e-4) << nu;
}

TEST(Measurement, MomentEstimatorKinds) {
    EXPECT_EQ(moment_estimator(sys(), 0).kind, MomentEstimator::Kind::constant);
    const auto e3 = moment_estimator(sys(), 3);
    EXPECT_EQ(e3.kind, MomentEstimator::Kind::difference);
    EXPECT_EQ(e3.q, 1);
    const double h1 = sys().leading_constants(1).h, h2 = sys().leading_constants(2).h;
    EXPECT_NEAR(e3.scale, 1.0 / (h1 * h2), 1e-12);
    const auto e4 = moment_estimator(sys(), 4);
    EXPECT_EQ(e4.kind, MomentEstimator::Kind::sum);
    EXPECT_EQ(e4.q, 2);
    EXPECT_NEAR(e4.scale, 2.0 / (h2 * h2), 1e-12);
}

TEST(Measurement, PlanStructure) {
    const EstimatorPlan plan(sys(), basis(), 0.1, 5);
    EXPECT_EQ(plan.nu_max(), 6);
    EXPECT_EQ(plan.modes_required(), 4);
    EXPECT_NEAR(plan.assembly(1, 1), std::sqrt(3.0) / 0.1, 1e-10);
    EXPECT_EQ(plan.assembly(1, 2), 0.0);
    EXPECT_THROW(EstimatorPlan(sys(), basis(), 0.1, 11), ArgumentError);
}

TEST(Measurement, PlanNeedsEnoughModes) {
    const auto small = build_optics(OtfKind::rectangular, oracle::pi, 2);
    EXPECT_THROW(EstimatorPlan(small, basis(), 0.1, 4), ArgumentError);
}

TEST(Measurement, FilterZeroIsConstant) {
    const FilterFunction b0(sys(), basis(), 0.2, 0);
    for (double X : {-2.0, 0.0, 0.15, 3.0}) EXPECT_NEAR(b0(X), 1.0, 1e-14);
}

TEST(Measurement, FilterOddEvenSymmetry) {
    for (int mu = 1; mu <= 8; ++mu) {
        const FilterFunction b(sys(), basis(), 0.2, mu);
        for (double X : {0.05, 0.4, 1.3, 2.7}) EXPECT_NEAR(b(-X), (mu % 2 ? -1.0 : 1.0) * b(X), 1e-9 * (1 + std::abs(b(X))));
    }
    EXPECT_NEAR(FilterFunction(sys(), basis(), 0.2, 1)(0.0), 0.0, 1e-12);
}

TEST(Measurement, FilterTracksTargetWithQuadraticError) {
    for (int mu = 1; mu <= 8; ++mu) {
        std::vector<double> errs;
        for (double d : {0.2, 0.1, 0.05}) {
            const FilterFunction b(sys(), basis(), d, mu);
            double e = 0.0;
            for (int i = 0; i <= 400; ++i) {
                const double X = -d + 2 * d * i / 400.0;
                e = std::max(e, std::abs(b(X) - b.target(X)));
            }
            errs.push_back(e);
        }
        EXPECT_NEAR(std::log2(errs[0] / errs[1]), 2.0, 0.5) << mu;
        EXPECT_NEAR(std::log2(errs[1] / errs[2]), 2.0, 0.5) << mu;
    }
}

TEST(Measurement, SignChangesInsideObject) {
    const double d = 0.2;
    for (int mu = 1; mu <= 8; ++mu) {
        const FilterFunction b(sys(), basis(), d, mu);
        int changes = 0;
        double prev = 0.0;
        for (int i = 1; i < 4000; ++i) {
            const double v = b(-d + 2 * d * i / 4000.0);
            if (prev != 0.0 && v * prev < 0) ++changes;
            if (v != 0.0) prev = v;
        }
        EXPECT_EQ(changes, mu) << mu;
    }
}

TEST(Measurement, SidelobePeakOutsideUnitRange) {
    const double d = 0.2;
    for (int mu = 3; mu <= 8; ++mu) {
        const FilterFunction b(sys(), basis(), d, mu);
        double inside = 0, outside = 0, peak_at = 0;
        for (int i = 0; i <= 6000; ++i) {
            const double X = -3 + 6 * i / 6000.0;
            const double v = std::abs(b(X));
            if (std::abs(X) <= 1) {
                if (v > inside) peak_at = X;
                inside = std::max(inside, v);
            } else {
                outside = std::max(outside, v);
            }
        }
        EXPECT_GT(outside, inside) << "mu=" << mu << " peaks at X=" << peak_at;
    }
}

TEST(Measurement, ThirdFilterPeakFromBesselOracle) {
    // b_3 = sqrt7/2 (5 t_3 / Delta^3 - 3 t_1 / Delta) with t_1 = O_0 O_1 / (H_0 H_1),
    // t_3 = O_1 O_2 / (H_1 H_2) and O_q = sqrt(2q+1) j_q(pi X).
    const double d = 0.2;
    const double h1 = oracle::pi / std::sqrt(3.0);
    const double h2 = std::sqrt(5.0) * oracle::pi * oracle::pi / 15.0;
    auto o = [](int q, double X) { return std::sqrt(2.0 * q + 1) * oracle::sph_bessel(q, oracle::pi * X); };
    auto b3 = [&](double X) {
        const double t1 = o(0, X) * o(1, X) / h1;
        const double t3 = o(1, X) * o(2, X) / (h1 * h2);
        return std::sqrt(7.0) / 2 * (5 * t3 / (d * d * d) - 3 * t1 / d);
    };
    const FilterFunction b(sys(), basis(), d, 3);
    double best = 0, where = 0;
    for (int i = 0; i <= 3000; ++i) {
        const double X = 3.0 * i / 3000.0;
        EXPECT_NEAR(b(X), b3(X), 1e-8 * (1 + std::abs(b3(X))));
        if (std::abs(b3(X)) > best) {
            best = std::abs(b3(X));
            where = X;
        }
    }
    EXPECT_NEAR(where, 0.856, 0.002);
}

TEST(Measurement, ExpectationLinearity) {
    const double d = 0.1;
    const EstimatorPlan plan(sys(), basis(), d, 6);
    for (const auto& s : {SceneModel::rect(d), SceneModel::two_point(d, -0.5, 1.0, 0.3),
                          SceneModel::table(d, {-1.0, 0.0, 1.0}, {0.0, 1.0, 0.3})})
        for (int mu = 1; mu <= 6; ++mu) {
            const FilterFunction b(sys(), basis(), d, mu);
            const double direct = s.expectation([&](double X) { return b(X); });
            double via = 0.0;
            for (int nu = 0; nu <= mu; ++nu)
                via += plan.assembly(mu, nu) * s.expectation([&](double X) { return moment_filter(sys(), nu, X); });
            EXPECT_NEAR(direct, via, 1e-10 * std::max(1.0, std::abs(direct)));
        }
}

TEST(Measurement, FilterGridParallelMatchesSerial) {
    const FilterFunction b(sys(), basis(), 0.2, 5);
    std::vector<double> xs(1201);
    for (int i = 0; i < 1201; ++i) xs[i] = -3 + 6.0 * i / 1200;
    const auto par = filter_grid(b, xs);
    const auto ser = filter_grid_serial(b, xs);
    ASSERT_EQ(par.size(), ser.size());
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(par[i], ser[i]);
}

TEST(Measurement, PortModelSumsToOne) {
    const auto model = expected_port_model(sys(), SceneModel::rect(0.2));
    for (const auto& c : model.configs) {
        double total = 0.0;
        for (double p : c.probabilities) total += p;
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_EQ(c.probabilities.size(), c.ports.size() + 1);
    }
    // Pair q in configuration with matching parity reproduces 2 f_q^{+-}.
    const auto f1 = expected_fractions(sys(), SceneModel::rect(0.2), 1);
    const auto& odd = model.configs[1];
    for (std::size_t i = 0; i < odd.ports.size(); ++i)
        if (odd.ports[i].q == 1 && odd.ports[i].kind == Port::Kind::pair_plus) EXPECT_NEAR(odd.probabilities[i], 2 * f1.plus, 1e-14);
}

TEST(Measurement, AsymptoticVarianceScalesWithPhotons) {
    const EstimatorPlan plan(sys(), basis(), 0.1, 4);
    const auto model = expected_port_model(sys(), SceneModel::rect(0.1));
    for (int mu = 1; mu <= 4; ++mu) {
        const double v1 = asymptotic_variance(plan, model, mu, 1e5);
        const double v2 = asymptotic_variance(plan, model, mu, 1e6);
        EXPECT_GT(v1, 0.0);
        EXPECT_NEAR(v1 / v2, 10.0, 1e-9);
    }
}
