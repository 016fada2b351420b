#include "mits/ar.hpp"
#include "mits/errors.hpp"
#include "mits/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace mits;

namespace {

Eigen::VectorXd ar1_residuals(int n, double phi, double sw, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd r(n);
    r(0) = sw / std::sqrt(1.0 - phi * phi) * gauss(rng);
    for (int i = 1; i < n; ++i) r(i) = phi * r(i - 1) + sw * gauss(rng);
    return r;
}

}  // namespace

TEST_CASE("estimate_ar_phases on white noise") {
    const int T = 10000;
    const Eigen::VectorXd r = ar1_residuals(T - 1, 0.0, 1.0, 11);
    const ArPhaseParams p = estimate_ar_phases(r, 5000);
    CHECK(std::abs(p.phi1) < 0.05);
    CHECK(std::abs(p.phi2) < 0.05);
}

TEST_CASE("estimate_ar_phases recovers phi=0.6 and the response SD") {
    const int T = 40000;
    const Eigen::VectorXd r = ar1_residuals(T - 1, 0.6, 3.38, 22);
    const ArPhaseParams p = estimate_ar_phases(r, T / 2);
    CHECK(p.phi1 == doctest::Approx(0.6).epsilon(0.05));
    CHECK(p.response_sd1() == doctest::Approx(4.23).epsilon(0.02));
    CHECK(p.response_sd2() == doctest::Approx(4.23).epsilon(0.02));
}

TEST_CASE("estimate_ar_phases equals the literal transcription") {
    std::mt19937_64 rng(33);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd r(11);  // T = 12
    for (int i = 0; i < r.size(); ++i) r(i) = gauss(rng);
    const ArPhaseParams p = estimate_ar_phases(r, 7);
    const oracle::ArPhases o = oracle::ar_phases(r, 7);
    CHECK(p.phi1 == doctest::Approx(o.phi1).epsilon(1e-12));
    CHECK(p.phi2 == doctest::Approx(o.phi2).epsilon(1e-12));
    CHECK(p.sigma_w1 == doctest::Approx(o.sigma_w1).epsilon(1e-12));
    CHECK(p.sigma_w2 == doctest::Approx(o.sigma_w2).epsilon(1e-12));
}

TEST_CASE("estimate_ar_phases is location invariant per phase") {
    const int T = 40;
    Eigen::VectorXd r = ar1_residuals(T - 1, 0.3, 1.0, 44);
    const int q = 20;
    const ArPhaseParams base = estimate_ar_phases(r, q);
    Eigen::VectorXd shifted = r;
    for (int t = 2; t <= q - 1; ++t) shifted(t - 2) += 5.0;
    for (int t = q; t <= T; ++t) shifted(t - 2) -= 3.0;
    const ArPhaseParams moved = estimate_ar_phases(shifted, q);
    CHECK(moved.phi1 == doctest::Approx(base.phi1).epsilon(1e-10));
    CHECK(moved.phi2 == doctest::Approx(base.phi2).epsilon(1e-10));
}

TEST_CASE("single-regime phase estimates agree as T grows") {
    const int T = 10000;
    for (double phi : {0.1, 0.6}) {
        const Eigen::VectorXd r = ar1_residuals(T - 1, phi, 1.0, 55);
        const ArPhaseParams p = estimate_ar_phases(r, T / 2);
        CHECK(std::abs(p.phi1 - phi) < 0.05);
        CHECK(std::abs(p.phi2 - phi) < 0.05);
    }
}

TEST_CASE("estimate_ar_phases error paths") {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(11);
    CHECK_THROWS_AS(estimate_ar_phases(r, 2), input_error);   // out of window
    CHECK_THROWS_AS(estimate_ar_phases(r, 7), model_error);   // zero variance
    Eigen::VectorXd tiny = ar1_residuals(11, 0.0, 1.0, 3);
    CHECK_THROWS_AS(estimate_ar_phases(tiny, 4), model_error);  // 1 pre pair
    CHECK_THROWS_WITH_AS(estimate_ar_phases(tiny, 4),
                         doctest::Contains("pre"), model_error);
}

TEST_CASE("build_covariance white-noise is the identity") {
    const CovarianceSpec spec{6, 12, ArPhaseParams{0, 0, 1, 1}};
    const Eigen::MatrixXd sigma = build_covariance(spec);
    CHECK((sigma - Eigen::MatrixXd::Identity(11, 11)).cwiseAbs().maxCoeff() ==
          0.0);
}

TEST_CASE("build_covariance pre block values") {
    // phi=0.5, sw=1: variance 4/3, lag-1 covariance 2/3
    const CovarianceSpec spec{4, 8, ArPhaseParams{0.5, 0.0, 1.0, 1.0}};
    const Eigen::MatrixXd sigma = build_covariance(spec);
    CHECK(sigma(0, 0) == doctest::Approx(4.0 / 3.0));
    CHECK(sigma(1, 1) == doctest::Approx(4.0 / 3.0));
    CHECK(sigma(0, 1) == doctest::Approx(2.0 / 3.0));
    CHECK(sigma(0, 2) == 0.0);  // cross-block
}

TEST_CASE("build_covariance matches Monte Carlo covariance") {
    const int T = 10;
    const int q = 5;
    const ArPhaseParams params{0.4, -0.3, 1.0, 2.0};
    const CovarianceSpec spec{q, T, params};
    const Eigen::MatrixXd sigma = build_covariance(spec);

    const int n = 1000000;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(T - 1, T - 1);
    std::mt19937_64 rng(77);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd eps(T - 1);
    for (int rep = 0; rep < n; ++rep) {
        // exact two-phase draw: independent stationary blocks
        eps(0) = params.response_sd1() * gauss(rng);
        for (int i = 1; i < q - 2; ++i) {
            eps(i) = params.phi1 * eps(i - 1) + params.sigma_w1 * gauss(rng);
        }
        eps(q - 2) = params.response_sd2() * gauss(rng);
        for (int i = q - 1; i < T - 1; ++i) {
            eps(i) = params.phi2 * eps(i - 1) + params.sigma_w2 * gauss(rng);
        }
        acc += eps * eps.transpose();
    }
    acc /= n;
    // entrywise 3 standard errors; var of a product of Gaussians ~ v_ii v_jj + v_ij^2
    for (int i = 0; i < T - 1; ++i) {
        for (int j = 0; j < T - 1; ++j) {
            const double se = std::sqrt(
                (sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) / n);
            CHECK(std::abs(acc(i, j) - sigma(i, j)) < 3.5 * se + 1e-12);
        }
    }
}

TEST_CASE("build_covariance is symmetric positive definite up to |phi|=0.99") {
    std::mt19937_64 rng(88);
    std::uniform_real_distribution<double> u(-0.99, 0.99);
    for (int rep = 0; rep < 50; ++rep) {
        const CovarianceSpec spec{9, 25,
                                  ArPhaseParams{u(rng), u(rng), 0.7, 1.3}};
        const Eigen::MatrixXd sigma = build_covariance(spec);
        CHECK((sigma - sigma.transpose()).cwiseAbs().maxCoeff() == 0.0);
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        CHECK(llt.info() == Eigen::Success);
    }
}

TEST_CASE("build_covariance rejects non-causal phi") {
    CHECK_THROWS_AS(
        build_covariance(CovarianceSpec{6, 12, ArPhaseParams{1.0, 0, 1, 1}}),
        model_error);
}

TEST_CASE("solve_gls_weights") {
    SUBCASE("phi=0 scales by the per-phase precision") {
        const CovarianceSpec spec{6, 12, ArPhaseParams{0, 0, 2.0, 0.5}};
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Random(11, 2);
        const Eigen::MatrixXd out = solve_gls_weights(spec, rhs);
        CHECK((out.topRows(4) - rhs.topRows(4) / 4.0).cwiseAbs().maxCoeff() <
              1e-14);
        CHECK((out.bottomRows(7) - rhs.bottomRows(7) * 4.0)
                  .cwiseAbs()
                  .maxCoeff() < 1e-14);
    }
    SUBCASE("matches a dense solve") {
        const CovarianceSpec spec{9, 21, ArPhaseParams{0.3, -0.2, 1.1, 0.8}};
        const Eigen::MatrixXd rhs = Eigen::MatrixXd::Random(20, 3);
        const Eigen::MatrixXd fast = solve_gls_weights(spec, rhs);
        const Eigen::MatrixXd dense =
            oracle::dense_covariance(9, 21, 0.3, -0.2, 1.1, 0.8)
                .ldlt()
                .solve(rhs);
        CHECK((fast - dense).cwiseAbs().maxCoeff() /
                  dense.cwiseAbs().maxCoeff() <
              1e-10);
    }
    SUBCASE("round trip through the covariance") {
        const CovarianceSpec spec{9, 21, ArPhaseParams{0.5, 0.2, 1.0, 1.5}};
        const Eigen::VectorXd v = Eigen::VectorXd::Random(20);
        const Eigen::VectorXd rhs = build_covariance(spec) * v;
        const Eigen::MatrixXd back = solve_gls_weights(spec, rhs);
        CHECK((back - v).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("rejects non-finite rhs") {
        const CovarianceSpec spec{6, 12, ArPhaseParams{0, 0, 1, 1}};
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(11, 1);
        rhs(3, 0) = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(solve_gls_weights(spec, rhs), input_error);
    }
}

TEST_CASE("log_det matches the dense determinant") {
    const CovarianceSpec spec{9, 21, ArPhaseParams{0.45, -0.35, 1.2, 0.6}};
    Eigen::FullPivLU<Eigen::MatrixXd> lu(build_covariance(spec));
    CHECK(log_det(spec.blocks()) ==
          doctest::Approx(std::log(std::abs(lu.determinant()))).epsilon(1e-10));
}

TEST_CASE("simulate_series noiseless limit equals the mean function") {
    const MeanParams theta{65, 0.5, 2, 0.1};
    const ArPhaseParams params{0.3, 0.2, 1e-9, 1e-9};
    const Eigen::VectorXd y = simulate_series(theta, 30, params, 60, 5);
    for (int t = 1; t <= 60; ++t) {
        CHECK(std::abs(y(t - 1) - mean_function(theta, 30, t)) < 1e-6);
    }
}

TEST_CASE("simulate_series null variance matches sigma = 3.40") {
    const MeanParams theta{65, 0.5, 0, 0};
    const ArPhaseParams params{0.1, 0.1, 3.38, 3.38};
    const int T = 100000;
    const Eigen::VectorXd y = simulate_series(theta, std::nullopt, params, T, 9);
    Eigen::VectorXd centered(T);
    for (int t = 1; t <= T; ++t) {
        centered(t - 1) = y(t - 1) - (theta.beta0 + theta.beta1 * t);
    }
    const double var = (centered.array() - centered.mean()).square().sum() / T;
    CHECK(std::sqrt(var) == doctest::Approx(3.40).epsilon(0.02));
}

TEST_CASE("simulate_series is deterministic in the seed") {
    const MeanParams theta{65, 0.5, 0, 0.25};
    const ArPhaseParams params{0.1, 0.1, 3.38, 3.38};
    const Eigen::VectorXd a = simulate_series(theta, 30, params, 60, 1234);
    const Eigen::VectorXd b = simulate_series(theta, 30, params, 60, 1234);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::VectorXd c = simulate_series(theta, 30, params, 60, 1235);
    CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("simulate then estimate recovers phi") {
    const MeanParams theta{0, 0, 0, 0};
    const int T = 2000;
    const int q = T / 2;
    for (double phi : {0.1, 0.6}) {
        const ArPhaseParams params{phi, phi, 1.0, 1.0};
        double err1 = 0.0, err2 = 0.0;
        const int reps = 20;
        for (int rep = 0; rep < reps; ++rep) {
            const Eigen::VectorXd y =
                simulate_series(theta, q, params, T,
                                mix64(static_cast<std::uint64_t>(
                                    rep + 100 + 1000 * phi)));
            const ArPhaseParams est = estimate_ar_phases(y.tail(T - 1), q);
            err1 += est.phi1 - phi;
            err2 += est.phi2 - phi;
        }
        const double bound = 3.0 / std::sqrt(static_cast<double>(q));
        CHECK(std::abs(err1 / reps) < bound);
        CHECK(std::abs(err2 / reps) < bound);
    }
}
