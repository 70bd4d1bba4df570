#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "randutv/eval.hpp"

using namespace randutv;

TEST(ErrorCurve, FullRankPointIsZeroWithoutRelative)
{
    const Matrix a = oracle::random_matrix(30, 20, 1);
    RandomStream s(1);
    UtvOptions opt;
    opt.block_size = 5;
    const UtvFactorization f = rand_utv(a, opt, s);
    const std::vector<double> sigma = oracle::singular_values(a);
    for (NormKind norm : {NormKind::Spectral, NormKind::Frobenius}) {
        const ErrorCurve c = error_curve("randutv", f.t, sigma, {5, 20}, norm);
        EXPECT_LE(c.abs_err[1], 1e-11 * sigma[0]);
        EXPECT_FALSE(c.rel_err_pct[1].has_value());
        ASSERT_TRUE(c.rel_err_pct[0].has_value());
        EXPECT_GE(*c.rel_err_pct[0], 100.0 - 1e-8);
    }
}

TEST(ErrorCurve, SvdIsExactlyOptimal)
{
    const GeneratedMatrix g = gen_s_shaped(100, 2);
    const std::vector<double> computed = singular_values(g.a);
    const std::vector<std::size_t> ks = default_ks(100, 10);
    for (NormKind norm : {NormKind::Spectral, NormKind::Frobenius}) {
        const ErrorCurve c = error_curve_svd(computed, *g.known_sigma, ks, norm);
        for (const auto& r : c.rel_err_pct) {
            ASSERT_TRUE(r.has_value());
            EXPECT_NEAR(*r, 100.0, 1e-6);
        }
    }
}

TEST(ErrorCurve, OptimalErrorByHand)
{
    const std::vector<double> sigma{4, 3, 2, 1};
    EXPECT_EQ(optimal_error(sigma, 1, NormKind::Spectral), 3.0);
    EXPECT_DOUBLE_EQ(optimal_error(sigma, 1, NormKind::Frobenius), std::sqrt(14.0));
    EXPECT_EQ(optimal_error(sigma, 4, NormKind::Frobenius), 0.0);
}

TEST(ErrorCurve, TrailingBlockEqualsExplicitResidual)
{
    // 20 (matrix, k) pairs across the three triangular factorizations.
    int pairs = 0;
    for (unsigned trial = 0; trial < 4; ++trial) {
        const std::size_t m = 30 + 5 * trial, n = 24 + 3 * trial;
        const Matrix a = oracle::random_matrix(m, n, 40 + trial);
        const std::vector<double> sigma = oracle::singular_values(a);
        RandomStream s(trial);
        UtvOptions opt;
        opt.block_size = 6;
        opt.power_steps = trial % 3;
        const UtvFactorization f = rand_utv(a, opt, s);
        const CpqrFactorization c = cpqr(a);
        const QlpFactorization l = qlp(a);
        for (std::size_t k : {3u, 6u, 11u, 12u, 17u}) {
            const NormKind norm = k % 2 ? NormKind::Spectral : NormKind::Frobenius;
            const double shortcut = error_curve("randutv", f.t, sigma, {k}, norm).abs_err[0];
            const double direct = explicit_error(a, utv_rank_k(f.u, f.t, f.v, k), norm);
            EXPECT_NEAR(shortcut, direct, 1e-11 * direct) << trial << " " << k;
            EXPECT_NEAR(error_curve("cpqr", c.r, sigma, {k}, norm).abs_err[0],
                        explicit_error(a, cpqr_rank_k_approx(c, k), norm), 1e-11 * direct);
            EXPECT_NEAR(error_curve("qlp", l.l, sigma, {k}, norm).abs_err[0],
                        explicit_error(a, qlp_rank_k(l, k), norm), 1e-11 * direct);
            ++pairs;
        }
    }
    EXPECT_EQ(pairs, 20);
}

TEST(ErrorCurve, Errors)
{
    const Matrix t = Matrix::identity(5);
    EXPECT_THROW(error_curve("x", t, {}, {1}, NormKind::Spectral), ConfigError);
    const std::vector<double> sigma(5, 1.0);
    EXPECT_THROW(error_curve("x", t, sigma, {0}, NormKind::Spectral), InputError);
    EXPECT_THROW(error_curve("x", t, sigma, {6}, NormKind::Spectral), InputError);
    EXPECT_THROW(parse_norm("nuclear"), InputError);
    EXPECT_EQ(parse_norm("frobenius"), NormKind::Frobenius);
}

TEST(DiagStudy, ExactDiagonalInputWithCpqr)
{
    GeneratedMatrix g;
    std::vector<double> d{0.5, 3.0, 1e-3, 2.0, 0.1};
    g.a = Matrix::diagonal(d);
    std::sort(d.begin(), d.end(), std::greater<>());
    const auto entries = diag_study(g, d, 2, {0}, 1, true, true);
    ASSERT_EQ(entries.size(), 3u);
    EXPECT_EQ(entries[1].method, "cpqr");
    for (double e : entries[1].rel_err_pct)
        EXPECT_EQ(e, 0.0);
    EXPECT_EQ(entries[2].method, "qlp");
    EXPECT_LE(entries[2].median_rel_err_pct, 1e-12);
}

TEST(DiagStudy, PowerStepsBeatCpqrOnFastDecay)
{
    const GeneratedMatrix g = gen_fast_decay(200, 3);
    const auto entries = diag_study(g, *g.known_sigma, 25, {2}, 4, true, false);
    EXPECT_EQ(entries[0].method, "randutv_q2");
    EXPECT_LE(entries[0].median_rel_err_pct, entries[1].median_rel_err_pct);
}

TEST(DiagStudy, RelativeErrorsAndMedian)
{
    const std::vector<double> d{2.0, 0.9, 0.0}, s{2.0, 1.0, 0.0};
    const std::vector<double> r = relative_diagonal_errors(d, s);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0], 0.0);
    EXPECT_NEAR(r[1], 10.0, 1e-12);
    EXPECT_EQ(median({3, 1, 2}), 2.0);
    EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
    EXPECT_THROW(median({}), InputError);
}

TEST(Flops, SquareRatiosAreExact)
{
    for (std::int64_t n : {1, 7, 400, 4000}) {
        EXPECT_EQ(flop_ratio_exact(n, n, 0), (Fraction{3, 1}));
        EXPECT_EQ(flop_ratio_exact(n, n, 1), (Fraction{4, 1}));
        EXPECT_EQ(flop_ratio_exact(n, n, 2), (Fraction{5, 1}));
    }
    const double n = 300;
    EXPECT_DOUBLE_EQ(flops_cpqr(n, n), 4.0 / 3.0 * n * n * n);
    EXPECT_DOUBLE_EQ(flops_randutv(n, n, 1) / flops_cpqr(n, n), 4.0);
    EXPECT_DOUBLE_EQ(flops_bidiag(n, n), 8.0 / 3.0 * n * n * n);
}

TEST(Flops, TallRatioReduced)
{
    const Fraction f = flop_ratio_exact(2, 1, 0);
    // (15·2 − 3) / (6·2 − 2) = 27/10
    EXPECT_EQ(f, (Fraction{27, 10}));
    EXPECT_EQ(std::gcd(flop_ratio_exact(1000, 300, 2).num, flop_ratio_exact(1000, 300, 2).den), 1);
    EXPECT_THROW(flop_ratio_exact(3, 4, 0), InputError);
}

TEST(Experiment, EmptyMethodsNamesField)
{
    ExperimentSpec spec;
    spec.methods.clear();
    spec.seeds.clear();
    try {
        run_experiment(spec);
        FAIL();
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("methods"), std::string::npos);
        EXPECT_NE(msg.find("seeds"), std::string::npos);
    }
}

TEST(Experiment, SingleMethodSingleK)
{
    ExperimentSpec spec;
    spec.matrix.family = Family::FastDecay;
    spec.n = 60;
    spec.b = 10;
    spec.methods = {"cpqr"};
    spec.ks = {20};
    const ExperimentResult r = run_experiment(spec);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].k, 20u);
    EXPECT_FALSE(r.rows[0].q.has_value());
    ASSERT_EQ(r.summary.size(), 1u);
    EXPECT_EQ(r.summary[0].samples, 1u);
}

TEST(Experiment, FullRecipeRowCount)
{
    ExperimentSpec spec;
    spec.matrix.family = Family::FastDecay;
    spec.n = 400;
    spec.b = 50;
    spec.qs = {2};
    spec.seeds = {0, 1};
    const ExperimentResult r = run_experiment(spec);
    EXPECT_EQ(r.rows.size(), 4u * 7u * 2u);
    EXPECT_EQ(r.summary.size(), 4u * 7u);
    for (const auto& row : r.rows)
        if (row.method == "svd") {
            EXPECT_NEAR(*row.rel_err_pct, 100.0, 1e-6);
        }
}

TEST(Experiment, DeterministicCsv)
{
    ExperimentSpec spec;
    spec.matrix.family = Family::Gap;
    spec.matrix.gap_index = 30;
    spec.n = 80;
    spec.b = 20;
    spec.qs = {0, 1};
    spec.seeds = {3, 4};
    spec.norms = {NormKind::Spectral, NormKind::Frobenius};
    const std::string a = to_csv(run_experiment(spec).rows);
    EXPECT_EQ(a, to_csv(run_experiment(spec).rows));
    EXPECT_EQ(a.substr(0, a.find('\n')), "family,n,b,q,p,seed,method,k,abs_err,rel_err_pct,norm");
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1 + 5 * 3 * 2 * 2);
}

TEST(Experiment, SeedsAreDecorrelated)
{
    EXPECT_NE(algorithm_seed(0), 0u);
    EXPECT_NE(algorithm_seed(1), algorithm_seed(0));
    EXPECT_EQ(default_ks(400, 50), (std::vector<std::size_t>{50, 100, 150, 200, 250, 300, 350}));
}
