#include <doctest.h>

#include <cmath>

#include "froc/errors.hpp"
#include "froc/indices.hpp"
#include "froc/kernels.hpp"
#include "froc/simulator.hpp"

using namespace froc;

TEST_CASE("generated datasets follow the configuration") {
    SimConfig cfg;
    const auto ds = generate_dataset(cfg, 0);
    CHECK(ds.num_positive() == 100);
    CHECK(ds.num_negative() == 100);
    CHECK(ds.total_lesions() == 200);
    CHECK(ds.total_fp_on_positives() == 0);
    CHECK(generate_dataset(cfg, 0) == ds);
    CHECK_FALSE(generate_dataset(cfg, 1) == ds);

    cfg.master_seed += 1;
    CHECK_FALSE(generate_dataset(cfg, 0) == ds);
}

TEST_CASE("detection rate and count means over many lesions") {
    SimConfig cfg;
    cfg.n_pos = cfg.n_neg = 50000;
    long lesions = 0, detected = 0, fp = 0, negs = 0;
    double sum = 0, sum_sq = 0;
    long scores = 0;
    for (long rep = 0; rep < 10; ++rep) {
        const auto ds = generate_dataset(cfg, rep);
        lesions += ds.total_lesions();
        detected += ds.total_detected();
        fp += ds.total_fp_on_negatives();
        negs += static_cast<long>(ds.num_negative());
        for (const auto& p : ds.positives)
            for (double y : p.tp_scores) {
                sum += y;
                sum_sq += y * y;
                ++scores;
            }
    }
    CHECK(lesions == 1000000);
    CHECK(std::abs(static_cast<double>(detected) / lesions - 0.8) < 0.002);
    CHECK(std::abs(static_cast<double>(fp) / negs - 1.0) < 0.01);
    const double mean = sum / scores;
    CHECK(std::abs(mean - 2.0) < 0.01);
    CHECK(std::abs(sum_sq / scores - mean * mean - 1.0) < 0.01);
}

TEST_CASE("random effects add their variance to the marginal score law") {
    SimConfig cfg;
    cfg.sigma01 = cfg.sigma02 = 0.3;
    cfg.n_pos = cfg.n_neg = 50000;
    double sum = 0, sum_sq = 0;
    long n = 0;
    for (long rep = 0; rep < 13; ++rep) {
        const auto ds = generate_dataset(cfg, rep);
        for (const auto& p : ds.positives)
            for (double y : p.tp_scores) {
                sum += y;
                sum_sq += y * y;
                ++n;
            }
    }
    REQUIRE(n >= 1000000);
    const double mean = sum / n;
    CHECK(std::abs((sum_sq / n - mean * mean) / 1.09 - 1.0) < 0.01);
}

TEST_CASE("true index values") {
    SimConfig cfg;
    const auto auc = true_index_value(cfg, IndexKind::Auc);
    CHECK(auc.exact);
    CHECK(auc.value == afroc_auc(cfg.model_params()));
    const auto llf = true_index_value(cfg, IndexKind::LlfQ);
    CHECK(llf.value == llf_at_fpf(cfg.model_params(), 0.1));
    CHECK(llf.value == doctest::Approx(0.320).epsilon(2e-3));

    // the oracle machinery itself reproduces the closed forms when uncorrelated
    const auto sums = kernels::serial::oracle_auc(cfg, 2000000);
    const double mc = sums.sum / sums.count;
    const double se = std::sqrt((sums.sum_sq / sums.count - mc * mc) / sums.count);
    CHECK(std::abs(mc - auc.value) < 4 * se);

    cfg.sigma01 = cfg.sigma02 = 0.3;
    const auto corr = true_index_value(cfg, IndexKind::Auc);
    CHECK_FALSE(corr.exact);
    CHECK(corr.mc_std_error > 0.0);
    CHECK(corr.mc_std_error < kOracleMaxStdError);
    CHECK(std::abs(corr.value - auc.value) > 5 * corr.mc_std_error);
    const auto corr_llf = true_index_value(cfg, IndexKind::LlfQ);
    CHECK(corr_llf.mc_std_error < kOracleMaxStdError);
    CHECK(std::abs(corr_llf.value - llf.value) > 5 * corr_llf.mc_std_error);

    CHECK_THROWS_AS(true_index_value(cfg, IndexKind::Auc, 1000), NumericalError);
}

TEST_CASE("coverage at alpha = 0.5") {
    SimConfig cfg;
    cfg.alpha = 0.5;
    cfg.replications = 2000;
    const auto r = coverage_experiment(cfg, {Method::Proposed}, {IndexKind::Auc, IndexKind::LlfQ});
    CHECK(std::abs(r.cell(Method::Proposed, IndexKind::Auc).coverage - 0.5) < 0.03);
    CHECK(std::abs(r.cell(Method::Proposed, IndexKind::LlfQ).coverage - 0.5) < 0.03);
}

TEST_CASE("coverage is independent of the thread count") {
    SimConfig cfg;
    cfg.replications = 100;
    cfg.bootstrap = 100;
    const std::vector<Method> methods{Method::Proposed, Method::Empirical};
    const std::vector<IndexKind> indices{IndexKind::Auc, IndexKind::LlfQ};
    const auto serial = coverage_experiment_serial(cfg, methods, indices);
    cfg.threads = 3;
    const auto par = coverage_experiment(cfg, methods, indices);
    REQUIRE(serial.cells.size() == 3);
    REQUIRE(par.cells.size() == 3);
    for (std::size_t i = 0; i < serial.cells.size(); ++i) {
        CHECK(serial.cells[i].coverage == par.cells[i].coverage);
        CHECK(serial.cells[i].mean_ci_length == par.cells[i].mean_ci_length);
    }
    CHECK_THROWS_AS(coverage_experiment(SimConfig{.replications = 50}, methods, indices), std::invalid_argument);
}

TEST_CASE("failed replications are excluded and counted") {
    SimConfig cfg;
    cfg.p0 = 0.95;
    cfg.n_pos = 40;
    cfg.replications = 1000;
    const auto r = coverage_experiment(cfg, {Method::Proposed}, {IndexKind::Auc});
    const auto& c = r.cell(Method::Proposed, IndexKind::Auc);
    CHECK(c.failures > 0);
    CHECK(c.failures + c.replications_used == 1000);

    cfg.p0 = 0.99;
    cfg.n_pos = 10;
    cfg.replications = 200;
    CHECK_THROWS_AS(coverage_experiment(cfg, {Method::Proposed}, {IndexKind::Auc}), NumericalError);
}

TEST_CASE("serial and OpenMP kernels agree exactly") {
    SimConfig cfg;
    cfg.sigma01 = cfg.sigma02 = 0.3;
    const auto inputs = AucInputs::of(generate_dataset(cfg, 0));
    CHECK(kernels::serial::bootstrap_aucs(inputs, 200, 5) == kernels::omp::bootstrap_aucs(inputs, 200, 5, 4));
    const auto a = kernels::serial::oracle_auc(cfg, 300000);
    const auto b = kernels::omp::oracle_auc(cfg, 300000, 3);
    CHECK(a.sum == b.sum);
    CHECK(a.sum_sq == b.sum_sq);
    CHECK(a.count == b.count);
    CHECK(kernels::serial::oracle_llf(cfg, 6, 20000) == kernels::omp::oracle_llf(cfg, 6, 20000, 2));
}
