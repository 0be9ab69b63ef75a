#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cmbo/acquisition.hpp"
#include "cmbo/errors.hpp"
#include "cmbo/prototypes.hpp"
#include "cmbo/run.hpp"
#include "cmbo/synth.hpp"
#include "cmbo/trace_io.hpp"
#include "cmbo/weights.hpp"
#include "properties.hpp"

using namespace cmbo;

namespace {

std::shared_ptr<const GpModel> model_with(const Eigen::MatrixXd& grid, Eigen::VectorXd mean,
                                          Eigen::MatrixXd cov) {
    return std::make_shared<const GpModel>(grid, std::move(mean), std::move(cov), 1e-4);
}

Eigen::MatrixXd grid2() {
    Eigen::MatrixXd g(2, 1);
    g << 0.25, 0.75;
    return g;
}

}  // namespace

TEST_CASE("geometric center averages member surfaces") {
    const Eigen::MatrixXd grid = grid2();
    Eigen::MatrixXd cov(2, 2);
    cov << 1.0, 0.3, 0.3, 1.0;
    Eigen::VectorXd mean(2);
    mean << 1.0, -2.0;

    const Prototype solo = Prototype::geometric_center({model_with(grid, mean, cov)});
    CHECK((solo.mean_at(grid) - mean).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((solo.cov_at(grid) - cov).cwiseAbs().maxCoeff() <= 1e-12);

    const Prototype mirrored =
        Prototype::geometric_center({model_with(grid, mean, cov), model_with(grid, -mean, cov)});
    CHECK(mirrored.mean_at(grid).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((mirrored.cov_at(grid) - cov).cwiseAbs().maxCoeff() <= 1e-12);

    Eigen::VectorXd m2(2), m3(2);
    m2 << 0.5, 0.5;
    m3 << -1.0, 4.0;
    const Prototype three = Prototype::geometric_center(
        {model_with(grid, mean, cov), model_with(grid, m2, 2.0 * cov),
         model_with(grid, m3, 0.5 * cov)});
    CHECK((three.mean_at(grid) - (mean + m2 + m3) / 3.0).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((three.cov_at(grid) - cov * (1.0 + 2.0 + 0.5) / 3.0).cwiseAbs().maxCoeff() <= 1e-12);

    CHECK_THROWS_AS(Prototype::geometric_center({}), EmptyCluster);
}

TEST_CASE("barycenter prototype pins the solved distribution") {
    const Eigen::MatrixXd grid = grid2();
    Eigen::MatrixXd cov(2, 2);
    cov << 1.0, 0.2, 0.2, 1.0;
    Eigen::VectorXd mean(2);
    mean << 0.4, 0.1;
    const auto member = model_with(grid, mean, cov);
    const Prototype identical = Prototype::barycenter({member, member}, grid);
    CHECK((identical.pinned().mean() - mean).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((identical.pinned().cov() - cov).cwiseAbs().maxCoeff() <= 1e-6);

    // 1-D members N(0,1) and N(2,9) have barycenter N(1,4).
    Eigen::MatrixXd g1(1, 1);
    g1 << 0.5;
    Eigen::MatrixXd c1(1, 1), c2(1, 1);
    c1 << 1.0;
    c2 << 9.0;
    Eigen::VectorXd m0(1), m1(1);
    m0 << 0.0;
    m1 << 2.0;
    const Prototype mid =
        Prototype::barycenter({model_with(g1, m0, c1), model_with(g1, m1, c2)}, g1);
    CHECK(mid.pinned().mean()(0) == doctest::Approx(1.0));
    CHECK(mid.pinned().cov()(0, 0) == doctest::Approx(4.0).epsilon(1e-6));

    Eigen::MatrixXd off(1, 1);
    off << 0.9;
    CHECK_THROWS_AS(mid.discretize(off), RowNotOnGrid);
}

TEST_CASE("synthesize_prior follows the weighted combination rule") {
    const Eigen::MatrixXd grid = grid2();
    Eigen::MatrixXd k1(2, 2), k2(2, 2);
    k1 << 1.0, 0.1, 0.1, 1.0;
    k2 << 2.0, 0.4, 0.4, 2.0;
    Eigen::VectorXd mu1(2), mu2(2);
    mu1 << 1.0, 0.0;
    mu2 << 0.0, 2.0;
    const std::vector<Prototype> prototypes{
        Prototype::geometric_center({model_with(grid, mu1, k1)}),
        Prototype::geometric_center({model_with(grid, mu2, k2)})};

    WeightState half;
    half.weights = Eigen::VectorXd::Constant(2, 0.5);
    const GpModel prior = synthesize_prior(prototypes, half, grid, 1e-4);
    CHECK((prior.mean() - 0.5 * (mu1 + mu2)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((prior.cov() - 0.25 * (k1 + k2)).cwiseAbs().maxCoeff() <= 1e-12);

    WeightState solo;
    solo.weights = Eigen::VectorXd::Zero(2);
    solo.weights(0) = 1.0;
    const GpModel only_first = synthesize_prior(prototypes, solo, grid, 1e-4);
    CHECK((only_first.mean() - mu1).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((only_first.cov() - k1).cwiseAbs().maxCoeff() <= 1e-12);

    WeightState bad;
    bad.weights = Eigen::VectorXd::Constant(2, 0.7);
    CHECK_THROWS_AS(synthesize_prior(prototypes, bad, grid, 1e-4), InvalidArgument);
}

TEST_CASE("update_weights closed forms") {
    const WeightState uniform = WeightState::uniform(3);
    const WeightState equal = update_weights(Eigen::VectorXd::Constant(3, 2.5), uniform);
    CHECK((equal.weights.array() - 1.0 / 3.0).abs().maxCoeff() <= 1e-12);

    Eigen::VectorXd d(2);
    d << 0.0, 5.0;
    const WeightState two = update_weights(d, WeightState::uniform(2));
    CHECK(two.weights(0) == doctest::Approx(std::exp(1.0) / (std::exp(1.0) + 1.0)).epsilon(1e-9));
    CHECK(two.weights(1) == doctest::Approx(1.0 / (std::exp(1.0) + 1.0)).epsilon(1e-9));
    CHECK(two.weights(0) == doctest::Approx(0.731059).epsilon(1e-5));

    const WeightState zeros = update_weights(Eigen::VectorXd::Zero(4), WeightState::uniform(4));
    CHECK((zeros.weights.array() - 0.25).abs().maxCoeff() <= 1e-12);

    Eigen::VectorXd bad(2);
    bad << 1.0, std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(update_weights(bad, WeightState::uniform(2)), NonFiniteDistance);
    bad << 1.0, -0.5;
    CHECK_THROWS_AS(update_weights(bad, WeightState::uniform(2)), NonFiniteDistance);
}

TEST_CASE("acquisition closed forms and masking") {
    Eigen::VectorXd mean(2), var(2);
    mean << 0.0, 1.0;
    var << 1.0, 0.0;
    const AcquisitionResult ucb = acquisition(AcquisitionKind::GpUcb, mean, var, 0.0);
    CHECK(ucb.scores(0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(ucb.scores(1) == doctest::Approx(1.0));
    CHECK(ucb.best_index == 0);

    // Zero variance everywhere reduces every kind to argmax of the mean.
    Eigen::VectorXd flat_var = Eigen::VectorXd::Zero(2);
    for (AcquisitionKind kind :
         {AcquisitionKind::GpUcb, AcquisitionKind::ExpectedImprovement,
          AcquisitionKind::ProbabilityOfImprovementMax}) {
        CHECK(acquisition(kind, mean, flat_var, 0.5).best_index == 1);
    }

    Eigen::VectorXd m1(1), v1(1);
    m1 << 2.0;
    v1 << 1.0;
    const AcquisitionResult ei = acquisition(AcquisitionKind::ExpectedImprovement, m1, v1, 2.0);
    CHECK(ei.scores(0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-9));
    CHECK(ei.scores(0) == doctest::Approx(0.398942).epsilon(1e-5));

    const AcquisitionResult pi = acquisition(AcquisitionKind::ProbabilityOfImprovementMax, m1,
                                             Eigen::VectorXd::Zero(1), 1.5);
    CHECK(pi.scores(0) == doctest::Approx(1.0));

    AcquisitionParams params;
    params.excluded = {0, 1};
    CHECK_THROWS_AS(acquisition(AcquisitionKind::GpUcb, mean, var, 0.0, params),
                    AllCandidatesExhausted);
    params.excluded = {0};
    CHECK(acquisition(AcquisitionKind::GpUcb, mean, var, 0.0, params).best_index == 1);
}

TEST_CASE("run_cmbo with zero queries returns the initial design") {
    SynthSpec spec;
    spec.dim = 2;
    spec.grid_size = 40;
    spec.tasks_per_family = 2;
    const MetaDataset ds = make_synth_dataset(spec);
    std::vector<MetaTask> meta;
    for (const std::string& id : ds.task_ids()) {
        const Dataset sub = subsample_meta_observations(ds.tasks.at(id), 12, 5);
        meta.push_back({id, sub.inputs(), sub.outputs()});
    }
    const TargetTask target = make_synth_target(spec, true, 3);

    RunConfig cfg;
    cfg.num_queries = 0;
    cfg.num_initial = 4;
    cfg.clustering_grid_size = 10;
    cfg.comparison_grid_size = 15;
    cfg.seed = 77;
    const RunTrace trace = run_cmbo(meta, target, cfg);
    CHECK(trace.rows.size() == 4);
    double best = -1e300;
    for (const TraceRow& row : trace.rows) {
        CHECK(row.tau == 0);
        best = std::max(best, row.y);
    }
    CHECK(trace.best_y() == doctest::Approx(best));
}

TEST_CASE("GlobalCen matches run_cmbo with a single cluster") {
    SynthSpec spec;
    spec.dim = 2;
    spec.grid_size = 30;
    spec.tasks_per_family = 2;
    const MetaDataset ds = make_synth_dataset(spec);
    std::vector<MetaTask> meta;
    for (const std::string& id : ds.task_ids()) {
        const Dataset sub = subsample_meta_observations(ds.tasks.at(id), 10, 6);
        meta.push_back({id, sub.inputs(), sub.outputs()});
    }
    const TargetTask target = make_synth_target(spec, true, 4);

    RunConfig cfg;
    cfg.num_queries = 6;
    cfg.num_initial = 3;
    cfg.clustering_grid_size = 8;
    cfg.comparison_grid_size = 12;
    cfg.seed = 99;

    RunConfig single = cfg;
    single.num_clusters = 1;
    single.method_tag = "same";
    RunConfig global = cfg;
    global.method_tag = "same";
    const RunTrace via_cmbo = run_cmbo(meta, target, single);
    const RunTrace via_baseline = run_baseline(Method::GlobalCen, meta, target, global);
    CHECK(trace_to_csv(via_cmbo, "r") == trace_to_csv(via_baseline, "r"));
}

TEST_CASE("IndiWeight-Jef uses one weight per meta task") {
    SynthSpec spec;
    spec.dim = 2;
    spec.grid_size = 25;
    spec.tasks_per_family = 2;
    const MetaDataset ds = make_synth_dataset(spec);
    std::vector<MetaTask> meta;
    for (const std::string& id : ds.task_ids()) {
        const Dataset sub = subsample_meta_observations(ds.tasks.at(id), 10, 7);
        meta.push_back({id, sub.inputs(), sub.outputs()});
    }
    const TargetTask target = make_synth_target(spec, false, 5);
    RunConfig cfg;
    cfg.num_queries = 3;
    cfg.num_initial = 2;
    cfg.clustering_grid_size = 8;
    cfg.comparison_grid_size = 10;
    cfg.seed = 123;
    const RunTrace trace = run_baseline(Method::IndiWeightJef, meta, target, cfg);
    CHECK(trace.rows.back().weights.size() == static_cast<Eigen::Index>(meta.size()));
    CHECK(trace.method == "indi_weight_jef");
}

TEST_CASE("vanilla GP beats the random-search median on a synthetic target") {
    SynthSpec spec;
    spec.dim = 2;
    spec.grid_size = 60;
    spec.tasks_per_family = 2;
    const TargetTask target = make_synth_target(spec, true, 11);

    RunConfig cfg;
    cfg.num_queries = 50;
    cfg.num_initial = 5;
    std::vector<double> random_best;
    double vanilla_best_sum = 0.0;
    for (std::uint64_t s = 0; s < 8; ++s) {
        cfg.seed = 1000 + s;
        random_best.push_back(run_baseline(Method::RandomSearch, {}, target, cfg).best_y());
        vanilla_best_sum += run_baseline(Method::VanillaGp, {}, target, cfg).best_y();
    }
    std::sort(random_best.begin(), random_best.end());
    const double random_median = 0.5 * (random_best[3] + random_best[4]);
    CHECK(vanilla_best_sum / 8.0 >= random_median);
}

TEST_CASE("cmbo favors the matching family on a synthetic target") {
    SynthSpec spec;
    spec.dim = 2;
    spec.grid_size = 60;
    spec.tasks_per_family = 3;
    const MetaDataset ds = make_synth_dataset(spec);
    std::vector<MetaTask> meta;
    for (const std::string& id : ds.task_ids()) {
        const Dataset sub = subsample_meta_observations(ds.tasks.at(id), 25, 8);
        meta.push_back({id, sub.inputs(), sub.outputs()});
    }
    const TargetTask target = make_synth_target(spec, true, 12);
    RunConfig cfg;
    cfg.num_queries = 30;
    cfg.num_initial = 5;
    cfg.clustering_grid_size = 25;
    cfg.comparison_grid_size = 40;
    cfg.seed = 2024;
    const RunTrace trace = run_cmbo(meta, target, cfg);
    REQUIRE(trace.meta_cluster_assignments.size() == meta.size());
    const int family_a_cluster = trace.meta_cluster_assignments[0];
    double w_a = 0.0, w_b = 0.0;
    int count = 0;
    for (const TraceRow& row : trace.rows) {
        if (row.tau >= 10) {
            w_a += row.weights(family_a_cluster);
            w_b += row.weights(1 - family_a_cluster);
            ++count;
        }
    }
    REQUIRE(count > 0);
    CHECK(w_a / count > w_b / count);
}

TEST_CASE("cmbo property suites (smoke)") {
    CHECK_NOTHROW(props::prop_weight_updates(60, 71));
    CHECK_NOTHROW(props::prop_one_hot_reproduces_prototype(20, 72));
    CHECK_NOTHROW(props::prop_synthesized_prior_positive(20, 73));
    CHECK_NOTHROW(props::prop_ucb_shift_invariance(60, 74));
    CHECK_NOTHROW(props::prop_run_trace_invariants(10, 75));
    CHECK_NOTHROW(props::prop_random_search_coverage(30, 76));
}
