#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sdom/errors.hpp"
#include "sdom/harness.hpp"

using namespace sdom;
namespace fs = std::filesystem;

namespace {

std::string slurp_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

ExperimentConfig small_decay() {
    ExperimentConfig cfg;
    cfg.experiment = "decay";
    cfg.signal.n = 256;
    cfg.signal.max_freq = 4;
    cfg.op.max_freq = 4;
    cfg.t_grid = {0.4, 0.6, 0.8, 1.0, 1.3, 1.7};
    cfg.trials = 2;
    return cfg;
}

} // namespace

TEST_CASE("config defaults validate and survive a serialization round trip") {
    ExperimentConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    const std::string text = cfg.to_json_text();
    const ExperimentConfig back = ExperimentConfig::from_json_text(text);
    CHECK(back.to_json_text() == text);

    // empty object means "all defaults"
    const ExperimentConfig blank = ExperimentConfig::from_json_text("{}\n");
    CHECK(blank.to_json_text() == text);

    const ExperimentConfig k = ExperimentConfig::from_json_text(
        "{\"experiment\":\"kappa\",\"r\":1.5}");
    CHECK(k.experiment == "kappa");
    CHECK(k.r == 1.5);
    CHECK(k.signal.n == 1024); // untouched default
}

TEST_CASE("config parse is strict about keys, types, and ranges") {
    using doctest::Contains;
    CHECK_THROWS_WITH_AS(
        (void)ExperimentConfig::from_json_text("{\"frobnicate\":1}"),
        Contains("frobnicate"), ConfigError);
    CHECK_THROWS_WITH_AS(
        (void)ExperimentConfig::from_json_text("{\"signal\":{\"bogus\":2}}"),
        Contains("bogus"), ConfigError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json_text("{\"seed\":-3}"),
                    ConfigError);
    CHECK_THROWS_AS(
        (void)ExperimentConfig::from_json_text("{\"signal\":{\"n\":300}}"),
        ConfigError);
    CHECK_THROWS_AS(
        (void)ExperimentConfig::from_json_text("{\"signal\":{\"n\":0}}"),
        ConfigError);
    CHECK_THROWS_AS(
        (void)ExperimentConfig::from_json_text("{\"experiment\":\"maximal\"}"),
        ConfigError);
    CHECK_THROWS_AS(
        (void)ExperimentConfig::from_json_text("{\"format\":\"yaml\"}"),
        ConfigError);
    CHECK_THROWS_AS(
        (void)ExperimentConfig::from_json_text("{\"t_grid\":[1.0,0.5]}"),
        ConfigError);
    CHECK_THROWS_AS(
        (void)ExperimentConfig::from_json_text("{\"lambdas\":[1.5]}"),
        ConfigError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json_text("{\"p\":1.0}"),
                    ConfigError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json_text("{\"p\":2.5}"),
                    ConfigError);
    CHECK_THROWS_AS(
        (void)ExperimentConfig::from_json_text("{\"op\":{\"alpha\":4}}"),
        ConfigError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json_text("not json"),
                    ConfigError);
}

TEST_CASE("config: A is AUTO when null and fixed when numeric") {
    const ExperimentConfig autoA =
        ExperimentConfig::from_json_text("{\"A\":null}");
    CHECK(!autoA.A.has_value());
    CHECK(autoA.to_json_text().find("\"A\": null") != std::string::npos);

    const ExperimentConfig fixedA =
        ExperimentConfig::from_json_text("{\"A\":2.5}");
    REQUIRE(fixedA.A.has_value());
    CHECK(*fixedA.A == 2.5);

    CHECK_THROWS_AS((void)ExperimentConfig::from_json_text("{\"A\":0.0}"),
                    ConfigError);
}

TEST_CASE("config: rational support intervals parse exactly") {
    const ExperimentConfig cfg = ExperimentConfig::from_json_text(
        "{\"signal\":{\"support\":{\"left\":[1,4],\"length\":[1,2]}}}");
    CHECK(cfg.signal.support.left() == Rational(1, 4));
    CHECK(cfg.signal.support.length() == Rational(1, 2));
    const ExperimentConfig back =
        ExperimentConfig::from_json_text(cfg.to_json_text());
    CHECK(back.signal.support == cfg.signal.support);
}

TEST_CASE("fit_exponential recovers a planted decay and rejects degeneracy") {
    const std::vector<double> t = {0.5, 1.0, 1.5, 2.0, 3.0};
    std::vector<double> frac;
    frac.reserve(t.size());
    for (double tv : t) frac.push_back(2.3 * std::exp(-1.7 * tv));
    const FitResult fit = fit_exponential(t, frac);
    CHECK(fit.c_hat == doctest::Approx(2.3).epsilon(1e-9));
    CHECK(fit.alpha_hat == doctest::Approx(1.7).epsilon(1e-9));
    CHECK(fit.r_squared >= 1.0 - 1e-12);

    CHECK_THROWS_AS((void)fit_exponential({1.0}, {0.5}), DegenerateFit);
    CHECK_THROWS_AS((void)fit_exponential({1.0, 2.0}, {0.5, 0.0}),
                    DegenerateFit);
    CHECK_THROWS_AS((void)fit_exponential({1.0, 1.0}, {0.5, 0.25}),
                    DegenerateFit);
    CHECK_THROWS_AS((void)fit_exponential({1.0, 2.0}, {0.5, 0.5}),
                    DegenerateFit);
}

TEST_CASE("decay fractions live in [0,1] and never increase along the grid") {
    SignalSpec spec;
    spec.n = 256;
    spec.seed = 77;
    spec.max_freq = 4;
    const Signal f = generate_signal(spec);
    OperatorSpecCfg op;
    op.max_freq = 4;
    const OperatorProfile prof = profile_from(op, spec.n);
    const std::vector<double> t_grid = {0.25, 0.5, 0.75, 1.0, 1.5};
    const DecayFractions df =
        compute_decay_fractions(f, prof, Interval::full_circle(), 2.0, t_grid);
    REQUIRE(df.fraction.size() == t_grid.size());
    for (std::size_t i = 0; i < df.fraction.size(); ++i) {
        CHECK(df.fraction[i] >= 0.0);
        CHECK(df.fraction[i] <= 1.0);
        if (i > 0) CHECK(df.fraction[i] <= df.fraction[i - 1]);
    }
    CHECK(df.skipped >= 0);
}

TEST_CASE("run_decay produces a coherent small report") {
    const ExperimentConfig cfg = small_decay();
    const DecayReport rep = run_decay(cfg);
    CHECK(rep.t_grid == cfg.t_grid);
    REQUIRE(rep.fraction.size() == cfg.t_grid.size());
    for (std::size_t i = 1; i < rep.fraction.size(); ++i)
        CHECK(rep.fraction[i] <= rep.fraction[i - 1]);
    CHECK(rep.trials == cfg.trials);
    CHECK(std::isfinite(rep.alpha_hat));
    CHECK(std::isfinite(rep.c_hat));
    CHECK(rep.c_hat > 0.0);
    CHECK(rep.r_squared <= 1.0 + 1e-12);
}

TEST_CASE("selftest passes wholesale with default options") {
    const SelftestReport rep = run_selftest();
    CHECK(rep.ok());
    CHECK(rep.failures.empty());
    // The battery should stay substantial; a shrinking suite count means
    // registrations were lost somewhere.
    CHECK(rep.passed.size() >= 20);
}

TEST_CASE("selftest seam: a broken median is caught by exactly one suite") {
    SelftestOptions mutated;
    mutated.median_fn = [](const Signal& f, const Interval& q) {
        const SampleRange sr = q.sample_range(f.n());
        double best = -HUGE_VAL;
        for (std::int64_t t = 0; t < sr.count; ++t)
            best = std::max(
                best,
                f.samples[static_cast<std::size_t>((sr.first + t) % f.n())]);
        return best;
    };
    const SelftestReport rep = run_selftest(mutated);
    CHECK(!rep.ok());
    REQUIRE(rep.failures.size() == 1);
    CHECK(rep.failures.front().suite == "signal.median");
    CHECK(!rep.failures.front().witness.empty());
}

TEST_CASE("write_report emits exactly the rendered bytes") {
    ExperimentConfig cfg;
    cfg.experiment = "kappa";
    cfg.format = "both";
    const fs::path dir = fs::temp_directory_path() / "sdom_harness_io";
    fs::remove_all(dir);
    cfg.out_dir = dir.string();

    const KappaOutcome out = run_kappa(cfg);
    CHECK(out.result.kappa_hat > 0.0);
    REQUIRE(!out.result.kappa_by_kmax.empty());
    for (std::size_t i = 1; i < out.result.kappa_by_kmax.size(); ++i)
        CHECK(out.result.kappa_by_kmax[i] >= out.result.kappa_by_kmax[i - 1]);

    const std::vector<std::string> paths = write_report(out, cfg);
    REQUIRE(paths.size() == 2);
    CHECK(paths[0].find("kappa.csv") != std::string::npos);
    CHECK(paths[1].find("kappa.json") != std::string::npos);
    CHECK(slurp_file(paths[0]) == kappa_csv(out));
    CHECK(slurp_file(paths[1]) == kappa_json(out, cfg));

    ExperimentConfig broken = cfg;
    broken.format = "yaml"; // bypasses validate() on purpose
    CHECK_THROWS_AS((void)write_report(out, broken), IoFailure);

    ExperimentConfig csv_only = cfg;
    csv_only.format = "csv";
    const std::vector<std::string> one = write_report(out, csv_only);
    REQUIRE(one.size() == 1);
    CHECK(one[0].find("kappa.csv") != std::string::npos);

    fs::remove_all(dir);
}

TEST_CASE("run_lerner smoke: bound and packing hold on trig trials") {
    ExperimentConfig cfg;
    cfg.experiment = "lerner";
    cfg.signal.n = 128;
    cfg.signal.max_freq = 4;
    cfg.trials = 2;
    const LernerOutcome out = run_lerner(cfg);
    CHECK(out.bound_ok);
    CHECK(out.packing_ok);
    CHECK(out.max_defect <= 0.0);
    CHECK(out.trials == 2);
    CHECK(!out.result.cubes.empty());
}
