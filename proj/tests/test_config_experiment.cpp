#include <catch2/catch_amalgamated.hpp>

#include "addinfo/experiment.hpp"
#include "addinfo/report.hpp"
#include "addinfo/verify.hpp"

#include <cmath>
#include <sstream>

using namespace addinfo;

TEST_CASE("config parsing and error locations") {
    Config cfg = Config::from_string("# comment\n"
                                     "spec.sigma1_sq = 2.0\n"
                                     "estimators = mre, mle:2\n"
                                     "seed = 99\n"
                                     "flag = yes # trailing comment\n",
                                     "demo.cfg");
    CHECK(cfg.get_double("spec.sigma1_sq", 0.0) == 2.0);
    CHECK(cfg.get_long("seed", 0) == 99);
    CHECK(cfg.get_string("flag", "") == "yes");
    CHECK(cfg.get_list("estimators", {}) == std::vector<std::string>{"mre", "mle:2"});
    CHECK(cfg.get_double("missing", 7.5) == 7.5);

    CHECK_THROWS_WITH(Config::from_string("x = 1\noops\n", "bad.cfg"),
                      Catch::Matchers::ContainsSubstring("bad.cfg:2"));
    Config typo = Config::from_string("delta.steps = many\n", "typo.cfg");
    CHECK_THROWS_WITH(typo.get_long("delta.steps", 1),
                      Catch::Matchers::ContainsSubstring("typo.cfg:1"));

    // flag overrides replace file values
    cfg.set("seed", "123");
    CHECK(cfg.get_long("seed", 0) == 123);
}

TEST_CASE("estimator selector grammar") {
    CHECK(parse_estimator("mre").kind == EstimatorChoice::Kind::Mre);
    CHECK(parse_estimator("mle:2").c == 2.0);
    CHECK(parse_estimator("plugin:1.5").c == 1.5);
    CHECK(parse_estimator("bayes-uniform").kind == EstimatorChoice::Kind::BayesUniform);
    CHECK_THROWS_AS(parse_estimator("nonsense"), ConfigError);
    CHECK_THROWS_AS(parse_estimator("mle:0"), ConfigError);
    CHECK_THROWS_AS(parse_estimator("mre:2"), ConfigError);
}

TEST_CASE("experiment parsing and validation messages carry field paths") {
    Config cfg = Config::from_string("spec.sigma1_sq = 1\n"
                                     "delta.steps = 1\n");
    CHECK_THROWS_WITH(parse_experiment(cfg), Catch::Matchers::ContainsSubstring("delta.steps"));

    Config mc = Config::from_string("method = mc\nmc_samples = 10\n");
    CHECK_THROWS_WITH(parse_experiment(mc), Catch::Matchers::ContainsSubstring("mc_samples"));

    Config bad = Config::from_string("spec.constraint = pentagon\n");
    CHECK_THROWS_WITH(parse_experiment(bad), Catch::Matchers::ContainsSubstring("spec.constraint"));

    Config ok = Config::from_string("spec.constraint = interval\n"
                                    "spec.constraint.m = 2\n"
                                    "estimators = mre, bayes-uniform\n"
                                    "delta.min = -1\ndelta.max = 1\ndelta.steps = 5\n");
    ExperimentConfig ec = parse_experiment(ok);
    CHECK(ec.spec.constraint.kind == ConstraintKind::Interval);
    CHECK(ec.estimators.size() == 2);
}

TEST_CASE("quadrature risk curve basics") {
    ExperimentConfig cfg;
    cfg.spec.p = 1;
    cfg.spec.constraint = ConstraintSet::half_line(1);
    cfg.estimators = {parse_estimator("mre"), parse_estimator("mle"), parse_estimator("mle:2"),
                      parse_estimator("bayes-uniform")};
    cfg.delta_min = 0.0;
    cfg.delta_max = 2.0;
    cfg.delta_steps = 5;
    std::vector<CurveRow> rows = run_risk_curve(cfg);
    REQUIRE(rows.size() == 20);

    for (const CurveRow& r : rows) {
        CHECK(r.std_error == 0.0);
        if (r.estimator == "mre") {
            CHECK(r.risk == Catch::Approx(0.5 * std::log(2.0)).margin(1e-12));
            CHECK(r.ratio_vs_mre == Catch::Approx(1.0).margin(1e-12));
        }
        if (r.estimator == "bayes-uniform") CHECK(r.ratio_vs_mre <= 1.0 + 1e-12);
    }
    // benchmark equality at delta = 0 for the uniform-prior Bayes density
    CHECK(rows[0].delta == 0.0);
    for (const CurveRow& r : rows)
        if (r.delta == 0.0 && r.estimator == "bayes-uniform")
            CHECK(r.ratio_vs_mre == Catch::Approx(1.0).margin(1e-11));
}

TEST_CASE("monte carlo risk curve agrees with quadrature") {
    ExperimentConfig quad;
    quad.spec.p = 1;
    quad.spec.constraint = ConstraintSet::half_line(1);
    quad.estimators = {parse_estimator("mle"), parse_estimator("bayes-uniform")};
    quad.delta_min = 1.0;
    quad.delta_max = 1.0;
    quad.delta_steps = 2;  // both points coincide
    ExperimentConfig mc = quad;
    mc.method = RiskCurveMethod::MonteCarlo;
    mc.mc_samples = 20000;
    std::vector<CurveRow> a = run_risk_curve(quad);
    std::vector<CurveRow> b = run_risk_curve(mc);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(b[i].std_error > 0.0);
        CHECK(std::abs(a[i].risk - b[i].risk) <= 4.0 * b[i].std_error);
    }
}

TEST_CASE("csv output is byte-stable and sorted") {
    ExperimentConfig cfg;
    cfg.spec.p = 1;
    cfg.spec.constraint = ConstraintSet::half_line(1);
    cfg.estimators = {parse_estimator("mle:2"), parse_estimator("mre")};
    cfg.delta_min = 0.0;
    cfg.delta_max = 1.0;
    cfg.delta_steps = 3;
    std::ostringstream s1, s2;
    write_curve_csv(s1, run_risk_curve(cfg));
    write_curve_csv(s2, run_risk_curve(cfg));
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().rfind("delta,estimator,risk,std_error,ratio_vs_mre\n", 0) == 0);
    // rows sorted by (delta, estimator)
    auto pos_mle = s1.str().find("0,mle:2");
    auto pos_mre = s1.str().find("0,mre");
    CHECK(pos_mle != std::string::npos);
    CHECK(pos_mle < pos_mre);
}

TEST_CASE("figure presets") {
    auto fig1 = figure_preset(1);
    REQUIRE(fig1.size() == 1);
    CHECK(fig1[0].second.delta_min == 0.0);
    CHECK(fig1[0].second.delta_max == 5.0);
    CHECK(fig1[0].second.delta_steps == 31);
    CHECK(fig1[0].second.estimators.size() == 4);

    auto fig2 = figure_preset(2);
    REQUIRE(fig2.size() == 3);
    CHECK(fig2[1].second.spec.sigma2_sq == 2.0);
    CHECK(fig2[2].second.spec.sigma2_sq == 4.0);

    auto fig3 = figure_preset(3);
    CHECK(fig3[0].second.spec.constraint.kind == ConstraintKind::Interval);
    CHECK(fig3[0].second.spec.constraint.m == 1.0);
    auto fig4 = figure_preset(4);
    CHECK(fig4[0].second.spec.constraint.m == 2.0);
    CHECK_THROWS_AS(figure_preset(5), ConfigError);

    // figure 3 symmetry of the quadrature curves about delta = 0
    auto rows = run_figure(3);
    for (const CurveRow& r : rows) {
        if (r.delta <= 0.0) continue;
        bool found = false;
        for (const CurveRow& s : rows)
            if (s.estimator == r.estimator && std::abs(s.delta + r.delta) < 1e-12) {
                CHECK(s.risk == Catch::Approx(r.risk).margin(1e-9));
                found = true;
            }
        CHECK(found);
    }
}

TEST_CASE("figure 2: uniform-prior gains shrink with sigma2^2, reversing at large delta") {
    auto rows = run_figure(2);
    auto gain = [&](double s2, double delta) {
        double bayes = 0.0, base = 0.0;
        for (const CurveRow& r : rows) {
            if (std::abs(r.delta - delta) > 1e-9) continue;
            if (r.estimator == "bayes-uniform(s2sq=" + format_g10(s2) + ")") bayes = r.risk;
            if (r.estimator == "mre(s2sq=" + format_g10(s2) + ")") base = r.risk;
        }
        REQUIRE(base > 0.0);
        return base - bayes;
    };
    // smaller sigma2^2 means sharper information: larger gains at small delta
    CHECK(gain(1.0, 0.5) > gain(2.0, 0.5));
    CHECK(gain(2.0, 0.5) > gain(4.0, 0.5));
    // slight reversal for large delta
    CHECK(gain(1.0, 4.0) < gain(2.0, 4.0));
}

TEST_CASE("misspecified risk curves fall back to the KL quadrature pair") {
    ExperimentConfig cfg;
    cfg.spec.p = 1;
    cfg.spec.constraint = ConstraintSet::half_line(1);
    cfg.spec.misspec = MisspecScheme{2.0, 1.0, 1.0};
    cfg.estimators = {parse_estimator("mre"), parse_estimator("bayes-uniform")};
    cfg.delta_min = 0.0;
    cfg.delta_max = 1.0;
    cfg.delta_steps = 3;
    auto rows = run_risk_curve(cfg);
    for (const CurveRow& r : rows)
        if (r.estimator == "bayes-uniform") CHECK(r.ratio_vs_mre <= 1.0 + 1e-12);
    // mc cross-check of the misspecified benchmark risk
    ExperimentConfig mc = cfg;
    mc.method = RiskCurveMethod::MonteCarlo;
    mc.mc_samples = 20000;
    mc.estimators = {parse_estimator("mre")};
    auto mrows = run_risk_curve(mc);
    double want = benchmark_mre_risk(cfg.loss, cfg.spec);
    for (const CurveRow& r : mrows) CHECK(std::abs(r.risk - want) <= 4.0 * r.std_error);
}

TEST_CASE("dominance report and density tabulation") {
    ProblemSpec spec;
    spec.p = 1;
    spec.constraint = ConstraintSet::half_line(1);
    std::ostringstream out;
    write_dominance_report(out, spec, {0.0}, {1.0, 2.0},
                           {MisspecScheme{1.0, 1.0, 1.0}, MisspecScheme{1.0, 1.0, 4.0}});
    std::string rep = out.str();
    CHECK(rep.find("expansion.r_lower = 0.75") != std::string::npos);
    CHECK(rep.find("expansion.minimal_complete = [1.75, 2]") != std::string::npos);
    CHECK(rep.find("expansion.bound_check.ok = true") != std::string::npos);
    CHECK(rep.find("dual[alpha=0,c=1].gamma0 = 2") != std::string::npos);
    CHECK(rep.find("persistence[0].holds = true") != std::string::npos);
    CHECK(rep.find("persistence[1].holds = false") != std::string::npos);

    ExperimentConfig cfg;
    cfg.spec = spec;
    std::ostringstream dens;
    write_density_eval(dens, cfg, parse_estimator("bayes-uniform"), {0.0}, {0.0}, -6.0, 6.0, 121);
    std::string csv = dens.str();
    CHECK(csv.rfind("y,estimator,density,log_density\n", 0) == 0);
    // trapezoid mass of the tabulated density
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    double mass = 0.0, prev_y = 0.0, prev_d = 0.0;
    bool first = true;
    while (std::getline(in, line)) {
        double y, d;
        std::sscanf(line.c_str(), "%lf,%*[^,],%lf", &y, &d);
        if (!first) mass += 0.5 * (d + prev_d) * (y - prev_y);
        prev_y = y;
        prev_d = d;
        first = false;
    }
    CHECK(mass == Catch::Approx(1.0).margin(1e-3));
}

TEST_CASE("fast verification level passes") {
    auto results = run_verify(false, 20240801);
    for (const auto& r : results) {
        INFO(r.name << ": " << r.detail);
        CHECK(r.pass);
    }
    CHECK(all_passed(results));
}
