#include <doctest.h>

#include <sstream>

#include "froc/errors.hpp"
#include "froc/io.hpp"

using namespace froc;

TEST_CASE("simulation grid expands lists") {
    const auto g = parse_simulation_grid(Json::parse(R"({"lambda": [0.5, 1, 1.5], "p0": [0.6, 0.8],
        "sigma0": [0, 0.3], "n": 50, "replications": 200, "methods": ["proposed", "empirical"], "indices": "auc"})"));
    CHECK(g.scenarios.size() == 12);
    CHECK(g.methods.size() == 2);
    CHECK(g.indices == std::vector<IndexKind>{IndexKind::Auc});
    CHECK(g.scenarios.front().n_pos == 50);
    CHECK(g.scenarios.front().n_neg == 50);
    CHECK(g.scenarios.back().sigma02 == 0.3);
    CHECK(g.scenarios.back().lambda == 1.5);

    CHECK_THROWS_AS(parse_simulation_grid(Json::parse(R"({"lamda": 1})")), DataError);
    CHECK_THROWS_AS(parse_simulation_grid(Json::parse(R"({"lambda": "x"})")), DataError);
    CHECK_THROWS_AS(parse_simulation_grid(Json::parse(R"({"p0": 1.5})")), DataError);
    CHECK_THROWS_AS(parse_simulation_grid(Json::parse(R"({"methods": ["bayes"]})")), DataError);
}

TEST_CASE("JSON renderings") {
    IndexEstimate e{"afroc_auc", 0.7, 0.03, 0.64, 0.76, 0.05};
    const auto j = to_json(e);
    CHECK(j["stderr"] == 0.03);
    CHECK(j.size() == 6);

    const auto d = to_json(ScoreDistribution::beta(2, 3));
    CHECK(d["family"] == "beta");
    CHECK(d["params"]["alpha"] == 2.0);

    std::vector<CurvePoint> pts(2);
    pts[1] = {0.5, 0.4, 0.3, 0.5, std::nullopt};
    std::ostringstream out;
    write_curve_csv(pts, out);
    CHECK(out.str() == "fpf,llf,band_low,band_high\n0,0,,\n0.5,0.4,0.3,0.5\n");

    std::ostringstream header;
    write_coverage_header(header);
    CHECK(header.str() == "lambda,p0,sigma01,n,coverage,length,method,index\n");
}
