#pragma once

// JSON and CSV renderings of results, and the simulation grid file.

#include <json.hpp>

#include <iosfwd>
#include <span>
#include <vector>

#include "froc/dataset.hpp"
#include "froc/distributions.hpp"
#include "froc/empirical.hpp"
#include "froc/idca.hpp"
#include "froc/indices.hpp"
#include "froc/simulator.hpp"

namespace froc {

using Json = nlohmann::ordered_json;

Json to_json(const ScoreDistribution& d);
Json to_json(const IdcaFit& fit);
Json to_json(const IndexEstimate& est);
Json to_json(const EllipseSpec& spec);
Json to_json(const SummaryStats& stats);
Json to_json(const ValidationReport& report);
Json to_json(const KsResult& ks);
Json to_json(const std::vector<CurvePoint>& curve);
Json to_json(const EmpiricalAfroc& curve);

// `fpf,llf,band_low,band_high`, band columns empty when absent.
void write_curve_csv(const std::vector<CurvePoint>& curve, std::ostream& out);
// `fpf,llf`.
void write_empirical_curve_csv(const EmpiricalAfroc& curve, std::ostream& out);
// `h1,h2` boundary points.
void write_ellipse_csv(const EllipseSpec& spec, std::ostream& out);

// Simulation grid: every scenario key may hold a scalar or a list; lists
// expand into the cartesian product. Recognized keys: lambda, p0, sigma0
// (sets sigma01 and sigma02), sigma01, sigma02, n (sets n_pos and n_neg),
// n_pos, n_neg, lesions_per_subject, lambda2, mu1, mu2, sigma1, sigma2, q,
// replications, alpha, bootstrap, seed, methods, indices.
struct SimulationGrid {
    std::vector<SimConfig> scenarios;
    std::vector<Method> methods{Method::Proposed};
    std::vector<IndexKind> indices{IndexKind::Auc};
};

SimulationGrid parse_simulation_grid(const Json& doc);

// `lambda,p0,sigma01,n,coverage,length,method,index`.
void write_coverage_header(std::ostream& out);
void write_coverage_rows(const CoverageResult& result, std::ostream& out);

}  // namespace froc
