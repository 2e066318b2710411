// froc: fit the IDCA model to FROC data and report AFROC indices.

#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "froc/dataset.hpp"
#include "froc/distributions.hpp"
#include "froc/empirical.hpp"
#include "froc/errors.hpp"
#include "froc/idca.hpp"
#include "froc/indices.hpp"
#include "froc/io.hpp"
#include "froc/simulator.hpp"

namespace {

using froc::Json;

struct Options {
    std::string subjects;
    std::string marks;
    std::string tp_dist = "normal";
    std::string fp_dist = "normal";
    std::string rescale = "none";
    double alpha = 0.05;
    std::uint64_t seed = 1;
    std::string out;
    std::string format;
    int threads = 0;

    double fpf = 0.1;
    bool logit = false;
    int points = 101;
    bool band = false;
    std::string indices = "auc,lambda2";
    std::string df = "m";
    int bootstrap = 1000;
    std::string config;
    std::string subjects_out;
    std::string marks_out;
    long replicate = 0;
};

enum class Kind { Data = 1, Numerical = 2 };

struct CliError {
    Kind kind;
    std::string message;
};

void add_data_flags(CLI::App* cmd, Options& o, bool with_models) {
    cmd->add_option("--subjects", o.subjects, "Subjects CSV (subject_id,status,n_lesions)")->required();
    cmd->add_option("--marks", o.marks, "Marks CSV (subject_id,kind,lesion_index,score)")->required();
    cmd->add_option("--rescale", o.rescale, "Monotone score map applied first: none|minmax|log|affine:a,b");
    if (with_models) {
        cmd->add_option("--tp-dist", o.tp_dist, "TP score family")->check(CLI::IsMember({"normal", "beta"}));
        cmd->add_option("--fp-dist", o.fp_dist, "FP score family")->check(CLI::IsMember({"normal", "beta"}));
    }
}

void add_common_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--alpha", o.alpha, "Significance level")->check(CLI::Range(1e-12, 1.0 - 1e-12));
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--out", o.out, "Output path (default stdout)");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--threads", o.threads, "Worker threads, 0 = auto (FROC_THREADS overrides)")
        ->check(CLI::NonNegativeNumber);
}

froc::FrocDataset load(const Options& o) {
    froc::FrocDataset ds = froc::load_dataset(o.subjects, o.marks);
    if (o.rescale != "none") ds = froc::rescale_scores(ds, froc::parse_monotone_map(o.rescale));
    return ds;
}

froc::FrocDataset prepare_for_fit(froc::FrocDataset ds, froc::Family tp, froc::Family fp) {
    if (tp != froc::Family::Beta && fp != froc::Family::Beta) return ds;
    return froc::shrink_unit_boundary(ds);
}

froc::IdcaFit fit_from(const Options& o, froc::FrocDataset* prepared = nullptr) {
    const auto tp = froc::parse_family(o.tp_dist);
    const auto fp = froc::parse_family(o.fp_dist);
    froc::FrocDataset ds = prepare_for_fit(load(o), tp, fp);
    froc::IdcaFit f = froc::fit(ds, tp, fp);
    if (prepared) *prepared = std::move(ds);
    return f;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

class Output {
public:
    explicit Output(const std::string& path) : path_(path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw CliError{Kind::Data, "cannot open output path '" + path + "' for writing"};
        }
    }
    std::ostream& stream() { return path_.empty() ? std::cout : file_; }

private:
    std::string path_;
    std::ofstream file_;
};

void write_json(const Json& j, const std::string& path) {
    Output out(path);
    out.stream() << j.dump(2) << '\n';
}

froc::SimulationGrid load_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError{Kind::Data, "cannot open config '" + path + "'"};
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw CliError{Kind::Data, std::string("config is not valid JSON: ") + e.what()};
    }
    return froc::parse_simulation_grid(doc);
}

int run(int argc, char** argv) {
    CLI::App app{"FROC / AFROC analysis under the IDCA model"};
    app.require_subcommand(1);
    Options o;

    auto* summary = app.add_subcommand("summary", "Dataset counts and fit-readiness report");
    add_data_flags(summary, o, false);
    add_common_flags(summary, o);

    auto* fit = app.add_subcommand("fit", "Fit the IDCA model; emits parameters, covariance and KS checks");
    add_data_flags(fit, o, true);
    add_common_flags(fit, o);

    auto* auc = app.add_subcommand("auc", "AFROC AUC with delta-method confidence interval");
    add_data_flags(auc, o, true);
    add_common_flags(auc, o);

    auto* llf = app.add_subcommand("llf", "LLF at a fixed FPF with confidence interval");
    add_data_flags(llf, o, true);
    add_common_flags(llf, o);
    llf->add_option("--fpf", o.fpf, "False positive fraction q")->required();
    llf->add_flag("--logit", o.logit, "Build the interval on the logit scale");

    auto* curve = app.add_subcommand("curve", "Smooth AFROC curve, optionally with a pointwise band");
    add_data_flags(curve, o, true);
    add_common_flags(curve, o);
    curve->add_option("--points", o.points, "Number of curve points")->check(CLI::Range(2, 1000000));
    curve->add_flag("--band", o.band, "Add the pointwise LLF confidence band");
    curve->add_flag("--logit", o.logit, "Band on the logit scale");

    auto* ellipse = app.add_subcommand("ellipse", "Joint confidence region for several indices");
    add_data_flags(ellipse, o, true);
    add_common_flags(ellipse, o);
    ellipse->add_option("--indices", o.indices, "Comma-separated indices: auc, llf@q, p, lambda, lambda2, theta1.mu, ...");
    ellipse->add_option("--df", o.df, "Chi-square degrees of freedom")->check(CLI::IsMember({"m", "m-1"}));

    auto* empirical = app.add_subcommand("empirical", "Empirical AFROC AUC with bootstrap interval");
    add_data_flags(empirical, o, false);
    add_common_flags(empirical, o);
    empirical->add_option("--bootstrap", o.bootstrap, "Bootstrap replicates")->check(CLI::Range(100, 100000000));

    auto* simulate = app.add_subcommand("simulate", "Coverage study over a scenario grid");
    add_common_flags(simulate, o);
    simulate->add_option("--config", o.config, "Scenario grid JSON")->required();

    auto* generate = app.add_subcommand("generate", "Write one simulated dataset as subjects/marks CSVs");
    generate->add_option("--config", o.config, "Scenario JSON (first scenario of the grid is used)")->required();
    generate->add_option("--replicate", o.replicate, "Replicate index")->check(CLI::NonNegativeNumber);
    generate->add_option("--subjects-out", o.subjects_out, "Subjects CSV path")->required();
    generate->add_option("--marks-out", o.marks_out, "Marks CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        throw CliError{Kind::Data, e.what()};
    }

    if (const char* env = std::getenv("FROC_THREADS")) {
        try {
            o.threads = std::stoi(env);
        } catch (const std::exception&) {
            throw CliError{Kind::Data, "FROC_THREADS must be an integer"};
        }
        if (o.threads < 0) throw CliError{Kind::Data, "FROC_THREADS must be >= 0"};
    }
    if (o.threads > 0) omp_set_num_threads(o.threads);

    if (*summary) {
        const auto ds = load(o);
        write_json(Json{{"summary", froc::to_json(froc::summary_stats(ds))},
                        {"validation", froc::to_json(froc::validate(ds))}},
                   o.out);
    } else if (*fit) {
        froc::FrocDataset ds;
        const auto f = fit_from(o, &ds);
        Json j = froc::to_json(f);
        Json gof{{"theta1", froc::to_json(froc::ks_test(f.params.theta1, ds.all_tp_scores()))},
                 {"theta2", froc::to_json(froc::ks_test(f.params.theta2, ds.fp_scores_on_negatives()))}};
        gof["theta3"] = f.params.theta3 ? froc::to_json(froc::ks_test(*f.params.theta3, ds.fp_scores_on_positives()))
                                        : Json(nullptr);
        j["goodness_of_fit"] = gof;
        write_json(j, o.out);
    } else if (*auc) {
        const auto f = fit_from(o);
        write_json(froc::to_json(froc::ci_index(f, froc::auc_index(), o.alpha)), o.out);
    } else if (*llf) {
        const auto f = fit_from(o);
        const double top = froc::max_fpf(f.params);
        if (!(o.fpf > 0.0) || o.fpf >= top)
            throw froc::NumericalError("--fpf " + std::to_string(o.fpf) + " outside the attainable range (0, " +
                                       std::to_string(top) + "); max FPF = 1 - exp(-lambda_hat)");
        Json j;
        if (o.logit) {
            const double grid[] = {o.fpf};
            const auto pts = froc::ci_llf_pointwise(f, grid, o.alpha, true);
            if (pts.empty()) throw froc::NumericalError("--fpf too close to the maximal FPF " + std::to_string(top));
            if (pts[0].error) throw froc::NumericalError(*pts[0].error);
            const auto plain = froc::ci_index(f, froc::llf_index(o.fpf), o.alpha);
            j = Json{{"name", plain.name},          {"value", pts[0].llf},          {"stderr", plain.std_error},
                     {"ci_low", *pts[0].band_low}, {"ci_high", *pts[0].band_high}, {"alpha", o.alpha},
                     {"transform", "logit"}};
        } else {
            j = froc::to_json(froc::ci_index(f, froc::llf_index(o.fpf), o.alpha));
        }
        j["fpf"] = o.fpf;
        write_json(j, o.out);
    } else if (*curve) {
        const auto f = fit_from(o);
        auto pts = froc::afroc_curve(f.params, o.points);
        if (o.band) {
            std::vector<double> grid;
            std::vector<std::size_t> where;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (pts[i].fpf >= froc::kBandEdgeEpsilon && pts[i].fpf <= froc::max_fpf(f.params) - froc::kBandEdgeEpsilon) {
                    grid.push_back(pts[i].fpf);
                    where.push_back(i);
                }
            }
            const auto band = froc::ci_llf_pointwise(f, grid, o.alpha, o.logit);
            for (std::size_t k = 0; k < band.size(); ++k) {
                auto& p = pts[where[k]];
                p.band_low = band[k].band_low;
                p.band_high = band[k].band_high;
                p.error = band[k].error;
            }
        }
        if (o.format == "json") {
            write_json(froc::to_json(pts), o.out);
        } else {
            Output out(o.out);
            froc::write_curve_csv(pts, out.stream());
        }
    } else if (*ellipse) {
        const auto f = fit_from(o);
        std::vector<froc::IndexFunction> fns;
        for (const auto& name : split_list(o.indices)) fns.push_back(froc::parse_index(name));
        const auto spec = froc::confidence_ellipse(f, fns, o.alpha, o.df == "m" ? froc::DfMode::M : froc::DfMode::MMinus1);
        if (o.format == "csv") {
            if (o.out.empty()) throw CliError{Kind::Data, "ellipse --format csv needs --out (a JSON sidecar is written next to it)"};
            Output out(o.out);
            froc::write_ellipse_csv(spec, out.stream());
            write_json(froc::to_json(spec), o.out + ".json");
        } else {
            write_json(froc::to_json(spec), o.out);
        }
    } else if (*empirical) {
        const auto ds = load(o);
        if (o.format == "csv") {
            Output out(o.out);
            froc::write_empirical_curve_csv(froc::empirical_curve(ds), out.stream());
        } else {
            write_json(froc::to_json(froc::bootstrap_ci(ds, o.bootstrap, o.alpha, o.seed, o.threads)), o.out);
        }
    } else if (*generate) {
        const auto grid = load_grid(o.config);
        const auto ds = froc::generate_dataset(grid.scenarios.front(), o.replicate);
        Output subjects(o.subjects_out);
        froc::write_subjects_csv(ds, subjects.stream());
        Output marks(o.marks_out);
        froc::write_marks_csv(ds, marks.stream());
    } else if (*simulate) {
        auto grid = load_grid(o.config);
        Json rows = Json::array();
        Output out(o.out);
        if (o.format != "json") froc::write_coverage_header(out.stream());
        for (auto cfg : grid.scenarios) {
            if (o.threads > 0) cfg.threads = o.threads;
            const auto result = froc::coverage_experiment(cfg, grid.methods, grid.indices);
            if (o.format == "json") {
                for (const auto& c : result.cells)
                    rows.push_back({{"lambda", cfg.lambda},
                                    {"p0", cfg.p0},
                                    {"sigma01", cfg.sigma01},
                                    {"n", cfg.n_pos},
                                    {"coverage", c.coverage},
                                    {"length", c.mean_ci_length},
                                    {"method", froc::method_name(c.method)},
                                    {"index", froc::index_kind_name(c.index)},
                                    {"truth", c.truth},
                                    {"replications_used", c.replications_used},
                                    {"failures", c.failures}});
            } else {
                froc::write_coverage_rows(result, out.stream());
            }
        }
        if (o.format == "json") out.stream() << rows.dump(2) << '\n';
    }
    return 0;
}

int report(Kind kind, const std::string& message) {
    const Json err{{"error",
                    {{"code", static_cast<int>(kind)},
                     {"kind", kind == Kind::Data ? "data" : "numerical"},
                     {"message", message}}}};
    std::cerr << err.dump() << '\n';
    return static_cast<int>(kind);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CliError& e) {
        return report(e.kind, e.message);
    } catch (const froc::NumericalError& e) {
        return report(Kind::Numerical, e.what());
    } catch (const froc::DataError& e) {
        return report(Kind::Data, e.what());
    } catch (const std::exception& e) {
        return report(Kind::Data, e.what());
    }
}
