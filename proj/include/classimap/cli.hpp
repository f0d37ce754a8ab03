#pragma once

#include <clocale>
#include <cstdint>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "classimap/error.hpp"
#include "classimap/geometry.hpp"
#include "classimap/io.hpp"
#include "classimap/metrics.hpp"
#include "classimap/optimizer.hpp"
#include "classimap/stress.hpp"

namespace classimap {
namespace detail {

// Shared dataset flags. Exactly one of --labels / --label-col selects the
// input kind: a labels file implies a distance-matrix input, a label column
// implies a feature CSV.
struct DatasetFlags {
    std::string input;
    std::string labels;
    std::string label_col;
    std::string metric = "euclidean";
};

inline void add_dataset_flags(CLI::App* cmd, DatasetFlags& f) {
    cmd->add_option("--input", f.input, "input file: feature CSV or distance matrix")->required();
    cmd->add_option("--labels", f.labels, "labels file, one per line (distance-matrix input)");
    cmd->add_option("--label-col", f.label_col, "name of the label column (feature CSV input)");
    cmd->add_option("--metric", f.metric, "feature-space metric (default euclidean)")
        ->check(CLI::IsMember({"euclidean", "manhattan"}));
}

inline Dataset load_from_flags(const DatasetFlags& f) {
    const bool has_labels = !f.labels.empty();
    const bool has_col = !f.label_col.empty();
    if (has_labels == has_col)
        throw InvalidArgument(
            "pass exactly one of --labels (distance-matrix input) or --label-col (feature CSV input)");
    DatasetSource src;
    src.path = f.input;
    if (has_labels) {
        src.kind = SourceKind::DistanceMatrix;
        src.labels_path = f.labels;
    } else {
        src.kind = SourceKind::FeatureTable;
        src.label_column = f.label_col;
        src.metric = f.metric == "manhattan" ? Metric::Manhattan : Metric::Euclidean;
    }
    return load_dataset(src);
}

struct MapFlags {
    DatasetFlags data;
    std::string method = "classimap";
    std::string init = "random";
    std::string normalize = "none";
    int epochs = 200;
    int steps_per_epoch = 0;
    double lambda_start = 0.9;
    double lambda_end = 0.1;
    double p = 1.0;
    double lr_start = 0.5;
    double lr_end = 0.01;
    std::uint64_t seed = 0;
    int workers = 1;
    bool cca_simplified_gradient = false;
    std::string out_coords;
    std::string out_trace;
};

inline int run_map(const MapFlags& f) {
    Dataset ds = load_from_flags(f.data);
    if (f.normalize == "mean") normalize_by_mean(ds.d);

    OptimizerConfig cfg;
    cfg.epochs = f.epochs;
    cfg.steps_per_epoch = f.steps_per_epoch;
    cfg.lambda_start = f.lambda_start;
    cfg.lambda_end = f.lambda_end;
    cfg.exponent = f.p;
    cfg.learning_rate_start = f.lr_start;
    cfg.learning_rate_end = f.lr_end;
    cfg.seed = f.seed;
    cfg.workers = f.workers;
    cfg.cca_simplified_gradient = f.cca_simplified_gradient;
    cfg.mode = f.method == "sammon"  ? StressMode::SammonWeighted
               : f.method == "cca"   ? StressMode::CCAWeighted
                                     : StressMode::ClassiMap;
    cfg.init = f.init == "mds" ? InitMethod::ClassicalMDS : InitMethod::RandomGaussian;

    std::string warning;
    const RunResult result = run(ds.d, ds.labels, cfg, &warning);
    if (!warning.empty()) std::cerr << "classimap: warning: " << warning << '\n';

    write_embedding(result.embedding, ds.labels, f.out_coords);
    std::cout << "wrote coordinates for " << result.embedding.size() << " points to " << f.out_coords
              << '\n';
    if (!f.out_trace.empty()) {
        const std::vector<std::pair<std::string, std::string>> annotations = {
            {"method", f.method},
            {"init", f.init},
            {"normalize", f.normalize},
            {"seed", std::to_string(f.seed)},
            {"workers", std::to_string(f.workers)},
            {"epochs", std::to_string(f.epochs)},
            {"p", format_g17(f.p)},
            {"lambda", format_g17(f.lambda_start) + " -> " + format_g17(f.lambda_end)},
            {"best_epoch", std::to_string(result.trace.best_epoch)},
            {"best_stress", format_g17(result.trace.best_stress)},
        };
        write_trace(result.trace, f.out_trace, annotations);
        std::cout << "wrote trace with " << result.trace.records.size() << " records to " << f.out_trace
                  << '\n';
    }
    std::cerr << "run finished in " << result.trace.duration_seconds << " s\n";
    return 0;
}

struct EvalFlags {
    DatasetFlags data;
    std::string coords;
    std::size_t k = 0;
    std::string out_report;
};

inline int run_eval(const EvalFlags& f) {
    Dataset ds = load_from_flags(f.data);
    const auto [embedding, coord_labels] = read_embedding(f.coords);
    if (embedding.size() != ds.d.size())
        throw SizeMismatch("coordinates file has " + std::to_string(embedding.size()) +
                           " points, dataset has " + std::to_string(ds.d.size()));
    for (std::size_t i = 0; i < coord_labels.size(); ++i)
        if (coord_labels[i] != ds.labels[i])
            throw DataError("label mismatch between dataset and coordinates file at row " +
                            std::to_string(i));
    const MapQualityReport report = evaluate_map(ds.d, embedding, ds.labels, f.k);
    std::cout << report_to_kv(report);
    if (!f.out_report.empty()) write_report(report, f.out_report);
    return 0;
}

struct PlotFlags {
    std::string coords;
    std::string out_svg;
    int width = 800;
    int height = 600;
    double point_radius = 3.0;
};

inline int run_plot(const PlotFlags& f) {
    const auto [embedding, labels] = read_embedding(f.coords);
    PlotSpec spec;
    spec.width = f.width;
    spec.height = f.height;
    spec.point_radius = f.point_radius;
    render_svg(embedding, labels, spec, f.out_svg);
    std::cout << "wrote svg with " << embedding.size() << " points to " << f.out_svg << '\n';
    return 0;
}

} // namespace detail

/// Entry point behind main(). Exit codes: 0 success, 1 usage error,
/// 2 data error, 3 numeric failure during descent.
inline int cli_main(int argc, const char* const* argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"classimap: supervised nonlinear mapping of labeled dissimilarity data"};
    app.require_subcommand(1);

    detail::MapFlags map_flags;
    CLI::App* map_cmd = app.add_subcommand("map", "embed a dataset into 2-D");
    detail::add_dataset_flags(map_cmd, map_flags.data);
    map_cmd->add_option("--method", map_flags.method, "stress flavor (default classimap)")
        ->check(CLI::IsMember({"classimap", "sammon", "cca"}));
    map_cmd->add_option("--epochs", map_flags.epochs, "annealing epochs (default 200)");
    map_cmd->add_option("--steps-per-epoch", map_flags.steps_per_epoch,
                        "anchor updates per epoch (default: one per point)");
    map_cmd->add_option("--lambda-start", map_flags.lambda_start, "initial lambda (default 0.9)");
    map_cmd->add_option("--lambda-end", map_flags.lambda_end, "final lambda (default 0.1)");
    map_cmd->add_option("--p", map_flags.p, "stress exponent (default 1)");
    map_cmd->add_option("--lr-start", map_flags.lr_start,
                        "initial learning rate, multiple of mean distance (default 0.5)");
    map_cmd->add_option("--lr-end", map_flags.lr_end,
                        "final learning rate, multiple of mean distance (default 0.01)");
    map_cmd->add_option("--seed", map_flags.seed, "random seed (default 0)");
    map_cmd->add_option("--init", map_flags.init, "initial layout (default random)")
        ->check(CLI::IsMember({"mds", "random"}));
    map_cmd->add_option("--workers", map_flags.workers, "parallel width for stress sums (default 1)");
    map_cmd->add_option("--normalize", map_flags.normalize,
                        "input distance normalization (default none)")
        ->check(CLI::IsMember({"none", "mean"}));
    map_cmd->add_flag("--cca-simplified-gradient", map_flags.cca_simplified_gradient,
                      "drop the map-weight derivative term of the between-class gradient");
    map_cmd->add_option("--out-coords", map_flags.out_coords, "output coordinates CSV")->required();
    map_cmd->add_option("--out-trace", map_flags.out_trace, "output per-epoch trace TSV");

    detail::EvalFlags eval_flags;
    CLI::App* eval_cmd = app.add_subcommand("eval", "score an embedding against its dataset");
    detail::add_dataset_flags(eval_cmd, eval_flags.data);
    eval_cmd->add_option("--coords", eval_flags.coords, "coordinates CSV produced by map")->required();
    eval_cmd->add_option("--k", eval_flags.k, "neighborhood size (default: 10, capped for small n)");
    eval_cmd->add_option("--out-report", eval_flags.out_report, "also write the report to this file");

    detail::PlotFlags plot_flags;
    CLI::App* plot_cmd = app.add_subcommand("plot", "render a coordinates CSV as an SVG scatter plot");
    plot_cmd->add_option("--coords", plot_flags.coords, "coordinates CSV produced by map")->required();
    plot_cmd->add_option("--out-svg", plot_flags.out_svg, "output SVG file")->required();
    plot_cmd->add_option("--width", plot_flags.width, "plot width in pixels (default 800)");
    plot_cmd->add_option("--height", plot_flags.height, "plot height in pixels (default 600)");
    plot_cmd->add_option("--point-radius", plot_flags.point_radius, "point radius in pixels (default 3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(map_cmd)) return detail::run_map(map_flags);
        if (app.got_subcommand(eval_cmd)) return detail::run_eval(eval_flags);
        return detail::run_plot(plot_flags);
    } catch (const NonFiniteUpdate& err) {
        std::cerr << "classimap: numeric failure: " << err.what() << '\n';
        return 3;
    } catch (const InvalidArgument& err) {
        std::cerr << "classimap: usage error: " << err.what() << '\n';
        return 1;
    } catch (const DataError& err) {
        std::cerr << "classimap: data error: " << err.what() << '\n';
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "classimap: error: " << err.what() << '\n';
        return 2;
    }
}

} // namespace classimap
