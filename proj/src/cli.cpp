#include "searchbias/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "searchbias/bias_metrics.hpp"
#include "searchbias/expressivity.hpp"
#include "searchbias/numeric.hpp"
#include "searchbias/resource_io.hpp"
#include "searchbias/search_core.hpp"
#include "searchbias/verify.hpp"

namespace searchbias {

namespace {

using nlohmann::json;

std::vector<double> parse_csv_doubles(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw InvalidParameter(what + ": cannot parse '" + item + "' as a number");
        }
    }
    if (out.empty()) {
        throw InvalidParameter(what + ": empty list");
    }
    return out;
}

// "--target 0,2,5" for one explicit target, "--target k=2" for all k-subsets.
struct TargetSpec {
    std::optional<TargetFunction> single;
    int k = 0;

    static TargetSpec parse(const std::string& text, int omega_size) {
        TargetSpec spec;
        if (text.rfind("k=", 0) == 0) {
            try {
                spec.k = std::stoi(text.substr(2));
            } catch (const std::exception&) {
                throw InvalidParameter("target: cannot parse '" + text + "'");
            }
            if (spec.k < 1 || spec.k > omega_size) {
                throw InvalidParameter("target: k must lie in [1, " +
                                       std::to_string(omega_size) + "]");
            }
            return spec;
        }
        const std::vector<double> raw = parse_csv_doubles(text, "target");
        std::vector<int> indices;
        indices.reserve(raw.size());
        for (double v : raw) {
            const int i = static_cast<int>(v);
            if (static_cast<double>(i) != v) {
                throw InvalidParameter("target: index '" + format_double(v) +
                                       "' is not an integer");
            }
            indices.push_back(i);
        }
        std::sort(indices.begin(), indices.end());
        spec.single = TargetFunction(omega_size, std::move(indices));
        spec.k = spec.single->k();
        return spec;
    }
};

// Write-to-temp-then-rename so readers never observe a partial file.
void write_output(const std::string& text, const std::string& out_path, std::ostream& fallback) {
    if (out_path.empty()) {
        fallback << text;
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(out_path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw Error("cannot open '" + tmp.string() + "' for writing");
        }
        f << text;
        if (!f.good()) {
            throw Error("failed while writing '" + tmp.string() + "'");
        }
    }
    fs::rename(tmp, target);
}

struct ResourceArgs {
    std::string path;
    std::string weights_csv;
    std::string algorithm = "greedy:0.5";
    int runs = 512;
    int workers = 1;
    std::uint64_t seed = 1;

    void attach(CLI::App& cmd, bool with_seed = true) {
        cmd.add_option("--resources", path, "resource-set JSON file")->required();
        cmd.add_option("--weights", weights_csv,
                       "comma-separated resource weights (overrides the file's)");
        cmd.add_option("--algorithm", algorithm,
                       "search algorithm for fitness resources: uniform | greedy:<g>");
        cmd.add_option("--runs", runs, "runs per fitness resource when inducing strategies")
            ->check(CLI::PositiveNumber);
        cmd.add_option("--workers", workers, "worker threads for strategy induction")
            ->check(CLI::PositiveNumber);
        if (with_seed) {
            cmd.add_option("--seed", seed, "master random seed");
        }
    }

    struct Loaded {
        ResourceFile file;
        StrategyMap strategies;
        ResourceDistribution dist;
    };

    Loaded load() const {
        ResourceFile file = load_resource_file(path);
        const AlgorithmSpec alg = AlgorithmSpec::parse(algorithm);
        StrategyMap strategies = induced_strategies(file.set, alg, runs, seed, workers);
        ResourceDistribution dist =
            weights_csv.empty()
                ? file.distribution()
                : file.distribution(parse_csv_doubles(weights_csv, "weights"));
        return Loaded{std::move(file), std::move(strategies), std::move(dist)};
    }
};

int cmd_bias(const ResourceArgs& args, const std::string& target_text,
             const std::string& out_path, std::ostream& out) {
    const auto loaded = args.load();
    const int n = loaded.file.set.space_size;
    const TargetSpec spec = TargetSpec::parse(target_text, n);

    json doc;
    doc["command"] = "bias";
    doc["resources"] = args.path;
    doc["omega_size"] = n;
    doc["weights"] = loaded.dist.weights;
    doc["k"] = spec.k;
    doc["p"] = static_cast<double>(spec.k) / n;

    const StrategyDistribution mixture = mix_strategies(loaded.dist, loaded.strategies);
    if (spec.single) {
        const TargetFunction& t = *spec.single;
        doc["target"] = std::vector<int>(t.indices().begin(), t.indices().end());
        doc["bias"] = bias_of_strategy(mixture, t);
        doc["mixture_success"] = per_query_success(t, mixture);
        json per;
        for (const auto& r : loaded.file.set.resources) {
            per[r.id] = per_query_success(t, loaded.strategies.at(r.id));
        }
        doc["per_resource_success"] = per;
    } else {
        const BiasExtrema ex = bias_extrema(mixture, spec.k);
        doc["targets"] = binomial_checked(n, spec.k);
        doc["sup_bias"] = ex.sup_bias;
        doc["inf_bias"] = ex.inf_bias;
        doc["sup_bound"] = ex.sup_bound;
        doc["conservation_sum"] = conservation_sum(mixture, spec.k);
    }
    write_output(doc.dump(2) + "\n", out_path, out);
    return 0;
}

int cmd_expressivity(const ResourceArgs& args, const std::string& out_path, std::ostream& out) {
    const auto loaded = args.load();
    const StrategyDistribution mixture = mix_strategies(loaded.dist, loaded.strategies);

    KahanSum expected_entropy;
    json per;
    for (std::size_t j = 0; j < loaded.file.set.resources.size(); ++j) {
        const auto& id = loaded.file.set.resources[j].id;
        const double h = entropy_bits(loaded.strategies.at(id));
        per[id] = h;
        expected_entropy.add(loaded.dist.weights[j] * h);
    }
    const double mixture_entropy = entropy_bits(mixture);

    json doc;
    doc["command"] = "expressivity";
    doc["resources"] = args.path;
    doc["omega_size"] = loaded.file.set.space_size;
    doc["weights"] = loaded.dist.weights;
    doc["entropy_bits"] = mixture_entropy;
    doc["kl_to_uniform_bits"] = kl_to_uniform(mixture);
    doc["per_resource_entropy_bits"] = per;
    doc["expected_entropy_bits"] = expected_entropy.value();
    doc["jensen_gap_bits"] = mixture_entropy - expected_entropy.value();
    doc["bias_upper"] = tradeoff_bias_upper(mixture);
    doc["expected_bias_upper"] = expected_expressivity_bias_upper(loaded.dist, loaded.strategies);
    write_output(doc.dump(2) + "\n", out_path, out);
    return 0;
}

int cmd_estimate(const ResourceArgs& args, const std::string& target_text, int n, double epsilon,
                 int trials, const std::string& out_path, std::ostream& out) {
    const auto loaded = args.load();
    const TargetSpec spec = TargetSpec::parse(target_text, loaded.file.set.space_size);
    if (!spec.single) {
        throw InvalidParameter("estimate: needs an explicit --target index list");
    }
    const HoeffdingResult res = hoeffding_experiment(loaded.dist, loaded.strategies, *spec.single,
                                                     n, epsilon, trials, args.seed);
    json doc;
    doc["command"] = "estimate";
    doc["resources"] = args.path;
    doc["target"] =
        std::vector<int>(spec.single->indices().begin(), spec.single->indices().end());
    doc["n"] = res.sample_size;
    doc["epsilon"] = res.epsilon;
    doc["trials"] = res.trials;
    doc["seed"] = args.seed;
    doc["actual_bias"] = bias(loaded.dist, loaded.strategies, *spec.single);
    doc["exceedance_frequency"] = res.exceedance_frequency;
    doc["bound"] = res.bound;
    doc["within_bound"] = res.exceedance_frequency <= res.bound;
    write_output(doc.dump(2) + "\n", out_path, out);
    return 0;
}

int cmd_bound_curve(double inf_bias, const std::string& grid_csv, const std::string& format,
                    const std::string& out_path, std::ostream& out) {
    if (inf_bias > 0.0) {
        throw InvalidParameter("bound-curve: inf-bias must be <= 0");
    }
    std::vector<double> grid;
    if (grid_csv.empty()) {
        for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
    } else {
        grid = parse_csv_doubles(grid_csv, "p-grid");
    }
    for (double p : grid) {
        if (!(p > 0.0 && p < 1.0)) {
            throw InvalidParameter("bound-curve: p values must lie in (0, 1), got " +
                                   format_double(p));
        }
    }
    std::string text;
    if (format == "json") {
        json doc;
        doc["command"] = "bound-curve";
        doc["inf_bias"] = inf_bias;
        doc["rows"] = json::array();
        for (double p : grid) {
            const double m = (p - 1.0) / p;
            doc["rows"].push_back({{"p", p}, {"m", m}, {"bound", m * inf_bias}});
        }
        text = doc.dump(2) + "\n";
    } else {
        std::ostringstream csv;
        csv << "p,m,bound\n";
        for (double p : grid) {
            const double m = (p - 1.0) / p;
            csv << format_double(p) << ',' << format_double(m) << ','
                << format_double(m * inf_bias) << '\n';
        }
        text = csv.str();
    }
    write_output(text, out_path, out);
    return 0;
}

int cmd_table(int n, int k, const std::string& format, const std::string& out_path,
              std::ostream& out) {
    const auto rows = table_of_ranges(n, k);
    const double p = static_cast<double>(k) / n;
    const double eps_values[3] = {-p, 0.0, 1.0 - p};
    std::string text;
    if (format == "json") {
        json doc;
        doc["command"] = "table";
        doc["omega_size"] = n;
        doc["k"] = k;
        doc["rows"] = json::array();
        for (int i = 0; i < 3; ++i) {
            doc["rows"].push_back({{"eps", eps_values[i]},
                                   {"expected_mass_on_target", rows[static_cast<std::size_t>(i)].p_plus_eps},
                                   {"lower_bits", rows[static_cast<std::size_t>(i)].lower},
                                   {"upper_bits", rows[static_cast<std::size_t>(i)].upper}});
        }
        text = doc.dump(2) + "\n";
    } else {
        std::ostringstream csv;
        csv << "eps,expected_mass_on_target,lower_bits,upper_bits\n";
        for (int i = 0; i < 3; ++i) {
            const auto& row = rows[static_cast<std::size_t>(i)];
            csv << format_double(eps_values[i]) << ',' << format_double(row.p_plus_eps) << ','
                << format_double(row.lower) << ',' << format_double(row.upper) << '\n';
        }
        text = csv.str();
    }
    write_output(text, out_path, out);
    return 0;
}

int cmd_verify(const VerifyConfig& config, const std::string& format, const std::string& out_path,
               std::ostream& out, std::ostream& err) {
    const VerificationReport report = verify_all(config);
    for (const auto& check : report.checks) {
        err << (check.passed ? "PASS " : "FAIL ") << check.name << " (observed "
            << format_double(check.observed) << ", limit "
            << format_double(check.bound_or_expected + check.tolerance) << ")\n";
    }
    err << (report.all_passed() ? "all checks passed" : "CHECK FAILURES PRESENT") << " in "
        << report.elapsed_ms << " ms\n";
    write_output(format == "csv" ? report_to_csv(report) : report_to_json(report), out_path, out);
    return report.all_passed() ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"bias and entropic-expressivity analysis for black-box search"};
    app.require_subcommand(1);

    // bias
    auto* bias_cmd = app.add_subcommand("bias", "bias of a resource mixture on a target");
    ResourceArgs bias_args;
    bias_args.attach(*bias_cmd);
    std::string bias_target;
    std::string bias_out;
    bias_cmd->add_option("--target", bias_target, "indices '0,2,5' or 'k=<int>' for all targets")
        ->required();
    bias_cmd->add_option("--out", bias_out, "write the JSON record here");

    // expressivity
    auto* expr_cmd = app.add_subcommand("expressivity", "entropy metrics of a resource mixture");
    ResourceArgs expr_args;
    expr_args.attach(*expr_cmd);
    std::string expr_out;
    expr_cmd->add_option("--out", expr_out, "write the JSON record here");

    // estimate
    auto* est_cmd =
        app.add_subcommand("estimate", "empirical-vs-actual bias concentration experiment");
    ResourceArgs est_args;
    est_args.attach(*est_cmd);
    std::string est_target;
    std::string est_out;
    int est_n = 100;
    double est_eps = 0.1;
    int est_trials = 10000;
    est_cmd->add_option("--target", est_target, "target indices '0,2,5'")->required();
    est_cmd->add_option("--n", est_n, "sample size per trial")->required()->check(
        CLI::PositiveNumber);
    est_cmd->add_option("--epsilon", est_eps, "deviation threshold")->required();
    est_cmd->add_option("--trials", est_trials, "number of trials")->check(CLI::PositiveNumber);
    est_cmd->add_option("--out", est_out, "write the JSON record here");

    // bound-curve
    auto* curve_cmd = app.add_subcommand(
        "bound-curve", "bias upper bound ((p-1)/p)*inf_bias across a grid of p");
    double curve_inf_bias = 0.0;
    std::string curve_grid;
    std::string curve_out;
    std::string curve_format = "csv";
    curve_cmd->add_option("--inf-bias", curve_inf_bias, "infimum bias (<= 0)")->required();
    curve_cmd->add_option("--p-grid", curve_grid, "comma-separated p values in (0,1)");
    curve_cmd->add_option("--out", curve_out, "write rows here");
    curve_cmd->add_option("--format", curve_format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));

    // table
    auto* table_cmd =
        app.add_subcommand("table", "expressivity ranges at minimum, zero, and maximum bias");
    int table_n = 0;
    int table_k = 0;
    std::string table_out;
    std::string table_format = "csv";
    table_cmd->add_option("--n", table_n, "search-space size")->required()->check(
        CLI::PositiveNumber);
    table_cmd->add_option("--k", table_k, "target size")->required()->check(CLI::PositiveNumber);
    table_cmd->add_option("--out", table_out, "write rows here");
    table_cmd->add_option("--format", table_format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));

    // verify
    auto* verify_cmd =
        app.add_subcommand("verify", "run the numerical verification suite and emit a report");
    VerifyConfig config;
    std::string verify_out;
    std::string verify_format = "json";
    verify_cmd->add_option("--seed", config.seed, "master random seed");
    verify_cmd->add_option("--grid-n", config.enum_n, "exhaustive sweeps up to this space size")
        ->check(CLI::Range(4, 12));
    verify_cmd->add_option("--samples", config.mc_samples, "Monte Carlo draws per check");
    verify_cmd->add_option("--trials", config.trials, "concentration-experiment trials");
    verify_cmd->add_option("--reps", config.random_reps, "random instances per grid point");
    verify_cmd->add_option("--ensembles", config.ensembles, "random ensembles per check");
    verify_cmd->add_option("--only", config.only,
                           "run only checks matching these names (substring or glob)");
    verify_cmd->add_option("--workers", config.workers, "worker threads (0 = hardware)");
    verify_cmd->add_option("--out", verify_out, "write the report here");
    verify_cmd->add_option("--format", verify_format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (bias_cmd->parsed()) {
            return cmd_bias(bias_args, bias_target, bias_out, out);
        }
        if (expr_cmd->parsed()) {
            return cmd_expressivity(expr_args, expr_out, out);
        }
        if (est_cmd->parsed()) {
            return cmd_estimate(est_args, est_target, est_n, est_eps, est_trials, est_out, out);
        }
        if (curve_cmd->parsed()) {
            return cmd_bound_curve(curve_inf_bias, curve_grid, curve_format, curve_out, out);
        }
        if (table_cmd->parsed()) {
            return cmd_table(table_n, table_k, table_format, table_out, out);
        }
        if (verify_cmd->parsed()) {
            return cmd_verify(config, verify_format, verify_out, out, err);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "usage error: no subcommand given\n";
    return 2;
}

}  // namespace searchbias
