#include "genmetrics/embed_io.hpp"
#include "genmetrics/metrics.hpp"
#include "genmetrics/synthlab.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace gm = genmetrics;
using nlohmann::json;

namespace {

// start:stop:count, endpoints inclusive
std::vector<double> parse_grid(const std::string& text) {
    double start = 0.0, stop = 0.0;
    int count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> start >> c1 >> stop >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1) {
        throw CLI::ValidationError("--grid", "expected start:stop:count, got '" + text + "'");
    }
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        grid.push_back(start);
        return grid;
    }
    for (int i = 0; i < count; ++i) {
        grid.push_back(start + (stop - start) * i / (count - 1));
    }
    return grid;
}

std::vector<gm::MetricFamily> parse_families(const std::string& text) {
    if (text == "all") {
        return {gm::MetricFamily::ipr, gm::MetricFamily::dc, gm::MetricFamily::pppr};
    }
    std::vector<gm::MetricFamily> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(gm::parse_family(tok));
    if (out.empty()) throw gm::ValidationError("no metric families requested");
    return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
    std::vector<T> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            if constexpr (std::is_integral_v<T>) out.push_back(static_cast<T>(std::stoll(tok)));
            else out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw CLI::ValidationError(what, "bad list entry '" + tok + "'");
        }
    }
    if (out.empty()) throw CLI::ValidationError(what, "empty list");
    return out;
}

int env_threads_default() {
    if (const char* env = std::getenv("GENMETRICS_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0; // hardware concurrency
}

gm::EmbeddingSet load(const std::string& path, const std::string& format,
                      const std::string& label) {
    const gm::FileFormat fmt = format == "auto" ? gm::infer_format(path)
                                                : gm::parse_format(format);
    return gm::load_embeddings(path, fmt, label);
}

void write_sweep(const gm::SweepResult& result, const std::string& out_path,
                 const std::string& format) {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::trunc);
        if (!file) throw gm::IoError(out_path + ": cannot open for writing");
        out = &file;
    }
    if (format == "json") result.write_json(*out);
    else result.write_csv(*out);
    if (!out_path.empty()) {
        std::cerr << "wrote " << result.rows.size() << " rows to " << out_path << "\n";
    }
}

// Merges values from a --config JSON object as defaults: every key that is
// not already present as an explicit --key flag is appended to argv.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw gm::IoError(config_path + ": cannot open config");
    json cfg = json::parse(in, nullptr, false);
    if (cfg.is_discarded() || !cfg.is_object()) {
        throw gm::IoError(config_path + ": config must be a JSON object");
    }
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        bool present = false;
        for (const std::string& a : args) {
            if (a == flag || a.rfind(flag + "=", 0) == 0) {
                present = true;
                break;
            }
        }
        if (present) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
        } else if (value.is_string()) {
            args.push_back(flag + "=" + value.get<std::string>());
        } else {
            args.push_back(flag + "=" + value.dump());
        }
    }
    return args;
}

struct CommonFlags {
    int threads = env_threads_default();
    gm::Index chunk = 1024;

    gm::ExecPolicy exec() const { return {{chunk, 0}, threads}; }

    void attach(CLI::App* cmd) {
        cmd->add_option("--threads", threads,
                        "Worker threads (0 = hardware parallelism; env GENMETRICS_THREADS)");
        cmd->add_option("--chunk", chunk, "Rows per distance block")->check(CLI::PositiveNumber);
    }
};

int run(std::vector<std::string> args) {
    CLI::App app{"kNN-based fidelity/diversity metrics for generative models"};
    app.require_subcommand(1);

    // ---- compute ----
    std::string real_path, fake_path, family_arg = "all", format_arg = "json";
    std::string in_format = "auto";
    int k_override = 0;
    double a_override = 0.0;
    CommonFlags compute_common;
    auto* compute = app.add_subcommand("compute", "Compute metric reports for two embedding files");
    compute->add_option("real", real_path, "Real embeddings file")->required();
    compute->add_option("fake", fake_path, "Fake embeddings file")->required();
    compute->add_option("--family", family_arg, "ipr, dc, pppr or all")
        ->check(CLI::IsMember({"ipr", "dc", "pppr", "all"}));
    compute->add_option("--k", k_override, "Override the family default k");
    compute->add_option("--a", a_override, "Override the threshold multiplier (pppr)");
    compute->add_option("--in-format", in_format, "npy, rawbin or auto (by extension)")
        ->check(CLI::IsMember({"npy", "rawbin", "auto"}));
    compute->add_option("--format", format_arg, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
    compute_common.attach(compute);

    // ---- sweeps ----
    std::string grid_arg = "-3:3:25", families_arg = "all", out_path, sweep_format = "csv";
    std::string outlier_role_arg = "real";
    double outlier_mean = 0.0;
    bool has_outlier = false;
    gm::Index n = 10000, dim = 64;
    std::uint64_t seed = 0;
    int runs = 1;
    int sweep_k = 0;
    CommonFlags sweep_common;

    auto add_sweep_flags = [&](CLI::App* cmd, const char* default_grid) {
        grid_arg = default_grid;
        cmd->add_option("--grid", grid_arg, "Axis grid start:stop:count (inclusive)");
        cmd->add_option("--n", n, "Samples per set")->check(CLI::PositiveNumber);
        cmd->add_option("--dim", dim, "Feature dimension")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed, "Root PRNG seed");
        cmd->add_option("--runs", runs, "Repetitions per grid point")->check(CLI::PositiveNumber);
        cmd->add_option("--families", families_arg, "Comma list of ipr,dc,pppr or all");
        cmd->add_option("--out", out_path, "Output file (stdout when omitted)");
        cmd->add_option("--format", sweep_format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sweep_common.attach(cmd);
    };

    auto* sweep_shift = app.add_subcommand("sweep-shift", "Mean-shift sweep with optional outlier");
    add_sweep_flags(sweep_shift, "-3:3:25");
    auto* outlier_opt = sweep_shift->add_option("--outlier-mean", outlier_mean,
                                                "Append one outlier row ~ N(mean*1, I)");
    sweep_shift->add_option("--outlier-role", outlier_role_arg, "real or fake")
        ->check(CLI::IsMember({"real", "fake"}));
    sweep_shift->add_option("--k", sweep_k, "Override k for all families");

    auto* sweep_variance = app.add_subcommand("sweep-variance", "Variance sweep X~N(0,I) vs Y~N(0,vI)");
    std::string var_grid_arg = "0.2:1.5:14";
    sweep_variance->add_option("--grid", var_grid_arg, "Axis grid start:stop:count");
    {
        CLI::App* cmd = sweep_variance;
        cmd->add_option("--n", n, "Samples per set")->check(CLI::PositiveNumber);
        cmd->add_option("--dim", dim, "Feature dimension")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed, "Root PRNG seed");
        cmd->add_option("--runs", runs, "Repetitions per grid point")->check(CLI::PositiveNumber);
        cmd->add_option("--families", families_arg, "Comma list of ipr,dc,pppr or all");
        cmd->add_option("--out", out_path, "Output file (stdout when omitted)");
        cmd->add_option("--format", sweep_format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sweep_common.attach(cmd);
    }

    auto* stability = app.add_subcommand("stability", "Bias/std of metrics on identical Gaussians");
    std::string n_grid_arg = "1000,2000,5000,10000";
    gm::Index true_n = 50000;
    int true_runs = 50, stab_runs = 50;
    stability->add_option("--n-grid", n_grid_arg, "Comma list of sample counts");
    stability->add_option("--runs", stab_runs, "Runs per grid point (>= 2)");
    stability->add_option("--true-n", true_n, "Sample count for the presumed true value");
    stability->add_option("--true-runs", true_runs, "Runs for the presumed true value");
    stability->add_option("--dim", dim, "Feature dimension")->check(CLI::PositiveNumber);
    stability->add_option("--seed", seed, "Root PRNG seed");
    stability->add_option("--families", families_arg, "Comma list of ipr,dc,pppr or all");
    stability->add_option("--out", out_path, "Output file (stdout when omitted)");
    stability->add_option("--format", sweep_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sweep_common.attach(stability);

    auto* ablate = app.add_subcommand("ablate-k", "Shift sweep repeated over a k grid");
    std::string k_grid_arg = "2,3,5,8";
    add_sweep_flags(ablate, "-3:3:25");
    ablate->add_option("--k-grid", k_grid_arg, "Comma list of k values");
    auto* ablate_outlier_opt = ablate->add_option("--outlier-mean", outlier_mean,
                                                  "Append one outlier row ~ N(mean*1, I)");
    ablate->add_option("--outlier-role", outlier_role_arg, "real or fake")
        ->check(CLI::IsMember({"real", "fake"}));

    // ---- split ----
    auto* split = app.add_subcommand("split", "Split a set into inliers/outliers by the NND_k criterion");
    std::string split_path, out_inliers, out_outliers, out_manifest;
    int split_k = 3;
    double split_ratio = 0.05;
    CommonFlags split_common;
    split->add_option("embeddings", split_path, "Embeddings file")->required();
    split->add_option("--k", split_k, "Neighbor order for the criterion")->check(CLI::PositiveNumber);
    split->add_option("--ratio", split_ratio, "Outlier fraction (default 0.05)");
    split->add_option("--in-format", in_format, "npy, rawbin or auto")
        ->check(CLI::IsMember({"npy", "rawbin", "auto"}));
    split->add_option("--out-inliers", out_inliers, "Inlier subset file")->required();
    split->add_option("--out-outliers", out_outliers, "Outlier subset file")->required();
    split->add_option("--out-manifest", out_manifest, "Index manifest JSON (stdout when omitted)");
    split_common.attach(split);

    // ---- gap ----
    auto* gap = app.add_subcommand("gap", "Per-sample scoring gap between PSR and normalized DSR");
    std::string gap_real, gap_fake;
    int top = 0, bottom = 0, gap_k_pppr = 4, gap_k_dc = 5;
    double gap_a = 1.2;
    CommonFlags gap_common;
    gap->add_option("real", gap_real, "Real embeddings file")->required();
    gap->add_option("fake", gap_fake, "Fake embeddings file")->required();
    gap->add_option("--top", top, "Print only the highest-gap rows");
    gap->add_option("--bottom", bottom, "Print only the lowest-gap rows");
    gap->add_option("--k", gap_k_pppr, "k for the probabilistic score");
    gap->add_option("--k-dc", gap_k_dc, "k for the density score");
    gap->add_option("--a", gap_a, "Threshold multiplier");
    gap->add_option("--in-format", in_format, "npy, rawbin or auto")
        ->check(CLI::IsMember({"npy", "rawbin", "auto"}));
    gap_common.attach(gap);

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "Sample a seeded Gaussian embedding set to a file");
    gm::GaussianSpec gspec{1000, 64, 0.0, 1.0, 0};
    std::string synth_out, synth_format = "auto";
    synth->add_option("--n", gspec.n, "Samples")->check(CLI::PositiveNumber);
    synth->add_option("--dim", gspec.dim, "Feature dimension")->check(CLI::PositiveNumber);
    synth->add_option("--mean", gspec.mean_scalar, "Per-coordinate mean u");
    synth->add_option("--var", gspec.var_scale, "Per-coordinate variance v");
    synth->add_option("--seed", gspec.seed, "PRNG seed");
    synth->add_option("--out", synth_out, "Output file")->required();
    synth->add_option("--format", synth_format, "npy, rawbin or auto (by extension)")
        ->check(CLI::IsMember({"npy", "rawbin", "auto"}));

    std::vector<char*> argv;
    argv.reserve(args.size());
    for (std::string& a : args) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (*compute) {
        const gm::EmbeddingSet X = load(real_path, in_format, "real");
        const gm::EmbeddingSet Y = load(fake_path, in_format, "fake");
        const std::vector<gm::MetricFamily> families = parse_families(family_arg);
        bool csv_header_done = false;
        for (const gm::MetricFamily family : families) {
            gm::MetricConfig cfg = gm::MetricConfig::defaults(family);
            if (k_override > 0) cfg.k = k_override;
            if (a_override > 0.0) cfg.a = a_override;
            cfg.exec = compute_common.exec();
            const gm::MetricReport report = gm::compute_report(X, Y, family, cfg);
            if (format_arg == "csv") {
                if (!csv_header_done) {
                    std::cout << gm::MetricReport::csv_header() << "\n";
                    csv_header_done = true;
                }
                std::cout << report.to_csv_row() << "\n";
            } else {
                std::cout << report.to_json() << "\n";
            }
        }
        return 0;
    }

    if (*sweep_shift) {
        gm::ShiftSweepOptions opts;
        opts.u_grid = parse_grid(grid_arg);
        if (*outlier_opt) opts.outlier_mean = outlier_mean;
        opts.outlier_role = outlier_role_arg == "fake" ? gm::OutlierRole::fake
                                                       : gm::OutlierRole::real;
        opts.n = n;
        opts.dim = dim;
        if (sweep_k > 0) opts.k_list = {sweep_k};
        opts.families = parse_families(families_arg);
        opts.seed = seed;
        opts.runs = runs;
        opts.exec = sweep_common.exec();
        write_sweep(gm::shift_sweep(opts), out_path, sweep_format);
        return 0;
    }

    if (*sweep_variance) {
        gm::VarianceSweepOptions opts;
        opts.v_grid = parse_grid(var_grid_arg);
        opts.n = n;
        opts.dim = dim;
        opts.families = parse_families(families_arg);
        opts.seed = seed;
        opts.runs = runs;
        opts.exec = sweep_common.exec();
        write_sweep(gm::variance_sweep(opts), out_path, sweep_format);
        return 0;
    }

    if (*stability) {
        gm::StabilityOptions opts;
        opts.n_grid = parse_list<gm::Index>(n_grid_arg, "--n-grid");
        opts.runs = stab_runs;
        opts.dim = dim;
        opts.families = parse_families(families_arg);
        opts.seed = seed;
        opts.true_n = true_n;
        opts.true_runs = true_runs;
        opts.exec = sweep_common.exec();
        write_sweep(gm::stability_bias(opts), out_path, sweep_format);
        return 0;
    }

    if (*ablate) {
        gm::ShiftSweepOptions opts;
        opts.u_grid = parse_grid(grid_arg);
        if (*ablate_outlier_opt) opts.outlier_mean = outlier_mean;
        opts.outlier_role = outlier_role_arg == "fake" ? gm::OutlierRole::fake
                                                       : gm::OutlierRole::real;
        opts.n = n;
        opts.dim = dim;
        opts.families = parse_families(families_arg);
        opts.seed = seed;
        opts.runs = runs;
        opts.exec = sweep_common.exec();
        write_sweep(gm::k_ablation(opts, parse_list<int>(k_grid_arg, "--k-grid")),
                    out_path, sweep_format);
        return 0;
    }

    if (*split) {
        const gm::EmbeddingSet E = load(split_path, in_format, "input");
        const gm::OutlierSplit result = gm::split_outliers(E, split_k, split_ratio,
                                                           split_common.exec());
        const gm::EmbeddingSet inliers = gm::take_rows(E, result.inlier_indices, "inliers");
        gm::save_embeddings(inliers, out_inliers, gm::infer_format(out_inliers));
        const gm::EmbeddingSet outliers = gm::take_rows(E, result.outlier_indices, "outliers");
        gm::save_embeddings(outliers, out_outliers, gm::infer_format(out_outliers));

        json manifest;
        manifest["source"] = split_path;
        manifest["n"] = E.n();
        manifest["k"] = split_k;
        manifest["ratio"] = split_ratio;
        manifest["inliers"] = {{"path", out_inliers}, {"indices", result.inlier_indices}};
        manifest["outliers"] = {{"path", out_outliers}, {"indices", result.outlier_indices}};
        if (out_manifest.empty()) {
            std::cout << manifest.dump() << "\n";
        } else {
            std::ofstream mf(out_manifest, std::ios::trunc);
            if (!mf) throw gm::IoError(out_manifest + ": cannot open for writing");
            mf << manifest.dump() << "\n";
            std::cerr << "wrote split of " << E.n() << " rows ("
                      << result.outlier_indices.size() << " outliers)\n";
        }
        return 0;
    }

    if (*gap) {
        const gm::EmbeddingSet X = load(gap_real, in_format, "real");
        const gm::EmbeddingSet Y = load(gap_fake, in_format, "fake");
        gm::MetricConfig cfg_pppr = gm::MetricConfig::defaults(gm::MetricFamily::pppr);
        cfg_pppr.k = gap_k_pppr;
        cfg_pppr.a = gap_a;
        cfg_pppr.exec = gap_common.exec();
        gm::MetricConfig cfg_dc = gm::MetricConfig::defaults(gm::MetricFamily::dc);
        cfg_dc.k = gap_k_dc;
        cfg_dc.exec = gap_common.exec();
        const gm::ScoringGap result = gm::scoring_gap(X, Y, cfg_pppr, cfg_dc);

        std::vector<std::size_t> selected;
        if (top > 0 || bottom > 0) {
            const std::size_t m = result.order.size();
            for (std::size_t i = 0; i < std::min<std::size_t>(top, m); ++i) {
                selected.push_back(result.order[i]);
            }
            for (std::size_t i = m > static_cast<std::size_t>(bottom) ? m - bottom : 0;
                 i < m; ++i) {
                selected.push_back(result.order[i]);
            }
        } else {
            selected = result.order;
        }
        std::cout << "index,psr,dsr_norm,gap\n";
        char buf[128];
        for (const std::size_t j : selected) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", j, result.psr[j],
                          result.dsr_normalized[j], result.gap[j]);
            std::cout << buf;
        }
        return 0;
    }

    if (*synth) {
        const gm::EmbeddingSet set = gm::sample_gaussian(gspec);
        const gm::FileFormat fmt = synth_format == "auto" ? gm::infer_format(synth_out)
                                                          : gm::parse_format(synth_format);
        gm::save_embeddings(set, synth_out, fmt);
        std::cerr << "wrote " << set.n() << "x" << set.dim() << " to " << synth_out << "\n";
        return 0;
    }

    return 1;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    try {
        args = merge_config(std::move(args));
        return run(std::move(args));
    } catch (const CLI::ParseError&) {
        return 1;
    } catch (const gm::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const gm::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
