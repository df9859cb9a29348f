#include "genmetrics/synthlab.hpp"

#include "genmetrics/embed_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <ostream>

namespace genmetrics {
namespace {

constexpr std::uint64_t kExpShift = 1;
constexpr std::uint64_t kExpVariance = 2;
constexpr std::uint64_t kExpStability = 3;
constexpr std::uint64_t kExpReplacement = 4;

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct FamilyMetrics {
    std::string fidelity_name;
    std::string diversity_name;
    double fidelity;
    double diversity;
};

FamilyMetrics eval_family(const EmbeddingSet& X, const EmbeddingSet& Y,
                          MetricFamily family, std::optional<int> k_override,
                          const ExecPolicy& exec) {
    MetricConfig cfg = MetricConfig::defaults(family);
    if (k_override) cfg.k = *k_override;
    cfg.exec = exec;
    switch (family) {
        case MetricFamily::ipr:
            return {"ip", "ir", improved_precision(X, Y, cfg), improved_recall(X, Y, cfg)};
        case MetricFamily::dc:
            return {"density", "coverage", density(X, Y, cfg), coverage(X, Y, cfg)};
        case MetricFamily::pppr:
            return {"pp", "pr", p_precision(X, Y, cfg), p_recall(X, Y, cfg)};
    }
    throw ValidationError("unreachable family");
}

std::optional<int> single_k(const std::vector<int>& k_list) {
    if (k_list.empty()) return std::nullopt;
    if (k_list.size() == 1) return k_list.front();
    throw ValidationError("k_list with more than one entry: use k_ablation");
}

} // namespace

std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64_next(sm);
}

std::uint64_t Xoshiro256pp::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256pp::next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Xoshiro256pp::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t experiment,
                          std::uint64_t grid_index, std::uint64_t run) {
    std::uint64_t state = seed;
    std::uint64_t h = splitmix64_next(state);
    state = h ^ experiment;
    h = splitmix64_next(state);
    state = h ^ grid_index;
    h = splitmix64_next(state);
    state = h ^ run;
    return splitmix64_next(state);
}

EmbeddingSet sample_gaussian(const GaussianSpec& spec) {
    if (spec.n < 1 || spec.dim < 1 || spec.var_scale <= 0.0) {
        throw ValidationError("invalid Gaussian spec (need n >= 1, dim >= 1, var > 0)");
    }
    Xoshiro256pp rng(spec.seed);
    const double sigma = std::sqrt(spec.var_scale);
    Matrix data(spec.n, spec.dim);
    double* p = data.data();
    const std::size_t count = static_cast<std::size_t>(spec.n) * spec.dim;
    for (std::size_t i = 0; i < count; ++i) {
        p[i] = spec.mean_scalar + sigma * rng.next_gaussian();
    }
    return {std::move(data), "gaussian", DtypeOrigin::f64};
}

void SweepResult::write_csv(std::ostream& out) const {
    const bool has_run = std::any_of(rows.begin(), rows.end(),
                                     [](const Row& r) { return r.run.has_value(); });
    const bool has_std = std::any_of(rows.begin(), rows.end(),
                                     [](const Row& r) { return r.stddev.has_value(); });
    out << "axis,family,metric,value";
    if (has_run) out << ",run";
    if (has_std) out << ",std";
    out << "\n";
    for (const Row& r : rows) {
        out << fmt17(r.axis) << ',' << r.family << ',' << r.metric << ','
            << fmt17(r.value);
        if (has_run) {
            out << ',';
            if (r.run) out << *r.run;
        }
        if (has_std) {
            out << ',';
            if (r.stddev) out << fmt17(*r.stddev);
        }
        out << "\n";
    }
}

void SweepResult::write_json(std::ostream& out) const {
    out << "{\"axis_name\":\"" << axis_name << "\",\"seed\":" << seed
        << ",\"axis_values\":[";
    for (std::size_t i = 0; i < axis_values.size(); ++i) {
        if (i) out << ',';
        out << fmt17(axis_values[i]);
    }
    out << "],\"rows\":[";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        if (i) out << ',';
        out << "{\"axis\":" << fmt17(r.axis) << ",\"family\":\"" << r.family
            << "\",\"metric\":\"" << r.metric << "\",\"value\":" << fmt17(r.value);
        if (r.run) out << ",\"run\":" << *r.run;
        if (r.stddev) out << ",\"std\":" << fmt17(*r.stddev);
        out << '}';
    }
    out << "]}\n";
}

std::vector<double> SweepResult::values(double axis, const std::string& family,
                                        const std::string& metric) const {
    std::vector<double> out;
    for (const Row& r : rows) {
        if (r.axis == axis && r.family == family && r.metric == metric) {
            out.push_back(r.value);
        }
    }
    return out;
}

SweepResult shift_sweep(const ShiftSweepOptions& opts) {
    if (opts.u_grid.empty()) throw ValidationError("empty u grid");
    if (opts.runs < 1) throw ValidationError("runs must be >= 1");
    const std::optional<int> k = single_k(opts.k_list);

    SweepResult result;
    result.axis_name = "u";
    result.axis_values = opts.u_grid;
    result.seed = opts.seed;

    for (std::size_t gi = 0; gi < opts.u_grid.size(); ++gi) {
        const double u = opts.u_grid[gi];
        for (int run = 0; run < opts.runs; ++run) {
            const std::uint64_t cell = derive_seed(opts.seed, kExpShift, gi,
                                                   static_cast<std::uint64_t>(run));
            EmbeddingSet X = sample_gaussian({opts.n, opts.dim, 0.0, 1.0,
                                              derive_seed(cell, 1, 0, 0)});
            EmbeddingSet Y = sample_gaussian({opts.n, opts.dim, u, 1.0,
                                              derive_seed(cell, 2, 0, 0)});
            if (opts.outlier_mean) {
                const EmbeddingSet outlier = sample_gaussian(
                    {1, opts.dim, *opts.outlier_mean, 1.0, derive_seed(cell, 3, 0, 0)});
                if (opts.outlier_role == OutlierRole::fake) Y = concat(Y, outlier);
                else X = concat(X, outlier);
            }
            for (const MetricFamily family : opts.families) {
                const FamilyMetrics fm = eval_family(X, Y, family, k, opts.exec);
                const std::optional<int> run_tag =
                    opts.runs > 1 ? std::optional<int>(run) : std::nullopt;
                result.rows.push_back({u, family_name(family), fm.fidelity_name,
                                       fm.fidelity, run_tag, std::nullopt});
                result.rows.push_back({u, family_name(family), fm.diversity_name,
                                       fm.diversity, run_tag, std::nullopt});
            }
        }
    }
    return result;
}

SweepResult variance_sweep(const VarianceSweepOptions& opts) {
    if (opts.v_grid.empty()) throw ValidationError("empty v grid");
    if (opts.runs < 1) throw ValidationError("runs must be >= 1");

    SweepResult result;
    result.axis_name = "v";
    result.axis_values = opts.v_grid;
    result.seed = opts.seed;

    for (std::size_t gi = 0; gi < opts.v_grid.size(); ++gi) {
        const double v = opts.v_grid[gi];
        if (v <= 0.0) throw ValidationError("variance grid values must be positive");
        for (int run = 0; run < opts.runs; ++run) {
            const std::uint64_t cell = derive_seed(opts.seed, kExpVariance, gi,
                                                   static_cast<std::uint64_t>(run));
            const EmbeddingSet X = sample_gaussian({opts.n, opts.dim, 0.0, 1.0,
                                                    derive_seed(cell, 1, 0, 0)});
            const EmbeddingSet Y = sample_gaussian({opts.n, opts.dim, 0.0, v,
                                                    derive_seed(cell, 2, 0, 0)});
            for (const MetricFamily family : opts.families) {
                const FamilyMetrics fm = eval_family(X, Y, family, std::nullopt, opts.exec);
                const std::optional<int> run_tag =
                    opts.runs > 1 ? std::optional<int>(run) : std::nullopt;
                result.rows.push_back({v, family_name(family), fm.fidelity_name,
                                       fm.fidelity, run_tag, std::nullopt});
                result.rows.push_back({v, family_name(family), fm.diversity_name,
                                       fm.diversity, run_tag, std::nullopt});
            }
        }
    }
    return result;
}

SweepResult stability_bias(const StabilityOptions& opts) {
    if (opts.runs < 2) throw ValidationError("stability needs runs >= 2");
    if (opts.n_grid.empty()) throw ValidationError("empty n grid");

    SweepResult result;
    result.axis_name = "n";
    result.seed = opts.seed;
    for (const Index n : opts.n_grid) result.axis_values.push_back(static_cast<double>(n));

    auto run_cell = [&](Index n, std::uint64_t grid_tag, int run) {
        const std::uint64_t cell = derive_seed(opts.seed, kExpStability, grid_tag,
                                               static_cast<std::uint64_t>(run));
        const EmbeddingSet X = sample_gaussian({n, opts.dim, 0.0, 1.0,
                                                derive_seed(cell, 1, 0, 0)});
        const EmbeddingSet Y = sample_gaussian({n, opts.dim, 0.0, 1.0,
                                                derive_seed(cell, 2, 0, 0)});
        std::vector<FamilyMetrics> fams;
        fams.reserve(opts.families.size());
        for (const MetricFamily family : opts.families) {
            fams.push_back(eval_family(X, Y, family, std::nullopt, opts.exec));
        }
        return fams;
    };

    // presumed true value per metric: average over true_runs at true_n
    std::vector<double> true_fid(opts.families.size(), 0.0);
    std::vector<double> true_div(opts.families.size(), 0.0);
    for (int run = 0; run < opts.true_runs; ++run) {
        const auto fams = run_cell(opts.true_n, ~std::uint64_t{0}, run);
        for (std::size_t f = 0; f < fams.size(); ++f) {
            true_fid[f] += fams[f].fidelity / opts.true_runs;
            true_div[f] += fams[f].diversity / opts.true_runs;
        }
    }

    for (std::size_t gi = 0; gi < opts.n_grid.size(); ++gi) {
        const Index n = opts.n_grid[gi];
        std::vector<std::vector<double>> fid(opts.families.size());
        std::vector<std::vector<double>> div(opts.families.size());
        std::vector<FamilyMetrics> last;
        for (int run = 0; run < opts.runs; ++run) {
            const auto fams = run_cell(n, gi, run);
            for (std::size_t f = 0; f < fams.size(); ++f) {
                fid[f].push_back(fams[f].fidelity);
                div[f].push_back(fams[f].diversity);
            }
            last = fams;
        }
        auto emit = [&](std::size_t f, const std::string& name,
                        const std::vector<double>& vals, double truth) {
            double m = 0.0;
            for (const double v : vals) m += v;
            m /= static_cast<double>(vals.size());
            double var = 0.0;
            for (const double v : vals) var += (v - m) * (v - m);
            const double sd = std::sqrt(var / static_cast<double>(vals.size()));
            const std::string fam = family_name(opts.families[f]);
            result.rows.push_back({static_cast<double>(n), fam, name, m,
                                   std::nullopt, sd});
            result.rows.push_back({static_cast<double>(n), fam, name + "_bias",
                                   std::abs(m - truth), std::nullopt, std::nullopt});
        };
        for (std::size_t f = 0; f < opts.families.size(); ++f) {
            emit(f, last[f].fidelity_name, fid[f], true_fid[f]);
            emit(f, last[f].diversity_name, div[f], true_div[f]);
        }
    }
    return result;
}

SweepResult k_ablation(const ShiftSweepOptions& opts, const std::vector<int>& k_grid) {
    if (k_grid.empty()) throw ValidationError("empty k grid");
    if (k_grid.size() == 1) {
        ShiftSweepOptions one = opts;
        one.k_list = {k_grid.front()};
        return shift_sweep(one);
    }
    SweepResult result;
    result.axis_name = "u";
    result.axis_values = opts.u_grid;
    result.seed = opts.seed;
    for (const int k : k_grid) {
        ShiftSweepOptions one = opts;
        one.k_list = {k};
        SweepResult part = shift_sweep(one);
        for (SweepResult::Row& row : part.rows) {
            row.metric += "@k=" + std::to_string(k);
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

OutlierSplit split_outliers(const EmbeddingSet& E, int k, double ratio,
                            const ExecPolicy& policy) {
    if (ratio <= 0.0 || ratio >= 1.0) {
        throw ValidationError("ratio must lie strictly between 0 and 1");
    }
    const KnnRadii radii = knn_radii(E, k, policy);
    const Index n = E.n();
    const Index n_out = static_cast<Index>(
        std::ceil(ratio * static_cast<double>(n)));

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    // descending criterion; on ties the higher index becomes the outlier,
    // so the lower index stays an inlier
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        const double ca = radii.radii[static_cast<std::size_t>(a)];
        const double cb = radii.radii[static_cast<std::size_t>(b)];
        if (ca != cb) return ca > cb;
        return a > b;
    });

    OutlierSplit split;
    split.criterion = radii.radii;
    split.criterion_k = k;
    split.ratio = ratio;
    split.outlier_indices.assign(order.begin(), order.begin() + n_out);
    split.inlier_indices.assign(order.begin() + n_out, order.end());
    std::sort(split.outlier_indices.begin(), split.outlier_indices.end());
    std::sort(split.inlier_indices.begin(), split.inlier_indices.end());
    return split;
}

EmbeddingSet take_rows(const EmbeddingSet& E, const std::vector<Index>& rows,
                       const std::string& label) {
    if (rows.empty()) throw ValidationError("cannot build an empty embedding set");
    Matrix out(static_cast<Index>(rows.size()), E.dim());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Index>(i)) = E.data().row(rows[i]);
    }
    return {std::move(out), label, E.dtype_origin()};
}

SweepResult replacement_sweep(const EmbeddingSet& base_in, const EmbeddingSet& base_out,
                              const EmbeddingSet& other, const ReplacementSweepOptions& opts) {
    if (opts.counts.empty()) throw ValidationError("empty counts vector");
    for (const Index c : opts.counts) {
        if (c < 0 || c > base_out.n()) {
            throw ValidationError("replacement count " + std::to_string(c) +
                                  " exceeds the outlier pool of " +
                                  std::to_string(base_out.n()));
        }
        if (c >= base_in.n()) {
            throw ValidationError("replacement count must leave at least one inlier");
        }
    }

    // seeded shuffle of inlier positions; counts then replace a fixed prefix
    std::vector<Index> shuffled(static_cast<std::size_t>(base_in.n()));
    std::iota(shuffled.begin(), shuffled.end(), Index{0});
    Xoshiro256pp rng(derive_seed(opts.seed, kExpReplacement, 0, 0));
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
        std::swap(shuffled[i], shuffled[j]);
    }

    SweepResult result;
    result.axis_name = "count";
    result.seed = opts.seed;
    for (const Index c : opts.counts) result.axis_values.push_back(static_cast<double>(c));

    struct Cell { std::string family, metric; double value; };
    auto eval_at = [&](Index c) {
        std::vector<Index> keep(shuffled.begin() + c, shuffled.end());
        std::sort(keep.begin(), keep.end());
        EmbeddingSet replaced = take_rows(base_in, keep, base_in.label());
        if (c > 0) {
            std::vector<Index> pool(static_cast<std::size_t>(c));
            std::iota(pool.begin(), pool.end(), Index{0});
            replaced = concat(replaced, take_rows(base_out, pool, base_out.label()));
        }
        const EmbeddingSet& X = opts.role == OutlierRole::fake ? other : replaced;
        const EmbeddingSet& Y = opts.role == OutlierRole::fake ? replaced : other;
        std::vector<Cell> cells;
        for (const MetricFamily family : opts.families) {
            const FamilyMetrics fm = eval_family(X, Y, family, std::nullopt, opts.exec);
            cells.push_back({family_name(family), fm.fidelity_name, fm.fidelity});
            cells.push_back({family_name(family), fm.diversity_name, fm.diversity});
        }
        return cells;
    };

    const std::vector<Cell> baseline = eval_at(0);
    for (const Index c : opts.counts) {
        const std::vector<Cell> cells = c == 0 ? baseline : eval_at(c);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            result.rows.push_back({static_cast<double>(c), cells[i].family,
                                   cells[i].metric, cells[i].value - baseline[i].value,
                                   std::nullopt, std::nullopt});
        }
    }
    return result;
}

} // namespace genmetrics
