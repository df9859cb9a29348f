#pragma once

#include "genmetrics/metrics.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>

namespace genmetrics {

/// splitmix64 mixing step; used for seeding and sub-stream derivation.
std::uint64_t splitmix64_next(std::uint64_t& state);

/// xoshiro256++ generator. Fixed algorithm so that (seed -> sample stream)
/// is reproducible across platforms and compilers.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed);

    std::uint64_t next_u64();
    /// Uniform in (0, 1], 53-bit resolution.
    double next_unit();
    /// Standard normal via the Box-Muller transform (pairs cached).
    double next_gaussian();

private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Derives an independent seed for one (experiment, grid point, run) cell.
/// Grid points and repetitions can then run in any order or in parallel
/// without changing results.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t experiment,
                          std::uint64_t grid_index, std::uint64_t run);

/// n x dim matrix with i.i.d. N(mean_scalar, var_scale) entries.
struct GaussianSpec {
    Index n = 1;
    Index dim = 1;
    double mean_scalar = 0.0;
    double var_scale = 1.0;
    std::uint64_t seed = 0;
};

EmbeddingSet sample_gaussian(const GaussianSpec& spec);

/// Long-format experiment table: one row per (axis point, family, metric
/// [, run]) cell. Serializes to CSV ("axis,family,metric,value[,run][,std]")
/// and JSON.
struct SweepResult {
    struct Row {
        double axis = 0.0;
        std::string family;
        std::string metric;
        double value = 0.0;
        std::optional<int> run;
        std::optional<double> stddev;
    };

    std::string axis_name;
    std::vector<double> axis_values;
    std::vector<Row> rows;
    std::uint64_t seed = 0;

    void write_csv(std::ostream& out) const;
    void write_json(std::ostream& out) const;

    /// All values for one (axis, family, metric) cell, in run order.
    std::vector<double> values(double axis, const std::string& family,
                               const std::string& metric) const;
};

enum class OutlierRole { none, real, fake };

struct ShiftSweepOptions {
    std::vector<double> u_grid;
    std::optional<double> outlier_mean; // one outlier row appended when set
    OutlierRole outlier_role = OutlierRole::real;
    Index n = 10000;
    Index dim = 64;
    std::vector<int> k_list;            // empty -> family defaults
    std::vector<MetricFamily> families = {MetricFamily::ipr, MetricFamily::dc,
                                          MetricFamily::pppr};
    std::uint64_t seed = 0;
    int runs = 1;
    ExecPolicy exec{};
};

/// X ~ N(0, I) and Y ~ N(u*1, I) per grid point; the optional outlier row is
/// drawn from N(outlier_mean*1, I) and appended to X (role real) or Y (role
/// fake). Records fidelity and diversity for each requested family.
SweepResult shift_sweep(const ShiftSweepOptions& opts);

struct VarianceSweepOptions {
    std::vector<double> v_grid;
    Index n = 10000;
    Index dim = 64;
    std::vector<MetricFamily> families = {MetricFamily::ipr, MetricFamily::dc,
                                          MetricFamily::pppr};
    std::uint64_t seed = 0;
    int runs = 1;
    ExecPolicy exec{};
};

/// X ~ N(0, I), Y ~ N(0, v*I) per grid point.
SweepResult variance_sweep(const VarianceSweepOptions& opts);

struct StabilityOptions {
    std::vector<Index> n_grid;
    int runs = 50;
    Index dim = 64;
    std::vector<MetricFamily> families = {MetricFamily::ipr, MetricFamily::dc,
                                          MetricFamily::pppr};
    std::uint64_t seed = 0;
    // reference ("true") value estimation for the bias
    Index true_n = 50000;
    int true_runs = 50;
    ExecPolicy exec{};
};

/// Identical independent Gaussians at each n; emits mean, std and |bias|
/// rows per (n, family, metric). The presumed true value per metric is the
/// average of true_runs runs at true_n samples.
SweepResult stability_bias(const StabilityOptions& opts);

/// shift_sweep repeated per k; axis stays u, the metric names are suffixed
/// "@k=<k>".
SweepResult k_ablation(const ShiftSweepOptions& opts, const std::vector<int>& k_grid);

/// Partition of a set by the within-set NND_k criterion: the ceil(ratio*N)
/// largest-criterion samples become outliers; ties at the cut keep the lower
/// index as inlier.
struct OutlierSplit {
    std::vector<Index> inlier_indices;
    std::vector<Index> outlier_indices;
    std::vector<double> criterion; // NND_k per sample
    int criterion_k = 0;
    double ratio = 0.0;
};

OutlierSplit split_outliers(const EmbeddingSet& E, int k, double ratio,
                            const ExecPolicy& policy = {});

EmbeddingSet take_rows(const EmbeddingSet& E, const std::vector<Index>& rows,
                       const std::string& label);

struct ReplacementSweepOptions {
    std::vector<Index> counts;
    std::vector<MetricFamily> families = {MetricFamily::ipr, MetricFamily::dc,
                                          MetricFamily::pppr};
    OutlierRole role = OutlierRole::real; // which side gets the replacement
    std::uint64_t seed = 0;
    ExecPolicy exec{};
};

/// For each count c, replaces c inliers of the chosen side (a deterministic
/// prefix under a seeded shuffle) with the first c pool outliers and reports
/// each metric's increment relative to c = 0.
SweepResult replacement_sweep(const EmbeddingSet& base_in, const EmbeddingSet& base_out,
                              const EmbeddingSet& other, const ReplacementSweepOptions& opts);

} // namespace genmetrics
