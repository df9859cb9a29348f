#pragma once

#include "genmetrics/scoring.hpp"

#include <optional>

namespace genmetrics {

enum class MetricFamily { ipr, dc, pppr };

std::string family_name(MetricFamily family);
MetricFamily parse_family(const std::string& name);

/// Metric family configuration. Defaults follow the usual recommendations:
/// k=3 for improved precision/recall, k=5 for density/coverage, k=4 with
/// a=1.2 for the probabilistic pair.
struct MetricConfig {
    MetricFamily family = MetricFamily::pppr;
    int k = 4;
    double a = 1.2;
    ExecPolicy exec{};

    static MetricConfig defaults(MetricFamily family);
};

struct MetricReport {
    MetricFamily family;
    double fidelity = 0.0;
    double diversity = 0.0;
    double f1 = 0.0;
    int k = 0;
    double a = 0.0;
    Index n_real = 0;
    Index n_fake = 0;
    double seconds = 0.0;

    /// Fixed key order, 17-significant-digit floats.
    std::string to_json() const;
    std::string to_csv_row() const;
    static std::string csv_header();
};

/// Fraction of fake samples falling inside the union of k-NN balls of X.
double improved_precision(const EmbeddingSet& X, const EmbeddingSet& Y,
                          const MetricConfig& cfg);
/// Role-swapped counterpart: balls around Y, queries X.
double improved_recall(const EmbeddingSet& X, const EmbeddingSet& Y,
                       const MetricConfig& cfg);

/// Mean (1/k)-scaled ball-membership count of fake samples; in [0, N/k].
double density(const EmbeddingSet& X, const EmbeddingSet& Y, const MetricConfig& cfg);
/// Fraction of real k-NN balls occupied by at least one fake sample.
double coverage(const EmbeddingSet& X, const EmbeddingSet& Y, const MetricConfig& cfg);

/// Mean probabilistic score of fake samples against X, with R derived from X.
double p_precision(const EmbeddingSet& X, const EmbeddingSet& Y, const MetricConfig& cfg);
/// Symmetric counterpart with R derived from Y.
double p_recall(const EmbeddingSet& X, const EmbeddingSet& Y, const MetricConfig& cfg);

/// Harmonic mean 2fd/(f+d); 0 when both are 0. Inputs must be non-negative.
double f1_score(double fidelity, double diversity);

/// Per-fake-sample gap between the probabilistic score and max-normalized
/// density score, with the sort permutation by descending gap.
struct ScoringGap {
    std::vector<double> gap;
    std::vector<double> psr;
    std::vector<double> dsr_normalized;
    std::vector<std::size_t> order; // indices sorted by descending gap
};

ScoringGap scoring_gap(const EmbeddingSet& X, const EmbeddingSet& Y,
                       const MetricConfig& cfg_pppr, const MetricConfig& cfg_dc);

MetricReport compute_report(const EmbeddingSet& X, const EmbeddingSet& Y,
                            MetricFamily family, const MetricConfig& cfg);
MetricReport compute_report(const EmbeddingSet& X, const EmbeddingSet& Y,
                            MetricFamily family);

} // namespace genmetrics
