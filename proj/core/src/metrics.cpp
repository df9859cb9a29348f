#include "genmetrics/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>

namespace genmetrics {
namespace {

double mean(const std::vector<double>& v) {
    double sum = 0.0;
    for (const double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

std::string family_name(MetricFamily family) {
    switch (family) {
        case MetricFamily::ipr: return "ipr";
        case MetricFamily::dc: return "dc";
        case MetricFamily::pppr: return "pppr";
    }
    return "?";
}

MetricFamily parse_family(const std::string& name) {
    if (name == "ipr") return MetricFamily::ipr;
    if (name == "dc") return MetricFamily::dc;
    if (name == "pppr") return MetricFamily::pppr;
    throw ValidationError("unknown metric family '" + name + "' (expected ipr, dc or pppr)");
}

MetricConfig MetricConfig::defaults(MetricFamily family) {
    MetricConfig cfg;
    cfg.family = family;
    switch (family) {
        case MetricFamily::ipr: cfg.k = 3; break;
        case MetricFamily::dc: cfg.k = 5; break;
        case MetricFamily::pppr: cfg.k = 4; cfg.a = 1.2; break;
    }
    return cfg;
}

double improved_precision(const EmbeddingSet& X, const EmbeddingSet& Y,
                          const MetricConfig& cfg) {
    const KnnRadii radii = knn_radii(X, cfg.k, cfg.exec);
    return mean(bsr_scores(Y, X, radii, cfg.exec).scores);
}

double improved_recall(const EmbeddingSet& X, const EmbeddingSet& Y,
                       const MetricConfig& cfg) {
    return improved_precision(Y, X, cfg);
}

double density(const EmbeddingSet& X, const EmbeddingSet& Y, const MetricConfig& cfg) {
    const KnnRadii radii = knn_radii(X, cfg.k, cfg.exec);
    return mean(dsr_scores(Y, X, radii, cfg.k, cfg.exec).scores);
}

double coverage(const EmbeddingSet& X, const EmbeddingSet& Y, const MetricConfig& cfg) {
    const KnnRadii radii = knn_radii(X, cfg.k, cfg.exec);
    return mean(csr_scores(X, radii, Y, cfg.exec).scores);
}

double p_precision(const EmbeddingSet& X, const EmbeddingSet& Y, const MetricConfig& cfg) {
    const ThresholdRadius R = threshold_radius(X, cfg.k, cfg.a, cfg.exec);
    return mean(psr_scores(Y, X, R, cfg.exec).scores);
}

double p_recall(const EmbeddingSet& X, const EmbeddingSet& Y, const MetricConfig& cfg) {
    return p_precision(Y, X, cfg);
}

double f1_score(double fidelity, double diversity) {
    if (fidelity < 0.0 || diversity < 0.0) {
        throw ValidationError("f1 inputs must be non-negative");
    }
    const double sum = fidelity + diversity;
    return sum == 0.0 ? 0.0 : 2.0 * fidelity * diversity / sum;
}

ScoringGap scoring_gap(const EmbeddingSet& X, const EmbeddingSet& Y,
                       const MetricConfig& cfg_pppr, const MetricConfig& cfg_dc) {
    const ThresholdRadius R = threshold_radius(X, cfg_pppr.k, cfg_pppr.a, cfg_pppr.exec);
    ScoringGap out;
    out.psr = psr_scores(Y, X, R, cfg_pppr.exec).scores;

    const KnnRadii radii = knn_radii(X, cfg_dc.k, cfg_dc.exec);
    out.dsr_normalized = dsr_scores(Y, X, radii, cfg_dc.k, cfg_dc.exec).scores;
    const double dsr_max = *std::max_element(out.dsr_normalized.begin(),
                                             out.dsr_normalized.end());
    if (dsr_max > 0.0) {
        for (double& v : out.dsr_normalized) v /= dsr_max;
    }

    out.gap.resize(out.psr.size());
    for (std::size_t j = 0; j < out.psr.size(); ++j) {
        out.gap[j] = out.psr[j] - out.dsr_normalized[j];
    }
    out.order.resize(out.gap.size());
    std::iota(out.order.begin(), out.order.end(), std::size_t{0});
    std::stable_sort(out.order.begin(), out.order.end(),
                     [&](std::size_t a, std::size_t b) { return out.gap[a] > out.gap[b]; });
    return out;
}

MetricReport compute_report(const EmbeddingSet& X, const EmbeddingSet& Y,
                            MetricFamily family, const MetricConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    MetricReport report;
    report.family = family;
    report.k = cfg.k;
    report.a = family == MetricFamily::pppr ? cfg.a : 0.0;
    report.n_real = X.n();
    report.n_fake = Y.n();
    switch (family) {
        case MetricFamily::ipr:
            report.fidelity = improved_precision(X, Y, cfg);
            report.diversity = improved_recall(X, Y, cfg);
            break;
        case MetricFamily::dc:
            report.fidelity = density(X, Y, cfg);
            report.diversity = coverage(X, Y, cfg);
            break;
        case MetricFamily::pppr:
            report.fidelity = p_precision(X, Y, cfg);
            report.diversity = p_recall(X, Y, cfg);
            break;
    }
    report.f1 = f1_score(report.fidelity, report.diversity);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

MetricReport compute_report(const EmbeddingSet& X, const EmbeddingSet& Y,
                            MetricFamily family) {
    return compute_report(X, Y, family, MetricConfig::defaults(family));
}

std::string MetricReport::to_json() const {
    std::string s = "{";
    s += "\"family\":\"" + family_name(family) + "\",";
    s += "\"fidelity\":" + fmt17(fidelity) + ",";
    s += "\"diversity\":" + fmt17(diversity) + ",";
    s += "\"f1\":" + fmt17(f1) + ",";
    s += "\"k\":" + std::to_string(k) + ",";
    s += "\"a\":" + fmt17(a) + ",";
    s += "\"n_real\":" + std::to_string(n_real) + ",";
    s += "\"n_fake\":" + std::to_string(n_fake) + ",";
    s += "\"seconds\":" + fmt17(seconds) + "}";
    return s;
}

std::string MetricReport::csv_header() {
    return "family,fidelity,diversity,f1,k,a,n_real,n_fake,seconds";
}

std::string MetricReport::to_csv_row() const {
    return family_name(family) + "," + fmt17(fidelity) + "," + fmt17(diversity) + "," +
           fmt17(f1) + "," + std::to_string(k) + "," + fmt17(a) + "," +
           std::to_string(n_real) + "," + std::to_string(n_fake) + "," + fmt17(seconds);
}

} // namespace genmetrics
