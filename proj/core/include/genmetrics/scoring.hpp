#pragma once

#include "genmetrics/nn_core.hpp"

namespace genmetrics {

/// Global kernel width for the probabilistic scoring rule:
/// value = multiplier * mean k-NN radius of the source set.
struct ThresholdRadius {
    double value = 0.0;
    double multiplier = 0.0;
    int k = 0;
    std::string source_label;
};

enum class ScoreRule { bsr, dsr, csr, psr };

struct ScoreVector {
    std::vector<double> scores;
    ScoreRule rule;
};

/// Binary score per query sample: 1 iff the sample lies inside the closed
/// ball of any reference sample (d <= radius), else 0. Short-circuits per
/// row on the first hit.
ScoreVector bsr_scores(const EmbeddingSet& query, const EmbeddingSet& ref,
                       const KnnRadii& radii, const ExecPolicy& policy = {});

/// (1/k)-scaled count of reference balls containing the query sample.
/// k must equal radii.k.
ScoreVector dsr_scores(const EmbeddingSet& query, const EmbeddingSet& ref,
                       const KnnRadii& radii, int k, const ExecPolicy& policy = {});

/// Per real sample: 1 iff any fake sample lies in the closed ball around it.
ScoreVector csr_scores(const EmbeddingSet& realset, const KnnRadii& radii,
                       const EmbeddingSet& fakeset, const ExecPolicy& policy = {});

/// Linear-decay membership kernel: 1 - d/R for d <= R, 0 beyond. For R = 0
/// it degenerates to the exact-coincidence indicator.
double membership_prob(double d, const ThresholdRadius& R);

/// R = a * mean(NND_k over ref).
ThresholdRadius threshold_radius(const EmbeddingSet& ref, int k, double a,
                                 const ExecPolicy& policy = {});
ThresholdRadius threshold_radius(const KnnRadii& radii, double a,
                                 const std::string& source_label);

/// Probabilistic score: 1 - prod_i (1 - membership_prob(d(query_j, ref_i), R)),
/// factors accumulated in reference index order, early exit to 1 on an exact
/// coincidence. Always in [0, 1].
ScoreVector psr_scores(const EmbeddingSet& query, const EmbeddingSet& ref,
                       const ThresholdRadius& R, const ExecPolicy& policy = {});

} // namespace genmetrics
