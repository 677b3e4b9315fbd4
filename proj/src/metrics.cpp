#include "canamrf/metrics.hpp"

namespace canamrf {

double precision_score(std::size_t tp, std::size_t fp) {
    if (tp + fp == 0) return 0.0;
    return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double recall_score(std::size_t tp, std::size_t fn) {
    if (tp + fn == 0) return 0.0;
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double f1_score(double precision, double recall) {
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

Metrics Metrics::from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
    Metrics m{tp, fp, fn, tn};
    m.precision = precision_score(tp, fp);
    m.recall = recall_score(tp, fn);
    m.f1 = f1_score(m.precision, m.recall);
    return m;
}

double Metrics::accuracy() const {
    if (total() == 0) return 0.0;
    return static_cast<double>(tp + tn) / static_cast<double>(total());
}

}  // namespace canamrf
