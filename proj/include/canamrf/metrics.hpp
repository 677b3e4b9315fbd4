#pragma once

#include <cstddef>

namespace canamrf {

/// Binary confusion counts for the positive (depressed) class with the
/// derived scores. Ratios with a zero denominator are defined as 0.
struct Metrics {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    static Metrics from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);
    double accuracy() const;
    std::size_t total() const { return tp + fp + fn + tn; }
    friend bool operator==(const Metrics&, const Metrics&) = default;
};

double precision_score(std::size_t tp, std::size_t fp);
double recall_score(std::size_t tp, std::size_t fn);
/// Harmonic mean 2PR/(P+R); 0 when P+R == 0.
double f1_score(double precision, double recall);

}  // namespace canamrf
