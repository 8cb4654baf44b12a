#pragma once

#include <cstddef>
#include <vector>

namespace textclf {

/// Binary confusion counts with class 1 (abnormal) as positive.
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
};

struct MetricReport {
    double accuracy = 0.0;
    // positive-class (abnormal) metrics
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // macro averages over both classes, reported alongside
    double precision_macro = 0.0;
    double recall_macro = 0.0;
    double f1_macro = 0.0;
    ConfusionMatrix matrix;
    // set when any metric had a zero denominator and was defined as 0.0
    bool degenerate = false;
};

// Accuracy, precision, recall and F1 against the truth labels. Throws on
// empty or mismatched inputs. Zero-denominator metrics are 0.0 and flagged.
MetricReport compute_metrics(const std::vector<int>& predicted,
                             const std::vector<int>& truth);

} // namespace textclf
