#include "textclf/metrics.hpp"

#include "textclf/error.hpp"

namespace textclf {

namespace {

double ratio(std::size_t num, std::size_t den, bool& degenerate) {
    if (den == 0) {
        degenerate = true;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r, bool& degenerate) {
    if (p + r == 0.0) {
        degenerate = true;
        return 0.0;
    }
    return 2.0 * p * r / (p + r);
}

} // namespace

MetricReport compute_metrics(const std::vector<int>& predicted,
                             const std::vector<int>& truth) {
    if (predicted.empty()) throw Error("cannot compute metrics on empty predictions");
    if (predicted.size() != truth.size())
        throw Error("prediction and truth lists must have equal length");

    MetricReport report;
    auto& m = report.matrix;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool pred_pos = predicted[i] == 1;
        const bool true_pos = truth[i] == 1;
        if (pred_pos && true_pos)
            ++m.tp;
        else if (pred_pos && !true_pos)
            ++m.fp;
        else if (!pred_pos && true_pos)
            ++m.fn;
        else
            ++m.tn;
    }

    report.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(m.total());
    report.precision = ratio(m.tp, m.tp + m.fp, report.degenerate);
    report.recall = ratio(m.tp, m.tp + m.fn, report.degenerate);
    report.f1 = harmonic(report.precision, report.recall, report.degenerate);

    // the same three metrics with class 0 treated as positive
    const double precision_neg = ratio(m.tn, m.tn + m.fn, report.degenerate);
    const double recall_neg = ratio(m.tn, m.tn + m.fp, report.degenerate);
    const double f1_neg = harmonic(precision_neg, recall_neg, report.degenerate);

    report.precision_macro = 0.5 * (report.precision + precision_neg);
    report.recall_macro = 0.5 * (report.recall + recall_neg);
    report.f1_macro = 0.5 * (report.f1 + f1_neg);
    return report;
}

} // namespace textclf
