#include "textclf/naive_bayes.hpp"

#include "textclf/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace textclf {

namespace {
constexpr std::size_t kNumClasses = 2;
}

NbModel nb_fit(const FeatureMatrix& matrix, double alpha, bool fit_prior) {
    if (!(alpha > 0.0)) throw Error("smoothing prior alpha must be positive");
    if (matrix.rows.empty()) throw Error("cannot fit on an empty feature matrix");

    const std::size_t n_features = matrix.rows.front().dimension;

    std::vector<std::size_t> class_count(kNumClasses, 0);
    std::vector<std::vector<double>> feature_total(kNumClasses,
                                                   std::vector<double>(n_features, 0.0));
    for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
        const int label = matrix.labels[r];
        if (label != 0 && label != 1)
            throw Error(fmt::format("label out of range at row {}", r));
        ++class_count[label];
        for (const auto& [col, value] : matrix.rows[r].entries) {
            if (value < 0.0)
                throw Error(fmt::format("negative feature value at row {}", r));
            feature_total[label][col] += value;
        }
    }
    for (std::size_t c = 0; c < kNumClasses; ++c)
        if (class_count[c] == 0)
            throw Error(fmt::format("class {} has no training rows", c));

    NbModel model;
    model.alpha = alpha;
    model.fit_prior = fit_prior;
    model.n_features = n_features;
    model.class_log_prior.resize(kNumClasses);
    model.feature_log_prob.assign(kNumClasses, std::vector<double>(n_features));

    const auto total_rows = static_cast<double>(matrix.rows.size());
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        model.class_log_prior[c] =
            fit_prior ? std::log(static_cast<double>(class_count[c]) / total_rows)
                      : std::log(1.0 / static_cast<double>(kNumClasses));

        double class_total = 0.0;
        for (double v : feature_total[c]) class_total += v;
        const double denom = class_total + alpha * static_cast<double>(n_features);
        for (std::size_t i = 0; i < n_features; ++i)
            model.feature_log_prob[c][i] = std::log((feature_total[c][i] + alpha) / denom);
    }
    return model;
}

std::array<double, 2> nb_log_posterior(const NbModel& model, const SparseVector& x) {
    if (x.dimension != model.n_features)
        throw Error(fmt::format("feature dimension mismatch: vector has {}, model expects {}",
                                x.dimension, model.n_features));

    std::array<double, 2> scores{};
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        double score = model.class_log_prior[c];
        for (const auto& [col, value] : x.entries)
            score += value * model.feature_log_prob[c][col];
        scores[c] = score;
    }
    return scores;
}

int nb_predict(const NbModel& model, const SparseVector& x) {
    const auto scores = nb_log_posterior(model, x);
    return scores[1] > scores[0] ? 1 : 0;
}

} // namespace textclf
