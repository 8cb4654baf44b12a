#pragma once

#include "textclf/vectorize.hpp"

#include <array>
#include <vector>

namespace textclf {

/// Multinomial Naive Bayes with additive smoothing, fitted in log space.
/// The artifact works with exactly two classes (0 = normal, 1 = abnormal);
/// the internal layout generalizes to k classes.
struct NbModel {
    std::vector<double> class_log_prior;               // [class]
    std::vector<std::vector<double>> feature_log_prob; // [class][feature]
    double alpha = 1.0;
    bool fit_prior = true;
    std::size_t n_features = 0;

    std::size_t n_classes() const { return class_log_prior.size(); }

    bool operator==(const NbModel&) const = default;
};

// Fits smoothed per-class feature log-probabilities:
//   theta_ci = (N_ci + alpha) / (N_c + alpha * n_features)
// where N_ci sums feature i over class-c rows. Feature values may be any
// nonnegative reals (fractional event counts), so TF-IDF rows are accepted.
// class_log_prior is log(count_c / total) when fit_prior, else log(1/2).
// Throws on alpha <= 0 or when either class has no rows.
NbModel nb_fit(const FeatureMatrix& matrix, double alpha, bool fit_prior = true);

// Unnormalized per-class log scores: prior + sum_i x_i * log_prob[c][i].
std::array<double, 2> nb_log_posterior(const NbModel& model, const SparseVector& x);

// Argmax over the log posterior; an exact tie resolves to class 0.
int nb_predict(const NbModel& model, const SparseVector& x);

} // namespace textclf
