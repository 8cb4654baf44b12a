#pragma once

// Brute-force multinomial Bayes in exact rational arithmetic, independent of
// the library implementation. Feature values are integer counts and alpha is
// a rational, so every score is an exact fraction and argmax has no rounding.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <vector>

namespace nboracle {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

struct Problem {
    std::vector<std::vector<long>> rows; // integer feature counts
    std::vector<int> labels;             // 0/1
    long alpha_num = 1;
    long alpha_den = 1;
    bool fit_prior = true;
};

struct ExactModel {
    Rational prior[2];
    std::vector<Rational> theta[2]; // per-class per-feature probabilities
};

inline ExactModel fit(const Problem& p) {
    const std::size_t n_features = p.rows.front().size();
    BigInt class_count[2] = {0, 0};
    std::vector<BigInt> totals[2];
    totals[0].assign(n_features, 0);
    totals[1].assign(n_features, 0);
    for (std::size_t r = 0; r < p.rows.size(); ++r) {
        const int c = p.labels[r];
        ++class_count[c];
        for (std::size_t i = 0; i < n_features; ++i) totals[c][i] += p.rows[r][i];
    }

    ExactModel model;
    for (int c = 0; c < 2; ++c) {
        model.prior[c] = p.fit_prior
                             ? Rational(class_count[c], BigInt(p.rows.size()))
                             : Rational(1, 2);
        BigInt class_total = 0;
        for (const auto& t : totals[c]) class_total += t;
        // theta = (N_ci + a/b) / (N_c + a/b * n) = (b*N_ci + a) / (b*N_c + a*n)
        const BigInt denom = p.alpha_den * class_total + p.alpha_num * BigInt(n_features);
        for (std::size_t i = 0; i < n_features; ++i)
            model.theta[c].emplace_back(p.alpha_den * totals[c][i] + p.alpha_num, denom);
    }
    return model;
}

inline Rational score(const ExactModel& model, const std::vector<long>& x, int c) {
    Rational s = model.prior[c];
    for (std::size_t i = 0; i < x.size(); ++i)
        for (long k = 0; k < x[i]; ++k) s *= model.theta[c][i];
    return s;
}

// argmax over exact scores; ties resolve to class 0
inline int predict(const ExactModel& model, const std::vector<long>& x) {
    return score(model, x, 1) > score(model, x, 0) ? 1 : 0;
}

// natural log of an exact positive rational, accurate to ~1e-15
inline double log_rational(const Rational& r) {
    const double num = static_cast<double>(boost::multiprecision::numerator(r));
    const double den = static_cast<double>(boost::multiprecision::denominator(r));
    return std::log(num) - std::log(den);
}

} // namespace nboracle
