#pragma once

#include "textclf/error.hpp"
#include "textclf/vectorize.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace textclf {

enum class KernelKind { linear, polynomial, rbf, sigmoid };

const char* to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

struct KernelSpec {
    KernelKind kind = KernelKind::rbf;
    double gamma = 1.0; // unused by linear
    double coef = 0.0;  // r in the polynomial kernel
    // The sigmoid kernel is tanh(gamma*x.z + gamma). Setting this flag swaps
    // the intercept for coef, giving the conventional tanh(gamma*x.z + r).
    bool conventional_sigmoid = false;

    static constexpr int degree = 2; // polynomial is (gamma*x.z + r)^2

    bool operator==(const KernelSpec&) const = default;
};

// linear: x.z   polynomial: (gamma*x.z + coef)^2
// rbf: exp(-gamma*|x-z|^2)   sigmoid: tanh(gamma*x.z + gamma)
// Throws on dimension mismatch or on gamma <= 0 for the kernels that use it.
double kernel_eval(const KernelSpec& spec, const SparseVector& x, const SparseVector& z);

struct SolverConfig {
    double tolerance = 1e-3;      // KKT tolerance certified at termination
    std::size_t max_passes = 10000; // sweep budget
    std::uint64_t seed = 0;       // drives randomized pair selection
    std::size_t cache_rows = 2048; // kernel row cache capacity; 0 disables
};

struct SvmModel {
    std::vector<SparseVector> support_vectors;
    std::vector<double> dual_coef; // y_i * alpha_i per support vector
    double bias = 0.0;
    KernelSpec kernel;
    double c = 1.0;
    std::uint32_t n_features = 0;

    bool operator==(const SvmModel&) const = default;
};

/// Solver diagnostics, filled when a FitStats pointer is passed to svm_fit.
struct FitStats {
    std::size_t passes = 0;
    std::size_t steps = 0;
    std::vector<double> objective_by_pass; // dual objective after each sweep
    std::vector<double> alpha;             // final multipliers, full training set
    double bias = 0.0;
    double max_kkt_violation = 0.0;
    double dual_balance = 0.0; // sum of y_i * alpha_i
};

class SvmConvergenceError : public Error {
public:
    SvmConvergenceError(std::string message, SvmModel best, std::string report)
        : Error(std::move(message)), best_iterate(std::move(best)),
          violation_report(std::move(report)) {}

    SvmModel best_iterate;
    std::string violation_report;
};

// Trains a soft-margin SVM by sequential minimal optimization on the dual.
// Labels {0,1} map to {-1,+1} (0 -> -1), so positive decisions mean class 1.
// At termination every training point satisfies its KKT case within
// cfg.tolerance; exhausting the pass budget first raises SvmConvergenceError
// carrying the best iterate and a violation report.
SvmModel svm_fit(const FeatureMatrix& matrix, double c, const KernelSpec& spec,
                 const SolverConfig& cfg = {}, FitStats* stats = nullptr);

// The pre-sign decision value: sum_i dual_coef_i * K(x, sv_i) + bias.
double svm_decision(const SvmModel& model, const SparseVector& x);

// sign of the decision value; exactly 0 resolves to class 0.
int svm_predict(const SvmModel& model, const SparseVector& x);

} // namespace textclf
