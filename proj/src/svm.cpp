#include "textclf/svm.hpp"

#include "textclf/detail/prng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>

namespace textclf {

const char* to_string(KernelKind kind) {
    switch (kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::polynomial: return "polynomial";
    case KernelKind::rbf: return "rbf";
    case KernelKind::sigmoid: return "sigmoid";
    }
    return "?";
}

KernelKind kernel_kind_from_string(const std::string& name) {
    if (name == "linear") return KernelKind::linear;
    if (name == "polynomial" || name == "poly") return KernelKind::polynomial;
    if (name == "rbf") return KernelKind::rbf;
    if (name == "sigmoid") return KernelKind::sigmoid;
    throw Error(fmt::format("unknown kernel: {}", name));
}

namespace {

void validate_kernel(const KernelSpec& spec) {
    if (spec.kind != KernelKind::linear && !(spec.gamma > 0.0))
        throw Error(fmt::format("kernel gamma must be positive, got {}", spec.gamma));
}

double kernel_from_dots(const KernelSpec& spec, double xz, double xx, double zz) {
    switch (spec.kind) {
    case KernelKind::linear:
        return xz;
    case KernelKind::polynomial: {
        const double base = spec.gamma * xz + spec.coef;
        return base * base;
    }
    case KernelKind::rbf: {
        const double sq = std::max(0.0, xx + zz - 2.0 * xz);
        return std::exp(-spec.gamma * sq);
    }
    case KernelKind::sigmoid: {
        const double intercept = spec.conventional_sigmoid ? spec.coef : spec.gamma;
        return std::tanh(spec.gamma * xz + intercept);
    }
    }
    return 0.0;
}

} // namespace

double kernel_eval(const KernelSpec& spec, const SparseVector& x, const SparseVector& z) {
    validate_kernel(spec);
    if (x.dimension != z.dimension)
        throw Error(fmt::format("kernel dimension mismatch: {} vs {}", x.dimension,
                                z.dimension));
    const double xz = dot(x, z);
    if (spec.kind == KernelKind::rbf)
        return kernel_from_dots(spec, xz, dot(x, x), dot(z, z));
    return kernel_from_dots(spec, xz, 0.0, 0.0);
}

namespace {

// Bounded LRU cache of kernel matrix rows. Purely a training-time
// memoization: hit or miss, the returned values are identical.
class KernelRowCache {
public:
    KernelRowCache(std::size_t n, std::size_t capacity) : n_(n), capacity_(capacity) {}

    template <typename ComputeRow>
    const std::vector<double>& row(std::size_t i, ComputeRow&& compute) {
        if (capacity_ == 0) {
            scratch_.assign(n_, 0.0);
            compute(i, scratch_);
            return scratch_;
        }
        if (auto it = slots_.find(i); it != slots_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second.order);
            return it->second.values;
        }
        if (slots_.size() >= capacity_) {
            slots_.erase(lru_.back());
            lru_.pop_back();
        }
        lru_.push_front(i);
        auto& slot = slots_[i];
        slot.order = lru_.begin();
        slot.values.assign(n_, 0.0);
        compute(i, slot.values);
        return slot.values;
    }

private:
    struct Slot {
        std::vector<double> values;
        std::list<std::size_t>::iterator order;
    };
    std::size_t n_;
    std::size_t capacity_;
    std::unordered_map<std::size_t, Slot> slots_;
    std::list<std::size_t> lru_;
    std::vector<double> scratch_;
};

class SmoSolver {
public:
    SmoSolver(const FeatureMatrix& matrix, double c, const KernelSpec& spec,
              const SolverConfig& cfg)
        : rows_(matrix.rows), c_(c), spec_(spec), cfg_(cfg), n_(matrix.rows.size()),
          cache_(n_, std::min(cfg.cache_rows, n_)), rng_(cfg.seed) {
        y_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i)
            y_[i] = matrix.labels[i] == 1 ? 1.0 : -1.0;
        self_dot_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) self_dot_[i] = dot(rows_[i], rows_[i]);
        alpha_.assign(n_, 0.0);
        err_ = std::vector<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) err_[i] = -y_[i]; // f == 0 initially
        snap_eps_ = std::min(1e-8, 1e-8 * c_);
    }

    void solve(FitStats* stats) {
        // The sweep loop drives violations below half the certificate
        // tolerance; the outer rounds re-derive the bias and re-enter the
        // sweeps if the certificate does not hold yet.
        constexpr int kMaxCertRounds = 5;
        for (int round = 0; round < kMaxCertRounds; ++round) {
            run_sweeps(stats);
            rederive_bias();
            if (max_kkt_violation() <= cfg_.tolerance) {
                finish_stats(stats);
                return;
            }
        }
        fail_budget(stats, "certificate rounds exhausted");
    }

    SvmModel build_model() const {
        SvmModel model;
        model.kernel = spec_;
        model.c = c_;
        model.bias = beta_;
        model.n_features = rows_.empty() ? 0 : rows_.front().dimension;
        for (std::size_t i = 0; i < n_; ++i) {
            if (alpha_[i] > 0.0) {
                model.support_vectors.push_back(rows_[i]);
                model.dual_coef.push_back(y_[i] * alpha_[i]);
            }
        }
        return model;
    }

    double max_kkt_violation() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            worst = std::max(worst, kkt_violation(i));
        return worst;
    }

    double dual_balance() const {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) s += y_[i] * alpha_[i];
        return s;
    }

private:
    double kernel_ij(std::size_t i, std::size_t j) const {
        return kernel_from_dots(spec_, dot(rows_[i], rows_[j]), self_dot_[i],
                                self_dot_[j]);
    }

    const std::vector<double>& kernel_row(std::size_t i) {
        return cache_.row(i, [this](std::size_t r, std::vector<double>& out) {
            for (std::size_t j = 0; j < n_; ++j) out[j] = kernel_ij(r, j);
        });
    }

    bool is_free(double a) const { return a > free_eps() && a < c_ - free_eps(); }
    double free_eps() const { return 1e-12 * c_; }

    // Eq-12 objective from the error cache: since sum_i a_i y_i f0_i equals
    // the quadratic term doubled, W = (S_aye + S_a - beta*S_ay)/2 - S_a.
    double objective() const {
        double s_aye = 0.0, s_a = 0.0, s_ay = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            s_aye += alpha_[i] * y_[i] * err_[i];
            s_a += alpha_[i];
            s_ay += alpha_[i] * y_[i];
        }
        return 0.5 * (s_aye - beta_ * s_ay) - 0.5 * s_a;
    }

    double kkt_violation(std::size_t i) const {
        const double margin = 1.0 + y_[i] * err_[i]; // y_i * f(x_i)
        if (alpha_[i] <= free_eps()) return std::max(0.0, 1.0 - margin);
        if (alpha_[i] >= c_ - free_eps()) return std::max(0.0, margin - 1.0);
        return std::abs(margin - 1.0);
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1 = alpha_[i1], a2 = alpha_[i2];
        const double y1 = y_[i1], y2 = y_[i2];
        const double e1 = err_[i1], e2 = err_[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (s > 0.0) {
            lo = std::max(0.0, a1 + a2 - c_);
            hi = std::min(c_, a1 + a2);
        } else {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(c_, c_ + a2 - a1);
        }
        if (lo >= hi) return false;

        const double k11 = kernel_from_dots(spec_, self_dot_[i1], self_dot_[i1], self_dot_[i1]);
        const double k22 = kernel_from_dots(spec_, self_dot_[i2], self_dot_[i2], self_dot_[i2]);
        const double k12 = kernel_ij(i1, i2);
        const double eta = k11 + k22 - 2.0 * k12;

        double a2_new;
        if (eta > 0.0) {
            a2_new = a2 + y2 * (e1 - e2) / eta;
            a2_new = std::clamp(a2_new, lo, hi);
        } else {
            // flat or indefinite direction: evaluate the objective at both
            // segment ends and move to the lower one
            const double f1 = y1 * (e1 - beta_) - a1 * k11 - s * a2 * k12;
            const double f2 = y2 * (e2 - beta_) - s * a1 * k12 - a2 * k22;
            const double l1 = a1 + s * (a2 - lo);
            const double h1 = a1 + s * (a2 - hi);
            const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 +
                                  0.5 * lo * lo * k22 + s * lo * l1 * k12;
            const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 +
                                  0.5 * hi * hi * k22 + s * hi * h1 * k12;
            if (obj_lo < obj_hi - 1e-12)
                a2_new = lo;
            else if (obj_lo > obj_hi + 1e-12)
                a2_new = hi;
            else
                return false;
        }

        if (std::abs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12)) return false;

        if (a2_new - lo < snap_eps_)
            a2_new = lo;
        else if (hi - a2_new < snap_eps_)
            a2_new = hi;

        double a1_new = a1 + s * (a2 - a2_new);
        if (a1_new < snap_eps_) {
            a1_new = 0.0;
            a2_new = std::clamp(a2 + s * a1, lo, hi);
        } else if (c_ - a1_new < snap_eps_) {
            a1_new = c_;
            a2_new = std::clamp(a2 + s * (a1 - c_), lo, hi);
        }
        a1_new = std::clamp(a1_new, 0.0, c_);
        if (a1_new == a1 && a2_new == a2) return false;

        const double d1 = y1 * (a1_new - a1);
        const double d2 = y2 * (a2_new - a2);

        const double beta1 = beta_ - e1 - d1 * k11 - d2 * k12;
        const double beta2 = beta_ - e2 - d1 * k12 - d2 * k22;
        double beta_new;
        if (is_free(a1_new))
            beta_new = beta1;
        else if (is_free(a2_new))
            beta_new = beta2;
        else
            beta_new = 0.5 * (beta1 + beta2);
        const double d_beta = beta_new - beta_;

        const auto& row1 = kernel_row(i1);
        // row1 may be evicted while fetching row2 with a tiny cache; copy
        std::vector<double> row1_copy;
        const std::vector<double>* r1 = &row1;
        if (cfg_.cache_rows < 2) {
            row1_copy = row1;
            r1 = &row1_copy;
        }
        const auto& row2 = kernel_row(i2);
        for (std::size_t i = 0; i < n_; ++i)
            err_[i] += d1 * (*r1)[i] + d2 * row2[i] + d_beta;

        alpha_[i1] = a1_new;
        alpha_[i2] = a2_new;
        beta_ = beta_new;
        ++steps_;
        return true;
    }

    bool examine(std::size_t i2) {
        const double r2 = err_[i2] * y_[i2];
        const double tol = 0.5 * cfg_.tolerance; // sweep threshold, half the certificate
        const bool violates = (r2 < -tol && alpha_[i2] < c_) || (r2 > tol && alpha_[i2] > 0.0);
        if (!violates) return false;

        // second-choice heuristic: maximize |E1 - E2| over the free set
        std::size_t best = n_;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (i == i2 || !is_free(alpha_[i])) continue;
            const double gap = std::abs(err_[i] - err_[i2]);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n_ && take_step(best, i2)) return true;

        const std::size_t start1 = detail::bounded_draw(rng_, n_);
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i1 = (start1 + k) % n_;
            if (is_free(alpha_[i1]) && take_step(i1, i2)) return true;
        }
        const std::size_t start2 = detail::bounded_draw(rng_, n_);
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i1 = (start2 + k) % n_;
            if (take_step(i1, i2)) return true;
        }
        return false;
    }

    void run_sweeps(FitStats* stats) {
        std::size_t num_changed = 0;
        bool examine_all = true;
        while (num_changed > 0 || examine_all) {
            if (passes_ >= cfg_.max_passes) fail_budget(stats, "pass budget exhausted");
            ++passes_;
            num_changed = 0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (examine_all || is_free(alpha_[i]))
                    num_changed += examine(i) ? 1 : 0;
            }
            const double obj = objective();
#ifndef NDEBUG
            if (!objective_trace_.empty()) {
                const double prev = objective_trace_.back();
                assert(obj <= prev + 1e-9 * (1.0 + std::abs(prev)));
            }
#endif
            objective_trace_.push_back(obj);
            if (examine_all)
                examine_all = false;
            else if (num_changed == 0)
                examine_all = true;
        }
    }

    // beta from the free support vectors (averaged); with none free, the
    // midpoint of the feasible interval implied by the bound points
    void rederive_bias() {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (is_free(alpha_[i])) {
                sum += beta_ - err_[i]; // y_i - f0(x_i)
                ++count;
            }
        }
        double beta_new;
        if (count > 0) {
            beta_new = sum / static_cast<double>(count);
        } else {
            double lo = -std::numeric_limits<double>::infinity();
            double hi = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n_; ++i) {
                const double f_i = beta_ - err_[i];
                const bool at_zero = alpha_[i] <= free_eps();
                if ((y_[i] > 0.0 && at_zero) || (y_[i] < 0.0 && !at_zero))
                    lo = std::max(lo, f_i);
                else
                    hi = std::min(hi, f_i);
            }
            if (!std::isfinite(lo) || !std::isfinite(hi)) return;
            beta_new = 0.5 * (lo + hi);
        }
        const double shift = beta_new - beta_;
        if (shift == 0.0) return;
        for (std::size_t i = 0; i < n_; ++i) err_[i] += shift;
        beta_ = beta_new;
    }

    void finish_stats(FitStats* stats) {
        if (!stats) return;
        stats->passes = passes_;
        stats->steps = steps_;
        stats->objective_by_pass = objective_trace_;
        stats->alpha = alpha_;
        stats->bias = beta_;
        stats->max_kkt_violation = max_kkt_violation();
        stats->dual_balance = dual_balance();
    }

    [[noreturn]] void fail_budget(FitStats* stats, const char* why) {
        finish_stats(stats);
        std::size_t violators = 0;
        for (std::size_t i = 0; i < n_; ++i)
            if (kkt_violation(i) > cfg_.tolerance) ++violators;
        std::string report = fmt::format(
            "{}: {} passes, {} steps, max KKT violation {:.3e} (tolerance {:.3e}), "
            "{} violating points of {}",
            why, passes_, steps_, max_kkt_violation(), cfg_.tolerance, violators, n_);
        throw SvmConvergenceError(
            fmt::format("SMO did not converge: {}", report), build_model(), report);
    }

    const std::vector<SparseVector>& rows_;
    double c_;
    KernelSpec spec_;
    SolverConfig cfg_;
    std::size_t n_;
    KernelRowCache cache_;
    std::mt19937_64 rng_;
    std::vector<double> y_;
    std::vector<double> self_dot_;
    std::vector<double> alpha_;
    std::vector<double> err_;
    double beta_ = 0.0;
    double snap_eps_ = 1e-8;
    std::size_t passes_ = 0;
    std::size_t steps_ = 0;
    std::vector<double> objective_trace_;
};

} // namespace

SvmModel svm_fit(const FeatureMatrix& matrix, double c, const KernelSpec& spec,
                 const SolverConfig& cfg, FitStats* stats) {
    if (!(c > 0.0)) throw Error(fmt::format("box constraint C must be positive, got {}", c));
    validate_kernel(spec);
    if (matrix.rows.empty()) throw Error("cannot fit on an empty feature matrix");
    if (matrix.rows.size() != matrix.labels.size())
        throw Error("feature matrix rows and labels must have equal length");
    if (!(cfg.tolerance > 0.0)) throw Error("solver tolerance must be positive");
    if (cfg.max_passes < 1) throw Error("solver pass budget must be at least 1");

    bool seen[2] = {false, false};
    for (int label : matrix.labels) {
        if (label != 0 && label != 1) throw Error("labels must be 0 or 1");
        seen[label] = true;
    }
    if (!seen[0] || !seen[1])
        throw Error("SVM training requires both classes in the training data");

    SmoSolver solver(matrix, c, spec, cfg);
    solver.solve(stats);
    SvmModel model = solver.build_model();
    if (model.support_vectors.empty())
        throw Error("solver produced no support vectors"); // unreachable for valid input
    return model;
}

double svm_decision(const SvmModel& model, const SparseVector& x) {
    if (x.dimension != model.n_features)
        throw Error(fmt::format("feature dimension mismatch: vector has {}, model expects {}",
                                x.dimension, model.n_features));
    double value = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
        value += model.dual_coef[i] * kernel_eval(model.kernel, x, model.support_vectors[i]);
    return value;
}

int svm_predict(const SvmModel& model, const SparseVector& x) {
    return svm_decision(model, x) > 0.0 ? 1 : 0;
}

} // namespace textclf
