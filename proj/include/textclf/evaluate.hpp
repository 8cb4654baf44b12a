#pragma once

#include "textclf/corpus.hpp"
#include "textclf/metrics.hpp"
#include "textclf/naive_bayes.hpp"
#include "textclf/svm.hpp"
#include "textclf/vectorize.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace textclf {

enum class ClassifierKind { nb, svm };

const char* to_string(ClassifierKind kind);

struct NbConfig {
    double alpha = 1.0;
    bool fit_prior = true;
};

struct SvmTrainConfig {
    double c = 1.0;
    KernelSpec kernel;
    SolverConfig solver;
};

struct PipelineConfig {
    FeatureKind features = FeatureKind::tfidf;
    ClassifierKind classifier = ClassifierKind::svm;
    NbConfig nb;
    SvmTrainConfig svm;
    TfWeighting tf_weighting = TfWeighting::relative;
    std::size_t max_features = 0;
};

/// Everything fitted on the training side of a split.
struct FittedPipeline {
    PipelineConfig config;
    Vocabulary vocabulary;
    std::optional<TfidfStats> tfidf_stats;
    std::optional<NbModel> nb;
    std::optional<SvmModel> svm;

    int predict(const TokenSeq& doc) const;
    double decision_score(const TokenSeq& doc) const;
    SparseVector encode(const TokenSeq& doc) const;
};

// Fits vocabulary, feature stats and the classifier on the training ids only.
FittedPipeline fit_pipeline(const Corpus& corpus, const Split& split,
                            const PipelineConfig& config);

// fit_pipeline on the training side, then metrics over the test side. Test
// documents are never visible to any fit step.
MetricReport evaluate_pipeline(const Corpus& corpus, const Split& split,
                               const PipelineConfig& config);

enum class SelectBy { accuracy, f1 };

struct GridSpec {
    std::vector<FeatureKind> feature_kinds{FeatureKind::count, FeatureKind::tfidf};
    std::vector<ClassifierKind> classifiers{ClassifierKind::nb, ClassifierKind::svm};
    std::vector<double> nb_alphas{1.0};
    std::vector<KernelKind> kernels{KernelKind::linear, KernelKind::rbf};
    std::vector<double> c_values{1.0, 10.0, 100.0};
    std::vector<double> gamma_values{0.01, 0.1, 1.0};
    double kernel_coef = 0.0;
    bool fit_prior = true;
    SelectBy select_by = SelectBy::accuracy;
    SolverConfig solver;
    TfWeighting tf_weighting = TfWeighting::relative;
    std::size_t max_features = 0;
};

struct GridRow {
    PipelineConfig config;
    std::optional<MetricReport> report; // empty when the cell failed to train
    std::string error;
};

struct GridResult {
    std::vector<GridRow> rows;
    std::size_t best = 0; // index of the winning row
};

// Evaluates every grid cell in a fixed deterministic order: feature kind,
// then classifier; NB cells iterate alpha only (the SVM axes collapse),
// SVM cells iterate kernel x C x gamma. A cell that fails to train records
// its error in the row instead of aborting the grid. `jobs` > 1 evaluates
// cells concurrently; row order and content do not depend on it.
GridResult grid_search(const Corpus& corpus, const Split& split, const GridSpec& grid,
                       std::size_t jobs = 1);

// CSV with header feature_kind,classifier,kernel,C,gamma,alpha,accuracy,
// precision,recall,f1. Axes a cell does not use are empty, as are the
// metric fields of failed cells.
void write_grid_csv(const GridResult& result, std::ostream& out);

std::string describe_row(const GridRow& row);

} // namespace textclf
