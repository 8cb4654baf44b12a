#include "textclf/evaluate.hpp"

#include "textclf/error.hpp"
#include "textclf/tokenize.hpp"

#include <fmt/format.h>

#include <atomic>
#include <thread>

namespace textclf {

const char* to_string(ClassifierKind kind) {
    return kind == ClassifierKind::nb ? "nb" : "svm";
}

SparseVector FittedPipeline::encode(const TokenSeq& doc) const {
    return config.features == FeatureKind::count
               ? count_vectorize(doc, vocabulary)
               : tfidf_vectorize(doc, vocabulary, *tfidf_stats);
}

int FittedPipeline::predict(const TokenSeq& doc) const {
    const SparseVector x = encode(doc);
    return nb ? nb_predict(*nb, x) : svm_predict(*svm, x);
}

double FittedPipeline::decision_score(const TokenSeq& doc) const {
    const SparseVector x = encode(doc);
    if (nb) {
        const auto scores = nb_log_posterior(*nb, x);
        return scores[1] - scores[0];
    }
    return svm_decision(*svm, x);
}

namespace {

std::vector<TokenSeq> tokenize_ids(const Corpus& corpus,
                                   const std::vector<std::size_t>& ids) {
    std::vector<TokenSeq> docs;
    docs.reserve(ids.size());
    for (std::size_t id : ids) docs.push_back(tokenize(corpus.documents.at(id).text));
    return docs;
}

std::vector<int> labels_of(const Corpus& corpus, const std::vector<std::size_t>& ids) {
    std::vector<int> labels;
    labels.reserve(ids.size());
    for (std::size_t id : ids) labels.push_back(corpus.documents.at(id).label);
    return labels;
}

} // namespace

FittedPipeline fit_pipeline(const Corpus& corpus, const Split& split,
                            const PipelineConfig& config) {
    const auto train_docs = tokenize_ids(corpus, split.train_ids);
    const auto train_labels = labels_of(corpus, split.train_ids);

    FittedPipeline fitted;
    fitted.config = config;
    fitted.vocabulary = fit_vocabulary(train_docs, config.max_features);
    if (config.features == FeatureKind::tfidf)
        fitted.tfidf_stats =
            fit_tfidf(fitted.vocabulary, train_docs.size(), config.tf_weighting);

    const FeatureMatrix matrix =
        build_matrix(train_docs, train_labels, fitted.vocabulary, config.features,
                     fitted.tfidf_stats ? &*fitted.tfidf_stats : nullptr);

    if (config.classifier == ClassifierKind::nb)
        fitted.nb = nb_fit(matrix, config.nb.alpha, config.nb.fit_prior);
    else
        fitted.svm = svm_fit(matrix, config.svm.c, config.svm.kernel, config.svm.solver);
    return fitted;
}

MetricReport evaluate_pipeline(const Corpus& corpus, const Split& split,
                               const PipelineConfig& config) {
    const FittedPipeline fitted = fit_pipeline(corpus, split, config);

    std::vector<int> predicted;
    predicted.reserve(split.test_ids.size());
    for (std::size_t id : split.test_ids)
        predicted.push_back(fitted.predict(tokenize(corpus.documents.at(id).text)));
    return compute_metrics(predicted, labels_of(corpus, split.test_ids));
}

namespace {

std::vector<PipelineConfig> expand_grid(const GridSpec& grid) {
    if (grid.feature_kinds.empty() || grid.classifiers.empty())
        throw Error("grid axes must be non-empty");

    std::vector<PipelineConfig> cells;
    for (FeatureKind features : grid.feature_kinds) {
        for (ClassifierKind classifier : grid.classifiers) {
            PipelineConfig base;
            base.features = features;
            base.classifier = classifier;
            base.tf_weighting = grid.tf_weighting;
            base.max_features = grid.max_features;
            if (classifier == ClassifierKind::nb) {
                if (grid.nb_alphas.empty()) throw Error("grid needs at least one alpha");
                for (double alpha : grid.nb_alphas) {
                    if (!(alpha > 0.0)) throw Error("grid alpha values must be positive");
                    PipelineConfig cell = base;
                    cell.nb.alpha = alpha;
                    cell.nb.fit_prior = grid.fit_prior;
                    cells.push_back(cell);
                }
            } else {
                if (grid.kernels.empty() || grid.c_values.empty() || grid.gamma_values.empty())
                    throw Error("grid needs at least one kernel, C and gamma");
                for (KernelKind kernel : grid.kernels) {
                    for (double c : grid.c_values) {
                        if (!(c > 0.0)) throw Error("grid C values must be positive");
                        for (double gamma : grid.gamma_values) {
                            if (!(gamma > 0.0)) throw Error("grid gamma values must be positive");
                            PipelineConfig cell = base;
                            cell.svm.c = c;
                            cell.svm.kernel.kind = kernel;
                            cell.svm.kernel.gamma = gamma;
                            cell.svm.kernel.coef = grid.kernel_coef;
                            cell.svm.solver = grid.solver;
                            cells.push_back(cell);
                        }
                    }
                }
            }
        }
    }
    return cells;
}

double selection_score(const GridRow& row, SelectBy select_by) {
    if (!row.report) return -1.0;
    return select_by == SelectBy::accuracy ? row.report->accuracy : row.report->f1;
}

} // namespace

GridResult grid_search(const Corpus& corpus, const Split& split, const GridSpec& grid,
                       std::size_t jobs) {
    const std::vector<PipelineConfig> cells = expand_grid(grid);

    GridResult result;
    result.rows.resize(cells.size());

    const auto run_cell = [&](std::size_t i) {
        GridRow& row = result.rows[i];
        row.config = cells[i];
        try {
            row.report = evaluate_pipeline(corpus, split, cells[i]);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    if (jobs <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        const std::size_t worker_count = std::min(jobs, cells.size());
        workers.reserve(worker_count);
        for (std::size_t w = 0; w < worker_count; ++w) {
            workers.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cells.size()) return;
                    run_cell(i);
                }
            });
        }
        for (auto& worker : workers) worker.join();
    }

    result.best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const double score = selection_score(result.rows[i], grid.select_by);
        if (score > best_score) {
            best_score = score;
            result.best = i;
        }
    }
    return result;
}

void write_grid_csv(const GridResult& result, std::ostream& out) {
    out << "feature_kind,classifier,kernel,C,gamma,alpha,accuracy,precision,recall,f1\n";
    for (const GridRow& row : result.rows) {
        const PipelineConfig& cfg = row.config;
        out << to_string(cfg.features) << ',' << to_string(cfg.classifier) << ',';
        if (cfg.classifier == ClassifierKind::svm) {
            out << to_string(cfg.svm.kernel.kind) << ','
                << fmt::format("{}", cfg.svm.c) << ','
                << fmt::format("{}", cfg.svm.kernel.gamma) << ",,";
        } else {
            out << ",,," << fmt::format("{}", cfg.nb.alpha) << ',';
        }
        if (row.report) {
            out << fmt::format("{},{},{},{}", row.report->accuracy, row.report->precision,
                               row.report->recall, row.report->f1);
        } else {
            out << ",,,";
        }
        out << '\n';
    }
}

std::string describe_row(const GridRow& row) {
    const PipelineConfig& cfg = row.config;
    std::string head =
        cfg.classifier == ClassifierKind::svm
            ? fmt::format("features={} classifier=svm kernel={} C={} gamma={}",
                          to_string(cfg.features), to_string(cfg.svm.kernel.kind),
                          cfg.svm.c, cfg.svm.kernel.gamma)
            : fmt::format("features={} classifier=nb alpha={}", to_string(cfg.features),
                          cfg.nb.alpha);
    if (!row.report) return fmt::format("{} error={}", head, row.error);
    return fmt::format("{} accuracy={:.4f} precision={:.4f} recall={:.4f} f1={:.4f}",
                       head, row.report->accuracy, row.report->precision,
                       row.report->recall, row.report->f1);
}

} // namespace textclf
