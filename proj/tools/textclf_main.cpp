#include "textclf/corpus.hpp"
#include "textclf/error.hpp"
#include "textclf/evaluate.hpp"
#include "textclf/model_io.hpp"
#include "textclf/tokenize.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace textclf;

constexpr int kExitDataError = 2;

FeatureKind parse_features(const std::string& name) {
    if (name == "count") return FeatureKind::count;
    if (name == "tfidf") return FeatureKind::tfidf;
    throw Error(fmt::format("unknown feature kind: {}", name));
}

ClassifierKind parse_classifier(const std::string& name) {
    if (name == "nb") return ClassifierKind::nb;
    if (name == "svm") return ClassifierKind::svm;
    throw Error(fmt::format("unknown classifier: {}", name));
}

struct CommonOptions {
    std::string input_path;
    double split_fraction = 0.7;
    std::uint64_t seed = 42;
    bool stratified = false;
    double tolerance = 1e-3;
    std::size_t max_passes = 10000;
    std::size_t max_features = 0;
    bool tf_literal = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--input", opt.input_path, "labeled dataset (label<TAB>text per line)")
        ->required();
    cmd->add_option("--split", opt.split_fraction, "train fraction (default 0.7)");
    cmd->add_option("--seed", opt.seed, "split and solver seed (default 42)");
    cmd->add_flag("--stratified", opt.stratified, "stratify the split per class");
    cmd->add_option("--tol", opt.tolerance, "SVM KKT tolerance (default 1e-3)");
    cmd->add_option("--max-passes", opt.max_passes, "SVM sweep budget");
    cmd->add_option("--max-features", opt.max_features,
                    "cap vocabulary to top-K terms by document frequency (0 = all)");
    cmd->add_flag("--tf-literal", opt.tf_literal,
                  "literal TF reading: every present term has TF 1 (pure IDF)");
}

void print_report(const MetricReport& r) {
    fmt::print("accuracy   {:.4f}\n", r.accuracy);
    fmt::print("precision  {:.4f}   (macro {:.4f})\n", r.precision, r.precision_macro);
    fmt::print("recall     {:.4f}   (macro {:.4f})\n", r.recall, r.recall_macro);
    fmt::print("f1         {:.4f}   (macro {:.4f})\n", r.f1, r.f1_macro);
    fmt::print("confusion  tp={} fp={} fn={} tn={}\n", r.matrix.tp, r.matrix.fp,
               r.matrix.fn, r.matrix.tn);
    if (r.degenerate)
        fmt::print("warning    a zero-denominator metric was reported as 0.0\n");
}

std::string config_line(const PipelineConfig& cfg) {
    if (cfg.classifier == ClassifierKind::svm)
        return fmt::format(
            "features={} classifier=svm kernel={} C={} gamma={} coef={} tol={}",
            to_string(cfg.features), to_string(cfg.svm.kernel.kind), cfg.svm.c,
            cfg.svm.kernel.gamma, cfg.svm.kernel.coef, cfg.svm.solver.tolerance);
    return fmt::format("features={} classifier=nb alpha={} fit_prior={}",
                       to_string(cfg.features), cfg.nb.alpha, cfg.nb.fit_prior);
}

int run_train(const CommonOptions& common, const PipelineConfig& config,
              const std::string& model_path, const std::string& report_csv,
              const std::string& stamp) {
    Corpus corpus = load_corpus(common.input_path);
    require_both_classes(corpus);
    Split split = split_corpus(corpus, common.split_fraction, common.seed, common.stratified);

    fmt::print(stderr, "train: {} docs ({} train / {} test) seed={} {}\n", corpus.size(),
               split.train_ids.size(), split.test_ids.size(), common.seed,
               config_line(config));

    FittedPipeline fitted = fit_pipeline(corpus, split, config);

    std::vector<int> predicted;
    std::vector<int> truth;
    for (std::size_t id : split.test_ids) {
        predicted.push_back(fitted.predict(tokenize(corpus.documents[id].text)));
        truth.push_back(corpus.documents[id].label);
    }
    const MetricReport report = compute_metrics(predicted, truth);

    ModelBundle bundle;
    bundle.feature_kind = config.features;
    bundle.vocabulary = std::move(fitted.vocabulary);
    bundle.tfidf_stats = std::move(fitted.tfidf_stats);
    if (fitted.nb)
        bundle.classifier = std::move(*fitted.nb);
    else
        bundle.classifier = std::move(*fitted.svm);
    bundle.metadata.created_at = stamp;
    bundle.metadata.corpus_fingerprint = fingerprint_corpus(corpus);
    bundle.metadata.seed = common.seed;
    bundle.metadata.train_fraction = common.split_fraction;
    auto& hp = bundle.metadata.hyperparameters;
    hp.emplace_back("classifier", to_string(config.classifier));
    hp.emplace_back("features", to_string(config.features));
    if (config.classifier == ClassifierKind::svm) {
        hp.emplace_back("c", fmt::format("{}", config.svm.c));
        hp.emplace_back("gamma", fmt::format("{}", config.svm.kernel.gamma));
        hp.emplace_back("kernel", to_string(config.svm.kernel.kind));
    } else {
        hp.emplace_back("alpha", fmt::format("{}", config.nb.alpha));
        hp.emplace_back("fit_prior", config.nb.fit_prior ? "true" : "false");
    }
    save_model(bundle, model_path);
    fmt::print(stderr, "model written to {}\n", model_path);

    print_report(report);

    if (!report_csv.empty()) {
        GridResult single;
        single.rows.push_back({config, report, ""});
        std::ofstream out(report_csv, std::ios::binary);
        if (!out) throw Error(fmt::format("cannot write report: {}", report_csv));
        write_grid_csv(single, out);
    }
    return 0;
}

int run_evaluate(const std::string& model_path, const std::string& input_path) {
    const ModelBundle bundle = load_model(model_path);
    const Corpus corpus = load_corpus(input_path);

    FittedPipeline pipeline;
    pipeline.config.features = bundle.feature_kind;
    pipeline.vocabulary = bundle.vocabulary;
    pipeline.tfidf_stats = bundle.tfidf_stats;
    if (const auto* nb = std::get_if<NbModel>(&bundle.classifier)) {
        pipeline.config.classifier = ClassifierKind::nb;
        pipeline.nb = *nb;
    } else {
        pipeline.config.classifier = ClassifierKind::svm;
        pipeline.svm = std::get<SvmModel>(bundle.classifier);
    }

    fmt::print(stderr, "evaluate: model={} input={} ({} docs)\n", model_path, input_path,
               corpus.size());

    std::vector<int> predicted;
    std::vector<int> truth;
    for (const auto& doc : corpus.documents) {
        predicted.push_back(pipeline.predict(tokenize(doc.text)));
        truth.push_back(doc.label);
    }
    print_report(compute_metrics(predicted, truth));
    return 0;
}

int run_predict(const std::string& model_path, const std::string& input_path,
                const std::string& text) {
    const ModelBundle bundle = load_model(model_path);

    FittedPipeline pipeline;
    pipeline.config.features = bundle.feature_kind;
    pipeline.vocabulary = bundle.vocabulary;
    pipeline.tfidf_stats = bundle.tfidf_stats;
    if (const auto* nb = std::get_if<NbModel>(&bundle.classifier)) {
        pipeline.config.classifier = ClassifierKind::nb;
        pipeline.nb = *nb;
    } else {
        pipeline.config.classifier = ClassifierKind::svm;
        pipeline.svm = std::get<SvmModel>(bundle.classifier);
    }

    fmt::print(stderr, "predict: model={} features={} classifier={}\n", model_path,
               to_string(bundle.feature_kind), to_string(pipeline.config.classifier));

    const auto emit = [&](const std::string& sentence) {
        const std::string cleaned = clean_text(sentence);
        const TokenSeq tokens = tokenize(cleaned);
        const int label = pipeline.predict(tokens);
        const double score = pipeline.decision_score(tokens);
        fmt::print("{}\t{}\t{}\n", label == 1 ? "abnormal" : "normal", score, cleaned);
    };

    if (!text.empty()) {
        emit(text);
        return 0;
    }
    std::ifstream in(input_path, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open input file: {}", input_path));
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        emit(line);
    }
    return 0;
}

int run_grid(const CommonOptions& common, GridSpec grid, const std::string& out_path,
             std::size_t jobs) {
    Corpus corpus = load_corpus(common.input_path);
    require_both_classes(corpus);
    Split split = split_corpus(corpus, common.split_fraction, common.seed, common.stratified);

    grid.solver.tolerance = common.tolerance;
    grid.solver.max_passes = common.max_passes;
    grid.solver.seed = common.seed;
    grid.tf_weighting = common.tf_literal ? TfWeighting::literal_unit : TfWeighting::relative;
    grid.max_features = common.max_features;

    fmt::print(stderr,
               "grid-search: {} docs ({} train / {} test) seed={} jobs={} "
               "features={} classifiers={} kernels={} C-values={} gammas={} alphas={}\n",
               corpus.size(), split.train_ids.size(), split.test_ids.size(), common.seed,
               jobs, grid.feature_kinds.size(), grid.classifiers.size(),
               grid.kernels.size(), grid.c_values.size(), grid.gamma_values.size(),
               grid.nb_alphas.size());

    const GridResult result = grid_search(corpus, split, grid, jobs);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write grid CSV: {}", out_path));
    write_grid_csv(result, out);
    if (!out) throw Error(fmt::format("write failed: {}", out_path));

    fmt::print("best: {}\n", describe_row(result.rows[result.best]));
    fmt::print(stderr, "{} rows written to {}\n", result.rows.size(), out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bengali text abnormality classifier: count/TF-IDF features with "
                 "multinomial naive Bayes or kernel SVM"};
    app.require_subcommand(1);

    CommonOptions common;
    std::string model_path = "model.json";
    std::string features_name = "tfidf";
    std::string classifier_name = "svm";
    std::string kernel_name = "rbf";
    double svm_c = 1.0;
    double svm_gamma = 1.0;
    double kernel_coef = 0.0;
    bool sigmoid_conventional = false;
    double nb_alpha = 1.0;
    bool no_fit_prior = false;
    std::string report_csv;
    std::string stamp;

    auto* train = app.add_subcommand("train", "fit a pipeline and write a model file");
    add_common(train, common);
    train->add_option("--out,-o", model_path, "model output path (default model.json)");
    train->add_option("--features", features_name, "count | tfidf (default tfidf)");
    train->add_option("--classifier", classifier_name, "nb | svm (default svm)");
    train->add_option("--kernel", kernel_name, "linear | polynomial | rbf | sigmoid");
    train->add_option("--c", svm_c, "SVM box constraint C (default 1)");
    train->add_option("--gamma", svm_gamma, "kernel gamma (default 1)");
    train->add_option("--coef", kernel_coef, "polynomial kernel coefficient r");
    train->add_flag("--sigmoid-conventional", sigmoid_conventional,
                    "sigmoid kernel uses coef as intercept instead of gamma");
    train->add_option("--alpha", nb_alpha, "NB smoothing prior (default 1.0)");
    train->add_flag("--no-fit-prior", no_fit_prior, "use uniform class priors");
    train->add_option("--report-csv", report_csv, "also write the test report as CSV");
    train->add_option("--stamp", stamp,
                      "provenance stamp stored in the model (default empty, keeping "
                      "identical runs byte-identical)");

    std::string eval_model, eval_input;
    auto* evaluate = app.add_subcommand("evaluate", "score a model against a labeled file");
    evaluate->add_option("--model", eval_model, "model file")->required();
    evaluate->add_option("--input", eval_input, "labeled dataset")->required();

    std::string pred_model, pred_input, pred_text;
    auto* predict = app.add_subcommand("predict", "label sentences with a trained model");
    predict->add_option("--model", pred_model, "model file")->required();
    auto* pred_in = predict->add_option("--input", pred_input, "file with one sentence per line");
    auto* pred_tx = predict->add_option("--text", pred_text, "a single sentence");
    pred_in->excludes(pred_tx);

    GridSpec grid;
    std::vector<std::string> grid_features{"count", "tfidf"};
    std::vector<std::string> grid_classifiers{"nb", "svm"};
    std::vector<std::string> grid_kernels{"linear", "rbf"};
    std::string grid_out = "grid.csv";
    std::size_t jobs = 1;
    bool select_f1 = false;

    auto* gs = app.add_subcommand("grid-search", "evaluate a hyperparameter grid");
    add_common(gs, common);
    gs->add_option("--out,-o", grid_out, "grid CSV output path (default grid.csv)");
    gs->add_option("--features", grid_features, "feature kinds to sweep")->delimiter(',');
    gs->add_option("--classifiers", grid_classifiers, "classifiers to sweep")->delimiter(',');
    gs->add_option("--kernels", grid_kernels, "kernels to sweep")->delimiter(',');
    gs->add_option("--grid-c", grid.c_values, "C values (default 1,10,100)")->delimiter(',');
    gs->add_option("--grid-gamma", grid.gamma_values, "gamma values (default 0.01,0.1,1)")
        ->delimiter(',');
    gs->add_option("--grid-alpha", grid.nb_alphas, "NB alpha values (default 1)")
        ->delimiter(',');
    gs->add_option("--coef", grid.kernel_coef, "polynomial kernel coefficient r");
    gs->add_flag("--select-f1", select_f1, "pick the best row by F1 instead of accuracy");
    gs->add_option("--jobs", jobs, "concurrent grid cells (default 1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            PipelineConfig config;
            config.features = parse_features(features_name);
            config.classifier = parse_classifier(classifier_name);
            config.nb.alpha = nb_alpha;
            config.nb.fit_prior = !no_fit_prior;
            config.svm.c = svm_c;
            config.svm.kernel.kind = kernel_kind_from_string(kernel_name);
            config.svm.kernel.gamma = svm_gamma;
            config.svm.kernel.coef = kernel_coef;
            config.svm.kernel.conventional_sigmoid = sigmoid_conventional;
            config.svm.solver.tolerance = common.tolerance;
            config.svm.solver.max_passes = common.max_passes;
            config.svm.solver.seed = common.seed;
            config.tf_weighting =
                common.tf_literal ? TfWeighting::literal_unit : TfWeighting::relative;
            config.max_features = common.max_features;
            return run_train(common, config, model_path, report_csv, stamp);
        }
        if (evaluate->parsed()) return run_evaluate(eval_model, eval_input);
        if (predict->parsed()) return run_predict(pred_model, pred_input, pred_text);
        if (gs->parsed()) {
            grid.feature_kinds.clear();
            for (const auto& f : grid_features) grid.feature_kinds.push_back(parse_features(f));
            grid.classifiers.clear();
            for (const auto& c : grid_classifiers)
                grid.classifiers.push_back(parse_classifier(c));
            grid.kernels.clear();
            for (const auto& k : grid_kernels)
                grid.kernels.push_back(kernel_kind_from_string(k));
            grid.select_by = select_f1 ? SelectBy::f1 : SelectBy::accuracy;
            return run_grid(common, grid, grid_out, jobs);
        }
    } catch (const Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitDataError;
    } catch (const std::exception& e) {
        fmt::print(stderr, "internal error: {}\n", e.what());
        return 1;
    }
    return 1;
}
