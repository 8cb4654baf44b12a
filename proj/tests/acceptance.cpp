// Acceptance suite: one pass/fail line per criterion, exit code is the
// number of failed criteria. Criteria with a runtime budget fail when the
// budget is exceeded even if their assertions hold.

#include "nb_oracle.hpp"
#include "svm_oracle.hpp"
#include "synthetic_corpus.hpp"
#include "test_helpers.hpp"

#include "textclf/corpus.hpp"
#include "textclf/evaluate.hpp"
#include "textclf/model_io.hpp"
#include "textclf/naive_bayes.hpp"
#include "textclf/svm.hpp"
#include "textclf/tokenize.hpp"

#include <fmt/format.h>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace textclf;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& why) {
        if (!ok && pass) {
            pass = false;
            detail = why;
        }
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(TEXTCLF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

FeatureMatrix nb_problem_matrix(const nboracle::Problem& p) {
    FeatureMatrix m;
    m.kind = FeatureKind::count;
    m.labels = p.labels;
    for (const auto& row : p.rows) {
        std::vector<double> values(row.begin(), row.end());
        m.rows.push_back(testutil::dense_vec(values));
    }
    return m;
}

// --- criterion 1: NB predictions match exact-rational Bayes -----------------

Criterion nb_oracle_equivalence() {
    Criterion result;
    std::mt19937_64 gen(101);
    std::size_t docs_checked = 0;

    for (int round = 0; round < 200 && result.pass; ++round) {
        nboracle::Problem p;
        const std::size_t n_docs = 2 + gen() % 19;
        const std::size_t n_features = 1 + gen() % 10;
        for (std::size_t d = 0; d < n_docs; ++d) {
            std::vector<long> row(n_features);
            for (auto& v : row) v = static_cast<long>(gen() % 6);
            p.rows.push_back(std::move(row));
            p.labels.push_back(d < 2 ? static_cast<int>(d) : static_cast<int>(gen() % 2));
        }
        p.fit_prior = (gen() % 2) == 0;

        for (const auto [num, den] : {std::pair<long, long>{1, 2}, {1, 1}}) {
            p.alpha_num = num;
            p.alpha_den = den;
            const double alpha = static_cast<double>(num) / static_cast<double>(den);
            const NbModel model = nb_fit(nb_problem_matrix(p), alpha, p.fit_prior);
            const auto exact = nboracle::fit(p);
            for (const auto& row : p.rows) {
                std::vector<double> values(row.begin(), row.end());
                const int ours = nb_predict(model, testutil::dense_vec(values));
                const int truth = nboracle::predict(exact, row);
                ++docs_checked;
                result.require(ours == truth,
                               fmt::format("disagreement at corpus {} (alpha={})", round,
                                           alpha));
            }
        }
    }
    if (result.pass)
        result.detail = fmt::format("200 corpora, {} labeled documents, alpha in {{0.5, 1}}",
                                    docs_checked);
    return result;
}

// --- criterion 2: two-point analytic solution -------------------------------

Criterion svm_analytic_oracle() {
    Criterion result;
    FeatureMatrix m;
    m.kind = FeatureKind::count;
    m.rows = {testutil::dense_vec({-1.0}), testutil::dense_vec({1.0})};
    m.labels = {0, 1};

    KernelSpec linear;
    linear.kind = KernelKind::linear;
    FitStats stats;
    const SvmModel model = svm_fit(m, 100.0, linear, {}, &stats);

    result.require(std::abs(stats.alpha[0] - 0.5) <= 1e-6,
                   fmt::format("alpha_0 = {}", stats.alpha[0]));
    result.require(std::abs(stats.alpha[1] - 0.5) <= 1e-6,
                   fmt::format("alpha_1 = {}", stats.alpha[1]));
    result.require(std::abs(model.bias) <= 1e-6, fmt::format("beta = {}", model.bias));

    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double x = -2.0 + 4.0 * static_cast<double>(k) / 19.0;
        worst = std::max(worst, std::abs(svm_decision(model, testutil::dense_vec({x})) - x));
    }
    result.require(worst <= 1e-6, fmt::format("max |f(x) - x| = {}", worst));
    if (result.pass)
        result.detail = fmt::format("alpha=[{:.9f}, {:.9f}] beta={:.2e} max probe error {:.2e}",
                                    stats.alpha[0], stats.alpha[1], model.bias, worst);
    return result;
}

// --- criterion 3: solver vs dense grid search on the dual -------------------

Criterion svm_bruteforce_oracle() {
    Criterion result;
    std::mt19937_64 gen(103);
    double worst_gap = 0.0, worst_kkt = 0.0;

    for (int round = 0; round < 50 && result.pass; ++round) {
        svmoracle::DualProblem p;
        const std::size_t n = 2 + gen() % 5;
        for (std::size_t i = 0; i < n; ++i) {
            p.rows.push_back(
                testutil::dense_vec({(static_cast<double>(gen() % 400) - 200.0) / 100.0,
                                     (static_cast<double>(gen() % 400) - 200.0) / 100.0}));
            p.labels.push_back(i < 2 ? static_cast<int>(i) : static_cast<int>(gen() % 2));
        }
        switch (round % 3) {
        case 0: p.spec.kind = KernelKind::linear; break;
        case 1:
            p.spec.kind = KernelKind::rbf;
            p.spec.gamma = 0.25 + static_cast<double>(gen() % 150) / 100.0;
            break;
        default:
            p.spec.kind = KernelKind::polynomial;
            p.spec.gamma = 0.5 + static_cast<double>(gen() % 100) / 100.0;
            p.spec.coef = 1.0;
            break;
        }
        p.c = 0.5 + static_cast<double>(gen() % 200) / 100.0;

        const FeatureMatrix m{p.rows, p.labels, FeatureKind::count};
        SolverConfig cfg;
        cfg.seed = gen();
        FitStats stats;
        const SvmModel model = svm_fit(m, p.c, p.spec, cfg, &stats);

        const auto q = svmoracle::gram(p);
        const double solver_obj = svmoracle::dual_objective(q, stats.alpha);
        const auto grid = svmoracle::grid_minimize(p);
        result.require(!grid.alpha.empty(), "grid search found no feasible point");
        const double gap = std::abs(solver_obj - grid.objective);
        worst_gap = std::max(worst_gap, gap);
        result.require(gap <= 1e-2,
                       fmt::format("objective gap {} on problem {}", gap, round));

        const double kkt = svmoracle::max_kkt_residual(p, model, stats.alpha);
        worst_kkt = std::max(worst_kkt, kkt);
        result.require(kkt <= 1e-3, fmt::format("KKT residual {} on problem {}", kkt, round));
    }
    if (result.pass)
        result.detail = fmt::format("50 problems; worst objective gap {:.2e}, worst KKT {:.2e}",
                                    worst_gap, worst_kkt);
    return result;
}

// --- criterion 4: kernel identities ------------------------------------------

Criterion kernel_identities() {
    Criterion result;
    std::mt19937_64 gen(104);

    KernelSpec linear;
    linear.kind = KernelKind::linear;
    KernelSpec rbf;
    rbf.kind = KernelKind::rbf;
    rbf.gamma = 0.75;
    KernelSpec poly;
    poly.kind = KernelKind::polynomial;
    poly.gamma = 1.1;
    poly.coef = 0.5;
    KernelSpec sigmoid;
    sigmoid.kind = KernelKind::sigmoid;
    sigmoid.gamma = 0.4;

    // RBF self-similarity is exactly 1
    for (int round = 0; round < 200; ++round) {
        std::vector<double> values(5);
        for (auto& v : values) v = (static_cast<double>(gen() % 2000) - 1000.0) / 130.0;
        const auto x = testutil::dense_vec(values);
        result.require(kernel_eval(rbf, x, x) == 1.0, "rbf K(x,x) != 1");
    }

    // symmetry across 1000 random pairs per kernel
    double worst_asym = 0.0;
    for (const auto& spec : {linear, rbf, poly, sigmoid}) {
        for (int round = 0; round < 1000; ++round) {
            std::vector<double> a(6), b(6);
            for (auto& v : a) v = (static_cast<double>(gen() % 2000) - 1000.0) / 250.0;
            for (auto& v : b) v = (static_cast<double>(gen() % 2000) - 1000.0) / 250.0;
            if (gen() % 3 == 0) a[gen() % 6] = 0.0;
            const auto x = testutil::dense_vec(a);
            const auto z = testutil::dense_vec(b);
            const double asym = std::abs(kernel_eval(spec, x, z) - kernel_eval(spec, z, x));
            worst_asym = std::max(worst_asym, asym);
            result.require(asym <= 1e-12, fmt::format("asymmetry {}", asym));
        }
    }

    // linear kernel equals an independent dot product, exactly, on integers
    for (int round = 0; round < 500; ++round) {
        std::vector<double> a(7), b(7);
        for (auto& v : a) v = static_cast<double>(gen() % 21) - 10.0;
        for (auto& v : b) v = static_cast<double>(gen() % 21) - 10.0;
        double expected = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) expected += a[i] * b[i];
        const double actual = kernel_eval(linear, testutil::dense_vec(a), testutil::dense_vec(b));
        result.require(actual == expected, "integer dot product mismatch");
    }

    if (result.pass)
        result.detail =
            fmt::format("self-similarity exact; worst asymmetry {:.2e}; integer dots exact",
                        worst_asym);
    return result;
}

// --- criterion 5: TF-IDF against the frozen hand computation ----------------

Criterion tfidf_fixture() {
    Criterion result;
    const std::vector<TokenSeq> docs = {
        {"a", "b", "a", "c"}, {"b", "b", "d"}, {"a", "e"}, {"e", "e", "e"},
        {"a", "b", "c", "d", "e"},
    };
    // hand-evaluated outside this code base: tf = count/len, idf = ln(5/df)
    const std::vector<std::vector<double>> expected = {
        {0.25541281188299536, 0.12770640594149768, 0.22907268296853878, 0, 0},
        {0, 0.34055041584399381, 0, 0.30543024395805168, 0},
        {0.25541281188299536, 0, 0, 0, 0.25541281188299536},
        {0, 0, 0, 0, 0.51082562376599072},
        {0.10216512475319815, 0.10216512475319815, 0.18325814637483104,
         0.18325814637483104, 0.10216512475319815},
    };

    const Vocabulary vocab = fit_vocabulary(docs);
    result.require(vocab.terms == std::vector<std::string>{"a", "b", "c", "d", "e"},
                   "unexpected vocabulary");
    const TfidfStats stats = fit_tfidf(vocab, docs.size());

    double worst = 0.0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        const SparseVector row = tfidf_vectorize(docs[d], vocab, stats);
        for (std::uint32_t t = 0; t < 5; ++t) {
            const double err = std::abs(row.get(t) - expected[d][t]);
            worst = std::max(worst, err);
            result.require(err <= 1e-9,
                           fmt::format("entry ({},{}) off by {}", d, t, err));
        }
    }
    if (result.pass)
        result.detail = fmt::format("25 matrix entries, max deviation {:.2e}", worst);
    return result;
}

// --- criterion 6: synthetic end-to-end grid ----------------------------------

Criterion synthetic_end_to_end() {
    Criterion result;
    const auto sentences = synth::generate();
    result.require(sentences.size() == 2000, "generator size");
    std::size_t positives = 0;
    for (const auto& s : sentences) positives += s.label;
    result.require(positives == 814, fmt::format("positives = {}", positives));

    const auto dir = testutil::temp_dir("acceptance");
    const auto tsv = dir / "synthetic.tsv";
    testutil::write_file(tsv, synth::to_tsv(sentences));

    const Corpus corpus = load_corpus(tsv);
    const Split split = split_corpus(corpus, 0.7, 42);
    result.require(split.train_ids.size() == 1400 && split.test_ids.size() == 600,
                   "split sizes");

    const GridSpec grid; // the default grid
    const GridResult grid_result = grid_search(corpus, split, grid);

    double best_accuracy = 0.0;
    bool combo[2][2] = {{false, false}, {false, false}};
    for (const auto& row : grid_result.rows) {
        const int f = row.config.features == FeatureKind::count ? 0 : 1;
        const int c = row.config.classifier == ClassifierKind::nb ? 0 : 1;
        combo[f][c] = true;
        if (row.report) best_accuracy = std::max(best_accuracy, row.report->accuracy);
    }
    result.require(best_accuracy >= 0.85,
                   fmt::format("best accuracy {:.4f} < 0.85", best_accuracy));
    result.require(combo[0][0] && combo[0][1] && combo[1][0] && combo[1][1],
                   "grid misses a feature x classifier combination");

    std::ostringstream csv;
    write_grid_csv(grid_result, csv);
    const std::string text = csv.str();
    for (const char* needle : {"count,nb,", "tfidf,nb,", "count,svm,", "tfidf,svm,"})
        result.require(text.find(needle) != std::string::npos,
                       fmt::format("CSV misses rows for {}", needle));

    if (result.pass)
        result.detail = fmt::format("{} grid cells, best accuracy {:.4f}",
                                    grid_result.rows.size(), best_accuracy);
    return result;
}

// --- criterion 7: byte-determinism of the CLI --------------------------------

Criterion cli_determinism() {
    Criterion result;
    const auto dir = testutil::temp_dir("acceptance");
    const auto tsv = dir / "synthetic.tsv";
    if (!std::filesystem::exists(tsv))
        testutil::write_file(tsv, synth::to_tsv(synth::generate()));

    // a 400-sentence slice keeps the two grid runs brisk
    const auto slice = dir / "slice.tsv";
    {
        std::ifstream in(tsv);
        std::ofstream out(slice, std::ios::binary);
        std::string line;
        for (int i = 0; i < 400 && std::getline(in, line); ++i) out << line << '\n';
    }

    for (int run = 1; run <= 2; ++run) {
        const int code = run_cli(fmt::format(
            "train --input {} --seed 42 --out {}", tsv.string(),
            (dir / fmt::format("m{}.json", run)).string()));
        result.require(code == 0, fmt::format("train run {} exited {}", run, code));
    }
    const std::string m1 = testutil::read_file(dir / "m1.json");
    result.require(!m1.empty() && m1 == testutil::read_file(dir / "m2.json"),
                   "model files differ between runs");

    for (int run = 1; run <= 2; ++run) {
        const int code = run_cli(fmt::format(
            "grid-search --input {} --seed 42 --grid-c 1,10 --grid-gamma 0.1,1 --out {}",
            slice.string(), (dir / fmt::format("g{}.csv", run)).string()));
        result.require(code == 0, fmt::format("grid run {} exited {}", run, code));
    }
    const std::string g1 = testutil::read_file(dir / "g1.csv");
    result.require(!g1.empty() && g1 == testutil::read_file(dir / "g2.csv"),
                   "grid CSVs differ between runs");

    if (result.pass)
        result.detail = fmt::format("model {} bytes, CSV {} bytes, both byte-identical",
                                    m1.size(), g1.size());
    return result;
}

// --- criterion 8: no test-set leakage ----------------------------------------

Criterion no_leakage_sentinel() {
    Criterion result;
    std::mt19937_64 gen(108);
    const Corpus corpus = testutil::random_corpus(gen, 120);
    const Split split = split_corpus(corpus, 0.7, 42);

    Corpus mutated = corpus;
    for (std::size_t id : split.test_ids)
        mutated.documents[id].text = "প্রতিস্থাপিত বাক্য নম্বর " + std::to_string(id);

    const auto tokenized = [&](const Corpus& c) {
        std::vector<TokenSeq> docs;
        std::vector<int> labels;
        for (std::size_t id : split.train_ids) {
            docs.push_back(tokenize(c.documents[id].text));
            labels.push_back(c.documents[id].label);
        }
        return std::make_pair(docs, labels);
    };

    const auto [docs_a, labels_a] = tokenized(corpus);
    const auto [docs_b, labels_b] = tokenized(mutated);

    const Vocabulary vocab_a = fit_vocabulary(docs_a);
    const Vocabulary vocab_b = fit_vocabulary(docs_b);
    result.require(vocab_a == vocab_b, "vocabulary changed");

    const TfidfStats stats_a = fit_tfidf(vocab_a, docs_a.size());
    const TfidfStats stats_b = fit_tfidf(vocab_b, docs_b.size());
    result.require(stats_a.idf == stats_b.idf, "idf changed");

    const FeatureMatrix counts_a = build_matrix(docs_a, labels_a, vocab_a, FeatureKind::count);
    const FeatureMatrix counts_b = build_matrix(docs_b, labels_b, vocab_b, FeatureKind::count);
    const NbModel nb_a = nb_fit(counts_a, 1.0);
    const NbModel nb_b = nb_fit(counts_b, 1.0);
    result.require(nb_a.feature_log_prob == nb_b.feature_log_prob, "nb theta changed");
    result.require(nb_a.class_log_prior == nb_b.class_log_prior, "nb prior changed");

    KernelSpec rbf;
    rbf.kind = KernelKind::rbf;
    rbf.gamma = 0.5;
    FitStats svm_a, svm_b;
    (void)svm_fit(counts_a, 2.0, rbf, {}, &svm_a);
    (void)svm_fit(counts_b, 2.0, rbf, {}, &svm_b);
    result.require(svm_a.alpha == svm_b.alpha, "svm alpha vector changed");
    result.require(svm_a.bias == svm_b.bias, "svm bias changed");

    if (result.pass)
        result.detail = "vocabulary, idf, nb theta/prior and svm alpha/bias all bit-identical";
    return result;
}

// --- criterion 9: persistence round trip --------------------------------------

Criterion persistence_round_trip() {
    Criterion result;
    std::mt19937_64 gen(109);
    const Corpus corpus = testutil::random_corpus(gen, 80);
    const Split split = split_corpus(corpus, 0.7, 42);
    const auto dir = testutil::temp_dir("acceptance");

    std::mt19937_64 probe_gen(1090);
    const Corpus probes = testutil::random_corpus(probe_gen, 50);

    for (const auto classifier : {ClassifierKind::nb, ClassifierKind::svm}) {
        PipelineConfig config;
        config.features = FeatureKind::tfidf;
        config.classifier = classifier;
        config.svm.kernel.kind = KernelKind::rbf;
        config.svm.kernel.gamma = 0.5;
        config.svm.c = 2.0;
        const FittedPipeline fitted = fit_pipeline(corpus, split, config);

        ModelBundle bundle;
        bundle.feature_kind = config.features;
        bundle.vocabulary = fitted.vocabulary;
        bundle.tfidf_stats = fitted.tfidf_stats;
        if (fitted.nb)
            bundle.classifier = *fitted.nb;
        else
            bundle.classifier = *fitted.svm;
        bundle.metadata.corpus_fingerprint = fingerprint_corpus(corpus);
        bundle.metadata.seed = 42;
        bundle.metadata.train_fraction = 0.7;

        const auto path = dir / "roundtrip.json";
        save_model(bundle, path);
        const ModelBundle loaded = load_model(path);
        result.require(loaded == bundle, "bundle changed across the round trip");

        for (const auto& doc : probes.documents) {
            const TokenSeq tokens = tokenize(doc.text);
            const SparseVector a =
                tfidf_vectorize(tokens, bundle.vocabulary, *bundle.tfidf_stats);
            const SparseVector b =
                tfidf_vectorize(tokens, loaded.vocabulary, *loaded.tfidf_stats);
            result.require(a == b, "encodings differ");
            if (classifier == ClassifierKind::nb) {
                const auto sa = nb_log_posterior(std::get<NbModel>(bundle.classifier), a);
                const auto sb = nb_log_posterior(std::get<NbModel>(loaded.classifier), b);
                result.require(sa[0] == sb[0] && sa[1] == sb[1],
                               "nb log-posteriors not bit-identical");
            } else {
                const double da = svm_decision(std::get<SvmModel>(bundle.classifier), a);
                const double db = svm_decision(std::get<SvmModel>(loaded.classifier), b);
                result.require(da == db, "svm decisions not bit-identical");
            }
        }
    }
    if (result.pass)
        result.detail = "nb log-posteriors and svm decisions bit-identical on 50 probes";
    return result;
}

} // namespace

int main() {
    struct Entry {
        const char* name;
        std::function<Criterion()> run;
        double budget_seconds; // 0 = no budget
    };
    const std::vector<Entry> entries = {
        {"nb-oracle-equivalence", nb_oracle_equivalence, 10.0},
        {"svm-analytic-oracle", svm_analytic_oracle, 0.0},
        {"svm-bruteforce-oracle", svm_bruteforce_oracle, 60.0},
        {"kernel-identities", kernel_identities, 0.0},
        {"tfidf-fixture", tfidf_fixture, 0.0},
        {"synthetic-end-to-end", synthetic_end_to_end, 120.0},
        {"cli-determinism", cli_determinism, 0.0},
        {"no-leakage-sentinel", no_leakage_sentinel, 0.0},
        {"persistence-round-trip", persistence_round_trip, 0.0},
    };

    int failures = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto start = Clock::now();
        Criterion result;
        try {
            result = entries[i].run();
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail = fmt::format("exception: {}", e.what());
        }
        const double seconds =
            std::chrono::duration<double>(Clock::now() - start).count();
        if (entries[i].budget_seconds > 0.0 && seconds > entries[i].budget_seconds) {
            result.pass = false;
            result.detail = fmt::format("runtime {:.1f}s exceeds {:.0f}s budget ({})",
                                        seconds, entries[i].budget_seconds, result.detail);
        }
        if (!result.pass) ++failures;
        fmt::print("[{}] {}  {} ({}) [{:.2f}s]\n", i + 1, result.pass ? "PASS" : "FAIL",
                   entries[i].name, result.detail, seconds);
    }
    fmt::print("{} of {} acceptance criteria passed\n", entries.size() - failures,
               entries.size());
    return failures;
}
