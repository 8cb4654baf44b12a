#include "textclf/vectorize.hpp"

#include "textclf/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace textclf {

double SparseVector::get(std::uint32_t i) const {
    const auto it = std::lower_bound(entries.begin(), entries.end(), i,
                                     [](const auto& e, std::uint32_t k) { return e.first < k; });
    return (it != entries.end() && it->first == i) ? it->second : 0.0;
}

double dot(const SparseVector& a, const SparseVector& b) {
    double sum = 0.0;
    auto ia = a.entries.begin();
    auto ib = b.entries.begin();
    while (ia != a.entries.end() && ib != b.entries.end()) {
        if (ia->first < ib->first)
            ++ia;
        else if (ib->first < ia->first)
            ++ib;
        else {
            sum += ia->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    return sum;
}

const char* to_string(FeatureKind kind) {
    return kind == FeatureKind::count ? "count" : "tfidf";
}

Vocabulary fit_vocabulary(const std::vector<TokenSeq>& train_docs,
                          std::size_t max_features) {
    // std::map keys are byte-ordered, which for UTF-8 is code point order
    std::map<std::string, std::uint32_t> df;
    for (const auto& doc : train_docs) {
        std::set<std::string_view> seen;
        for (const auto& tok : doc) seen.insert(tok);
        for (const auto& tok : seen) ++df[std::string(tok)];
    }
    if (df.empty()) throw Error("cannot fit a vocabulary: all documents are empty");

    std::vector<std::pair<std::string, std::uint32_t>> entries(df.begin(), df.end());
    if (max_features > 0 && entries.size() > max_features) {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        entries.resize(max_features);
        std::sort(entries.begin(), entries.end());
    }

    Vocabulary vocab;
    vocab.terms.reserve(entries.size());
    vocab.doc_freq.reserve(entries.size());
    for (auto& [term, freq] : entries) {
        vocab.index.emplace(term, static_cast<std::uint32_t>(vocab.terms.size()));
        vocab.terms.push_back(std::move(term));
        vocab.doc_freq.push_back(freq);
    }
    return vocab;
}

SparseVector count_vectorize(const TokenSeq& doc, const Vocabulary& vocab) {
    std::map<std::uint32_t, double> counts;
    for (const auto& tok : doc) {
        const auto it = vocab.index.find(tok);
        if (it != vocab.index.end()) counts[it->second] += 1.0;
    }
    SparseVector vec;
    vec.dimension = static_cast<std::uint32_t>(vocab.size());
    vec.entries.assign(counts.begin(), counts.end());
    return vec;
}

double term_frequency(const std::string& term, const TokenSeq& doc) {
    if (doc.empty()) throw Error("term frequency is undefined for an empty document");
    const auto occurrences = std::count(doc.begin(), doc.end(), term);
    return static_cast<double>(occurrences) / static_cast<double>(doc.size());
}

double inverse_document_frequency(const std::string& term, const Vocabulary& vocab,
                                  std::size_t n_docs) {
    const auto it = vocab.index.find(term);
    if (it == vocab.index.end())
        throw Error(fmt::format("term not in vocabulary: {}", term));
    return std::log(static_cast<double>(n_docs) /
                    static_cast<double>(vocab.doc_freq[it->second]));
}

TfidfStats fit_tfidf(const Vocabulary& vocab, std::size_t n_docs, TfWeighting weighting) {
    TfidfStats stats;
    stats.weighting = weighting;
    stats.idf.reserve(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i)
        stats.idf.push_back(std::log(static_cast<double>(n_docs) /
                                     static_cast<double>(vocab.doc_freq[i])));
    return stats;
}

SparseVector tfidf_vectorize(const TokenSeq& doc, const Vocabulary& vocab,
                             const TfidfStats& stats) {
    SparseVector vec;
    vec.dimension = static_cast<std::uint32_t>(vocab.size());
    if (doc.empty()) return vec;

    std::map<std::uint32_t, double> counts;
    for (const auto& tok : doc) {
        const auto it = vocab.index.find(tok);
        if (it != vocab.index.end()) counts[it->second] += 1.0;
    }
    for (const auto& [col, count] : counts) {
        const double tf = stats.weighting == TfWeighting::relative
                              ? count / static_cast<double>(doc.size())
                              : 1.0;
        const double value = tf * stats.idf[col];
        if (value != 0.0) vec.entries.emplace_back(col, value);
    }
    return vec;
}

FeatureMatrix build_matrix(const std::vector<TokenSeq>& docs,
                           const std::vector<int>& labels, const Vocabulary& vocab,
                           FeatureKind kind, const TfidfStats* stats) {
    if (docs.size() != labels.size())
        throw Error("documents and labels must have equal length");
    if (kind == FeatureKind::tfidf && stats == nullptr)
        throw Error("tfidf features require fitted stats");

    FeatureMatrix matrix;
    matrix.kind = kind;
    matrix.labels = labels;
    matrix.rows.reserve(docs.size());
    for (const auto& doc : docs)
        matrix.rows.push_back(kind == FeatureKind::count
                                  ? count_vectorize(doc, vocab)
                                  : tfidf_vectorize(doc, vocab, *stats));
    return matrix;
}

} // namespace textclf
