#pragma once

#include "textclf/tokenize.hpp"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace textclf {

/// Ordered term -> column map fixed at fit time. Terms are sorted ascending
/// by code point, so the column layout is a pure function of the term set.
struct Vocabulary {
    std::vector<std::string> terms;
    std::unordered_map<std::string, std::uint32_t> index;
    std::vector<std::uint32_t> doc_freq;

    std::size_t size() const { return terms.size(); }
    bool contains(const std::string& term) const { return index.count(term) != 0; }

    bool operator==(const Vocabulary&) const = default;
};

/// Sparse feature vector: sorted (column, value) pairs, all values nonzero.
struct SparseVector {
    std::vector<std::pair<std::uint32_t, double>> entries;
    std::uint32_t dimension = 0;

    double get(std::uint32_t i) const;
    std::size_t nnz() const { return entries.size(); }

    bool operator==(const SparseVector&) const = default;
};

double dot(const SparseVector& a, const SparseVector& b);

enum class FeatureKind { count, tfidf };

const char* to_string(FeatureKind kind);

struct FeatureMatrix {
    std::vector<SparseVector> rows;
    std::vector<int> labels;
    FeatureKind kind = FeatureKind::count;
};

/// Reading of the TF denominator. `relative` divides occurrences by the
/// document length (the default); `literal_unit` sets TF to 1 for every
/// present term, reducing TF-IDF to pure IDF (compatibility mode).
enum class TfWeighting { relative, literal_unit };

struct TfidfStats {
    std::vector<double> idf;
    TfWeighting weighting = TfWeighting::relative;

    bool operator==(const TfidfStats&) const = default;
};

// Builds the vocabulary over the distinct tokens of the training documents.
// doc_freq counts documents containing a term, not occurrences. A nonzero
// max_features keeps only the top-K terms by document frequency (ties by
// term order). Throws if every document is empty.
Vocabulary fit_vocabulary(const std::vector<TokenSeq>& train_docs,
                          std::size_t max_features = 0);

// Occurrence counts against the vocabulary; out-of-vocabulary tokens are
// ignored.
SparseVector count_vectorize(const TokenSeq& doc, const Vocabulary& vocab);

// count(term in doc) / |doc|. Throws on an empty document.
double term_frequency(const std::string& term, const TokenSeq& doc);

// ln(n_docs / doc_freq[term]). Throws if the term is not in the vocabulary.
double inverse_document_frequency(const std::string& term, const Vocabulary& vocab,
                                  std::size_t n_docs);

// Precomputes per-term IDF weights for a training corpus of n_docs documents.
TfidfStats fit_tfidf(const Vocabulary& vocab, std::size_t n_docs,
                     TfWeighting weighting = TfWeighting::relative);

// TF * IDF per in-vocabulary term. An empty document encodes as the zero
// vector rather than an error.
SparseVector tfidf_vectorize(const TokenSeq& doc, const Vocabulary& vocab,
                             const TfidfStats& stats);

// Encodes a batch of token sequences with parallel labels.
FeatureMatrix build_matrix(const std::vector<TokenSeq>& docs,
                           const std::vector<int>& labels, const Vocabulary& vocab,
                           FeatureKind kind, const TfidfStats* stats = nullptr);

} // namespace textclf
