#pragma once

#include "textclf/corpus.hpp"
#include "textclf/naive_bayes.hpp"
#include "textclf/svm.hpp"
#include "textclf/vectorize.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace textclf {

struct ModelMetadata {
    std::string created_at;          // caller-provided stamp; empty by default
    std::string corpus_fingerprint;  // sha256 of the cleaned training file
    std::uint64_t seed = 0;
    double train_fraction = 0.7;
    // stored sorted by key on disk; keep it sorted here for clean round-trips
    std::vector<std::pair<std::string, std::string>> hyperparameters;

    bool operator==(const ModelMetadata&) const = default;
};

/// A trained pipeline: vocabulary, optional TF-IDF stats and the classifier,
/// saved and loaded as one versioned JSON document.
struct ModelBundle {
    static constexpr int kFormatVersion = 1;

    int format_version = kFormatVersion;
    FeatureKind feature_kind = FeatureKind::tfidf;
    Vocabulary vocabulary;
    std::optional<TfidfStats> tfidf_stats; // present iff feature_kind == tfidf
    std::variant<NbModel, SvmModel> classifier;
    ModelMetadata metadata;
};

bool operator==(const ModelBundle& a, const ModelBundle& b);

// Serializes the bundle with a fixed key order and reals printed with 17
// significant digits, so identical bundles produce byte-identical files and
// doubles survive the round trip exactly. Writes to a temporary file and
// renames it into place; a failed save leaves nothing behind.
void save_model(const ModelBundle& bundle, const std::filesystem::path& path);

// Parses and validates a model file. Rejects unknown format versions and any
// bundle whose invariants do not hold (dimension mismatches, unnormalized NB
// rows, out-of-box dual coefficients, non-finite values).
ModelBundle load_model(const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);

// Fingerprint of a cleaned corpus: sha256 over its TSV serialization.
std::string fingerprint_corpus(const Corpus& corpus);

} // namespace textclf
