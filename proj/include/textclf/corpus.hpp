#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace textclf {

/// One labeled sentence. Label 0 = normal, 1 = abnormal.
struct Document {
    std::size_t id = 0;
    std::string text;
    int label = 0;
};

struct Corpus {
    std::vector<Document> documents;
    std::string source;

    std::size_t size() const { return documents.size(); }
};

/// Disjoint, exhaustive train/test partition of document ids. Both id lists
/// are kept sorted ascending; training rows are built in that order.
struct Split {
    std::vector<std::size_t> train_ids;
    std::vector<std::size_t> test_ids;
    std::uint64_t seed = 0;
    double train_fraction = 0.7;
};

// Removes <...> markup, strips emoji/pictograph/dingbat code points,
// collapses whitespace runs to single spaces, trims, and normalizes to NFC.
// Total: never throws on text content, may return an empty string.
std::string clean_text(std::string_view raw);

// Reads a UTF-8 TSV dataset (`label<TAB>text`, one sentence per line),
// cleaning every sentence. Throws textclf::Error naming the offending line
// on malformed records, invalid labels, non-UTF-8 bytes, sentences that are
// empty after cleaning, or an empty file.
Corpus load_corpus(const std::filesystem::path& path);

// Writes a corpus back out in the same TSV format (LF line endings).
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Seeded shuffle-then-cut split: |train| = round(train_fraction * n). The
// shuffle is a Fisher-Yates driven by mt19937_64 with modulo-rejection
// bounded draws, so the partition is bit-stable across platforms. With
// stratified=true the same-sized cut is balanced per class (largest
// remainder apportionment).
Split split_corpus(const Corpus& corpus, double train_fraction,
                   std::uint64_t seed, bool stratified = false);

// Throws unless both labels occur in the corpus. Fit operations require this.
void require_both_classes(const Corpus& corpus);

} // namespace textclf
