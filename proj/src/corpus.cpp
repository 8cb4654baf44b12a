#include "textclf/corpus.hpp"

#include "textclf/detail/prng.hpp"
#include "textclf/error.hpp"
#include "textclf/unicode.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace textclf {

std::string clean_text(std::string_view raw) {
    std::vector<char32_t> cps = uni::to_codepoints(raw);

    // drop <...> markup; an unmatched '<' is kept literally
    std::vector<char32_t> no_tags;
    no_tags.reserve(cps.size());
    for (std::size_t i = 0; i < cps.size();) {
        if (cps[i] == U'<') {
            std::size_t close = i + 1;
            while (close < cps.size() && cps[close] != U'>') ++close;
            if (close < cps.size()) {
                i = close + 1;
                continue;
            }
        }
        no_tags.push_back(cps[i]);
        ++i;
    }

    std::vector<char32_t> kept;
    kept.reserve(no_tags.size());
    for (char32_t cp : no_tags)
        if (!uni::is_emoji(cp)) kept.push_back(cp);

    // collapse whitespace runs and trim
    std::vector<char32_t> collapsed;
    collapsed.reserve(kept.size());
    bool pending_space = false;
    for (char32_t cp : kept) {
        if (uni::is_whitespace(cp)) {
            pending_space = !collapsed.empty();
        } else {
            if (pending_space) collapsed.push_back(U' ');
            pending_space = false;
            collapsed.push_back(cp);
        }
    }

    return uni::nfc(uni::from_codepoints(collapsed));
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open dataset file: {}", path.string()));

    Corpus corpus;
    corpus.source = path.string();

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!uni::is_valid_utf8(line))
            throw Error(fmt::format("invalid UTF-8 at line {}", line_no));

        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw Error(fmt::format("missing tab separator at line {}", line_no));

        const std::string label_field = line.substr(0, tab);
        int label;
        if (label_field == "0")
            label = 0;
        else if (label_field == "1")
            label = 1;
        else
            throw Error(fmt::format("invalid label at line {}", line_no));

        std::string text = clean_text(std::string_view(line).substr(tab + 1));
        if (text.empty())
            throw Error(fmt::format("document empty after cleaning at line {}", line_no));

        corpus.documents.push_back({corpus.documents.size(), std::move(text), label});
    }

    if (corpus.documents.empty()) throw Error("empty corpus");
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write dataset file: {}", path.string()));
    for (const auto& doc : corpus.documents)
        out << doc.label << '\t' << doc.text << '\n';
    if (!out) throw Error(fmt::format("write failed: {}", path.string()));
}

namespace {

// Fisher-Yates with rejection-sampled draws: bit-stable across platforms,
// which keeps golden split fixtures valid everywhere
std::vector<std::size_t> shuffled_ids(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    std::mt19937_64 gen(seed);
    for (std::size_t i = n; i > 1; --i)
        std::swap(ids[i - 1], ids[detail::bounded_draw(gen, i)]);
    return ids;
}

} // namespace

Split split_corpus(const Corpus& corpus, double train_fraction,
                   std::uint64_t seed, bool stratified) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error("train fraction must lie strictly between 0 and 1");
    const std::size_t n = corpus.size();
    if (n == 0) throw Error("cannot split an empty corpus");

    const auto k = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));

    Split split;
    split.seed = seed;
    split.train_fraction = train_fraction;

    const std::vector<std::size_t> order = shuffled_ids(n, seed);

    if (!stratified) {
        split.train_ids.assign(order.begin(), order.begin() + k);
        split.test_ids.assign(order.begin() + k, order.end());
    } else {
        // per-class quota by largest remainder so the total still equals k
        std::array<std::vector<std::size_t>, 2> by_class;
        for (std::size_t id : order) by_class[corpus.documents[id].label].push_back(id);

        std::array<std::size_t, 2> quota{};
        std::array<double, 2> frac{};
        std::size_t assigned = 0;
        for (int c = 0; c < 2; ++c) {
            const double share = train_fraction * static_cast<double>(by_class[c].size());
            quota[c] = static_cast<std::size_t>(share);
            frac[c] = share - static_cast<double>(quota[c]);
            assigned += quota[c];
        }
        while (assigned < k) {
            const int c = (frac[0] >= frac[1]) ? 0 : 1;
            ++quota[c];
            frac[c] = -1.0;
            ++assigned;
        }
        while (assigned > k) {
            const int c = (quota[0] > 0 && frac[0] <= frac[1]) ? 0 : 1;
            --quota[c];
            --assigned;
        }
        for (int c = 0; c < 2; ++c) {
            quota[c] = std::min(quota[c], by_class[c].size());
            for (std::size_t i = 0; i < by_class[c].size(); ++i)
                (i < quota[c] ? split.train_ids : split.test_ids).push_back(by_class[c][i]);
        }
    }

    std::sort(split.train_ids.begin(), split.train_ids.end());
    std::sort(split.test_ids.begin(), split.test_ids.end());
    return split;
}

void require_both_classes(const Corpus& corpus) {
    bool seen[2] = {false, false};
    for (const auto& doc : corpus.documents) seen[doc.label] = true;
    if (!seen[0] || !seen[1]) throw Error("corpus must contain both classes");
}

} // namespace textclf
