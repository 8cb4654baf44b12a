#include "textclf/model_io.hpp"

#include "textclf/error.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace textclf {

bool operator==(const ModelBundle& a, const ModelBundle& b) {
    return a.format_version == b.format_version && a.feature_kind == b.feature_kind &&
           a.vocabulary == b.vocabulary && a.tfidf_stats == b.tfidf_stats &&
           a.classifier == b.classifier && a.metadata == b.metadata;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 digest failed");
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

std::string fingerprint_corpus(const Corpus& corpus) {
    std::string flat;
    for (const auto& doc : corpus.documents) {
        flat += doc.label == 1 ? '1' : '0';
        flat += '\t';
        flat += doc.text;
        flat += '\n';
    }
    return "sha256:" + sha256_hex(flat);
}

namespace {

// Fixed-layout JSON writer. Key order is hard-coded per schema and every
// real is printed with 17 significant digits, which round-trips doubles
// exactly and keeps the output byte-deterministic.
class JsonWriter {
public:
    explicit JsonWriter(std::string& out) : out_(out) {}

    void real(double v) {
        if (!std::isfinite(v)) throw Error("cannot serialize a non-finite value");
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out_ += buf;
    }

    void integer(std::uint64_t v) { out_ += fmt::format("{}", v); }

    void string(std::string_view s) {
        out_ += '"';
        for (char ch : s) {
            const auto uc = static_cast<unsigned char>(ch);
            switch (ch) {
            case '"': out_ += "\\\""; break;
            case '\\': out_ += "\\\\"; break;
            case '\b': out_ += "\\b"; break;
            case '\f': out_ += "\\f"; break;
            case '\n': out_ += "\\n"; break;
            case '\r': out_ += "\\r"; break;
            case '\t': out_ += "\\t"; break;
            default:
                if (uc < 0x20)
                    out_ += fmt::format("\\u{:04x}", uc);
                else
                    out_ += ch;
            }
        }
        out_ += '"';
    }

    void boolean(bool v) { out_ += v ? "true" : "false"; }
    void raw(const char* s) { out_ += s; }

    void key(std::string_view name) {
        string(name);
        out_ += ':';
    }

    template <typename T, typename Fn>
    void array(const std::vector<T>& values, Fn&& emit) {
        out_ += '[';
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ += ',';
            emit(values[i]);
        }
        out_ += ']';
    }

private:
    std::string& out_;
};

void write_sparse(JsonWriter& w, const SparseVector& vec) {
    w.raw("{");
    w.key("indices");
    w.raw("[");
    for (std::size_t i = 0; i < vec.entries.size(); ++i) {
        if (i) w.raw(",");
        w.integer(vec.entries[i].first);
    }
    w.raw("],");
    w.key("values");
    w.raw("[");
    for (std::size_t i = 0; i < vec.entries.size(); ++i) {
        if (i) w.raw(",");
        w.real(vec.entries[i].second);
    }
    w.raw("]}");
}

std::string serialize_bundle(const ModelBundle& bundle) {
    std::string out;
    out.reserve(1 << 16);
    JsonWriter w(out);

    w.raw("{");
    w.key("format_version");
    w.integer(static_cast<std::uint64_t>(bundle.format_version));
    w.raw(",");
    w.key("feature_kind");
    w.string(to_string(bundle.feature_kind));
    w.raw(",");

    w.key("vocabulary");
    w.raw("{");
    w.key("terms");
    w.array(bundle.vocabulary.terms, [&](const std::string& t) { w.string(t); });
    w.raw(",");
    w.key("doc_freq");
    w.array(bundle.vocabulary.doc_freq, [&](std::uint32_t f) { w.integer(f); });
    w.raw("},");

    if (bundle.tfidf_stats) {
        w.key("tfidf_stats");
        w.raw("{");
        w.key("weighting");
        w.string(bundle.tfidf_stats->weighting == TfWeighting::relative ? "relative"
                                                                        : "literal_unit");
        w.raw(",");
        w.key("idf");
        w.array(bundle.tfidf_stats->idf, [&](double v) { w.real(v); });
        w.raw("},");
    }

    w.key("classifier");
    w.raw("{");
    if (const auto* nb = std::get_if<NbModel>(&bundle.classifier)) {
        w.key("type");
        w.string("nb");
        w.raw(",");
        w.key("alpha");
        w.real(nb->alpha);
        w.raw(",");
        w.key("fit_prior");
        w.boolean(nb->fit_prior);
        w.raw(",");
        w.key("n_features");
        w.integer(nb->n_features);
        w.raw(",");
        w.key("class_log_prior");
        w.array(nb->class_log_prior, [&](double v) { w.real(v); });
        w.raw(",");
        w.key("feature_log_prob");
        w.array(nb->feature_log_prob, [&](const std::vector<double>& row) {
            w.array(row, [&](double v) { w.real(v); });
        });
    } else {
        const auto& svm = std::get<SvmModel>(bundle.classifier);
        w.key("type");
        w.string("svm");
        w.raw(",");
        w.key("c");
        w.real(svm.c);
        w.raw(",");
        w.key("kernel");
        w.raw("{");
        w.key("kind");
        w.string(to_string(svm.kernel.kind));
        w.raw(",");
        w.key("gamma");
        w.real(svm.kernel.gamma);
        w.raw(",");
        w.key("coef");
        w.real(svm.kernel.coef);
        w.raw(",");
        w.key("conventional_sigmoid");
        w.boolean(svm.kernel.conventional_sigmoid);
        w.raw("},");
        w.key("bias");
        w.real(svm.bias);
        w.raw(",");
        w.key("n_features");
        w.integer(svm.n_features);
        w.raw(",");
        w.key("dual_coef");
        w.array(svm.dual_coef, [&](double v) { w.real(v); });
        w.raw(",");
        w.key("support_vectors");
        w.array(svm.support_vectors, [&](const SparseVector& sv) { write_sparse(w, sv); });
    }
    w.raw("},");

    w.key("metadata");
    w.raw("{");
    w.key("created_at");
    w.string(bundle.metadata.created_at);
    w.raw(",");
    w.key("corpus_fingerprint");
    w.string(bundle.metadata.corpus_fingerprint);
    w.raw(",");
    w.key("seed");
    w.integer(bundle.metadata.seed);
    w.raw(",");
    w.key("train_fraction");
    w.real(bundle.metadata.train_fraction);
    w.raw(",");
    w.key("hyperparameters");
    w.raw("{");
    auto hyper = bundle.metadata.hyperparameters; // canonical key order on disk
    std::sort(hyper.begin(), hyper.end());
    for (std::size_t i = 0; i < hyper.size(); ++i) {
        if (i) w.raw(",");
        w.key(hyper[i].first);
        w.string(hyper[i].second);
    }
    w.raw("}}}");
    out += '\n';
    return out;
}

using json = nlohmann::json;

[[noreturn]] void invariant_error(const std::string& what) {
    throw Error(fmt::format("model invariant violated: {}", what));
}

double finite(const json& j, const char* where) {
    if (!j.is_number()) invariant_error(fmt::format("{} is not a number", where));
    const double v = j.get<double>();
    if (!std::isfinite(v)) invariant_error(fmt::format("{} is not finite", where));
    return v;
}

SparseVector parse_sparse(const json& j, std::uint32_t dimension) {
    SparseVector vec;
    vec.dimension = dimension;
    const auto& indices = j.at("indices");
    const auto& values = j.at("values");
    if (indices.size() != values.size())
        invariant_error("support vector indices/values length mismatch");
    std::uint32_t prev = 0;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto idx = indices[i].get<std::uint32_t>();
        if (idx >= dimension) invariant_error("sparse index out of range");
        if (i > 0 && idx <= prev) invariant_error("sparse indices not strictly increasing");
        const double value = finite(values[i], "sparse value");
        if (value == 0.0) invariant_error("sparse vector stores a zero value");
        vec.entries.emplace_back(idx, value);
        prev = idx;
    }
    return vec;
}

NbModel parse_nb(const json& j, std::size_t vocab_size) {
    NbModel model;
    model.alpha = finite(j.at("alpha"), "nb alpha");
    if (!(model.alpha > 0.0)) invariant_error("nb alpha must be positive");
    model.fit_prior = j.at("fit_prior").get<bool>();
    model.n_features = j.at("n_features").get<std::size_t>();
    if (model.n_features != vocab_size)
        invariant_error("classifier dimension does not match vocabulary");

    for (const auto& v : j.at("class_log_prior"))
        model.class_log_prior.push_back(finite(v, "class_log_prior"));
    if (model.class_log_prior.size() != 2) invariant_error("expected exactly two classes");

    double prior_sum = 0.0;
    for (double lp : model.class_log_prior) prior_sum += std::exp(lp);
    if (std::abs(prior_sum - 1.0) > 1e-9)
        invariant_error("NB class priors do not sum to 1");

    for (const auto& row_json : j.at("feature_log_prob")) {
        std::vector<double> row;
        for (const auto& v : row_json) row.push_back(finite(v, "feature_log_prob"));
        if (row.size() != model.n_features)
            invariant_error("feature_log_prob row has wrong width");
        double sum = 0.0;
        for (double lp : row) sum += std::exp(lp);
        if (std::abs(sum - 1.0) > 1e-9) invariant_error("NB normalization invariant violated");
        model.feature_log_prob.push_back(std::move(row));
    }
    if (model.feature_log_prob.size() != 2) invariant_error("expected exactly two classes");
    return model;
}

SvmModel parse_svm(const json& j, std::size_t vocab_size) {
    SvmModel model;
    model.c = finite(j.at("c"), "svm c");
    if (!(model.c > 0.0)) invariant_error("svm C must be positive");

    const auto& kj = j.at("kernel");
    model.kernel.kind = kernel_kind_from_string(kj.at("kind").get<std::string>());
    model.kernel.gamma = finite(kj.at("gamma"), "kernel gamma");
    model.kernel.coef = finite(kj.at("coef"), "kernel coef");
    model.kernel.conventional_sigmoid = kj.at("conventional_sigmoid").get<bool>();
    if (model.kernel.kind != KernelKind::linear && !(model.kernel.gamma > 0.0))
        invariant_error("kernel gamma must be positive");

    model.bias = finite(j.at("bias"), "svm bias");
    model.n_features = j.at("n_features").get<std::uint32_t>();
    if (model.n_features != vocab_size)
        invariant_error("classifier dimension does not match vocabulary");

    double balance = 0.0;
    for (const auto& v : j.at("dual_coef")) {
        const double coef = finite(v, "dual_coef");
        if (coef == 0.0 || std::abs(coef) > model.c * (1.0 + 1e-12))
            invariant_error("dual coefficient outside (0, C]");
        model.dual_coef.push_back(coef);
        balance += coef;
    }
    if (std::abs(balance) > 1e-8)
        invariant_error("dual coefficients do not balance to zero");
    for (const auto& sv : j.at("support_vectors"))
        model.support_vectors.push_back(parse_sparse(sv, model.n_features));
    if (model.support_vectors.size() != model.dual_coef.size())
        invariant_error("support vector and dual coefficient counts differ");
    if (model.support_vectors.empty()) invariant_error("svm model has no support vectors");
    return model;
}

} // namespace

void save_model(const ModelBundle& bundle, const std::filesystem::path& path) {
    if (bundle.tfidf_stats.has_value() != (bundle.feature_kind == FeatureKind::tfidf))
        throw Error("tfidf stats must be present exactly when feature kind is tfidf");

    const std::string payload = serialize_bundle(bundle);

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(fmt::format("cannot write model file: {}", path.string()));
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw Error(fmt::format("write failed: {}", path.string()));
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error(fmt::format("cannot move model into place: {} ({})", path.string(),
                                ec.message()));
    }
}

ModelBundle load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open model file: {}", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();

    json j;
    try {
        j = json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        throw Error(fmt::format("model file is not valid JSON: {}", e.what()));
    }

    try {
        ModelBundle bundle;
        bundle.format_version = j.at("format_version").get<int>();
        if (bundle.format_version != ModelBundle::kFormatVersion)
            throw Error(fmt::format("unsupported model version: {}", bundle.format_version));

        const auto kind = j.at("feature_kind").get<std::string>();
        if (kind == "count")
            bundle.feature_kind = FeatureKind::count;
        else if (kind == "tfidf")
            bundle.feature_kind = FeatureKind::tfidf;
        else
            invariant_error(fmt::format("unknown feature kind: {}", kind));

        const auto& vj = j.at("vocabulary");
        for (const auto& t : vj.at("terms"))
            bundle.vocabulary.terms.push_back(t.get<std::string>());
        for (const auto& f : vj.at("doc_freq")) {
            const auto df = f.get<std::uint32_t>();
            if (df == 0) invariant_error("doc_freq must be at least 1");
            bundle.vocabulary.doc_freq.push_back(df);
        }
        if (bundle.vocabulary.terms.size() != bundle.vocabulary.doc_freq.size())
            invariant_error("terms and doc_freq length mismatch");
        for (std::size_t i = 0; i + 1 < bundle.vocabulary.terms.size(); ++i)
            if (!(bundle.vocabulary.terms[i] < bundle.vocabulary.terms[i + 1]))
                invariant_error("vocabulary terms not sorted");
        for (std::size_t i = 0; i < bundle.vocabulary.terms.size(); ++i)
            bundle.vocabulary.index.emplace(bundle.vocabulary.terms[i],
                                            static_cast<std::uint32_t>(i));

        if (bundle.feature_kind == FeatureKind::tfidf) {
            if (!j.contains("tfidf_stats"))
                invariant_error("tfidf model is missing tfidf_stats");
            const auto& sj = j.at("tfidf_stats");
            TfidfStats stats;
            const auto weighting = sj.at("weighting").get<std::string>();
            if (weighting == "relative")
                stats.weighting = TfWeighting::relative;
            else if (weighting == "literal_unit")
                stats.weighting = TfWeighting::literal_unit;
            else
                invariant_error(fmt::format("unknown tf weighting: {}", weighting));
            for (const auto& v : sj.at("idf")) {
                const double idf = finite(v, "idf");
                if (idf < 0.0) invariant_error("idf must be nonnegative");
                stats.idf.push_back(idf);
            }
            if (stats.idf.size() != bundle.vocabulary.size())
                invariant_error("idf length does not match vocabulary");
            bundle.tfidf_stats = std::move(stats);
        } else if (j.contains("tfidf_stats")) {
            invariant_error("count model carries tfidf_stats");
        }

        const auto& cj = j.at("classifier");
        const auto type = cj.at("type").get<std::string>();
        if (type == "nb")
            bundle.classifier = parse_nb(cj, bundle.vocabulary.size());
        else if (type == "svm")
            bundle.classifier = parse_svm(cj, bundle.vocabulary.size());
        else
            invariant_error(fmt::format("unknown classifier type: {}", type));

        const auto& mj = j.at("metadata");
        bundle.metadata.created_at = mj.at("created_at").get<std::string>();
        bundle.metadata.corpus_fingerprint = mj.at("corpus_fingerprint").get<std::string>();
        bundle.metadata.seed = mj.at("seed").get<std::uint64_t>();
        bundle.metadata.train_fraction = finite(mj.at("train_fraction"), "train_fraction");
        for (const auto& [key, value] : mj.at("hyperparameters").items())
            bundle.metadata.hyperparameters.emplace_back(key, value.get<std::string>());

        return bundle;
    } catch (const json::exception& e) {
        throw Error(fmt::format("malformed model file: {}", e.what()));
    }
}

} // namespace textclf
