#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "detail/text.hpp"
#include "errors.hpp"

namespace clsts {

using dense_matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using dense_vector = Eigen::VectorXd;

enum class embedding_format { autodetect, word2vec_text, glove_text };

namespace detail {
struct string_hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view sv) const noexcept {
        return std::hash<std::string_view>{}(sv);
    }
};
}  // namespace detail

/// Immutable word -> dense vector table for one language. Row i of vectors()
/// is the embedding of word(i); per-row Euclidean norms are cached. Safe to
/// share across threads after construction.
class embedding_space {
public:
    embedding_space(std::string lang, std::vector<std::string> words, dense_matrix vectors)
        : lang_(std::move(lang)), words_(std::move(words)), vectors_(std::move(vectors)) {
        if (vectors_.cols() < 1) throw domain_error("embedding dimension must be positive");
        if (static_cast<Eigen::Index>(words_.size()) != vectors_.rows())
            throw domain_error("word count does not match vector row count");
        if (!vectors_.allFinite()) throw domain_error("embedding vectors must be finite");
        vocab_.reserve(words_.size());
        for (std::size_t i = 0; i < words_.size(); ++i) {
            auto [it, inserted] = vocab_.emplace(words_[i], static_cast<Eigen::Index>(i));
            if (!inserted) throw domain_error("duplicate word in vocabulary: " + words_[i]);
        }
        norms_ = vectors_.rowwise().norm();
    }

    const std::string& lang() const noexcept { return lang_; }
    Eigen::Index dim() const noexcept { return vectors_.cols(); }
    std::size_t size() const noexcept { return words_.size(); }
    const dense_matrix& vectors() const noexcept { return vectors_; }
    const std::string& word(Eigen::Index row) const { return words_[static_cast<std::size_t>(row)]; }
    double norm(Eigen::Index row) const { return norms_[row]; }

    /// Row index of `word`, falling back to its lowercased form.
    std::optional<Eigen::Index> row_of(std::string_view word) const {
        if (auto it = vocab_.find(word); it != vocab_.end()) return it->second;
        std::string lowered = detail::lower_utf8(word);
        if (lowered != word) {
            if (auto it = vocab_.find(lowered); it != vocab_.end()) return it->second;
        }
        return std::nullopt;
    }

    std::optional<dense_vector> lookup(std::string_view word) const {
        auto row = row_of(word);
        if (!row) return std::nullopt;
        return dense_vector(vectors_.row(*row));
    }

    /// Top-k vocabulary entries by cosine against `query`, descending, ties by
    /// ascending row index. Returns min(k, size()) results.
    std::vector<std::pair<std::string, double>> nearest_neighbors(
        const Eigen::Ref<const dense_vector>& query, std::size_t k) const {
        if (query.size() != dim()) throw domain_error("query dimension mismatch");
        if (k == 0) throw domain_error("k must be positive");
        const double query_norm = query.norm();
        if (query_norm == 0.0) throw domain_error("zero-norm query");

        dense_vector cosines = vectors_ * query;
        for (Eigen::Index i = 0; i < cosines.size(); ++i)
            cosines[i] = norms_[i] > 0.0 ? cosines[i] / (norms_[i] * query_norm) : 0.0;

        k = std::min(k, size());
        std::vector<Eigen::Index> order(size());
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                          order.end(), [&](Eigen::Index a, Eigen::Index b) {
                              if (cosines[a] != cosines[b]) return cosines[a] > cosines[b];
                              return a < b;
                          });
        std::vector<std::pair<std::string, double>> out;
        out.reserve(k);
        for (std::size_t i = 0; i < k; ++i)
            out.emplace_back(words_[static_cast<std::size_t>(order[i])], cosines[order[i]]);
        return out;
    }

    /// Writes word2vec text format: "<count> <dim>" header, then one
    /// "<word> <components...>" row per word, components at 9 significant digits.
    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw io_error("cannot open for writing: " + path);
        std::string line;
        out << size() << ' ' << dim() << '\n';
        for (std::size_t i = 0; i < words_.size(); ++i) {
            line = words_[i];
            for (Eigen::Index j = 0; j < dim(); ++j) {
                line.push_back(' ');
                detail::append_component(line, vectors_(static_cast<Eigen::Index>(i), j));
            }
            line.push_back('\n');
            out << line;
        }
        out.flush();
        if (!out) throw io_error("write failed: " + path);
    }

private:
    std::string lang_;
    std::vector<std::string> words_;
    dense_matrix vectors_;
    dense_vector norms_;
    std::unordered_map<std::string, Eigen::Index, detail::string_hash, std::equal_to<>> vocab_;
};

namespace detail {

struct emb_builder {
    std::string lang;
    Eigen::Index dim = 0;
    std::vector<std::string> words;
    std::vector<double> values;  // row-major
    std::unordered_map<std::string, std::size_t> seen;

    bool add_row(std::string word, const std::vector<std::string_view>& fields,
                 std::size_t line_no, std::size_t max_vocab) {
        if (max_vocab > 0 && words.size() >= max_vocab) return false;
        std::vector<double> row(static_cast<std::size_t>(dim));
        for (Eigen::Index j = 0; j < dim; ++j)
            row[static_cast<std::size_t>(j)] =
                parse_double_field(fields[static_cast<std::size_t>(j) + 1], line_no);
        // first occurrence wins
        if (!seen.emplace(word, words.size()).second) return true;
        words.push_back(std::move(word));
        values.insert(values.end(), row.begin(), row.end());
        return true;
    }

    embedding_space finish() && {
        dense_matrix m(static_cast<Eigen::Index>(words.size()), dim);
        if (!values.empty())
            m = Eigen::Map<const dense_matrix>(values.data(),
                                               static_cast<Eigen::Index>(words.size()), dim);
        return embedding_space(std::move(lang), std::move(words), std::move(m));
    }
};

inline bool looks_like_w2v_header(const std::vector<std::string_view>& fields) {
    if (fields.size() != 2) return false;
    std::size_t count = 0, dim = 0;
    return parse_index_field(fields[0], count) && parse_index_field(fields[1], dim);
}

}  // namespace detail

/// Loads a text embedding file. word2vec-text carries a "<count> <dim>" first
/// line; glove-text starts directly with rows. With autodetect, an integer
/// pair on line one selects word2vec-text. Duplicate words keep the first
/// occurrence; max_vocab > 0 caps the vocabulary in file order.
inline embedding_space load_embeddings(const std::string& path,
                                       embedding_format format = embedding_format::autodetect,
                                       std::size_t max_vocab = 0,
                                       std::string lang = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open embedding file: " + path);

    detail::emb_builder builder;
    builder.lang = lang.empty() ? path : std::move(lang);

    std::string raw;
    std::size_t line_no = 0;
    bool saw_first = false;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = detail::strip_cr(raw);
        auto fields = detail::split_fields(line);
        if (fields.empty()) continue;

        if (!saw_first) {
            saw_first = true;
            bool header = detail::looks_like_w2v_header(fields);
            if (format == embedding_format::autodetect)
                format = header ? embedding_format::word2vec_text : embedding_format::glove_text;
            if (format == embedding_format::word2vec_text) {
                if (!header)
                    throw format_error("missing '<count> <dim>' header in " + path);
                std::size_t dim = 0;
                detail::parse_index_field(fields[1], dim);
                if (dim == 0) throw format_error("header dimension must be positive in " + path);
                builder.dim = static_cast<Eigen::Index>(dim);
                continue;  // header consumed
            }
            // glove: first row fixes the dimension
            if (fields.size() < 2)
                throw format_error("first row has no vector components in " + path);
            builder.dim = static_cast<Eigen::Index>(fields.size()) - 1;
        }

        if (static_cast<Eigen::Index>(fields.size()) != builder.dim + 1) {
            if (format == embedding_format::glove_text)
                throw format_error("inconsistent dimension at line " + std::to_string(line_no) +
                                   " in " + path);
            throw parse_error("expected " + std::to_string(builder.dim + 1) + " fields, got " +
                              std::to_string(fields.size()), line_no);
        }
        if (!builder.add_row(std::string(fields[0]), fields, line_no, max_vocab)) break;
    }

    if (!saw_first) throw format_error("empty embedding file: " + path);
    if (builder.words.empty()) throw format_error("no embedding rows in " + path);
    return std::move(builder).finish();
}

}  // namespace clsts
