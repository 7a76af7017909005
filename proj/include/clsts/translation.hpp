#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "detail/text.hpp"
#include "embedding_space.hpp"
#include "errors.hpp"

namespace clsts {

enum class mapping_method { least_squares, adam };

inline const char* to_string(mapping_method m) {
    return m == mapping_method::least_squares ? "least-squares" : "adam";
}

inline std::optional<mapping_method> mapping_method_from(std::string_view s) {
    if (s == "least-squares") return mapping_method::least_squares;
    if (s == "adam") return mapping_method::adam;
    return std::nullopt;
}

struct train_options {
    double ridge = 1e-6;          // closed-form regularizer
    double learning_rate = 1e-3;  // adam step size
    std::size_t batch_size = 64;
    std::size_t epochs = 3000;
    std::uint64_t seed = 42;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Word translation pairs resolved against both spaces. Pairs that fail
/// lookup on either side are dropped (and counted); duplicates are dropped.
class translation_pair_set {
public:
    translation_pair_set(const embedding_space& source, const embedding_space& target,
                         const std::vector<std::pair<std::string, std::string>>& raw) {
        std::set<std::pair<std::string, std::string>> unique;
        for (const auto& [sw, tw] : raw) {
            if (!unique.insert({sw, tw}).second) continue;  // duplicate entry
            auto srow = source.row_of(sw);
            auto trow = target.row_of(tw);
            if (!srow || !trow) {
                ++dropped_;
                continue;
            }
            pairs_.emplace_back(sw, tw);
            source_rows_.push_back(*srow);
            target_rows_.push_back(*trow);
        }
    }

    std::size_t size() const noexcept { return pairs_.size(); }
    std::size_t dropped() const noexcept { return dropped_; }
    bool empty() const noexcept { return pairs_.empty(); }
    const std::vector<std::pair<std::string, std::string>>& pairs() const noexcept { return pairs_; }
    const std::vector<Eigen::Index>& source_rows() const noexcept { return source_rows_; }
    const std::vector<Eigen::Index>& target_rows() const noexcept { return target_rows_; }

    /// Stacks the resolved vectors: rows of `s` are source embeddings, rows of
    /// `t` the paired target embeddings.
    void gather(const embedding_space& source, const embedding_space& target, dense_matrix& s,
                dense_matrix& t) const {
        s.resize(static_cast<Eigen::Index>(size()), source.dim());
        t.resize(static_cast<Eigen::Index>(size()), target.dim());
        for (std::size_t i = 0; i < size(); ++i) {
            s.row(static_cast<Eigen::Index>(i)) = source.vectors().row(source_rows_[i]);
            t.row(static_cast<Eigen::Index>(i)) = target.vectors().row(target_rows_[i]);
        }
    }

private:
    std::vector<std::pair<std::string, std::string>> pairs_;
    std::vector<Eigen::Index> source_rows_;
    std::vector<Eigen::Index> target_rows_;
    std::size_t dropped_ = 0;
};

/// "source<TAB>target" per line; '#' lines are comments, blank lines skipped.
inline std::vector<std::pair<std::string, std::string>> load_word_pairs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open pair file: " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = detail::strip_cr(raw);
        if (line.empty() || line.front() == '#') continue;
        auto fields = detail::split_tabs(line);
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
            throw parse_error("expected 'source<TAB>target'", line_no);
        out.emplace_back(std::string(fields[0]), std::string(fields[1]));
    }
    return out;
}

/// The learned linear map from source embeddings into the target space.
struct translation_matrix {
    dense_matrix m;  // d_t x d_s
    std::string source_lang;
    std::string target_lang;
    mapping_method method = mapping_method::least_squares;
    double train_loss = 0.0;
};

namespace detail {

inline void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
    // Fisher-Yates with direct modulo draw; std::shuffle's distribution is
    // implementation-defined and would break byte-identical reruns.
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng() % i]);
}

inline double mean_pair_loss(const dense_matrix& m, const dense_matrix& s, const dense_matrix& t) {
    return (s * m.transpose() - t).rowwise().squaredNorm().mean();
}

inline dense_matrix train_least_squares(const dense_matrix& s, const dense_matrix& t,
                                        double ridge) {
    Eigen::MatrixXd gram = s.transpose() * s;
    gram.diagonal().array() += ridge;
    // M^T = (S^T S + ridge I)^-1 S^T T
    Eigen::MatrixXd mt = gram.ldlt().solve(s.transpose() * t);
    return dense_matrix(mt.transpose());
}

inline dense_matrix train_adam(const dense_matrix& s, const dense_matrix& t,
                               const train_options& opts) {
    const Eigen::Index ds = s.cols(), dt = t.cols();
    const std::size_t n = static_cast<std::size_t>(s.rows());
    dense_matrix m = dense_matrix::Zero(dt, ds);
    dense_matrix moment1 = dense_matrix::Zero(dt, ds), moment2 = dense_matrix::Zero(dt, ds);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::mt19937_64 rng(opts.seed);
    const std::size_t batch = std::max<std::size_t>(1, opts.batch_size);
    std::size_t step = 0;
    dense_matrix sb, tb, grad;
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        shuffle_indices(idx, rng);
        for (std::size_t begin = 0; begin < n; begin += batch) {
            const std::size_t count = std::min(batch, n - begin);
            sb.resize(static_cast<Eigen::Index>(count), ds);
            tb.resize(static_cast<Eigen::Index>(count), dt);
            for (std::size_t r = 0; r < count; ++r) {
                sb.row(static_cast<Eigen::Index>(r)) = s.row(static_cast<Eigen::Index>(idx[begin + r]));
                tb.row(static_cast<Eigen::Index>(r)) = t.row(static_cast<Eigen::Index>(idx[begin + r]));
            }
            // gradient of the batch-mean squared residual
            grad = (2.0 / static_cast<double>(count)) * (sb * m.transpose() - tb).transpose() * sb;
            if (!grad.allFinite())
                throw optimization_error("adam training diverged (non-finite gradient)");
            ++step;
            moment1 = opts.beta1 * moment1 + (1.0 - opts.beta1) * grad;
            moment2 = opts.beta2 * moment2 + (1.0 - opts.beta2) * grad.cwiseProduct(grad);
            const double bias1 = 1.0 - std::pow(opts.beta1, static_cast<double>(step));
            const double bias2 = 1.0 - std::pow(opts.beta2, static_cast<double>(step));
            m.array() -= opts.learning_rate * (moment1.array() / bias1) /
                         ((moment2.array() / bias2).sqrt() + opts.epsilon);
        }
    }
    if (!m.allFinite()) throw optimization_error("adam training diverged (non-finite matrix)");
    return m;
}

}  // namespace detail

/// Fits M minimizing the summed squared residuals ||M s_i - t_i||^2 over the
/// pair set. least_squares solves the ridge-stabilized normal equations
/// exactly; adam runs seeded stochastic steps. train_loss is the mean
/// per-pair squared residual at termination.
inline translation_matrix train_matrix(const embedding_space& source,
                                       const embedding_space& target,
                                       const translation_pair_set& pairs, mapping_method method,
                                       const train_options& opts = {}) {
    if (source.size() == 0 || target.size() == 0)
        throw domain_error("cannot train against an empty embedding space");
    if (pairs.empty()) throw domain_error("no usable translation pairs after lookup filtering");

    dense_matrix s, t;
    pairs.gather(source, target, s, t);

    if (method == mapping_method::least_squares &&
        pairs.size() < static_cast<std::size_t>(source.dim()))
        std::cerr << "warning: " << pairs.size() << " pairs for " << source.dim()
                  << " source dimensions; system is underdetermined, ridge term resolves it\n";

    translation_matrix tm;
    tm.source_lang = source.lang();
    tm.target_lang = target.lang();
    tm.method = method;
    tm.m = method == mapping_method::least_squares
               ? detail::train_least_squares(s, t, opts.ridge)
               : detail::train_adam(s, t, opts);
    tm.train_loss = detail::mean_pair_loss(tm.m, s, t);
    if (!std::isfinite(tm.train_loss))
        throw optimization_error("training produced a non-finite loss");
    return tm;
}

/// A source space, a target space and the matrix binding them; the unit all
/// scoring runs against. Spaces are shared immutably.
class bilingual_space {
public:
    bilingual_space(std::shared_ptr<const embedding_space> source,
                    std::shared_ptr<const embedding_space> target, translation_matrix matrix)
        : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
        if (!source_ || !target_) throw domain_error("bilingual space needs both spaces");
        if (matrix_.m.cols() != source_->dim() || matrix_.m.rows() != target_->dim())
            throw domain_error("translation matrix shape does not match the embedding spaces");
    }

    const embedding_space& source() const noexcept { return *source_; }
    const embedding_space& target() const noexcept { return *target_; }
    const translation_matrix& matrix() const noexcept { return matrix_; }

    /// m * v: projects a source-space vector into the target space.
    dense_vector map_vector(const Eigen::Ref<const dense_vector>& v) const {
        if (v.size() != matrix_.m.cols())
            throw domain_error("vector dimension does not match the source space");
        return matrix_.m * v;
    }

private:
    std::shared_ptr<const embedding_space> source_;
    std::shared_ptr<const embedding_space> target_;
    translation_matrix matrix_;
};

/// Precision@k over the ranked target vocabulary: for each test pair the
/// source vector is mapped and the whole target vocabulary ranked by cosine
/// (nothing excluded); a hit means the gold target lands in the top k.
inline std::map<std::size_t, double> evaluate_matrix(const bilingual_space& bi,
                                                     const translation_pair_set& test_pairs,
                                                     const std::vector<std::size_t>& ranks) {
    if (test_pairs.empty()) throw domain_error("empty translation test set");
    if (ranks.empty()) throw domain_error("no ranks requested");

    const auto& target = bi.target();
    std::map<std::size_t, std::size_t> hits;
    for (std::size_t k : ranks) hits[k] = 0;

    for (std::size_t p = 0; p < test_pairs.size(); ++p) {
        dense_vector mapped =
            bi.map_vector(bi.source().vectors().row(test_pairs.source_rows()[p]).transpose());
        const double mapped_norm = mapped.norm();
        const Eigen::Index gold = test_pairs.target_rows()[p];

        dense_vector cosines = target.vectors() * mapped;
        for (Eigen::Index i = 0; i < cosines.size(); ++i) {
            const double denom = target.norm(i) * mapped_norm;
            cosines[i] = denom > 0.0 ? cosines[i] / denom : 0.0;
        }
        // rank of gold under "descending cosine, ties by ascending row"
        std::size_t rank = 1;
        const double gold_cos = cosines[gold];
        for (Eigen::Index i = 0; i < cosines.size(); ++i)
            if (cosines[i] > gold_cos || (cosines[i] == gold_cos && i < gold)) ++rank;
        for (auto& [k, count] : hits)
            if (rank <= k) ++count;
    }

    std::map<std::size_t, double> precision;
    for (const auto& [k, count] : hits)
        precision[k] = static_cast<double>(count) / static_cast<double>(test_pairs.size());
    return precision;
}

/// Matrix file: "d_t d_s source_lang target_lang method" header, then d_t
/// rows of d_s components at 9 significant digits.
inline void save_matrix(const translation_matrix& tm, const std::string& path) {
    if (tm.source_lang.find_first_of(" \t") != std::string::npos ||
        tm.target_lang.find_first_of(" \t") != std::string::npos)
        throw domain_error("language tags must not contain whitespace");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << tm.m.rows() << ' ' << tm.m.cols() << ' ' << tm.source_lang << ' ' << tm.target_lang
        << ' ' << to_string(tm.method) << '\n';
    std::string line;
    for (Eigen::Index i = 0; i < tm.m.rows(); ++i) {
        line.clear();
        for (Eigen::Index j = 0; j < tm.m.cols(); ++j) {
            if (j > 0) line.push_back(' ');
            detail::append_component(line, tm.m(i, j));
        }
        line.push_back('\n');
        out << line;
    }
    out.flush();
    if (!out) throw io_error("write failed: " + path);
}

inline translation_matrix load_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open matrix file: " + path);
    std::string raw;
    if (!std::getline(in, raw)) throw format_error("empty matrix file: " + path);
    auto header = detail::split_fields(detail::strip_cr(raw));
    if (header.size() != 5)
        throw format_error("matrix header must be 'd_t d_s source_lang target_lang method'");
    std::size_t dt = 0, ds = 0;
    if (!detail::parse_index_field(header[0], dt) || !detail::parse_index_field(header[1], ds) ||
        dt == 0 || ds == 0)
        throw format_error("bad matrix dimensions in header");
    auto method = mapping_method_from(header[4]);
    if (!method) throw format_error("unknown training method '" + std::string(header[4]) + "'");

    translation_matrix tm;
    tm.source_lang = std::string(header[2]);
    tm.target_lang = std::string(header[3]);
    tm.method = *method;
    tm.m.resize(static_cast<Eigen::Index>(dt), static_cast<Eigen::Index>(ds));

    std::size_t line_no = 1, row = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = detail::strip_cr(raw);
        auto fields = detail::split_fields(line);
        if (fields.empty()) continue;
        if (row >= dt) throw format_error("matrix has more rows than the header declares");
        if (fields.size() != ds)
            throw format_error("row " + std::to_string(row) + " has " +
                               std::to_string(fields.size()) + " values, expected " +
                               std::to_string(ds));
        for (std::size_t j = 0; j < ds; ++j)
            tm.m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) =
                detail::parse_double_field(fields[j], line_no);
        ++row;
    }
    if (row != dt) throw format_error("matrix has fewer rows than the header declares");
    return tm;
}

}  // namespace clsts
