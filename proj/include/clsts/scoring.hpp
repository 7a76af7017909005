#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <optional>
#include <string>
#include <string_view>

#include "assignment.hpp"
#include "embedding_space.hpp"
#include "errors.hpp"
#include "tokenizer.hpp"
#include "translation.hpp"

namespace clsts {

enum class similarity_method { greedy_association, optimal_alignment, aggregation };

inline const char* to_string(similarity_method m) {
    switch (m) {
        case similarity_method::greedy_association: return "gr-assoc";
        case similarity_method::optimal_alignment: return "opt-align";
        default: return "aggreg";
    }
}

inline std::optional<similarity_method> similarity_method_from(std::string_view s) {
    if (s == "gr-assoc") return similarity_method::greedy_association;
    if (s == "opt-align") return similarity_method::optimal_alignment;
    if (s == "aggreg") return similarity_method::aggregation;
    return std::nullopt;
}

struct sentence_score {
    double value = 0.0;
    similarity_method method = similarity_method::optimal_alignment;
    std::size_t oov_source = 0;
    std::size_t oov_target = 0;
};

namespace detail {

inline double cosine(const Eigen::Ref<const dense_vector>& a,
                     const Eigen::Ref<const dense_vector>& b) {
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) throw domain_error("cosine of a zero-norm vector");
    return a.dot(b) / (na * nb);
}

/// Pairwise word similarities: entry (i, j) is the cosine of the mapped i-th
/// source token against the j-th target token.
inline dense_matrix similarity_matrix(const bilingual_space& bi, const token_bag& s,
                                      const token_bag& t) {
    const Eigen::Index ns = static_cast<Eigen::Index>(s.size());
    const Eigen::Index nt = static_cast<Eigen::Index>(t.size());

    dense_matrix src(ns, bi.source().dim());
    for (Eigen::Index i = 0; i < ns; ++i)
        src.row(i) = bi.source().vectors().row(s.rows[static_cast<std::size_t>(i)]);
    dense_matrix mapped = src * bi.matrix().m.transpose();  // ns x d_t

    dense_matrix tgt(nt, bi.target().dim());
    for (Eigen::Index j = 0; j < nt; ++j)
        tgt.row(j) = bi.target().vectors().row(t.rows[static_cast<std::size_t>(j)]);

    dense_vector mapped_norms = mapped.rowwise().norm();
    dense_vector tgt_norms = tgt.rowwise().norm();
    if ((mapped_norms.array() == 0.0).any() || (tgt_norms.array() == 0.0).any())
        throw domain_error("degenerate embedding: zero-norm vector in similarity matrix");

    dense_matrix sims = mapped * tgt.transpose();
    sims.array().colwise() /= mapped_norms.array();
    sims.array().rowwise() /= tgt_norms.transpose().array();
    return sims;
}

inline void require_nonempty(const token_bag& s, const token_bag& t, const char* op) {
    if (s.empty() || t.empty())
        throw empty_input_error(std::string(op) + ": no in-vocabulary tokens to score",
                                s.oov_count, t.oov_count);
}

}  // namespace detail

/// Cross-lingual word similarity: cosine of the mapped source vector against
/// the target vector. No value when either word is out of vocabulary.
inline std::optional<double> word_sim(const bilingual_space& bi, std::string_view source_word,
                                      std::string_view target_word) {
    auto srow = bi.source().row_of(source_word);
    auto trow = bi.target().row_of(target_word);
    if (!srow || !trow) return std::nullopt;
    dense_vector mapped = bi.map_vector(bi.source().vectors().row(*srow).transpose());
    dense_vector tgt = bi.target().vectors().row(*trow).transpose();
    return detail::cosine(mapped, tgt);
}

/// Best-match similarity per token, averaged per direction, then averaged
/// across the two directions. A single partner may serve several tokens of
/// the other sentence. O(|S|*|T|) word similarities.
inline sentence_score greedy_association(const bilingual_space& bi, const token_bag& s,
                                         const token_bag& t) {
    detail::require_nonempty(s, t, "greedy_association");
    dense_matrix sims = detail::similarity_matrix(bi, s, t);
    const double source_to_target = sims.rowwise().maxCoeff().mean();
    const double target_to_source = sims.colwise().maxCoeff().mean();
    return {0.5 * (source_to_target + target_to_source), similarity_method::greedy_association,
            s.oov_count, t.oov_count};
}

/// Maximum one-to-one alignment score. The similarity matrix is padded square
/// with -1 sentinels so the solver can run; sentinel terms are subtracted
/// back out, leaving the sum over the min(|S|,|T|) real aligned pairs, which
/// is then normalized by both sentence lengths. O(max(|S|,|T|)^3).
inline sentence_score optimal_alignment(const bilingual_space& bi, const token_bag& s,
                                        const token_bag& t) {
    detail::require_nonempty(s, t, "optimal_alignment");
    dense_matrix sims = detail::similarity_matrix(bi, s, t);
    const Eigen::Index ns = sims.rows(), nt = sims.cols();
    const Eigen::Index n = std::max(ns, nt);

    dense_matrix padded = dense_matrix::Constant(n, n, -1.0);
    padded.topLeftCorner(ns, nt) = sims;

    assignment_result solved = solve_max_assignment(padded);
    const double sentinel_terms = static_cast<double>(n - std::min(ns, nt));
    const double align = solved.total + sentinel_terms;

    const double len_s = static_cast<double>(ns), len_t = static_cast<double>(nt);
    const double value = align * (len_s + len_t) / (2.0 * len_s * len_t);
    return {value, similarity_method::optimal_alignment, s.oov_count, t.oov_count};
}

/// Cosine between the two mean vectors (source tokens mapped, target tokens
/// as stored). Linear in the sentence lengths.
inline sentence_score aggregation(const bilingual_space& bi, const token_bag& s,
                                  const token_bag& t) {
    detail::require_nonempty(s, t, "aggregation");

    dense_vector source_sum = dense_vector::Zero(bi.source().dim());
    for (Eigen::Index row : s.rows) source_sum += bi.source().vectors().row(row).transpose();
    dense_vector source_mean = bi.map_vector(source_sum / static_cast<double>(s.size()));

    dense_vector target_mean = dense_vector::Zero(bi.target().dim());
    for (Eigen::Index row : t.rows) target_mean += bi.target().vectors().row(row).transpose();
    target_mean /= static_cast<double>(t.size());

    if (source_mean.norm() == 0.0 || target_mean.norm() == 0.0)
        throw domain_error("aggregation: zero aggregate vector");
    return {detail::cosine(source_mean, target_mean), similarity_method::aggregation, s.oov_count,
            t.oov_count};
}

/// Tokenizes both texts against their spaces and dispatches to the scorer.
inline sentence_score score_pair(const bilingual_space& bi, std::string_view source_text,
                                 std::string_view target_text, similarity_method method) {
    token_bag s = to_token_bag(source_text, bi.source());
    token_bag t = to_token_bag(target_text, bi.target());
    switch (method) {
        case similarity_method::greedy_association: return greedy_association(bi, s, t);
        case similarity_method::optimal_alignment: return optimal_alignment(bi, s, t);
        default: return aggregation(bi, s, t);
    }
}

}  // namespace clsts
