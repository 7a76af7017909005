#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "detail/text.hpp"
#include "embedding_space.hpp"

namespace clsts {

/// Splits on unicode whitespace and strips leading/trailing punctuation from
/// each piece. Internal punctuation (don't, e-mail) survives; case is kept
/// (vocabulary lookup handles the lowercase fallback).
inline std::vector<std::string> tokenize(std::string_view text) {
    struct cp_span {
        std::size_t begin, end;
        char32_t cp;
    };
    std::vector<std::string> out;
    std::vector<cp_span> piece;  // scratch, one whitespace-delimited piece
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t begin = i;
        char32_t cp = detail::decode_utf8(text, i);
        if (detail::is_space_cp(cp)) {
            if (piece.empty()) continue;
        } else {
            piece.push_back({begin, i, cp});
            if (i < text.size()) continue;
        }
        // piece complete: strip punctuation off both ends
        std::size_t lo = 0, hi = piece.size();
        while (lo < hi && detail::is_punct_cp(piece[lo].cp)) ++lo;
        while (hi > lo && detail::is_punct_cp(piece[hi - 1].cp)) --hi;
        if (lo < hi)
            out.emplace_back(text.substr(piece[lo].begin, piece[hi - 1].end - piece[lo].begin));
        piece.clear();
    }
    return out;
}

/// A sentence reduced to the tokens resolvable in one embedding space.
/// rows[i] is the vocabulary row of tokens[i]; repeated tokens stay repeated.
struct token_bag {
    std::vector<std::string> tokens;
    std::vector<Eigen::Index> rows;
    std::size_t oov_count = 0;
    std::string source_text;

    bool empty() const noexcept { return tokens.empty(); }
    std::size_t size() const noexcept { return tokens.size(); }
};

inline token_bag to_token_bag(std::string_view text, const embedding_space& space) {
    token_bag bag;
    bag.source_text.assign(text);
    for (auto& tok : tokenize(text)) {
        if (auto row = space.row_of(tok)) {
            bag.tokens.push_back(std::move(tok));
            bag.rows.push_back(*row);
        } else {
            ++bag.oov_count;
        }
    }
    return bag;
}

}  // namespace clsts
