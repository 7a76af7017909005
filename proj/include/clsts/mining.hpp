#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "detail/parallel.hpp"
#include "detail/text.hpp"
#include "errors.hpp"
#include "evalkit.hpp"
#include "scoring.hpp"

namespace clsts {

/// Two topically related documents, pre-segmented into sentences, with
/// optional gold sentence alignments.
struct comparable_pair {
    std::vector<std::string> doc_s;
    std::vector<std::string> doc_t;
    std::optional<std::set<std::pair<std::size_t, std::size_t>>> gold_alignments;
};

struct mining_config {
    std::optional<double> tau;  // emit pairs scoring >= tau when set
    similarity_method method = similarity_method::optimal_alignment;
    std::size_t jobs = 1;
};

struct mined_pair {
    std::size_t index_s = 0;
    std::size_t index_t = 0;
    double score = 0.0;
};

struct mining_result {
    ranked_candidates candidates;           // full cross product, score-descending
    std::vector<mined_pair> above_threshold;  // filled iff cfg.tau is set
    bool labeled = false;                     // gold alignments were present
};

/// One sentence per line; blank lines are skipped.
inline std::vector<std::string> load_sentences(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open document: " + path);
    std::vector<std::string> out;
    std::string raw;
    while (std::getline(in, raw)) {
        std::string_view line = detail::strip_cr(raw);
        if (!line.empty()) out.emplace_back(line);
    }
    return out;
}

/// "index_s<TAB>index_t" per line; indices must be in document range.
inline std::set<std::pair<std::size_t, std::size_t>> load_gold_alignments(
    const std::string& path, std::size_t source_count, std::size_t target_count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open gold alignment file: " + path);
    std::set<std::pair<std::size_t, std::size_t>> gold;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = detail::strip_cr(raw);
        if (line.empty() || line.front() == '#') continue;
        auto fields = detail::split_tabs(line);
        std::size_t i = 0, j = 0;
        if (fields.size() != 2 || !detail::parse_index_field(fields[0], i) ||
            !detail::parse_index_field(fields[1], j))
            throw parse_error("expected 'index_s<TAB>index_t'", line_no);
        if (i >= source_count || j >= target_count)
            throw parse_error("alignment index out of document range", line_no);
        gold.insert({i, j});
    }
    return gold;
}

/// Scores the full sentence cross product, ranks it, and (with tau set)
/// extracts the pairs at or above the threshold. Pairs with no scoreable
/// tokens get score 0.
inline mining_result mine_parallel(const bilingual_space& bi, const comparable_pair& cp,
                                   const mining_config& cfg) {
    if (cp.doc_s.empty() || cp.doc_t.empty())
        throw domain_error("mine_parallel: empty document");
    if (cp.gold_alignments) {
        for (const auto& [i, j] : *cp.gold_alignments)
            if (i >= cp.doc_s.size() || j >= cp.doc_t.size())
                throw domain_error("mine_parallel: gold alignment index out of range");
    }

    const std::size_t nt = cp.doc_t.size();
    const std::size_t total = cp.doc_s.size() * nt;
    std::vector<double> scores(total, 0.0);
    detail::parallel_for(total, cfg.jobs, [&](std::size_t flat) {
        const std::size_t i = flat / nt, j = flat % nt;
        try {
            scores[flat] = score_pair(bi, cp.doc_s[i], cp.doc_t[j], cfg.method).value;
        } catch (const empty_input_error&) {
            scores[flat] = 0.0;
        }
    });

    std::vector<ranked_item> items;
    items.reserve(total);
    for (std::size_t i = 0; i < cp.doc_s.size(); ++i)
        for (std::size_t j = 0; j < nt; ++j)
            items.push_back({std::to_string(i), std::to_string(j), scores[i * nt + j],
                             cp.gold_alignments && cp.gold_alignments->count({i, j}) > 0});

    mining_result result;
    result.labeled = cp.gold_alignments.has_value();
    result.candidates = ranked_candidates::from_unsorted(std::move(items));
    if (cfg.tau) {
        for (const auto& item : result.candidates.items) {
            if (item.score < *cfg.tau) continue;
            mined_pair mp;
            detail::parse_index_field(item.id_a, mp.index_s);
            detail::parse_index_field(item.id_b, mp.index_t);
            mp.score = item.score;
            result.above_threshold.push_back(mp);
        }
    }
    return result;
}

}  // namespace clsts
