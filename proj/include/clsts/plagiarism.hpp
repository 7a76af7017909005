#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "detail/parallel.hpp"
#include "detail/text.hpp"
#include "errors.hpp"
#include "scoring.hpp"

namespace clsts {

/// A contiguous stretch of a document: its text and the character span it
/// occupies in the original.
struct fragment {
    std::string text;
    std::size_t char_start = 0;
    std::size_t char_end = 0;
};

struct fragmented_doc {
    std::string doc_id;
    std::vector<fragment> fragments;
};

/// Slides a window of `window` newline-separated sentences with the given
/// stride. When no full window fits, one fragment covers the whole text;
/// when full windows stop short of the end, a final partial window finishes
/// the coverage. Character spans reference the original text including
/// internal separators.
inline fragmented_doc segment_document(std::string_view text, std::string doc_id,
                                       std::size_t window = 5, std::size_t stride = 1) {
    if (window < 1 || stride < 1) throw domain_error("window and stride must be positive");

    struct sentence_span {
        std::size_t begin, end;
    };
    std::vector<sentence_span> sentences;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        std::string_view line = text.substr(pos, end - pos);
        if (line.find_first_not_of(" \t\r") != std::string_view::npos)
            sentences.push_back({pos, end});
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    if (sentences.empty()) throw domain_error("document has no sentences");

    fragmented_doc doc;
    doc.doc_id = std::move(doc_id);
    const std::size_t n = sentences.size();
    auto emit = [&](std::size_t first, std::size_t last) {  // inclusive sentence range
        std::size_t begin = sentences[first].begin, end = sentences[last].end;
        doc.fragments.push_back({std::string(text.substr(begin, end - begin)), begin, end});
    };

    if (n < window) {
        emit(0, n - 1);
        return doc;
    }
    std::size_t start = 0;
    for (; start + window <= n; start += stride) emit(start, start + window - 1);
    // full windows covered up to sentence start-stride+window-1
    std::size_t covered_end = (start - stride) + window;
    if (covered_end < n && start < n) emit(start, n - 1);
    return doc;
}

/// One retrieved source fragment, with its span so recall can be scored at
/// the character level.
struct retrieval {
    std::string doc_id;
    std::size_t fragment_index = 0;
    std::size_t char_start = 0;
    std::size_t char_end = 0;
    double score = 0.0;
};

/// For each suspicious fragment, the k most similar source fragments,
/// nonincreasing by score, ties by (doc_id, fragment index). Unscoreable
/// pairs score 0.
inline std::vector<std::vector<retrieval>> rank_fragments(
    const bilingual_space& bi, const fragmented_doc& suspicious,
    const std::vector<fragmented_doc>& sources, similarity_method method, std::size_t k,
    std::size_t jobs = 1) {
    if (k < 1) throw domain_error("rank_fragments: k must be positive");
    std::size_t total_sources = 0;
    for (const auto& doc : sources) total_sources += doc.fragments.size();
    if (total_sources == 0) throw domain_error("rank_fragments: no source fragments");

    // flat list of (doc, fragment) in (doc_id ascending given input order,
    // fragment index) order; input doc order is the tie order
    struct source_ref {
        std::size_t doc = 0, frag = 0;
    };
    std::vector<source_ref> refs;
    refs.reserve(total_sources);
    for (std::size_t d = 0; d < sources.size(); ++d)
        for (std::size_t f = 0; f < sources[d].fragments.size(); ++f) refs.push_back({d, f});

    std::vector<std::vector<retrieval>> out(suspicious.fragments.size());
    detail::parallel_for(suspicious.fragments.size(), jobs, [&](std::size_t si) {
        std::vector<double> scores(refs.size(), 0.0);
        for (std::size_t r = 0; r < refs.size(); ++r) {
            const auto& frag = sources[refs[r].doc].fragments[refs[r].frag];
            try {
                scores[r] = score_pair(bi, suspicious.fragments[si].text, frag.text, method).value;
            } catch (const empty_input_error&) {
                scores[r] = 0.0;
            }
        }
        std::vector<std::size_t> order(refs.size());
        for (std::size_t r = 0; r < refs.size(); ++r) order[r] = r;
        const std::size_t keep = std::min(k, refs.size());
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                          order.end(), [&](std::size_t a, std::size_t b) {
                              if (scores[a] != scores[b]) return scores[a] > scores[b];
                              if (sources[refs[a].doc].doc_id != sources[refs[b].doc].doc_id)
                                  return sources[refs[a].doc].doc_id < sources[refs[b].doc].doc_id;
                              return refs[a].frag < refs[b].frag;
                          });
        out[si].reserve(keep);
        for (std::size_t r = 0; r < keep; ++r) {
            const auto& doc = sources[refs[order[r]].doc];
            const auto& frag = doc.fragments[refs[order[r]].frag];
            out[si].push_back(
                {doc.doc_id, refs[order[r]].frag, frag.char_start, frag.char_end, scores[order[r]]});
        }
    });
    return out;
}

/// One gold plagiarism case: the plagiarized span of the suspicious document
/// and where it came from.
struct plagiarism_case {
    std::size_t susp_start = 0;
    std::size_t susp_end = 0;
    std::string source_doc_id;
    std::size_t src_start = 0;
    std::size_t src_end = 0;
};

/// "susp_start<TAB>susp_end<TAB>source_doc_id<TAB>src_start<TAB>src_end" per case.
inline std::vector<plagiarism_case> load_plagiarism_gold(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open plagiarism gold file: " + path);
    std::vector<plagiarism_case> gold;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = detail::strip_cr(raw);
        if (line.empty() || line.front() == '#') continue;
        auto fields = detail::split_tabs(line);
        plagiarism_case pc;
        if (fields.size() != 5 || !detail::parse_index_field(fields[0], pc.susp_start) ||
            !detail::parse_index_field(fields[1], pc.susp_end) || fields[2].empty() ||
            !detail::parse_index_field(fields[3], pc.src_start) ||
            !detail::parse_index_field(fields[4], pc.src_end))
            throw parse_error("expected 'susp_start<TAB>susp_end<TAB>doc_id<TAB>src_start<TAB>src_end'",
                              line_no);
        if (pc.susp_end <= pc.susp_start || pc.src_end <= pc.src_start)
            throw parse_error("empty character span in gold case", line_no);
        pc.source_doc_id = std::string(fields[2]);
        gold.push_back(std::move(pc));
    }
    return gold;
}

namespace detail {

inline bool spans_overlap(std::size_t a_start, std::size_t a_end, std::size_t b_start,
                          std::size_t b_end) {
    return a_start < b_end && b_start < a_end;
}

}  // namespace detail

/// Character-level recall: a plagiarized character counts as recalled when it
/// lies in a suspicious fragment whose top-k retrievals contain a fragment of
/// the true source document overlapping the gold source span. `retrievals`
/// may hold more than k entries per fragment; only the first k are used.
inline double char_recall_at_k(const std::vector<std::vector<retrieval>>& retrievals,
                               const fragmented_doc& suspicious,
                               const std::vector<plagiarism_case>& gold, std::size_t k) {
    if (gold.empty()) throw domain_error("char_recall_at_k: empty gold set");
    if (k < 1) throw domain_error("char_recall_at_k: k must be positive");
    if (retrievals.size() != suspicious.fragments.size())
        throw domain_error("char_recall_at_k: retrievals do not match the suspicious fragments");

    std::size_t recalled = 0, total = 0;
    for (const auto& gcase : gold) {
        if (gcase.susp_end <= gcase.susp_start)
            throw domain_error("char_recall_at_k: empty gold span");
        total += gcase.susp_end - gcase.susp_start;

        // union of qualifying fragment spans clipped to the gold span
        std::vector<std::pair<std::size_t, std::size_t>> hits;
        for (std::size_t fi = 0; fi < suspicious.fragments.size(); ++fi) {
            const auto& frag = suspicious.fragments[fi];
            if (!detail::spans_overlap(frag.char_start, frag.char_end, gcase.susp_start,
                                       gcase.susp_end))
                continue;
            const auto& top = retrievals[fi];
            const std::size_t use = std::min(k, top.size());
            bool qualified = false;
            for (std::size_t r = 0; r < use && !qualified; ++r)
                qualified = top[r].doc_id == gcase.source_doc_id &&
                            detail::spans_overlap(top[r].char_start, top[r].char_end,
                                                  gcase.src_start, gcase.src_end);
            if (qualified)
                hits.emplace_back(std::max(frag.char_start, gcase.susp_start),
                                  std::min(frag.char_end, gcase.susp_end));
        }
        std::sort(hits.begin(), hits.end());
        std::size_t cursor = 0;
        for (const auto& [begin, end] : hits) {
            std::size_t from = std::max(cursor, begin);
            if (end > from) {
                recalled += end - from;
                cursor = end;
            }
        }
    }
    return static_cast<double>(recalled) / static_cast<double>(total);
}

}  // namespace clsts
