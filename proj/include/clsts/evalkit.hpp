#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "detail/parallel.hpp"
#include "detail/text.hpp"
#include "errors.hpp"
#include "scoring.hpp"

namespace clsts {

struct sts_pair {
    std::string sent_a;
    std::string sent_b;
    double gold = 0.0;  // human similarity on the 0..5 scale
};

struct sts_dataset {
    std::string name;
    std::vector<sts_pair> pairs;
};

/// "sent_a<TAB>sent_b<TAB>gold" per line, gold in [0, 5].
inline sts_dataset load_sts_dataset(const std::string& path, std::string name = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open dataset: " + path);
    sts_dataset ds;
    ds.name = name.empty() ? path : std::move(name);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = detail::strip_cr(raw);
        if (line.empty()) continue;
        auto fields = detail::split_tabs(line);
        if (fields.size() != 3)
            throw parse_error("expected 'sent_a<TAB>sent_b<TAB>gold'", line_no);
        double gold = detail::parse_double_field(fields[2], line_no);
        if (gold < 0.0 || gold > 5.0)
            throw parse_error("gold score out of [0,5] range", line_no);
        ds.pairs.push_back({std::string(fields[0]), std::string(fields[1]), gold});
    }
    return ds;
}

/// Sample Pearson correlation coefficient.
inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw domain_error("pearson: length mismatch");
    if (x.size() < 2) throw domain_error("pearson: need at least two points");
    const double n = static_cast<double>(x.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= n;
    mean_y /= n;
    double cov = 0.0, var_x = 0.0, var_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x, dy = y[i] - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if (var_x == 0.0 || var_y == 0.0) throw domain_error("pearson: zero variance input");
    return cov / std::sqrt(var_x * var_y);
}

/// A scored candidate list with exhaustive boolean ground truth, held in
/// nonincreasing score order. Ties keep input order (stable sort).
struct ranked_item {
    std::string id_a;
    std::string id_b;
    double score = 0.0;
    bool label = false;
};

struct ranked_candidates {
    std::vector<ranked_item> items;

    static ranked_candidates from_unsorted(std::vector<ranked_item> items) {
        std::stable_sort(items.begin(), items.end(),
                         [](const ranked_item& a, const ranked_item& b) { return a.score > b.score; });
        return {std::move(items)};
    }
};

/// Mean of precision@i over the positions i holding positive items.
inline double average_precision(const ranked_candidates& rc) {
    std::size_t positives = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < rc.items.size(); ++i) {
        if (!rc.items[i].label) continue;
        ++positives;
        sum += static_cast<double>(positives) / static_cast<double>(i + 1);
    }
    if (positives == 0) throw domain_error("average_precision: no positive labels");
    return sum / static_cast<double>(positives);
}

/// Maximum recall over ranking prefixes whose precision meets the target;
/// 0 when no prefix qualifies.
inline double recall_at_precision(const ranked_candidates& rc, double target_precision) {
    if (!(target_precision > 0.0) || target_precision > 1.0)
        throw domain_error("recall_at_precision: target must be in (0,1]");
    std::size_t total_positives = 0;
    for (const auto& item : rc.items) total_positives += item.label ? 1 : 0;
    if (total_positives == 0) throw domain_error("recall_at_precision: no positive labels");

    double best = 0.0;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < rc.items.size(); ++i) {
        positives += rc.items[i].label ? 1 : 0;
        const double precision = static_cast<double>(positives) / static_cast<double>(i + 1);
        if (precision >= target_precision)
            best = std::max(best, static_cast<double>(positives) / static_cast<double>(total_positives));
    }
    return best;
}

/// Scores every pair and correlates predictions with gold. Pairs with no
/// in-vocabulary tokens score 0; their indices land in `unscored_out` when
/// given. All pairs unscoreable is an error, as is zero prediction variance.
inline double evaluate_sts(const bilingual_space& bi, const sts_dataset& ds,
                           similarity_method method, std::size_t jobs = 1,
                           std::vector<std::size_t>* unscored_out = nullptr) {
    if (ds.pairs.empty()) throw domain_error("empty STS dataset: " + ds.name);
    std::vector<double> predictions(ds.pairs.size(), 0.0);
    std::vector<double> golds(ds.pairs.size(), 0.0);
    std::vector<char> unscored(ds.pairs.size(), 0);

    detail::parallel_for(ds.pairs.size(), jobs, [&](std::size_t i) {
        golds[i] = ds.pairs[i].gold;
        try {
            predictions[i] = score_pair(bi, ds.pairs[i].sent_a, ds.pairs[i].sent_b, method).value;
        } catch (const empty_input_error&) {
            unscored[i] = 1;  // keep the pair, score 0
        }
    });

    std::size_t unscored_count = 0;
    for (std::size_t i = 0; i < unscored.size(); ++i) {
        if (!unscored[i]) continue;
        ++unscored_count;
        if (unscored_out) unscored_out->push_back(i);
    }
    if (unscored_count == ds.pairs.size())
        throw domain_error("every pair in " + ds.name + " is unscoreable");
    return pearson(predictions, golds);
}

}  // namespace clsts
