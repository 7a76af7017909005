#pragma once

// Shared test machinery: a portable deterministic RNG (std distributions are
// implementation-defined, which would break frozen expectations), builders
// for tiny embedding spaces, and from-definition oracles kept independent of
// the library implementations they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "clsts/clsts.hpp"

namespace test_support {

class rng {
public:
    explicit rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) {
        const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * unit;
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

    std::uint64_t raw() { return engine_(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
    }

private:
    std::mt19937_64 engine_;
};

inline clsts::dense_matrix random_matrix(rng& r, Eigen::Index rows, Eigen::Index cols, double lo,
                                         double hi) {
    clsts::dense_matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = r.uniform(lo, hi);
    return m;
}

inline clsts::dense_vector random_unit_vector(rng& r, Eigen::Index dim) {
    clsts::dense_vector v(dim);
    double norm = 0.0;
    while (norm < 1e-6) {  // re-draw degenerate vectors
        for (Eigen::Index i = 0; i < dim; ++i) v(i) = r.uniform(-1.0, 1.0);
        norm = v.norm();
    }
    return v / norm;
}

// ---- space builders ---------------------------------------------------------

inline std::shared_ptr<const clsts::embedding_space> make_space(
    std::string lang, const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
    std::vector<std::string> words;
    clsts::dense_matrix m(static_cast<Eigen::Index>(rows.size()),
                          static_cast<Eigen::Index>(rows.front().second.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        words.push_back(rows[i].first);
        for (std::size_t j = 0; j < rows[i].second.size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].second[j];
    }
    return std::make_shared<clsts::embedding_space>(std::move(lang), std::move(words),
                                                    std::move(m));
}

inline clsts::translation_matrix identity_matrix(Eigen::Index dim, std::string lang = "xx") {
    clsts::translation_matrix tm;
    tm.m = clsts::dense_matrix::Identity(dim, dim);
    tm.source_lang = lang;
    tm.target_lang = lang;
    tm.method = clsts::mapping_method::least_squares;
    return tm;
}

/// Both sides the same space, identity map: every word is its own perfect
/// translation, so self-similarity scores must be exactly 1.
inline clsts::bilingual_space monolingual_identity(
    std::shared_ptr<const clsts::embedding_space> space) {
    return clsts::bilingual_space(space, space, identity_matrix(space->dim(), space->lang()));
}

/// A random vocabulary of `count` words w000.. with random unit vectors.
inline std::shared_ptr<const clsts::embedding_space> random_space(rng& r, std::string lang,
                                                                  std::size_t count,
                                                                  Eigen::Index dim) {
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    rows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        clsts::dense_vector v = random_unit_vector(r, dim);
        std::string word = lang + std::to_string(i);
        rows.emplace_back(std::move(word), std::vector<double>(v.data(), v.data() + dim));
    }
    return make_space(std::move(lang), rows);
}

// ---- from-definition oracles --------------------------------------------------

/// Maximum assignment by enumerating all column permutations.
inline std::pair<std::vector<std::size_t>, double> brute_max_assignment(
    const clsts::dense_matrix& w) {
    const std::size_t n = static_cast<std::size_t>(w.rows());
    std::vector<std::size_t> perm(n), best(n);
    std::iota(perm.begin(), perm.end(), 0);
    best = perm;
    double best_total = -std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            total += w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i]));
        if (total > best_total + 1e-15) {
            best_total = total;
            best = perm;
        } else if (total >= best_total - 1e-15 && perm < best) {
            best = perm;  // lexicographic tie-break, like the contract
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {best, best_total};
}

/// Maximum total similarity over all injective alignments of the smaller bag
/// into the larger, straight from the definition.
inline double brute_best_alignment(const clsts::dense_matrix& sims) {
    const std::size_t ns = static_cast<std::size_t>(sims.rows());
    const std::size_t nt = static_cast<std::size_t>(sims.cols());
    const bool source_smaller = ns <= nt;
    const std::size_t small = source_smaller ? ns : nt;
    const std::size_t large = source_smaller ? nt : ns;

    std::vector<char> used(large, 0);
    auto entry = [&](std::size_t depth, std::size_t partner) {
        const Eigen::Index i = static_cast<Eigen::Index>(source_smaller ? depth : partner);
        const Eigen::Index j = static_cast<Eigen::Index>(source_smaller ? partner : depth);
        return sims(i, j);
    };
    auto recurse = [&](auto&& self, std::size_t depth) -> double {
        if (depth == small) return 0.0;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t partner = 0; partner < large; ++partner) {
            if (used[partner]) continue;
            used[partner] = 1;
            best = std::max(best, entry(depth, partner) + self(self, depth + 1));
            used[partner] = 0;
        }
        return best;
    };
    return recurse(recurse, 0);
}

inline double brute_oas(const clsts::dense_matrix& sims) {
    const double ns = static_cast<double>(sims.rows());
    const double nt = static_cast<double>(sims.cols());
    return brute_best_alignment(sims) * (ns + nt) / (2.0 * ns * nt);
}

/// Pearson via the sum-of-products identity (a different algebraic route than
/// the library's centered two-pass formula).
inline double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

/// AP from the definition: mean over positives of precision at their ranks.
inline double oracle_average_precision(const std::vector<bool>& labels) {
    double positives = 0, sum = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!labels[i]) continue;
        positives += 1;
        double hits = 0;
        for (std::size_t j = 0; j <= i; ++j) hits += labels[j] ? 1 : 0;
        sum += hits / static_cast<double>(i + 1);
    }
    return sum / positives;
}

/// R@P from the definition: best recall among prefixes meeting the target.
inline double oracle_recall_at_precision(const std::vector<bool>& labels, double target) {
    double total = 0;
    for (bool b : labels) total += b ? 1 : 0;
    double best = 0;
    for (std::size_t end = 1; end <= labels.size(); ++end) {
        double hits = 0;
        for (std::size_t j = 0; j < end; ++j) hits += labels[j] ? 1 : 0;
        if (hits / static_cast<double>(end) >= target) best = std::max(best, hits / total);
    }
    return best;
}

/// gas from the definition, token by token.
inline double oracle_gas(const clsts::dense_matrix& sims) {
    double forward = 0.0;
    for (Eigen::Index i = 0; i < sims.rows(); ++i) {
        double best = -2.0;
        for (Eigen::Index j = 0; j < sims.cols(); ++j) best = std::max(best, sims(i, j));
        forward += best;
    }
    forward /= static_cast<double>(sims.rows());
    double backward = 0.0;
    for (Eigen::Index j = 0; j < sims.cols(); ++j) {
        double best = -2.0;
        for (Eigen::Index i = 0; i < sims.rows(); ++i) best = std::max(best, sims(i, j));
        backward += best;
    }
    backward /= static_cast<double>(sims.cols());
    return 0.5 * (forward + backward);
}

}  // namespace test_support
