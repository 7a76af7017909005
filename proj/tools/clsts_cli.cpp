// clsts: cross-lingual sentence similarity toolkit.
//
// Subcommands compose the library into reproducible pipelines: train and
// evaluate translation matrices, score sentence pairs, run STS benchmark
// evaluation, mine parallel sentences from comparable documents, and rank
// plagiarism fragment candidates. Data goes to stdout, diagnostics to stderr.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clsts/clsts.hpp"

namespace {

std::string fmt_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string fmt_score(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string fmt_loss(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

struct space_args {
    std::string source_emb;
    std::string target_emb;
    std::string source_lang = "src";
    std::string target_lang = "tgt";
    std::size_t max_vocab = 0;
};

void add_space_options(CLI::App* cmd, space_args& args) {
    cmd->add_option("--source-emb", args.source_emb, "Source-language embedding file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--target-emb", args.target_emb, "Target-language embedding file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--source-lang", args.source_lang, "Source language tag")
        ->capture_default_str();
    cmd->add_option("--target-lang", args.target_lang, "Target language tag")
        ->capture_default_str();
    cmd->add_option("--max-vocab", args.max_vocab,
                    "Keep only the first N words of each embedding file (0 = all)")
        ->capture_default_str();
}

std::shared_ptr<const clsts::embedding_space> load_space(const std::string& path,
                                                         const std::string& lang,
                                                         std::size_t max_vocab) {
    return std::make_shared<clsts::embedding_space>(
        clsts::load_embeddings(path, clsts::embedding_format::autodetect, max_vocab, lang));
}

clsts::bilingual_space load_bilingual(const space_args& args, const std::string& matrix_path) {
    auto source = load_space(args.source_emb, args.source_lang, args.max_vocab);
    auto target = load_space(args.target_emb, args.target_lang, args.max_vocab);
    return clsts::bilingual_space(std::move(source), std::move(target),
                                  clsts::load_matrix(matrix_path));
}

clsts::similarity_method parse_method(const std::string& name) {
    auto method = clsts::similarity_method_from(name);
    if (!method)
        throw clsts::domain_error("unknown method '" + name +
                                  "' (expected gr-assoc, opt-align or aggreg)");
    return *method;
}

clsts::mapping_method parse_mapping_method(const std::string& name) {
    auto method = clsts::mapping_method_from(name);
    if (!method)
        throw clsts::domain_error("unknown training method '" + name +
                                  "' (expected least-squares or adam)");
    return *method;
}

// ---- train-mapping ----------------------------------------------------------

struct train_args {
    space_args spaces;
    std::string pairs_path;
    std::string out_path;
    std::string method = "adam";
    clsts::train_options opts;
};

int run_train(const train_args& args, std::uint64_t seed) {
    auto source = load_space(args.spaces.source_emb, args.spaces.source_lang,
                             args.spaces.max_vocab);
    auto target = load_space(args.spaces.target_emb, args.spaces.target_lang,
                             args.spaces.max_vocab);
    clsts::translation_pair_set pairs(*source, *target,
                                      clsts::load_word_pairs(args.pairs_path));

    clsts::train_options opts = args.opts;
    opts.seed = seed;
    clsts::translation_matrix tm =
        clsts::train_matrix(*source, *target, pairs, parse_mapping_method(args.method), opts);
    clsts::save_matrix(tm, args.out_path);

    std::cout << "pairs_used " << pairs.size() << '\n';
    std::cout << "pairs_dropped " << pairs.dropped() << '\n';
    std::cout << "train_loss " << fmt_loss(tm.train_loss) << '\n';
    return 0;
}

// ---- eval-mapping / ablate-pairs ---------------------------------------------

struct eval_mapping_args {
    space_args spaces;
    std::string matrix_path;
    std::string test_pairs_path;
    std::vector<std::size_t> ranks{1, 5};
};

int run_eval_mapping(const eval_mapping_args& args) {
    auto source = load_space(args.spaces.source_emb, args.spaces.source_lang,
                             args.spaces.max_vocab);
    auto target = load_space(args.spaces.target_emb, args.spaces.target_lang,
                             args.spaces.max_vocab);
    clsts::translation_pair_set test(*source, *target,
                                     clsts::load_word_pairs(args.test_pairs_path));
    clsts::bilingual_space bi(source, target, clsts::load_matrix(args.matrix_path));
    auto precision = clsts::evaluate_matrix(bi, test, args.ranks);
    for (const auto& [k, value] : precision)
        std::cout << "P@" << k << ' ' << fmt_metric(value) << '\n';
    return 0;
}

struct ablate_args {
    space_args spaces;
    std::string pairs_path;
    std::string test_pairs_path;
    std::string method = "adam";
    std::vector<std::size_t> sizes{1000, 2000, 3000, 4000};
    std::vector<std::size_t> ranks{1, 5};
    clsts::train_options opts;
};

int run_ablate(const ablate_args& args, std::uint64_t seed) {
    auto source = load_space(args.spaces.source_emb, args.spaces.source_lang,
                             args.spaces.max_vocab);
    auto target = load_space(args.spaces.target_emb, args.spaces.target_lang,
                             args.spaces.max_vocab);
    auto raw = clsts::load_word_pairs(args.pairs_path);
    clsts::translation_pair_set test(*source, *target,
                                     clsts::load_word_pairs(args.test_pairs_path));
    clsts::train_options opts = args.opts;
    opts.seed = seed;
    auto method = parse_mapping_method(args.method);

    for (std::size_t size : args.sizes) {
        std::vector<std::pair<std::string, std::string>> subset(
            raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(std::min(size, raw.size())));
        clsts::translation_pair_set pairs(*source, *target, subset);
        clsts::translation_matrix tm = clsts::train_matrix(*source, *target, pairs, method, opts);
        clsts::bilingual_space bi(source, target, std::move(tm));
        auto precision = clsts::evaluate_matrix(bi, test, args.ranks);
        std::cout << size;
        for (const auto& [k, value] : precision)
            std::cout << " P@" << k << ' ' << fmt_metric(value);
        std::cout << '\n';
    }
    return 0;
}

// ---- score -------------------------------------------------------------------

struct score_args {
    space_args spaces;
    std::string matrix_path;
    std::string method = "opt-align";
    std::string text_a;
    std::string text_b;
    std::string pairs_tsv;
};

int run_score(const score_args& args, std::size_t jobs) {
    if (args.pairs_tsv.empty() && args.text_a.empty() && args.text_b.empty())
        throw clsts::domain_error("provide --text-a/--text-b or --pairs-tsv");
    clsts::bilingual_space bi = load_bilingual(args.spaces, args.matrix_path);
    auto method = parse_method(args.method);

    std::vector<std::pair<std::string, std::string>> pairs;
    if (!args.pairs_tsv.empty()) {
        std::ifstream in(args.pairs_tsv, std::ios::binary);
        if (!in) throw clsts::io_error("cannot open pair file: " + args.pairs_tsv);
        std::string raw;
        std::size_t line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            std::string_view line = clsts::detail::strip_cr(raw);
            if (line.empty()) continue;
            auto fields = clsts::detail::split_tabs(line);
            if (fields.size() < 2)
                throw clsts::parse_error("expected at least two tab-separated sentences", line_no);
            pairs.emplace_back(std::string(fields[0]), std::string(fields[1]));
        }
    } else {
        pairs.emplace_back(args.text_a, args.text_b);
    }

    struct outcome {
        bool ok = false;
        double value = 0.0;
        std::size_t oov_source = 0, oov_target = 0;
    };
    std::vector<outcome> results(pairs.size());
    clsts::detail::parallel_for(pairs.size(), jobs, [&](std::size_t i) {
        try {
            results[i] = {true, clsts::score_pair(bi, pairs[i].first, pairs[i].second, method).value,
                          0, 0};
        } catch (const clsts::empty_input_error& e) {
            results[i] = {false, 0.0, e.oov_source(), e.oov_target()};
        }
    });
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].ok) {
            std::cout << fmt_score(results[i].value) << '\n';
        } else {
            std::cout << "NA\n";
            std::cerr << "pair " << i << ": unscoreable (oov_source=" << results[i].oov_source
                      << ", oov_target=" << results[i].oov_target << ")\n";
        }
    }
    return 0;
}

// ---- eval-sts ------------------------------------------------------------------

struct eval_sts_args {
    space_args spaces;
    std::string matrix_path;
    std::string dataset_path;
    std::string method = "opt-align";
};

int run_eval_sts(const eval_sts_args& args, std::size_t jobs) {
    clsts::bilingual_space bi = load_bilingual(args.spaces, args.matrix_path);
    clsts::sts_dataset ds = clsts::load_sts_dataset(args.dataset_path);
    std::vector<std::size_t> unscored;
    double rho = clsts::evaluate_sts(bi, ds, parse_method(args.method), jobs, &unscored);
    for (std::size_t idx : unscored)
        std::cerr << "pair " << idx << ": unscoreable, scored 0\n";
    std::cout << "pearson " << fmt_metric(rho) << '\n';
    return 0;
}

// ---- mine ----------------------------------------------------------------------

struct mine_args {
    space_args spaces;
    std::string matrix_path;
    std::string source_doc;
    std::string target_doc;
    std::string gold_path;
    std::string pairs_out;
    std::string method = "opt-align";
    std::optional<double> tau;
};

void write_mined_pairs(std::ostream& out, const std::vector<clsts::mined_pair>& pairs) {
    for (const auto& p : pairs)
        out << p.index_s << '\t' << p.index_t << '\t' << fmt_score(p.score) << '\n';
}

int run_mine(const mine_args& args, std::size_t jobs) {
    clsts::bilingual_space bi = load_bilingual(args.spaces, args.matrix_path);
    clsts::comparable_pair cp;
    cp.doc_s = clsts::load_sentences(args.source_doc);
    cp.doc_t = clsts::load_sentences(args.target_doc);
    if (!args.gold_path.empty())
        cp.gold_alignments =
            clsts::load_gold_alignments(args.gold_path, cp.doc_s.size(), cp.doc_t.size());

    clsts::mining_config cfg;
    cfg.method = parse_method(args.method);
    cfg.jobs = jobs;
    // without gold the command emits pairs; an unset tau then means "all"
    cfg.tau = args.tau;
    if (!cfg.tau && args.gold_path.empty()) cfg.tau = -1.0;
    clsts::mining_result result = clsts::mine_parallel(bi, cp, cfg);

    if (!args.pairs_out.empty()) {
        std::ofstream out(args.pairs_out, std::ios::binary);
        if (!out) throw clsts::io_error("cannot open for writing: " + args.pairs_out);
        write_mined_pairs(out, result.above_threshold);
    }
    if (result.labeled) {
        std::cout << "AP " << fmt_metric(clsts::average_precision(result.candidates)) << '\n';
        std::cout << "R@90 " << fmt_metric(clsts::recall_at_precision(result.candidates, 0.9))
                  << '\n';
        std::cout << "R@80 " << fmt_metric(clsts::recall_at_precision(result.candidates, 0.8))
                  << '\n';
    } else if (args.pairs_out.empty()) {
        write_mined_pairs(std::cout, result.above_threshold);
    }
    return 0;
}

// ---- plagiarism -----------------------------------------------------------------

struct plagiarism_args {
    space_args spaces;
    std::string matrix_path;
    std::string suspicious_path;
    std::vector<std::string> source_paths;
    std::string gold_path;
    std::string method = "opt-align";
    std::size_t window = 5;
    std::size_t stride = 1;
    std::vector<std::size_t> ks{1, 5, 10, 20};
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw clsts::io_error("cannot open document: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

int run_plagiarism(const plagiarism_args& args, std::size_t jobs) {
    clsts::bilingual_space bi = load_bilingual(args.spaces, args.matrix_path);
    clsts::fragmented_doc suspicious =
        clsts::segment_document(read_file(args.suspicious_path),
                                std::filesystem::path(args.suspicious_path).filename().string(),
                                args.window, args.stride);
    std::vector<clsts::fragmented_doc> sources;
    sources.reserve(args.source_paths.size());
    for (const auto& path : args.source_paths)
        sources.push_back(clsts::segment_document(
            read_file(path), std::filesystem::path(path).filename().string(), args.window,
            args.stride));

    std::size_t k_max = 1;
    for (std::size_t k : args.ks) k_max = std::max(k_max, k);
    auto retrievals =
        clsts::rank_fragments(bi, suspicious, sources, parse_method(args.method), k_max, jobs);

    if (!args.gold_path.empty()) {
        auto gold = clsts::load_plagiarism_gold(args.gold_path);
        for (std::size_t k : args.ks)
            std::cout << "R@" << k << ' '
                      << fmt_metric(clsts::char_recall_at_k(retrievals, suspicious, gold, k))
                      << '\n';
    } else {
        for (std::size_t fi = 0; fi < retrievals.size(); ++fi)
            for (const auto& r : retrievals[fi])
                std::cout << fi << '\t' << r.doc_id << '\t' << r.fragment_index << '\t'
                          << fmt_score(r.score) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cross-lingual sentence similarity toolkit"};
    app.set_config("--config", "", "Read options from a config file (flags override)");
    app.require_subcommand(1);

    std::uint64_t seed = 42;
    std::size_t jobs = 1;
    app.add_option("--seed", seed, "Seed for stochastic training")->capture_default_str();
    app.add_option("--jobs", jobs, "Worker threads for batch scoring")->capture_default_str();

    train_args train;
    auto* train_cmd =
        app.add_subcommand("train-mapping", "Train a translation matrix from word pairs");
    train_cmd->fallthrough();
    add_space_options(train_cmd, train.spaces);
    train_cmd->add_option("--pairs", train.pairs_path, "Word translation pairs (TSV)")
        ->required()
        ->check(CLI::ExistingFile);
    train_cmd->add_option("--out", train.out_path, "Output matrix file")->required();
    train_cmd->add_option("--method", train.method, "least-squares or adam")
        ->capture_default_str();
    train_cmd->add_option("--lr", train.opts.learning_rate, "Adam step size")
        ->capture_default_str();
    train_cmd->add_option("--batch", train.opts.batch_size, "Adam batch size")
        ->capture_default_str();
    train_cmd->add_option("--epochs", train.opts.epochs, "Adam epochs")->capture_default_str();
    train_cmd->add_option("--ridge", train.opts.ridge, "Least-squares ridge term")
        ->capture_default_str();

    eval_mapping_args eval_mapping;
    auto* eval_mapping_cmd =
        app.add_subcommand("eval-mapping", "Precision@k of a trained matrix on test pairs");
    eval_mapping_cmd->fallthrough();
    add_space_options(eval_mapping_cmd, eval_mapping.spaces);
    eval_mapping_cmd->add_option("--matrix", eval_mapping.matrix_path, "Matrix file")
        ->required()
        ->check(CLI::ExistingFile);
    eval_mapping_cmd
        ->add_option("--test-pairs", eval_mapping.test_pairs_path, "Held-out word pairs (TSV)")
        ->required()
        ->check(CLI::ExistingFile);
    eval_mapping_cmd->add_option("--ranks", eval_mapping.ranks, "Ranks k to report")
        ->capture_default_str();

    ablate_args ablate;
    auto* ablate_cmd = app.add_subcommand(
        "ablate-pairs", "Sweep translation-pair subset sizes and report P@k per size");
    ablate_cmd->fallthrough();
    add_space_options(ablate_cmd, ablate.spaces);
    ablate_cmd->add_option("--pairs", ablate.pairs_path, "Word translation pairs (TSV)")
        ->required()
        ->check(CLI::ExistingFile);
    ablate_cmd->add_option("--test-pairs", ablate.test_pairs_path, "Held-out word pairs (TSV)")
        ->required()
        ->check(CLI::ExistingFile);
    ablate_cmd->add_option("--sizes", ablate.sizes, "Subset sizes to sweep")
        ->capture_default_str();
    ablate_cmd->add_option("--ranks", ablate.ranks, "Ranks k to report")->capture_default_str();
    ablate_cmd->add_option("--method", ablate.method, "least-squares or adam")
        ->capture_default_str();
    ablate_cmd->add_option("--lr", ablate.opts.learning_rate, "Adam step size")
        ->capture_default_str();
    ablate_cmd->add_option("--batch", ablate.opts.batch_size, "Adam batch size")
        ->capture_default_str();
    ablate_cmd->add_option("--epochs", ablate.opts.epochs, "Adam epochs")->capture_default_str();

    score_args score;
    auto* score_cmd = app.add_subcommand("score", "Score sentence pairs");
    score_cmd->fallthrough();
    add_space_options(score_cmd, score.spaces);
    score_cmd->add_option("--matrix", score.matrix_path, "Matrix file")
        ->required()
        ->check(CLI::ExistingFile);
    score_cmd->add_option("--method", score.method, "gr-assoc, opt-align or aggreg")
        ->capture_default_str();
    auto* text_a = score_cmd->add_option("--text-a", score.text_a, "Source-language sentence");
    auto* text_b = score_cmd->add_option("--text-b", score.text_b, "Target-language sentence");
    auto* pairs_tsv =
        score_cmd->add_option("--pairs-tsv", score.pairs_tsv, "TSV of sentence pairs to score")
            ->check(CLI::ExistingFile);
    text_a->needs(text_b);
    text_b->needs(text_a);
    pairs_tsv->excludes(text_a);

    eval_sts_args eval_sts;
    auto* eval_sts_cmd =
        app.add_subcommand("eval-sts", "Pearson correlation against an STS dataset");
    eval_sts_cmd->fallthrough();
    add_space_options(eval_sts_cmd, eval_sts.spaces);
    eval_sts_cmd->add_option("--matrix", eval_sts.matrix_path, "Matrix file")
        ->required()
        ->check(CLI::ExistingFile);
    eval_sts_cmd->add_option("--dataset", eval_sts.dataset_path, "STS dataset (TSV)")
        ->required()
        ->check(CLI::ExistingFile);
    eval_sts_cmd->add_option("--method", eval_sts.method, "gr-assoc, opt-align or aggreg")
        ->capture_default_str();

    mine_args mine;
    auto* mine_cmd =
        app.add_subcommand("mine", "Mine parallel sentences from a comparable document pair");
    mine_cmd->fallthrough();
    add_space_options(mine_cmd, mine.spaces);
    mine_cmd->add_option("--matrix", mine.matrix_path, "Matrix file")
        ->required()
        ->check(CLI::ExistingFile);
    mine_cmd->add_option("--source-doc", mine.source_doc, "Source document, one sentence per line")
        ->required()
        ->check(CLI::ExistingFile);
    mine_cmd->add_option("--target-doc", mine.target_doc, "Target document, one sentence per line")
        ->required()
        ->check(CLI::ExistingFile);
    mine_cmd->add_option("--gold", mine.gold_path, "Gold alignments (index_s<TAB>index_t)")
        ->check(CLI::ExistingFile);
    double tau_value = 0.0;
    auto* tau_opt = mine_cmd->add_option("--tau", tau_value,
                                         "Emit pairs scoring at or above this threshold");
    mine_cmd->add_option("--pairs-out", mine.pairs_out, "Write thresholded pairs to this file");
    mine_cmd->add_option("--method", mine.method, "gr-assoc, opt-align or aggreg")
        ->capture_default_str();

    plagiarism_args plag;
    auto* plag_cmd = app.add_subcommand(
        "plagiarism", "Rank source fragments for each suspicious-document fragment");
    plag_cmd->fallthrough();
    add_space_options(plag_cmd, plag.spaces);
    plag_cmd->add_option("--matrix", plag.matrix_path, "Matrix file")
        ->required()
        ->check(CLI::ExistingFile);
    plag_cmd->add_option("--suspicious", plag.suspicious_path,
                         "Suspicious document, one sentence per line")
        ->required()
        ->check(CLI::ExistingFile);
    plag_cmd->add_option("--sources", plag.source_paths, "Source documents")
        ->required()
        ->check(CLI::ExistingFile);
    plag_cmd->add_option("--gold", plag.gold_path, "Gold plagiarism cases")
        ->check(CLI::ExistingFile);
    plag_cmd->add_option("--window", plag.window, "Fragment window in sentences")
        ->capture_default_str();
    plag_cmd->add_option("--stride", plag.stride, "Fragment stride in sentences")
        ->capture_default_str();
    plag_cmd->add_option("--k", plag.ks, "Retrieval depths to report")->capture_default_str();
    plag_cmd->add_option("--method", plag.method, "gr-assoc, opt-align or aggreg")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) return run_train(train, seed);
        if (*eval_mapping_cmd) return run_eval_mapping(eval_mapping);
        if (*ablate_cmd) return run_ablate(ablate, seed);
        if (*score_cmd) return run_score(score, jobs);
        if (*eval_sts_cmd) return run_eval_sts(eval_sts, jobs);
        if (*mine_cmd) {
            if (tau_opt->count() > 0) mine.tau = tau_value;
            return run_mine(mine, jobs);
        }
        if (*plag_cmd) return run_plagiarism(plag, jobs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
