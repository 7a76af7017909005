#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "clsts/embedding_space.hpp"
#include "support.hpp"

using namespace clsts;

namespace {

struct temp_file {
    std::filesystem::path path;
    explicit temp_file(const std::string& name, const std::string& content) {
        path = std::filesystem::temp_directory_path() / name;
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~temp_file() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("load word2vec text with header") {
    temp_file f("emb_w2v.txt", "2 3\ncat 1 0 0\ndog 0 1 0\n");
    auto space = load_embeddings(f.path.string());
    CHECK(space.dim() == 3);
    CHECK(space.size() == 2);
    CHECK(space.lookup("cat")->isApprox(dense_vector{{1, 0, 0}}));
}

TEST_CASE("autodetect headerless file as glove text") {
    temp_file w2v("emb_w2v2.txt", "2 3\ncat 1 0 0\ndog 0 1 0\n");
    temp_file glove("emb_glove.txt", "cat 1 0 0\ndog 0 1 0\n");
    auto a = load_embeddings(w2v.path.string());
    auto b = load_embeddings(glove.path.string());
    REQUIRE(a.size() == b.size());
    REQUIRE(a.dim() == b.dim());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.word(static_cast<Eigen::Index>(i)) == b.word(static_cast<Eigen::Index>(i)));
        CHECK(a.vectors().row(static_cast<Eigen::Index>(i)) ==
              b.vectors().row(static_cast<Eigen::Index>(i)));
    }
}

TEST_CASE("duplicate word keeps the first occurrence") {
    temp_file f("emb_dup.txt", "cat 1 0 0\ncat 9 9 9\n");
    auto space = load_embeddings(f.path.string());
    CHECK(space.size() == 1);
    CHECK(space.lookup("cat")->isApprox(dense_vector{{1, 0, 0}}));
}

TEST_CASE("max_vocab truncates in file order") {
    temp_file f("emb_trunc.txt", "a 1 0\nb 0 1\nc 1 1\n");
    auto space = load_embeddings(f.path.string(), embedding_format::autodetect, 2);
    CHECK(space.size() == 2);
    CHECK(space.row_of("a").has_value());
    CHECK(space.row_of("b").has_value());
    CHECK_FALSE(space.row_of("c").has_value());
}

TEST_CASE("loader error paths") {
    SECTION("non-numeric value carries the line number") {
        temp_file f("emb_bad.txt", "cat 1 0 0\ndog 0 x 0\n");
        try {
            load_embeddings(f.path.string());
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(e.line() == 2);
        }
    }
    SECTION("wrong field count under a word2vec header") {
        temp_file f("emb_fields.txt", "2 3\ncat 1 0 0\ndog 0 1\n");
        CHECK_THROWS_AS(load_embeddings(f.path.string()), parse_error);
    }
    SECTION("inconsistent glove dimension") {
        temp_file f("emb_dim.txt", "cat 1 0 0\ndog 0 1\n");
        CHECK_THROWS_AS(load_embeddings(f.path.string()), format_error);
    }
    SECTION("empty file") {
        temp_file f("emb_empty.txt", "");
        CHECK_THROWS_AS(load_embeddings(f.path.string()), format_error);
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(load_embeddings("/nonexistent/path/emb.txt"), io_error);
    }
    SECTION("non-finite value rejected") {
        temp_file f("emb_inf.txt", "cat inf 0 0\n");
        CHECK_THROWS_AS(load_embeddings(f.path.string()), parse_error);
    }
}

TEST_CASE("lookup falls back to lowercase and reports absence") {
    temp_file f("emb_case.txt", "cat 1 0 0\ndog 0 1 0\n");
    auto space = load_embeddings(f.path.string());
    CHECK(space.lookup("Cat")->isApprox(dense_vector{{1, 0, 0}}));
    CHECK_FALSE(space.lookup("bird").has_value());
}

TEST_CASE("nearest neighbors: exact hit, tie order, clamping") {
    temp_file f("emb_nn.txt", "cat 1 0 0\ndog 0 1 0\n");
    auto space = load_embeddings(f.path.string());

    auto top1 = space.nearest_neighbors(dense_vector{{1, 0, 0}}, 1);
    REQUIRE(top1.size() == 1);
    CHECK(top1[0].first == "cat");
    CHECK(top1[0].second == Catch::Approx(1.0));

    // equidistant query: tie broken by ascending row index
    auto tied = space.nearest_neighbors(dense_vector{{1, 1, 0}}, 2);
    REQUIRE(tied.size() == 2);
    CHECK(tied[0].first == "cat");
    CHECK(tied[1].first == "dog");
    CHECK(tied[0].second == Catch::Approx(0.70710678).margin(1e-6));
    CHECK(tied[1].second == Catch::Approx(0.70710678).margin(1e-6));

    CHECK(space.nearest_neighbors(dense_vector{{1, 2, 3}}, 10).size() == 2);
    CHECK_THROWS_AS(space.nearest_neighbors(dense_vector{{0, 0, 0}}, 1), domain_error);
}

TEST_CASE("every word is its own nearest neighbor when unique") {
    test_support::rng r(101);
    auto space = test_support::random_space(r, "xx", 40, 8);
    for (std::size_t i = 0; i < space->size(); ++i) {
        auto top = space->nearest_neighbors(
            space->vectors().row(static_cast<Eigen::Index>(i)).transpose(), 1);
        CHECK(top[0].first == space->word(static_cast<Eigen::Index>(i)));
    }
}

TEST_CASE("cosines stay within [-1, 1] with slack") {
    test_support::rng r(202);
    auto space = test_support::random_space(r, "xx", 30, 5);
    for (int trial = 0; trial < 50; ++trial) {
        auto query = test_support::random_unit_vector(r, 5) * r.uniform(0.1, 10.0);
        for (const auto& [word, cosine] : space->nearest_neighbors(query, space->size()))
            CHECK(std::abs(cosine) <= 1.0 + 1e-12);
    }
}

TEST_CASE("save/load round trip is bit-identical for text-born spaces") {
    test_support::rng r(303);
    // build a file whose components are already at <= 9 significant digits
    std::string content;
    for (int i = 0; i < 20; ++i) {
        content += "w" + std::to_string(i);
        for (int j = 0; j < 6; ++j) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " %.9g", r.uniform(-2.0, 2.0));
            content += buf;
        }
        content += '\n';
    }
    temp_file f("emb_round.txt", content);
    auto first = load_embeddings(f.path.string());

    auto saved = std::filesystem::temp_directory_path() / "emb_round_saved.txt";
    first.save(saved.string());
    auto second = load_embeddings(saved.string());
    std::filesystem::remove(saved);

    REQUIRE(second.size() == first.size());
    REQUIRE(second.dim() == first.dim());
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(first.size()); ++i) {
        CHECK(second.word(i) == first.word(i));
        for (Eigen::Index j = 0; j < first.dim(); ++j)
            CHECK(second.vectors()(i, j) == first.vectors()(i, j));  // exact
    }
}

TEST_CASE("norm cache matches row norms") {
    test_support::rng r(404);
    auto space = test_support::random_space(r, "xx", 25, 7);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(space->size()); ++i)
        CHECK(std::abs(space->norm(i) - space->vectors().row(i).norm()) < 1e-9);
}
