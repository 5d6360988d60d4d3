#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "tweetscope/config.hpp"

using namespace tweetscope;
namespace fs = std::filesystem;

namespace {

fs::path write_ini(const std::string& name, const std::string& body) {
    const auto dir = fs::temp_directory_path() / "tweetscope_config_test";
    fs::create_directories(dir);
    std::ofstream(dir / name) << body;
    return dir / name;
}

}  // namespace

TEST(KRange, Grammar) {
    EXPECT_EQ(parse_k_range("2..5"), (std::vector<std::size_t>{2, 3, 4, 5}));
    EXPECT_EQ(parse_k_range("2..3, 8,10"), (std::vector<std::size_t>{2, 3, 8, 10}));
    EXPECT_EQ(parse_k_range("7"), (std::vector<std::size_t>{7}));
    EXPECT_THROW(parse_k_range("5..2"), UsageError);
    EXPECT_THROW(parse_k_range("two"), UsageError);
}

TEST(Config, SampleFileResolvesRelativePaths) {
    const auto c = load_config(fs::path(TS_SOURCE_DIR) / "data" / "sample" / "sample.ini");
    EXPECT_EQ(c.corpus.filename(), "labeled.jsonl");
    EXPECT_TRUE(fs::exists(c.corpus));
    EXPECT_TRUE(fs::exists(c.stopwords));
    EXPECT_EQ(c.K_range, (std::vector<std::size_t>{2, 3, 4, 5, 6, 7, 8}));
    EXPECT_EQ(c.seed, 2020u);
    EXPECT_EQ(c.pca_components, 16u);
    EXPECT_EQ(c.lda.iterations, 1000);
    EXPECT_NO_THROW(validate(c));
}

TEST(Config, ValuesAndDefaults) {
    const auto p = write_ini("a.ini",
                             "[classifier]\nmodel = svm\nsvm_lambda = 0.01\n"
                             "[lda]\nalpha = 0.5\nK = 4\n"
                             "[trends]\nthemes = one, two,three,four\norigin = 2020-02-03\n"
                             "[smote]\nenabled = no\n");
    const auto c = load_config(p);
    EXPECT_EQ(c.classifier.kind, ModelKind::LinearSvm);
    EXPECT_EQ(c.classifier.svm.lambda, 0.01);
    EXPECT_EQ(*c.lda.alpha, 0.5);
    EXPECT_EQ(c.themes, (std::vector<std::string>{"one", "two", "three", "four"}));
    EXPECT_EQ(format_date(c.week_origin), "2020-02-03");
    EXPECT_FALSE(c.smote.enabled);
    EXPECT_EQ(c.out, p.parent_path() / "out");
    EXPECT_EQ(c.split.test_frac, 0.15);
    EXPECT_NO_THROW(validate(c));
}

TEST(Config, Errors) {
    EXPECT_THROW(load_config("/nonexistent/run.ini"), UsageError);
    EXPECT_THROW(load_config(write_ini("b.ini", "[lda]\nK = many\n")), UsageError);
    EXPECT_THROW(load_config(write_ini("c.ini", "[classifier]\nmodel = forest\n")), UsageError);
    EXPECT_THROW(load_config(write_ini("d.ini", "[smote]\nenabled = maybe\n")), UsageError);
    EXPECT_THROW(validate(load_config(write_ini("e.ini", "[paths]\ncorpus = nothere.jsonl\n"))), UsageError);
    EXPECT_THROW(validate(load_config(write_ini("f.ini", "[lda]\nK = 3\n[trends]\nthemes = a,b\n"))), UsageError);
}
