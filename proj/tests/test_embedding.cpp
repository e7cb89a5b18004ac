// Copyright 2026 The memguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "memguard/embedding.hpp"

namespace memguard {
namespace {

TEST(EmbeddingVector, RejectsNonFinite) {
    EXPECT_THROW(EmbeddingVector({1.0, std::numeric_limits<double>::quiet_NaN()}), Error);
    EXPECT_THROW(EmbeddingVector({std::numeric_limits<double>::infinity()}), Error);
}

TEST(Cosine, IdentityIsOne) {
    const EmbeddingVector v({0.3, -1.2, 4.0});
    EXPECT_NEAR(cosine_similarity(v, v), 1.0, 1e-12);
}

TEST(Cosine, OrthogonalIsZero) {
    const EmbeddingVector a({1.0, 0.0, 0.0});
    const EmbeddingVector b({0.0, 1.0, 0.0});
    EXPECT_EQ(cosine_similarity(a, b), 0.0);
}

TEST(Cosine, HandComputedFortyFiveDegrees) {
    const EmbeddingVector a({1.0, 0.0});
    const auto b = normalized({1.0, 1.0});
    EXPECT_NEAR(cosine_similarity(a, b), 0.70710678118654752, 1e-9);
}

TEST(Cosine, Symmetric) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x(16), y(16);
        for (auto& v : x) v = n(rng);
        for (auto& v : y) v = n(rng);
        const EmbeddingVector a(x), b(y);
        EXPECT_EQ(cosine_similarity(a, b), cosine_similarity(b, a));
    }
}

TEST(Cosine, Errors) {
    EXPECT_THROW(cosine_similarity(EmbeddingVector({1.0, 0.0}), EmbeddingVector({1.0, 0.0, 0.0})), Error);
    EXPECT_THROW(cosine_similarity(EmbeddingVector({0.0, 0.0}), EmbeddingVector({1.0, 0.0})), Error);
}

TEST(EmbedderConfig, Validation) {
    EmbedderConfig c;
    EXPECT_NO_THROW(c.validate());
    c.dimension = 0;
    EXPECT_THROW(c.validate(), Error);
    c.dimension = 8;
    c.endpoint_url = "http://x/embed";
    EXPECT_THROW(c.validate(), Error);  // url without remote kind
    c.provider_kind = ProviderKind::remote_http;
    EXPECT_NO_THROW(c.validate());
    c.endpoint_url.clear();
    EXPECT_THROW(c.validate(), Error);
}

TEST(Tokenize, LowercasesAndSplitsOnPunctuation) {
    EXPECT_EQ(tokenize("Hello, World! it's 2024"),
              (std::vector<std::string>{"hello", "world", "it", "s", "2024"}));
    EXPECT_TRUE(tokenize(" ,;. ").empty());
}

TEST(FakeEmbedder, DeterministicAndUnitNorm) {
    const FakeEmbedder e(384, 42);
    const auto a = e.embed("The same text");
    const auto b = e.embed("The same text");
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.dimension(), 384u);
    EXPECT_NEAR(a.norm(), 1.0, 1e-12);
    EXPECT_NEAR(cosine_similarity(a, b), 1.0, 1e-12);
}

TEST(FakeEmbedder, CaseAndPunctuationInsensitive) {
    const FakeEmbedder e(64, 1);
    EXPECT_EQ(e.embed("Alpha, beta!"), e.embed("alpha beta"));
}

TEST(FakeEmbedder, SeedChangesVectors) {
    const FakeEmbedder a(384, 1);
    const FakeEmbedder b(384, 2);
    EXPECT_FALSE(a.embed("alpha beta") == b.embed("alpha beta"));
}

TEST(FakeEmbedder, EmptyTextThrows) {
    const FakeEmbedder e(32, 0);
    EXPECT_THROW(e.embed(""), Error);
    EXPECT_THROW(e.embed("   \t\n"), Error);
}

TEST(FakeEmbedder, PunctuationOnlyTextStillEmbeds) {
    const FakeEmbedder e(32, 0);
    EXPECT_NEAR(e.embed("?!").norm(), 1.0, 1e-12);
}

TEST(FakeEmbedder, TokenOverlapRanksSimilarity) {
    const FakeEmbedder e(384, 0);
    const auto base = e.embed("alpha beta gamma delta");
    const double near = cosine_similarity(base, e.embed("alpha beta gamma epsilon"));
    const double far = cosine_similarity(base, e.embed("zeta eta theta iota"));
    EXPECT_GT(near, far);
}

TEST(FakeEmbedder, MatchesBruteForceTokenAverage) {
    const FakeEmbedder e(48, 9);
    const std::string text = "red green blue green";
    std::vector<double> acc(48, 0.0);
    for (const auto& t : tokenize(text)) {
        const auto v = e.token_vector(t);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
    }
    const auto want = normalized(acc);
    const auto got = e.embed(text);
    for (std::size_t i = 0; i < 48; ++i) EXPECT_NEAR(got.values()[i], want.values()[i], 1e-12);
}

// Replacing more of the original tokens must lower similarity.
TEST(FakeEmbedder, ReplacementMonotonicity) {
    std::mt19937_64 rng(11);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const FakeEmbedder e(384, seed);
        for (int trial = 0; trial < 25; ++trial) {
            const std::size_t n = 2 + rng() % 7;  // 2..8
            std::vector<std::string> orig, repl;
            for (std::size_t i = 0; i < n; ++i) {
                orig.push_back("o" + std::to_string(trial) + "x" + std::to_string(i));
                repl.push_back("r" + std::to_string(trial) + "y" + std::to_string(i));
            }
            auto join = [](const std::vector<std::string>& v) {
                std::string s;
                for (const auto& t : v) s += t + " ";
                return s;
            };
            const auto base = e.embed(join(orig));
            double prev = 1.0 + 1e-12;
            for (std::size_t k = 0; k <= n; ++k) {
                auto mixed = orig;
                for (std::size_t i = 0; i < k; ++i) mixed[i] = repl[i];
                const double c = cosine_similarity(base, e.embed(join(mixed)));
                EXPECT_LT(c, prev) << "seed " << seed << " n " << n << " k " << k;
                prev = c;
            }
        }
    }
}

}  // namespace
}  // namespace memguard
