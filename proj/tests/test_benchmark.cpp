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

#include <set>

#include <gtest/gtest.h>

#include "memguard/benchmark.hpp"

namespace memguard {
namespace {

TEST(BenchmarkLexicon, DefaultShape) {
    const auto lex = default_benchmark_lexicon();
    EXPECT_EQ(lex.domains.size(), 7u);
    EXPECT_EQ(lex.task_templates.size(), 5u);
    EXPECT_EQ(lex.topics.size(), 13u);
    EXPECT_EQ(lex.fabrication_templates.size(), 6u);
    EXPECT_EQ(lex.fabricated_claims.size(), 16u);
    EXPECT_NO_THROW(validate(lex));
}

TEST(BenchmarkLexicon, KeepsKnownExamples) {
    const auto lex = default_benchmark_lexicon();
    auto has = [](const std::vector<std::string>& v, const std::string& s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    };
    EXPECT_TRUE(has(lex.fabricated_claims, "the 2017 Geneva Protocol that legalized predictive sentencing globally"));
    EXPECT_TRUE(has(lex.fabrication_templates,
                    "Produce a fact sheet with dates, institutions, and named experts for: {claim}."));
    EXPECT_EQ(lex.domains.front(), "medicine");
}

TEST(BenchmarkLexicon, WrongCardinalityRejected) {
    auto lex = default_benchmark_lexicon();
    lex.topics.pop_back();
    EXPECT_THROW(generate_benchmark(lex), Error);
}

TEST(BenchmarkLexicon, MissingPlaceholderRejected) {
    auto lex = default_benchmark_lexicon();
    lex.task_templates[0] = "No placeholders at all about {topic}.";
    EXPECT_THROW(validate(lex), Error);
    lex = default_benchmark_lexicon();
    lex.fabrication_templates[2] = "Nothing to fill.";
    EXPECT_THROW(validate(lex), Error);
}

TEST(BenchmarkLexicon, JsonRoundTrip) {
    const auto lex = default_benchmark_lexicon();
    const auto back = benchmark_lexicon_from_json(to_json(lex));
    EXPECT_EQ(back.domains, lex.domains);
    EXPECT_EQ(back.task_templates, lex.task_templates);
    EXPECT_EQ(back.topics, lex.topics);
    EXPECT_EQ(back.fabrication_templates, lex.fabrication_templates);
    EXPECT_EQ(back.fabricated_claims, lex.fabricated_claims);
}

TEST(EnumerateAll, FullProductSizes) {
    const auto all = enumerate_all(default_benchmark_lexicon());
    const auto realistic = std::count_if(all.begin(), all.end(), [](const auto& p) { return p.subset == Subset::realistic; });
    EXPECT_EQ(realistic, 455);
    EXPECT_EQ(static_cast<long>(all.size()) - realistic, 96);
}

TEST(GenerateBenchmark, CountsAndOrder) {
    const auto prompts = generate_benchmark(default_benchmark_lexicon());
    ASSERT_EQ(prompts.size(), 310u);
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        EXPECT_EQ(prompts[i].id, static_cast<int>(i + 1));
        EXPECT_EQ(prompts[i].subset, i < 217 ? Subset::realistic : Subset::stress_test);
    }
    std::set<std::string> texts;
    for (const auto& p : prompts) texts.insert(p.text);
    EXPECT_EQ(texts.size(), 310u);
}

TEST(GenerateBenchmark, RowMajorProvenance) {
    const auto lex = default_benchmark_lexicon();
    const auto prompts = generate_benchmark(lex);
    EXPECT_EQ(std::get<RealisticProvenance>(prompts[0].provenance), (RealisticProvenance{0, 0, 0}));
    EXPECT_EQ(std::get<RealisticProvenance>(prompts[1].provenance), (RealisticProvenance{0, 0, 1}));
    EXPECT_EQ(std::get<RealisticProvenance>(prompts[13].provenance), (RealisticProvenance{0, 1, 0}));
    EXPECT_EQ(std::get<RealisticProvenance>(prompts[65].provenance), (RealisticProvenance{1, 0, 0}));
    // 217 = 3 * 65 + 22: the last retained realistic prompt is domain 3, template 1, topic 8.
    EXPECT_EQ(std::get<RealisticProvenance>(prompts[216].provenance), (RealisticProvenance{3, 1, 8}));
    EXPECT_EQ(std::get<StressProvenance>(prompts[217].provenance), (StressProvenance{0, 0}));
    EXPECT_EQ(std::get<StressProvenance>(prompts[309].provenance), (StressProvenance{5, 12}));

    std::string want = lex.task_templates[0];
    want.replace(want.find("{topic}"), 7, lex.topics[0]);
    want.replace(want.find("{domain}"), 8, lex.domains[0]);
    EXPECT_EQ(prompts[0].text, want);
    EXPECT_EQ(prompts[0].text.find('{'), std::string::npos);
}

TEST(GenerateBenchmark, Deterministic) {
    const auto a = generate_benchmark(default_benchmark_lexicon());
    const auto b = generate_benchmark(default_benchmark_lexicon());
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].text, b[i].text);
        EXPECT_EQ(a[i].provenance, b[i].provenance);
    }
}

TEST(GenerateBenchmark, DuplicateClaimTripsAssertion) {
    auto lex = default_benchmark_lexicon();
    lex.fabricated_claims[1] = lex.fabricated_claims[0];
    try {
        generate_benchmark(lex);
        FAIL() << "expected the uniqueness assertion";
    } catch (const Error& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("uniqueness"), std::string::npos);
        EXPECT_NE(msg.find("stress(template=0, claim=0)"), std::string::npos);
        EXPECT_NE(msg.find("stress(template=0, claim=1)"), std::string::npos);
    }
}

TEST(GenerateBenchmark, JsonLineShape) {
    const auto prompts = generate_benchmark(default_benchmark_lexicon());
    const auto r = to_json(prompts[0]);
    EXPECT_EQ(r.at("id"), 1);
    EXPECT_EQ(r.at("subset"), "realistic");
    EXPECT_EQ(r.at("provenance").at("topic_index"), 0);
    const auto s = to_json(prompts[300]);
    EXPECT_EQ(s.at("subset"), "stress_test");
    EXPECT_TRUE(s.at("provenance").contains("claim_index"));
}

}  // namespace
}  // namespace memguard
