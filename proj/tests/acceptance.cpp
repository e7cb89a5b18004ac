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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "memguard/runner.hpp"
#include "support/cms_model.hpp"
#include "support/reference_values.hpp"

namespace fs = std::filesystem;
using namespace memguard;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects the first few failures of one criterion.
struct Check {
    std::vector<std::string> failures;
    std::string detail;

    void expect(bool ok, const std::string& what) {
        if (!ok && failures.size() < 5) failures.push_back(what);
        if (!ok && failures.size() == 5) failures.push_back("...");
    }
    void near(double got, double want, double tol, const std::string& what) {
        std::ostringstream ss;
        ss.precision(6);
        ss << what << ": got " << got << ", want " << want << " +/- " << tol;
        expect(std::abs(got - want) <= tol, ss.str());
    }
};

int g_failed = 0;

void report(int n, const std::string& title, const std::function<void(Check&)>& body) {
    Check c;
    try {
        body(c);
    } catch (const std::exception& e) {
        c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = c.failures.empty();
    if (!ok) ++g_failed;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << title;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
    for (const auto& f : c.failures) std::cout << "    " << f << "\n";
    std::cout.flush();
}

std::string fmt(double v, int precision = 3) {
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    ss.precision(precision);
    ss << v;
    return ss.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("missing " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Full 310-prompt mock run shared by criteria 7 and 8.
struct FullRun {
    fs::path dir;
    RunOutput out;
    double seconds = 0.0;
};

FullRun& full_run() {
    static FullRun run = [] {
        FullRun r;
        r.dir = fs::temp_directory_path() / "memguard_acceptance_run";
        fs::remove_all(r.dir);
        RunConfig c;
        c.out_dir = r.dir;
        c.fixed_clock = true;
        const auto t0 = Clock::now();
        r.out = run_benchmark(c);
        r.seconds = seconds_since(t0);
        return r;
    }();
    return run;
}

void criterion_1(Check& c) {
    const auto t0 = Clock::now();
    const auto weights = default_weight_configs();
    const auto s = summarize(testing::synthetic_results(1, weights), weights);
    int cells = 0;
    for (std::size_t k = 0; k < testing::kReferenceStageThs.size(); ++k) {
        const auto& row = testing::kReferenceStageThs[k];
        c.expect(s.config_names[k] == row.config, "config order " + s.config_names[k]);
        for (std::size_t st = 0; st < 3; ++st) {
            const double direct = ths(testing::kReferenceKpiMeans[st], weights[k]);
            c.near(direct, row.ths[st], 0.0005, row.config + " stage " + std::to_string(st + 1));
            c.near(s.ths_means[k][st], row.ths[st], 0.0005, row.config + " summary stage " + std::to_string(st + 1));
            ++cells;
        }
    }
    for (const auto& [name, want] : testing::kReferenceFinalStage) {
        for (std::size_t k = 0; k < weights.size(); ++k) {
            if (weights[k].name == name) {
                c.near(ths(testing::kReferenceKpiMeans[2], weights[k]), want, 0.0005, name + " final");
                ++cells;
            }
        }
    }
    // ranking by final stage, most negative first
    std::vector<std::pair<double, std::string>> ranked;
    for (std::size_t k = 0; k < weights.size(); ++k) ranked.emplace_back(s.ths_means[k][2], weights[k].name);
    std::sort(ranked.begin(), ranked.end());
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        c.expect(ranked[i].second == testing::kReferenceFinalStage[i].first, "final-stage rank " + std::to_string(i));
    }
    const double secs = seconds_since(t0);
    c.expect(secs < 1.0, "runtime " + fmt(secs) + " s");
    c.detail = std::to_string(cells) + " cells, " + fmt(secs, 4) + " s";
}

void criterion_2(Check& c) {
    for (const auto& row : testing::kReferenceStageThs) {
        c.near(delta_percent(row.ths[0], row.ths[2]), row.delta_percent, 0.2, row.config + " delta%");
    }
    c.detail = "5 rows from the rounded reference stage pairs";
}

void criterion_3(Check& c) {
    const auto weights = default_weight_configs();
    const auto s = summarize(testing::synthetic_results(1, weights), weights);
    for (std::size_t k = 0; k < 4; ++k) {
        c.near(s.trends[k].first_to_second, testing::kReferenceTrend12[k], 0.001, s.trends[k].kpi + " 1->2");
        c.near(s.trends[k].second_to_third, testing::kReferenceTrend23[k], 0.001, s.trends[k].kpi + " 2->3");
    }
    c.detail = "8 deltas";
}

void criterion_4(Check& c) {
    const auto lex = default_osr_lexicon();
    c.near(osr_score("", lex).final, 0.05, 0.0, "empty text");
    const auto sat = osr_score(
        "because therefore consequently examining considering. confidence rating category. "
        "disclaimer fiction myth legend hypothetical.",
        lex);
    c.near(sat.final, 0.95, 0.0, "saturated text");
    const auto hand = osr_score("This is due to X; therefore Y. Confidence: high.", lex);
    c.expect(hand.reasoning_raw == 2 && hand.metadata_raw == 1 && hand.disclaimer_raw == 0, "hand counts (2, 1, 0)");
    c.near(hand.final, 0.26, 1e-9, "hand-counted example");
    const auto unv = osr_score("unverified", lex);
    c.expect(unv.metadata_raw == 2, "'unverified' counts twice, got " + std::to_string(unv.metadata_raw));

    std::vector<std::string> phrases;
    for (const auto* l : {&lex.reasoning_phrases, &lex.metadata_phrases, &lex.disclaimer_phrases}) {
        phrases.insert(phrases.end(), l->begin(), l->end());
    }
    const std::vector<std::string> filler = {"the", "model", "said", "on", "a", "Tuesday", "with", "data", "and"};
    std::mt19937_64 rng(20261019);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        std::string text;
        const auto words = rng() % 40;
        for (std::uint64_t w = 0; w < words; ++w) {
            text += (rng() % 4 == 0 ? phrases[rng() % phrases.size()] : filler[rng() % filler.size()]);
            text += rng() % 7 == 0 ? ". " : " ";
        }
        const auto before = osr_score(text, lex);
        const auto after = osr_score(text + " " + phrases[rng() % phrases.size()], lex);
        c.expect(after.final >= before.final, "append decreased OSR for text " + std::to_string(i));
        c.expect(after.reasoning_raw >= before.reasoning_raw && after.metadata_raw >= before.metadata_raw &&
                     after.disclaimer_raw >= before.disclaimer_raw,
                 "append decreased a raw count for text " + std::to_string(i));
        c.expect(before.final >= 0.05 && before.final <= 0.95, "range for text " + std::to_string(i));
        ++checked;
    }
    c.detail = std::to_string(checked) + " randomized texts";
}

void criterion_5(Check& c) {
    const auto t0 = Clock::now();
    const auto lex = default_benchmark_lexicon();
    const auto all = enumerate_all(lex);
    const auto realistic_all = static_cast<std::size_t>(
        std::count_if(all.begin(), all.end(), [](const auto& p) { return p.subset == Subset::realistic; }));
    c.expect(realistic_all == 455, "realistic candidates " + std::to_string(realistic_all));
    c.expect(all.size() - realistic_all == 96, "stress candidates " + std::to_string(all.size() - realistic_all));
    const auto a = generate_benchmark(lex);
    const auto b = generate_benchmark(lex);
    std::size_t realistic = 0;
    std::size_t stress = 0;
    std::set<std::string> unique;
    for (const auto& p : a) {
        (p.subset == Subset::realistic ? realistic : stress) += 1;
        unique.insert(p.text);
    }
    c.expect(realistic == 217, "realistic " + std::to_string(realistic));
    c.expect(stress == 93, "stress " + std::to_string(stress));
    c.expect(a.size() == 310 && unique.size() == 310, "unique prompts " + std::to_string(unique.size()));
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = to_json(a[i]) == to_json(b[i]);
    c.expect(same, "two invocations differ");

    auto dup = lex;
    dup.fabricated_claims[1] = dup.fabricated_claims[0];
    bool tripped = false;
    try {
        generate_benchmark(dup);
    } catch (const Error& e) {
        tripped = std::string(e.what()).find("uniqueness") != std::string::npos;
    }
    c.expect(tripped, "forced duplicate did not trip the uniqueness assertion");
    const double secs = seconds_since(t0);
    c.expect(secs < 1.0, "runtime " + fmt(secs) + " s");
    c.detail = "455 -> 217, 96 -> 93, 310 unique, " + fmt(secs, 4) + " s";
}

void criterion_6(Check& c) {
    const auto t0 = Clock::now();
    FakeEmbedder embedder(64, 11);
    std::size_t ops = 0;
    for (std::uint64_t seed = 1; seed <= 500; ++seed) {
        const auto r = testing::run_random_sequence(seed, embedder);
        c.expect(r.ok, r.failure);
        ops += r.ops;
    }
    const double secs = seconds_since(t0);
    c.expect(secs < 30.0, "runtime " + fmt(secs) + " s");
    c.detail = "500 sequences, " + std::to_string(ops) + " ops, " + fmt(secs) + " s";
}

// 12 prompts through one agent, four of them exact repeats issued after the
// original has been flushed.
int crafted_sequence(Check& c) {
    const std::vector<std::string> texts = {
        "Explain how tidal locking shapes the orbit of a moon.",
        "Summarize the causes of the 1929 stock market crash.",
        "Describe how vaccines train the adaptive immune system.",
        "Compare bubble sort and merge sort for large inputs.",
        "Explain how tidal locking shapes the orbit of a moon.",
        "List practical steps to reduce household water use.",
        "Summarize the causes of the 1929 stock market crash.",
        "What role did the printing press play in the Reformation?",
        "Describe how vaccines train the adaptive immune system.",
        "Outline the rules of chess castling for a beginner.",
        "Compare bubble sort and merge sort for large inputs.",
        "Why do leaves change color in autumn?",
    };
    const auto agent = default_agent_config(AgentRole::frontend);
    ContinuumMemory memory(*agent.cms);
    testing::CmsModel model(*agent.cms);
    FakeEmbedder embedder(384, 0);
    MockBackend backend;
    FixedClock clock;
    int real_hits = 0;
    int model_hits = 0;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const auto index = static_cast<std::int64_t>(i + 1);
        const auto out = run_stage(agent, texts[i], index, memory, embedder, backend, clock);
        real_hits += is_hit(out.cache_event) ? 1 : 0;

        const auto q = embedder.embed(texts[i]);
        if (model.lookup(q, index)) {
            ++model_hits;
            model.flush_if_due(index);
        } else {
            model.record(CacheEntry{texts[i], q, out.raw_text, "frontend", index, index, 1}, index);
        }
        model.consolidate(index);
    }
    c.expect(model_hits == 4, "oracle forced hit count " + std::to_string(model_hits) + ", expected 4");
    c.expect(real_hits == model_hits,
             "pipeline hits " + std::to_string(real_hits) + " vs oracle " + std::to_string(model_hits));
    return real_hits;
}

void criterion_7(Check& c) {
    const auto& run = full_run();
    const auto& s = run.out.summary;
    std::int64_t total = 0;
    for (const auto& row : s.cache) {
        c.expect(row.hits + row.misses == 310,
                 to_string(row.agent) + " hits + misses = " + std::to_string(row.hits + row.misses));
        total += row.hits + row.misses;
    }
    c.expect(total == 930, "total potential calls " + std::to_string(total));
    c.expect(s.total_hits + s.total_misses == 930, "summary totals");
    for (const auto role : kPipelineRoles) {
        const auto dump = nlohmann::json::parse(slurp(run.dir / ("cache_" + to_string(role) + ".json")));
        const auto& st = dump.at("stats");
        const auto lookups = st.at("lookups").get<std::int64_t>();
        const auto accounted = st.at("mtm_hits").get<std::int64_t>() + st.at("ltm_migrations").get<std::int64_t>() +
                               st.at("misses").get<std::int64_t>();
        c.expect(lookups == 310 && accounted == 310, to_string(role) + " cache stats lookups " + std::to_string(lookups));
    }
    const int crafted = crafted_sequence(c);
    c.detail = "hits " + std::to_string(s.total_hits) + " / 930, crafted sequence hits " + std::to_string(crafted);
}

void criterion_8(Check& c) {
    const auto& run = full_run();
    c.expect(run.seconds < 60.0, "runtime " + fmt(run.seconds) + " s");
    c.expect(run.out.results.size() == 310, "results " + std::to_string(run.out.results.size()));
    c.expect(run.out.trace_envelopes == 1240, "envelopes " + std::to_string(run.out.trace_envelopes));
    std::size_t trace_lines = 0;
    {
        std::istringstream in(slurp(run.dir / "trace.jsonl"));
        std::string line;
        while (std::getline(in, line)) ++trace_lines;
    }
    c.expect(trace_lines == 1240, "trace lines " + std::to_string(trace_lines));
    for (const char* f : {"manifest.json", "results.jsonl", "summary.json", "tables/weights.csv",
                          "tables/kpi_profile.csv", "tables/kpi_trends.csv", "tables/cache_performance.csv",
                          "tables/ths_final_stage.csv", "tables/ths_per_stage.csv", "plots/ths_per_prompt.csv",
                          "plots/cumulative_hits.csv", "plots/rolling_hit_rate.csv", "plots/ths_by_config.csv",
                          "plots/cache_hit_groups.csv", "plots/ths_cdf.csv"}) {
        c.expect(fs::exists(run.dir / f) && fs::file_size(run.dir / f) > 0, std::string("missing ") + f);
    }

    // Recompute every exported THS from the exported KPIs.
    const auto weights = default_weight_configs();
    std::istringstream in(slurp(run.dir / "results.jsonl"));
    std::string line;
    std::size_t recomputed = 0;
    double osr1 = 0.0;
    double osr2 = 0.0;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        if (j.at("skipped").get<bool>()) continue;
        const auto& stages = j.at("stages");
        for (const auto& st : stages) {
            const auto k = kpi_from_json(st.at("kpi"));
            for (const auto& w : weights) {
                const double exported = st.at("ths").at(w.name).get<double>();
                c.expect(exported == ths(k, w), "THS drift for prompt " + std::to_string(j.at("prompt_id").get<int>()));
                ++recomputed;
            }
        }
        osr1 += stages.at(0).at("kpi").at("osr").get<double>();
        osr2 += stages.at(1).at("kpi").at("osr").get<double>();
        ++n;
    }
    c.expect(n > 0, "no evaluated prompts");
    if (n > 0) {
        osr1 /= static_cast<double>(n);
        osr2 /= static_cast<double>(n);
    }
    c.expect(osr2 > osr1, "mean stage-2 OSR " + fmt(osr2) + " <= stage-1 " + fmt(osr1));
    c.detail = fmt(run.seconds, 2) + " s, 1240 envelopes, " + std::to_string(recomputed) +
               " THS values recomputed, OSR " + fmt(osr1) + " -> " + fmt(osr2);
}

void criterion_9(Check& c) {
    const std::vector<double> x = {0.3, 0.1, 0.9, 0.5, 0.7};
    c.near(stats::pearson(x, x), 1.0, 1e-12, "pearson identical");
    c.near(stats::spearman(x, x), 1.0, 1e-12, "spearman identical");
    const std::vector<double> up = {1, 2, 3, 4, 5};
    const std::vector<double> down = {9, 7, 4, 2, 1};
    c.near(stats::spearman(up, down), -1.0, 1e-12, "spearman reversed");
    const std::vector<double> flat = {2, 2, 2, 2, 2};
    bool p_err = false;
    bool s_err = false;
    try {
        stats::pearson(up, flat);
    } catch (const Error&) {
        p_err = true;
    }
    try {
        stats::spearman(flat, up);
    } catch (const Error&) {
        s_err = true;
    }
    c.expect(p_err, "pearson on constant series did not error");
    c.expect(s_err, "spearman on constant series did not error");
}

void criterion_10(Check& c) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto random_kpi = [&] { return KpiVector{u(rng), u(rng), u(rng), u(rng), 0.05 + 0.9 * u(rng)}; };
    auto random_w = [&] { return WeightConfig{"r", u(rng), u(rng), u(rng), u(rng), u(rng) + 1e-3}; };

    // Exact for scale factors whose products are representable.
    int exact = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto k = random_kpi();
        const auto w = random_w();
        for (const double s : {0.25, 0.5, 2.0, 4.0, 1024.0}) {
            const WeightConfig ws{"s", w.w1 * s, w.w2 * s, w.w3 * s, w.w4 * s, w.w5 * s};
            c.expect(ths(k, ws) == ths(k, w), "rescale by " + fmt(s) + " changed THS");
            ++exact;
        }
        for (const auto& p : default_weight_configs()) {
            const WeightConfig ps{"s", p.w1 * 8, p.w2 * 8, p.w3 * 8, p.w4 * 8, p.w5 * 8};
            c.expect(ths(k, ps) == ths(k, p), p.name + " x8 changed THS");
        }
    }
    // Arbitrary factors round the scaled weights themselves; the result moves
    // by at most a few ulps.
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto k = random_kpi();
        const auto w = random_w();
        const double s = 0.1 + 10.0 * u(rng);
        const WeightConfig ws{"s", w.w1 * s, w.w2 * s, w.w3 * s, w.w4 * s, w.w5 * s};
        const double a = ths(k, w);
        const double b = ths(k, ws);
        worst = std::max(worst, std::abs(a - b));
        c.expect(std::abs(a - b) <= 1e-14, "rescale by " + fmt(s, 6) + " moved THS by " + std::to_string(a - b));
    }

    // w5 = 0 against a separate four-term formula.
    int four = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto k = random_kpi();
        auto w = random_w();
        w.w5 = 0.0;
        const double w_sum = w.w1 + w.w2 + w.w3 + w.w4;
        const double expected = (w.w1 * k.fcd - w.w2 * k.fgr - w.w3 * k.fdf - w.w4 * k.ecs) / (3.0 * w_sum);
        c.expect(ths(k, w) == expected, "w5 = 0 differs from four-term formula at vector " + std::to_string(i));
        ++four;
    }
    std::ostringstream worst_s;
    worst_s << worst;
    c.detail = std::to_string(exact) + " exact power-of-two rescalings, arbitrary-factor max drift " + worst_s.str() +
               ", " + std::to_string(four) + " four-term comparisons";
}

}  // namespace

int main() {
    report(1, "THS table reproduction", criterion_1);
    report(2, "delta% column", criterion_2);
    report(3, "KPI trend deltas", criterion_3);
    report(4, "OSR unit suite", criterion_4);
    report(5, "benchmark generation", criterion_5);
    report(6, "cache oracle equivalence", criterion_6);
    report(7, "cache accounting", criterion_7);
    report(8, "end-to-end mock run", criterion_8);
    report(9, "correlation unit suite", criterion_9);
    report(10, "THS properties", criterion_10);
    std::cout << (g_failed == 0 ? "all criteria passed" : std::to_string(g_failed) + " criteria failed") << "\n";
    return g_failed == 0 ? 0 : 1;
}
