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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "memguard/runner.hpp"

namespace {

using namespace memguard;

struct RunFlags {
    std::string backend = "mock";
    std::size_t limit = kBenchmarkSize;
    std::optional<double> tau;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::string weights;
    std::string lexicon;
    std::string benchmark_lexicon;
    std::string agents;
    std::string trace_out;
    std::string emit_benchmark;
    std::string fixtures;
    bool fixed_clock = false;
    bool dump_embeddings = false;
    std::string generate_url;
    double generate_timeout = 120.0;
    int retries = 1;
    std::string embedder = "fake";
    std::string embed_url;
    std::string embed_model;
    std::size_t embed_dim = 384;
    std::string embed_path = "embedding";
};

RunConfig to_config(const RunFlags& f) {
    RunConfig c;
    c.backend = backend_kind_from_string(f.backend);
    c.limit = f.limit;
    c.tau = f.tau;
    c.seed = f.seed;
    c.out_dir = f.out;
    c.fixed_clock = f.fixed_clock;
    c.dump_embeddings = f.dump_embeddings;
    c.http.timeout_seconds = f.generate_timeout;
    c.http.retries = f.retries;
    if (!f.generate_url.empty()) c.http.endpoint_url = f.generate_url;

    if (f.embedder == "remote") {
        c.embedder.provider_kind = ProviderKind::remote_http;
        c.embedder.endpoint_url = f.embed_url;
        c.embedder.model_name = f.embed_model;
        c.embedder.response_path = f.embed_path;
    } else if (f.embedder != "fake") {
        throw Error("--embedder must be fake or remote");
    } else if (!f.embed_url.empty()) {
        throw Error("--embed-url needs --embedder remote");
    }
    c.embedder.dimension = f.embed_dim;

    if (!f.weights.empty()) {
        c.weights = load_weights_file(f.weights);
        c.sources.emplace_back("weights", f.weights);
    }
    if (!f.lexicon.empty()) {
        c.osr_lexicon = load_osr_lexicon_file(f.lexicon);
        c.sources.emplace_back("osr_lexicon", f.lexicon);
    }
    if (!f.benchmark_lexicon.empty()) {
        c.benchmark_lexicon = load_benchmark_lexicon_file(f.benchmark_lexicon);
        c.sources.emplace_back("benchmark_lexicon", f.benchmark_lexicon);
    }
    if (!f.agents.empty()) {
        c.agents = load_agents_file(f.agents);
        c.sources.emplace_back("agents", f.agents);
    }
    if (!f.fixtures.empty()) {
        c.fixtures_path = f.fixtures;
        c.sources.emplace_back("fixtures", f.fixtures);
    }
    if (!f.trace_out.empty()) c.trace_out = f.trace_out;
    if (!f.emit_benchmark.empty()) c.emit_benchmark = f.emit_benchmark;
    apply_env_overrides(c);
    return c;
}

void print_summary(const RunOutput& out) {
    const auto& s = out.summary;
    std::cout << "prompts: " << s.prompts_total << " (evaluated " << s.prompts_evaluated << ", skipped "
              << s.prompts_skipped << ")\n";
    for (const auto& row : s.cache) {
        std::cout << "  " << to_string(row.agent) << ": hits " << row.hits << ", misses " << row.misses
                  << ", hit rate " << row.hit_rate() << "\n";
    }
    std::cout << "cache hits: " << s.total_hits << " / " << (s.total_hits + s.total_misses)
              << " (rate " << s.aggregate_hit_rate << ")\n";
    std::cout << "mean THS per stage:\n";
    for (std::size_t c = 0; c < s.config_names.size(); ++c) {
        std::cout << "  " << s.config_names[c] << ": " << s.ths_means[c][0] << " / " << s.ths_means[c][1] << " / "
                  << s.ths_means[c][2];
        if (s.delta_percent_1_3[c]) std::cout << " (" << *s.delta_percent_1_3[c] << "%)";
        std::cout << "\n";
    }
    std::cout << "trace: " << out.trace_path.string() << " (" << out.trace_envelopes << " envelopes)\n";
    std::cout << "manifest: " << out.manifest_path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"memguard: multi-stage LLM review pipeline with per-agent semantic caches"};
    app.set_version_flag("--version", std::string(memguard::kVersion));
    app.require_subcommand(1);

    RunFlags f;
    auto* run = app.add_subcommand("run", "run the benchmark through the pipeline and write reports");
    run->add_option("--backend", f.backend, "generation backend")->check(CLI::IsMember({"mock", "http"}));
    run->add_option("--limit", f.limit, "number of prompts to run (1..310)")->check(CLI::Range(1, 310));
    run->add_option("--tau", f.tau, "similarity threshold for every stage cache");
    run->add_option("--seed", f.seed, "embedder seed, and inference seed where unset");
    run->add_option("--out", f.out, "output directory");
    run->add_option("--weights", f.weights, "weight configs (JSON)")->check(CLI::ExistingFile);
    run->add_option("--lexicon", f.lexicon, "OSR lexicon (JSON)")->check(CLI::ExistingFile);
    run->add_option("--benchmark-lexicon", f.benchmark_lexicon, "benchmark lexicon (JSON)")->check(CLI::ExistingFile);
    run->add_option("--agents", f.agents, "agent configs (JSON)")->check(CLI::ExistingFile);
    run->add_option("--trace-out", f.trace_out, "trace file (default OUT/trace.jsonl)");
    run->add_option("--emit-benchmark", f.emit_benchmark, "also write all 310 prompts as JSON lines");
    run->add_option("--fixtures", f.fixtures, "mock response fixtures (JSON)")->check(CLI::ExistingFile);
    run->add_flag("--fixed-clock", f.fixed_clock, "fixed timestamps and zero latencies, for reproducible output");
    run->add_flag("--dump-embeddings", f.dump_embeddings, "include embeddings in the cache dumps");
    run->add_option("--generate-url", f.generate_url, "generation endpoint (http backend)");
    run->add_option("--generate-timeout", f.generate_timeout, "seconds per generation call");
    run->add_option("--retries", f.retries, "retries per failed generation call")->check(CLI::Range(0, 1));
    run->add_option("--embedder", f.embedder, "embedding provider")->check(CLI::IsMember({"fake", "remote"}));
    run->add_option("--embed-url", f.embed_url, "embedding endpoint (remote embedder)");
    run->add_option("--embed-model", f.embed_model, "embedding model name (remote embedder)");
    run->add_option("--embed-dim", f.embed_dim, "embedding dimension");
    run->add_option("--embed-path", f.embed_path, "dotted path to the vector in the embedding response");

    std::string bench_out;
    std::string bench_lexicon;
    auto* bench = app.add_subcommand("benchmark", "write the 310-prompt benchmark as JSON lines");
    bench->add_option("--out", bench_out, "output file")->required();
    bench->add_option("--benchmark-lexicon", bench_lexicon, "benchmark lexicon (JSON)")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto config = to_config(f);
            const auto out = run_benchmark(config, &std::cerr);
            print_summary(out);
        } else if (bench->parsed()) {
            const auto lex = bench_lexicon.empty() ? default_benchmark_lexicon()
                                                   : load_benchmark_lexicon_file(bench_lexicon);
            const auto prompts = generate_benchmark(lex);
            write_benchmark_jsonl(prompts, bench_out);
            std::cout << "wrote " << prompts.size() << " prompts to " << bench_out << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
