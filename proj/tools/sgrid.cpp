#include "commands.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

using namespace sgrid;

namespace {

void add_search_flags(CLI::App* app, InferenceConfig& config, std::string& bounds)
{
    app->add_option("--pop-size", config.pop_size, "population size (>= 2N+2)")->capture_default_str();
    app->add_option("--max-gen", config.max_gen, "generations per run")->capture_default_str();
    app->add_option("--runs", config.runs, "independent runs per equation")->capture_default_str()->check(
        CLI::PositiveNumber);
    app->add_option("--seed", config.base_seed, "base seed")->capture_default_str();
    app->add_option("--bounds", bounds, "exponent search bounds lo,hi")->capture_default_str();
    app->add_option("--threads", config.threads, "worker threads (0: all cores; GRN_SGRID_THREADS caps)");
    app->add_flag("--log-front", config.log_front, "write per-generation front logs");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"S-system network inference with a bi-objective evolutionary search"};
    app.require_subcommand(1);

    cli::SimulateOptions sim;
    std::string sim_model;
    auto* simulate = app.add_subcommand("simulate", "write benchmark datasets as CSV");
    simulate->add_option("name", sim.name, "benchmark: S1, S2, S3, S4 or S4-multi");
    simulate->add_option("--model", sim_model, "benchmark-style JSON (truth, initial conditions, grid)");
    simulate->add_option("--out", sim.out, "output directory")->capture_default_str();
    simulate->add_flag("--slopes", sim.slopes, "also write five-point slope tables");

    cli::InferOptions inf;
    std::string inf_bounds = "-3,3";
    auto* infer = app.add_subcommand("infer", "run the search for each equation");
    infer->add_option("--benchmark", inf.benchmark, "benchmark name (also supplies the truth for scoring)");
    infer->add_option("--data", inf.data, "dataset CSV files (t,X1..XN)")->check(CLI::ExistingFile);
    infer->add_option("--datasets", inf.datasets, "number of benchmark datasets (S4 with >1 uses S4-multi)");
    infer->add_option("--equations", inf.equations, "1-based equations to infer (default: all)")->delimiter(',');
    infer->add_option("--out", inf.out, "output root")->capture_default_str();
    add_search_flags(infer, inf.config, inf_bounds);

    cli::EvaluateOptions ev;
    auto* evaluate = app.add_subcommand("evaluate", "score stored results against a benchmark truth");
    evaluate->add_option("dir", ev.dir, "results directory written by infer")->required();
    evaluate->add_option("--benchmark", ev.benchmark, "benchmark name (default: from the results)");
    evaluate->add_option("--data", ev.data, "datasets for the concentration error")->check(CLI::ExistingFile);

    cli::BenchOptions bench;
    std::string bench_bounds = "-3,3";
    auto* benchc = app.add_subcommand("bench", "simulate, infer and evaluate benchmarks");
    benchc->add_option("names", bench.names, "benchmarks (default: all five)");
    benchc->add_option("--out", bench.out, "output root")->capture_default_str();
    add_search_flags(benchc, bench.config, bench_bounds);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            if (!sim_model.empty())
                sim.model = sim_model;
            if (sim.name.empty() == !sim.model)
                throw CLI::ValidationError("simulate", "give exactly one of a benchmark name or --model");
            return cli::cmd_simulate(sim);
        }
        if (*infer) {
            inf.config.bounds = cli::parse_bounds(inf_bounds);
            return cli::cmd_infer(inf);
        }
        if (*evaluate)
            return cli::cmd_evaluate(ev);
        if (*benchc) {
            bench.config.bounds = cli::parse_bounds(bench_bounds);
            return cli::cmd_bench(bench);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
    return 0;
}
