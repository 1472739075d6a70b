#include "commands.hpp"

#include "sgrid/errors.hpp"
#include "sgrid/io.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <fmt/core.h>

namespace sgrid::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Inputs {
    std::string label;
    std::vector<TimeSeriesDataset> datasets;
    std::optional<SSystemModel> truth;
};

std::string opt(const std::optional<double>& v)
{
    return v ? fmt::format("{:.3f}", *v) : std::string("  -  ");
}

std::vector<TimeSeriesDataset> read_csvs(const std::vector<fs::path>& paths)
{
    std::vector<TimeSeriesDataset> out;
    for (const auto& p : paths)
        out.push_back(io::read_dataset_csv(p));
    for (const auto& ds : out)
        if (ds.genes() != out.front().genes())
            throw ConfigError("datasets disagree on the number of genes (" + std::to_string(ds.genes()) + " vs "
                              + std::to_string(out.front().genes()) + ")");
    return out;
}

// `S4` with more than one dataset means the multi-start protocol.
BenchmarkSpec resolve_benchmark(const std::string& name, std::size_t datasets)
{
    if (name == "S4" && datasets > 1)
        return benchmark("S4-multi");
    return benchmark(name);
}

std::vector<TimeSeriesDataset> benchmark_datasets(const BenchmarkSpec& spec, std::size_t count)
{
    auto ds = simulate_benchmark(spec);
    if (count > ds.size())
        throw ConfigError(spec.name + " provides " + std::to_string(ds.size()) + " dataset(s), "
                          + std::to_string(count) + " requested");
    if (count > 0)
        ds.resize(count);
    return ds;
}

Inputs load_inputs(const InferOptions& opts)
{
    Inputs in;
    if (!opts.data.empty()) {
        in.datasets = read_csvs(opts.data);
        in.label = "custom";
        if (!opts.benchmark.empty()) {
            const auto spec = resolve_benchmark(opts.benchmark, in.datasets.size());
            in.label = spec.name;
            in.truth = spec.truth;
        }
    } else if (!opts.benchmark.empty()) {
        const auto spec = resolve_benchmark(opts.benchmark, opts.datasets);
        in.label = spec.name;
        in.truth = spec.truth;
        in.datasets = benchmark_datasets(spec, opts.datasets);
    } else {
        throw ConfigError("infer needs --benchmark or --data");
    }
    if (in.truth && in.truth->genes() != in.datasets.front().genes())
        throw ConfigError("data have N=" + std::to_string(in.datasets.front().genes()) + " but " + in.label
                          + " has N=" + std::to_string(in.truth->genes()));
    return in;
}

InferenceConfig with_equations(InferenceConfig config, const std::vector<std::size_t>& one_based, std::size_t genes)
{
    config.equations.clear();
    for (auto e : one_based) {
        if (e < 1 || e > genes)
            throw ConfigError("equation " + std::to_string(e) + " is outside 1.." + std::to_string(genes));
        config.equations.push_back(e - 1);
    }
    return config;
}

std::size_t report_failures(const InferenceOutput& output)
{
    std::size_t failed = 0;
    for (const auto& er : output.equations)
        for (const auto& rec : er.runs)
            if (!rec.error.empty()) {
                ++failed;
                fmt::print(stderr, "eq{} run {} (seed {}) failed: {}\n", er.equation + 1, rec.run, rec.seed, rec.error);
            }
    return failed;
}

std::string format_report(const EvaluationReport& rep, const InferenceConfig& config)
{
    std::ostringstream os;
    os << fmt::format("{}: {} run(s), PopSize {}, MaxGen {}\n", rep.label, config.runs, config.pop_size,
                      config.max_gen);
    os << fmt::format("{:>4} {:>8} {:>9} {:>6} {:>6} {:>7} {:>9}\n", "eq", "success", "selected", "Sn", "Sp",
                      "failed", "time[s]");
    for (const auto& s : rep.equations)
        os << fmt::format("{:>4} {:>8.2f} {:>9.2f} {:>6} {:>6} {:>7} {:>9.2f}\n", s.equation + 1, s.success_rate(),
                          s.selected_success_rate(), opt(s.rates.sensitivity), opt(s.rates.specificity),
                          s.failed_runs, s.seconds);
    os << fmt::format("mean success {:.2f}, Sn {}, Sp {}, wall {:.2f}s\n", rep.success_rate, opt(rep.rates.sensitivity),
                      opt(rep.rates.specificity), rep.seconds);
    return os.str();
}

// Summary without a ground truth: front sizes and chosen connection counts.
json summary_without_truth(const InferenceOutput& output, double seconds)
{
    json per_eq = json::array();
    for (const auto& er : output.equations) {
        json ks = json::array();
        json sizes = json::array();
        std::size_t failed = 0;
        double t = 0.0;
        for (const auto& rec : er.runs) {
            t += rec.seconds;
            sizes.push_back(rec.front.size());
            ks.push_back(rec.selected ? json(rec.selected->objectives.k) : json(nullptr));
            failed += rec.error.empty() ? 0 : 1;
        }
        per_eq.push_back(json{{"equation", er.equation + 1},
                              {"runs", er.runs.size()},
                              {"failed_runs", failed},
                              {"front_sizes", sizes},
                              {"selected_k", ks},
                              {"success_rate", nullptr},
                              {"wall_time_s", t}});
    }
    return json{{"benchmark", output.label},
                {"per_equation", per_eq},
                {"success_rate", nullptr},
                {"Sn", nullptr},
                {"Sp", nullptr},
                {"wall_time_s", seconds}};
}

} // namespace

SearchBounds parse_bounds(const std::string& text)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw ConfigError("--bounds expects lo,hi (got '" + text + "')");
    SearchBounds b;
    try {
        std::size_t used = 0;
        b.lower = std::stod(text.substr(0, comma), &used);
        if (used != comma)
            throw std::invalid_argument("trailing");
        const std::string hi = text.substr(comma + 1);
        b.upper = std::stod(hi, &used);
        if (used != hi.size())
            throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
        throw ConfigError("--bounds expects two numbers lo,hi (got '" + text + "')");
    }
    if (!std::isfinite(b.lower) || !std::isfinite(b.upper) || !(b.lower < b.upper))
        throw ConfigError("--bounds needs finite lo < hi");
    return b;
}

int cmd_simulate(const SimulateOptions& opts)
{
    BenchmarkSpec spec;
    if (opts.model)
        spec = io::benchmark_from_json(io::read_json(*opts.model));
    else
        spec = benchmark(opts.name);
    spec.validate();

    fs::create_directories(opts.out);
    for (const auto& ds : simulate_benchmark(spec)) {
        const fs::path path = opts.out / (ds.label + ".csv");
        io::write_dataset_csv(path, ds);
        fmt::print("{}: {} samples x {} genes\n", path.string(), ds.samples(), ds.genes());
        if (opts.slopes) {
            const fs::path sp = opts.out / (ds.label + "_slopes.csv");
            io::write_derivatives_csv(sp, five_point_derivatives(ds));
            fmt::print("{}: {} samples\n", sp.string(), ds.samples());
        }
    }
    return 0;
}

int cmd_infer(const InferOptions& opts)
{
    const auto in = load_inputs(opts);
    const auto config = with_equations(opts.config, opts.equations, in.datasets.front().genes());

    const auto t0 = std::chrono::steady_clock::now();
    const auto output = infer(in.datasets, config, in.label);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path dir = opts.out / in.label;
    write_inference(dir, output);

    if (in.truth) {
        auto rep = evaluate(output, *in.truth, in.datasets);
        rep.seconds = wall;
        io::write_json_atomic(dir / "summary.json", summary_json(rep));
        fmt::print("{}", format_report(rep, output.config));
    } else {
        io::write_json_atomic(dir / "summary.json", summary_without_truth(output, wall));
        for (const auto& er : output.equations)
            for (const auto& rec : er.runs)
                if (rec.selected)
                    fmt::print("eq{} run {}: k={} J={:.6g}\n", er.equation + 1, rec.run, rec.selected->objectives.k,
                               rec.selected->objectives.J);
    }
    fmt::print("results in {}\n", dir.string());
    return report_failures(output) == 0 ? 0 : 1;
}

int cmd_evaluate(const EvaluateOptions& opts)
{
    const auto output = read_inference(opts.dir);
    const std::string name = opts.benchmark.empty() ? output.label : opts.benchmark;
    const auto spec = resolve_benchmark(name, output.datasets);
    if (spec.truth.genes() != output.genes)
        throw DomainError("results in '" + opts.dir.string() + "' have N=" + std::to_string(output.genes) + " but "
                          + spec.name + " has N=" + std::to_string(spec.truth.genes()));

    const auto datasets =
        opts.data.empty() ? benchmark_datasets(spec, std::max<std::size_t>(1, output.datasets)) : read_csvs(opts.data);
    auto rep = evaluate(output, spec.truth, datasets);
    rep.label = spec.name;
    io::write_json_atomic(opts.dir / "evaluation.json", evaluation_json(output, rep, spec.truth));
    fmt::print("{}", format_report(rep, output.config));
    fmt::print("wrote {}\n", (opts.dir / "evaluation.json").string());
    return report_failures(output) == 0 ? 0 : 1;
}

int cmd_bench(const BenchOptions& opts)
{
    std::vector<std::string> names = opts.names;
    if (names.empty())
        names = benchmark_names();
    std::vector<BenchmarkSpec> specs;
    for (const auto& n : names)
        specs.push_back(benchmark(n)); // fail before any work on a bad name

    fs::create_directories(opts.out);
    json summaries = json::array();
    json failures = json::array();
    std::string text;
    for (const auto& spec : specs) {
        try {
            const auto datasets = simulate_benchmark(spec);
            const auto t0 = std::chrono::steady_clock::now();
            const auto output = infer(datasets, opts.config, spec.name);
            const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const fs::path dir = opts.out / spec.name;
            write_inference(dir, output);
            auto rep = evaluate(output, spec.truth, datasets);
            rep.seconds = wall;
            const json summary = summary_json(rep);
            io::write_json_atomic(dir / "summary.json", summary);
            io::write_json_atomic(dir / "evaluation.json", evaluation_json(output, rep, spec.truth));
            summaries.push_back(summary);

            const std::string block = format_report(rep, output.config);
            fmt::print("{}\n", block);
            text += block + "\n";
            for (const auto& er : output.equations)
                for (const auto& rec : er.runs)
                    if (!rec.error.empty())
                        failures.push_back(json{{"benchmark", spec.name},
                                                {"equation", er.equation + 1},
                                                {"run", rec.run},
                                                {"error", rec.error}});
        } catch (const std::exception& ex) {
            failures.push_back(json{{"benchmark", spec.name}, {"error", ex.what()}});
            fmt::print(stderr, "{}: {}\n", spec.name, ex.what());
        }
    }
    io::write_json_atomic(opts.out / "bench_report.json", json{{"benchmarks", summaries}, {"failures", failures}});
    io::write_text_atomic(opts.out / "bench_summary.txt", text);
    if (!failures.empty()) {
        fmt::print(stderr, "{} failure(s); see {}\n", failures.size(), (opts.out / "bench_report.json").string());
        return 1;
    }
    return 0;
}

} // namespace sgrid::cli
