#include "sgrid/pipeline.hpp"

#include "sgrid/errors.hpp"
#include "sgrid/io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <regex>
#include <sstream>
#include <thread>

namespace sgrid {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

json mean_counts_json(const MeanConfusion& m)
{
    return json{{"TP", m.tp}, {"FN", m.fn}, {"TN", m.tn}, {"FP", m.fp}};
}

template <class Task>
void run_parallel(std::size_t tasks, std::size_t workers, Task&& task)
{
    workers = std::max<std::size_t>(1, std::min(workers, tasks));
    std::atomic<std::size_t> next{0};
    auto loop = [&] {
        for (std::size_t t = next++; t < tasks; t = next++)
            task(t);
    };
    if (workers == 1) {
        loop();
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back(loop);
}

} // namespace

std::uint64_t run_seed(std::uint64_t base_seed, std::size_t equation, std::size_t run)
{
    return base_seed + 10007ULL * equation + run;
}

std::size_t resolve_threads(std::size_t requested)
{
    std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("GRN_SGRID_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(cap, &end, 10);
        if (end != cap && v > 0)
            n = std::min<std::size_t>(n, v);
    }
    return std::max<std::size_t>(1, n);
}

InferenceOutput infer(const std::vector<TimeSeriesDataset>& datasets, const InferenceConfig& config,
                      std::string label)
{
    if (datasets.empty())
        throw ConfigError("infer: no datasets");
    const std::size_t n = datasets.front().genes();
    for (const auto& ds : datasets) {
        ds.validate();
        if (ds.genes() != n)
            throw ConfigError("infer: datasets disagree on gene count");
    }
    if (config.runs == 0)
        throw ConfigError("infer: runs must be at least 1");
    MoeaConfig base{config.pop_size, config.max_gen, config.bounds, 0};
    validate_config(base, n);

    std::vector<std::size_t> equations = config.equations;
    if (equations.empty())
        for (std::size_t i = 0; i < n; ++i)
            equations.push_back(i);
    for (auto e : equations)
        if (e >= n)
            throw ConfigError("infer: equation " + std::to_string(e + 1) + " out of range");

    const auto slopes = five_point_derivatives(datasets);
    std::vector<EquationProblem> problems;
    problems.reserve(equations.size());
    for (auto e : equations)
        problems.emplace_back(e, datasets, slopes);

    InferenceOutput out;
    out.label = std::move(label);
    out.genes = n;
    out.samples = problems.front().samples();
    out.datasets = datasets.size();
    out.config = config;
    out.config.equations = equations;
    for (auto e : equations) {
        EquationRuns er{e, std::vector<RunRecord>(config.runs)};
        out.equations.push_back(std::move(er));
    }

    const std::size_t tasks = equations.size() * config.runs;
    run_parallel(tasks, resolve_threads(config.threads), [&](std::size_t t) {
        const std::size_t ei = t / config.runs;
        const std::size_t r = t % config.runs;
        auto& rec = out.equations[ei].runs[r];
        rec.equation = equations[ei];
        rec.run = r;
        rec.seed = run_seed(config.base_seed, rec.equation, r);

        MoeaConfig mc = base;
        mc.seed = rec.seed;
        MoeaHooks hooks;
        if (config.log_front)
            hooks.on_generation = [&rec](const SearchState& s, const Schedule& sch) {
                rec.log.push_back(io::generation_record(s, sch));
            };
        const auto t0 = std::chrono::steady_clock::now();
        try {
            rec.front = run_equation_inference(problems[ei], mc, hooks);
            rec.selected = select_by_aic(rec.front, out.samples);
            rec.aic = aic(rec.selected->objectives, out.samples);
        } catch (const std::exception& ex) {
            rec.error = ex.what();
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });
    return out;
}

EvaluationReport evaluate(const InferenceOutput& output, const SSystemModel& truth,
                          const std::vector<TimeSeriesDataset>& datasets)
{
    if (truth.genes() != output.genes)
        throw DomainError("evaluate: results have N=" + std::to_string(output.genes) + " but the truth has N="
                          + std::to_string(truth.genes()));
    EvaluationReport rep;
    rep.label = output.label;

    MeanConfusion pooled;
    double success_sum = 0.0;
    for (const auto& er : output.equations) {
        EquationSummary s;
        s.equation = er.equation;
        s.runs = er.runs.size();
        const auto mask = true_mask(truth, er.equation);
        double sn_sum = 0.0, sp_sum = 0.0;
        std::size_t sn_n = 0, sp_n = 0;
        for (const auto& rec : er.runs) {
            s.seconds += rec.seconds;
            if (!rec.error.empty() || !rec.selected) {
                ++s.failed_runs;
                continue;
            }
            if (front_contains(rec.front, mask))
                ++s.front_successes;
            if (same_topology(rec.selected->bits, mask))
                ++s.selected_successes;
            const auto c = confusion_counts(rec.selected->bits, mask);
            s.confusion.push_back(c);
            const auto r = sensitivity_specificity(c);
            if (r.sensitivity) {
                sn_sum += *r.sensitivity;
                ++sn_n;
            }
            if (r.specificity) {
                sp_sum += *r.specificity;
                ++sp_n;
            }
        }
        s.mean = average(s.confusion);
        s.rates = sensitivity_specificity(s.mean);
        if (sn_n)
            s.mean_run_rates.sensitivity = sn_sum / static_cast<double>(sn_n);
        if (sp_n)
            s.mean_run_rates.specificity = sp_sum / static_cast<double>(sp_n);
        pooled.tp += s.mean.tp;
        pooled.fn += s.mean.fn;
        pooled.tn += s.mean.tn;
        pooled.fp += s.mean.fp;
        success_sum += s.success_rate();
        rep.seconds += s.seconds;
        rep.equations.push_back(std::move(s));
    }
    if (!rep.equations.empty())
        rep.success_rate = success_sum / static_cast<double>(rep.equations.size());
    rep.rates = sensitivity_specificity(pooled);

    // Whole-model scores need every equation.
    if (output.equations.size() == output.genes && !output.equations.empty()) {
        std::vector<const EquationRuns*> by_eq(output.genes, nullptr);
        for (const auto& er : output.equations)
            by_eq[er.equation] = &er;
        const std::size_t runs = output.equations.front().runs.size();
        for (std::size_t r = 0; r < runs; ++r) {
            RunModelScore score;
            score.run = r;
            std::vector<EquationCandidate> selected;
            for (std::size_t e = 0; e < output.genes; ++e) {
                const auto* er = by_eq[e];
                if (!er || r >= er->runs.size() || !er->runs[r].selected) {
                    score.error = "equation " + std::to_string(e + 1) + " has no selected candidate";
                    break;
                }
                selected.push_back(*er->runs[r].selected);
            }
            if (score.error.empty()) {
                try {
                    score.model = assemble_model(selected);
                    double err = 0.0;
                    for (const auto& ds : datasets)
                        err += concentration_error(*score.model, ds);
                    score.concentration_error = err;
                } catch (const std::exception& ex) {
                    score.error = ex.what();
                }
            }
            rep.models.push_back(std::move(score));
        }
    }
    return rep;
}

json summary_json(const EvaluationReport& report)
{
    json per_eq = json::array();
    for (const auto& s : report.equations) {
        json e{{"equation", s.equation + 1},
               {"runs", s.runs},
               {"failed_runs", s.failed_runs},
               {"success_rate", s.success_rate()},
               {"selected_success_rate", s.selected_success_rate()},
               {"Sn", optional_number(s.rates.sensitivity)},
               {"Sp", optional_number(s.rates.specificity)},
               {"Sn_per_run_mean", optional_number(s.mean_run_rates.sensitivity)},
               {"Sp_per_run_mean", optional_number(s.mean_run_rates.specificity)},
               {"wall_time_s", s.seconds}};
        e.update(mean_counts_json(s.mean));
        per_eq.push_back(std::move(e));
    }
    return json{{"benchmark", report.label},
                {"per_equation", per_eq},
                {"success_rate", report.success_rate},
                {"Sn", optional_number(report.rates.sensitivity)},
                {"Sp", optional_number(report.rates.specificity)},
                {"wall_time_s", report.seconds}};
}

json evaluation_json(const InferenceOutput& output, const EvaluationReport& report, const SSystemModel& truth)
{
    std::size_t runs = 0;
    for (const auto& er : output.equations)
        runs = std::max(runs, er.runs.size());

    json run_list = json::array();
    for (std::size_t r = 0; r < runs; ++r) {
        json per_eq = json::array();
        for (const auto& er : output.equations) {
            if (r >= er.runs.size())
                continue;
            const auto& rec = er.runs[r];
            json e{{"equation", er.equation + 1}};
            if (!rec.selected) {
                e["error"] = rec.error;
                per_eq.push_back(std::move(e));
                continue;
            }
            const auto mask = true_mask(truth, er.equation);
            const auto c = confusion_counts(rec.selected->bits, mask);
            const auto rates = sensitivity_specificity(c);
            e["selected"] = io::to_json(*rec.selected);
            e["aic"] = rec.aic;
            e["TP"] = c.tp;
            e["FN"] = c.fn;
            e["TN"] = c.tn;
            e["FP"] = c.fp;
            e["Sn"] = optional_number(rates.sensitivity);
            e["Sp"] = optional_number(rates.specificity);
            e["success"] = same_topology(rec.selected->bits, mask);
            e["front_success"] = front_contains(rec.front, mask);
            per_eq.push_back(std::move(e));
        }
        json run{{"run", r}, {"per_equation", per_eq}};
        const RunModelScore* score = nullptr;
        for (const auto& m : report.models)
            if (m.run == r)
                score = &m;
        run["assembled_model"] = score && score->model ? io::to_json(*score->model) : json(nullptr);
        run["concentration_error"] = score ? optional_number(score->concentration_error) : json(nullptr);
        if (score && !score->error.empty())
            run["error"] = score->error;
        run_list.push_back(std::move(run));
    }
    json doc = summary_json(report);
    doc["runs"] = std::move(run_list);
    return doc;
}

void write_inference(const fs::path& dir, const InferenceOutput& output)
{
    fs::create_directories(dir);
    std::vector<std::size_t> eqs;
    for (const auto& er : output.equations)
        eqs.push_back(er.equation + 1);
    const auto& c = output.config;
    io::write_json_atomic(dir / "meta.json",
                          json{{"benchmark", output.label},
                               {"genes", output.genes},
                               {"samples", output.samples},
                               {"datasets", output.datasets},
                               {"equations", eqs},
                               {"pop_size", c.pop_size},
                               {"max_gen", c.max_gen},
                               {"runs", c.runs},
                               {"seed", c.base_seed},
                               {"bounds", {c.bounds.lower, c.bounds.upper}}});
    for (const auto& er : output.equations) {
        const fs::path eq_dir = dir / ("eq" + std::to_string(er.equation + 1));
        fs::create_directories(eq_dir);
        for (const auto& rec : er.runs) {
            const std::string r = std::to_string(rec.run);
            json front_doc = io::to_json(rec.front);
            io::write_json_atomic(eq_dir / ("front_run" + r + ".json"), front_doc);
            json sel = rec.selected ? io::to_json(*rec.selected) : json(nullptr);
            json sel_doc{{"equation", er.equation + 1}, {"run", rec.run},     {"seed", rec.seed},
                         {"selected", sel},            {"aic", rec.selected ? json(rec.aic) : json(nullptr)}};
            if (!rec.error.empty())
                sel_doc["error"] = rec.error;
            io::write_json_atomic(eq_dir / ("selected_run" + r + ".json"), sel_doc);
            if (!rec.log.empty()) {
                std::ostringstream os;
                for (const auto& line : rec.log)
                    os << line.dump() << '\n';
                io::write_text_atomic(eq_dir / ("log_run" + r + ".jsonl"), os.str());
            }
        }
    }
}

InferenceOutput read_inference(const fs::path& dir)
{
    if (!fs::is_directory(dir) || !fs::exists(dir / "meta.json"))
        throw std::runtime_error("no inference results found in '" + dir.string() + "' (missing meta.json)");
    const json meta = io::read_json(dir / "meta.json");

    InferenceOutput out;
    out.label = meta.at("benchmark").get<std::string>();
    out.genes = meta.at("genes").get<std::size_t>();
    out.samples = meta.at("samples").get<std::size_t>();
    out.datasets = meta.value("datasets", std::size_t{1});
    out.config.pop_size = meta.value("pop_size", std::size_t{20});
    out.config.max_gen = meta.value("max_gen", std::size_t{4000});
    out.config.runs = meta.value("runs", std::size_t{0});
    out.config.base_seed = meta.value("seed", std::uint64_t{1});

    static const std::regex front_name(R"(front_run(\d+)\.json)");
    for (std::size_t e1 : meta.at("equations").get<std::vector<std::size_t>>()) {
        const fs::path eq_dir = dir / ("eq" + std::to_string(e1));
        if (!fs::is_directory(eq_dir))
            continue;
        EquationRuns er;
        er.equation = e1 - 1;
        std::vector<std::size_t> runs;
        for (const auto& entry : fs::directory_iterator(eq_dir)) {
            std::smatch m;
            const std::string name = entry.path().filename().string();
            if (std::regex_match(name, m, front_name))
                runs.push_back(std::stoul(m[1].str()));
        }
        std::sort(runs.begin(), runs.end());
        for (auto r : runs) {
            RunRecord rec;
            rec.equation = er.equation;
            rec.run = r;
            rec.front = io::front_from_json(io::read_json(eq_dir / ("front_run" + std::to_string(r) + ".json")));
            const fs::path sel_path = eq_dir / ("selected_run" + std::to_string(r) + ".json");
            if (fs::exists(sel_path)) {
                const json sel = io::read_json(sel_path);
                rec.seed = sel.value("seed", std::uint64_t{0});
                if (sel.contains("selected") && !sel["selected"].is_null()) {
                    rec.selected = io::candidate_from_json(sel["selected"]);
                    rec.aic = aic(rec.selected->objectives, out.samples);
                }
                if (sel.contains("error"))
                    rec.error = sel["error"].get<std::string>();
            } else if (!rec.front.empty()) {
                rec.selected = select_by_aic(rec.front, out.samples);
                rec.aic = aic(rec.selected->objectives, out.samples);
            }
            if (!rec.selected && rec.error.empty())
                rec.error = "no selected candidate";
            er.runs.push_back(std::move(rec));
        }
        if (!er.runs.empty())
            out.equations.push_back(std::move(er));
    }
    if (out.equations.empty())
        throw std::runtime_error("no run results found under '" + dir.string() + "'");
    return out;
}

} // namespace sgrid
