#include "sgrid/io.hpp"

#include "sgrid/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace sgrid::io {

namespace {

double parse_double(std::string_view text, std::size_t line)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (!text.empty() && *first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw FormatError("CSV line " + std::to_string(line) + ": cannot parse number '" + std::string(text) + "'");
    return v;
}

std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

double number_or_inf(const json& j)
{
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json finite_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

void write_table(std::ostream& os, const std::vector<double>& times, const Matrix& values, const char* prefix)
{
    os << 't';
    for (std::size_t i = 0; i < values.cols(); ++i)
        os << ',' << prefix << (i + 1);
    os << '\n';
    for (std::size_t k = 0; k < times.size(); ++k) {
        os << format_double(times[k]);
        for (double v : values.row(k))
            os << ',' << format_double(v);
        os << '\n';
    }
}

std::ofstream open_out(const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return os;
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc())
        throw FormatError("format_double: conversion failed");
    return std::string(buf, ptr);
}

void write_dataset_csv(std::ostream& os, const TimeSeriesDataset& dataset)
{
    write_table(os, dataset.times, dataset.values, "X");
}

void write_dataset_csv(const std::filesystem::path& path, const TimeSeriesDataset& dataset)
{
    std::ostringstream os;
    write_dataset_csv(os, dataset);
    write_text_atomic(path, os.str());
}

TimeSeriesDataset read_dataset_csv(std::istream& is, std::string label)
{
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(is, line))
        throw FormatError("dataset CSV is empty");
    ++lineno;
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF)
        line.erase(0, 3); // UTF-8 BOM
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    const auto header = split_commas(line);
    if (header.size() < 2 || header[0] != "t")
        throw FormatError("dataset CSV header must be 't,X1,...,XN'");
    for (std::size_t i = 1; i < header.size(); ++i)
        if (header[i] != "X" + std::to_string(i))
            throw FormatError("dataset CSV header column " + std::to_string(i + 1) + " must be 'X"
                              + std::to_string(i) + "'");
    const std::size_t n = header.size() - 1;

    std::vector<double> times;
    std::vector<double> flat;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto fields = split_commas(line);
        if (fields.size() != n + 1)
            throw FormatError("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(n + 1)
                              + " fields");
        times.push_back(parse_double(fields[0], lineno));
        for (std::size_t i = 1; i <= n; ++i)
            flat.push_back(parse_double(fields[i], lineno));
    }
    TimeSeriesDataset ds;
    ds.label = std::move(label);
    ds.values = Matrix(times.size(), n);
    std::copy(flat.begin(), flat.end(), ds.values.data().begin());
    ds.times = std::move(times);
    ds.validate();
    return ds;
}

TimeSeriesDataset read_dataset_csv(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open dataset '" + path.string() + "'");
    return read_dataset_csv(is, path.stem().string());
}

void write_derivatives_csv(std::ostream& os, const DerivativeTable& table)
{
    write_table(os, table.times, table.slopes, "dX");
}

void write_derivatives_csv(const std::filesystem::path& path, const DerivativeTable& table)
{
    std::ostringstream os;
    write_derivatives_csv(os, table);
    write_text_atomic(path, os.str());
}

json to_json(const SSystemModel& model)
{
    return json{{"alpha", model.alpha}, {"beta", model.beta}, {"g", model.g.to_rows()}, {"h", model.h.to_rows()}};
}

SSystemModel model_from_json(const json& j)
{
    try {
        SSystemModel m;
        m.alpha = j.at("alpha").get<std::vector<double>>();
        m.beta = j.at("beta").get<std::vector<double>>();
        m.g = Matrix::from_rows(j.at("g").get<std::vector<std::vector<double>>>());
        m.h = Matrix::from_rows(j.at("h").get<std::vector<std::vector<double>>>());
        m.validate();
        return m;
    } catch (const json::exception& e) {
        throw FormatError(std::string("invalid model JSON: ") + e.what());
    }
}

json to_json(const BenchmarkSpec& spec)
{
    return json{{"name", spec.name},
                {"alpha", spec.truth.alpha},
                {"beta", spec.truth.beta},
                {"g", spec.truth.g.to_rows()},
                {"h", spec.truth.h.to_rows()},
                {"initial_conditions", spec.initial_conditions},
                {"t_start", spec.t_start},
                {"t_end", spec.t_end},
                {"step", spec.step},
                {"samples_per_set", spec.samples_per_set}};
}

BenchmarkSpec benchmark_from_json(const json& j)
{
    try {
        BenchmarkSpec spec;
        spec.name = j.value("name", std::string("custom"));
        spec.truth = model_from_json(j);
        spec.initial_conditions = j.at("initial_conditions").get<std::vector<std::vector<double>>>();
        spec.t_start = j.at("t_start").get<double>();
        spec.t_end = j.at("t_end").get<double>();
        spec.step = j.at("step").get<double>();
        spec.samples_per_set = j.contains("samples_per_set")
            ? j.at("samples_per_set").get<std::size_t>()
            : make_grid(spec.t_start, spec.t_end, spec.step).samples;
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw FormatError(std::string("invalid benchmark JSON: ") + e.what());
    }
}

json to_json(const EquationCandidate& c)
{
    std::vector<int> bits(c.bits.begin(), c.bits.end());
    return json{{"bits", bits},
                {"reals", c.reals},
                {"J", finite_or_null(c.objectives.J)},
                {"k", c.objectives.k},
                {"alpha", c.gamma.alpha},
                {"beta", c.gamma.beta}};
}

EquationCandidate candidate_from_json(const json& j)
{
    try {
        EquationCandidate c;
        for (int b : j.at("bits").get<std::vector<int>>())
            c.bits.push_back(b ? 1 : 0);
        c.reals = j.at("reals").get<std::vector<double>>();
        c.objectives.J = number_or_inf(j.at("J"));
        c.objectives.k = j.at("k").get<int>();
        c.gamma.alpha = j.at("alpha").get<double>();
        c.gamma.beta = j.at("beta").get<double>();
        if (c.bits.size() != c.reals.size() || c.bits.size() % 2 != 0)
            throw FormatError("candidate JSON: bits and reals must both have length 2N");
        return c;
    } catch (const json::exception& e) {
        throw FormatError(std::string("invalid candidate JSON: ") + e.what());
    }
}

json to_json(const ParetoSet& front)
{
    json arr = json::array();
    for (const auto& c : front)
        arr.push_back(to_json(c));
    return arr;
}

ParetoSet front_from_json(const json& j)
{
    if (!j.is_array())
        throw FormatError("front JSON must be an array");
    ParetoSet out;
    for (const auto& e : j)
        out.push_back(candidate_from_json(e));
    return out;
}

json spem_diagnostic(const Matrix& design, std::span<const double> slopes, const RateConstants& gamma, double J)
{
    return json{{"design", design.to_rows()},
                {"slopes", std::vector<double>(slopes.begin(), slopes.end())},
                {"gamma", {gamma.alpha, gamma.beta}},
                {"J", finite_or_null(J)}};
}

json generation_record(const SearchState& state, const Schedule& sched)
{
    json front = json::array();
    for (const auto& c : extract_front(state.pop))
        front.push_back({{"k", c.objectives.k}, {"J", finite_or_null(c.objectives.J)}});
    return json{{"gen", state.gen}, {"I", sched.indicator}, {"front", front}, {"gbest_k", state.gbest.objectives.k}};
}

json read_json(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw FormatError("'" + path.string() + "': " + e.what());
    }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        auto os = open_out(tmp);
        os << text;
        if (!os)
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

void write_json_atomic(const std::filesystem::path& path, const json& j)
{
    write_text_atomic(path, j.dump(2) + "\n");
}

} // namespace sgrid::io
