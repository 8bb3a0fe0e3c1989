#include "p2pbw/trace_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>
#include <system_error>

#include "p2pbw/errors.hpp"

namespace p2pbw {

std::string format_double(double value) {
    std::array<char, 32> buffer{};
    const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), result.ptr);
}

namespace {

double parse_field(std::string_view field, const std::string& path, std::size_t line) {
    double value = 0.0;
    const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
    if (result.ec != std::errc() || result.ptr != field.data() + field.size())
        throw parse_error(path + ":" + std::to_string(line) + ": malformed number '" +
                          std::string(field) + "'");
    if (!std::isfinite(value))
        throw parse_error(path + ":" + std::to_string(line) + ": non-finite value");
    return value;
}

std::vector<std::string_view> split_lines(const std::string& content) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string::npos)
            end = content.size();
        std::string_view line(content.data() + start, end - start);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    while (!lines.empty() && lines.back().empty())
        lines.pop_back();
    return lines;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open '" + path + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad())
        throw io_error("read failure on '" + path + "'");
    return buffer.str();
}

} // namespace

void write_text_atomic(const std::string& content, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw io_error("cannot open '" + tmp + "' for writing");
        out << content;
        out.flush();
        if (!out)
            throw io_error("write failure on '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw io_error("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
    }
}

void write_trace_csv(const Trace& trace, const std::string& path) {
    trace.validate();
    std::string content = "time,value\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
        content += format_double(static_cast<double>(k) * trace.dt);
        content += ',';
        content += format_double(trace.values[k]);
        content += '\n';
    }
    write_text_atomic(content, path);
}

Trace read_trace_csv(const std::string& path) {
    const std::string content = read_file(path);
    const auto lines = split_lines(content);
    if (lines.empty() || lines[0] != "time,value")
        throw parse_error(path + ":1: expected header 'time,value'");
    if (lines.size() < 3)
        throw parse_error(path + ": need at least 2 samples to infer the grid step");

    std::vector<double> times, values;
    times.reserve(lines.size() - 1);
    values.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string_view line = lines[i];
        const std::size_t comma = line.find(',');
        if (comma == std::string_view::npos)
            throw parse_error(path + ":" + std::to_string(i + 1) + ": expected 'time,value' row");
        times.push_back(parse_field(line.substr(0, comma), path, i + 1));
        values.push_back(parse_field(line.substr(comma + 1), path, i + 1));
    }

    const double dt = times[1] - times[0];
    if (!(dt > 0.0))
        throw parse_error(path + ":3: time column must be strictly increasing");
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double step = times[i] - times[i - 1];
        if (std::fabs(step - dt) > 1e-9 * std::max(1.0, std::fabs(dt)))
            throw parse_error(path + ":" + std::to_string(i + 2) +
                              ": non-uniform time step (expected " + format_double(dt) + ", got " +
                              format_double(step) + ")");
    }

    Trace trace;
    trace.dt = dt;
    trace.values = std::move(values);
    trace.validate();
    return trace;
}

void write_samples_csv(const std::vector<double>& samples, const std::string& path) {
    std::string content = "value\n";
    for (double v : samples) {
        content += format_double(v);
        content += '\n';
    }
    write_text_atomic(content, path);
}

std::vector<double> read_samples_csv(const std::string& path) {
    const std::string content = read_file(path);
    const auto lines = split_lines(content);
    if (lines.empty() || lines[0] != "value")
        throw parse_error(path + ":1: expected header 'value'");
    if (lines.size() < 2)
        throw parse_error(path + ": no samples");
    std::vector<double> samples;
    samples.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i)
        samples.push_back(parse_field(lines[i], path, i + 1));
    return samples;
}

} // namespace p2pbw
