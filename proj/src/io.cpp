#include "ccsemi/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ccsemi/error.hpp"

namespace ccsemi {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = line.find(',');
        out.push_back(trim(line.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        line = line.substr(comma + 1);
    }
    return out;
}

/// Calls fn(line_number, fields) for each non-blank line.
template <class Fn>
void for_each_record(std::string_view text, Fn&& fn) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        const std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty()) continue;
        fn(line_no, split_fields(line));
    }
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    throw ParseError("line " + std::to_string(line) + ": " + msg, line);
}

std::vector<double> parse_covariates(std::size_t line, const std::vector<std::string_view>& fields,
                                     std::size_t first, std::size_t expected) {
    if (fields.size() - first != expected)
        fail(line, "expected " + std::to_string(expected + first) + " fields, found " +
                       std::to_string(fields.size()));
    std::vector<double> x;
    x.reserve(expected);
    for (std::size_t k = first; k < fields.size(); ++k) {
        const auto v = parse_double(fields[k]);
        if (!v || !std::isfinite(*v)) fail(line, "field " + std::to_string(k + 1) + " is not a finite number: '" + std::string(fields[k]) + "'");
        x.push_back(*v);
    }
    return x;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::optional<double> parse_double(std::string_view field) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (field.empty() || ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

LabeledTable parse_labeled_csv(std::string_view text) {
    LabeledTable table;
    bool header = true;
    for_each_record(text, [&](std::size_t line, const std::vector<std::string_view>& f) {
        if (header) {
            if (f.front() != "y") fail(line, "labeled header must start with column 'y'");
            if (f.size() < 2) fail(line, "labeled header needs at least one covariate column");
            for (std::size_t k = 1; k < f.size(); ++k) table.covariate_names.emplace_back(f[k]);
            header = false;
            return;
        }
        LabeledObservation obs;
        if (f.front() == "1")
            obs.y = 1;
        else if (f.front() == "0")
            obs.y = 0;
        else
            fail(line, "label must be 0 or 1, found '" + std::string(f.front()) + "'");
        obs.x = parse_covariates(line, f, 1, table.covariate_names.size());
        table.rows.push_back(std::move(obs));
    });
    if (header) throw ParseError("labeled file is empty", 1);
    return table;
}

UnlabeledTable parse_unlabeled_csv(std::string_view text) {
    UnlabeledTable table;
    bool header = true;
    for_each_record(text, [&](std::size_t line, const std::vector<std::string_view>& f) {
        if (header) {
            for (auto name : f) {
                if (name.empty()) fail(line, "empty column name in header");
                table.covariate_names.emplace_back(name);
            }
            header = false;
            return;
        }
        table.rows.push_back(parse_covariates(line, f, 0, table.covariate_names.size()));
    });
    return table;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write " + path.string());
    out << text;
    if (!out) throw ArgumentError("write to " + path.string() + " failed");
}

LabeledTable read_labeled_csv(const std::filesystem::path& path) {
    return parse_labeled_csv(read_text_file(path));
}

UnlabeledTable read_unlabeled_csv(const std::filesystem::path& path) {
    return parse_unlabeled_csv(read_text_file(path));
}

std::string labeled_csv(const std::vector<LabeledObservation>& rows) {
    const std::size_t dim = rows.empty() ? 0 : rows.front().x.size();
    std::string out = "y";
    for (std::size_t k = 0; k < dim; ++k) out += ",x" + std::to_string(k + 1);
    out += '\n';
    for (const auto& r : rows) {
        out += r.y == 1 ? '1' : '0';
        for (double v : r.x) out += ',' + format_double(v);
        out += '\n';
    }
    return out;
}

std::string unlabeled_csv(const std::vector<std::vector<double>>& rows, std::size_t dim) {
    std::string out;
    for (std::size_t k = 0; k < dim; ++k) out += (k ? ",x" : "x") + std::to_string(k + 1);
    out += '\n';
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (k) out += ',';
            out += format_double(r[k]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace ccsemi
