#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "berry/errors.hpp"
#include "berry/experiments.hpp"

namespace berry {

namespace {

using nlohmann::json;

const char* const kCsvHeader = "replicate,seed,E,domain_id,stat,value";

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

std::vector<std::string> csv_split(const std::string& line, long lineno) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted)
        throw ParseError("unterminated quote", lineno);
    out.push_back(cur);
    return out;
}

template <class T>
T parse_number(const std::string& s, long line, const char* what) {
    T v{};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ParseError(std::string("bad ") + what + " '" + s + "'", line);
    return v;
}

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json vec(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v)
        a.push_back(number(x));
    return a;
}

json mat(const std::vector<std::vector<double>>& m) {
    json a = json::array();
    for (const auto& row : m)
        a.push_back(vec(row));
    return a;
}

double get_double(const json& j) { return j.is_null() ? NAN : j.get<double>(); }

std::vector<double> get_vec(const json& j) {
    std::vector<double> out;
    for (const auto& x : j)
        out.push_back(get_double(x));
    return out;
}

std::vector<std::vector<double>> get_mat(const json& j) {
    std::vector<std::vector<double>> out;
    for (const auto& row : j)
        out.push_back(get_vec(row));
    return out;
}

long line_of(const std::string& text, std::size_t byte) {
    long line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n')
            ++line;
    return line;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write '" + path + "'");
    out << text;
    out.close();
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

} // namespace

std::string format_double(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string ExperimentConfig::hash() const {
    const std::string body = canonical();
    const std::string blob = "blob " + std::to_string(body.size()) + std::string(1, '\0') + body;
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1)
        throw std::runtime_error("SHA-1 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string to_csv(const ExperimentResult& result) {
    std::string out;
    if (result.records.empty() && !result.tables.empty()) {
        const Table& t = result.tables.front();
        for (std::size_t i = 0; i < t.columns.size(); ++i)
            out += (i ? "," : "") + csv_cell(t.columns[i]);
        out += '\n';
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out += (i ? "," : "") + csv_cell(row[i]);
            out += '\n';
        }
        return out;
    }
    out.reserve(result.records.size() * 48 + 64);
    out += kCsvHeader;
    out += '\n';
    for (const auto& r : result.records) {
        out += std::to_string(r.replicate);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += format_double(r.E);
        out += ',';
        out += std::to_string(r.domain_id);
        out += ',';
        out += csv_cell(r.stat);
        out += ',';
        out += format_double(r.value);
        out += '\n';
    }
    return out;
}

std::string to_json(const ExperimentResult& result) {
    json j;
    j["experiment"] = result.experiment;
    j["config"] = result.config_text;
    j["config_hash"] = result.config_hash;
    j["records"] = result.records.size();
    json sums = json::array();
    for (const auto& b : result.summaries) {
        const auto& s = b.stats;
        sums.push_back({{"E", b.E},
                        {"stat", b.stat},
                        {"n", s.n},
                        {"mean", vec(s.mean)},
                        {"variance", vec(s.variance)},
                        {"skewness", vec(s.skewness)},
                        {"excess_kurtosis", vec(s.excess_kurtosis)},
                        {"ks_distance", vec(s.ks_distance)},
                        {"mean_se", vec(s.mean_se)},
                        {"variance_se", vec(s.variance_se)},
                        {"covariance", mat(s.covariance)},
                        {"correlation", mat(s.correlation)}});
    }
    j["summaries"] = sums;
    json sc = json::object();
    for (const auto& [k, v] : result.scalars)
        sc[k] = number(v);
    j["scalars"] = sc;
    json tabs = json::array();
    for (const auto& t : result.tables)
        tabs.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", t.rows}});
    j["tables"] = tabs;
    return j.dump(1) + "\n";
}

void persist(const ExperimentResult& result, const std::string& path, const std::string& format) {
    if (format == "json") {
        write_file(path, to_json(result));
    } else if (format == "csv") {
        write_file(path, to_csv(result));
        std::string summary = path;
        if (summary.size() > 4 && summary.ends_with(".csv"))
            summary.replace(summary.size() - 4, 4, ".json");
        else
            summary += ".json";
        write_file(summary, to_json(result));
    } else {
        throw InvalidArgument("format must be csv or json");
    }
}

ExperimentResult parse_csv(const std::string& text) {
    ExperimentResult res;
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line))
        throw ParseError("empty file", 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    const auto header = csv_split(line, lineno);
    const bool records = line == kCsvHeader;
    Table table{"csv", header, {}};
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto cells = csv_split(line, lineno);
        if (cells.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(cells.size()),
                             lineno);
        if (!records) {
            table.rows.push_back(cells);
            continue;
        }
        Record r;
        r.replicate = parse_number<int>(cells[0], lineno, "replicate");
        r.seed = parse_number<std::uint64_t>(cells[1], lineno, "seed");
        r.E = parse_number<double>(cells[2], lineno, "energy");
        r.domain_id = parse_number<int>(cells[3], lineno, "domain_id");
        r.stat = cells[4];
        if (r.stat.empty())
            throw ParseError("empty stat name", lineno);
        r.value = parse_number<double>(cells[5], lineno, "value");
        res.records.push_back(std::move(r));
    }
    if (!records)
        res.tables.push_back(std::move(table));
    return res;
}

ExperimentResult parse_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), line_of(text, e.byte > 0 ? e.byte - 1 : 0));
    }
    ExperimentResult res;
    // Locates the line of a key's first occurrence for structural errors.
    auto where = [&](const std::string& key) {
        const auto pos = text.find("\"" + key + "\"");
        return pos == std::string::npos ? 1L : line_of(text, pos);
    };
    std::string current = "experiment";
    try {
        res.experiment = j.at("experiment").get<std::string>();
        current = "config";
        res.config_text = j.at("config").get<std::string>();
        current = "config_hash";
        res.config_hash = j.at("config_hash").get<std::string>();
        current = "summaries";
        for (const auto& s : j.at("summaries")) {
            SummaryBlock b;
            b.E = s.at("E").get<double>();
            b.stat = s.at("stat").get<std::string>();
            b.stats.n = s.at("n").get<std::size_t>();
            b.stats.mean = get_vec(s.at("mean"));
            b.stats.variance = get_vec(s.at("variance"));
            b.stats.skewness = get_vec(s.at("skewness"));
            b.stats.excess_kurtosis = get_vec(s.at("excess_kurtosis"));
            b.stats.ks_distance = get_vec(s.at("ks_distance"));
            b.stats.mean_se = get_vec(s.at("mean_se"));
            b.stats.variance_se = get_vec(s.at("variance_se"));
            b.stats.covariance = get_mat(s.at("covariance"));
            b.stats.correlation = get_mat(s.at("correlation"));
            res.summaries.push_back(std::move(b));
        }
        current = "scalars";
        for (const auto& [k, v] : j.at("scalars").items())
            res.scalars[k] = get_double(v);
        current = "tables";
        for (const auto& t : j.at("tables"))
            res.tables.push_back({t.at("name").get<std::string>(), t.at("columns").get<std::vector<std::string>>(),
                                  t.at("rows").get<std::vector<std::vector<std::string>>>()});
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed summary near '") + current + "': " + e.what(), where(current));
    }
    return res;
}

ExperimentResult load(const std::string& path) {
    const std::string text = read_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        return parse_json(text);
    return parse_csv(text);
}

} // namespace berry
