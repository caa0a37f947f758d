#include "sdiv/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "sdiv/errors.hpp"
#include "sdiv/version.hpp"

namespace sdiv {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : line) {
        if (c == ',' || c == ';' || std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) {
                tokens.push_back(current);
                current.clear();
            }
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) tokens.push_back(current);
    return tokens;
}

bool parse_int(const std::string& token, std::int64_t& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

} // namespace

DataFormat data_format_from_string(const std::string& s) {
    if (s == "auto") return DataFormat::Auto;
    if (s == "freq") return DataFormat::Freq;
    if (s == "raw") return DataFormat::Raw;
    throw domain_error("unknown data format '" + s +
                       "' (expected auto, freq or raw)");
}

FrequencyTable ingest(const std::string& path, DataFormat format) {
    std::ifstream in(path);
    if (!in)
        throw parse_error("cannot open data file '" + path + "'", 0);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return ingest_text(buffer.str(), format, path);
}

FrequencyTable ingest_text(const std::string& text, DataFormat format,
                           const std::string& origin_label) {
    std::istringstream in(text);
    std::string line;
    long long line_no = 0;
    bool header_allowed = true;
    std::vector<FrequencyTable::Entry> entries;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::vector<std::string> tokens = tokenize(line);
        if (tokens.empty()) continue;

        std::vector<std::int64_t> values(tokens.size());
        bool numeric = true;
        for (std::size_t i = 0; i < tokens.size(); ++i)
            numeric = numeric && parse_int(tokens[i], values[i]);

        if (!numeric) {
            // Tolerate one leading header row; anything later is an error.
            if (header_allowed) {
                header_allowed = false;
                continue;
            }
            throw parse_error("non-numeric row in '" + origin_label + "'",
                              line_no);
        }
        header_allowed = false;

        if (format == DataFormat::Auto)
            format = tokens.size() == 2 ? DataFormat::Freq : DataFormat::Raw;

        if (format == DataFormat::Freq) {
            if (values.size() != 2)
                throw parse_error(
                    "frequency rows need exactly two columns (x, count) in '" +
                        origin_label + "'",
                    line_no);
            if (values[1] < 0)
                throw parse_error("negative count in '" + origin_label + "'",
                                  line_no);
            entries.push_back(FrequencyTable::Entry{values[0], values[1]});
        } else {
            for (std::int64_t x : values)
                entries.push_back(FrequencyTable::Entry{x, 1});
        }
    }

    if (entries.empty())
        throw parse_error("no data rows in '" + origin_label + "'", line_no);
    try {
        return FrequencyTable::from_entries(std::move(entries));
    } catch (const domain_error& e) {
        throw parse_error(std::string(e.what()) + " in '" + origin_label + "'",
                          line_no);
    }
}

std::uint64_t dataset_checksum(const FrequencyTable& data) {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    };
    for (const auto& e : data.entries())
        mix(std::to_string(e.x) + ":" + std::to_string(e.count) + "\n");
    return h;
}

std::string checksum_hex(std::uint64_t checksum) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(checksum));
    return buf;
}

RunManifest make_manifest(const std::string& command,
                          const std::map<std::string, std::string>& params,
                          const std::string& checksum_hex_or_empty) {
    RunManifest m;
    m.command = command;
    m.params = params;
    m.dataset_checksum_hex = checksum_hex_or_empty;
    m.version = version_string;

    std::time_t when = 0;
    bool have_epoch = false;
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const long long secs = std::strtoll(env, &end, 10);
        if (end && *end == '\0' && end != env) {
            when = static_cast<std::time_t>(secs);
            have_epoch = true;
        }
    }
    if (!have_epoch) when = std::time(nullptr);

    std::tm tm{};
    gmtime_r(&when, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    m.timestamp = buf;
    return m;
}

std::string render_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    std::string s = buf;
    if (s == "-0") s = "0";
    return s;
}

std::string render_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    // normalize negative zero ("-0.00" -> "0.00")
    if (!s.empty() && s[0] == '-') {
        bool all_zero = true;
        for (char c : s.substr(1))
            all_zero = all_zero && (c == '0' || c == '.');
        if (all_zero) s.erase(0, 1);
    }
    return s;
}

} // namespace sdiv
