#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sdiv/frequency_table.hpp"

namespace sdiv {

enum class DataFormat { Auto, Freq, Raw };

DataFormat data_format_from_string(const std::string& s);

// Reads a dataset from a CSV/whitespace file. "freq" rows are `x,count`,
// "raw" rows are single observations; Auto sniffs two-column rows as freq.
// Lines starting with '#' and blank lines are skipped; a single header line
// of non-numeric tokens is tolerated. Throws parse_error with the 1-based
// line number on malformed input.
FrequencyTable ingest(const std::string& path, DataFormat format = DataFormat::Auto);
FrequencyTable ingest_text(const std::string& text, DataFormat format,
                           const std::string& origin_label = "<memory>");

// 64-bit FNV-1a over the canonical serialization "x:count\n" per entry,
// sorted by x. Stable across platforms; used to tie outputs to inputs.
std::uint64_t dataset_checksum(const FrequencyTable& data);
std::string checksum_hex(std::uint64_t checksum);

// Every command embeds one of these in its output so a result can be
// reproduced exactly.
struct RunManifest {
    std::string command;                       // subcommand name
    std::map<std::string, std::string> params; // flag -> rendered value
    std::string dataset_checksum_hex;          // empty when no dataset
    std::string version;
    std::string timestamp;                     // ISO-8601 UTC
};

// Timestamp honours the SOURCE_DATE_EPOCH convention: when that environment
// variable holds an integer, it is used instead of the wall clock so that
// repeated runs are byte-identical.
RunManifest make_manifest(const std::string& command,
                          const std::map<std::string, std::string>& params,
                          const std::string& checksum_hex_or_empty = "");

// Deterministic number rendering shared by all output formats: shortest
// representation via %.12g with "-0" normalized to "0".
std::string render_double(double v);
// Fixed-precision rendering used by the text tables.
std::string render_fixed(double v, int decimals);

} // namespace sdiv
