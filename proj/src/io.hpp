#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "operators.hpp"

namespace ite {

// Flat-file outputs: CSV tables, self-contained SVG plots, raw matrix dumps,
// and a per-run manifest listing every emitted file with a content digest.

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> yerr;  // empty = no error bars
    std::string color = "#1f6fb2";
};

struct PlotSpec {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool log_x = false;
    bool log_y = false;
    std::vector<PlotSeries> series;
};

// Polyline plot with axes and tick labels; no timestamps, so output is
// byte-stable for identical inputs.
void write_svg_plot(const std::string& path, const PlotSpec& spec);

// Raw dump: row-major little-endian f64 pairs (re, im per entry), plus a JSON
// sidecar at path + ".json" holding {dim, provenance}.
void dump_hermitian_binary(const std::string& path, const DenseHermitian& h);
Eigen::MatrixXcd load_hermitian_binary(const std::string& path);

// FNV-1a over the file's bytes, rendered as 16 hex digits.
std::string file_digest_hex(const std::string& path);

struct ManifestEntry {
    std::string path;    // relative to the manifest's directory
    std::string digest;  // file_digest_hex
};

struct RunManifest {
    std::string command;
    std::string config_json;       // verbatim config snapshot
    std::uint64_t master_seed = 0;
    std::string code_version;
    std::string started;   // ISO-8601 UTC
    std::string finished;
    std::vector<ManifestEntry> files;
};

// Writes <out_dir>/manifest.json atomically (temp file + rename), computing
// digests for the listed files.
void write_manifest(const std::string& out_dir, RunManifest manifest);

std::string code_version();

// Current UTC wall time, ISO-8601.
std::string utc_timestamp();

}  // namespace ite
