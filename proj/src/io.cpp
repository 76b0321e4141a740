#include "io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"

namespace ite {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream f(path, mode);
    if (!f) throw_invalid("cannot open for writing: " + path);
    return f;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void write_csv(const std::string& path, const CsvTable& table) {
    auto f = open_out(path);
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        f << (i ? "," : "") << table.columns[i];
    f << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw_invalid("csv row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << format_number(row[i]);
        f << "\n";
    }
}

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kMarginL = 70, kMarginR = 20, kMarginT = 40, kMarginB = 50;

struct AxisMap {
    double lo, hi;
    bool log_scale;
    double pix_lo, pix_hi;

    double to_pix(double v) const {
        const double u = log_scale ? std::log10(v) : v;
        const double a = log_scale ? std::log10(lo) : lo;
        const double b = log_scale ? std::log10(hi) : hi;
        const double frac = (b > a) ? (u - a) / (b - a) : 0.5;
        return pix_lo + frac * (pix_hi - pix_lo);
    }
};

std::vector<double> nice_ticks(double lo, double hi, bool log_scale) {
    std::vector<double> ticks;
    if (log_scale) {
        const int e0 = static_cast<int>(std::floor(std::log10(lo)));
        const int e1 = static_cast<int>(std::ceil(std::log10(hi)));
        for (int e = e0; e <= e1; ++e) {
            const double v = std::pow(10.0, e);
            if (v >= lo * 0.999 && v <= hi * 1.001) ticks.push_back(v);
        }
        if (ticks.size() < 2) ticks = {lo, hi};
        return ticks;
    }
    const double span = hi - lo;
    if (span <= 0) return {lo};
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double mult : {1.0, 2.0, 5.0, 10.0})
        if (mag * mult >= raw) {
            step = mag * mult;
            break;
        }
    for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step)
        ticks.push_back(v);
    return ticks;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_svg_plot(const std::string& path, const PlotSpec& spec) {
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (const auto& s : spec.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double ye = s.yerr.empty() ? 0.0 : s.yerr[i];
            if (spec.log_x && s.x[i] <= 0) continue;
            if (spec.log_y && s.y[i] - ye <= 0) continue;
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, s.y[i] - ye);
            yhi = std::max(yhi, s.y[i] + ye);
        }
    if (xlo > xhi || ylo > yhi) throw_invalid("plot has no drawable points");
    if (xlo == xhi) { xlo -= 0.5; xhi += 0.5; }
    if (ylo == yhi) { ylo = ylo - std::abs(ylo) * 0.1 - 0.5; yhi = yhi + std::abs(yhi) * 0.1 + 0.5; }
    const AxisMap xm{xlo, xhi, spec.log_x, kMarginL, kWidth - kMarginR};
    const AxisMap ym{ylo, yhi, spec.log_y, kHeight - kMarginB, kMarginT};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << xml_escape(spec.title) << "</text>\n";
    // axes
    svg << "<line x1=\"" << kMarginL << "\" y1=\"" << kHeight - kMarginB << "\" x2=\""
        << kWidth - kMarginR << "\" y2=\"" << kHeight - kMarginB
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << kMarginL << "\" y1=\"" << kMarginT << "\" x2=\"" << kMarginL
        << "\" y2=\"" << kHeight - kMarginB << "\" stroke=\"black\"/>\n";
    for (double t : nice_ticks(xlo, xhi, spec.log_x)) {
        const double px = xm.to_pix(t);
        svg << "<line x1=\"" << px << "\" y1=\"" << kHeight - kMarginB << "\" x2=\"" << px
            << "\" y2=\"" << kHeight - kMarginB + 5 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px << "\" y=\"" << kHeight - kMarginB + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << format_number(t) << "</text>\n";
    }
    for (double t : nice_ticks(ylo, yhi, spec.log_y)) {
        const double py = ym.to_pix(t);
        svg << "<line x1=\"" << kMarginL - 5 << "\" y1=\"" << py << "\" x2=\"" << kMarginL
            << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << kMarginL - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << format_number(t) << "</text>\n";
    }
    svg << "<text x=\"" << (kMarginL + kWidth - kMarginR) / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(spec.xlabel)
        << "</text>\n";
    svg << "<text x=\"16\" y=\"" << (kMarginT + kHeight - kMarginB) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << (kMarginT + kHeight - kMarginB) / 2 << ")\">" << xml_escape(spec.ylabel)
        << "</text>\n";

    int legend_row = 0;
    for (const auto& s : spec.series) {
        std::ostringstream pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (spec.log_x && s.x[i] <= 0) continue;
            if (spec.log_y && s.y[i] <= 0) continue;
            pts << xm.to_pix(s.x[i]) << "," << ym.to_pix(s.y[i]) << " ";
        }
        svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\""
            << pts.str() << "\"/>\n";
        if (!s.yerr.empty()) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                const double lo = s.y[i] - s.yerr[i], hi = s.y[i] + s.yerr[i];
                if (spec.log_y && lo <= 0) continue;
                if (spec.log_x && s.x[i] <= 0) continue;
                const double px = xm.to_pix(s.x[i]);
                svg << "<line x1=\"" << px << "\" y1=\"" << ym.to_pix(lo) << "\" x2=\"" << px
                    << "\" y2=\"" << ym.to_pix(hi) << "\" stroke=\"" << s.color << "\"/>\n";
            }
        }
        if (!s.label.empty()) {
            const double ly = kMarginT + 14 + 16 * legend_row++;
            svg << "<line x1=\"" << kWidth - kMarginR - 130 << "\" y1=\"" << ly << "\" x2=\""
                << kWidth - kMarginR - 110 << "\" y2=\"" << ly << "\" stroke=\"" << s.color
                << "\" stroke-width=\"2\"/>\n";
            svg << "<text x=\"" << kWidth - kMarginR - 105 << "\" y=\"" << ly + 4
                << "\" font-size=\"11\">" << xml_escape(s.label) << "</text>\n";
        }
    }
    svg << "</svg>\n";
    open_out(path) << svg.str();
}

void dump_hermitian_binary(const std::string& path, const DenseHermitian& h) {
    auto f = open_out(path, std::ios::out | std::ios::binary);
    const int dim = h.dim();
    // Pairs are written in row-major order; Eigen stores column-major, so walk
    // rows explicitly. Host is assumed little-endian (checked in tests).
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) {
            const std::complex<double> v = h.mat(r, c);
            const double re = v.real(), im = v.imag();
            f.write(reinterpret_cast<const char*>(&re), sizeof re);
            f.write(reinterpret_cast<const char*>(&im), sizeof im);
        }
    f.close();
    nlohmann::json sidecar;
    sidecar["dim"] = dim;
    sidecar["provenance"] = {{"ensemble", h.prov.ensemble},
                             {"master_seed", h.prov.master_seed},
                             {"stream_index", h.prov.stream_index},
                             {"params", h.prov.params}};
    open_out(path + ".json") << sidecar.dump(2) << "\n";
}

Eigen::MatrixXcd load_hermitian_binary(const std::string& path) {
    std::ifstream sidecar(path + ".json");
    if (!sidecar) throw_invalid("missing sidecar: " + path + ".json");
    const auto meta = nlohmann::json::parse(sidecar);
    const int dim = meta.at("dim").get<int>();
    std::ifstream f(path, std::ios::binary);
    if (!f) throw_invalid("cannot open: " + path);
    Eigen::MatrixXcd mat(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) {
            double re = 0, im = 0;
            f.read(reinterpret_cast<char*>(&re), sizeof re);
            f.read(reinterpret_cast<char*>(&im), sizeof im);
            if (!f) throw_invalid("truncated matrix file: " + path);
            mat(r, c) = {re, im};
        }
    return mat;
}

std::string file_digest_hex(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw_invalid("cannot digest missing file: " + path);
    std::uint64_t hash = 1469598103934665603ull;  // FNV-1a offset basis
    char buf[4096];
    while (f.read(buf, sizeof buf) || f.gcount() > 0) {
        for (std::streamsize i = 0; i < f.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ull;
        }
        if (!f) break;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(hash));
    return out;
}

void write_manifest(const std::string& out_dir, RunManifest manifest) {
    nlohmann::json j;
    j["command"] = manifest.command;
    j["config"] = manifest.config_json.empty()
                      ? nlohmann::json(nullptr)
                      : nlohmann::json::parse(manifest.config_json);
    j["master_seed"] = manifest.master_seed;
    j["code_version"] = manifest.code_version.empty() ? code_version() : manifest.code_version;
    j["started"] = manifest.started;
    j["finished"] = manifest.finished.empty() ? utc_timestamp() : manifest.finished;
    auto files = nlohmann::json::array();
    for (auto& e : manifest.files) {
        if (e.digest.empty()) e.digest = file_digest_hex(out_dir + "/" + e.path);
        files.push_back({{"path", e.path}, {"digest", e.digest}});
    }
    j["files"] = files;
    const std::string tmp = out_dir + "/manifest.json.tmp";
    open_out(tmp) << j.dump(2) << "\n";
    if (std::rename(tmp.c_str(), (out_dir + "/manifest.json").c_str()) != 0)
        throw_invalid("cannot finalize manifest in " + out_dir);
}

std::string code_version() { return "itelab 1.0.0"; }

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace ite
