#pragma once

#include "repsim/config.hpp"
#include "repsim/metrics.hpp"
#include "repsim/verify.hpp"
#include "repsim/version.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Result serialization: CSV tables and JSON summaries with full 17-digit
// repeatable precision, plus small self-contained SVG figures so a sweep is
// plottable with no external tooling.
namespace repsim::report {

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string csv_number(double v) { return detail::format_g17(v); }

inline std::string sweep_csv(const std::vector<RateResult>& rows) {
    std::ostringstream out;
    out << "M,N_buffer,trials,successes,p_succ,mean_fidelity,rains,rate,per_memory_rate\n";
    for (const RateResult& r : rows) {
        out << r.M << ',' << r.N_buffer << ',' << r.trials << ',' << r.successes << ','
            << csv_number(r.p_succ) << ',';
        if (r.mean_fidelity) out << csv_number(*r.mean_fidelity);
        out << ',' << csv_number(r.rains) << ',' << csv_number(r.rate) << ','
            << csv_number(r.per_memory_rate) << '\n';
    }
    return out.str();
}

inline std::string density_csv(const std::vector<DensityBin>& bins) {
    std::ostringstream out;
    out << "bin_center,density\n";
    for (const DensityBin& b : bins)
        out << csv_number(b.center) << ',' << csv_number(b.density) << '\n';
    return out.str();
}

inline std::string verify_csv(const std::vector<VerifyRow>& rows) {
    std::ostringstream out;
    out << "check,inputs,closed_form,oracle,abs_diff,known_discrepancy\n";
    for (const VerifyRow& r : rows) {
        out << r.check << ',' << r.inputs << ',' << csv_number(r.closed_form) << ','
            << csv_number(r.oracle) << ',' << csv_number(r.abs_diff) << ','
            << (r.known_discrepancy ? 1 : 0) << '\n';
    }
    return out.str();
}

inline nlohmann::json rate_result_json(const RateResult& r) {
    nlohmann::json j;
    j["M"] = r.M;
    j["N_buffer"] = r.N_buffer;
    j["trials"] = r.trials;
    j["successes"] = r.successes;
    j["p_succ"] = r.p_succ;
    if (r.mean_fidelity)
        j["mean_fidelity"] = *r.mean_fidelity;
    else
        j["mean_fidelity"] = nullptr;
    j["rains"] = r.rains;
    j["rate"] = r.rate;
    j["per_memory_rate"] = r.per_memory_rate;
    return j;
}

inline std::string optimal_json(const std::vector<RateResult>& best_per_memory_count) {
    nlohmann::json j;
    j["optima"] = nlohmann::json::array();
    for (const RateResult& r : best_per_memory_count) j["optima"].push_back(rate_result_json(r));
    return j.dump(2) + "\n";
}

inline nlohmann::json config_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["family"] = family_name(cfg.family);
    j["L0_km"] = cfg.L0_km;
    j["L_att_km"] = cfg.L_att_km;
    j["eta_h"] = cfg.eta_h;
    j["F0"] = cfg.F0;
    j["p_swap"] = cfg.p_swap;
    j["p_gate"] = cfg.p_gate;
    j["eta_meas"] = cfg.eta_meas;
    j["kappa_per_s"] = cfg.kappa_per_s;
    j["tau_s"] = cfg.tau_s;
    j["M_list"] = cfg.M_list;
    j["N_buffer_min"] = cfg.N_buffer_min;
    j["N_buffer_max"] = cfg.N_buffer_max;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["bins"] = cfg.bins;
    return j;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

inline std::string manifest_json(const std::string& command, const RunConfig& cfg,
                                 const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["artifact"] = "repsim";
    j["version"] = kVersion;
    j["command"] = command;
    j["seed"] = cfg.seed;
    j["generated_utc"] = utc_timestamp();
    j["config"] = config_json(cfg);
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

// --- minimal SVG figures ------------------------------------------------------

namespace svg {

struct Series {
    std::string label;
    std::vector<std::array<double, 2>> points; // (x, y)
};

namespace detail {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 74.0;
constexpr double kRight = 24.0;
constexpr double kTop = 46.0;
constexpr double kBottom = 58.0;

inline const char* color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    return palette[i % 5];
}

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Frame {
    double x_lo, x_hi, y_lo, y_hi;

    double px(double x) const {
        return kLeft + (x - x_lo) / (x_hi - x_lo) * (kWidth - kLeft - kRight);
    }
    double py(double y) const {
        return kHeight - kBottom - (y - y_lo) / (y_hi - y_lo) * (kHeight - kTop - kBottom);
    }
};

inline void open_figure(std::ostringstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"26\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\" font-weight=\"bold\">" << title
        << "</text>\n";
}

inline void draw_axes(std::ostringstream& out, const Frame& f, const std::string& x_label,
                      const std::string& y_label) {
    const double x0 = kLeft, x1 = kWidth - kRight;
    const double y0 = kHeight - kBottom, y1 = kTop;
    for (int i = 0; i <= 5; ++i) {
        const double tx = f.x_lo + (f.x_hi - f.x_lo) * i / 5.0;
        const double ty = f.y_lo + (f.y_hi - f.y_lo) * i / 5.0;
        const double px = f.px(tx);
        const double py = f.py(ty);
        out << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\"" << y1
            << "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        out << "<line x1=\"" << x0 << "\" y1=\"" << py << "\" x2=\"" << x1 << "\" y2=\"" << py
            << "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << px << "\" y=\"" << y0 + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << num(tx) << "</text>\n";
        out << "<text x=\"" << x0 - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(ty)
            << "</text>\n";
    }
    out << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\""
        << y0 - y1 << "\" fill=\"none\" stroke=\"#404040\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << (y0 + y1) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << (y0 + y1) / 2 << ")\">" << y_label << "</text>\n";
}

} // namespace detail

inline std::string line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<Series>& series) {
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    bool first = true;
    for (const Series& s : series) {
        for (const auto& p : s.points) {
            if (first) {
                x_lo = x_hi = p[0];
                y_lo = y_hi = p[1];
                first = false;
            }
            x_lo = std::min(x_lo, p[0]);
            x_hi = std::max(x_hi, p[0]);
            y_lo = std::min(y_lo, p[1]);
            y_hi = std::max(y_hi, p[1]);
        }
    }
    y_lo = std::min(0.0, y_lo); // rates and buffer times are nonnegative; anchor at zero
    if (x_hi == x_lo) {
        x_lo -= 1;
        x_hi += 1;
    }
    if (y_hi == y_lo) y_hi = y_lo + 1;
    y_hi += 0.08 * (y_hi - y_lo);
    const detail::Frame f{x_lo, x_hi, y_lo, y_hi};
    std::ostringstream out;
    detail::open_figure(out, title);
    detail::draw_axes(out, f, x_label, y_label);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = detail::color(i);
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& p : series[i].points) out << f.px(p[0]) << ',' << f.py(p[1]) << ' ';
        out << "\"/>\n";
        for (const auto& p : series[i].points)
            out << "<circle cx=\"" << f.px(p[0]) << "\" cy=\"" << f.py(p[1])
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        const double lx = detail::kLeft + 14;
        const double ly = detail::kTop + 18 + 18 * static_cast<double>(i);
        out << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 26
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << lx + 32 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[i].label
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

inline std::string histogram_chart(const std::string& title, const std::string& x_label,
                                   const std::string& y_label,
                                   const std::vector<DensityBin>& bins) {
    if (bins.empty()) {
        std::ostringstream out;
        detail::open_figure(out, title + " (no samples)");
        out << "</svg>\n";
        return out.str();
    }
    const double width = bins.size() > 1 ? bins[1].center - bins[0].center : 1.0;
    std::size_t lo_idx = bins.size(), hi_idx = 0;
    double y_hi = 0.0;
    for (std::size_t i = 0; i < bins.size(); ++i) {
        if (bins[i].density > 0.0) {
            lo_idx = std::min(lo_idx, i);
            hi_idx = std::max(hi_idx, i);
            y_hi = std::max(y_hi, bins[i].density);
        }
    }
    if (lo_idx == bins.size()) {
        lo_idx = 0;
        hi_idx = bins.size() - 1;
        y_hi = 1.0;
    }
    // Zoom to the occupied support, padded by a couple of bins.
    const double x_lo = std::max(0.0, bins[lo_idx].center - 2.5 * width);
    const double x_hi = std::min(1.0, bins[hi_idx].center + 2.5 * width);
    const detail::Frame f{x_lo, x_hi, 0.0, y_hi * 1.08};
    std::ostringstream out;
    detail::open_figure(out, title);
    detail::draw_axes(out, f, x_label, y_label);
    const double base = f.py(0.0);
    for (const DensityBin& b : bins) {
        if (b.density <= 0.0) continue;
        const double left = std::max(x_lo, b.center - width / 2);
        const double right = std::min(x_hi, b.center + width / 2);
        if (right <= x_lo || left >= x_hi) continue;
        const double top = f.py(b.density);
        out << "<rect x=\"" << f.px(left) << "\" y=\"" << top << "\" width=\""
            << f.px(right) - f.px(left) << "\" height=\"" << base - top
            << "\" fill=\"#1f77b4\" fill-opacity=\"0.85\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace svg

} // namespace repsim::report
