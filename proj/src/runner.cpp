#include "haartv/runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "haartv/density.hpp"
#include "haartv/formulas.hpp"
#include "haartv/tvlab.hpp"
#include "haartv/wick.hpp"

namespace haartv::cli {

namespace {

using json = nlohmann::json;

std::string sanitize(std::string message) {
    for (char& c : message)
        if (c == ',' || c == '\n') c = ';';
    return message;
}

std::string fmt_ll(long long v) { return std::to_string(v); }

void require_grid(const RunConfig& c, bool need_n, bool need_p, bool need_q) {
    if (need_n && c.n_values.empty()) throw std::invalid_argument(c.command + ": missing --n");
    if (need_p && c.p_values.empty()) throw std::invalid_argument(c.command + ": missing --p");
    if (need_q && c.q_values.empty()) throw std::invalid_argument(c.command + ": missing --q");
}

void run_tv_rows(const RunConfig& c, RunRecord& rec) {
    require_grid(c, true, true, true);
    rec.header = {"n",         "p",         "q",           "samples",     "seed",
                  "tv_mean",   "tv_stderr", "norm_mean",   "norm_stderr", "df_bound",
                  "phi_reference"};
    std::string phi_ref_str;
    if (c.phi_ref) phi_ref_str = format_double(tvlab::phi_profile(c.phi_x, c.phi_y));
    for (long long n : c.n_values) {
        for (int p : c.p_values) {
            for (int q : c.q_values) {
                const density::BlockSpec spec{n, p, q};
                const tvlab::TvEstimate est = tvlab::tv_estimate(spec, c.samples, c.seed, c.workers);
                std::string df;
                const long long entries = static_cast<long long>(p) * q;
                if (n >= 5 && entries >= 1 && entries <= n - 4)
                    df = format_double(tvlab::df_bound(n, entries));
                rec.rows.push_back({fmt_ll(n), fmt_ll(p), fmt_ll(q), fmt_ll(c.samples),
                                    std::to_string(c.seed), format_double(est.mean),
                                    format_double(est.stderr_mean),
                                    format_double(est.normalization_mean),
                                    format_double(est.normalization_stderr), df, phi_ref_str});
            }
        }
    }
}

void run_moments(const RunConfig& c, RunRecord& rec) {
    require_grid(c, false, true, true);
    rec.header = {"p", "q", "h", "exact", "leading_main", "envelope", "status"};
    for (int p : c.p_values) {
        for (int q : c.q_values) {
            std::vector<std::string> row{fmt_ll(p), fmt_ll(q), fmt_ll(c.h)};
            try {
                const wick::BigInt exact =
                    wick::exact_trace_moment({p, q, c.h}, c.budget, c.workers);
                const auto leading = formulas::mean_trace_leading(p, q, c.h);
                row.push_back(exact.str());
                row.push_back(leading.main_term.str());
                row.push_back(format_double(leading.relative_error_envelope));
                row.push_back("ok");
            } catch (const std::exception& e) {
                row.insert(row.end(), {"", "", "", "error: " + sanitize(e.what())});
                rec.ok = false;
            }
            rec.rows.push_back(std::move(row));
        }
    }
}

void run_cov(const RunConfig& c, RunRecord& rec) {
    require_grid(c, false, true, true);
    rec.header = {"p",         "q",     "h",     "k",     "exact",           "term1",
                  "term2",     "term3", "total", "simplified_main", "simplified_degenerate",
                  "e_envelope", "f_envelope", "status"};
    for (int p : c.p_values) {
        for (int q : c.q_values) {
            std::vector<std::string> row{fmt_ll(p), fmt_ll(q), fmt_ll(c.h), fmt_ll(c.k)};
            try {
                const wick::BigInt exact =
                    wick::exact_trace_covariance(p, q, c.h, c.k, c.budget, c.workers);
                const auto br = formulas::covariance_breakdown(p, q, c.h, c.k);
                row.push_back(exact.str());
                row.push_back(br.term1.str());
                row.push_back(br.term2.str());
                row.push_back(br.term3.str());
                row.push_back(br.total().str());
                row.push_back(br.simplified_main.str());
                row.push_back(br.simplified_degenerate ? "true" : "false");
                row.push_back(format_double(br.e_envelope));
                row.push_back(format_double(br.f_envelope));
                row.push_back("ok");
            } catch (const std::exception& e) {
                row.insert(row.end(), {"", "", "", "", "", "", "", "", "",
                                       "error: " + sanitize(e.what())});
                rec.ok = false;
            }
            rec.rows.push_back(std::move(row));
        }
    }
}

void run_ballot(const RunConfig& c, RunRecord& rec) {
    rec.header = {"h", "r", "enumerated", "narayana"};
    for (int r = 0; r <= c.h - 1; ++r) {
        const std::uint64_t counted = wick::count_valid_ballot_pairs(c.h, r);
        rec.rows.push_back({fmt_ll(c.h), fmt_ll(r), std::to_string(counted),
                            formulas::narayana(c.h, r).str()});
    }
}

void run_phi(const RunConfig& c, RunRecord& rec) {
    rec.header = {"x", "y", "value"};
    rec.rows.push_back({format_double(c.x), format_double(c.y),
                        format_double(tvlab::phi_profile(c.x, c.y))});
}

void run_df_bound(const RunConfig& c, RunRecord& rec) {
    require_grid(c, true, false, false);
    rec.header = {"n", "k", "bound"};
    for (long long n : c.n_values)
        rec.rows.push_back({fmt_ll(n), fmt_ll(c.k), format_double(tvlab::df_bound(n, c.k))});
}

void run_kn_check(const RunConfig& c, RunRecord& rec) {
    require_grid(c, true, true, true);
    rec.header = {"n", "p", "q", "l", "log_kn", "log_kn_asymptotic", "abs_diff"};
    for (long long n : c.n_values) {
        for (int p : c.p_values) {
            for (int q : c.q_values) {
                const density::BlockSpec spec{n, p, q};
                const auto order = density::choose_l(spec);
                const double exact = density::log_kn(spec);
                const double asym = density::log_kn_asymptotic(spec, order);
                rec.rows.push_back({fmt_ll(n), fmt_ll(p), fmt_ll(q), fmt_ll(order.l),
                                    format_double(exact), format_double(asym),
                                    format_double(std::fabs(exact - asym))});
            }
        }
    }
}

void run_cancel_check(const RunConfig& c, RunRecord& rec) {
    require_grid(c, true, true, true);
    rec.header = {"n", "p", "q", "l", "log_kn", "sum_ej", "residual", "approximate"};
    for (long long n : c.n_values) {
        for (int p : c.p_values) {
            for (int q : c.q_values) {
                const density::BlockSpec spec{n, p, q};
                const auto order = density::choose_l(spec);
                const auto res = density::cancellation_residual(spec, c.budget);
                const double logk = density::log_kn(spec);
                rec.rows.push_back({fmt_ll(n), fmt_ll(p), fmt_ll(q), fmt_ll(order.l),
                                    format_double(logk), format_double(res.value - logk),
                                    format_double(res.value),
                                    res.approximate ? "true" : "false"});
            }
        }
    }
}

void run_eigmax(const RunConfig& c, RunRecord& rec) {
    require_grid(c, false, true, true);
    rec.header = {"p",  "q",   "samples", "seed", "max_ratio",
                  "mean_ratio", "p50", "p90", "bai_silverstein"};
    for (int p : c.p_values) {
        for (int q : c.q_values) {
            const auto report =
                tvlab::eigmax_experiment(p, q, static_cast<int>(c.samples), c.seed);
            const double bs = std::pow(1.0 + std::sqrt(static_cast<double>(q) / p), 2.0);
            rec.rows.push_back({fmt_ll(p), fmt_ll(q), fmt_ll(c.samples), std::to_string(c.seed),
                                format_double(report.max_ratio), format_double(report.mean_ratio),
                                format_double(report.quantiles[0].second),
                                format_double(report.quantiles[1].second), format_double(bs)});
        }
    }
}

void run_sphere(const RunConfig& c, RunRecord& rec) {
    require_grid(c, true, false, false);
    rec.header = {"n", "samples", "seed", "ks"};
    for (long long n : c.n_values) {
        const double ks = tvlab::sphere_coordinate_experiment(n, static_cast<int>(c.samples), c.seed);
        rec.rows.push_back({fmt_ll(n), fmt_ll(c.samples), std::to_string(c.seed),
                            format_double(ks)});
    }
}

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json config_to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["n"] = c.n_values;
    j["p"] = c.p_values;
    j["q"] = c.q_values;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["output_dir"] = c.output_dir;
    j["plot"] = c.plot;
    j["h"] = c.h;
    j["k"] = c.k;
    j["x"] = c.x;
    j["y"] = c.y;
    j["budget"] = c.budget;
    j["phi_ref"] = c.phi_ref;
    j["phi_x"] = c.phi_x;
    j["phi_y"] = c.phi_y;
    return j;
}

void write_plot_svg(const RunRecord& rec, const std::string& path);

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

RunRecord run(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.config = config;

    const std::string& cmd = config.command;
    if (cmd == "tv" || cmd == "sweep")
        run_tv_rows(config, rec);
    else if (cmd == "moments")
        run_moments(config, rec);
    else if (cmd == "cov")
        run_cov(config, rec);
    else if (cmd == "ballot")
        run_ballot(config, rec);
    else if (cmd == "phi")
        run_phi(config, rec);
    else if (cmd == "df-bound")
        run_df_bound(config, rec);
    else if (cmd == "kn-check")
        run_kn_check(config, rec);
    else if (cmd == "cancel-check")
        run_cancel_check(config, rec);
    else if (cmd == "eigmax")
        run_eigmax(config, rec);
    else if (cmd == "sphere")
        run_sphere(config, rec);
    else
        throw std::invalid_argument("unknown command: " + cmd);

    rec.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

void write_outputs(const RunRecord& record, const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);

    {
        std::ofstream csv(fs::path(directory) / "results.csv", std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write results.csv in " + directory);
        for (std::size_t i = 0; i < record.header.size(); ++i)
            csv << (i ? "," : "") << record.header[i];
        csv << '\n';
        for (const auto& row : record.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << row[i];
            csv << '\n';
        }
    }

    {
        json manifest;
        manifest["artifact_version"] = record.version;
        manifest["command"] = record.config.command;
        manifest["config"] = config_to_json(record.config);
        manifest["timestamp_utc"] = timestamp_utc();
        manifest["elapsed_seconds"] = record.elapsed_seconds;
        manifest["rows"] = record.rows.size();
        manifest["results_csv"] = "results.csv";
        manifest["ok"] = record.ok;
        std::ofstream mf(fs::path(directory) / "manifest.json", std::ios::binary);
        if (!mf) throw std::runtime_error("cannot write manifest.json in " + directory);
        mf << manifest.dump(2) << '\n';
    }

    if (record.config.plot)
        write_plot_svg(record, (fs::path(directory) / "plot.svg").string());
}

RunConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j = json::parse(in);
    if (j.contains("config")) j = j["config"];

    RunConfig c;
    c.command = j.value("command", std::string{});
    if (j.contains("n")) c.n_values = j["n"].get<std::vector<long long>>();
    if (j.contains("p")) c.p_values = j["p"].get<std::vector<int>>();
    if (j.contains("q")) c.q_values = j["q"].get<std::vector<int>>();
    c.samples = j.value("samples", c.samples);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.plot = j.value("plot", c.plot);
    c.h = j.value("h", c.h);
    c.k = j.value("k", c.k);
    c.x = j.value("x", c.x);
    c.y = j.value("y", c.y);
    c.budget = j.value("budget", c.budget);
    c.phi_ref = j.value("phi_ref", c.phi_ref);
    c.phi_x = j.value("phi_x", c.phi_x);
    c.phi_y = j.value("phi_y", c.phi_y);
    return c;
}

std::string resolve_output_dir(const RunConfig& config) {
    if (!config.output_dir.empty()) return config.output_dir;
    if (const char* env = std::getenv("HAARTV_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

namespace {

// Minimal line chart: mean with +-2 stderr whiskers against n (log10 x axis).
void write_plot_svg(const RunRecord& rec, const std::string& path) {
    struct Point {
        double n, mean, lo, hi;
    };
    std::vector<Point> pts;
    const auto& hdr = rec.header;
    const auto col = [&](const std::string& name) {
        return std::find(hdr.begin(), hdr.end(), name) - hdr.begin();
    };
    const auto n_c = col("n");
    const std::size_t mean_c = (rec.config.command == "kn-check")
                                   ? static_cast<std::size_t>(col("abs_diff"))
                                   : static_cast<std::size_t>(col("tv_mean"));
    const auto se_c = col("tv_stderr");
    if (static_cast<std::size_t>(n_c) >= hdr.size() || mean_c >= hdr.size()) return;
    for (const auto& row : rec.rows) {
        Point pt{};
        pt.n = std::atof(row[n_c].c_str());
        pt.mean = std::atof(row[mean_c].c_str());
        double se = 0.0;
        if (static_cast<std::size_t>(se_c) < hdr.size()) se = std::atof(row[se_c].c_str());
        pt.lo = pt.mean - 2 * se;
        pt.hi = pt.mean + 2 * se;
        if (pt.n > 0) pts.push_back(pt);
    }
    if (pts.empty()) return;

    const double width = 640, height = 420, ml = 70, mr = 20, mt = 20, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymax = -1e300;
    for (const auto& pt : pts) {
        xmin = std::min(xmin, std::log10(pt.n));
        xmax = std::max(xmax, std::log10(pt.n));
        ymax = std::max(ymax, pt.hi);
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax <= 0) ymax = 1;
    ymax *= 1.1;
    const auto sx = [&](double n) {
        return ml + (std::log10(n) - xmin) / (xmax - xmin) * (width - ml - mr);
    };
    const auto sy = [&](double v) { return height - mb - v / ymax * (height - mt - mb); };

    std::ofstream svg(path, std::ios::binary);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = ymax * t / 4;
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << sy(v) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(v) << "</text>\n";
        svg << "<line x1=\"" << ml - 4 << "\" y1=\"" << sy(v) << "\" x2=\"" << ml << "\" y2=\""
            << sy(v) << "\" stroke=\"black\"/>\n";
    }
    svg << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (const auto& pt : pts) svg << sx(pt.n) << "," << sy(pt.mean) << " ";
    svg << "\"/>\n";
    for (const auto& pt : pts) {
        svg << "<line x1=\"" << sx(pt.n) << "\" y1=\"" << sy(std::max(0.0, pt.lo)) << "\" x2=\""
            << sx(pt.n) << "\" y2=\"" << sy(pt.hi) << "\" stroke=\"steelblue\"/>\n";
        svg << "<circle cx=\"" << sx(pt.n) << "\" cy=\"" << sy(pt.mean)
            << "\" r=\"3\" fill=\"steelblue\"/>\n";
        svg << "<text x=\"" << sx(pt.n) << "\" y=\"" << height - mb + 16
            << "\" text-anchor=\"middle\" font-size=\"11\">" << format_double(pt.n)
            << "</text>\n";
    }
    svg << "</svg>\n";
}

}  // namespace

}  // namespace haartv::cli
