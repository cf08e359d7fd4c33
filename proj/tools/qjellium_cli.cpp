// Command-line front end: free-energy expansions, scan tables, property
// verification suites, and small utility queries (fugacity, exchange
// integral, interaction decomposition tables).
//
// Exit codes: 0 success, 1 verification violations, 2 domain failure
// (e.g. Bose density at/above condensation), 64 invalid usage.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qjellium/coulomb_split.hpp"
#include "qjellium/exchange.hpp"
#include "qjellium/fock.hpp"
#include "qjellium/hq_bounds.hpp"
#include "qjellium/ideal_gas.hpp"
#include "qjellium/numerics/rng.hpp"
#include "qjellium/quasifree.hpp"

namespace {

using qjellium::Statistics;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// formatting: all serialized numbers round-trip (17 significant digits)

std::string fmt(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}
std::string fmt17(double v) { return fmt(v, 17); }

void json_escape(const std::string& s, std::string& out) {
    out += '"';
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    out += '"';
}

// nlohmann's serializer does not expose float formatting, so reports are
// dumped by this small walker instead (doubles via %.17g, non-finite -> null).
void dump_json(const ordered_json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
    const std::string pad_in(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    switch (j.type()) {
    case ordered_json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad_in;
            json_escape(it.key(), out);
            out += ": ";
            dump_json(it.value(), out, depth + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case ordered_json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        bool first = true;
        for (const auto& v : j) {
            if (!first) out += ",\n";
            first = false;
            out += pad_in;
            dump_json(v, out, depth + 1);
        }
        out += "\n" + pad + "]";
        return;
    }
    case ordered_json::value_t::string:
        json_escape(j.get_ref<const std::string&>(), out);
        return;
    case ordered_json::value_t::boolean:
        out += j.get<bool>() ? "true" : "false";
        return;
    case ordered_json::value_t::number_float: {
        const double v = j.get<double>();
        out += std::isfinite(v) ? fmt17(v) : std::string("null");
        return;
    }
    case ordered_json::value_t::number_integer:
        out += std::to_string(j.get<std::int64_t>());
        return;
    case ordered_json::value_t::number_unsigned:
        out += std::to_string(j.get<std::uint64_t>());
        return;
    default:
        out += "null";
        return;
    }
}

std::string dump_report(const ordered_json& j) {
    std::string out;
    dump_json(j, out, 0);
    out += '\n';
    return out;
}

// write to --out path if given, else stdout; LF endings either way
int emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open output file '" << out_path << "'\n";
        return 2;
    }
    f << text;
    return f.good() ? 0 : 2;
}

// ---------------------------------------------------------------------------
// worker pool: QJ_THREADS caps the worker count; results are index-addressed
// so the merged output never depends on scheduling

unsigned worker_count(std::size_t jobs) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("QJ_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) hw = static_cast<unsigned>(std::min<long>(v, 1024));
    }
    return static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(jobs, 1)));
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
    const unsigned workers = worker_count(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
        });
    for (auto& t : pool) t.join();
}

Statistics parse_stats(const std::string& s) {
    return s == "bose" ? Statistics::bose : Statistics::fermi;
}

void print_kv(const char* key, const std::string& value) {
    std::printf("%-10s %s\n", key, value.c_str());
}

// ---------------------------------------------------------------------------
// free-energy

struct PointArgs {
    std::string stats = "fermi";
    double beta = 1.0;
    double rho = 0.01;
    double alpha = 0.1;
    double n = 1.0;
};

int run_free_energy(const PointArgs& a) {
    const Statistics stats = parse_stats(a.stats);
    double rho_c = 0.0;
    if (stats == Statistics::bose) {
        rho_c = qjellium::critical_density(a.beta, a.n);
        if (a.rho >= rho_c) {
            std::cerr << "error: Bose density rho = " << fmt(a.rho, 12)
                      << " is at or above the condensation threshold rho_c(beta=" << fmt(a.beta, 12)
                      << ") = " << fmt(rho_c, 12) << "\n";
            return 2;
        }
    }
    try {
        const auto r = qjellium::two_term_free_energy(a.beta, a.rho, a.alpha, a.n, stats);
        print_kv("stats", a.stats);
        print_kv("n", fmt(a.n, 12));
        print_kv("beta", fmt(a.beta, 12));
        print_kv("rho", fmt(a.rho, 12));
        print_kv("alpha", fmt(a.alpha, 12));
        print_kv("z", fmt(r.state.z, 12));
        print_kv("mu", fmt(r.state.mu, 12));
        if (stats == Statistics::bose) print_kv("rho_c", fmt(rho_c, 12));
        print_kv("f0", fmt(r.f0, 12));
        print_kv("exchange", fmt(r.exchange_term, 12));
        print_kv("total", fmt(r.total, 12));
        return 0;
    } catch (const qjellium::condensation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int run_fugacity(const PointArgs& a) {
    const Statistics stats = parse_stats(a.stats);
    try {
        const auto st = qjellium::make_state(a.beta, a.rho, a.n, stats);
        const double back = qjellium::density_from_fugacity(a.beta, st.z, a.n, stats);
        print_kv("stats", a.stats);
        print_kv("beta", fmt(a.beta, 12));
        print_kv("rho", fmt(a.rho, 12));
        print_kv("z", fmt(st.z, 12));
        print_kv("mu", fmt(st.mu, 12));
        if (stats == Statistics::bose)
            print_kv("rho_c", fmt(qjellium::critical_density(a.beta, a.n), 12));
        print_kv("residual", fmt(std::abs(back - a.rho) / a.rho, 12));
        return 0;
    } catch (const qjellium::condensation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int run_exchange(const PointArgs& a) {
    const Statistics stats = parse_stats(a.stats);
    try {
        const auto st = qjellium::make_state(a.beta, a.rho, a.n, stats);
        const qjellium::GammaTilde gt(st);
        const double real_space = qjellium::exchange_integral_real_space(gt);
        const double momentum = qjellium::exchange_integral_momentum(st);
        const double term =
            qjellium::quantum_sign(stats) * 0.5 * a.alpha * a.n * real_space;
        print_kv("stats", a.stats);
        print_kv("beta", fmt(a.beta, 12));
        print_kv("rho", fmt(a.rho, 12));
        print_kv("z", fmt(st.z, 12));
        print_kv("integral", fmt(real_space, 12));
        print_kv("momentum", fmt(momentum, 12));
        print_kv("route_gap", fmt(std::abs(real_space - momentum) /
                                      std::max(std::abs(real_space), 1e-300),
                                  12));
        print_kv("exchange", fmt(term, 12));
        return 0;
    } catch (const qjellium::condensation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

// ---------------------------------------------------------------------------
// decompose: short/long interaction split tables for plotting

struct DecomposeArgs {
    double radius = 1.0;
    double s_min = 0.01;
    double s_max = 5.0;
    int points = 25;
    std::string format = "csv";
    std::string out;
};

int run_decompose(const DecomposeArgs& a) {
    std::string text;
    ordered_json rows = ordered_json::array();
    if (a.format == "csv") text = "s,v_short,v_long,total,coulomb,residual\n";
    for (int i = 0; i < a.points; ++i) {
        const double s = a.points == 1
                             ? a.s_min
                             : a.s_min + (a.s_max - a.s_min) * i / double(a.points - 1);
        const double vs = qjellium::v_short(s, a.radius);
        const double vl = qjellium::v_long(s, a.radius);
        const double total = vs + vl;
        const double coulomb = 1.0 / s;
        const double residual = total - coulomb;
        if (a.format == "csv") {
            text += fmt17(s) + "," + fmt17(vs) + "," + fmt17(vl) + "," + fmt17(total) + "," +
                    fmt17(coulomb) + "," + fmt17(residual) + "\n";
        } else {
            ordered_json row;
            row["s"] = s;
            row["v_short"] = vs;
            row["v_long"] = vl;
            row["total"] = total;
            row["coulomb"] = coulomb;
            row["residual"] = residual;
            rows.push_back(std::move(row));
        }
    }
    if (a.format == "json") {
        ordered_json doc;
        doc["meta"] = {{"command", "decompose"},
                       {"radius", a.radius},
                       {"s_min", a.s_min},
                       {"s_max", a.s_max},
                       {"points", a.points}};
        doc["rows"] = std::move(rows);
        text = dump_report(doc);
    }
    return emit(text, a.out);
}

// ---------------------------------------------------------------------------
// scan

struct ScanArgs {
    std::string stats = "fermi";
    double n = 1.0;
    double alpha = 0.1;
    double rho_min = 0.0;
    double rho_max = 0.0;
    int points = 9;
    double beta = 1.0;       // fixed-beta mode
    double beta_rho23 = 0.0; // fixed beta*rho^{2/3} mode (if set)
    bool reduced_mode = false;
    std::string format = "csv";
    std::string out;
};

struct ScanRow {
    double rho = 0.0, beta = 0.0;
    double z = 0.0, f0 = 0.0, exchange = 0.0, total = 0.0, f0r = 0.0, exr = 0.0;
    bool ok = false;
    std::string status = "ok";
};

int run_scan(const ScanArgs& a) {
    const Statistics stats = parse_stats(a.stats);
    const std::size_t k = static_cast<std::size_t>(a.points);
    std::vector<ScanRow> rows(k);
    parallel_for(k, [&](std::size_t i) {
        ScanRow& row = rows[i];
        row.rho = (k == 1) ? a.rho_min
                           : a.rho_min * std::pow(a.rho_max / a.rho_min,
                                                  double(i) / double(k - 1));
        row.beta = a.reduced_mode ? a.beta_rho23 / std::pow(row.rho, 2.0 / 3.0) : a.beta;
        try {
            if (stats == Statistics::bose) {
                const double rc = qjellium::critical_density(row.beta, a.n);
                if (row.rho >= rc) {
                    row.status = "supercritical rho_c=" + fmt17(rc);
                    return;
                }
            }
            const auto r =
                qjellium::two_term_free_energy(row.beta, row.rho, a.alpha, a.n, stats);
            row.z = r.state.z;
            row.f0 = r.f0;
            row.exchange = r.exchange_term;
            row.total = r.total;
            row.f0r = r.f0 / std::pow(row.rho, 5.0 / 3.0);
            row.exr = r.exchange_term / std::pow(row.rho, 4.0 / 3.0);
            row.ok = true;
        } catch (const std::exception& e) {
            std::string what = e.what();
            std::replace(what.begin(), what.end(), ',', ';');
            row.status = "error: " + what;
        }
    });

    std::string text;
    if (a.format == "csv") {
        text = "rho,beta,z,f0,exchange,total,f0_rho53,exchange_rho43,status\n";
        for (const auto& r : rows) {
            if (r.ok)
                text += fmt17(r.rho) + "," + fmt17(r.beta) + "," + fmt17(r.z) + "," +
                        fmt17(r.f0) + "," + fmt17(r.exchange) + "," + fmt17(r.total) + "," +
                        fmt17(r.f0r) + "," + fmt17(r.exr) + ",ok\n";
            else
                text += fmt17(r.rho) + "," + fmt17(r.beta) + ",nan,nan,nan,nan,nan,nan," +
                        r.status + "\n";
        }
    } else {
        ordered_json doc;
        doc["meta"] = {{"command", "scan"},
                       {"stats", a.stats},
                       {"n", a.n},
                       {"alpha", a.alpha},
                       {"mode", a.reduced_mode ? "fixed-beta-rho23" : "fixed-beta"},
                       {"beta", a.reduced_mode ? ordered_json() : ordered_json(a.beta)},
                       {"beta_rho23",
                        a.reduced_mode ? ordered_json(a.beta_rho23) : ordered_json()},
                       {"rho_min", a.rho_min},
                       {"rho_max", a.rho_max},
                       {"points", a.points}};
        ordered_json jrows = ordered_json::array();
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (const auto& r : rows) {
            ordered_json row;
            row["rho"] = r.rho;
            row["beta"] = r.beta;
            row["z"] = r.ok ? r.z : nan;
            row["f0"] = r.ok ? r.f0 : nan;
            row["exchange"] = r.ok ? r.exchange : nan;
            row["total"] = r.ok ? r.total : nan;
            row["f0_rho53"] = r.ok ? r.f0r : nan;
            row["exchange_rho43"] = r.ok ? r.exr : nan;
            row["status"] = r.status;
            jrows.push_back(std::move(row));
        }
        doc["rows"] = std::move(jrows);
        text = dump_report(doc);
    }
    const int rc = emit(text, a.out);
    if (rc != 0) return rc;
    const bool all_ok =
        std::all_of(rows.begin(), rows.end(), [](const ScanRow& r) { return r.ok; });
    return all_ok ? 0 : 2;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
    std::string name;
    std::string metric;
    long instances = 0;
    long violations = 0;
    double worst = 0.0;
    double tolerance = 0.0;
    ordered_json violating = ordered_json::array();
};

constexpr std::size_t kMaxListedViolations = 25;

void add_violation(Check& c, ordered_json item) {
    ++c.violations;
    if (c.violating.size() < kMaxListedViolations) c.violating.push_back(std::move(item));
}

ordered_json check_to_json(const Check& c) {
    ordered_json j;
    j["name"] = c.name;
    j["instances"] = c.instances;
    j["violations"] = c.violations;
    j["metric"] = c.metric;
    j["worst"] = c.worst;
    j["tolerance"] = c.tolerance;
    j["violating"] = c.violating;
    return j;
}

Eigen::MatrixXcd random_hermitian(int m, double scale, qjellium::num::Rng& rng) {
    Eigen::MatrixXcd a(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a(i, j) = std::complex<double>(rng.normal(), rng.normal());
    return 0.5 * scale * (a + a.adjoint());
}

Eigen::MatrixXcd random_positive(int m, double scale, double floor, qjellium::num::Rng& rng) {
    Eigen::MatrixXcd h = random_hermitian(m, scale, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    return h + (floor - es.eigenvalues().minCoeff()) * Eigen::MatrixXcd::Identity(m, m);
}

Eigen::MatrixXcd gamma_of(const Eigen::MatrixXcd& h, Statistics stats) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXd occ(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        const double e = es.eigenvalues()(i);
        occ(i) = stats == Statistics::fermi ? 1.0 / (std::exp(e) + 1.0) : 1.0 / std::expm1(e);
    }
    return es.eigenvectors() * occ.asDiagonal() * es.eigenvectors().adjoint();
}

std::vector<int> random_subset(int m, qjellium::num::Rng& rng) {
    std::vector<int> subset;
    for (int i = 0; i < m; ++i)
        if (rng.uniform() < 0.5) subset.push_back(i);
    if (subset.empty()) subset.push_back(rng.uniform_int(0, m - 1));
    return subset;
}

void sweep_check(const char* name, const qjellium::SweepReport& rep, std::vector<Check>& out) {
    Check c;
    c.name = name;
    c.metric = "min_margin";
    c.instances = rep.total;
    c.violations = rep.violations;
    c.worst = rep.min_margin;
    c.tolerance = -1e-9;
    for (std::size_t i = 0; i < rep.violating_points.size() && i < kMaxListedViolations; ++i)
        c.violating.push_back(rep.violating_points[i]);
    out.push_back(std::move(c));
}

qjellium::HqPoint random_hq_point(qjellium::num::Rng& rng, Statistics stats, double z,
                                  double beta) {
    qjellium::HqPoint pt;
    pt.p = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    pt.q = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    pt.beta = beta;
    pt.z = z;
    pt.stats = stats;
    return pt;
}

void suite_lemmas(std::uint64_t seed, std::vector<Check>& out) {
    sweep_check("fermi-hq-sweep", qjellium::sweep_lemma1(), out);
    sweep_check("bose-hq-sweep", qjellium::sweep_lemma2(), out);

    Check taylor;
    taylor.name = "taylor-identity";
    taylor.metric = "max_residual";
    taylor.tolerance = 1e-8;
    qjellium::num::Rng rng = qjellium::num::Rng(seed).fork(1);
    for (int t = 0; t < 40; ++t) {
        const Statistics stats = (t % 2) ? Statistics::bose : Statistics::fermi;
        const double z = stats == Statistics::bose ? 0.95 - 0.15 * (t % 5) : 0.3 + 0.9 * (t % 3);
        const auto pt = random_hq_point(rng, stats, z, 0.5 + 0.25 * (t % 7));
        const double res = qjellium::taylor_identity_check(pt);
        ++taylor.instances;
        taylor.worst = std::max(taylor.worst, res);
        if (res > taylor.tolerance)
            add_violation(taylor, ordered_json{{"index", t}, {"residual", res}});
    }
    out.push_back(std::move(taylor));

    Check fd;
    fd.name = "fsecond-finite-difference";
    fd.metric = "max_relative_deviation";
    fd.tolerance = 1e-5;
    rng = qjellium::num::Rng(seed).fork(2);
    for (int t = 0; t < 20; ++t) {
        const Statistics stats = (t % 2) ? Statistics::bose : Statistics::fermi;
        const double z = stats == Statistics::bose ? 0.9 - 0.2 * (t % 4) : 0.4 + 0.7 * (t % 3);
        const auto pt = random_hq_point(rng, stats, z, 0.6 + 0.2 * (t % 5));
        const double lam = 0.05 + 0.045 * t;
        const double step = 1e-4;
        auto f_at = [&](double l) {
            qjellium::HqPoint s = pt;
            s.q = l * pt.q;
            return qjellium::h_q(s);
        };
        const double numeric =
            (f_at(lam + step) - 2.0 * f_at(lam) + f_at(lam - step)) / (step * step);
        const double closed = qjellium::f_second_derivative(pt, lam);
        const double dev = std::abs(numeric - closed) / (1.0 + std::abs(closed));
        ++fd.instances;
        fd.worst = std::max(fd.worst, dev);
        if (dev > fd.tolerance)
            add_violation(fd, ordered_json{{"index", t}, {"deviation", dev}});
    }
    out.push_back(std::move(fd));
}

void suite_decomposition(std::uint64_t seed, std::vector<Check>& out) {
    Check recon;
    recon.name = "coulomb-reconstruction";
    recon.metric = "max_relative_residual";
    recon.tolerance = 1e-8;
    for (double s : {0.1, 1.0, 10.0}) {
        const double upper = 50.0 * s;
        const double integral =
            qjellium::num::integrate(
                [&](double r) { return qjellium::ball_overlap(r, s) / std::pow(r, 5); },
                0.5 * s, upper, 1e-12, 400) /
                M_PI +
            qjellium::v_long(s, upper);
        const double res = std::abs(integral * s - 1.0);
        ++recon.instances;
        recon.worst = std::max(recon.worst, res);
        if (res > recon.tolerance)
            add_violation(recon, ordered_json{{"s", s}, {"residual", res}});
    }
    out.push_back(std::move(recon));

    Check split;
    split.name = "short-long-split-identity";
    split.metric = "max_relative_residual";
    split.tolerance = 1e-10;
    qjellium::num::Rng rng = qjellium::num::Rng(seed).fork(3);
    for (int t = 0; t < 20; ++t) {
        const double s = std::exp(rng.uniform(std::log(1e-2), std::log(1e2)));
        const double radius = std::exp(rng.uniform(std::log(0.05), std::log(5.0)));
        const double total = qjellium::v_short(s, radius) + qjellium::v_long(s, radius);
        const double res = std::abs(total * s - 1.0);
        ++split.instances;
        split.worst = std::max(split.worst, res);
        if (res > split.tolerance)
            add_violation(split, ordered_json{{"s", s}, {"radius", radius}, {"residual", res}});
    }
    out.push_back(std::move(split));

    Check anchors;
    anchors.name = "exact-anchors";
    anchors.metric = "max_absolute_deviation";
    anchors.tolerance = 0.0;
    for (double radius : {0.1, 0.5, 1.0, 2.5, 10.0}) {
        const double contact = std::abs(qjellium::v_long(0.0, radius) - 4.0 / (3.0 * radius));
        const double outside1 = std::abs(qjellium::v_short(2.0 * radius, radius));
        const double outside2 = std::abs(qjellium::v_short(3.0 * radius, radius));
        anchors.instances += 3;
        const double worst_here = std::max({contact, outside1, outside2});
        anchors.worst = std::max(anchors.worst, worst_here);
        if (worst_here > 0.0)
            add_violation(anchors, ordered_json{{"radius", radius}, {"deviation", worst_here}});
    }
    out.push_back(std::move(anchors));
}

void suite_quasifree(std::uint64_t seed, std::vector<Check>& out) {
    Check pair_f, fourth_f, pdm_f;
    pair_f.name = "fermi-pair-count-agreement";
    pair_f.metric = "max_relative_deviation";
    pair_f.tolerance = 1e-9;
    fourth_f.name = "fermi-fourth-moment-bound";
    fourth_f.metric = "max_excess";
    fourth_f.tolerance = 0.0;
    fourth_f.worst = -std::numeric_limits<double>::infinity();
    pdm_f.name = "fermi-one-pdm-agreement";
    pdm_f.metric = "max_entry_deviation";
    pdm_f.tolerance = 1e-10;

    qjellium::num::Rng rng = qjellium::num::Rng(seed).fork(4);
    for (int t = 0; t < 20; ++t) {
        const int m = 2 + t % 5;
        const Eigen::MatrixXcd h = random_hermitian(m, 0.8, rng);
        const qjellium::FockSpace sp(Statistics::fermi, m);
        const qjellium::FockState st = qjellium::quasifree_gibbs(h, sp);
        const Eigen::MatrixXcd gamma = gamma_of(h, Statistics::fermi);
        const auto subset = random_subset(m, rng);
        Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(m, m);
        for (int i : subset) x(i, i) = 1.0;

        const double exact = qjellium::pair_count_exact(st, subset);
        const double quasi =
            qjellium::pair_count_quasifree(qjellium::OnePdm(gamma, Statistics::fermi), x);
        const double dev = std::abs(exact - quasi) / (1.0 + std::abs(exact));
        ++pair_f.instances;
        pair_f.worst = std::max(pair_f.worst, dev);
        if (dev > pair_f.tolerance)
            add_violation(pair_f, ordered_json{{"index", t}, {"modes", m}, {"deviation", dev}});

        const double tr = (x * gamma).real().trace();
        const double bound = tr * tr * (tr + 2.0) * (tr + 2.0);
        const double excess =
            qjellium::fourth_moment_exact(st, subset) - bound - 1e-9 * (1.0 + bound);
        ++fourth_f.instances;
        fourth_f.worst = std::max(fourth_f.worst, excess);
        if (excess > 0.0)
            add_violation(fourth_f,
                          ordered_json{{"index", t}, {"modes", m}, {"excess", excess}});

        const double pdm_dev =
            (qjellium::one_pdm_exact(st) - gamma).cwiseAbs().maxCoeff();
        ++pdm_f.instances;
        pdm_f.worst = std::max(pdm_f.worst, pdm_dev);
        if (pdm_dev > pdm_f.tolerance)
            add_violation(pdm_f, ordered_json{{"index", t}, {"deviation", pdm_dev}});
    }
    out.push_back(std::move(pair_f));
    out.push_back(std::move(fourth_f));
    out.push_back(std::move(pdm_f));

    Check pair_b, fourth_b;
    pair_b.name = "bose-pair-count-agreement";
    pair_b.metric = "max_relative_deviation";
    pair_b.tolerance = 1e-9; // raised per instance by 1e3 * discarded cap weight
    fourth_b.name = "bose-fourth-moment-bound";
    fourth_b.metric = "max_excess";
    fourth_b.tolerance = 0.0;
    fourth_b.worst = -std::numeric_limits<double>::infinity();

    rng = qjellium::num::Rng(seed).fork(5);
    const double floors[] = {0.9, 2.6, 4.0};
    for (int t = 0; t < 8; ++t) {
        const int m = 1 + t % 3;
        const Eigen::MatrixXcd h = random_positive(m, 0.6, floors[m - 1], rng);
        const qjellium::FockSpace sp = qjellium::adaptive_bose_space(h, 1e-9);
        const double tail = qjellium::bose_tail_weight(h, sp.cap());
        const qjellium::FockState st = qjellium::quasifree_gibbs(h, sp);
        const Eigen::MatrixXcd gamma = gamma_of(h, Statistics::bose);
        const auto subset = random_subset(m, rng);
        Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(m, m);
        for (int i : subset) x(i, i) = 1.0;

        const double exact = qjellium::pair_count_exact(st, subset);
        const double quasi =
            qjellium::pair_count_quasifree(qjellium::OnePdm(gamma, Statistics::bose), x);
        const double dev = std::abs(exact - quasi) / (1.0 + std::abs(exact));
        const double tol = 1e-9 + 1e3 * tail;
        ++pair_b.instances;
        pair_b.tolerance = std::max(pair_b.tolerance, tol);
        pair_b.worst = std::max(pair_b.worst, dev);
        if (dev > tol)
            add_violation(pair_b, ordered_json{{"index", t}, {"modes", m}, {"deviation", dev}});

        const double tr = (x * gamma).real().trace();
        const double bound = 24.0 * tr * tr * (tr + 0.5) * (tr + 0.5);
        const double excess =
            qjellium::fourth_moment_exact(st, subset) - bound - tol * (1.0 + bound);
        ++fourth_b.instances;
        fourth_b.worst = std::max(fourth_b.worst, excess);
        if (excess > 0.0)
            add_violation(fourth_b,
                          ordered_json{{"index", t}, {"modes", m}, {"excess", excess}});
    }
    out.push_back(std::move(pair_b));
    out.push_back(std::move(fourth_b));
}

void suite_entropy(std::uint64_t seed, std::vector<Check>& out) {
    Check agree, pinsker;
    agree.name = "relative-entropy-exact-agreement";
    agree.metric = "max_relative_deviation";
    agree.tolerance = 1e-9;
    pinsker.name = "half-pinsker";
    pinsker.metric = "min_slack";
    pinsker.worst = std::numeric_limits<double>::infinity();
    pinsker.tolerance = -1e-12;

    qjellium::num::Rng rng = qjellium::num::Rng(seed).fork(6);
    for (int t = 0; t < 10; ++t) {
        const int m = 2 + t % 3;
        const Eigen::MatrixXcd h1 = random_hermitian(m, 0.7, rng);
        const Eigen::MatrixXcd h2 = random_hermitian(m, 0.7, rng);
        const qjellium::FockSpace sp(Statistics::fermi, m);
        const auto st1 = qjellium::quasifree_gibbs(h1, sp);
        const auto st2 = qjellium::quasifree_gibbs(h2, sp);
        const double exact = qjellium::rel_entropy_exact(st1, st2);
        const double quasi = qjellium::rel_entropy_quasifree(
            qjellium::OnePdm(gamma_of(h1, Statistics::fermi), Statistics::fermi),
            qjellium::OnePdm(gamma_of(h2, Statistics::fermi), Statistics::fermi));
        const double dev = std::abs(exact - quasi) / (1.0 + std::abs(exact));
        ++agree.instances;
        agree.worst = std::max(agree.worst, dev);
        if (dev > agree.tolerance)
            add_violation(agree, ordered_json{{"index", t}, {"deviation", dev}});

        const double t1 = qjellium::trace_norm_diff(st1, st2);
        const double slack = exact - 0.5 * t1 * t1;
        ++pinsker.instances;
        pinsker.worst = std::min(pinsker.worst, slack);
        if (slack < pinsker.tolerance)
            add_violation(pinsker, ordered_json{{"index", t}, {"slack", slack}});
    }
    out.push_back(std::move(agree));
    out.push_back(std::move(pinsker));

    Check mono;
    mono.name = "monotonicity-under-restriction";
    mono.metric = "max_excess";
    mono.tolerance = 0.0;
    mono.worst = -std::numeric_limits<double>::infinity();
    rng = qjellium::num::Rng(seed).fork(7);
    for (int t = 0; t < 25; ++t) {
        const int m = 6;
        const Statistics stats = (t % 2) ? Statistics::bose : Statistics::fermi;
        Eigen::MatrixXcd ha, hb;
        if (stats == Statistics::fermi) {
            ha = random_hermitian(m, 0.8, rng);
            hb = random_hermitian(m, 0.8, rng);
        } else {
            ha = random_positive(m, 0.5, 0.7, rng);
            hb = random_positive(m, 0.5, 0.7, rng);
        }
        const qjellium::OnePdm omega(gamma_of(ha, stats), stats);
        const qjellium::OnePdm gamma(gamma_of(hb, stats), stats);
        const int keep = rng.uniform_int(1, m - 1);
        Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(m, m);
        for (int i = 0; i < keep; ++i) x(i, i) = 1.0;
        const double full = qjellium::rel_entropy_quasifree(omega, gamma);
        const double restricted = qjellium::rel_entropy_quasifree(
            qjellium::restrict_one_pdm(omega, x), qjellium::restrict_one_pdm(gamma, x));
        const double excess = restricted - full - 1e-10 * (1.0 + full);
        ++mono.instances;
        mono.worst = std::max(mono.worst, excess);
        if (excess > 0.0)
            add_violation(mono, ordered_json{{"index", t}, {"excess", excess}});
    }
    out.push_back(std::move(mono));
}

int run_verify(const std::string& suite, std::uint64_t seed, const std::string& out_path) {
    std::vector<Check> checks;
    if (suite == "lemmas" || suite == "all") suite_lemmas(seed, checks);
    if (suite == "decomposition" || suite == "all") suite_decomposition(seed, checks);
    if (suite == "quasifree" || suite == "all") suite_quasifree(seed, checks);
    if (suite == "entropy" || suite == "all") suite_entropy(seed, checks);

    long instances = 0, violations = 0;
    ordered_json jchecks = ordered_json::array();
    for (const auto& c : checks) {
        instances += c.instances;
        violations += c.violations;
        jchecks.push_back(check_to_json(c));
    }
    ordered_json doc;
    doc["meta"] = {{"command", "verify"},
                   {"suite", suite},
                   {"seed", seed}};
    doc["report"] = {{"checks", std::move(jchecks)},
                     {"instances", instances},
                     {"violations", violations},
                     {"pass", violations == 0}};
    const int rc = emit(dump_report(doc), out_path);
    if (rc != 0) return rc;
    return violations == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-term jellium free energy at positive temperature: "
                 "computations, scans, and property verification"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value configuration file; flags override");

    // free-energy / fugacity / exchange share the point arguments
    PointArgs fe, fu, ex;
    auto add_point_options = [](CLI::App* cmd, PointArgs& a, bool with_alpha) {
        cmd->fallthrough(); // lets --config (a global option) follow the subcommand
        cmd->add_option("--stats", a.stats, "statistics: fermi|bose")
            ->check(CLI::IsMember({"fermi", "bose"}))
            ->capture_default_str();
        cmd->add_option("--beta", a.beta, "inverse temperature")
            ->required()
            ->check(CLI::PositiveNumber);
        cmd->add_option("--rho", a.rho, "number density")
            ->required()
            ->check(CLI::PositiveNumber);
        cmd->add_option("--n", a.n, "internal degeneracy")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        if (with_alpha)
            cmd->add_option("--alpha", a.alpha, "coupling strength")
                ->check(CLI::NonNegativeNumber)
                ->capture_default_str();
    };

    CLI::App* cmd_fe = app.add_subcommand(
        "free-energy", "two-term free energy density at one thermodynamic point");
    add_point_options(cmd_fe, fe, true);

    CLI::App* cmd_fu =
        app.add_subcommand("fugacity", "solve the fugacity / chemical potential from density");
    add_point_options(cmd_fu, fu, false);

    CLI::App* cmd_ex = app.add_subcommand(
        "exchange", "exchange integral by both quadrature routes, plus the exchange term");
    add_point_options(cmd_ex, ex, true);

    DecomposeArgs de;
    CLI::App* cmd_de = app.add_subcommand(
        "decompose", "short/long interaction split table: v_short + v_long = 1/s");
    cmd_de->fallthrough();
    cmd_de->add_option("--radius", de.radius, "split radius R")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_de->add_option("--s-min", de.s_min, "smallest separation (> 0)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_de->add_option("--s-max", de.s_max, "largest separation")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_de->add_option("--points", de.points, "row count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_de->add_option("--format", de.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd_de->add_option("--out", de.out, "output path (default: stdout)");

    ScanArgs sc;
    CLI::App* cmd_sc = app.add_subcommand(
        "scan", "free-energy table over a geometric density grid (csv or json)");
    cmd_sc->fallthrough();
    cmd_sc->add_option("--stats", sc.stats, "statistics: fermi|bose")
        ->check(CLI::IsMember({"fermi", "bose"}))
        ->capture_default_str();
    cmd_sc->add_option("--n", sc.n, "internal degeneracy")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_sc->add_option("--alpha", sc.alpha, "coupling strength")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd_sc->add_option("--rho-min", sc.rho_min, "smallest density")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_sc->add_option("--rho-max", sc.rho_max, "largest density")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_sc->add_option("--points", sc.points, "grid point count (>= 1)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    CLI::Option* opt_beta =
        cmd_sc->add_option("--beta", sc.beta, "fixed inverse temperature for every row")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    CLI::Option* opt_reduced =
        cmd_sc
            ->add_option("--beta-rho23", sc.beta_rho23,
                         "hold beta*rho^{2/3} at this value (beta varies per row)")
            ->check(CLI::PositiveNumber);
    opt_beta->excludes(opt_reduced);
    opt_reduced->excludes(opt_beta);
    cmd_sc->add_option("--format", sc.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd_sc->add_option("--out", sc.out, "output path (default: stdout)");

    std::string verify_suite;
    std::uint64_t verify_seed = 0;
    std::string verify_out;
    CLI::App* cmd_ve = app.add_subcommand(
        "verify", "run property suites; exit 0 iff zero violations; JSON report");
    cmd_ve->fallthrough();
    cmd_ve->add_option("suite", verify_suite, "lemmas|decomposition|quasifree|entropy|all")
        ->required()
        ->check(CLI::IsMember({"lemmas", "decomposition", "quasifree", "entropy", "all"}));
    cmd_ve->add_option("--seed", verify_seed, "seed for randomized instances")
        ->capture_default_str();
    cmd_ve->add_option("--out", verify_out, "report path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e); // --help and friends
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    try {
        if (app.got_subcommand(cmd_fe)) return run_free_energy(fe);
        if (app.got_subcommand(cmd_fu)) return run_fugacity(fu);
        if (app.got_subcommand(cmd_ex)) return run_exchange(ex);
        if (app.got_subcommand(cmd_de)) return run_decompose(de);
        if (app.got_subcommand(cmd_sc)) {
            if (sc.rho_max < sc.rho_min) {
                std::cerr << "error: --rho-max must be >= --rho-min\n";
                return 64;
            }
            sc.reduced_mode = opt_reduced->count() > 0;
            return run_scan(sc);
        }
        if (app.got_subcommand(cmd_ve)) return run_verify(verify_suite, verify_seed, verify_out);
    } catch (const qjellium::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 64;
}
