#include <wpsub/report_json.hpp>
#include <wpsub/wpsub.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace wpsub;

constexpr int usage_error = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

CatalogEntry require_entry(const std::string& name) {
    auto e = find_entry(name);
    if (!e) throw UsageError("unknown entry '" + name + "' (see `wpsub list`)");
    return std::move(*e);
}

Vec parse_point(const std::string& csv, int dim, const char* what) {
    const auto fields = split_csv_line(csv);
    if (static_cast<int>(fields.size()) != dim)
        throw UsageError(std::string(what) + " needs " + std::to_string(dim) + " comma-separated values, got " +
                         std::to_string(fields.size()));
    Vec v(dim);
    for (int i = 0; i < dim; ++i) {
        try {
            v[i] = parse_double(fields[static_cast<std::size_t>(i)]);
        } catch (const std::exception&) {
            throw UsageError(std::string(what) + ": cannot parse '" + fields[static_cast<std::size_t>(i)] + "'");
        }
    }
    return v;
}

// Writes to `path`, or stdout when it is empty.
template <class F>
void with_output(const std::string& path, F&& write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write(out);
}

int run_verify(const std::string& entry_name, const VerifyParameters& params, const std::string& out_path) {
    const CatalogEntry entry = require_entry(entry_name);
    const VerificationReport report = run_verification(entry, params);
    with_output(out_path, [&](std::ostream& os) { os << to_json(report).dump(2) << '\n'; });
    int mismatches = 0;
    for (const ResultRow& row : report.results) {
        if (row.as_expected()) continue;
        ++mismatches;
        std::cerr << row.report.relation_id << ": " << to_string(row.report.status) << ", expected "
                  << to_string(row.expected) << " (residual " << format_double(row.report.residual) << ")\n";
    }
    std::cerr << entry.name << ": " << report.results.size() - static_cast<std::size_t>(mismatches) << "/"
              << report.results.size() << " results as expected\n";
    return mismatches == 0 ? 0 : 1;
}

int run_geodesic(const std::string& entry_name, const std::string& p0_csv, const std::string& v0_csv, double t_end,
                 double dt, const std::string& out_path) {
    const CatalogEntry entry = require_entry(entry_name);
    const MetricField& M = entry.ws.source.combined;
    const Vec p0 = parse_point(p0_csv, M.dim, "--p0");
    const Vec v0 = parse_point(v0_csv, M.dim, "--v0");
    if (!M.valid(p0)) throw UsageError("--p0 lies outside the chart of " + entry.name);
    GeodesicTrace trace = integrate_geodesic(M, p0, v0, t_end, dt);
    trace.clairaut_values = clairaut_trace(entry.ws, trace).values;
    with_output(out_path, [&](std::ostream& os) { write_trace_csv(os, trace); });
    if (trace.left_domain) std::cerr << "warning: trajectory left the chart at t = " << trace.times.back() << "\n";
    if (trace.quality_warning) std::cerr << "warning: relative energy drift above " << energy_warning_threshold << "\n";
    return 0;
}

void print_rows(std::ostream& os, const double* data, std::size_t count, int row_length) {
    for (std::size_t i = 0; i < count; ++i) {
        os << format_double(data[i]);
        os << ((i + 1) % static_cast<std::size_t>(row_length) == 0 ? '\n' : ' ');
    }
}

int run_curvature(const std::string& entry_name, const std::string& point_csv, const std::string& tensor) {
    const CatalogEntry entry = require_entry(entry_name);
    const MetricField& M = entry.ws.source.combined;
    const Vec p = parse_point(point_csv, M.dim, "--point");
    M.require_valid(p);
    const int n = M.dim;
    if (tensor == "scalar") {
        std::cout << format_double(scalar_curvature(M, p)) << '\n';
    } else if (tensor == "ricci") {
        const Mat ric = ricci(M, p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) std::cout << format_double(ric(i, j)) << (j + 1 == n ? '\n' : ' ');
    } else if (tensor == "riemann") {
        const Tensor4 r = riemann(M, p);
        print_rows(std::cout, r.data().data(), r.data().size(), n);
    } else {
        const WeylResult w = weyl(M, p);
        if (!w.defined) std::cerr << "note: Weyl tensor vanishes identically in dimension " << n << "\n";
        print_rows(std::cout, w.tensor.data().data(), w.tensor.data().size(), n);
    }
    return 0;
}

int run_list() {
    for (const CatalogEntry& e : catalog_entries()) {
        const WarpedSubmersion& ws = e.ws;
        std::cout << e.name << "  " << ws.source.layout.m1 << "+" << ws.source.layout.m2 << " -> "
                  << ws.target.layout.m1 << "+" << ws.target.layout.m2
                  << "  clairaut=" << (e.is_clairaut ? "yes" : "no") << "  " << e.notes << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Warped-product submersion geometry checks"};
    app.require_subcommand(1);

    std::string entry, out_path, tier = "analytic";
    VerifyParameters params;
    params.seed = configured_seed();
    auto* verify = app.add_subcommand("verify", "run every suite on a catalog entry and write a JSON report");
    verify->add_option("--entry", entry, "catalog entry")->required();
    verify->add_option("--seed", params.seed, "random seed (default from WPSUB_SEED, else 42)");
    verify->add_option("--samples", params.samples, "sample points")->check(CLI::PositiveNumber);
    verify->add_option("--vectors", params.vectors, "random vector tuples per point")->check(CLI::PositiveNumber);
    verify->add_option("--tolerance-tier", tier, "analytic: per-relation tiers; fd: finite-difference tolerance throughout")
        ->check(CLI::IsMember({"analytic", "fd"}));
    verify->add_option("--geodesics", params.geodesics, "random geodesics for the Clairaut law")->check(CLI::NonNegativeNumber);
    verify->add_option("--out", out_path, "report path (stdout when omitted)");

    std::string p0, v0;
    double t_end = 1.0, dt = 1e-3;
    auto* geodesic = app.add_subcommand("geodesic", "integrate a geodesic and write the trace as CSV");
    geodesic->add_option("--entry", entry, "catalog entry")->required();
    geodesic->add_option("--p0", p0, "initial point, comma separated")->required();
    geodesic->add_option("--v0", v0, "initial velocity, comma separated")->required();
    geodesic->add_option("--t-end", t_end, "end time")->check(CLI::NonNegativeNumber);
    geodesic->add_option("--dt", dt, "time step")->check(CLI::PositiveNumber);
    geodesic->add_option("--out", out_path, "CSV path (stdout when omitted)");

    std::string point, tensor = "riemann";
    auto* curvature = app.add_subcommand("curvature", "print a curvature tensor at a point");
    curvature->add_option("--entry", entry, "catalog entry")->required();
    curvature->add_option("--point", point, "point, comma separated")->required();
    curvature->add_option("--tensor", tensor, "riemann, ricci, weyl or scalar")
        ->check(CLI::IsMember({"riemann", "ricci", "weyl", "scalar"}));

    auto* list = app.add_subcommand("list", "list catalog entries");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*verify) {
            params.tolerance = tier == "fd" ? ToleranceMode::finite_difference : ToleranceMode::per_relation;
            return run_verify(entry, params, out_path);
        }
        if (*geodesic) return run_geodesic(entry, p0, v0, t_end, dt, out_path);
        if (*curvature) return run_curvature(entry, point, tensor);
        if (*list) return run_list();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
