// Follows one geodesic on r4-girth and on its doubled-exponent control, printing
// r sin(omega) along the way.
#include <wpsub/wpsub.hpp>

#include <cstdio>

int main() {
    using namespace wpsub;
    Vec p0(7), v0(7);
    p0 << 1.8, 1.0, 0.2, -0.3, 0.1, 0.4, -0.2;
    v0 << -0.3, 0.5, 0.1, 0.2, 0.4, -0.6, 0.3;

    for (const CatalogEntry& entry : {r4_girth_entry(), non_clairaut_control_entry()}) {
        const MetricField& m = entry.ws.source.combined;
        const GeodesicTrace trace = integrate_geodesic(m, p0, v0, 1.0, 1e-3);
        const ClairautStats stats = clairaut_trace(entry.ws, trace);
        std::printf("%s\n", entry.name.c_str());
        for (std::size_t k = 0; k < trace.size(); k += 200)
            std::printf("  t = %.1f  value = %.12f\n", trace.times[k], stats.values[k]);
        std::printf("  relative drift %.3e, energy drift %.3e\n", stats.max_drift, trace.max_energy_drift());
    }
}
