// Mixed curvatures of the warped product behind r4-girth against the girth exponent.
#include <wpsub/wpsub.hpp>

#include <cstdio>

int main() {
    using namespace wpsub;
    const CatalogEntry entry = r4_girth_entry();
    const WarpedSubmersion& ws = entry.ws;
    Vec p(7);
    p << 1.6, 1.2, 0.0, 0.5, 0.3, -0.1, 0.7;

    const Mat g = ws.source.combined.metric_at(p);
    const BlockFrame frame = block_frame(ws, p);
    const Vec u1 = frame.v1.col(0), u2 = frame.v2.col(0), x2 = frame.h2.col(0);
    const Vec grad = gradient(ws.source.combined, ws.psi, p);
    const double grad_sq = grad.dot(g * grad);

    std::printf("|grad psi|^2           = %.12f\n", grad_sq);
    std::printf("sec(U1, U2)            = %.12f\n", sectional(ws.source.combined, p, u1, u2));
    std::printf("sec(U2, X2)            = %.12f\n", sectional(ws.source.combined, p, u2, x2));
    std::printf("scalar curvature       = %.12f\n", scalar_curvature(ws.source.combined, p));
    const LaplacianPair lap = horizontal_laplacian_psi(ws, p);
    std::printf("Lap psi, H1 trace      = %.12f, %.12f\n", lap.full, lap.first_horizontal);
}
