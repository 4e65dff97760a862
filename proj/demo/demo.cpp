// Small tour of the library: exact moments, the explicit bound, a Monte Carlo
// Kolmogorov distance and a heavy-tailed limit law.
#include <cmath>
#include <cstdio>

#include "logvol/asymptotics.hpp"
#include "logvol/experiments.hpp"
#include "logvol/simplex.hpp"
#include "logvol/stats.hpp"

using namespace logvol;

int main() {
    const SimplexDims d(1000, 501);
    const auto m = spherical_moments(d);
    std::printf("spherical log-volume at (n,p)=(%d,%d): mean %.6f variance %.6f\n", d.n, d.p, m.mean, m.variance);

    const auto b = spherical_ks_bound(d);
    std::printf("explicit Kolmogorov bound %.5f (epsilon_np %.3g)\n", b.ks_bound, b.epsilon_np);

    const auto v = standardize(logvol_batch(RadialLaw::spherical_unit(), d, 20000, RngStream{7, 0}, 1), m.mean,
                               std::sqrt(m.variance));
    const auto ks = ks_one_sample(v, normal_cdf);
    std::printf("empirical distance %.5f +- %.5f from 20000 draws\n", ks.statistic, ks.mc_half_width);

    for (int n : {10, 100, 1000}) {
        const auto g = gaussian_matrix_mean_var_approx(n);
        std::printf("log|det| of %4d x %4d Gaussian: mean %.6f (approx %.6f) variance %.6f (approx %.6f)\n", n, n,
                    g.exact.mean, g.approx.mean, g.exact.variance, g.approx.variance);
    }

    const auto s = stable_setup(1.5, SimplexDims(2000, 1000), false);
    std::printf("stable limit alpha=1.5: sigma_n %.4f b_n %.4f drift %.4f, F(0)=%.5f F(5)=%.5f\n",
                s.centering.sigma_n, s.centering.b_n, s.params.gamma_shift, stable_cdf(s.params, 0.0),
                stable_cdf(s.params, 5.0));
}
