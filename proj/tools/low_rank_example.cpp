// Rank-k approximation of a matrix with a rapidly decaying spectrum.
//
//   low_rank_example [n] [k]

#include <cstdio>
#include <cstdlib>

#include "randutv/randutv.hpp"

int main(int argc, char** argv)
{
    using namespace randutv;
    const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 300;
    const std::size_t k = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 60;
    if (n < 2 || k < 1 || k >= n) {
        std::fprintf(stderr, "usage: low_rank_example [n >= 2] [1 <= k < n]\n");
        return 2;
    }

    const GeneratedMatrix g = gen_fast_decay(n, 1);

    UtvOptions opt;
    opt.block_size = 32;
    opt.power_steps = 2;
    RandomStream stream(2024);
    const UtvFactorization f = rand_utv(g.a, opt, stream);

    // A ≈ U(:, 0:k)·T(0:k, :)·Vᵀ; its error is the norm of T's trailing block.
    const Matrix ak = utv_rank_k(f.u, f.t, f.v, k);
    const double err = spectral_norm(subtract(g.a, ak));
    const double best = (*g.known_sigma)[k];

    std::printf("A: %zux%zu, spectrum from 1 down to 1e-5\n", n, n);
    std::printf("randUTV with b=%zu, q=%zu: %zu steps\n", opt.block_size, opt.power_steps, f.steps);
    std::printf("‖A − UTVᵀ‖_F / ‖A‖_F = %.2e\n",
                frobenius_norm(subtract(g.a, multiply(multiply(f.u, f.t), f.v, Op::None, Op::Trans))) /
                    frobenius_norm(g.a));
    std::printf("rank-%zu error %.4e, optimal %.4e (ratio %.3f)\n", k, err, best, err / best);

    const CpqrFactorization c = cpqr(g.a);
    const double cpqr_err = spectral_norm(subtract(g.a, cpqr_rank_k_approx(c, k)));
    std::printf("column-pivoted QR rank-%zu error %.4e (ratio %.3f)\n", k, cpqr_err, cpqr_err / best);

    std::printf("\n   j      T(j,j)     sigma_j\n");
    for (std::size_t j = 0; j < n; j += n / 10)
        std::printf("%4zu  %.4e  %.4e\n", j + 1, f.t(j, j), (*g.known_sigma)[j]);
    return 0;
}
