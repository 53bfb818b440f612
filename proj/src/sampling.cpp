#include "nlab/sampling.hpp"

#include <cmath>

namespace nlab {

StateVector haar_state(Rng &rng, int n_parties) {
    std::normal_distribution<double> gauss;
    const Eigen::Index dim = Eigen::Index{1} << n_parties;
    CVector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v(i) = Complex(re, im);
    }
    return StateVector::normalized(v);
}

Direction random_direction(Rng &rng) {
    std::normal_distribution<double> gauss;
    Vec3 v{};
    do {
        for (auto &x : v) {
            x = gauss(rng);
        }
    } while (norm(v) < 1e-9);
    return Direction::from_vector(v);
}

Projector random_spin_projector(Rng &rng) { return projector_from_direction(random_direction(rng)); }

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 finalizer over the pair
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace nlab
