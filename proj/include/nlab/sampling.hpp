#pragma once

#include <cstdint>
#include <random>

#include "nlab/correlation_engine.hpp"
#include "nlab/spin_observables.hpp"

namespace nlab {

using Rng = std::mt19937_64;

/// Uniform (Haar) random pure state on n qubits: normalized complex Gaussian vector.
StateVector haar_state(Rng &rng, int n_parties);

/// Uniform direction on the sphere.
Direction random_direction(Rng &rng);

/// Uniform rank-one single-qubit projector.
Projector random_spin_projector(Rng &rng);

/// Seed for the i-th independent stream derived from a base seed.
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index);

} // namespace nlab
