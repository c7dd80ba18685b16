#pragma once

#include <cstdint>
#include <stdexcept>

#include "vatsp/instance.hpp"

namespace vatsp {

struct Profile {
    int n = 8;  // total vertices, apices included
    int a = 0;
    int p = 1;
    int k = 1;  // number of vortices
    int min_cost = 1, max_cost = 20;
    // Face vertices carry at most one planar edge off their face.
    bool normalized = true;
    // Allows pendant vertices inside the first face, which makes it non-simple.
    bool repeated_face = false;
    // Upper bound on attachments of a new planar vertex.
    int max_attach = 3;
    // Upper bound on the face length (0 = no bound beyond n).
    int max_face = 0;
    // Lower bound on the vortex interior size.
    int min_interior = 0;
};

struct ProfileError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline constexpr int kMaxGeneratedVertices = 5000;

// Deterministic in (seed, profile); the result always passes validate().
NearlyEmbeddableInstance generate_instance(std::uint64_t seed, const Profile& profile);

}  // namespace vatsp
