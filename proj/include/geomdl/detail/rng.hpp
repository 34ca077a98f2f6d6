#pragma once

// Deterministic random streams.  mt19937_64 outputs are pinned by the
// standard; uniforms/normals are derived by hand (std::*_distribution is
// implementation-defined and would break byte-stable reports).

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "geomdl/errors.hpp"

namespace geomdl::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// One stream per (seed, stream) pair; chunked Monte Carlo derives stream =
// chunk index, so results are a pure function of (seed, chunk layout).
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : gen_(splitmix64(seed ^ splitmix64(stream + 0x51ab5e1ull))) {}

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // standard normal via Box-Muller (cached pair)
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// N column-samples from N(0, sigma); deterministic in (sigma, N, seed).
inline Eigen::MatrixXd gaussian_sample_matrix(const Eigen::MatrixXd& sigma,
                                              long n_samples, std::uint64_t seed) {
    const Eigen::Index d = sigma.rows();
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw not_positive_definite("gaussian_sample_matrix: sigma not SPD");
    Eigen::MatrixXd chol = llt.matrixL();
    Rng rng(seed);
    Eigen::MatrixXd z(d, n_samples);
    for (long j = 0; j < n_samples; ++j)
        for (Eigen::Index i = 0; i < d; ++i) z(i, j) = rng.normal();
    return chol * z;
}

} // namespace geomdl::detail
