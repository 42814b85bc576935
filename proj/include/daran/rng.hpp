#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace daran {

// splitmix64 finalizer; used to derive independent substream seeds.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix_seed(seed ^ mix_seed(stream));
}

// Deterministic random helpers over raw mt19937_64 draws. The standard
// distributions and std::shuffle are not pinned across library versions,
// so everything downstream of a seed goes through this class.
class DetRng {
  public:
    explicit DetRng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Modulo bias is ~n/2^64, irrelevant here.
    std::size_t index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("DetRng::index: empty range");
        return static_cast<std::size_t>(eng_() % static_cast<std::uint64_t>(n));
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // Index draw proportional to non-negative weights (inverse CDF walk).
    std::size_t weighted_index(const std::vector<double>& w) {
        double total = 0.0;
        for (double x : w) total += x;
        if (!(total > 0.0)) return index(w.size());
        double r = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            acc += w[i];
            if (r < acc) return i;
        }
        return w.size() - 1;
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace daran
