#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace hinforge {

uint64_t splitmix64(uint64_t x);
uint64_t hash_combine(uint64_t a, uint64_t b);
uint64_t hash_str(std::string_view s);

// Deterministic random source. All randomness in the library flows through
// explicitly seeded Rng instances; there is no global generator.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(splitmix64(seed)) {}

    uint64_t next_u64() { return eng_(); }

    // Uniform on the open interval (0,1); never returns an exact endpoint.
    double uniform_open01() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    // Uniform on [0,1).
    double uniform() { return static_cast<double>(eng_() >> 11) * (1.0 / 9007199254740992.0); }

    double gaussian() { return normal_(eng_); }

    double gumbel() {
        double u = uniform_open01();
        return -std::log(-std::log(u));
    }

    // Uniform integer in [0, n). n must be positive.
    int uniform_int(int n);

    // Fisher-Yates permutation of 0..n-1.
    std::vector<int> permutation(int n);

    std::mt19937_64& engine() { return eng_; }

  private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// Derives independent named substreams from one master seed. Streams are
// addressed by (name, indices), so the same draw can be reproduced without
// replaying any preceding draws. This is what makes checkpoint resume and
// ablation arms share randomness exactly.
class SeedStream {
  public:
    explicit SeedStream(uint64_t master) : master_(master) {}

    uint64_t master() const { return master_; }

    Rng stream(std::string_view name) const { return Rng(hash_combine(master_, hash_str(name))); }
    Rng stream(std::string_view name, uint64_t a) const {
        return Rng(hash_combine(hash_combine(master_, hash_str(name)), a));
    }
    Rng stream(std::string_view name, uint64_t a, uint64_t b) const {
        return Rng(hash_combine(hash_combine(hash_combine(master_, hash_str(name)), a), b));
    }

  private:
    uint64_t master_;
};

}  // namespace hinforge
