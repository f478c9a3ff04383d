#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace psep {

// Post-solve invariant or input-range violation.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iterative solver gave up; message carries the solver status.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Field2 {
    std::vector<double> u1, u2;

    Field2() = default;
    explicit Field2(std::size_t n) : u1(n, 0.0), u2(n, 0.0) {}
    Field2(std::vector<double> a, std::vector<double> b) : u1(std::move(a)), u2(std::move(b)) {}
    std::size_t size() const { return u1.size(); }
};

// Interleaved layout used by the coupled banded systems: x[2i] = u1[i], x[2i+1] = u2[i].
std::vector<double> interleave(const Field2& f);
Field2 deinterleave(const std::vector<double>& x);

double sup_norm(const std::vector<double>& v);

// Runs fn(i) for every i in [0, n) on up to `threads` workers. If any call throws, the
// exception of the lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// Reproducible uniforms in [0, 1) for (seed, stream, index): mt19937_64 seeded through
// seed_seq, 53 high bits per draw (both fully specified by the standard).
class UniformStream {
public:
    UniformStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
    double next() { return double(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

}  // namespace psep
