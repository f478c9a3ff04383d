#include "psep/common.hpp"

#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace psep {

std::vector<double> interleave(const Field2& f)
{
    std::vector<double> x(2 * f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        x[2 * i] = f.u1[i];
        x[2 * i + 1] = f.u2[i];
    }
    return x;
}

Field2 deinterleave(const std::vector<double>& x)
{
    Field2 f(x.size() / 2);
    for (std::size_t i = 0; i < f.size(); ++i) {
        f.u1[i] = x[2 * i];
        f.u2[i] = x[2 * i + 1];
    }
    return f;
}

double sup_norm(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn)
{
    const std::size_t workers = std::min<std::size_t>(n, std::size_t(std::max(threads, 1)));
    std::vector<std::exception_ptr> errors(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::mutex mu;
        std::size_t next = 0;
        auto work = [&] {
            for (;;) {
                std::size_t i;
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (next >= n) return;
                    i = next++;
                }
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

UniformStream::UniformStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
{
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream),
                      std::uint32_t(stream >> 32), std::uint32_t(index), std::uint32_t(index >> 32)};
    engine_.seed(seq);
}

}  // namespace psep
